"""Independence-style ternary relations on finite sites, made executable.

The package provides finite sites (closure operator + symmetry group),
ternary relations over them, the four relation transformers and their
axioms with witness-producing checkers, a registry of preservation
claims with a seeded counterexample search, and an exact GF(p)
subspace layer reproducing the base-monotonicity failure instance.
"""

from .axioms import Axiom, Side, axiom_profile, check_axiom
from .claims import (
    Claim,
    SearchParams,
    claim_by_id,
    registry,
    search,
    verify_claim,
)
from .fplinalg import (
    FpSubspace,
    FpVector,
    GenericPair,
    PairSequenceClass,
    acfg_bmon_failure_instance,
    classify_sequence,
    generic_intersection_check,
    intersect,
    is_direct_sum,
    kim_indep,
    span,
    sum_spaces,
)
from .operators import (
    apply_expr,
    close_right,
    force_extension,
    monotonise,
    monotonise_naive,
    parse_expr,
)
from .relations import (
    TernaryRelation,
    builtin_a_indep,
    builtin_from_predicate,
    builtin_full,
    equals,
    implies,
    is_invariant,
    load_relation,
    random_invariant_relation,
)
from .sites import (
    ClosureOperator,
    Site,
    SymmetryGroup,
    load_site,
    symmetric_group,
    trivial_group,
    validate_site,
)
from .verdict import Verdict

__all__ = [name for name in dir() if not name.startswith("_")]

"""Exact linear algebra over F_p and the base-monotonicity failure kernel.

Subspaces of F_p^k are carried as reduced-row-echelon bases, the unique
canonical representation, so equality is representation equality and
all arithmetic (span, sum, intersection via the kernel construction,
membership) is exact integer arithmetic mod p.

On top of the subspace layer sit the pieces that make the positive
characteristic counterexample mechanism executable:

* kim_indep: the two-part independence predicate for subspaces U, V
  over a common base W relative to a distinguished subgroup G
  (U meet V = W, and G splits over the sum U + V);
* acfg_bmon_failure_instance: the five-coordinate instance where that
  predicate holds over the bottom base yet fails over an intermediate
  base, witnessed by the vector ad2 - d1;
* generic_intersection_check: the degree-one-slice verifier showing a
  tower G + span(x*u_n - v_n) meets the ground space exactly in G,
  which reduces to a kernel computation on the x-coefficients;
* classify_sequence: the trichotomy classifier for finite pair
  sequences that behave like indiscernible sequences in a vector
  space: both coordinates jointly free, first constant, or second
  constant.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple

from .verdict import Verdict

MAX_PRIME = 251


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def _check_prime(p: int):
    if not (2 <= p <= MAX_PRIME and is_prime(p)):
        raise ValueError(f"p must be a prime in 2..{MAX_PRIME}, got {p}")


@dataclass(frozen=True)
class FpVector:
    """A vector in F_p^k with canonically reduced coordinates."""

    p: int
    k: int
    coords: Tuple[int, ...]

    def __post_init__(self):
        _check_prime(self.p)
        if self.k < 1:
            raise ValueError("dimension must be positive")
        if len(self.coords) != self.k:
            raise ValueError(f"expected {self.k} coordinates")
        object.__setattr__(
            self, "coords", tuple(c % self.p for c in self.coords)
        )

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def _match(self, other: "FpVector"):
        if self.p != other.p or self.k != other.k:
            raise ValueError("vectors live in different spaces")

    def __add__(self, other: "FpVector") -> "FpVector":
        self._match(other)
        return FpVector(self.p, self.k,
                        tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "FpVector") -> "FpVector":
        self._match(other)
        return FpVector(self.p, self.k,
                        tuple(a - b for a, b in zip(self.coords, other.coords)))

    def scale(self, scalar: int) -> "FpVector":
        return FpVector(self.p, self.k,
                        tuple(scalar * c for c in self.coords))


def basis_vector(p: int, k: int, i: int) -> FpVector:
    coords = [0] * k
    coords[i] = 1
    return FpVector(p, k, tuple(coords))


def zero_vector(p: int, k: int) -> FpVector:
    return FpVector(p, k, (0,) * k)


# -- row reduction ------------------------------------------------------------


def _rref(rows: List[List[int]], p: int) -> List[List[int]]:
    """Reduced row echelon form over F_p; returns the nonzero rows."""
    rows = [list(r) for r in rows]
    if not rows:
        return []
    ncols = len(rows[0])
    pivot_row = 0
    for col in range(ncols):
        pivot = None
        for r in range(pivot_row, len(rows)):
            if rows[r][col] % p:
                pivot = r
                break
        if pivot is None:
            continue
        rows[pivot_row], rows[pivot] = rows[pivot], rows[pivot_row]
        inv = pow(rows[pivot_row][col], -1, p)
        rows[pivot_row] = [(inv * x) % p for x in rows[pivot_row]]
        for r in range(len(rows)):
            if r != pivot_row and rows[r][col] % p:
                factor = rows[r][col]
                rows[r] = [
                    (x - factor * y) % p
                    for x, y in zip(rows[r], rows[pivot_row])
                ]
        pivot_row += 1
        if pivot_row == len(rows):
            break
    return [r for r in rows if any(x % p for x in r)]


def kernel_of_columns(columns: Sequence[Sequence[int]], width: int,
                      p: int) -> List[Tuple[int, ...]]:
    """Basis of { x : sum_i x_i * columns[i] = 0 } over F_p.

    columns are vectors of length width; the result is in the echelon
    order induced by free variables, deterministic for fixed input.
    """
    n = len(columns)
    if n == 0:
        return []
    rows = [[columns[i][r] for i in range(n)] for r in range(width)]
    reduced = _rref(rows, p)
    pivots = []
    for row in reduced:
        for col, entry in enumerate(row):
            if entry:
                pivots.append(col)
                break
    pivot_set = set(pivots)
    free = [c for c in range(n) if c not in pivot_set]
    basis = []
    for f in free:
        vec = [0] * n
        vec[f] = 1
        for row, pc in zip(reduced, pivots):
            vec[pc] = (-row[f]) % p
        basis.append(tuple(vec))
    return basis


class FpSubspace:
    """A subspace of F_p^k held as its unique reduced echelon basis."""

    def __init__(self, p: int, k: int, rows: Iterable[Sequence[int]] = ()):
        _check_prime(p)
        if k < 1:
            raise ValueError("dimension must be positive")
        self.p = p
        self.k = k
        reduced = _rref([list(r) for r in rows], p)
        self._rows: Tuple[Tuple[int, ...], ...] = tuple(
            tuple(r) for r in reduced
        )

    @property
    def basis(self) -> Tuple[FpVector, ...]:
        return tuple(FpVector(self.p, self.k, r) for r in self._rows)

    @property
    def dim(self) -> int:
        return len(self._rows)

    def is_zero(self) -> bool:
        return not self._rows

    def _match(self, other):
        if isinstance(other, FpVector):
            if self.p != other.p or self.k != other.k:
                raise ValueError("vector lives in a different space")
        elif self.p != other.p or self.k != other.k:
            raise ValueError("subspaces live in different ambient spaces")

    def contains(self, v: FpVector) -> bool:
        self._match(v)
        residue = list(v.coords)
        p = self.p
        for row in self._rows:
            pivot = next(i for i, x in enumerate(row) if x)
            if residue[pivot]:
                factor = residue[pivot]
                residue = [(a - factor * b) % p for a, b in zip(residue, row)]
        return not any(residue)

    def contains_space(self, other: "FpSubspace") -> bool:
        self._match(other)
        return all(self.contains(v) for v in other.basis)

    def __eq__(self, other):
        return (
            isinstance(other, FpSubspace)
            and (self.p, self.k, self._rows) == (other.p, other.k, other._rows)
        )

    def __hash__(self):
        return hash((self.p, self.k, self._rows))

    def __repr__(self):
        return f"FpSubspace(p={self.p}, k={self.k}, dim={self.dim})"

    def to_obj(self) -> dict:
        return {"p": self.p, "k": self.k, "basis": [list(r) for r in self._rows]}


def span(vectors: Sequence[FpVector], p: Optional[int] = None,
         k: Optional[int] = None) -> FpSubspace:
    """The subspace spanned by the given vectors."""
    if vectors:
        p, k = vectors[0].p, vectors[0].k
        for v in vectors[1:]:
            vectors[0]._match(v)
        return FpSubspace(p, k, [v.coords for v in vectors])
    if p is None or k is None:
        raise ValueError("empty span needs explicit p and k")
    return FpSubspace(p, k)


def sum_spaces(u: FpSubspace, v: FpSubspace) -> FpSubspace:
    u._match(v)
    return FpSubspace(u.p, u.k, u._rows + v._rows)


def intersect(u: FpSubspace, v: FpSubspace) -> FpSubspace:
    """U meet V via the kernel construction on the stacked bases.

    A combination sum a_i u_i - sum b_j v_j = 0 identifies the common
    vector sum a_i u_i; the kernel of the stacked column matrix
    therefore spans the intersection.
    """
    u._match(v)
    p, k = u.p, u.k
    columns = [list(r) for r in u._rows]
    columns += [[(-x) % p for x in r] for r in v._rows]
    kernel = kernel_of_columns(columns, k, p)
    r = len(u._rows)
    vectors = []
    for lam in kernel:
        acc = [0] * k
        for coef, row in zip(lam[:r], u._rows):
            for i in range(k):
                acc[i] = (acc[i] + coef * row[i]) % p
        vectors.append(acc)
    return FpSubspace(p, k, vectors)


def is_direct_sum(parts: Sequence[FpSubspace]) -> bool:
    """True iff the sum of the parts has dimension equal to the dim sum."""
    if not parts:
        return True
    total = parts[0]
    for part in parts[1:]:
        total = sum_spaces(total, part)
    return total.dim == sum(part.dim for part in parts)


# -- the independence predicate and the failure instance ---------------------


def kim_indep(u: FpSubspace, v: FpSubspace, w: FpSubspace,
              g: FpSubspace) -> Verdict:
    """Two-part independence of U and V over W relative to G.

    Holds iff U meet V = W and G meet (U + V) = (G meet U) + (G meet V).
    Requires W <= U and W <= V.  The witness is a vector of the larger
    side missing from the smaller (both conditions only ever fail in
    one direction).
    """
    for other in (v, w, g):
        u._match(other)
    if not (u.contains_space(w) and v.contains_space(w)):
        raise ValueError("base W must be contained in both U and V")
    meet = intersect(u, v)
    if meet != w:
        extra = next(vec for vec in meet.basis if not w.contains(vec))
        return Verdict(
            False,
            {"condition": "meet-equals-base", "vector": list(extra.coords)},
        )
    total = sum_spaces(u, v)
    left = intersect(g, total)
    right = sum_spaces(intersect(g, u), intersect(g, v))
    if left != right:
        extra = next(vec for vec in left.basis if not right.contains(vec))
        return Verdict(
            False,
            {"condition": "generic-splits-over-sum",
             "vector": list(extra.coords)},
        )
    return Verdict(True)


MONOMIALS = ("a", "d1", "d2", "ad1", "ad2")


def format_combination(coords: Sequence[int], labels=MONOMIALS) -> str:
    terms = [
        lab if c == 1 else f"{c}*{lab}"
        for c, lab in zip(coords, labels) if c
    ]
    return " + ".join(terms) if terms else "0"


@dataclass(frozen=True)
class KimCase:
    label: str
    u: FpSubspace
    v: FpSubspace
    w: FpSubspace
    verdict: Verdict


@dataclass(frozen=True)
class BmonFailureReport:
    """The constructed instance plus both predicate verdicts."""

    p: int
    swapped: bool
    generic_group: FpSubspace
    base: KimCase
    intermediate: KimCase

    @property
    def witness_vector(self) -> Optional[FpVector]:
        w = self.intermediate.verdict.witness
        if w is None:
            return None
        return FpVector(self.p, 5, tuple(w["vector"]))

    def pattern_ok(self) -> bool:
        """Holds over the base, fails over the intermediate base."""
        return self.base.verdict.holds and not self.intermediate.verdict.holds

    def replay(self) -> bool:
        """Feed the stored subspaces back through the predicate."""
        again_base = kim_indep(self.base.u, self.base.v, self.base.w,
                               self.generic_group)
        again_mid = kim_indep(self.intermediate.u, self.intermediate.v,
                              self.intermediate.w, self.generic_group)
        return (
            again_base.holds == self.base.verdict.holds
            and again_mid.holds == self.intermediate.verdict.holds
            and again_mid.witness == self.intermediate.verdict.witness
        )

    def to_text(self) -> str:
        labels = MONOMIALS
        lines = []
        lines.append(
            f"independence-over-intermediate-base failure instance, p={self.p}"
        )
        lines.append(f"monomial coordinates: {', '.join(labels)}"
                     + ("  (roles of d1/d2 swapped)" if self.swapped else ""))
        gvec = self.generic_group.basis[0]
        lines.append(f"G = span{{ {format_combination(gvec.coords)} }}")
        for case in (self.base, self.intermediate):
            verdict = "kim-independent" if case.verdict.holds \
                else "NOT kim-independent"
            lines.append(
                f"[{case.label}] U = {_span_text(case.u)}, "
                f"V = {_span_text(case.v)}, W = {_span_text(case.w)}: {verdict}"
            )
        wv = self.witness_vector
        if wv is not None:
            lines.append(
                f"witness: {format_combination(wv.coords)} "
                f"(coordinates {list(wv.coords)})"
            )
        return "\n".join(lines) + "\n"

    def to_obj(self) -> dict:
        return {
            "p": self.p,
            "swapped": self.swapped,
            "coordinates": list(MONOMIALS),
            "generic_group": self.generic_group.to_obj(),
            "cases": [
                {
                    "label": case.label,
                    "U": case.u.to_obj(),
                    "V": case.v.to_obj(),
                    "W": case.w.to_obj(),
                    **case.verdict.to_obj(),
                }
                for case in (self.base, self.intermediate)
            ],
        }


def _span_text(space: FpSubspace) -> str:
    if space.is_zero():
        return "0"
    inner = ", ".join(format_combination(v.coords) for v in space.basis)
    return f"span{{{inner}}}"


def acfg_bmon_failure_instance(p: int, swap_roles: bool = False
                               ) -> BmonFailureReport:
    """Build the five-coordinate instance and run both predicate checks.

    Coordinates are the monomials (a, d1, d2, ad1, ad2); the generic
    subgroup is spanned by ad2 - d1.  The predicate holds at the bottom
    base W = 0 with U = span{a}, V = span{d1, d2}, and fails at the
    intermediate base W' = span{d2} with U' = span{a, d2, ad2}, where
    ad2 - d1 lands in the sum without splitting.  swap_roles permutes
    d1 with d2 and ad1 with ad2 throughout.
    """
    _check_prime(p)
    k = 5
    perm = (0, 2, 1, 4, 3) if swap_roles else (0, 1, 2, 3, 4)

    def mono(label_index: int) -> FpVector:
        return basis_vector(p, k, perm[label_index])

    e_a, e_d1, e_d2, e_ad1, e_ad2 = (mono(i) for i in range(5))
    g = span([e_ad2 - e_d1])
    zero = FpSubspace(p, k)
    base = KimCase(
        "base", span([e_a]), span([e_d1, e_d2]), zero,
        kim_indep(span([e_a]), span([e_d1, e_d2]), zero, g),
    )
    u_mid = span([e_a, e_d2, e_ad2])
    v_mid = span([e_d1, e_d2])
    w_mid = span([e_d2])
    intermediate = KimCase(
        "intermediate", u_mid, v_mid, w_mid,
        kim_indep(u_mid, v_mid, w_mid, g),
    )
    return BmonFailureReport(p, swap_roles, g, base, intermediate)


# -- the degree-one-slice verifier --------------------------------------------


@dataclass(frozen=True)
class GenericPair:
    """The degree-one element x*u - v, recorded by its two coefficients."""

    u: FpVector
    v: FpVector

    def __post_init__(self):
        self.u._match(self.v)


def generic_intersection_check(g: FpSubspace,
                               pairs: Sequence[GenericPair]) -> Verdict:
    """Does [G + sum_n span(x*u_n - v_n)] meet the ground space only in G?

    An element g0 + sum_n lambda_n (x*u_n - v_n) lies in the ground
    space iff its x-coefficient sum_n lambda_n u_n vanishes, so the
    check reduces to: for every lambda in the kernel of
    lambda -> sum_n lambda_n u_n, the vector sum_n lambda_n v_n lies in
    G.  A kernel basis suffices because the good set of lambdas is a
    subspace.  The witness is a violating lambda and its vector.
    """
    for pair in pairs:
        g._match(pair.u)
    p, k = g.p, g.k
    columns = [list(pair.u.coords) for pair in pairs]
    kernel = kernel_of_columns(columns, k, p)
    for lam in kernel:
        acc = [0] * k
        for coef, pair in zip(lam, pairs):
            for i in range(k):
                acc[i] = (acc[i] + coef * pair.v.coords[i]) % p
        vec = FpVector(p, k, tuple(acc))
        if not g.contains(vec):
            return Verdict(
                False, {"lambda": list(lam), "vector": list(vec.coords)}
            )
    return Verdict(True)


# -- the pair-sequence trichotomy classifier ----------------------------------


class PairSequenceClass(Enum):
    JOINT_INDEPENDENT = "both-coordinates-jointly-independent"
    FIRST_CONSTANT = "first-constant-second-independent"
    SECOND_CONSTANT = "second-constant-first-independent"
    NOT_INDISCERNIBLE = "not-indiscernible"
    INCONCLUSIVE = "inconclusive"


def _family_rank(vectors: Sequence[FpVector], p: int) -> int:
    return len(_rref([list(v.coords) for v in vectors], p))


def _independent_over(vectors: Sequence[FpVector], over: Sequence[FpVector],
                      p: int) -> bool:
    """No nontrivial combination of vectors falls into span(over)."""
    base_rank = _family_rank(list(over), p)
    joint = _family_rank(list(over) + list(vectors), p)
    return joint == base_rank + len(vectors)


def classify_sequence(seq: Sequence[Tuple[FpVector, FpVector]],
                      arity_cap: int = 3) -> PairSequenceClass:
    """Sort a finite pair sequence into the trichotomy, if it fits.

    The indiscernibility gate runs first, in two parts, both necessary
    for the sequence to extend to an infinite order-indiscernible one:

    1. uniformity: for each tuple length t <= arity_cap, every
       increasing index tuple realizes the same space of vanishing
       linear combinations of its 2t vectors (d1, d2 interleaved);
    2. propagation closure: replacing one index of a relation by a
       fresh index (available in any indiscernible extension) and
       subtracting yields a two-index relation, so for each relation mu
       in a tuple kernel and each position s, the projected relation
       (mu_s, -mu_s) must already lie in the common pair kernel.

    Sequences passing the gate are matched against the three
    configurations literally: both coordinate families jointly
    independent, first coordinate constant with the second independent
    over it, or the mirror image.  A gated sequence matching none is
    INCONCLUSIVE, which finite lengths permit.
    """
    if len(seq) < 2:
        raise ValueError("need at least two pairs")
    if arity_cap < 2:
        raise ValueError("arity cap must be at least 2")
    first = seq[0][0]
    p, k = first.p, first.k
    for d1, d2 in seq:
        first._match(d1)
        first._match(d2)
    pairs = [(d1.coords, d2.coords) for d1, d2 in seq]
    if len(set(pairs)) != len(pairs):
        raise ValueError("pairs must be pairwise distinct")

    n = len(seq)
    m = min(arity_cap, n)
    kernels = {}
    for t in range(1, m + 1):
        common = None
        for combo in _increasing_tuples(n, t):
            columns = []
            for i in combo:
                columns.append(list(seq[i][0].coords))
                columns.append(list(seq[i][1].coords))
            kernel = FpSubspace(p, 2 * t, kernel_of_columns(columns, k, p))
            if common is None:
                common = kernel
            elif kernel != common:
                return PairSequenceClass.NOT_INDISCERNIBLE
        kernels[t] = common

    pair_kernel = kernels[2] if 2 in kernels else None
    if pair_kernel is not None:
        for t, kernel in kernels.items():
            for mu in kernel.basis:
                for s in range(t):
                    a, b = mu.coords[2 * s], mu.coords[2 * s + 1]
                    derived = FpVector(p, 4, (a, b, -a, -b))
                    if not pair_kernel.contains(derived):
                        return PairSequenceClass.NOT_INDISCERNIBLE

    d1s = [d1 for d1, _ in seq]
    d2s = [d2 for _, d2 in seq]
    if _family_rank(d1s + d2s, p) == 2 * n:
        return PairSequenceClass.JOINT_INDEPENDENT
    if all(d1.coords == d1s[0].coords for d1 in d1s) and \
            _independent_over(d2s, [d1s[0]], p):
        return PairSequenceClass.FIRST_CONSTANT
    if all(d2.coords == d2s[0].coords for d2 in d2s) and \
            _independent_over(d1s, [d2s[0]], p):
        return PairSequenceClass.SECOND_CONSTANT
    return PairSequenceClass.INCONCLUSIVE


def _increasing_tuples(n: int, t: int):
    return itertools.combinations(range(n), t)

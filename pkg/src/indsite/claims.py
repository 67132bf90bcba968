"""Machine-checkable preservation claims and the search harness.

Each claim packages the hypotheses an input relation must satisfy, an
operator expression to build from it, and the conclusion the output
must satisfy (axioms, implications between expressions, or table
equalities).  verify_claim evaluates one claim on one site/relation
instance exactly; search sweeps claims over enumerated or sampled
sites and seeded relation populations, collecting confirmations,
refutations (with fully replayable witness bundles) and skips.

Claims carry a provenance tag:

* "formal" - the proof is plain set manipulation, valid verbatim at
  finite scale; a refutation is a bug in this package by definition;
* "external-proof" - the proof leans on results whose arguments may
  use saturation; refutations are reportable findings, not bugs;
* "finite-analogue" - a finite stand-in for an infinitary statement;
  refutations are findings.
"""

from __future__ import annotations

import json
import multiprocessing
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

from .axioms import Axiom, Side, check_axiom
from .operators import apply_expr, parse_expr
from .relations import (
    TernaryRelation,
    builtin_a_indep,
    builtin_full,
    equals,
    implies,
    is_invariant,
    random_invariant_relation,
    relation_from_obj,
    relation_to_obj,
)
from .seeding import keyed_u64
from .sites import (
    ClosureOperator,
    Site,
    SymmetryGroup,
    enumerate_moore_families,
    random_moore_family,
    site_from_obj,
    symmetric_group,
    trivial_group,
    validate_site,
)
from .verdict import Verdict

AxiomRef = Tuple[str, Axiom, Optional[Side]]


@dataclass(frozen=True)
class ClaimRule:
    """One hypotheses -> conclusion implication inside a claim."""

    hypothesis_axioms: Tuple[AxiomRef, ...] = ()
    hypothesis_invariant: Tuple[str, ...] = ()
    hypothesis_implications: Tuple[Tuple[str, str], ...] = ()
    conclusion_axioms: Tuple[AxiomRef, ...] = ()
    conclusion_invariant: Tuple[str, ...] = ()
    conclusion_implications: Tuple[Tuple[str, str], ...] = ()
    conclusion_equalities: Tuple[Tuple[str, str], ...] = ()


@dataclass(frozen=True)
class Claim:
    id: str
    title: str
    provenance: str  # formal | external-proof | finite-analogue
    rules: Tuple[ClaimRule, ...]
    arity: int = 1
    requires_exchange_closure: bool = False
    fixed_base: Optional[str] = None  # e.g. "a-indep"

    def expressions(self) -> List[str]:
        seen = []
        for rule in self.rules:
            for expr, _, _ in rule.hypothesis_axioms + rule.conclusion_axioms:
                if expr not in seen:
                    seen.append(expr)
            for pair in (rule.hypothesis_implications
                         + rule.conclusion_implications
                         + rule.conclusion_equalities):
                for expr in pair:
                    if expr not in seen:
                        seen.append(expr)
            for expr in rule.hypothesis_invariant + rule.conclusion_invariant:
                if expr not in seen:
                    seen.append(expr)
        return seen


def _rule(hyp=(), inv=(), hyp_impl=(), ax=(), concl_inv=(), impl=(), eq=()):
    return ClaimRule(
        hypothesis_axioms=tuple(hyp),
        hypothesis_invariant=tuple(inv),
        hypothesis_implications=tuple(hyp_impl),
        conclusion_axioms=tuple(ax),
        conclusion_invariant=tuple(concl_inv),
        conclusion_implications=tuple(impl),
        conclusion_equalities=tuple(eq),
    )


L = Side.LEFT
R = Side.RIGHT


def registry() -> List[Claim]:
    """The built-in claims, ids fixed."""
    star_base_hyp = (("R", Axiom.MON, L), ("R", Axiom.MON, R))
    return [
        Claim(
            "C1", "m-bmon", "formal",
            rules=(_rule(ax=[("m(R)", Axiom.BMON, None)]),),
        ),
        Claim(
            "C2", "m-preserve", "formal",
            rules=(
                _rule(hyp=[("R", Axiom.MON, L)],
                      ax=[("m(R)", Axiom.MON, L)]),
                _rule(hyp=[("R", Axiom.MON, R)],
                      ax=[("m(R)", Axiom.MON, R)]),
                _rule(hyp=[("R", Axiom.MON, L), ("R", Axiom.NOR, L)],
                      ax=[("m(R)", Axiom.NOR, L)]),
                _rule(hyp=[("R", Axiom.NOR, R)],
                      ax=[("m(R)", Axiom.NOR, R)]),
                _rule(hyp=[("R", Axiom.MON, L), ("R", Axiom.NOR, L),
                           ("R", Axiom.TRA, L)],
                      ax=[("m(R)", Axiom.TRA, L)]),
            ),
        ),
        Claim(
            "C3", "m-weakening", "formal", arity=2,
            rules=(
                _rule(hyp=[("R0", Axiom.NOR, R), ("R0", Axiom.MON, R),
                           ("R0", Axiom.BMON, None)],
                      hyp_impl=[("R0", "R")],
                      impl=[("R0", "m(R)")]),
            ),
        ),
        Claim(
            "C4", "star-preserve", "external-proof",
            rules=(
                _rule(inv=["R"], hyp=star_base_hyp,
                      concl_inv=["star(R)"],
                      ax=[("star(R)", Axiom.MON, L),
                          ("star(R)", Axiom.MON, R),
                          ("star(R)", Axiom.NOR, R),
                          ("star(R)", Axiom.EXT, None),
                          ("star(R)", Axiom.CLO_BC, R)]),
                _rule(inv=["R"], hyp=star_base_hyp + (("R", Axiom.BMON, None),),
                      ax=[("star(R)", Axiom.BMON, None)]),
                _rule(inv=["R"], hyp=star_base_hyp + (("R", Axiom.TRA, L),),
                      ax=[("star(R)", Axiom.TRA, L)]),
                _rule(inv=["R"], hyp=star_base_hyp + (("R", Axiom.NOR, L),),
                      ax=[("star(R)", Axiom.NOR, L)]),
                _rule(inv=["R"], hyp=star_base_hyp + (("R", Axiom.AREF, None),),
                      ax=[("star(R)", Axiom.AREF, None)]),
            ),
        ),
        Claim(
            "C5", "mstar-chain", "external-proof",
            rules=(
                _rule(inv=["R"], hyp=star_base_hyp,
                      ax=[("star(m(R))", Axiom.NOR, R),
                          ("star(m(R))", Axiom.CLO_BC, R),
                          ("star(m(R))", Axiom.BMON, None),
                          ("star(m(R))", Axiom.EXT, None)],
                      impl=[("star(m(R))", "m(R)"), ("m(R)", "R")]),
            ),
        ),
        Claim(
            "C6", "Mstar-eq-mstar", "external-proof",
            rules=(
                _rule(inv=["R"],
                      hyp=[("R", Axiom.NOR, L), ("R", Axiom.NOR, R),
                           ("R", Axiom.MON, L), ("R", Axiom.MON, R)],
                      eq=[("star(M(R))", "star(m(R))")]),
            ),
        ),
        Claim(
            "C7", "c-basic", "formal",
            rules=(
                _rule(ax=[("c(R)", Axiom.CLO_BC, R), ("c(R)", Axiom.NOR, R)]),
                _rule(hyp=[("R", Axiom.MON, R)], impl=[("c(R)", "R")]),
                _rule(hyp=[("R", Axiom.MON, L)],
                      ax=[("c(R)", Axiom.MON, L)]),
                _rule(hyp=[("R", Axiom.MON, R)],
                      ax=[("c(R)", Axiom.MON, R)]),
                _rule(hyp=[("R", Axiom.NOR, L)],
                      ax=[("c(R)", Axiom.NOR, L)]),
                _rule(hyp=[("R", Axiom.BMON, None)],
                      ax=[("c(R)", Axiom.BMON, None)]),
            ),
        ),
        Claim(
            "C8", "mc-vs-M", "formal",
            rules=(
                _rule(hyp=[("R", Axiom.NOR, R), ("R", Axiom.MON, R)],
                      impl=[("c(m(R))", "M(R)")]),
                _rule(hyp=[("R", Axiom.NOR, R), ("R", Axiom.MON, R),
                           ("R", Axiom.CLO_BC, R)],
                      eq=[("c(m(R))", "M(R)")]),
            ),
        ),
        Claim(
            "C9", "M-to-m", "formal",
            rules=(_rule(impl=[("M(R)", "m(R)")]),),
        ),
        Claim(
            "C10", "pregeom-aM-eq-am", "finite-analogue",
            requires_exchange_closure=True, fixed_base="a-indep",
            rules=(_rule(eq=[("M(R)", "m(R)")]),),
        ),
        Claim(
            "C11", "star-weaker", "formal",
            rules=(
                _rule(inv=["R"], hyp=[("R", Axiom.MON, R)],
                      impl=[("star(R)", "R")]),
            ),
        ),
    ]


def claim_by_id(claim_id: str) -> Claim:
    for claim in registry():
        if claim.id == claim_id:
            return claim
    raise KeyError(f"no claim with id {claim_id!r}")


# -- single-instance verification ---------------------------------------------


class ClaimCache:
    """Memoizes operator outputs and axiom verdicts by table identity.

    Intended to live for one site sweep; everything is keyed on table
    bytes so relations with equal tables share work.
    """

    def __init__(self):
        self.ops: Dict = {}
        self.axioms: Dict = {}
        self.invariance: Dict = {}

    def check(self, rel: TernaryRelation, axiom: Axiom,
              side: Optional[Side]) -> Verdict:
        key = (rel.table, axiom, side)
        got = self.axioms.get(key)
        if got is None:
            got = check_axiom(rel, axiom, side)
            self.axioms[key] = got
        return got

    def invariant(self, rel: TernaryRelation) -> Verdict:
        key = rel.table
        got = self.invariance.get(key)
        if got is None:
            got = is_invariant(rel)
            self.invariance[key] = got
        return got


@dataclass
class ClaimVerdict:
    """Outcome of one claim on one instance.

    status is confirmed (every applicable rule held), refuted (some
    fired rule failed; refutation is a replayable bundle), or skipped
    (no rule's hypotheses were satisfied, or a site requirement such as
    the exchange property failed).
    """

    claim_id: str
    status: str
    rules_fired: int = 0
    rules_skipped: int = 0
    skip_reasons: List[str] = field(default_factory=list)
    refutation: Optional[dict] = None


def verify_claim(claim: Claim, site: Site, rel: TernaryRelation,
                 rel0: Optional[TernaryRelation] = None,
                 cache: Optional[ClaimCache] = None) -> ClaimVerdict:
    """Check hypotheses exactly, then evaluate the conclusion exactly."""
    if cache is None:
        cache = ClaimCache()
    if claim.requires_exchange_closure and not site.closure_op.has_exchange():
        return ClaimVerdict(claim.id, "skipped", rules_skipped=len(claim.rules),
                            skip_reasons=["closure lacks the exchange property"])
    if claim.fixed_base == "a-indep":
        rel = builtin_a_indep(site)
    if claim.arity == 2 and rel0 is None:
        rel0 = rel

    env: Dict[str, TernaryRelation] = {"R": rel}
    if rel0 is not None:
        env["R0"] = rel0
    built: Dict[str, TernaryRelation] = {}

    def materialize(expr: str) -> TernaryRelation:
        got = built.get(expr)
        if got is None:
            got = apply_expr(parse_expr(expr), env["R"], env.get("R0"),
                             cache=cache.ops)
            built[expr] = got
        return got

    fired = 0
    skipped = 0
    reasons: List[str] = []
    for idx, rule in enumerate(claim.rules):
        unmet = _first_unmet_hypothesis(rule, materialize, cache)
        if unmet is not None:
            skipped += 1
            reasons.append(f"rule {idx}: {unmet}")
            continue
        fired += 1
        failure = _first_failed_conclusion(rule, materialize, cache)
        if failure is not None:
            kind, detail = failure
            bundle = {
                "claim": claim.id,
                "rule": idx,
                "kind": kind,
                "site": site.spec(),
                "relation": relation_to_obj(rel),
                "relation0": relation_to_obj(rel0) if rel0 is not None else None,
                "expressions": [
                    {"expr": e, "name": built[e].name} for e in sorted(built)
                ],
                **detail,
            }
            return ClaimVerdict(claim.id, "refuted", rules_fired=fired,
                                rules_skipped=skipped, skip_reasons=reasons,
                                refutation=bundle)
    if fired == 0:
        return ClaimVerdict(claim.id, "skipped", rules_skipped=skipped,
                            skip_reasons=reasons)
    return ClaimVerdict(claim.id, "confirmed", rules_fired=fired,
                        rules_skipped=skipped, skip_reasons=reasons)


def _first_unmet_hypothesis(rule: ClaimRule, materialize, cache: ClaimCache):
    for symbol in rule.hypothesis_invariant:
        if not cache.invariant(materialize(symbol)):
            return f"{symbol} not invariant"
    for expr, axiom, side in rule.hypothesis_axioms:
        if not cache.check(materialize(expr), axiom, side):
            tag = f"{side.value} " if side else ""
            return f"{expr} lacks {tag}{axiom.value}"
    for weaker, stronger in rule.hypothesis_implications:
        if not implies(materialize(weaker), materialize(stronger)):
            return f"{weaker} does not imply {stronger}"
    return None


def _first_failed_conclusion(rule: ClaimRule, materialize, cache: ClaimCache):
    for expr in rule.conclusion_invariant:
        verdict = cache.invariant(materialize(expr))
        if not verdict:
            return "invariance", {"subject": expr, **verdict.to_obj()}
    for expr, axiom, side in rule.conclusion_axioms:
        verdict = cache.check(materialize(expr), axiom, side)
        if not verdict:
            return "axiom", {
                "subject": expr,
                "axiom": axiom.value,
                "side": side.value if side else None,
                **verdict.to_obj(),
            }
    for weaker, stronger in rule.conclusion_implications:
        verdict = implies(materialize(weaker), materialize(stronger))
        if not verdict:
            return "implication", {
                "subject": f"{weaker} -> {stronger}", **verdict.to_obj()
            }
    for left, right in rule.conclusion_equalities:
        verdict = equals(materialize(left), materialize(right))
        if not verdict:
            return "equality", {
                "subject": f"{left} = {right}", **verdict.to_obj()
            }
    return None


# -- populations ---------------------------------------------------------------


@dataclass(frozen=True)
class SearchParams:
    """Knobs of the claim search; identical params give identical reports."""

    n_values: Tuple[int, ...] = (3,)
    closure_mode: str = "auto"  # auto | exhaustive | random
    random_closures: int = 10
    group_mode: str = "pair"  # pair | trivial | symmetric | auto
    samples: int = 50
    densities: Tuple[float, ...] = (0.2, 0.5, 0.8)
    seed: int = 0
    jobs: int = 1
    derived_operator_relations: bool = True

    def to_obj(self) -> dict:
        return {
            "n_values": list(self.n_values),
            "closure_mode": self.closure_mode,
            "random_closures": self.random_closures,
            "group_mode": self.group_mode,
            "samples": self.samples,
            "densities": list(self.densities),
            "seed": self.seed,
            "jobs": self.jobs,
            "derived_operator_relations": self.derived_operator_relations,
        }


def iter_sites(params: SearchParams) -> List[Site]:
    """Deterministic site population: closures crossed with groups.

    Closures are exhaustive for n <= 3 (or on request up to 4) and
    seeded random Moore families beyond; candidate groups are the
    trivial group, the full symmetric group when it respects the
    closure, and in auto mode a couple of seeded generated groups.
    Only sites passing validation are kept.
    """
    sites: List[Site] = []
    for n in params.n_values:
        if params.closure_mode == "exhaustive" or (
            params.closure_mode == "auto" and n <= 3
        ):
            families = enumerate_moore_families(n)
        else:
            seen = set()
            families = []
            for i in range(params.random_closures):
                fam = random_moore_family(n, params.seed, i)
                if fam not in seen:
                    seen.add(fam)
                    families.append(fam)
            families.sort()
        for fam_index, fam in enumerate(families):
            closure = ClosureOperator(n, fam)
            groups = []
            if params.group_mode in ("pair", "trivial", "auto"):
                groups.append(trivial_group(n))
            if params.group_mode in ("pair", "symmetric", "auto") and n > 1:
                groups.append(symmetric_group(n))
            if params.group_mode == "auto":
                groups.extend(
                    _sampled_groups(n, params.seed, fam_index, count=2)
                )
            seen_groups = set()
            for group in groups:
                if group.elements in seen_groups:
                    continue
                seen_groups.add(group.elements)
                site = Site(n, closure, group)
                if validate_site(site).ok:
                    sites.append(site)
    return sites


def _sampled_groups(n: int, seed: int, fam_index: int, count: int):
    from .seeding import HashRng

    groups = []
    for j in range(count):
        rng = HashRng("group", seed, n, fam_index, j)
        perm = list(range(n))
        rng.shuffle(perm)
        try:
            groups.append(SymmetryGroup(n, [perm]))
        except ValueError:
            continue
    return groups


def relations_for_site(site: Site, site_index: int,
                       params: SearchParams) -> List[TernaryRelation]:
    """Curated builtins, seeded samples, and operator outputs of samples."""
    from .operators import close_right, force_extension, monotonise_naive

    population = [builtin_full(site), builtin_a_indep(site)]
    samples = []
    for i in range(params.samples):
        density = params.densities[i % len(params.densities)]
        sample_seed = keyed_u64("sample", params.seed, site_index, i)
        samples.append(random_invariant_relation(site, sample_seed, density))
    population.extend(samples)
    if params.derived_operator_relations:
        # operator outputs satisfy many hypotheses by construction;
        # derive from the first sample of each density
        for base in samples[: len(params.densities)]:
            population.append(monotonise_naive(base))
            population.append(close_right(base))
            population.append(force_extension(base))
    return population


def partner_relations(site: Site, rel: TernaryRelation,
                      cache: ClaimCache) -> List[TernaryRelation]:
    """Candidate first arguments for two-relation claims.

    Raw sampling rarely satisfies conjunctive hypotheses such as
    "R0 implies R and R0 is normal, monotone, base-monotone", so the
    candidates are operator outputs of the instance itself plus the
    curated builtins, deduplicated by table.
    """
    ops = cache.ops
    candidates = [
        rel,
        apply_expr("m(R)", rel, cache=ops),
        apply_expr("M(R)", rel, cache=ops),
        apply_expr("c(R)", rel, cache=ops),
        apply_expr("star(m(R))", rel, cache=ops),
        builtin_full(site),
        builtin_a_indep(site),
    ]
    out = []
    seen = set()
    for cand in candidates:
        if cand.table not in seen:
            seen.add(cand.table)
            out.append(cand)
    return out


# -- the search ------------------------------------------------------------------


@dataclass
class SearchReport:
    claim_id: str
    provenance: str
    params: SearchParams
    sites_total: int = 0
    instances_checked: int = 0
    confirmed: int = 0
    refuted: int = 0
    skipped: int = 0
    rules_fired: int = 0
    refutations: List[dict] = field(default_factory=list)

    def to_obj(self) -> dict:
        return {
            "claim": self.claim_id,
            "provenance": self.provenance,
            "params": self.params.to_obj(),
            "sites": self.sites_total,
            "instances_checked": self.instances_checked,
            "confirmed": self.confirmed,
            "refuted": self.refuted,
            "skipped": self.skipped,
            "rules_fired": self.rules_fired,
            "refutations": self.refutations,
        }

    def to_text(self) -> str:
        lines = [
            f"claim {self.claim_id} ({self.provenance}) search report",
            f"  sites: {self.sites_total}",
            f"  instances checked: {self.instances_checked}",
            f"  confirmed: {self.confirmed}",
            f"  refuted: {self.refuted}",
            f"  skipped (hypotheses unsatisfied): {self.skipped}",
            f"  rules fired: {self.rules_fired}",
        ]
        if self.refuted and self.provenance != "formal":
            lines.append("  refutations are reportable findings "
                         f"({self.provenance})")
        return "\n".join(lines) + "\n"


def _run_site(claim: Claim, site: Site, site_index: int,
              params: SearchParams) -> dict:
    cache = ClaimCache()
    out = {
        "site_index": site_index,
        "instances": 0,
        "confirmed": 0,
        "refuted": 0,
        "skipped": 0,
        "rules_fired": 0,
        "refutations": [],
    }
    if claim.requires_exchange_closure and not site.closure_op.has_exchange():
        out["instances"] = 1
        out["skipped"] = 1
        return out
    if claim.fixed_base is not None:
        instances = [(builtin_a_indep(site), None)]
    elif claim.arity == 2:
        instances = []
        for rel in relations_for_site(site, site_index, params):
            for rel0 in partner_relations(site, rel, cache):
                instances.append((rel, rel0))
    else:
        instances = [
            (rel, None) for rel in relations_for_site(site, site_index, params)
        ]
    for rel, rel0 in instances:
        verdict = verify_claim(claim, site, rel, rel0, cache)
        out["instances"] += 1
        out["rules_fired"] += verdict.rules_fired
        if verdict.status == "confirmed":
            out["confirmed"] += 1
        elif verdict.status == "refuted":
            out["refuted"] += 1
            out["refutations"].append(verdict.refutation)
        else:
            out["skipped"] += 1
    return out


def _run_site_packed(args) -> dict:
    claim_id, site_obj, params_obj, site_index = args
    claim = claim_by_id(claim_id)
    site = site_from_obj(site_obj)
    params = SearchParams(**{
        **params_obj,
        "n_values": tuple(params_obj["n_values"]),
        "densities": tuple(params_obj["densities"]),
    })
    return _run_site(claim, site, site_index, params)


def search(claim: Claim, params: SearchParams) -> SearchReport:
    """Sweep the claim over the population; deterministic given params.

    With jobs > 1 the per-site work fans out to a process pool; the
    merge step reassembles results in canonical site order so the
    report is byte-identical regardless of parallelism.
    """
    sites = iter_sites(params)
    report = SearchReport(claim.id, claim.provenance, params,
                          sites_total=len(sites))
    if params.jobs > 1:
        tasks = [
            (claim.id, site.spec(), params.to_obj(), idx)
            for idx, site in enumerate(sites)
        ]
        with multiprocessing.Pool(params.jobs) as pool:
            results = pool.map(_run_site_packed, tasks)
        results.sort(key=lambda r: r["site_index"])
    else:
        results = [
            _run_site(claim, site, idx, params)
            for idx, site in enumerate(sites)
        ]
    for res in results:
        report.instances_checked += res["instances"]
        report.confirmed += res["confirmed"]
        report.refuted += res["refuted"]
        report.skipped += res["skipped"]
        report.rules_fired += res["rules_fired"]
        report.refutations.extend(res["refutations"])
    return report


def replay_refutation(bundle: dict) -> ClaimVerdict:
    """Re-run verify_claim on a stored witness bundle."""
    claim = claim_by_id(bundle["claim"])
    site = site_from_obj(bundle["site"])
    rel = relation_from_obj(bundle["relation"], site=site)
    rel0 = None
    if bundle.get("relation0") is not None:
        rel0 = relation_from_obj(bundle["relation0"], site=site)
    return verify_claim(claim, site, rel, rel0)

"""Finite sites: ground set, closure operator, symmetry group, models.

A site is the finite stage on which ternary relations live.  It packs:

* a ground set {0..n-1} with 1 <= n <= 16;
* a closure operator given extensionally as a Moore family (the list of
  closed subsets; the family must contain the full set and be closed
  under pairwise intersection, which makes cl(A) = least closed
  superset of A well defined);
* a symmetry group given by generators and materialized in full (these
  are tiny groups; no stabilizer chains), required to map closed sets
  to closed sets;
* a list of designated "model" subsets, all closed, defaulting to every
  closed subset.

Sites are immutable after validation and cache the lookup tables the
rest of the package hammers on: the closure table, the action of each
group element on subset masks, pointwise stabilizers and orbits.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .seeding import HashRng
from .subsets import (
    full_mask,
    interval,
    is_subset,
    iter_submasks,
    subset_str,
    supersets,
)

MAX_GROUND = 16
GROUP_SIZE_CAP = 20160


class CapExceeded(ValueError):
    """A configured size cap (group order, table size, depth) was hit."""


class ClosureOperator:
    """A Moore family over {0..n-1} and its induced closure map.

    The constructor is tolerant of invalid families (missing full set,
    intersection gaps); validate_site reports those with witnesses.
    cl(A) is computed as the intersection of all closed supersets of A,
    falling back to the full set when no member contains A.
    """

    def __init__(self, n: int, closed_sets: Iterable[int]):
        if not 1 <= n <= MAX_GROUND:
            raise ValueError(f"ground size must be in 1..{MAX_GROUND}, got {n}")
        self.n = n
        full = full_mask(n)
        sets = sorted(set(closed_sets))
        for s in sets:
            if s < 0 or s > full:
                raise ValueError(f"closed set {s} out of range for n={n}")
        self.closed_sets: Tuple[int, ...] = tuple(sets)
        self._closed_lookup = frozenset(sets)
        self._table: Optional[List[int]] = None

    def is_closed(self, mask: int) -> bool:
        return mask in self._closed_lookup

    def table(self) -> List[int]:
        if self._table is None:
            full = full_mask(self.n)
            tbl = []
            for a in range(full + 1):
                acc = full
                for s in self.closed_sets:
                    if a & ~s == 0:
                        acc &= s
                tbl.append(acc)
            self._table = tbl
        return self._table

    def cl(self, mask: int) -> int:
        return self.table()[mask]

    def has_exchange(self) -> bool:
        """Pregeometry exchange: y in cl(Ax) \\ cl(A) implies x in cl(Ay)."""
        tbl = self.table()
        full = full_mask(self.n)
        for a in range(full + 1):
            cla = tbl[a]
            for x in range(self.n):
                clax = tbl[a | (1 << x)]
                gained = clax & ~cla
                for y in range(self.n):
                    if gained >> y & 1:
                        if not tbl[a | (1 << y)] >> x & 1:
                            return False
        return True

    def __eq__(self, other):
        return (
            isinstance(other, ClosureOperator)
            and self.n == other.n
            and self.closed_sets == other.closed_sets
        )

    def __hash__(self):
        return hash((self.n, self.closed_sets))

    def __repr__(self):
        return f"ClosureOperator(n={self.n}, closed_sets={list(self.closed_sets)})"


def closure_from_map(n: int, cl_map: Sequence[int]) -> ClosureOperator:
    """Convert an explicit closure map to its Moore family.

    The map must be extensive, monotone and idempotent; anything else
    is rejected rather than silently repaired.
    """
    full = full_mask(n)
    if len(cl_map) != full + 1:
        raise ValueError(f"closure map must list all {full + 1} subsets")
    for a in range(full + 1):
        ca = cl_map[a]
        if ca < 0 or ca > full:
            raise ValueError(f"closure map value {ca} out of range")
        if a & ~ca:
            raise ValueError(f"map not extensive at {subset_str(a)}")
        if cl_map[ca] != ca:
            raise ValueError(f"map not idempotent at {subset_str(a)}")
    for a in range(full + 1):
        for b in range(full + 1):
            if a & ~b == 0 and cl_map[a] & ~cl_map[b]:
                raise ValueError(
                    f"map not monotone at {subset_str(a)} <= {subset_str(b)}"
                )
    fixed = [a for a in range(full + 1) if cl_map[a] == a]
    op = ClosureOperator(n, fixed)
    # fixed points of a genuine closure map always form a Moore family
    # whose induced map is the original one; double-check cheaply
    if op.table() != list(cl_map):
        raise ValueError("map is not the closure of its fixed points")
    return op


def _compose(p: Tuple[int, ...], q: Tuple[int, ...]) -> Tuple[int, ...]:
    # apply q first, then p
    return tuple(p[q[i]] for i in range(len(p)))


class SymmetryGroup:
    """A permutation group on the ground set, materialized in full.

    Elements are closed under composition by BFS from the generators;
    construction fails once the element count passes the cap.  Elements
    are kept sorted so that iteration order (and therefore witness
    selection anywhere a group element is part of a witness) is
    canonical; the identity always sorts first.
    """

    def __init__(self, n: int, generators: Iterable[Sequence[int]],
                 size_cap: int = GROUP_SIZE_CAP):
        self.n = n
        gens = []
        for g in generators:
            g = tuple(g)
            if sorted(g) != list(range(n)):
                raise ValueError(f"{list(g)} is not a permutation of 0..{n - 1}")
            gens.append(g)
        self.generators: Tuple[Tuple[int, ...], ...] = tuple(gens)
        identity = tuple(range(n))
        elements = {identity}
        frontier = [identity]
        while frontier:
            new_frontier = []
            for g in self.generators:
                for e in frontier:
                    c = _compose(g, e)
                    if c not in elements:
                        elements.add(c)
                        new_frontier.append(c)
                        if len(elements) > size_cap:
                            raise CapExceeded(
                                f"group exceeds the {size_cap}-element cap"
                            )
            frontier = new_frontier
        self.elements: Tuple[Tuple[int, ...], ...] = tuple(sorted(elements))
        self._subset_action: Optional[List[List[int]]] = None

    @property
    def order(self) -> int:
        return len(self.elements)

    def is_trivial(self) -> bool:
        return self.order == 1

    def subset_action(self) -> List[List[int]]:
        """For each element, the induced map on subset masks."""
        if self._subset_action is None:
            full = full_mask(self.n)
            tables = []
            for perm in self.elements:
                tbl = [0] * (full + 1)
                for mask in range(full + 1):
                    img = 0
                    m = mask
                    i = 0
                    while m:
                        if m & 1:
                            img |= 1 << perm[i]
                        m >>= 1
                        i += 1
                    tbl[mask] = img
                tables.append(tbl)
            self._subset_action = tables
        return self._subset_action

    def __eq__(self, other):
        return (
            isinstance(other, SymmetryGroup)
            and self.n == other.n
            and self.elements == other.elements
        )

    def __hash__(self):
        return hash((self.n, self.elements))

    def __repr__(self):
        return f"SymmetryGroup(n={self.n}, order={self.order})"


def trivial_group(n: int) -> SymmetryGroup:
    return SymmetryGroup(n, [])


def symmetric_group(n: int) -> SymmetryGroup:
    if n == 1:
        return trivial_group(1)
    swap = [1, 0] + list(range(2, n))
    cycle = list(range(1, n)) + [0]
    return SymmetryGroup(n, [swap, cycle])


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    witness: dict = field(default_factory=dict)


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, message: str, **witness):
        self.violations.append(Violation(kind, message, witness))

    def to_obj(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [
                {"kind": v.kind, "message": v.message, "witness": v.witness}
                for v in self.violations
            ],
        }


class Site:
    """Ground set + closure + symmetry group + model subsets.

    The constructor wires the parts together without validating the
    cross-cutting invariants (model closedness, group equivariance);
    call validate_site for a full report, or load_site which rejects
    invalid input outright.
    """

    def __init__(self, n: int, closure: ClosureOperator,
                 group: Optional[SymmetryGroup] = None,
                 models: Optional[Iterable[int]] = None):
        if closure.n != n:
            raise ValueError("closure operator is for a different ground size")
        if group is None:
            group = trivial_group(n)
        if group.n != n:
            raise ValueError("group acts on a different ground size")
        self.n = n
        self.closure_op = closure
        self.group = group
        if models is None:
            self.models: Tuple[int, ...] = closure.closed_sets
        else:
            self.models = tuple(sorted(set(models)))
        self.full = full_mask(n)
        self._stabilizers: Dict[int, Tuple[int, ...]] = {}
        self._orbits: Dict[Tuple[int, int], frozenset] = {}
        self._naive_intervals: Dict[Tuple[int, int], Tuple[int, ...]] = {}
        self._closed_intervals: Dict[Tuple[int, int], Tuple[int, ...]] = {}
        self._supersets: Dict[int, Tuple[int, ...]] = {}

    # -- closure ---------------------------------------------------------

    def closure(self, a: int) -> int:
        self._check_mask(a)
        return self.closure_op.cl(a)

    def _check_mask(self, mask: int):
        if mask < 0 or mask > self.full:
            raise ValueError(f"subset {mask} out of range for n={self.n}")

    # -- group action ----------------------------------------------------

    def stabilizer(self, base: int) -> Tuple[int, ...]:
        """Indices of group elements fixing base pointwise."""
        got = self._stabilizers.get(base)
        if got is None:
            fixed = []
            for idx, perm in enumerate(self.group.elements):
                if all(perm[i] == i for i in range(self.n) if base >> i & 1):
                    fixed.append(idx)
            got = tuple(fixed)
            self._stabilizers[base] = got
        return got

    def orbit(self, a: int, base: int) -> frozenset:
        """Images of a under the pointwise stabilizer of base."""
        key = (a, base)
        got = self._orbits.get(key)
        if got is None:
            action = self.group.subset_action()
            got = frozenset(action[idx][a] for idx in self.stabilizer(base))
            self._orbits[key] = got
        return got

    def equivalent(self, a: int, a2: int, base: int) -> bool:
        """True iff some element fixing base pointwise maps a onto a2."""
        self._check_mask(a)
        self._check_mask(a2)
        self._check_mask(base)
        return a2 in self.orbit(a, base)

    # -- precomputed subset ranges ----------------------------------------

    def between_naive(self, c: int, b: int) -> Tuple[int, ...]:
        """All D with c <= D <= b|c, ascending."""
        key = (c, b)
        got = self._naive_intervals.get(key)
        if got is None:
            got = tuple(interval(c, b | c))
            self._naive_intervals[key] = got
        return got

    def between_closed(self, c: int, b: int) -> Tuple[int, ...]:
        """All D with c <= D <= cl(b|c), ascending."""
        key = (c, b)
        got = self._closed_intervals.get(key)
        if got is None:
            got = tuple(interval(c, self.closure_op.cl(b | c)))
            self._closed_intervals[key] = got
        return got

    def supersets_of(self, b: int) -> Tuple[int, ...]:
        got = self._supersets.get(b)
        if got is None:
            got = tuple(supersets(b, self.n))
            self._supersets[b] = got
        return got

    # -- identity ----------------------------------------------------------

    def spec(self) -> dict:
        """Canonical JSON-ready description (also the pickle surface)."""
        return {
            "n": self.n,
            "closed_sets": list(self.closure_op.closed_sets),
            "group_generators": [list(g) for g in self.group.generators],
            "models": list(self.models),
        }

    def fingerprint(self) -> Tuple:
        return (
            self.n,
            self.closure_op.closed_sets,
            self.group.elements,
            self.models,
        )

    def __eq__(self, other):
        return isinstance(other, Site) and self.fingerprint() == other.fingerprint()

    def __hash__(self):
        return hash(self.fingerprint())

    def __repr__(self):
        return (
            f"Site(n={self.n}, |closed|={len(self.closure_op.closed_sets)}, "
            f"|G|={self.group.order}, |models|={len(self.models)})"
        )


def validate_site(site: Site) -> ValidationReport:
    """Check every site invariant, reporting each violation with a witness."""
    report = ValidationReport()
    closure = site.closure_op
    full = site.full

    if full not in closure._closed_lookup:
        report.add("closure", "full set absent from the closed family",
                   missing=full)
    sets = closure.closed_sets
    for i, s in enumerate(sets):
        for t in sets[i + 1:]:
            meet = s & t
            if not closure.is_closed(meet):
                report.add(
                    "closure",
                    f"intersection {subset_str(s)} & {subset_str(t)} = "
                    f"{subset_str(meet)} is not closed",
                    left=s, right=t, intersection=meet,
                )

    action_tables = site.group.subset_action()
    for gen in site.group.generators:
        try:
            idx = site.group.elements.index(gen)
        except ValueError:  # pragma: no cover - generators are elements
            continue
        act = action_tables[idx]
        for s in sets:
            img = act[s]
            if not closure.is_closed(img):
                report.add(
                    "equivariance",
                    f"generator {list(gen)} maps closed {subset_str(s)} to "
                    f"non-closed {subset_str(img)}",
                    generator=list(gen), closed=s, image=img,
                )

    for m in site.models:
        if not closure.is_closed(m):
            report.add("models", f"model {subset_str(m)} is not closed",
                       model=m)

    return report


# -- JSON interchange ------------------------------------------------------


def site_from_obj(obj: dict) -> Site:
    """Build and validate a site from its JSON object form.

    Accepts either the canonical "closed_sets" form or the alternate
    "closure_map" form (a list of 2^n closure values, converted to the
    Moore family of its fixed points).
    """
    n = obj["n"]
    has_sets = "closed_sets" in obj
    has_map = "closure_map" in obj
    if has_sets and has_map:
        raise ValueError("give closed_sets or closure_map, not both")
    if has_map:
        closure = closure_from_map(n, obj["closure_map"])
    elif has_sets:
        closure = ClosureOperator(n, obj["closed_sets"])
    else:
        raise ValueError("site object needs closed_sets or closure_map")
    group = SymmetryGroup(n, obj.get("group_generators", []))
    site = Site(n, closure, group, obj.get("models"))
    report = validate_site(site)
    if not report.ok:
        lines = "; ".join(v.message for v in report.violations)
        raise ValueError(f"invalid site: {lines}")
    return site


def load_site(path: str) -> Site:
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    return site_from_obj(obj)


def dump_site(site: Site, path: Optional[str] = None) -> str:
    text = json.dumps(site.spec(), indent=2, sort_keys=True) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


# -- Moore family enumeration and sampling ----------------------------------


def enumerate_moore_families(n: int) -> List[Tuple[int, ...]]:
    """All Moore families on {0..n-1}, canonically ordered.

    Exhaustive over the 2^(2^n - 1) candidate families: 61 families at
    n=3, 2480 at n=4 (a few seconds); capped there, the search harness
    switches to seeded sampling beyond.
    """
    if n > 4:
        raise CapExceeded("exhaustive Moore enumeration is capped at n=4")
    full = full_mask(n)
    families = []
    # a family is a bitmask over subsets; the full set is always in
    for pick in range(1 << full):
        members = [s for s in range(full) if pick >> s & 1]
        members.append(full)
        fam_bits = 0
        for s in members:
            fam_bits |= 1 << s
        ok = True
        for i, s in enumerate(members):
            for t in members[i + 1:]:
                if not fam_bits >> (s & t) & 1:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            families.append(tuple(members))
    families.sort()
    return families


def random_moore_family(n: int, seed: int, index: int = 0,
                        generators: int = 4) -> Tuple[int, ...]:
    """Seeded random Moore family: random seeds closed under intersection."""
    rng = HashRng("moore", seed, n, index)
    full = full_mask(n)
    family = {full}
    for _ in range(generators):
        family.add(rng.below(full + 1))
    # close under pairwise intersection to a fixpoint
    while True:
        extra = set()
        fam = list(family)
        for i, s in enumerate(fam):
            for t in fam[i + 1:]:
                m = s & t
                if m not in family:
                    extra.add(m)
        if not extra:
            break
        family |= extra
    return tuple(sorted(family))

"""Ternary relations on a site.

A relation assigns a truth value to every triple (A, C, B) of subset
masks, read "A is independent from B over C".  The argument convention
is (A, C, B) everywhere: left side, base, right side.

Two backings exist.  For n <= 5 the relation is an extensional table of
all 2^(3n) triples (a bytes object indexed by (A << 2n) | (C << n) | B,
so ascending index order is the canonical (A, C, B) order).  For larger
ground sets the relation is predicate-backed with memoization and all
comparisons enumerate lazily.
"""

from __future__ import annotations

import json
import os
from typing import Callable, Iterator, Optional, Tuple

from .seeding import keyed_u64
from .sites import Site, site_from_obj
from .subsets import subset_str
from .verdict import Verdict

TABLE_CAP = 5  # largest n for which tables are materialized


class TernaryRelation:
    """Truth assignment for all (A, C, B) triples over one site."""

    def __init__(self, site: Site, table: Optional[bytes] = None,
                 predicate: Optional[Callable[[int, int, int], bool]] = None,
                 name: str = "r"):
        if (table is None) == (predicate is None):
            raise ValueError("exactly one of table/predicate must be given")
        self.site = site
        self.name = name
        self.n = site.n
        self._shift1 = site.n
        self._shift2 = 2 * site.n
        if table is not None:
            if site.n > TABLE_CAP:
                raise ValueError(
                    f"extensional tables are capped at n={TABLE_CAP}"
                )
            expected = 1 << (3 * site.n)
            if len(table) != expected:
                raise ValueError(
                    f"table must cover all {expected} triples, got {len(table)}"
                )
            self.table: Optional[bytes] = bytes(table)
            self._predicate = None
            self._memo = None
        else:
            self.table = None
            self._predicate = predicate
            self._memo: Optional[dict] = {}
        self._transposed: Optional["TernaryRelation"] = None
        self._invariant_verdict: Optional[Verdict] = None

    # -- evaluation --------------------------------------------------------

    def index(self, a: int, c: int, b: int) -> int:
        return (a << self._shift2) | (c << self._shift1) | b

    def eval(self, a: int, c: int, b: int) -> bool:
        full = self.site.full
        if not (0 <= a <= full and 0 <= c <= full and 0 <= b <= full):
            raise ValueError(
                f"triple ({a},{c},{b}) out of range for n={self.site.n}"
            )
        return self.truth(a, c, b)

    def truth(self, a: int, c: int, b: int) -> bool:
        """Unchecked lookup; hot path for the checkers."""
        if self.table is not None:
            return bool(self.table[(a << self._shift2) | (c << self._shift1) | b])
        key = (a << self._shift2) | (c << self._shift1) | b
        got = self._memo.get(key)
        if got is None:
            got = bool(self._predicate(a, c, b))
            self._memo[key] = got
        return got

    def iter_triples(self) -> Iterator[Tuple[int, int, int]]:
        """All triples in canonical (A, C, B) order."""
        full = self.site.full
        for a in range(full + 1):
            for c in range(full + 1):
                for b in range(full + 1):
                    yield a, c, b

    def table_bytes(self) -> bytes:
        """Materialize the full table (requires n <= TABLE_CAP)."""
        if self.table is not None:
            return self.table
        if self.site.n > TABLE_CAP:
            raise ValueError(
                f"cannot materialize a table for n={self.site.n} > {TABLE_CAP}"
            )
        out = bytearray(1 << (3 * self.site.n))
        for a, c, b in self.iter_triples():
            if self.truth(a, c, b):
                out[self.index(a, c, b)] = 1
        self.table = bytes(out)
        self._predicate = None
        self._memo = None
        return self.table

    def transpose(self) -> "TernaryRelation":
        """The relation with left and right arguments swapped."""
        if self._transposed is None:
            if self.table is not None:
                out = bytearray(len(self.table))
                full = self.site.full
                tbl = self.table
                s1, s2 = self._shift1, self._shift2
                for a in range(full + 1):
                    for c in range(full + 1):
                        base = (a << s2) | (c << s1)
                        for b in range(full + 1):
                            out[(b << s2) | (c << s1) | a] = tbl[base | b]
                flipped = TernaryRelation(self.site, bytes(out),
                                          name=f"transpose({self.name})")
            else:
                pred = self._predicate
                flipped = TernaryRelation(
                    self.site, predicate=lambda a, c, b: pred(b, c, a),
                    name=f"transpose({self.name})",
                )
            flipped._transposed = self
            self._transposed = flipped
        return self._transposed

    def __repr__(self):
        mode = "table" if self.table is not None else "predicate"
        return f"TernaryRelation({self.name!r}, n={self.site.n}, {mode})"


# -- built-in relations ------------------------------------------------------


def builtin_full(site: Site) -> TernaryRelation:
    """The constantly-true relation."""
    if site.n <= TABLE_CAP:
        return TernaryRelation(site, b"\x01" * (1 << (3 * site.n)), name="full")
    return TernaryRelation(site, predicate=lambda a, c, b: True, name="full")


def builtin_a_indep(site: Site) -> TernaryRelation:
    """cl(A|C) and cl(B|C) meet exactly in cl(C)."""
    cl = site.closure_op.table() if site.n <= TABLE_CAP else None
    if cl is not None:
        full = site.full
        out = bytearray(1 << (3 * site.n))
        s1, s2 = site.n, 2 * site.n
        for a in range(full + 1):
            for c in range(full + 1):
                left = cl[a | c]
                base = cl[c]
                row = (a << s2) | (c << s1)
                for b in range(full + 1):
                    if left & cl[b | c] == base:
                        out[row | b] = 1
        return TernaryRelation(site, bytes(out), name="a-indep")
    op = site.closure_op
    return TernaryRelation(
        site,
        predicate=lambda a, c, b: op.cl(a | c) & op.cl(b | c) == op.cl(c),
        name="a-indep",
    )


def builtin_from_predicate(site: Site, pred: Callable[[int, int, int], bool],
                           name: str = "pred") -> TernaryRelation:
    """Materialize (or wrap) an arbitrary boolean function of (A, C, B)."""
    if site.n <= TABLE_CAP:
        full = site.full
        out = bytearray(1 << (3 * site.n))
        s1, s2 = site.n, 2 * site.n
        for a in range(full + 1):
            for c in range(full + 1):
                row = (a << s2) | (c << s1)
                for b in range(full + 1):
                    if pred(a, c, b):
                        out[row | b] = 1
        return TernaryRelation(site, bytes(out), name=name)
    return TernaryRelation(site, predicate=pred, name=name)


# -- comparison and invariance ----------------------------------------------


def _require_same_site(r1: TernaryRelation, r2: TernaryRelation):
    if r1.site.fingerprint() != r2.site.fingerprint():
        raise ValueError("relations live on different sites")


def implies(r1: TernaryRelation, r2: TernaryRelation) -> Verdict:
    """Every true triple of r1 is true in r2; witness = first failure."""
    _require_same_site(r1, r2)
    if r1.table is not None and r2.table is not None:
        t1, t2 = r1.table, r2.table
        for i in range(len(t1)):
            if t1[i] and not t2[i]:
                n = r1.site.n
                full = r1.site.full
                a = i >> (2 * n)
                c = (i >> n) & full
                b = i & full
                return Verdict(False, {"A": a, "C": c, "B": b})
        return Verdict(True)
    for a, c, b in r1.iter_triples():
        if r1.truth(a, c, b) and not r2.truth(a, c, b):
            return Verdict(False, {"A": a, "C": c, "B": b})
    return Verdict(True)


def equals(r1: TernaryRelation, r2: TernaryRelation) -> Verdict:
    """Table equality; witness = first differing triple."""
    _require_same_site(r1, r2)
    if r1.table is not None and r2.table is not None:
        if r1.table == r2.table:
            return Verdict(True)
    for a, c, b in r1.iter_triples():
        v1, v2 = r1.truth(a, c, b), r2.truth(a, c, b)
        if v1 != v2:
            return Verdict(
                False,
                {"A": a, "C": c, "B": b, "left": v1, "right": v2},
            )
    return Verdict(True)


def is_invariant(rel: TernaryRelation) -> Verdict:
    """Constant on orbits of the symmetry group; witness = (sigma, triple)."""
    if rel._invariant_verdict is None:
        rel._invariant_verdict = _compute_invariance(rel)
    return rel._invariant_verdict


def _compute_invariance(rel: TernaryRelation) -> Verdict:
    site = rel.site
    group = site.group
    if group.is_trivial():
        return Verdict(True)
    action = group.subset_action()
    for idx, perm in enumerate(group.elements):
        act = action[idx]
        for a, c, b in rel.iter_triples():
            if rel.truth(a, c, b) != rel.truth(act[a], act[c], act[b]):
                return Verdict(
                    False,
                    {"sigma": list(perm), "A": a, "C": c, "B": b},
                )
    return Verdict(True)


# -- seeded sampling ----------------------------------------------------------


def triple_orbit_reps(site: Site):
    """Map each triple index to the least index in its group orbit."""
    reps = getattr(site, "_triple_orbit_reps", None)
    if reps is not None:
        return reps
    n = site.n
    full = site.full
    total = 1 << (3 * n)
    reps = [-1] * total
    action = site.group.subset_action()
    s1, s2 = n, 2 * n
    for a in range(full + 1):
        for c in range(full + 1):
            for b in range(full + 1):
                idx = (a << s2) | (c << s1) | b
                if reps[idx] >= 0:
                    continue
                for act in action:
                    img = (act[a] << s2) | (act[c] << s1) | act[b]
                    reps[img] = idx
    site._triple_orbit_reps = reps
    return reps


def random_invariant_relation(site: Site, seed: int,
                              density: float) -> TernaryRelation:
    """Seeded Bernoulli(density) draw per group-orbit of triples.

    One SHA-256 based coin is tossed per orbit representative (the
    least triple index in the orbit), keyed on (seed, representative),
    so the output is invariant by construction and reproducible from
    (site, seed, density) on any platform.  Draws for the same seed
    nest across densities: raising density only adds true triples.
    """
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    if site.n > TABLE_CAP:
        raise ValueError(
            f"random relations need a table; capped at n={TABLE_CAP}"
        )
    reps = triple_orbit_reps(site)
    threshold = int(density * (1 << 64))
    out = bytearray(len(reps))
    coins = {}
    for idx, rep in enumerate(reps):
        coin = coins.get(rep)
        if coin is None:
            coin = keyed_u64("relation", seed, rep) < threshold
            coins[rep] = coin
        if coin:
            out[idx] = 1
    return TernaryRelation(
        site, bytes(out), name=f"rand(s{seed},d{density:g})"
    )


# -- JSON interchange ---------------------------------------------------------


def relation_to_obj(rel: TernaryRelation, site_ref=None) -> dict:
    """JSON object form: extensional triple list in canonical order."""
    table = rel.table_bytes()
    n = rel.site.n
    full = rel.site.full
    triples = []
    for i, v in enumerate(table):
        if v:
            triples.append([i >> (2 * n), (i >> n) & full, i & full])
    return {
        "site": site_ref if site_ref is not None else rel.site.spec(),
        "mode": "extensional",
        "true_triples": triples,
        "name": rel.name,
    }


def relation_from_obj(obj: dict, site: Optional[Site] = None,
                      base_dir: str = ".") -> TernaryRelation:
    if obj.get("mode", "extensional") != "extensional":
        raise ValueError(f"unknown relation mode {obj.get('mode')!r}")
    if site is None:
        ref = obj["site"]
        if isinstance(ref, str):
            from .sites import load_site

            site = load_site(os.path.join(base_dir, ref))
        else:
            site = site_from_obj(ref)
    out = bytearray(1 << (3 * site.n))
    for a, c, b in obj["true_triples"]:
        full = site.full
        if not (0 <= a <= full and 0 <= c <= full and 0 <= b <= full):
            raise ValueError(f"triple ({a},{c},{b}) out of range")
        out[(a << (2 * site.n)) | (c << site.n) | b] = 1
    return TernaryRelation(site, bytes(out), name=obj.get("name", "r"))


def load_relation(path: str, site: Optional[Site] = None) -> TernaryRelation:
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    return relation_from_obj(obj, site=site, base_dir=os.path.dirname(path) or ".")


def dump_relation(rel: TernaryRelation, path: Optional[str] = None) -> str:
    text = json.dumps(relation_to_obj(rel), indent=2, sort_keys=True) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def describe_triple(a: int, c: int, b: int) -> str:
    return f"(A={subset_str(a)}, C={subset_str(c)}, B={subset_str(b)})"

"""Relation transformers: the two monotonisations, extension forcing,
and the right closure extension.

All four take a relation and return a new relation on the same site:

* monotonise (token M): true at (A, C, B) iff the input holds at
  (A, D, B) for every base D with C <= D <= cl(B|C);
* monotonise_naive (token m): same with D ranging only up to B|C;
* force_extension (token star): true at (A, C, B) iff for every
  D >= B there is some A' equivalent to A over B|C with the input true
  at (A', C, D);
* close_right (token c): true at (A, C, B) iff the input holds at
  (A, C, cl(B|C)).

force_extension quantifies over D >= B literally, not D >= B|C; for
inputs with right normality and monotonicity the two readings agree,
and the divergence on pathological inputs is accepted.

Composite applications are described by OperatorExpr terms over the
grammar  EXPR := SYMBOL | "m(" EXPR ")" | "M(" EXPR ")" |
"star(" EXPR ")" | "c(" EXPR ")"  with a configurable nesting cap.
Applying an operator always materializes a fresh table on table-backed
sites so that equality and implication checks stay canonical.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional

from .relations import TernaryRelation
from .sites import CapExceeded, Site

DEPTH_CAP = 4

_TOKENS = ("m", "M", "star", "c")


def _out_table(rel: TernaryRelation) -> bool:
    return rel.table is not None


def monotonise(rel: TernaryRelation) -> TernaryRelation:
    """Require the relation over every base between C and cl(B|C)."""
    site = rel.site
    if _out_table(rel):
        tbl = rel.table
        full = site.full
        s1, s2 = site.n, 2 * site.n
        out = bytearray(len(tbl))
        for c in range(full + 1):
            cpart = c << s1
            for b in range(full + 1):
                ds = site.between_closed(c, b)
                for a in range(full + 1):
                    arow = a << s2
                    if all(tbl[arow | (d << s1) | b] for d in ds):
                        out[arow | cpart | b] = 1
        return TernaryRelation(site, bytes(out), name=f"M({rel.name})")
    return TernaryRelation(
        site,
        predicate=lambda a, c, b: all(
            rel.truth(a, d, b) for d in site.between_closed(c, b)
        ),
        name=f"M({rel.name})",
    )


def monotonise_naive(rel: TernaryRelation) -> TernaryRelation:
    """Require the relation over every base between C and B|C."""
    site = rel.site
    if _out_table(rel):
        tbl = rel.table
        full = site.full
        s1, s2 = site.n, 2 * site.n
        out = bytearray(len(tbl))
        for c in range(full + 1):
            cpart = c << s1
            for b in range(full + 1):
                ds = site.between_naive(c, b)
                for a in range(full + 1):
                    arow = a << s2
                    if all(tbl[arow | (d << s1) | b] for d in ds):
                        out[arow | cpart | b] = 1
        return TernaryRelation(site, bytes(out), name=f"m({rel.name})")
    return TernaryRelation(
        site,
        predicate=lambda a, c, b: all(
            rel.truth(a, d, b) for d in site.between_naive(c, b)
        ),
        name=f"m({rel.name})",
    )


def force_extension(rel: TernaryRelation) -> TernaryRelation:
    """Require extendability of the configuration to all larger right sides."""
    site = rel.site

    def holds(a: int, c: int, b: int) -> bool:
        candidates = site.orbit(a, b | c)
        for d in site.supersets_of(b):
            if not any(rel.truth(a2, c, d) for a2 in candidates):
                return False
        return True

    if _out_table(rel):
        full = site.full
        out = bytearray(len(rel.table))
        s1, s2 = site.n, 2 * site.n
        for a in range(full + 1):
            for c in range(full + 1):
                row = (a << s2) | (c << s1)
                for b in range(full + 1):
                    if holds(a, c, b):
                        out[row | b] = 1
        return TernaryRelation(site, bytes(out), name=f"star({rel.name})")
    return TernaryRelation(site, predicate=holds, name=f"star({rel.name})")


def close_right(rel: TernaryRelation) -> TernaryRelation:
    """Replace the right-hand side by cl(B|C)."""
    site = rel.site
    cl = site.closure_op.table() if _out_table(rel) else None
    if cl is not None:
        tbl = rel.table
        full = site.full
        s1, s2 = site.n, 2 * site.n
        out = bytearray(len(tbl))
        for c in range(full + 1):
            cpart = c << s1
            for b in range(full + 1):
                closed = cl[b | c]
                for a in range(full + 1):
                    arow = a << s2
                    if tbl[arow | cpart | closed]:
                        out[arow | cpart | b] = 1
        return TernaryRelation(site, bytes(out), name=f"c({rel.name})")
    op = site.closure_op
    return TernaryRelation(
        site,
        predicate=lambda a, c, b: rel.truth(a, c, op.cl(b | c)),
        name=f"c({rel.name})",
    )


OPERATORS = {
    "M": monotonise,
    "m": monotonise_naive,
    "star": force_extension,
    "c": close_right,
}


@dataclass(frozen=True)
class OperatorExpr:
    """A term like c(m(R)): either a leaf symbol or op applied to inner."""

    op: Optional[str] = None
    inner: Optional["OperatorExpr"] = None
    symbol: Optional[str] = None

    def __post_init__(self):
        if (self.op is None) == (self.symbol is None):
            raise ValueError("expression is either a leaf symbol or an application")
        if self.op is not None and self.op not in OPERATORS:
            raise ValueError(f"unknown operator {self.op!r}")

    def depth(self) -> int:
        return 0 if self.op is None else 1 + self.inner.depth()

    def leaf_symbol(self) -> str:
        return self.symbol if self.op is None else self.inner.leaf_symbol()

    def __str__(self) -> str:
        if self.op is None:
            return self.symbol
        return f"{self.op}({self.inner})"


def parse_expr(text: str, symbols=("R", "R0"),
               max_depth: int = DEPTH_CAP) -> OperatorExpr:
    """Parse the operator grammar; rejects junk and over-deep nesting."""
    s = text.strip()
    expr = _parse(s, symbols)
    if expr.depth() > max_depth:
        raise CapExceeded(
            f"operator expression {text!r} exceeds the depth cap {max_depth}"
        )
    return expr


def _parse(s: str, symbols) -> OperatorExpr:
    s = s.strip()
    for tok in _TOKENS:
        head = tok + "("
        if s.startswith(head) and s.endswith(")"):
            return OperatorExpr(op=tok, inner=_parse(s[len(head):-1], symbols))
    if s in symbols:
        return OperatorExpr(symbol=s)
    raise ValueError(f"cannot parse operator expression {s!r}")


def apply_expr(expr, rel: TernaryRelation,
               rel0: Optional[TernaryRelation] = None,
               max_depth: int = DEPTH_CAP,
               cache: Optional[Dict] = None) -> TernaryRelation:
    """Innermost-first application of an expression to base relation(s).

    The leaf symbol R binds to rel and R0 to rel0.  cache, when given,
    memoizes operator outputs by (input table, op) across calls.
    """
    if isinstance(expr, str):
        expr = parse_expr(expr, max_depth=max_depth)
    if expr.depth() > max_depth:
        raise CapExceeded(
            f"operator expression {expr} exceeds the depth cap {max_depth}"
        )
    if expr.op is None:
        if expr.symbol == "R":
            return rel
        if expr.symbol == "R0":
            if rel0 is None:
                raise ValueError("expression uses R0 but no second relation given")
            return rel0
        raise ValueError(f"unbound symbol {expr.symbol!r}")
    base = apply_expr(expr.inner, rel, rel0, max_depth, cache)
    if cache is not None and base.table is not None:
        key = (expr.op, base.table)
        got = cache.get(key)
        if got is None:
            got = OPERATORS[expr.op](base)
            cache[key] = got
        return got
    return OPERATORS[expr.op](base)

"""Finite-semantics checkers for the independence-relation axioms.

Each checker scans the whole (finite) quantifier space of its axiom and
returns a Verdict: pass, or fail with the lexicographically least
violating tuple in canonical (A, C, B, ...) order.  Witnesses are plain
dicts of subset masks replayable through relation evaluation, closure
and orbit equivalence alone.

Sides: normality, monotonicity, transitivity and the two closure
readings come in left and right versions.  Left versions are checked by
transposing the relation (swapping left and right arguments) and
running the right-side checker; the reported witness swaps A and B
back, so it violates the left-side reading literally.  Base
monotonicity is the right-sided statement only.

Finite character and local character are vacuous at finite scale; the
checkers keep them in the profile with a "vacuous" note rather than
dropping them.  The orbit-quantified axioms (strong finite character in
its orbit reading, extension, full existence, the independence theorem
and stationarity over models) presuppose an invariant relation; the
checker warns when handed a non-invariant one but still reports the
literal result.
"""

from __future__ import annotations

import warnings
from enum import Enum
from typing import Dict, List, Optional, Tuple

from .relations import TernaryRelation, is_invariant
from .subsets import subset_str
from .verdict import Verdict


class Axiom(Enum):
    FIN = "FIN"
    EX = "EX"
    SYM = "SYM"
    LOC = "LOC"
    NOR = "NOR"
    MON = "MON"
    BMON = "BMON"
    TRA = "TRA"
    AREF = "AREF"
    CLO_B = "CLO_B"
    CLO_BC = "CLO_BC"
    SCLO = "SCLO"
    STRFIN = "STRFIN"
    EXT = "EXT"
    FEX = "FEX"
    INDTHM = "INDTHM"
    STAT = "STAT"


class Side(Enum):
    LEFT = "left"
    RIGHT = "right"


SIDED = {Axiom.NOR, Axiom.MON, Axiom.TRA, Axiom.CLO_B, Axiom.CLO_BC}

ORBIT_QUANTIFIED = {Axiom.STRFIN, Axiom.EXT, Axiom.FEX, Axiom.INDTHM, Axiom.STAT}

PROFILE_ORDER: List[Tuple[Axiom, Optional[Side]]] = [
    (Axiom.FIN, None),
    (Axiom.EX, None),
    (Axiom.SYM, None),
    (Axiom.LOC, None),
    (Axiom.NOR, Side.LEFT),
    (Axiom.NOR, Side.RIGHT),
    (Axiom.MON, Side.LEFT),
    (Axiom.MON, Side.RIGHT),
    (Axiom.BMON, None),
    (Axiom.TRA, Side.LEFT),
    (Axiom.TRA, Side.RIGHT),
    (Axiom.AREF, None),
    (Axiom.CLO_B, Side.LEFT),
    (Axiom.CLO_B, Side.RIGHT),
    (Axiom.CLO_BC, Side.LEFT),
    (Axiom.CLO_BC, Side.RIGHT),
    (Axiom.SCLO, None),
    (Axiom.STRFIN, None),
    (Axiom.EXT, None),
    (Axiom.FEX, None),
    (Axiom.INDTHM, None),
    (Axiom.STAT, None),
]


def check_axiom(rel: TernaryRelation, axiom: Axiom,
                side: Optional[Side] = None) -> Verdict:
    """Check one axiom; see module docstring for witness conventions."""
    if axiom in SIDED:
        if side is None:
            raise ValueError(f"{axiom.value} needs a side (left or right)")
    elif side is not None:
        raise ValueError(f"{axiom.value} does not take a side")

    if axiom in ORBIT_QUANTIFIED and not is_invariant(rel):
        warnings.warn(
            f"{axiom.value} checked on non-invariant relation {rel.name!r}; "
            "the orbit-based reading presupposes invariance",
            stacklevel=2,
        )

    if side is Side.LEFT:
        verdict = _RIGHT_CHECKERS[axiom](rel.transpose())
        if verdict.holds:
            return verdict
        w = dict(verdict.witness)
        w["A"], w["B"] = w["B"], w["A"]
        return Verdict(False, w, verdict.note)
    if axiom in _RIGHT_CHECKERS:
        return _RIGHT_CHECKERS[axiom](rel)
    return _UNSIDED_CHECKERS[axiom](rel)


def _check_fin(rel):
    return Verdict(True, note="vacuous at finite scale")


def _check_loc(rel):
    return Verdict(True, note="vacuous at finite scale")


def _check_ex(rel):
    full = rel.site.full
    for a in range(full + 1):
        for c in range(full + 1):
            if not rel.truth(a, c, c):
                return Verdict(False, {"A": a, "C": c})
    return Verdict(True)


def _check_sym(rel):
    full = rel.site.full
    for a in range(full + 1):
        for c in range(full + 1):
            for b in range(full + 1):
                if rel.truth(a, c, b) != rel.truth(b, c, a):
                    return Verdict(False, {"A": a, "C": c, "B": b})
    return Verdict(True)


def _check_nor_right(rel):
    full = rel.site.full
    for a in range(full + 1):
        for c in range(full + 1):
            for b in range(full + 1):
                if rel.truth(a, c, b) and not rel.truth(a, c, b | c):
                    return Verdict(False, {"A": a, "C": c, "B": b})
    return Verdict(True)


def _check_mon_right(rel):
    full = rel.site.full
    for a in range(full + 1):
        for c in range(full + 1):
            for b in range(full + 1):
                if rel.truth(a, c, b):
                    continue
                # any D with r(A, C, B|D) violates; take the least
                for d in range(full + 1):
                    if rel.truth(a, c, b | d):
                        return Verdict(False, {"A": a, "C": c, "B": b, "D": d})
    return Verdict(True)


def _check_bmon(rel):
    site = rel.site
    full = site.full
    for a in range(full + 1):
        for c in range(full + 1):
            for b in site.supersets_of(c):
                for d in site.supersets_of(b):
                    if rel.truth(a, c, d) and not rel.truth(a, b, d):
                        return Verdict(False, {"A": a, "C": c, "B": b, "D": d})
    return Verdict(True)


def _check_tra_right(rel):
    site = rel.site
    full = site.full
    for a in range(full + 1):
        for c in range(full + 1):
            for b in site.supersets_of(c):
                if not rel.truth(a, c, b):
                    continue
                for d in site.supersets_of(b):
                    if rel.truth(a, b, d) and not rel.truth(a, c, d):
                        return Verdict(False, {"A": a, "C": c, "B": b, "D": d})
    return Verdict(True)


def _check_aref(rel):
    site = rel.site
    full = site.full
    cl = site.closure_op
    for x in range(site.n):
        point = 1 << x
        for c in range(full + 1):
            if rel.truth(point, c, point) and not cl.cl(c) >> x & 1:
                return Verdict(False, {"x": x, "C": c})
    return Verdict(True)


def _check_clo_b_right(rel):
    site = rel.site
    full = site.full
    cl = site.closure_op
    for a in range(full + 1):
        for c in range(full + 1):
            for b in range(full + 1):
                if rel.truth(a, c, b) and not rel.truth(a, c, cl.cl(b)):
                    return Verdict(False, {"A": a, "C": c, "B": b})
    return Verdict(True)


def _check_clo_bc_right(rel):
    site = rel.site
    full = site.full
    cl = site.closure_op
    for a in range(full + 1):
        for c in range(full + 1):
            for b in range(full + 1):
                if rel.truth(a, c, b) and not rel.truth(a, c, cl.cl(b | c)):
                    return Verdict(False, {"A": a, "C": c, "B": b})
    return Verdict(True)


def _check_sclo(rel):
    site = rel.site
    full = site.full
    cl = site.closure_op
    for a in range(full + 1):
        for c in range(full + 1):
            for b in range(full + 1):
                strong = rel.truth(cl.cl(a | c), cl.cl(c), cl.cl(b | c))
                if rel.truth(a, c, b) != strong:
                    return Verdict(False, {"A": a, "C": c, "B": b})
    return Verdict(True)


def _check_strfin(rel):
    site = rel.site
    full = site.full
    for a in range(full + 1):
        for c in range(full + 1):
            for b in range(full + 1):
                if rel.truth(a, c, b):
                    continue
                for a2 in sorted(site.orbit(a, c | b)):
                    if rel.truth(a2, c, b):
                        return Verdict(
                            False, {"A": a, "C": c, "B": b, "A_prime": a2}
                        )
    return Verdict(True)


def _check_ext(rel):
    site = rel.site
    full = site.full
    for a in range(full + 1):
        for c in range(full + 1):
            for b in range(full + 1):
                if not rel.truth(a, c, b):
                    continue
                candidates = sorted(site.orbit(a, b | c))
                for d in site.supersets_of(b):
                    if not any(rel.truth(a2, c, d) for a2 in candidates):
                        return Verdict(
                            False,
                            {"A": a, "C": c, "B": b, "D": d,
                             "candidates": candidates},
                        )
    return Verdict(True)


def _check_fex(rel):
    site = rel.site
    full = site.full
    for a in range(full + 1):
        for c in range(full + 1):
            candidates = sorted(site.orbit(a, c))
            for b in range(full + 1):
                if not any(rel.truth(a2, c, b) for a2 in candidates):
                    return Verdict(
                        False,
                        {"A": a, "C": c, "B": b, "candidates": candidates},
                    )
    return Verdict(True)


def _check_indthm(rel):
    site = rel.site
    full = site.full
    for m in site.models:
        for a in range(full + 1):
            for b in range(full + 1):
                if not rel.truth(a, m, b):
                    continue
                for c1 in range(full + 1):
                    if not rel.truth(c1, m, a):
                        continue
                    for c2 in sorted(site.orbit(c1, m)):
                        if not rel.truth(c2, m, b):
                            continue
                        if not _amalgam_exists(rel, m, a, b, c1, c2):
                            return Verdict(
                                False,
                                {"M": m, "A": a, "B": b, "C1": c1, "C2": c2,
                                 "searched": full + 1},
                            )
    return Verdict(True)


def _amalgam_exists(rel, m, a, b, c1, c2):
    site = rel.site
    for cc in range(site.full + 1):
        if (
            rel.truth(cc, m, a | b)
            and site.equivalent(cc, c1, m | a)
            and site.equivalent(cc, c2, m | b)
        ):
            return True
    return False


def _check_stat(rel):
    site = rel.site
    full = site.full
    for m in site.models:
        for c1 in range(full + 1):
            for c2 in sorted(site.orbit(c1, m)):
                for a in range(full + 1):
                    if (
                        rel.truth(c1, m, a)
                        and rel.truth(c2, m, a)
                        and not site.equivalent(c1, c2, m | a)
                    ):
                        return Verdict(False, {"M": m, "C1": c1, "C2": c2, "A": a})
    return Verdict(True)


_RIGHT_CHECKERS = {
    Axiom.NOR: _check_nor_right,
    Axiom.MON: _check_mon_right,
    Axiom.TRA: _check_tra_right,
    Axiom.CLO_B: _check_clo_b_right,
    Axiom.CLO_BC: _check_clo_bc_right,
}

_UNSIDED_CHECKERS = {
    Axiom.FIN: _check_fin,
    Axiom.EX: _check_ex,
    Axiom.SYM: _check_sym,
    Axiom.LOC: _check_loc,
    Axiom.BMON: _check_bmon,
    Axiom.AREF: _check_aref,
    Axiom.SCLO: _check_sclo,
    Axiom.STRFIN: _check_strfin,
    Axiom.EXT: _check_ext,
    Axiom.FEX: _check_fex,
    Axiom.INDTHM: _check_indthm,
    Axiom.STAT: _check_stat,
}


class AxiomProfile:
    """Verdicts for every axiom (and both sides of the sided ones)."""

    def __init__(self, verdicts: Dict[Tuple[Axiom, Optional[Side]], Verdict]):
        self.verdicts = verdicts

    def __getitem__(self, key):
        return self.verdicts[key]

    def to_obj(self) -> list:
        rows = []
        for axiom, side in PROFILE_ORDER:
            v = self.verdicts[(axiom, side)]
            rows.append({
                "axiom": axiom.value,
                "side": side.value if side else None,
                **v.to_obj(),
            })
        return rows

    def to_text(self) -> str:
        lines = [f"{'axiom':<8} {'side':<6} {'holds':<6} detail"]
        for axiom, side in PROFILE_ORDER:
            v = self.verdicts[(axiom, side)]
            detail = v.note
            if v.witness is not None:
                parts = []
                for key, val in v.witness.items():
                    if isinstance(val, int) and key not in ("x", "searched"):
                        parts.append(f"{key}={subset_str(val)}")
                    else:
                        parts.append(f"{key}={val}")
                detail = " ".join(parts)
            lines.append(
                f"{axiom.value:<8} {side.value if side else '-':<6} "
                f"{'yes' if v.holds else 'no':<6} {detail}".rstrip()
            )
        return "\n".join(lines) + "\n"


def axiom_profile(rel: TernaryRelation) -> AxiomProfile:
    """Run every checker in the fixed profile order."""
    verdicts = {}
    for axiom, side in PROFILE_ORDER:
        verdicts[(axiom, side)] = check_axiom(rel, axiom, side)
    return AxiomProfile(verdicts)

"""Bitmask encoding of subsets of a small ground set.

A subset of {0, ..., n-1} is an int with bit i set iff element i is
present.  Everything downstream (closure operators, ternary relations,
axiom checkers) works on these ints, so the helpers here are kept tiny
and allocation-free where it matters.
"""

from __future__ import annotations

from typing import Iterable, Iterator, List


def full_mask(n: int) -> int:
    return (1 << n) - 1


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        m |= 1 << e
    return m


def elements_of(mask: int) -> List[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def is_subset(a: int, b: int) -> bool:
    return a & ~b == 0


def iter_submasks(mask: int) -> Iterator[int]:
    """All submasks of mask, descending, ending with 0."""
    s = mask
    while True:
        yield s
        if s == 0:
            return
        s = (s - 1) & mask


def interval(low: int, high: int) -> List[int]:
    """All D with low <= D <= high in subset order, ascending as ints.

    low must be a subset of high; callers precompute these lists once
    per site, so the sort here is not hot.
    """
    if low & ~high:
        raise ValueError("interval requires low to be a subset of high")
    free = high & ~low
    return sorted(low | s for s in iter_submasks(free))


def supersets(mask: int, n: int) -> List[int]:
    """All supersets of mask inside {0..n-1}, ascending as ints."""
    return interval(mask, full_mask(n))


def subset_str(mask: int) -> str:
    """Human-readable form, e.g. {0,2}; the empty set prints as {}."""
    return "{" + ",".join(str(i) for i in elements_of(mask)) + "}"

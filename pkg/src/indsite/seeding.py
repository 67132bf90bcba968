"""Deterministic, platform-independent pseudo-randomness.

Every randomized piece of the package (relation sampling, random Moore
families, search schedules) draws from SHA-256 so that identical seeds
give identical bytes on any platform and under any degree of
parallelism.  Two access patterns are provided:

* keyed_u64(key parts...) - a pure function of its arguments, used when
  draws must be addressable (e.g. one draw per orbit representative,
  independent of iteration order);
* HashRng - a counter-mode stream for sequential sampling.
"""

from __future__ import annotations

import hashlib
from typing import Iterable

_U64 = (1 << 64) - 1


def _encode(parts: Iterable) -> bytes:
    blob = bytearray()
    for part in parts:
        if isinstance(part, str):
            data = part.encode("utf-8")
            blob += b"s" + len(data).to_bytes(4, "big") + data
        elif isinstance(part, int):
            blob += b"i" + (part & _U64).to_bytes(8, "big")
        elif isinstance(part, float):
            # repr round-trips doubles exactly
            data = repr(part).encode("ascii")
            blob += b"f" + len(data).to_bytes(4, "big") + data
        else:
            raise TypeError(f"cannot key on {type(part).__name__}")
    return bytes(blob)


def keyed_u64(*parts) -> int:
    """First 8 bytes of SHA-256 over the canonical encoding of parts."""
    digest = hashlib.sha256(_encode(parts)).digest()
    return int.from_bytes(digest[:8], "big")


def bernoulli(prob: float, *parts) -> bool:
    """Deterministic coin: true with probability prob, keyed on parts.

    The comparison threshold int(prob * 2**64) makes prob=0.0 always
    false and prob=1.0 always true.
    """
    return keyed_u64(*parts) < int(prob * (1 << 64))


class HashRng:
    """Counter-mode SHA-256 stream seeded by a key tuple."""

    def __init__(self, *parts):
        self._key = _encode(parts)
        self._counter = 0

    def u64(self) -> int:
        digest = hashlib.sha256(
            self._key + self._counter.to_bytes(8, "big")
        ).digest()
        self._counter += 1
        return int.from_bytes(digest[:8], "big")

    def below(self, n: int) -> int:
        """Uniform-ish draw in [0, n); modulo bias is irrelevant here."""
        if n <= 0:
            raise ValueError("below() needs a positive bound")
        return self.u64() % n

    def choice(self, seq):
        return seq[self.below(len(seq))]

    def shuffle(self, items: list) -> None:
        # Fisher-Yates with the hash stream
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

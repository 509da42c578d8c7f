"""Seeded counter-based random generator (splitmix64 stepping).

Used wherever reproducibility across runs and implementations matters: the
study schedule and per-tile noise seeds.  The stepping is the standard
splitmix64 finalizer; all arithmetic is modulo 2**64.  Bounded draws use
plain modulo reduction (documented bias is negligible at the scales used
here) and shuffles are descending Fisher-Yates, so any implementation of the
same recipe reproduces identical sequences.
"""

from __future__ import annotations

from typing import MutableSequence, TypeVar

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

T = TypeVar("T")


class SplitMix64:
    def __init__(self, seed: int) -> None:
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return (z ^ (z >> 31)) & _MASK64

    def next_below(self, n: int) -> int:
        """Uniform-ish integer in [0, n) by modulo reduction."""
        if n <= 0:
            raise ValueError(f"bound must be positive, got {n}")
        return self.next_u64() % n

    def next_bit(self) -> int:
        """Fair coin: the low bit of the next draw."""
        return self.next_u64() & 1

    def shuffle(self, items: MutableSequence[T]) -> None:
        """In-place descending Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.next_below(i + 1)
            items[i], items[j] = items[j], items[i]


def derive_seed(seed: int, index: int) -> int:
    """Stable per-index child seed (e.g. per-tile noise seeds)."""
    return SplitMix64((seed ^ (index * _GOLDEN)) & _MASK64).next_u64()

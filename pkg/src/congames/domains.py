"""Finite integer domains used by the solver engine.

Domains are immutable by convention: every filtering operation returns a new
``Domain`` (or the same object when nothing changed, which the propagation
loop relies on for cheap change detection). An empty domain is a legal value
and signals a wipeout.
"""
from __future__ import annotations

from bisect import bisect_left, bisect_right
from typing import Iterable, Iterator


class Domain:
    __slots__ = ("values",)

    values: tuple[int, ...]

    def __init__(self, values: Iterable[int]):
        vs = tuple(values)
        if any(vs[k] >= vs[k + 1] for k in range(len(vs) - 1)):
            vs = tuple(sorted(set(vs)))
        self.values = vs

    @classmethod
    def _wrap(cls, sorted_values: tuple[int, ...]) -> "Domain":
        # internal fast path: caller guarantees sorted, deduplicated input
        d = object.__new__(cls)
        d.values = sorted_values
        return d

    @classmethod
    def range(cls, lo: int, hi: int) -> "Domain":
        """Inclusive integer range ``lo..hi``."""
        return cls._wrap(tuple(range(lo, hi + 1)))

    @classmethod
    def of(cls, *values: int) -> "Domain":
        return cls(values)

    @classmethod
    def singleton(cls, value: int) -> "Domain":
        return cls._wrap((value,))

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[int]:
        return iter(self.values)

    def __contains__(self, value: int) -> bool:
        i = bisect_left(self.values, value)
        return i < len(self.values) and self.values[i] == value

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Domain) and self.values == other.values

    def __hash__(self) -> int:
        return hash(self.values)

    def __repr__(self) -> str:
        if not self.values:
            return "Domain(empty)"
        if len(self.values) > 8:
            return f"Domain({self.min}..{self.max}, {len(self.values)} values)"
        return f"Domain({list(self.values)})"

    @property
    def is_empty(self) -> bool:
        return not self.values

    @property
    def min(self) -> int:
        return self.values[0]

    @property
    def max(self) -> int:
        return self.values[-1]

    @property
    def fixed_value(self) -> int | None:
        """The single remaining value, or None if not a singleton."""
        return self.values[0] if len(self.values) == 1 else None

    def without(self, value: int) -> "Domain":
        i = bisect_left(self.values, value)
        if i >= len(self.values) or self.values[i] != value:
            return self
        return Domain._wrap(self.values[:i] + self.values[i + 1:])

    def keep_ge(self, bound: int) -> "Domain":
        i = bisect_left(self.values, bound)
        return self if i == 0 else Domain._wrap(self.values[i:])

    def keep_le(self, bound: int) -> "Domain":
        i = bisect_right(self.values, bound)
        return self if i == len(self.values) else Domain._wrap(self.values[:i])

    def keep_between(self, lo: int, hi: int) -> "Domain":
        return self.keep_ge(lo).keep_le(hi)

    def intersect(self, allowed: "set[int] | frozenset[int]") -> "Domain":
        kept = tuple(v for v in self.values if v in allowed)
        return self if len(kept) == len(self.values) else Domain._wrap(kept)

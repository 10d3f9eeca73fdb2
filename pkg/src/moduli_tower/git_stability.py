"""GIT stability of n points on the line under SL(2).

A configuration is abstracted to its coincidence pattern: the set
partition of ``{1..n}`` recording which points sit at the same place.
With weights ``w_i`` (all ones for the symmetric linearization) a
configuration is unstable iff some block carries more than half of the
total weight, and stable iff every block carries strictly less.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import comb, factorial
from typing import Iterator, Sequence

from .core import ModuliError


class InvalidPattern(ModuliError):
    pass


class NotAClosedSemistableOrbit(ModuliError):
    pass


class Stability(str, Enum):
    STABLE = "stable"
    STRICTLY_SEMISTABLE = "strictly_semistable"
    UNSTABLE = "unstable"


@dataclass(frozen=True)
class CoincidencePattern:
    n: int
    blocks: tuple  # tuple of frozensets, sorted by smallest element

    def __post_init__(self):
        blocks = [frozenset(b) for b in self.blocks]
        seen: set = set()
        for b in blocks:
            if not b:
                raise InvalidPattern("empty block")
            if seen & b:
                raise InvalidPattern("blocks overlap")
            seen |= b
        if seen != set(range(1, self.n + 1)):
            raise InvalidPattern(f"blocks do not partition 1..{self.n}")
        object.__setattr__(self, "blocks", tuple(sorted(blocks, key=min)))

    @classmethod
    def parse(cls, n: int, text: str) -> "CoincidencePattern":
        """``"1,2,3|4,5,6"``; points not mentioned become singletons."""
        blocks = []
        try:
            for chunk in text.split("|"):
                if chunk.strip():
                    blocks.append(frozenset(int(t) for t in chunk.split(",")))
        except ValueError:
            raise InvalidPattern(f"bad block string {text!r}") from None
        mentioned = frozenset().union(*blocks) if blocks else frozenset()
        blocks.extend(frozenset([i]) for i in range(1, n + 1) if i not in mentioned)
        return cls(n, tuple(blocks))

    def permuted(self, sigma: Sequence[int]) -> "CoincidencePattern":
        """Relabel by ``i -> sigma[i-1]``."""
        return CoincidencePattern(self.n, tuple(frozenset(sigma[i - 1] for i in b) for b in self.blocks))

    def __str__(self) -> str:
        return "|".join(",".join(map(str, sorted(b))) for b in self.blocks)


@dataclass(frozen=True)
class StabilityClass:
    tag: Stability
    closed_orbit: bool = False

    @property
    def semistable(self) -> bool:
        return self.tag is not Stability.UNSTABLE


def _weights(n: int, weights: Sequence | None) -> list[Fraction]:
    if weights is None:
        return [Fraction(1)] * n
    if len(weights) != n:
        raise InvalidPattern(f"expected {n} weights, got {len(weights)}")
    return [Fraction(w) for w in weights]


def classify_pattern(p: CoincidencePattern, weights: Sequence | None = None) -> StabilityClass:
    w = _weights(p.n, weights)
    half = sum(w) / 2
    loads = [sum(w[i - 1] for i in b) for b in p.blocks]
    top = max(loads)
    if top > half:
        return StabilityClass(Stability.UNSTABLE)
    if top < half:
        return StabilityClass(Stability.STABLE)
    # A strictly semistable orbit is closed iff it is fixed by a torus,
    # i.e. the points occupy exactly two positions.
    return StabilityClass(Stability.STRICTLY_SEMISTABLE, closed_orbit=len(p.blocks) == 2)


def count_singular_points(n: int) -> int:
    """Singular points of (P^1)^n // SL(2).

    ``n = 4`` is reported as 0: the quotient is P^1, the normal slice
    at each strictly semistable orbit is C x C with weights 2, -2 and
    its C^*-quotient is a smooth line.
    """
    if n % 2 or n < 6:
        return 0
    return comb(n, n // 2) // 2


def descends(degrees: Sequence[int]) -> bool:
    """Whether O(a_1, ..., a_n) descends to the quotient (Kempf parity)."""
    return sum(degrees) % 2 == 0


def stabilizer_weights(p: CoincidencePattern) -> list[int]:
    cls = classify_pattern(p)
    if not cls.closed_orbit:
        raise NotAClosedSemistableOrbit(f"{p} is not a closed strictly semistable orbit")
    m = p.n // 2
    return [2] * (m - 1) + [-2] * (m - 1)


def set_partitions(n: int) -> Iterator[CoincidencePattern]:
    """All coincidence patterns of n points (restricted growth strings)."""

    def rec(i: int, blocks: list[list[int]]):
        if i > n:
            yield CoincidencePattern(n, tuple(frozenset(b) for b in blocks))
            return
        for b in blocks:
            b.append(i)
            yield from rec(i + 1, blocks)
            b.pop()
        blocks.append([i])
        yield from rec(i + 1, blocks)
        blocks.pop()

    yield from rec(1, [])


def integer_partitions(n: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in integer_partitions(n - first, first):
            yield (first,) + rest


def count_patterns_by_class(n: int) -> dict[StabilityClass, int]:
    """Count all set partitions of {1..n} by stability class.

    Classification only sees block sizes, so the set partitions are
    grouped by size type and each type is weighted by its multinomial
    count; this stays exhaustive while avoiding the Bell-number loop.
    """
    counts: dict[StabilityClass, int] = {}
    for sizes in integer_partitions(n):
        blocks, start = [], 1
        for size in sizes:
            blocks.append(frozenset(range(start, start + size)))
            start += size
        cls = classify_pattern(CoincidencePattern(n, tuple(blocks)))
        number = factorial(n)
        for size in sizes:
            number //= factorial(size)
        for size in set(sizes):
            number //= factorial(sizes.count(size))
        counts[cls] = counts.get(cls, 0) + number
    return counts


def closed_orbit_patterns(n: int) -> list[CoincidencePattern]:
    return [p for p in set_partitions(n) if classify_pattern(p).closed_orbit]

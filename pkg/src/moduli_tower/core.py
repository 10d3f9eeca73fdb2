"""Exact scalars, boundary indices and level bookkeeping.

Every number in the package is a :class:`fractions.Fraction` (or an
``int``); nothing is ever converted to float.  Quantities that depend
linearly on the log-canonical parameter alpha are carried as
:class:`AffineAlpha`.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from math import comb
from typing import Iterable, Iterator, Union

Rational = Fraction
Scalar = Union[int, Fraction]

DEFAULT_CAPS = {"trees": 8, "rank": 10, "scan": 12}


class ModuliError(ValueError):
    """Base class for domain errors (bad level, bad subset, ...)."""


class SubsetOutOfRange(ModuliError):
    pass


class LevelOutOfRange(ModuliError):
    pass


class AlphaOutOfRange(ModuliError):
    pass


class CapExceeded(ModuliError):
    pass


class LevelMismatch(ModuliError):
    pass


class IllegalStratum(ModuliError):
    pass


class IndexOutOfRange(ModuliError):
    pass


class SizeMismatch(ModuliError):
    pass


class InvalidN(ModuliError):
    pass


def cap(kind: str) -> int:
    """Enumeration cap for ``kind``; ``MODULI_MAX_N`` overrides all caps."""
    env = os.environ.get("MODULI_MAX_N")
    if env:
        return int(env)
    return DEFAULT_CAPS[kind]


def check_cap(n: int, kind: str) -> None:
    limit = cap(kind)
    if n > limit:
        raise CapExceeded(f"n={n} exceeds the {kind} cap {limit} (set MODULI_MAX_N to raise it)")


# -- rationals -------------------------------------------------------------

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*([+-]?\d+)\s*)?$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"``; decimals are rejected on purpose."""
    match = _RATIONAL_RE.match(text)
    if not match:
        raise ValueError(f"not a rational of the form p/q: {text!r}")
    num = int(match.group(1))
    den = int(match.group(2)) if match.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(value: Scalar) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


# -- affine functions of alpha ----------------------------------------------

_AFFINE_RE = re.compile(r"^\s*\(([^()]*)\)\s*\+\s*\(([^()]*)\)\s*a\s*$")


@dataclass(frozen=True)
class AffineAlpha:
    """The function ``constant + slope * alpha``."""

    constant: Fraction = Fraction(0)
    slope: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "constant", Fraction(self.constant))
        object.__setattr__(self, "slope", Fraction(self.slope))

    @classmethod
    def coerce(cls, value: Union["AffineAlpha", Scalar]) -> "AffineAlpha":
        if isinstance(value, AffineAlpha):
            return value
        return cls(Fraction(value), Fraction(0))

    @classmethod
    def alpha(cls) -> "AffineAlpha":
        return cls(Fraction(0), Fraction(1))

    def __add__(self, other):
        if not isinstance(other, (AffineAlpha, int, Fraction)):
            return NotImplemented
        other = AffineAlpha.coerce(other)
        return AffineAlpha(self.constant + other.constant, self.slope + other.slope)

    __radd__ = __add__

    def __neg__(self):
        return AffineAlpha(-self.constant, -self.slope)

    def __sub__(self, other):
        if not isinstance(other, (AffineAlpha, int, Fraction)):
            return NotImplemented
        return self + (-AffineAlpha.coerce(other))

    def __rsub__(self, other):
        return AffineAlpha.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, AffineAlpha):
            if other.slope == 0:
                other = other.constant
            elif self.slope == 0:
                return other * self.constant
            else:
                raise TypeError("product of two non-constant affine functions is not affine")
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return AffineAlpha(self.constant * other, self.slope * other)

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.constant) or bool(self.slope)

    def __call__(self, alpha: Scalar) -> Fraction:
        return self.constant + self.slope * Fraction(alpha)

    def is_constant(self) -> bool:
        return self.slope == 0

    def root(self) -> Fraction | None:
        """The unique zero, or ``None`` when the slope vanishes."""
        if self.slope == 0:
            return None
        return -self.constant / self.slope

    def __str__(self) -> str:
        return f"({format_rational(self.constant)})+({format_rational(self.slope)})a"

    def pretty(self) -> str:
        """Human form such as ``5a - 2`` or ``-1/5``."""
        parts = []
        if self.slope:
            s = self.slope
            if s == 1:
                parts.append("a")
            elif s == -1:
                parts.append("-a")
            else:
                parts.append(f"{format_rational(s)}a")
        if self.constant or not parts:
            c = self.constant
            if parts:
                parts.append(f"{'-' if c < 0 else '+'} {format_rational(abs(c))}")
            else:
                parts.append(format_rational(c))
        return " ".join(parts)

    @classmethod
    def parse(cls, text: str) -> "AffineAlpha":
        """Inverse of :meth:`__str__`; a bare rational is also accepted."""
        match = _AFFINE_RE.match(text)
        if match:
            return cls(parse_rational(match.group(1)), parse_rational(match.group(2)))
        return cls(parse_rational(text), Fraction(0))


def affine_eval(f: AffineAlpha, alpha: Scalar) -> Fraction:
    return f(alpha)


# -- boundary indices --------------------------------------------------------

@total_ordering
@dataclass(frozen=True)
class MarkedSubset:
    """Canonical representative of the unordered split ``{S, S^c}``.

    The stored side is the smaller one; for ``|S| = n/2`` it is the side
    containing 1.  Use :func:`canonicalize_subset` to build one.
    """

    n: int
    members: frozenset

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.members))

    def __contains__(self, item) -> bool:
        return item in self.members

    @property
    def complement(self) -> frozenset:
        return frozenset(range(1, self.n + 1)) - self.members

    def sort_key(self):
        return (self.n, len(self.members), tuple(sorted(self.members)))

    def __lt__(self, other):
        if not isinstance(other, MarkedSubset):
            return NotImplemented
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return ",".join(str(i) for i in sorted(self.members))

    def __repr__(self) -> str:
        return f"D^{{{self}}}"


def canonicalize_subset(n: int, S: Iterable[int]) -> MarkedSubset:
    members = frozenset(S)
    if n < 4:
        raise SubsetOutOfRange(f"n must be at least 4, got {n}")
    if not members <= frozenset(range(1, n + 1)):
        raise SubsetOutOfRange(f"{sorted(members)} is not a subset of 1..{n}")
    if not 2 <= len(members) <= n - 2:
        raise SubsetOutOfRange(f"|S| = {len(members)} is outside [2, {n - 2}]")
    comp = frozenset(range(1, n + 1)) - members
    if 2 * len(members) > n or (2 * len(members) == n and 1 not in members):
        members = comp
    return MarkedSubset(n, members)


def parse_subset(n: int, text: str) -> MarkedSubset:
    """Parse ``"1,2,3"`` into a canonical :class:`MarkedSubset`."""
    try:
        items = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ValueError(f"bad subset string {text!r}; expected comma-separated integers") from None
    return canonicalize_subset(n, items)


def canonical_subsets(n: int, size: int) -> list[MarkedSubset]:
    """All canonical subsets whose stored side has ``size`` elements."""
    from itertools import combinations

    if 2 * size > n or size < 2:
        return []
    out = []
    for combo in combinations(range(1, n + 1), size):
        if 2 * size == n and combo[0] != 1:
            continue
        out.append(MarkedSubset(n, frozenset(combo)))
    return out


def half_binom(n: int, j: int) -> int:
    """Number of unordered splits with a part of size ``j``."""
    return comb(n, j) // 2 if 2 * j == n else comb(n, j)


# -- levels --------------------------------------------------------------------

def m_of(n: int) -> int:
    return n // 2


@dataclass(frozen=True, order=True)
class Level:
    """A level of the reduction tower for ``n`` points.

    ``k = 0`` is the GIT quotient (P^1)^n // SL(2).  For odd ``n`` this
    is also the weight level 0; for even ``n`` weight level 0 does not
    exist.  ``k >= 1`` is the Hassett space with symmetric weights
    ``eps_k`` in (1/(m-k+1), 1/(m-k)].
    """

    n: int
    k: int

    def __post_init__(self):
        if self.n < 4:
            raise LevelOutOfRange(f"n must be at least 4, got {self.n}")
        m = self.n // 2
        if self.k < 0 or self.k > max(m - 2, 0):
            raise LevelOutOfRange(f"level {self.k} is outside 0..{m - 2} for n={self.n}")

    @classmethod
    def git(cls, n: int) -> "Level":
        return cls(n, 0)

    @classmethod
    def weight(cls, n: int, k: int) -> "Level":
        if k == 0 and n % 2 == 0:
            raise LevelOutOfRange("weight level 0 is undefined for even n: total weight does not exceed 2")
        return cls(n, k)

    @classmethod
    def top(cls, n: int) -> "Level":
        return cls(n, max(n // 2 - 2, 0))

    @property
    def m(self) -> int:
        return self.n // 2

    @property
    def is_git(self) -> bool:
        return self.k == 0

    @property
    def is_top(self) -> bool:
        return self.k == max(self.m - 2, 0)

    def legal_sizes(self) -> list[int]:
        """Sizes |S| of boundary divisors living at this level."""
        if self.k == 0:
            return [2]
        return [2] + list(range(self.m - self.k + 1, self.m + 1))

    def is_legal(self, S: MarkedSubset) -> bool:
        return S.n == self.n and len(S) in self.legal_sizes()

    def tag(self) -> str:
        return "git" if self.k == 0 else f"w{self.k}"

    @classmethod
    def parse(cls, n: int, text: str) -> "Level":
        text = text.strip()
        if text.lower() in ("git", "gitquotient"):
            return cls.git(n)
        match = re.match(r"^(?:w|weightlevel\()(\d+)\)?$", text, re.IGNORECASE)
        if not match:
            raise ValueError(f"bad level {text!r}; expected 'git' or 'w<k>'")
        return cls.weight(n, int(match.group(1)))

    def __str__(self) -> str:
        return "GITQuotient" if self.k == 0 else f"WeightLevel({self.k})"


def eps_range(n: int, k: int) -> tuple[Fraction, Fraction]:
    """Open-closed chamber ``(lo, hi]`` of symmetric weights for level ``k``."""
    Level.weight(n, k)
    m = n // 2
    if k > m - 2:
        raise LevelOutOfRange(f"k={k} exceeds m-2={m - 2}")
    return Fraction(1, m - k + 1), Fraction(1, m - k)


def eps(n: int, k: int) -> Fraction:
    """The canonical weight of level ``k``: the right end of its chamber."""
    return eps_range(n, k)[1]

"""Boundary divisor classes on the levels of the reduction tower.

A class is a formal combination of boundary divisors ``D^S`` whose
coefficients are affine in alpha.  Equality is coefficientwise; two
classes that agree only up to the Keel relations compare unequal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Union

from .core import (
    AffineAlpha,
    IllegalStratum,
    Level,
    LevelMismatch,
    LevelOutOfRange,
    MarkedSubset,
    Scalar,
    canonical_subsets,
    canonicalize_subset,
    check_cap,
    parse_subset,
)

Coefficient = Union[AffineAlpha, int, Fraction]


class DivisorClass:
    __slots__ = ("level", "_coeffs")

    def __init__(self, level: Level, coeffs: Mapping[MarkedSubset, Coefficient] | None = None):
        self.level = level
        clean: dict[MarkedSubset, AffineAlpha] = {}
        for S, value in (coeffs or {}).items():
            if not level.is_legal(S):
                raise LevelMismatch(f"D^{{{S}}} (|S|={len(S)}) does not live on {level} for n={level.n}")
            value = AffineAlpha.coerce(value)
            if value:
                clean[S] = value
        self._coeffs = dict(sorted(clean.items()))

    @classmethod
    def zero(cls, level: Level) -> "DivisorClass":
        return cls(level)

    @classmethod
    def boundary(cls, level: Level, S: MarkedSubset | Iterable[int]) -> "DivisorClass":
        if not isinstance(S, MarkedSubset):
            S = canonicalize_subset(level.n, S)
        return cls(level, {S: 1})

    @property
    def n(self) -> int:
        return self.level.n

    @property
    def coeffs(self) -> dict[MarkedSubset, AffineAlpha]:
        return dict(self._coeffs)

    def coeff(self, S: MarkedSubset) -> AffineAlpha:
        return self._coeffs.get(S, AffineAlpha())

    def items(self):
        return self._coeffs.items()

    def __len__(self) -> int:
        return len(self._coeffs)

    def _check(self, other: "DivisorClass") -> None:
        if self.level != other.level:
            raise LevelMismatch(f"cannot combine classes on {self.level} and {other.level}")

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        if not isinstance(other, DivisorClass):
            return NotImplemented
        self._check(other)
        out = dict(self._coeffs)
        for S, v in other._coeffs.items():
            out[S] = out.get(S, AffineAlpha()) + v
        return DivisorClass(self.level, out)

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(self.level, {S: -v for S, v in self._coeffs.items()})

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        return self + (-other)

    def __mul__(self, scalar: Coefficient) -> "DivisorClass":
        if not isinstance(scalar, (int, Fraction, AffineAlpha)):
            return NotImplemented
        return DivisorClass(self.level, {S: v * scalar for S, v in self._coeffs.items()})

    __rmul__ = __mul__

    def times_alpha(self) -> "DivisorClass":
        """Multiply by alpha; the class must have constant coefficients."""
        return self * AffineAlpha.alpha()

    def evaluate(self, alpha: Scalar) -> "DivisorClass":
        return DivisorClass(self.level, {S: v(alpha) for S, v in self._coeffs.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, DivisorClass):
            return NotImplemented
        return self.level == other.level and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash((self.level, frozenset(self._coeffs.items())))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "level": self.level.tag(),
            "coeffs": {str(S): str(v) for S, v in self._coeffs.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "DivisorClass":
        n = int(data["n"])
        level = Level.parse(n, str(data["level"]))
        coeffs = {parse_subset(n, key): AffineAlpha.parse(str(v)) for key, v in data["coeffs"].items()}
        return cls(level, coeffs)

    @classmethod
    def from_json(cls, text: str) -> "DivisorClass":
        return cls.from_dict(json.loads(text))

    def __repr__(self) -> str:
        if not self._coeffs:
            return f"DivisorClass({self.level}, 0)"
        terms = " + ".join(f"({v.pretty()})D^{{{S}}}" for S, v in self._coeffs.items())
        return f"DivisorClass({self.level}, {terms})"


# -- distinguished classes -------------------------------------------------------

def symmetric_class(level: Level, j: int) -> DivisorClass:
    if j not in level.legal_sizes():
        raise IllegalStratum(f"D^{j} does not live on {level} for n={level.n}")
    return DivisorClass(level, {S: 1 for S in canonical_subsets(level.n, j)})


def _sum_symmetric(level: Level, coefficient_of_j) -> DivisorClass:
    coeffs = {}
    for j in level.legal_sizes():
        value = coefficient_of_j(j)
        for S in canonical_subsets(level.n, j):
            coeffs[S] = value
    return DivisorClass(level, coeffs)


def canonical_class(level: Level) -> DivisorClass:
    c = Fraction(2, level.n - 1)
    return _sum_symmetric(level, lambda j: -c * comb(j, 2) + j - 2)


def boundary_class(level: Level) -> DivisorClass:
    return _sum_symmetric(level, lambda j: 1)


# -- moving along the tower -------------------------------------------------------

def _target_level(n: int, k: int | Level) -> Level:
    if isinstance(k, Level):
        return k
    return Level(n, k)


def exceptional_size(level: Level) -> int:
    """Size of the divisors created by the step into ``level`` (k >= 1)."""
    return level.m - level.k + 1


def pullback_step(c: DivisorClass, k: int | Level) -> DivisorClass:
    """Pull ``c`` back from level ``k-1`` to level ``k``.

    A pair divisor ``D^S`` picks up every exceptional divisor ``D^{S'}``
    whose center lies on it, i.e. the points of ``S`` already coincide
    there.  When ``|S'| = n/2`` the center is met from both sides and
    each side contributes one half, because the exceptional divisor of
    the Kirwan blow-up is the image of two strata.
    """
    target = _target_level(c.n, k)
    if target.k < 1 or c.level.k != target.k - 1:
        raise LevelMismatch(f"pullback_step needs a class on level {target.k - 1}, got {c.level}")
    j = exceptional_size(target)
    n = c.n
    halves = 2 * j == n
    exceptional = [(S2, S2.members, S2.complement) for S2 in canonical_subsets(n, j)]
    out: dict[MarkedSubset, AffineAlpha] = {}

    def bump(S: MarkedSubset, v: AffineAlpha):
        out[S] = out.get(S, AffineAlpha()) + v

    for S, v in c.items():
        bump(S, v)
        if len(S) != 2:
            continue
        for S2, inside, outside in exceptional:
            if halves:
                if S.members <= inside or S.members <= outside:
                    bump(S2, v * Fraction(1, 2))
            elif S.members <= inside:
                bump(S2, v)
    return DivisorClass(target, out)


def pushforward_step(c: DivisorClass, k: int | Level) -> DivisorClass:
    """Push ``c`` forward from level ``k`` to ``k-1``; exceptional divisors go to 0."""
    target = _target_level(c.n, k)
    if c.level.k < 1 or target.k != c.level.k - 1:
        raise LevelMismatch(f"pushforward_step from {c.level} cannot land on level {target.k}")
    j = exceptional_size(c.level)
    return DivisorClass(target, {S: v for S, v in c.items() if len(S) != j})


def pullback_to_top(c: DivisorClass) -> DivisorClass:
    top = Level.top(c.n)
    while c.level.k < top.k:
        c = pullback_step(c, c.level.k + 1)
    return c


def a_alpha_class(n: int, k: int) -> DivisorClass:
    """The pullback of ``K + alpha * D`` from level ``k`` to the top, in closed form."""
    level = Level(n, k)
    m = level.m
    top = Level.top(n)
    alpha = AffineAlpha.alpha()
    c = Fraction(2, n - 1)
    coeffs: dict[MarkedSubset, AffineAlpha] = {}
    for j in range(2, m + 1):
        if j <= m - k:
            value = (alpha - c) * comb(j, 2)
        else:
            value = alpha - c * comb(j, 2) + (j - 2)
        for S in canonical_subsets(n, j):
            coeffs[S] = value
    return DivisorClass(top, coeffs)


# -- Picard bases -------------------------------------------------------------------

def picard_rank_formula(level: Level) -> int:
    n, m, k = level.n, level.m, level.k
    if n % 2:
        return n + sum(comb(n, m - i + 1) for i in range(1, k + 1))
    if k == 0:
        return n
    return n + comb(n, m) // 2 + sum(comb(n, m - i + 1) for i in range(2, k + 1))


@dataclass(frozen=True)
class PicardBasis:
    level: Level
    generators: tuple[MarkedSubset, ...]

    def __len__(self) -> int:
        return len(self.generators)

    def to_dict(self) -> dict:
        return {
            "n": self.level.n,
            "level": self.level.tag(),
            "rank": len(self.generators),
            "generators": [str(S) for S in self.generators],
        }


def picard_basis(level: Level) -> PicardBasis:
    n, m, k = level.n, level.m, level.k
    if n % 2 == 0 and k == 0:
        raise LevelOutOfRange("no boundary basis is provided for the singular even GIT quotient")
    gens: list[MarkedSubset] = []
    for size in range(m - k + 1, m + 1):
        gens.extend(canonical_subsets(n, size))
    if n % 2:
        pairs = [(i, i % n + 1) for i in range(1, n + 1)]
    else:
        pairs = [(i, i + 1) for i in range(1, n)] + [(1, n - 1)]
    gens.extend(canonicalize_subset(n, p) for p in pairs)
    return PicardBasis(level, tuple(gens))


def verify_basis_rank(level: Level) -> tuple[int, bool]:
    """Rank of (all F-curves) x (generators pulled back to the top level)."""
    from .exact_rank import RowEchelon
    from .fcurves import canonical_mask, fcurve_masks

    n = level.n
    check_cap(n, "rank")
    basis = picard_basis(level)
    # index: canonical top-level mask -> [(column, coefficient)]
    index: dict[int, list[tuple[int, Fraction]]] = {}
    for col, S in enumerate(basis.generators):
        pulled = pullback_to_top(DivisorClass.boundary(level, S))
        for T, v in pulled.items():
            mask = sum(1 << (i - 1) for i in T.members)
            index.setdefault(mask, []).append((col, v.constant))

    ech = RowEchelon(len(basis))
    for b in fcurve_masks(n):
        touched = [(b[0] | b[1], 1), (b[0] | b[2], 1), (b[0] | b[3], 1)]
        touched += [(x, -1) for x in b if bin(x).count("1") >= 2]
        row: dict[int, Fraction] = {}
        for mask, sign in touched:
            for col, v in index.get(canonical_mask(n, mask), ()):
                row[col] = row.get(col, 0) + sign * v
        ech.add(row)
        if ech.full:
            break
    expected = picard_rank_formula(level)
    return ech.rank, ech.rank == expected == len(basis)

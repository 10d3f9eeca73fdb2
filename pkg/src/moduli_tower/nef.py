"""Intersection tables, F-nef thresholds and the log canonical model lookup.

Every pairing of an F-curve with ``A(k, alpha)`` is affine in alpha, so
the set of alpha where all pairings are nonnegative is an interval that
can be found exactly from the roots.  Only F-curves are tested; the
results are F-nef thresholds, which is a weaker statement than nefness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

from .core import AffineAlpha, AlphaOutOfRange, Level, Scalar, check_cap
from .divisors import a_alpha_class
from .fcurves import FCurve, ScaledPairing, curve_from_masks, fcurve_masks, pair_class, vital_curve


def closed_form_row(n: int, k: int, i: int) -> AffineAlpha:
    """The expected value of ``C_i . A(k, alpha)``."""
    m = n // 2
    if i < k:
        return AffineAlpha(0, 1)
    if i == k:
        return AffineAlpha(m - k - 2, 2 - comb(m - k, 2))
    if i == k + 1:
        return AffineAlpha(-m + k + 1, comb(m - k + 1, 2) - 1)
    return AffineAlpha()


@dataclass(frozen=True)
class TableRow:
    i: int
    engine: AffineAlpha
    closed_form: AffineAlpha

    @property
    def agrees(self) -> bool:
        return self.engine == self.closed_form


@dataclass(frozen=True)
class AkTable:
    n: int
    k: int
    rows: tuple[TableRow, ...]

    @property
    def matches(self) -> bool:
        return all(r.agrees for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "matches": self.matches,
            "rows": [
                {"i": r.i, "engine": str(r.engine), "closed_form": str(r.closed_form), "agrees": r.agrees}
                for r in self.rows
            ],
        }


def ak_alpha_table(n: int, k: int) -> AkTable:
    level = Level(n, k)
    A = a_alpha_class(n, k)
    rows = []
    for i in range(1, level.m):
        rows.append(TableRow(i, pair_class(vital_curve(n, i), A), closed_form_row(n, k, i)))
    return AkTable(n, k, tuple(rows))


@dataclass(frozen=True)
class NefReport:
    """F-nef data of ``A(k, alpha)``.

    All F-curve pairings are nonnegative exactly for ``alpha`` in
    ``[threshold, upper]``.  ``witness`` is a curve whose pairing is
    negative just below the threshold.
    """

    n: int
    k: int
    threshold: Fraction
    upper: Fraction | None  # None when some curve is negative for every alpha
    witness: FCurve | None
    table: tuple[tuple[int, AffineAlpha], ...] = field(default=())
    curves_scanned: int = 0
    label: str = "F-nef"

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "n": self.n,
            "k": self.k,
            "threshold": _fmt(self.threshold),
            "upper": _fmt(self.upper) if self.upper is not None else None,
            "witness": str(self.witness) if self.witness else None,
            "witness_sizes": list(self.witness.sizes) if self.witness else None,
            "curves_scanned": self.curves_scanned,
            "table": [{"i": i, "pairing": str(f)} for i, f in self.table],
        }


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def fnef_threshold(n: int, k: int) -> NefReport:
    check_cap(n, "scan")
    return _fnef_threshold(n, k)


@lru_cache(maxsize=64)
def _fnef_threshold(n: int, k: int) -> NefReport:
    level = Level(n, k)
    A = a_alpha_class(n, k)
    pairing = ScaledPairing(n, dict(A.items()))

    # Largest root among increasing pairings that start negative, and
    # smallest root among decreasing ones; compared as fractions p/q
    # with q > 0 by cross multiplication.
    low_p, low_q = 0, 1
    witnesses: list[tuple[int, int, int, int]] = []
    high_p, high_q = 1, 1
    empty = False
    scanned = 0
    for masks in fcurve_masks(n):
        scanned += 1
        s, c = pairing.pair(masks)
        if s > 0:
            if c < 0:
                p, q = -c, s
                lhs, rhs = p * low_q, low_p * q
                if lhs > rhs:
                    low_p, low_q, witnesses = p, q, [masks]
                elif lhs == rhs:
                    witnesses.append(masks)
        elif s < 0:
            p, q = c, -s
            if p * high_q < high_p * q:
                high_p, high_q = p, q
        elif c < 0:
            empty = True

    threshold = min(Fraction(low_p, low_q), Fraction(1))
    upper = None if empty else Fraction(high_p, high_q)
    witness = None
    if witnesses:
        # Cheap size filter first: at k = 0 nearly every curve ties.
        def sizes(w):
            return sorted(bin(b).count("1") for b in w)

        smallest = min(sizes(w) for w in witnesses)
        shortlist = [w for w in witnesses if sizes(w) == smallest]
        witness = min((curve_from_masks(n, w) for w in shortlist), key=FCurve.sort_key)
    table = tuple((i, pair_class(vital_curve(n, i), A)) for i in range(1, level.m))
    return NefReport(n, k, threshold, upper, witness, table, scanned)


def simpson_model(n: int, alpha: Scalar) -> Level:
    """The level whose space is the log canonical model of ``K + alpha D``."""
    alpha = Fraction(alpha)
    m = n // 2
    if alpha <= Fraction(2, n - 1) or alpha > 1:
        raise AlphaOutOfRange(f"alpha={alpha} is outside (2/{n - 1}, 1]")
    if alpha <= Fraction(2, m + 1):
        return Level.git(n)
    for k in range(1, m - 1):
        if alpha <= Fraction(2, m - k + 1):
            return Level(n, k)
    return Level.top(n)

"""Exact rank of a sparse rational matrix fed one row at a time."""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping


def _integral(row: Mapping[int, Fraction | int]) -> dict[int, int]:
    row = {j: Fraction(v) for j, v in row.items() if v}
    if not row:
        return {}
    scale = lcm(*(v.denominator for v in row.values()))
    out = {j: int(v * scale) for j, v in row.items()}
    g = 0
    for v in out.values():
        g = gcd(g, v)
    return {j: v // g for j, v in out.items()}


class RowEchelon:
    """Fraction-free incremental echelon form over the integers."""

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivots: dict[int, dict[int, int]] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def full(self) -> bool:
        return self.rank == self.ncols

    def add(self, row: Mapping[int, Fraction | int]) -> bool:
        """Insert a row; return True if it raised the rank."""
        r = _integral(row)
        while r:
            lead = min(r)
            piv = self.pivots.get(lead)
            if piv is None:
                self.pivots[lead] = r
                return True
            a, b = piv[lead], r[lead]
            new = {j: a * v for j, v in r.items()}
            for j, v in piv.items():
                new[j] = new.get(j, 0) - b * v
            r = _integral({j: v for j, v in new.items() if v})
        return False


def rank(rows: Iterable[Mapping[int, Fraction | int]], ncols: int) -> int:
    ech = RowEchelon(ncols)
    for row in rows:
        ech.add(row)
        if ech.full:
            break
    return ech.rank

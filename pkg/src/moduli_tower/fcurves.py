"""F-curves of M_{0,n} and their intersections with boundary divisors.

The F-curve attached to a partition ``N1 | N2 | N3 | N4`` of the marked
points meets the boundary divisor ``D^S`` with multiplicity

* ``+1`` if ``{S, S^c}`` is one of the three splits ``Ni+Nj | Np+Nq``,
* ``-1`` if ``S`` or ``S^c`` is a single block,
* ``0`` otherwise.

Blocks are also handled as bitmasks (bit ``i-1`` for point ``i``) so
that full scans at n = 12 (611501 curves) stay fast.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Iterable, Iterator

from .core import (
    AffineAlpha,
    IndexOutOfRange,
    MarkedSubset,
    ModuliError,
    SizeMismatch,
    canonicalize_subset,
    check_cap,
)

_PAIRINGS = ((0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2))


class InvalidCurve(ModuliError):
    pass


def _block_key(block: frozenset):
    return (len(block), min(block))


@dataclass(frozen=True)
class FCurve:
    n: int
    blocks: tuple  # four frozensets, sorted by (size, smallest element)

    def __post_init__(self):
        blocks = [frozenset(b) for b in self.blocks]
        if len(blocks) != 4 or any(not b for b in blocks):
            raise InvalidCurve("an F-curve needs exactly four nonempty blocks")
        union = frozenset().union(*blocks)
        if sum(map(len, blocks)) != self.n or union != frozenset(range(1, self.n + 1)):
            raise InvalidCurve(f"blocks do not partition 1..{self.n}")
        object.__setattr__(self, "blocks", tuple(sorted(blocks, key=_block_key)))

    @classmethod
    def parse(cls, n: int, text: str) -> "FCurve":
        """``"1|2|3,4|5,6"``."""
        try:
            labels = [[int(t) for t in chunk.split(",")] for chunk in text.split("|")]
        except ValueError:
            raise InvalidCurve(f"bad curve string {text!r}") from None
        if sum(map(len, labels)) != len(set().union(*labels)):
            raise InvalidCurve(f"repeated label in {text!r}")
        blocks = [frozenset(b) for b in labels]
        return cls(n, tuple(blocks))

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(sorted(len(b) for b in self.blocks))

    def masks(self) -> tuple[int, int, int, int]:
        return tuple(sum(1 << (i - 1) for i in b) for b in self.blocks)

    def permuted(self, sigma) -> "FCurve":
        return FCurve(self.n, tuple(frozenset(sigma[i - 1] for i in b) for b in self.blocks))

    def sort_key(self):
        return (self.sizes, tuple(tuple(sorted(b)) for b in self.blocks))

    def __str__(self) -> str:
        return "|".join(",".join(map(str, sorted(b))) for b in self.blocks)


def pair_boundary(C: FCurve, S: MarkedSubset) -> int:
    if C.n != S.n:
        raise SizeMismatch(f"curve has n={C.n}, divisor has n={S.n}")
    side, other = S.members, S.complement
    b = C.blocks
    for i, j, p, q in _PAIRINGS:
        u = b[i] | b[j]
        if u == side or u == other:
            return 1
    for block in b:
        if block == side or block == other:
            return -1
    return 0


def pair_class(C: FCurve, c) -> AffineAlpha:
    """Bilinear extension of :func:`pair_boundary` to a divisor class.

    Only the seven subsets that can meet ``C`` are looked up, so the
    cost does not depend on the size of the class.
    """
    if c.level.n != C.n:
        raise SizeMismatch(f"curve has n={C.n}, class has n={c.level.n}")
    total = AffineAlpha()
    for S, sign in curve_divisors(C):
        coeff = c.coeff(S)
        if coeff:
            total = total + coeff * sign
    return total


def curve_divisors(C: FCurve) -> list[tuple[MarkedSubset, int]]:
    """The boundary divisors meeting ``C`` with their multiplicities."""
    b = C.blocks
    out = []
    for i, j, _, _ in _PAIRINGS:
        out.append((canonicalize_subset(C.n, b[i] | b[j]), 1))
    for block in b:
        if 2 <= len(block) <= C.n - 2:
            out.append((canonicalize_subset(C.n, block), -1))
    return out


def vital_curve(n: int, i: int) -> FCurve:
    """The curve ``C_i`` with block sizes (1, 1, m-i, m+i-1) or (1, 1, m-i, m+i-2)."""
    m = n // 2
    if not 1 <= i <= m - 1:
        raise IndexOutOfRange(f"i={i} outside 1..{m - 1}")
    third = m - i
    blocks = (
        frozenset([1]),
        frozenset([2]),
        frozenset(range(3, 3 + third)),
        frozenset(range(3 + third, n + 1)),
    )
    return FCurve(n, blocks)


# -- enumeration ---------------------------------------------------------------

def _four_block_masks(n: int) -> Iterator[tuple[int, int, int, int]]:
    """Set partitions of {1..n} into exactly four blocks, as bitmasks."""
    blocks = [0, 0, 0, 0]

    def rec(i: int, used: int):
        if n - i < 4 - used:
            return
        if i == n:
            yield tuple(blocks)
            return
        bit = 1 << i
        for j in range(used):
            blocks[j] |= bit
            yield from rec(i + 1, used)
            blocks[j] ^= bit
        if used < 4:
            blocks[used] = bit
            yield from rec(i + 1, used + 1)
            blocks[used] = 0

    yield from rec(0, 0)


@lru_cache(maxsize=4)
def fcurve_masks(n: int) -> tuple[tuple[int, int, int, int], ...]:
    """All F-curves of M_{0,n} as block bitmasks (restricted-growth order)."""
    return tuple(_four_block_masks(n))


def _mask_to_set(mask: int) -> frozenset:
    out, i = [], 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def curve_from_masks(n: int, masks: Iterable[int]) -> FCurve:
    return FCurve(n, tuple(_mask_to_set(m) for m in masks))


def iter_fcurves(n: int) -> Iterator[FCurve]:
    for masks in _four_block_masks(n):
        yield curve_from_masks(n, masks)


def enumerate_fcurves(n: int) -> list[FCurve]:
    check_cap(n, "scan")
    return sorted(iter_fcurves(n), key=FCurve.sort_key)


# -- fast integer pairing ----------------------------------------------------------

def canonical_mask(n: int, mask: int) -> int:
    size = bin(mask).count("1")
    full = (1 << n) - 1
    if 2 * size > n or (2 * size == n and not mask & 1):
        return full ^ mask
    return mask


class ScaledPairing:
    """Integer-valued pairing of all F-curves with one affine class.

    Coefficients ``c + s*alpha`` are multiplied by a common positive
    denominator so the scan runs on Python ints; signs and roots are
    unchanged by the scaling.
    """

    def __init__(self, n: int, coeffs: dict[MarkedSubset, AffineAlpha]):
        self.n = n
        dens = [1]
        for f in coeffs.values():
            dens += [f.constant.denominator, f.slope.denominator]
        self.scale = lcm(*dens)
        self.table: dict[int, tuple[int, int]] = {}
        for S, f in coeffs.items():
            mask = sum(1 << (i - 1) for i in S.members)
            self.table[mask] = (int(f.slope * self.scale), int(f.constant * self.scale))

    def pair(self, masks: tuple[int, int, int, int]) -> tuple[int, int]:
        n, table = self.n, self.table
        full = (1 << n) - 1
        s = c = 0
        b0, b1, b2, b3 = masks
        for u in (b0 | b1, b0 | b2, b0 | b3):
            size = bin(u).count("1")
            if 2 * size > n or (2 * size == n and not u & 1):
                u ^= full
            hit = table.get(u)
            if hit:
                s += hit[0]
                c += hit[1]
        for b in masks:
            size = bin(b).count("1")
            if size < 2:
                continue
            if 2 * size > n or (2 * size == n and not b & 1):
                b ^= full
            hit = table.get(b)
            if hit:
                s -= hit[0]
                c -= hit[1]
        return s, c

    def unscale(self, s: int, c: int) -> AffineAlpha:
        return AffineAlpha(Fraction(c, self.scale), Fraction(s, self.scale))

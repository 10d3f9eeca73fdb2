"""Blow-up schedule of (P^1)^n and Picard-rank bookkeeping for its quotients.

Stage ``k`` blows up the proper transforms of the loci where
``n - k + 1`` points coincide.  Stages whose centers lie in the unstable
locus leave the GIT quotient untouched; the remaining stages produce the
levels of the reduction tower.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .core import InvalidN, Level, LevelOutOfRange, MarkedSubset, canonical_subsets, eps
from .divisors import picard_rank_formula
from .git_stability import count_singular_points
from .hassett_trees import contracted_divisors


@dataclass(frozen=True)
class StageRecord:
    stage: int
    center_size: int
    component_count: int
    codim: int
    rank_increment: int

    def to_dict(self) -> dict:
        return {
            "stage": self.stage,
            "center_size": self.center_size,
            "component_count": self.component_count,
            "codim": self.codim,
            "rank_increment": self.rank_increment,
        }


def schedule(n: int) -> list[StageRecord]:
    """Stages 1..n-2; the codimension-one stage n-1 would change nothing."""
    if n < 4:
        raise InvalidN(f"the schedule needs n >= 4, got {n}")
    out = []
    for k in range(1, n - 1):
        size = n - k + 1
        count = comb(n, size)
        codim = size - 1
        out.append(StageRecord(k, size, count, codim, count if codim >= 2 else 0))
    return out


def upstairs_rank(n: int) -> int:
    """Picard rank of the last blow-up F_{n-2}."""
    return n + sum(r.rank_increment for r in schedule(n))


@dataclass(frozen=True)
class Transition:
    stage: int
    center_size: int
    changes_quotient: bool
    level: Level  # level of the quotient after this stage
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "stage": self.stage,
            "center_size": self.center_size,
            "changes_quotient": self.changes_quotient,
            "level": self.level.tag(),
            "note": self.note,
        }


@dataclass(frozen=True)
class TransitionReport:
    n: int
    last_unchanged: int
    rows: tuple[Transition, ...]

    def to_dict(self) -> dict:
        return {"n": self.n, "last_unchanged": self.last_unchanged, "rows": [r.to_dict() for r in self.rows]}


def stability_transitions(n: int) -> TransitionReport:
    """Which stages of the schedule modify the quotient.

    A center of size ``> n/2`` consists of unstable points, so stages
    ``1..n-m`` leave the quotient alone.  Afterwards stage ``s`` yields
    level ``s - (n - m)``; for even n the first such stage is the Kirwan
    blow-up of the singular points.
    """
    if n < 4:
        raise InvalidN(f"n must be at least 4, got {n}")
    m = n // 2
    last = n - m
    rows = []
    for rec in schedule(n):
        changes = rec.stage > last
        level = Level(n, rec.stage - last if changes else 0)
        note = ""
        if not changes:
            note = "center is unstable"
        elif n % 2 == 0 and rec.stage == last + 1:
            note = f"Kirwan blow-up of {count_singular_points(n)} singular points"
        rows.append(Transition(rec.stage, rec.center_size, changes, level, note))
    return TransitionReport(n, last, tuple(rows))


@dataclass(frozen=True)
class LedgerRow:
    level: Level
    closed_form: int
    recursive: int
    source: str

    @property
    def agrees(self) -> bool:
        return self.closed_form == self.recursive

    def to_dict(self) -> dict:
        return {
            "level": self.level.tag(),
            "rank": self.closed_form,
            "recursive": self.recursive,
            "source": self.source,
            "agrees": self.agrees,
        }


@dataclass(frozen=True)
class QuotientLedger:
    n: int
    rows: tuple[LedgerRow, ...]
    top_expected: int

    @property
    def consistent(self) -> bool:
        return all(r.agrees for r in self.rows) and self.rows[-1].closed_form == self.top_expected

    def rank(self, k: int) -> int:
        return self.rows[k].closed_form

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "top_expected": self.top_expected,
            "consistent": self.consistent,
            "rows": [r.to_dict() for r in self.rows],
        }


def quotient_ledger(n: int) -> QuotientLedger:
    """Picard ranks of every level, computed two ways.

    The closed form is compared against a top-down recursion: start
    from the Picard rank of M_{0,n} and remove one class per boundary
    divisor contracted by each reduction morphism.
    """
    if n < 5:
        raise InvalidN(f"the ledger needs n >= 5, got {n}")
    m = n // 2
    top = 2 ** (n - 1) - comb(n, 2) - 1
    recursive = {m - 2: top}
    for k in range(m - 2, 0, -1):
        recursive[k - 1] = recursive[k] - len(contracted_divisors(n, k))
    rows = []
    for k in range(0, m - 1):
        level = Level(n, k)
        if k == 0:
            source = "git" if n % 2 == 0 else "git=w0"
        else:
            source = "odd" if n % 2 else "even"
        rows.append(LedgerRow(level, picard_rank_formula(level), recursive[k], source))
    return QuotientLedger(n, tuple(rows), top)


@dataclass(frozen=True)
class CenterComponent:
    subset: MarkedSubset
    weights: tuple[Fraction, ...]
    codim: int

    @property
    def points(self) -> int:
        return len(self.weights)

    def tag(self) -> str:
        rest = self.weights[1:]
        return f"M_0,(1,{rest[0]}^{len(rest)})" if rest else "M_0,(1)"

    def to_dict(self) -> dict:
        return {"subset": str(self.subset), "weights": self.tag(), "points": self.points, "codim": self.codim}


def blowup_center_description(n: int, k: int) -> list[CenterComponent]:
    """Components of the center of the reduction from level k+1 to level k.

    Each is the locus where the m-k points of S collide, a copy of the
    weighted space with S replaced by one point of weight 1.  At
    ``k = m-2`` the center is a divisor (codim 1) and nothing is blown up.
    """
    m = n // 2
    if not 1 <= k <= m - 2:
        raise LevelOutOfRange(f"k={k} outside 1..{m - 2}")
    e = eps(n, k)
    others = n - m + k
    weights = (Fraction(1),) + (e,) * others
    codim = m - k - 1
    return [CenterComponent(S, weights, codim) for S in canonical_subsets(n, m - k)]

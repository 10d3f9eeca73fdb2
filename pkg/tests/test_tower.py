from fractions import Fraction
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from moduli_tower.core import InvalidN, Level, LevelOutOfRange, half_binom
from moduli_tower.divisors import picard_rank_formula
from moduli_tower.git_stability import Stability, StabilityClass, count_patterns_by_class
from moduli_tower.tower import (
    blowup_center_description,
    quotient_ledger,
    schedule,
    stability_transitions,
    upstairs_rank,
)


def triples(n):
    return [(r.center_size, r.component_count, r.codim) for r in schedule(n)]


def test_schedule_examples():
    assert triples(5) == [(5, 1, 4), (4, 5, 3), (3, 10, 2)]
    assert upstairs_rank(5) == 21
    assert triples(4) == [(4, 1, 3), (3, 4, 2)]


def test_schedule_small_n():
    with pytest.raises(InvalidN):
        schedule(3)


@given(st.integers(4, 30))
def test_schedule_invariants(n):
    recs = schedule(n)
    assert [r.stage for r in recs] == list(range(1, n - 1))
    for r in recs:
        assert r.center_size == n - r.stage + 1
        assert r.component_count == comb(n, r.center_size)
        assert r.codim == r.center_size - 1 >= 2
        assert r.rank_increment == r.component_count


@given(st.integers(4, 30))
def test_upstairs_rank_total(n):
    # one class per hyperplane factor plus one per center component of size >= 3
    assert upstairs_rank(n) == n + sum(comb(n, j) for j in range(3, n + 1))
    assert upstairs_rank(n) == 2 ** n - 1 - comb(n, 2)


def test_transitions_odd():
    report = stability_transitions(9)
    assert report.last_unchanged == 5
    changed = [t for t in report.rows if t.changes_quotient]
    assert changed[0].stage == 6
    assert [t.level.k for t in changed] == [1, 2]
    assert all(not t.note for t in changed)


def test_transitions_even():
    report = stability_transitions(8)
    assert report.last_unchanged == 4
    first = next(t for t in report.rows if t.changes_quotient)
    assert first.stage == 5
    assert first.level == Level(8, 1)
    assert "35" in first.note and "Kirwan" in first.note


@pytest.mark.parametrize("n", range(5, 15))
def test_unchanged_stages_have_unstable_centers(n):
    for t in stability_transitions(n).rows:
        # a center of more than n/2 coinciding points is unstable
        assert t.changes_quotient == (t.center_size <= n // 2)
        if not t.changes_quotient:
            assert 2 * t.center_size > n


def test_ledger_examples():
    assert [quotient_ledger(7).rank(k) for k in (0, 1)] == [7, 42]
    L8 = quotient_ledger(8)
    assert [L8.rank(k) for k in (1, 2)] == [43, 99]
    assert quotient_ledger(6).rank(1) == 16
    with pytest.raises(InvalidN):
        quotient_ledger(4)


@pytest.mark.parametrize("n", range(5, 15))
def test_ledger_consistent(n):
    ledger = quotient_ledger(n)
    assert ledger.consistent
    assert ledger.rank(n // 2 - 2) == 2 ** (n - 1) - comb(n, 2) - 1
    assert all(r.closed_form == picard_rank_formula(r.level) for r in ledger.rows)


@pytest.mark.parametrize("n", range(5, 15))
def test_increment_identity(n):
    m = n // 2
    ledger = quotient_ledger(n)
    for k in range(2, m - 1):
        assert ledger.rank(k) - ledger.rank(k - 1) == comb(n, m - k + 1)
    if m >= 3:
        first = ledger.rank(1) - ledger.rank(0)
        assert first == (half_binom(n, m) if n % 2 == 0 else comb(n, m))


def test_ledger_json_shape():
    d = quotient_ledger(8).to_dict()
    assert d["consistent"] and d["top_expected"] == 99
    assert [r["level"] for r in d["rows"]] == ["git", "w1", "w2"]


def test_center_examples():
    comps = blowup_center_description(9, 1)
    assert len(comps) == 84
    assert all(c.points == 7 and len(c.subset) == 3 for c in comps)
    assert comps[0].tag() == "M_0,(1,1/3^6)"
    assert len(blowup_center_description(8, 1)) == 56
    with pytest.raises(LevelOutOfRange):
        blowup_center_description(9, 0)


@pytest.mark.parametrize("n", range(7, 15))
def test_center_counts_match_ledger(n):
    m = n // 2
    ledger = quotient_ledger(n)
    for k in range(1, m - 2):
        comps = blowup_center_description(n, k)
        assert len(comps) == ledger.rank(k + 1) - ledger.rank(k)
        assert {c.codim for c in comps} == {m - k - 1}
        assert all(c.weights[1:] == (Fraction(1, m - k),) * (n - m + k) for c in comps)


@pytest.mark.parametrize("n", range(6, 13, 2))
def test_singular_points_are_closed_orbits(n):
    closed = StabilityClass(Stability.STRICTLY_SEMISTABLE, True)
    assert count_patterns_by_class(n)[closed] == half_binom(n, n // 2)

import itertools
import random
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from moduli_tower.core import (
    AffineAlpha,
    AlphaOutOfRange,
    CapExceeded,
    Level,
    LevelOutOfRange,
    MarkedSubset,
    SizeMismatch,
    canonical_subsets,
    canonicalize_subset,
)
from moduli_tower.divisors import DivisorClass, a_alpha_class, pullback_to_top, symmetric_class
from moduli_tower.fcurves import (
    FCurve,
    IndexOutOfRange,
    InvalidCurve,
    ScaledPairing,
    enumerate_fcurves,
    fcurve_masks,
    pair_boundary,
    pair_class,
    vital_curve,
)
from moduli_tower.nef import ak_alpha_table, closed_form_row, fnef_threshold, simpson_model
from oracles import all_fcurve_blocks, dense_rank, km_pairing, stirling2, threshold_by_brute_force

F = Fraction
a = AffineAlpha.alpha()


def S(n, *members):
    return canonicalize_subset(n, members)


# -- pairing rule ---------------------------------------------------------------

def test_pair_boundary_examples():
    C = FCurve.parse(6, "1|2|3,4|5,6")
    assert pair_boundary(C, S(6, 1, 2)) == 1
    assert pair_boundary(C, S(6, 3, 4)) == -1
    assert pair_boundary(C, S(6, 1, 3)) == 0


def test_pair_boundary_size_mismatch():
    with pytest.raises(SizeMismatch):
        pair_boundary(FCurve.parse(6, "1|2|3,4|5,6"), S(7, 1, 2))


def test_curve_parse_rejects_bad_partitions():
    for text in ("1|2|3", "1|2|3|4,4", "1|2|3|x", "1|2|3|4,5"):
        with pytest.raises(InvalidCurve):
            FCurve.parse(4, text)


def test_pair_class_examples():
    C = FCurve.parse(6, "1|2|3|4,5,6")
    assert pair_class(C, DivisorClass.zero(Level.top(6))) == AffineAlpha()
    assert pair_class(C, a_alpha_class(6, 1)) == 2 * a - 1  # C is C_2 at n = 6
    assert pair_class(FCurve.parse(6, "1|2|3,4|5,6"), a_alpha_class(6, 1)) == a


@pytest.mark.parametrize("n", range(4, 8))
def test_pair_boundary_matches_oracle(n):
    subsets = [s for j in range(2, n // 2 + 1) for s in canonical_subsets(n, j)]
    for blocks in all_fcurve_blocks(n):
        C = FCurve(n, tuple(blocks))
        for s in subsets:
            assert pair_boundary(C, s) == km_pairing(blocks, s.members, n)


# -- vital curves ---------------------------------------------------------------

def test_vital_curve_examples():
    assert vital_curve(9, 1).sizes == (1, 1, 3, 4)
    assert vital_curve(8, 1).sizes == (1, 1, 3, 3)
    with pytest.raises(IndexOutOfRange):
        vital_curve(8, 4)
    with pytest.raises(IndexOutOfRange):
        vital_curve(8, 0)


@pytest.mark.parametrize("n", range(5, 13))
def test_vital_curve_sizes(n):
    m = n // 2
    for i in range(1, m):
        last = m + i - 1 if n % 2 else m + i - 2
        assert vital_curve(n, i).sizes == tuple(sorted((1, 1, m - i, last)))


# -- enumeration ----------------------------------------------------------------

def test_enumerate_examples():
    assert len(enumerate_fcurves(4)) == 1
    assert len(enumerate_fcurves(5)) == 10
    assert len(enumerate_fcurves(6)) == 65


@pytest.mark.parametrize("n", range(4, 11))
def test_enumerate_counts_are_stirling(n):
    assert len(fcurve_masks(n)) == stirling2(n, 4)


def test_enumerate_is_deterministic_and_distinct():
    first = [str(c) for c in enumerate_fcurves(7)]
    assert first == [str(c) for c in enumerate_fcurves(7)]
    assert len(set(first)) == len(first)
    oracle = {frozenset(frozenset(b) for b in p) for p in all_fcurve_blocks(7)}
    assert {frozenset(c.blocks) for c in enumerate_fcurves(7)} == oracle


def test_enumerate_cap():
    with pytest.raises(CapExceeded):
        enumerate_fcurves(13)


# -- table ----------------------------------------------------------------------

def _row(n, k, i):
    return next(r for r in ak_alpha_table(n, k).rows if r.i == i)


def test_table_examples():
    assert _row(9, 1, 2).engine == 5 * a - 2
    assert _row(9, 1, 2).closed_form == 5 * a - 2
    assert _row(9, 1, 3).engine == AffineAlpha()
    assert _row(6, 1, 2).engine == 2 * a - 1
    assert _row(6, 1, 2).engine(F(1, 2)) == 0


def test_table_level_out_of_range():
    with pytest.raises(LevelOutOfRange):
        ak_alpha_table(9, 3)


# Cells of the closed-form table reproduced by the engine.  The others
# (k = 0 for n >= 7, k = 1 at i = 1 for even n >= 8) cannot be matched
# by any class of this shape; see the two tests below.
AGREEING = [
    (n, k)
    for n in range(5, 13)
    for k in range(0, n // 2 - 1)
    if not (k == 0 and n >= 7) and not (k == 1 and n % 2 == 0 and n >= 8)
]


@pytest.mark.parametrize("n,k", AGREEING)
def test_table_agrees(n, k):
    assert ak_alpha_table(n, k).matches


@pytest.mark.parametrize("n", range(7, 13))
def test_quotient_level_pairings_are_proportional(n):
    # A(0, alpha) is (alpha - 2/(n-1)) times a pulled-back class, so every
    # F-curve pairing vanishes at 2/(n-1).  The closed-form row i = 1 has
    # a different root, hence no engine can reproduce it.
    A = a_alpha_class(n, 0)
    root = F(2, n - 1)
    for C in enumerate_fcurves(n) if n <= 9 else [vital_curve(n, i) for i in range(1, n // 2)]:
        assert pair_class(C, A)(root) == 0
    assert closed_form_row(n, 0, 1)(root) != 0


def _closed_form_solvable(n, k):
    """Can any symmetric class pulled back from level k meet the closed-form rows?

    Pairing is linear, so this is a rational linear system in the
    coefficients of D^j, j legal at level k, solved separately for the
    constant and the alpha parts.
    """
    level = Level(n, k)
    sizes = level.legal_sizes()
    pulled = [pullback_to_top(symmetric_class(level, j)) for j in sizes]
    M, consts, slopes = [], [], []
    for i in range(1, level.m):
        C = vital_curve(n, i)
        M.append([pair_class(C, D).constant for D in pulled])
        row = closed_form_row(n, k, i)
        consts.append(row.constant)
        slopes.append(row.slope)
    r = dense_rank(M)
    return all(dense_rank([m + [b] for m, b in zip(M, rhs)]) == r for rhs in (consts, slopes))


def test_even_first_row_needs_a_different_class():
    # At n = 8, k = 1 the rows are met by a unique combination of the
    # pulled-back D^2 and D^4, and it is not K + alpha D.
    level = Level(8, 1)
    D2, D4 = (pullback_to_top(symmetric_class(level, j)) for j in (2, 4))
    x, y = (9 * a - 3) * F(1, 7), (19 * a - 4) * F(1, 7)
    fitted = D2 * x + D4 * y
    for i in range(1, 4):
        assert pair_class(vital_curve(8, i), fitted) == closed_form_row(8, 1, i)
    assert a_alpha_class(8, 1) == D2 * (a - F(2, 7)) + D4 * (a + F(2, 7))
    assert a_alpha_class(8, 1) != fitted


@pytest.mark.parametrize("n", [8, 10, 12])
def test_even_first_row_offset(n):
    row = ak_alpha_table(n, 1).rows[0]
    assert row.engine == row.closed_form * 2 - a


@pytest.mark.parametrize("n", [6, 7, 9, 11])
def test_agreeing_levels_are_solvable(n):
    assert _closed_form_solvable(n, 1)


def test_first_row_frozen_values():
    assert _row(8, 1, 1).engine == 2 - 3 * a
    assert _row(8, 1, 1).closed_form == 1 - a
    assert _row(7, 0, 1).engine == 3 * a - 1
    assert _row(7, 0, 1).closed_form == 5 * a - 2


# -- thresholds -----------------------------------------------------------------

def test_threshold_examples():
    r = fnef_threshold(6, 1)
    assert r.threshold == F(1, 2)
    assert r.witness.sizes == (1, 1, 1, 3)
    assert fnef_threshold(9, 2).threshold == F(1, 2)
    assert fnef_threshold(9, 0).threshold == F(1, 4)


@pytest.mark.parametrize("n", range(5, 9))
def test_threshold_matches_brute_force(n):
    for k in range(0, n // 2 - 1):
        assert fnef_threshold(n, k).threshold == threshold_by_brute_force(n, k)


@pytest.mark.parametrize("n", range(5, 11))
def test_witness_is_negative_just_below(n):
    for k in range(1, n // 2 - 1):
        r = fnef_threshold(n, k)
        value = pair_class(r.witness, a_alpha_class(n, k))
        assert value(r.threshold) == 0
        assert value.slope > 0


def test_threshold_cap():
    with pytest.raises(CapExceeded):
        fnef_threshold(13, 1)


def test_report_serialises():
    d = fnef_threshold(6, 1).to_dict()
    assert d["label"] == "F-nef"
    assert d["threshold"] == "1/2"
    assert d["witness_sizes"] == [1, 1, 1, 3]
    assert d["curves_scanned"] == 65


# -- properties over all curves --------------------------------------------------

@pytest.mark.parametrize("n", range(5, 9))
def test_pairing_depends_only_on_block_sizes(n):
    for k in range(0, n // 2 - 1):
        A = a_alpha_class(n, k)
        seen = {}
        for C in enumerate_fcurves(n):
            value = pair_class(C, A)
            assert seen.setdefault(C.sizes, value) == value


@pytest.mark.parametrize("n", range(5, 13))
def test_nonnegative_at_right_endpoint(n):
    m = n // 2
    for k in range(0, m - 1):
        right = F(2, m - k + 1)
        A = a_alpha_class(n, k)
        P = ScaledPairing(n, dict(A.items()))
        for masks in fcurve_masks(n):
            s, c = P.pair(masks)
            assert s * right + c >= 0


@pytest.mark.parametrize("n", range(5, 9))
def test_scaled_pairing_matches_pair_class(n):
    for k in range(0, n // 2 - 1):
        A = a_alpha_class(n, k)
        P = ScaledPairing(n, dict(A.items()))
        for C in enumerate_fcurves(n):
            assert P.unscale(*P.pair(C.masks())) == pair_class(C, A)


@st.composite
def curve_subset_perm(draw):
    n = draw(st.integers(4, 10))
    labels = draw(st.lists(st.integers(0, 3), min_size=n, max_size=n).filter(lambda x: len(set(x)) == 4))
    blocks = tuple(frozenset(i + 1 for i in range(n) if labels[i] == b) for b in range(4))
    size = draw(st.integers(2, n // 2))
    members = draw(st.permutations(range(1, n + 1)))[:size]
    sigma = draw(st.permutations(range(1, n + 1)))
    return FCurve(n, blocks), canonicalize_subset(n, members), sigma


@given(curve_subset_perm())
def test_permutation_equivariance(data):
    C, s, sigma = data
    moved = canonicalize_subset(C.n, [sigma[i - 1] for i in s.members])
    assert pair_boundary(C.permuted(sigma), moved) == pair_boundary(C, s)


# -- log canonical models ---------------------------------------------------------

def test_simpson_examples():
    assert simpson_model(9, F(1, 2)) == Level(9, 1)
    assert simpson_model(9, F(3, 10)) == Level.git(9)
    with pytest.raises(AlphaOutOfRange):
        simpson_model(9, F(1, 5))
    with pytest.raises(AlphaOutOfRange):
        simpson_model(9, F(11, 10))
    assert simpson_model(9, F(1)) == Level.top(9)


@pytest.mark.parametrize("n", range(5, 13))
def test_simpson_intervals_are_closed_on_the_right(n):
    m = n // 2
    assert simpson_model(n, F(2, m + 1)).is_git
    for k in range(1, m - 1):
        assert simpson_model(n, F(2, m - k + 1)) == Level(n, k)
    assert simpson_model(n, F(2, 3) + F(1, 1000)) == Level.top(n)


@given(st.integers(5, 12), st.fractions(min_value=0, max_value=1, max_denominator=500))
def test_simpson_is_monotone(n, alpha):
    if alpha <= F(2, n - 1):
        return
    level = simpson_model(n, alpha)
    assert simpson_model(n, F(1)).k >= level.k
    assert simpson_model(n, min(F(1), alpha + F(1, 1000))).k >= level.k

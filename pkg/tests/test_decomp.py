from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brierdecomp.core import (
    BinningScheme,
    ForecastSeries,
    UndefinedCorrectionError,
    empirical_brier,
    summarize,
)
from brierdecomp.decomp import (
    consistency_correct,
    decompose_all,
    decompose_bias_corrected,
    decompose_traditional,
    shrink_factor,
)
from oracles import random_series


def counts_of(p, y, bins):
    return summarize(ForecastSeries(p, y), BinningScheme.equal_width(bins))


def test_single_bin_has_no_resolution(rng):
    s = random_series(rng, 80)
    assert decompose_traditional(summarize(s, BinningScheme.equal_width(1))).res == 0.0


def test_perfect_two_bin_forecast():
    # bins (A, B) = (2, 0) and (2, 2)
    d = decompose_traditional(counts_of([0, 0, 1, 1], [0, 0, 1, 1], 2))
    assert (d.rel, d.res, d.unc) == (0.0, 0.25, 0.25)
    assert d.brier_sum == empirical_brier(ForecastSeries([0, 0, 1, 1], [0, 0, 1, 1]))[0] == 0.0


def test_maximal_uncertainty(rng):
    d = decompose_traditional(counts_of(rng.uniform(size=4), [1, 0, 1, 0], 3))
    assert d.unc == 0.25


def test_bias_corrected_reliability_can_be_negative():
    d = decompose_bias_corrected(counts_of([0.5, 0.5], [1, 0], 1))
    assert d.rel == pytest.approx(-0.25, abs=1e-15)


def test_bias_corrected_uncertainty_can_exceed_quarter():
    d = decompose_bias_corrected(counts_of([0.1, 0.4, 0.6, 0.9], [1, 0, 1, 0], 1))
    assert d.unc == pytest.approx(1 / 3, rel=1e-15)


def test_singleton_bins_are_not_corrected():
    counts = counts_of([0, 1], [0, 1], 2)
    assert decompose_bias_corrected(counts).rel == decompose_traditional(counts).rel == 0.0


def test_bias_correction_needs_two_forecasts():
    counts = counts_of([0.3], [1], 2)
    for fn in (decompose_bias_corrected, consistency_correct):
        with pytest.raises(UndefinedCorrectionError):
            fn(counts)
    assert set(decompose_all(counts)) == {"traditional"}


def test_hand_computed_bias_correction():
    # bins: {0.2 -> y=0}, {0.8 -> y=1, 0.8 -> y=0}; N=3, Y=1
    d = decompose_bias_corrected(counts_of([0.2, 0.8, 0.8], [0, 1, 0], 2))
    rel = Fraction(1, 3) * (Fraction(1, 25) / 1 + (1 - Fraction(8, 5)) ** 2 / 2)
    s = Fraction(1, 3) * Fraction(1 * 1, 2 * 1)
    res = Fraction(1, 3) * (1 * Fraction(1, 3) ** 2 + 2 * (Fraction(1, 2) - Fraction(1, 3)) ** 2)
    t = Fraction(1 * 2, 9 * 2)
    assert d.rel == pytest.approx(float(rel - s), abs=1e-15)
    assert d.res == pytest.approx(float(res - s + t), abs=1e-15)
    assert d.unc == pytest.approx(float(Fraction(2, 6)), abs=1e-15)


def test_consistency_correction_stops_at_zero_reliability():
    counts = counts_of([0.5, 0.5], [1, 0], 1)
    cc = consistency_correct(counts)
    tr = decompose_traditional(counts)
    assert cc.gamma == 0.0
    assert (cc.rel, cc.res, cc.unc) == (tr.rel, tr.res, tr.unc)


def test_consistency_correction_full_step_when_in_range(rng):
    hits = 0
    for _ in range(200):
        counts = summarize(random_series(rng, 400), BinningScheme.equal_width(5))
        bc = decompose_bias_corrected(counts)
        if 0 <= bc.rel <= 1 and 0 <= bc.res <= 1 and 0 <= bc.unc <= 0.25:
            hits += 1
            cc = consistency_correct(counts)
            assert cc.gamma == 1.0
            assert (cc.rel, cc.res, cc.unc) == pytest.approx((bc.rel, bc.res, bc.unc), abs=1e-15)
    assert hits > 20


def test_zero_shift_gives_unit_gamma():
    assert shrink_factor(0.1, 0.2, 0.2, 0.0, 0.0) == 1.0


@pytest.mark.parametrize(
    "rel, res, unc, s, t, gamma",
    [
        (0.01, 0.1, 0.2, 0.02, 0.0, 0.5),  # REL would go negative halfway
        (0.3, 0.0, 0.1, 0.01, 0.02, 1.0),  # RES grows, stays below 1
        (0.3, 0.995, 0.1, 0.0, 0.01, 0.5),  # RES would exceed 1
        (0.3, 0.1, 0.24, 0.0, 0.02, 0.5),  # UNC would exceed 1/4
        (0.3, 0.002, 0.1, 0.01, 0.006, 0.5),  # RES would go negative
    ],
)
def test_shrink_factor_binding_constraints(rel, res, unc, s, t, gamma):
    assert shrink_factor(rel, res, unc, s, t) == pytest.approx(gamma, rel=1e-12)


def test_traditional_within_analytic_ranges(rng):
    for _ in range(300):
        s = random_series(rng, int(rng.integers(1, 200)), base_rate=rng.uniform())
        d = decompose_traditional(summarize(s, BinningScheme.equal_width(int(rng.integers(1, 15)))))
        assert d.rel >= 0 and d.res >= 0 and 0 <= d.unc <= 0.25


@settings(max_examples=300, deadline=None)
@given(
    st.lists(st.tuples(st.floats(0, 1), st.integers(0, 1)), min_size=2, max_size=40),
    st.integers(1, 10),
)
def test_brier_sum_preserved_across_families(pairs, bins):
    p, y = zip(*pairs)
    fams = decompose_all(counts_of(p, y, bins))
    ref = fams["traditional"].brier_sum
    for d in fams.values():
        assert d.brier_sum == pytest.approx(ref, rel=1e-12, abs=1e-15)
    cc = fams["consistency_corrected"]
    assert 0.0 <= cc.gamma <= 1.0
    assert 0 <= cc.rel <= 1 and 0 <= cc.res <= 1 and 0 <= cc.unc <= 0.25


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 500), st.data())
def test_unc_prime_identity(n, data):
    y = data.draw(st.integers(0, n))
    counts = counts_of(np.full(n, 0.5), [1] * y + [0] * (n - y), 1)
    exact = Fraction(y * (n - y), n * n) * Fraction(n, n - 1)
    assert decompose_bias_corrected(counts).unc == float(exact)


def test_exact_identity_with_constant_bins(rng):
    scheme = BinningScheme.equal_width(6)
    for _ in range(100):
        s = random_series(rng, int(rng.integers(1, 300)), constant_within_bins=True, scheme=scheme)
        d = decompose_traditional(summarize(s, scheme))
        assert abs(d.brier_sum - empirical_brier(s)[0]) <= 1e-12

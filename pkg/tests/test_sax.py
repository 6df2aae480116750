import math
import statistics

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmu_bop.sax import (
    SaxParams,
    breakpoints,
    index_to_word,
    paa,
    sax_indices,
    sax_words,
    symbolize,
    word_to_index,
    znormalize,
)


def brute_paa(x, gamma):
    """Repeat every sample gamma times, then average gamma equal chunks of len(x) samples."""
    up = np.repeat(np.asarray(x, dtype=float), gamma)
    return up.reshape(gamma, len(x)).mean(axis=1)


def normal_cdf(x):
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def loop_symbolize(values, alpha):
    cuts = breakpoints(alpha)
    out = ""
    for v in values:
        k = 0
        while k < len(cuts) and v >= cuts[k]:
            k += 1
        out += "abcdefghijklmnopqrstuvwxyz"[k]
    return out


# -- znormalize ------------------------------------------------------------


def test_znormalize_three_points():
    z = znormalize([1, 2, 3])
    s = math.sqrt(1.5)
    np.testing.assert_allclose(z, [-s, 0.0, s], atol=1e-12)
    assert abs(statistics.fmean(z)) < 1e-9
    assert abs(statistics.pstdev(z) - 1.0) < 1e-9


def test_znormalize_two_points():
    np.testing.assert_allclose(znormalize([0, 1]), [-1.0, 1.0])


def test_znormalize_flat_window():
    assert znormalize([5, 5, 5, 5]).tolist() == [0.0, 0.0, 0.0, 0.0]


def test_znormalize_below_flat_threshold():
    x = 1.0 + 1e-10 * np.array([1, -1, 1, -1])
    assert not np.any(znormalize(x, flat_epsilon=1e-8))
    assert np.any(znormalize(x, flat_epsilon=1e-12))


def test_znormalize_rejects_nonfinite():
    with pytest.raises(ValueError):
        znormalize([1.0, np.nan, 2.0])


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 80))
def test_znormalize_moments(seed, n):
    x = np.random.default_rng(seed).normal(3.0, 2.0, n)
    z = znormalize(x)
    assert abs(z.mean()) < 1e-9
    assert abs(z.std() - 1.0) < 1e-9


# -- paa ---------------------------------------------------------------------


def test_paa_exact_halves():
    assert paa([1, 1, 2, 2], 2).tolist() == [1.0, 2.0]


def test_paa_fractional_segments():
    np.testing.assert_allclose(paa([0, 0, 0, 10, 10], 2), [0.0, 8.0], atol=1e-12)


def test_paa_identity():
    x = np.random.default_rng(0).normal(size=17)
    assert np.array_equal(paa(x, 17), x)


@pytest.mark.parametrize("gamma", [0, 6])
def test_paa_gamma_out_of_range(gamma):
    with pytest.raises(ValueError):
        paa([1, 2, 3, 4, 5], gamma)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 60), st.data())
def test_paa_matches_brute_force(seed, n, data):
    gamma = data.draw(st.integers(1, n))
    x = np.random.default_rng(seed).normal(size=n)
    np.testing.assert_allclose(paa(x, gamma), brute_paa(x, gamma), rtol=0, atol=1e-12)


# -- breakpoints ---------------------------------------------------------------


@pytest.mark.parametrize(
    "alpha, table",
    [(3, [-0.43, 0.43]), (4, [-0.67, 0.0, 0.67]), (5, [-0.84, -0.25, 0.25, 0.84])],
)
def test_breakpoints_lookup_table(alpha, table):
    assert np.round(breakpoints(alpha), 2).tolist() == pytest.approx(table, abs=1e-12)


def test_breakpoints_alpha_two():
    assert breakpoints(2).tolist() == [0.0]


@pytest.mark.parametrize("alpha", range(2, 27))
def test_breakpoints_are_quantiles(alpha):
    b = breakpoints(alpha)
    assert b.size == alpha - 1
    assert np.all(np.diff(b) > 0)
    for i, beta in enumerate(b, start=1):
        assert normal_cdf(beta) == pytest.approx(i / alpha, abs=1e-9)
    np.testing.assert_allclose(b, -b[::-1], atol=1e-9)


@pytest.mark.parametrize("alpha", [1, 27, 4.5])
def test_breakpoints_out_of_range(alpha):
    with pytest.raises(ValueError):
        breakpoints(alpha)


# -- symbolize -------------------------------------------------------------------


def test_symbolize_examples():
    assert symbolize([-1, 0, 1], 4) == "acd"
    assert symbolize([0] * 7, 4) == "c" * 7
    assert symbolize([0], 3) == "b"


def test_symbolize_tie_goes_up():
    b = breakpoints(5)
    assert symbolize(b, 5) == "bcde"


def test_symbolize_rejects_nonfinite():
    with pytest.raises(ValueError):
        symbolize([0.0, np.inf], 4)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=12), st.integers(2, 26))
def test_symbolize_matches_loop(values, alpha):
    assert symbolize(values, alpha) == loop_symbolize(values, alpha)


# -- words -----------------------------------------------------------------------


def test_word_index_roundtrip():
    assert word_to_index("aa", 3) == 0
    assert word_to_index("ac", 3) == 2
    assert word_to_index("ca", 3) == 6
    for i in range(4**3):
        assert word_to_index(index_to_word(i, 4, 3), 4) == i


def test_word_index_rejects_foreign_letter():
    with pytest.raises(ValueError):
        word_to_index("ad", 3)


def test_sax_words_count_long_series():
    x = np.random.default_rng(1).normal(size=110)
    words = sax_words(x, SaxParams(alpha=3, gamma=2, omega=60))
    assert len(words) == 51
    assert all(len(w) == 2 and set(w) <= set("abc") for w in words)


def test_sax_words_single_window():
    x = np.arange(25.0)
    assert len(sax_words(x, SaxParams(4, 4, 25))) == 1


def test_sax_words_constant_series():
    words = sax_words(np.full(45, 3.3), SaxParams(4, 4, 25))
    assert words == ["cccc"] * 21


def test_sax_words_window_too_long():
    with pytest.raises(ValueError):
        sax_words(np.zeros(10), SaxParams(4, 4, 11))


def test_sax_words_keeps_consecutive_duplicates():
    x = np.tile([0.0, 1.0], 30)
    words = sax_words(x, SaxParams(3, 2, 2))
    assert len(words) == 59


def test_sax_words_match_per_window_pipeline():
    rng = np.random.default_rng(7)
    x = rng.normal(size=45)
    p = SaxParams(5, 4, 25)
    expected = [
        loop_symbolize(brute_paa(znormalize(x[i : i + p.omega]), p.gamma), p.alpha)
        for i in range(45 - p.omega + 1)
    ]
    assert sax_words(x, p) == expected


def test_sax_indices_batched_equals_per_channel():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(6, 45))
    p = SaxParams(4, 4, 25)
    batched = sax_indices(x, p)
    for j in range(6):
        assert np.array_equal(batched[j], sax_indices(x[j], p))


@pytest.mark.parametrize(
    "kw", [dict(alpha=1), dict(alpha=27), dict(gamma=0), dict(gamma=26, omega=25), dict(omega=1, gamma=1)]
)
def test_sax_params_validation(kw):
    with pytest.raises(ValueError):
        SaxParams(**kw)

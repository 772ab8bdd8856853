import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adaptea.analysis import (
    bernstein_bound,
    exact_jump_distribution,
    local_probabilities,
    rate_lower,
    rate_thresholds,
    rate_upper,
    tail_bound_check,
    threshold_L,
    threshold_U,
)
from oracles import mask_increase_tail, mask_jump_distribution, total_variation


def test_two_bit_example():
    assert exact_jump_distribution(2, 1, 1).as_dict() == pytest.approx({-1: 0.25, 0: 0.5, 1: 0.25})


def test_twelve_bit_example_matches_enumeration():
    dist = exact_jump_distribution(12, 5, 3)
    assert total_variation(dist.as_dict(), mask_jump_distribution(12, 5, 3)) < 1e-12


@pytest.mark.parametrize("n", range(1, 11))
def test_quarter_rate_matches_enumeration(n):
    for k in range(n + 1):
        dist = exact_jump_distribution(n, k, n / 4)
        assert total_variation(dist.as_dict(), mask_jump_distribution(n, k, Fraction(n, 4))) < 1e-12


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 400), data=st.data())
def test_distribution_is_normalised(n, data):
    k = data.draw(st.integers(0, n))
    r = data.draw(st.floats(0, n))
    dist = exact_jump_distribution(n, k, r)
    assert np.all(dist.probs >= 0)
    assert math.fsum(dist.probs.tolist()) == pytest.approx(1, abs=1e-12)
    assert dist.deltas[0] == -(n - k) and dist.deltas[-1] == k
    assert dist.mean() == pytest.approx(k * r / n - (n - k) * r / n, abs=1e-9)


@pytest.mark.parametrize("args", [(5, -1, 1), (5, 6, 1), (5, 2, -1), (5, 2, 6), (0, 0, 0)])
def test_invalid_state_rejected(args):
    with pytest.raises(ValueError):
        exact_jump_distribution(*args)


def test_local_probabilities_examples():
    assert local_probabilities(4, 2, 1)[2] == 0.5625
    p_minus, p_zero, _ = local_probabilities(2, 1, 1)
    assert p_minus == pytest.approx(0.25) and p_zero == pytest.approx(0.5)
    assert local_probabilities(7, 7, 2)[2] == 1.0


def test_local_probabilities_against_enumeration():
    n, k, r = 4, 2, 1
    oracle = mask_jump_distribution(n, k, r)
    p_minus, p_zero, p_prime = local_probabilities(n, k, r)
    assert p_minus == pytest.approx(float(sum(w for d, w in oracle.items() if d > 0)), abs=1e-15)
    assert p_zero == pytest.approx(float(oracle[0]), abs=1e-15)
    # p' = P(no one-bit flipped), counted over masks that touch only the zero bits
    p = Fraction(r, n)
    no_bad = sum(Fraction(math.comb(k, g)) * p**g * (1 - p) ** (n - g) for g in range(k + 1))
    assert p_prime == pytest.approx(float(no_bad), abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(2, 300), data=st.data())
def test_local_probability_identities(n, data):
    k = data.draw(st.integers(1, n))
    r = data.draw(st.floats(0.01, n))
    dist = exact_jump_distribution(n, k, r)
    p_minus, p_zero, p_prime = local_probabilities(n, k, r)
    worse = math.fsum(dist.probs[: n - k].tolist())
    assert p_minus + p_zero + worse == pytest.approx(1, abs=1e-12)
    p = r / n
    marginal = math.fsum(math.comb(k, g) * p**g * (1 - p) ** (k - g) for g in range(k + 1)) * (1 - p) ** (n - k)
    assert p_prime == pytest.approx(marginal, abs=1e-12)


def test_local_probabilities_preconditions():
    with pytest.raises(ValueError):
        local_probabilities(5, 0, 1)
    with pytest.raises(ValueError):
        local_probabilities(5, 2, 0)


def test_threshold_examples():
    n, F = 10_000, 32
    # en/k = e**2 at k = n/e
    assert threshold_L(n, F, n / math.e) == pytest.approx(1 / (2 * F), rel=1e-12)
    with pytest.raises(ValueError):
        threshold_U(n, n / 2)
    n, lam, k = 100_000, 1000, 0.35 * 100_000
    assert threshold_U(n, k) == pytest.approx(1.65 / (22 * 0.09), rel=1e-12)
    assert rate_upper(n, lam, 32, k) == pytest.approx(10 / 9 * 1.65 / (22 * 0.09) * math.log(lam), rel=1e-12)
    assert rate_upper(n, lam, 32, k) / math.log(lam) == pytest.approx(0.926, abs=1e-3)


def test_rate_upper_pieces():
    n, lam = 10_000, 500
    k = 0.4 * n
    assert rate_upper(n, lam, 2, k) == pytest.approx(n * n * math.log(lam) / (12 * (n - 2 * k) ** 2))
    with pytest.raises(ValueError):
        rate_upper(n, lam, 2, n / math.log(lam) - 1)


def test_rate_lower_pieces():
    n, lam, F = 10_000, 500, 2.0
    k = 0.3 * n
    assert rate_lower(n, lam, F, k) == pytest.approx(threshold_L(n, F, k) * math.log(lam) / 2)
    assert rate_lower(n, lam, F, 100) == F  # n/lam < k < n/ln(lam)
    with pytest.raises(ValueError):
        rate_lower(n, lam, F, 10)


def test_thresholds_monotone_on_domain():
    n, F = 10_000, 32
    ks = np.linspace(1, n / 2 - 1, 400)
    L = [threshold_L(n, F, k) for k in ks]
    U = [threshold_U(n, k) for k in ks]
    assert all(a < b for a, b in zip(L, L[1:]))
    assert all(a < b for a, b in zip(U, U[1:]))


def test_rate_thresholds_marks_out_of_domain_entries():
    t = rate_thresholds(10_000, 500, 2.0, 20)
    assert t.L is not None and t.U is not None
    assert t.r_l is None and t.r_u is None


def test_bernstein_zero_gap_is_vacuous():
    assert bernstein_bound(100, 10, 0) == 1.0
    assert tail_bound_check(30, 10, 3, 0).holds


def test_tail_against_enumeration():
    t = tail_bound_check(12, 5, 3, 4)
    mean = Fraction(12 - 10) * 3 / 12
    oracle = mask_increase_tail(12, 5, 3, math.ceil(mean + 4))
    assert t.exact == pytest.approx(float(oracle), abs=1e-15)
    assert t.holds


def test_tail_lower_side_against_enumeration():
    t = tail_bound_check(12, 2, 3, 2, side="lower")
    mean = Fraction(12 - 4) * 3 / 12
    oracle = mask_increase_tail(12, 2, 3, math.floor(mean - 2), side="lower")
    assert t.exact == pytest.approx(float(oracle), abs=1e-15)
    assert t.holds


def test_tail_larger_instance():
    t = tail_bound_check(100, 40, 10, 15)
    assert 0 < t.exact <= t.bound


def test_tail_rejects_large_rate():
    with pytest.raises(ValueError):
        tail_bound_check(10, 3, 6, 1)
    with pytest.raises(ValueError):
        tail_bound_check(10, 3, 2, 1, side="middle")

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cubematch import bounds as B
from cubematch.cube import ball_size, entropy
from cubematch.errors import InvalidInputError

mp.mp.dps = 40


def mp_diffusion_bound(n, N, eps):
    s = mp.fsum(mp.binomial(n, i) * mp.mpf(1 - 2 * mp.mpf(eps)) ** (2 * i) / i for i in range(1, n + 1))
    return mp.sqrt(n) / (2 * mp.sqrt(N)) * mp.sqrt(s) + mp.mpf(eps) * n


def mp_chernoff(p, d, N):
    p, d = mp.mpf(p), mp.mpf(d)
    return mp.exp(N * (mp.log(1 + p * d) - mp.log(1 + d) * (p + p * d)))


def test_diffusion_bound_examples():
    assert B.lemma21_bound(2, 4, 0.0) == pytest.approx(0.5590169943749474, rel=1e-13)
    assert B.lemma21_bound(2, 4, 0.0) == pytest.approx(float(mp_diffusion_bound(2, 4, 0)), rel=1e-13)
    for n in (1, 5, 40):
        assert B.lemma21_bound(n, 100, 0.5) == n / 2
        assert B.lemma21_bound(n, 100, 0.5) >= B.lemma21_min(n, 100)[0]


@pytest.mark.parametrize("n,N,eps", [(3, 7, 0.1), (10, 1000, 0.25), (30, 10**6, 0.02), (100, 10**4, 0.37)])
def test_diffusion_bound_against_high_precision(n, N, eps):
    assert B.lemma21_bound(n, N, eps) == pytest.approx(float(mp_diffusion_bound(n, N, eps)), rel=1e-11)


def test_quadratic_bound_examples():
    for n in (3, 10, 50):
        assert B.lemma41_bound(n, n * n) == pytest.approx(n / 2 + 1, rel=1e-14)
    x = (math.log(1e4) - 2 * math.log(10)) / 10
    eps = (1 - mp.sqrt(mp.exp(mp.mpf(x)) - 1)) / 2
    assert B.lemma41_bound(10, 10**4) == pytest.approx(float(eps * 10 + 1), rel=1e-12)
    assert B.lemma41_bound(10, 10**9) == 1.0


@pytest.mark.parametrize("n,N", [(10, 10**4), (20, 10**6), (50, 10**5), (100, 10**6), (200, 10**7), (30, 2000)])
def test_quadratic_bound_consistent_with_diffusion_bound(n, N):
    eps = B.lemma41_epsilon(n, N)
    # at this epsilon the exponent in the proof's chain vanishes exactly
    exponent = math.log(n) - 0.5 * math.log(N) + n / 2 * math.log(1 + (1 - 2 * eps) ** 2)
    assert abs(exponent) <= 1e-6
    assert B.lemma21_bound(n, N, eps) <= B.lemma41_bound(n, N) + 1e-9


def test_closed_form_quadratic_examples():
    assert B.corollary42_bound(100, alpha=2) == 51
    assert B.corollary42_bound(100, c=math.e) == pytest.approx(46, abs=1e-12)
    with pytest.raises(InvalidInputError):
        B.corollary42_bound(10)


@pytest.mark.parametrize("n", [3, 5, 10, 40, 200])
@pytest.mark.parametrize("alpha", [2.0, 2.5, 3.0, 4.0])
def test_closed_form_quadratic_dominates(n, alpha):
    N = n**alpha
    assert B.corollary42_bound(n, alpha=alpha) >= B.lemma41_bound(n, N) - 1e-9


def _radius_by_grid(n, N):
    ok = [r for r in range(n // 2 + 1) if math.log(N) + n * entropy(r / n) - n * math.log(2) <= -math.log(n)]
    return max(ok) if ok else 0


def test_lower_bound_radius_examples():
    assert B.lower_bound_radius(10, 100) == 0
    for r in range(6):
        assert (entropy(r / 10) <= math.log(2) - 3 * math.log(10) / 10) == (r == 0)
    assert B.lower_bound_radius(12, 12 * 2**12) == 0
    for n, N in [(30, 900), (100, 10**4), (200, 10**5), (64, 7)]:
        assert B.lower_bound_radius(n, N) == _radius_by_grid(n, N)


@pytest.mark.parametrize("alpha", [2.0, 3.0])
def test_lower_bound_radius_closed_form(alpha):
    for n in (200, 1000, 5000):
        r = B.lower_bound_radius(n, round(n**alpha))
        # the radius is an integer, so compare against the floor of the real-valued form
        assert r >= math.floor(n / 2 - math.sqrt((alpha + 1) / 2 * n * math.log(n)))


def test_lower_bound_radius_monotone():
    for n in range(2, 40):
        rs = [B.lower_bound_radius(n, N) for N in range(1, 3000, 7)]
        assert all(b <= a for a, b in zip(rs, rs[1:]))
    for alpha in (2.0, 2.5, 3.0, 4.0):
        rs = [B.lower_bound_radius(n, max(1, round(n**alpha))) for n in range(2, 200)]
        assert all(b >= a for a, b in zip(rs, rs[1:]))


def test_chernoff_examples():
    assert B.chernoff_bound(0.1, 1.0, 10) == pytest.approx(float(mp_chernoff(0.1, 1, 10)), rel=1e-13)
    assert B.chernoff_bound(0.1, 1.0, 10) == pytest.approx(0.6484356, abs=1e-7)
    assert B.chernoff_bound(0.3, 1e-12, 50) == pytest.approx(1.0, abs=1e-9)
    vals = [B.chernoff_bound(0.2, 0.5, N) for N in (1, 10, 100, 1000)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_chernoff_at_most_one_on_grid():
    for p in (1e-9, 1e-4, 0.01, 0.3, 0.7, 0.99):
        for d in (1e-4, 0.01, 0.1, 1, 10):
            for N in (1, 10, 1000, 10**6):
                assert B.chernoff_bound(p, d, N) <= 1.0


@pytest.mark.parametrize("p,d,N", [(0.1, 1.0, 10), (0.3, 0.5, 40), (0.05, 2.0, 100), (0.5, 0.2, 200)])
def test_chernoff_dominates_exact_binomial_tail(p, d, N):
    k0 = math.ceil(N * p * (1 + d))
    tail = mp.fsum(mp.binomial(N, k) * mp.mpf(p) ** k * (1 - mp.mpf(p)) ** (N - k) for k in range(k0, N + 1))
    assert float(tail) <= B.chernoff_bound(p, d, N)


def test_ball_diffusion_bound_examples():
    N = round(math.exp(3))
    p = mp.mpf(ball_size(10, 3)) / 2**10
    expect = 10 * 2**10 * mp_chernoff(p, 0.1, N) + 0.1 * 10 + 3
    assert B.lemma51_bound(10, N, 3, 0.1) == pytest.approx(float(expect), rel=1e-12)
    assert B.lemma51_bound(10, 10**9, 3, 0.1) == pytest.approx(4.0, abs=1e-12)
    for n, N in [(10, 20), (20, 5000), (30, 10**6)]:
        assert B.lemma51_min(n, N)[0] <= B.lemma51_bound(n, N, n // 2, 1 / n)


def test_ball_criterion_matches_first_term():
    n, N, r = 12, 3000, 3
    assert B.ball_criterion(n, N, r) == pytest.approx(B.lemma51_bound(n, N, r, 1 / n) - 1 - r, rel=1e-12)


def test_rstar_examples():
    assert B.rstar(1e-12) == pytest.approx(0.5, abs=1e-5)
    assert B.rstar(math.log(2) - 1e-15) == pytest.approx(0.0, abs=1e-10)
    r = B.rstar(0.3)
    assert entropy(r) == pytest.approx(math.log(2) - 0.3, abs=1e-11)
    assert 0 < r < 0.5
    assert r == pytest.approx(float(mp.findroot(lambda x: -x * mp.log(x) - (1 - x) * mp.log(1 - x) - (mp.log(2) - 0.3),
                                                (mp.mpf("0.01"), mp.mpf("0.49")), solver="bisect")), abs=1e-11)
    with pytest.raises(InvalidInputError):
        B.rstar(0.7)


def test_large_N_bound_examples():
    assert B.lemma31_bound(2, 1.0) == pytest.approx(math.sqrt(2) / 4 * math.sqrt(2.5), rel=1e-13)
    for n in (10, 20, 30):
        exact = mp.mpf(n) / 2**n * mp.fsum(mp.binomial(n, i) / i for i in range(1, n + 1))
        assert B.lemma31_product(n) == pytest.approx(float(exact), rel=1e-12)


def test_large_N_product_approaches_two():
    # the 5% window is met from n = 25 on; n = 20 sits at about 6%
    assert abs(B.lemma31_product(20) / 2 - 1) < 0.07
    for n in (25, 30):
        assert abs(B.lemma31_product(n) / 2 - 1) < 0.05
    assert 1.9 <= B.lemma31_product(30) <= 2.1
    seq = [math.sqrt(1.0) * B.lemma31_bound(n, 1.0) for n in range(10, 31)]
    assert all(b < a for a, b in zip(seq, seq[1:]))
    assert seq[-1] > math.sqrt(2) / 2


def test_variance_and_concentration_examples():
    assert B.variance_bound(1, 1) == 0.25
    assert B.variance_bound(4, 100) == pytest.approx(0.025)
    assert B.variance_bound(7, 20) == pytest.approx(2 * B.variance_bound(7, 40))
    assert B.concentration_bound(4, 64, 0) == 2
    assert B.concentration_bound(4, 64, 1) == pytest.approx(2 * math.exp(-1))


def test_second_moment_by_enumeration():
    for n in range(1, 9):
        d = [bin(x).count("1") for x in range(1 << n)]
        assert B.second_moment_distance(n) == pytest.approx(np.mean(np.square(d)))


def test_envelope_examples():
    rep = B.theorem1_envelope(B.ExperimentParams(10, 1024))
    assert rep.regime == 4
    assert (rep.lower, rep.upper) == pytest.approx((math.exp(-1), 1 / math.sqrt(2)))
    rep = B.theorem1_envelope(B.ExperimentParams(10, 1024), diverging=True)
    assert rep.regime == 5
    assert (rep.lower, rep.upper) == pytest.approx((1 / math.sqrt(2 * math.pi), math.sqrt(2) / 2))
    rep = B.theorem1_envelope(B.ExperimentParams(100, 10**4))
    assert rep.regime == 2 and rep.params["alpha"] == pytest.approx(2.0)
    assert rep.upper == 50
    rep = B.theorem1_envelope(B.ExperimentParams(100, 10**20))
    assert rep.regime == 3
    rs = B.rstar(20 * math.log(10) / 100)
    assert rep.lower < rs * 100 < rep.upper
    assert rep.asymptotic


def test_regime3_guard():
    with pytest.raises(InvalidInputError):
        B.theorem1_envelope(B.ExperimentParams(20, 2**20), regime=3)
    assert B.theorem1_envelope(B.ExperimentParams(20, 2**20)).regime == 4


def test_regime_threshold_configurable():
    p = B.ExperimentParams(100, 10**4)
    assert B.classify_regime(p, lambda0=0.05) == 3
    assert B.classify_regime(p, lambda0=0.1) == 2


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 1024), st.integers(1, 10**12))
def test_evaluators_finite_up_to_1024(n, N):
    assert math.isfinite(B.lemma21_min(n, N)[0])
    assert math.isfinite(B.lower_bound_radius(n, N))
    assert math.isfinite(B.variance_bound(n, N))
    assert B.chernoff_bound(0.01, 1 / n, N) <= 1
    if N >= n * n:
        assert math.isfinite(B.lemma41_bound(n, N))
    assert not math.isnan(B.lemma51_min(n, N)[0])


def test_ball_diffusion_overflow_reported_as_infinity():
    # n 2^n times a Chernoff factor near 1 exceeds the double range at n = 1024
    assert B.lemma51_bound(1024, 10, 0, 1 / 1024) == math.inf


def test_all_bounds_rows():
    rows = B.all_bounds(10, 10**4, eps=0.2, r=3, delta=0.1, t_grid=[0.5])
    names = {r["formula"] for r in rows}
    assert {"diffusion_eps", "diffusion_quadratic", "lower_bound_radius", "ball_diffusion", "chernoff",
            "ball_criterion", "variance", "concentration", "envelope.regime4"} <= names
    assert all(set(r) == {"formula", "kind", "value", "params", "asymptotic"} for r in rows)
    assert all(r["asymptotic"] == r["formula"].startswith("envelope") for r in rows)


def test_validation():
    with pytest.raises(InvalidInputError):
        B.lemma21_bound(5, 10, 0.6)
    with pytest.raises(InvalidInputError):
        B.lemma41_bound(10, 50)
    with pytest.raises(InvalidInputError):
        B.variance_bound(0, 10)
    with pytest.raises(InvalidInputError):
        B.concentration_bound(3, 10, -1)

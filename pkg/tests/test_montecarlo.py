import math

import numpy as np
import pytest

from cubematch import bounds, montecarlo as mc
from cubematch.cube import DenseMeasure
from cubematch.errors import InvalidInputError, ResourceError


def test_splitmix64_reference_value():
    # first output of the reference splitmix64 generator started from state 0
    assert mc.splitmix64(0) == 0xE220A8397B1DCDAF
    assert mc.trial_seed(5, 3) == mc.splitmix64(mc.splitmix64(5) ^ 3)
    assert len({mc.trial_seed(0, i) for i in range(1000)}) == 1000


def test_single_sample_cases():
    e = mc.estimate_expected_w(1, 1, 40, seed=3)
    assert np.all(e.values == 0.5) and e.mean == 0.5 and e.stderr == 0
    e = mc.estimate_expected_w(2, 1, 40, seed=3)
    assert np.all(e.values == 1.0)


def test_estimate_fields():
    e = mc.estimate_expected_w(3, 5, 50, seed=11)
    assert e.trials == 50 and e.seed == 11
    assert e.stderr == pytest.approx(np.std(e.values, ddof=1) / math.sqrt(50))
    assert e.ci95 == pytest.approx((e.mean - 1.96 * e.stderr, e.mean + 1.96 * e.stderr))
    assert mc.estimate_expected_w(3, 5, 50, seed=11, keep_values=False).values is None


def test_determinism_across_threads():
    a = mc.w_to_uniform_values(6, 20, 40, seed=9, threads=1)
    b = mc.w_to_uniform_values(6, 20, 40, seed=9, threads=4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, mc.w_to_uniform_values(6, 20, 40, seed=10))


def test_regime4_envelope_n8():
    e = mc.estimate_expected_w(8, 2**8, 100, seed=0)
    lo, hi = bounds.theorem1_envelope(bounds.ExperimentParams(8, 2**8)).lower, 1 / math.sqrt(2)
    assert 0.75 * lo <= e.mean <= 1.25 * hi


@pytest.mark.parametrize("n,N", [(3, 4), (4, 16), (5, 40), (6, 64)])
def test_estimates_between_tv_and_upper_bound(n, N):
    e = mc.estimate_expected_w(n, N, 60, seed=2)
    tv = mc.tv_lower_values(n, N, 60, seed=2)
    assert np.all(tv <= e.values + 1e-12)
    assert e.mean - 3 * e.stderr <= min(bounds.lemma21_min(n, N)[0], n / 2 + 3 * e.stderr)


def test_few_trials_warn_and_too_few_fail():
    with pytest.warns(UserWarning):
        mc.estimate_expected_w(2, 3, 5)
    with pytest.raises(InvalidInputError):
        mc.estimate_expected_w(2, 3, 1)
    with pytest.raises(ResourceError):
        mc.estimate_expected_w(13, 3, 40)


def test_monotonicity_examples():
    rep = mc.monotonicity_test(3, [1, 2**3 * 16], 40, seed=1)
    assert rep.passed and rep.rows[0]["difference"] < -10 * rep.rows[0]["tolerance"]
    rep = mc.monotonicity_test(3, [6, 6], 40, seed=1)
    assert rep.rows[0]["difference"] == 0 and rep.passed
    with pytest.raises(InvalidInputError):
        mc.monotonicity_test(3, [8, 4], 40)


def test_best_guess_examples():
    rep = mc.best_guess_test(3, 6, [DenseMeasure.uniform(3)], 40, seed=4)
    assert rep.rows[0]["mean_difference"] == 0 and rep.passed
    rep = mc.best_guess_test(3, 6, [DenseMeasure.dirac_bits(3, 0)], 40, seed=4)
    r = rep.rows[0]
    assert rep.passed and r["mean_difference"] > 10 * r["paired_stderr"]


def test_variance_examples():
    rep = mc.variance_test(1, 1, 100, seed=0)
    assert rep.rows[0]["sample_variance"] == 0 and rep.passed
    with pytest.raises(InvalidInputError):
        mc.variance_test(3, 4, 50)
    assert bounds.variance_bound(4, 32) <= bounds.variance_bound(4, 16)


def test_concentration_examples():
    rep = mc.concentration_test(3, 8, 500, [0.0, 3.5], seed=0)
    zero, big = rep.rows
    assert zero["bound"] == 2 and zero["passed"]
    assert big["upper_tail"] == 0 and big["lower_tail"] == 0
    with pytest.raises(InvalidInputError):
        mc.concentration_test(3, 8, 100, [1.0])


def test_coefficient_examples():
    rep = mc.coefficient_variance_test(3, 1, 200, seed=0)
    assert rep.passed and all(r["mean"] == 1.0 and r["stderr"] == 0 for r in rep.rows)
    x = np.random.default_rng(0).integers(0, 8, size=10)
    assert mc.empirical_coefficients(3, x)[0] == 1.0
    with pytest.raises(InvalidInputError):
        mc.coefficient_variance_test(5, 10, 100)


def test_empirical_coefficients_direct():
    x = np.array([0, 3, 3, 5, 7])
    coef = mc.empirical_coefficients(3, x)
    for S in range(8):
        direct = np.mean([(-1) ** bin(S & v).count("1") for v in x])
        assert coef[S] == pytest.approx(direct, abs=1e-15)


def test_reports_record_thresholds():
    rep = mc.variance_test(2, 4, 100, seed=0)
    assert rep.thresholds and rep.summary().startswith("variance:")

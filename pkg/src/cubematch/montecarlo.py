"""Seeded Monte Carlo experiments on W(mu_N, mu) and the inequalities around it.

Trial i of a run with master seed s draws from its own generator seeded by
splitmix64(s, i), so results do not depend on execution order or on how
trials are spread over threads.
"""

from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import bounds
from .cube import DenseMeasure, EmpiricalMeasure, Measure
from .errors import InvalidInputError, ResourceError
from .fourier import fwht
from .transport import DEFAULT_EXACT_CAP, total_variation_exact, wasserstein_value

log = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
PAIRED_SIGMAS = 3.0
TAIL_SIGMAS = 5.0
COEF_SIGMAS = 5.0
Z95 = 1.96


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def trial_seed(seed: int, trial: int) -> int:
    """64-bit seed of one trial: splitmix64(splitmix64(seed) xor trial)."""
    return splitmix64(splitmix64(seed & MASK64) ^ (trial & MASK64))


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(trial_seed(seed, trial))


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float
    trials: int
    seed: int
    values: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def ci95(self) -> tuple[float, float]:
        return (self.mean - Z95 * self.stderr, self.mean + Z95 * self.stderr)

    @classmethod
    def from_values(cls, values, seed: int, keep: bool = True) -> "Estimate":
        v = np.asarray(values, dtype=np.float64)
        if v.size < 2:
            raise InvalidInputError("an estimate needs at least 2 trials")
        se = float(v.std(ddof=1) / math.sqrt(v.size))
        return cls(float(v.mean()), se, int(v.size), seed, v if keep else None)


def _check_trials(trials: int, minimum: int = 2):
    if trials < minimum:
        raise InvalidInputError(f"need at least {minimum} trials, got {trials}")
    if trials < 30:
        warnings.warn(f"{trials} trials: normal-approximation intervals are rough below 30", stacklevel=3)


def _check_cap(n: int, cap: int):
    if n > cap:
        raise ResourceError(f"n = {n} exceeds the exact-transport cap {cap}")


def sample_empirical(n: int, N: int, rng: np.random.Generator) -> EmpiricalMeasure:
    return EmpiricalMeasure.from_bits(n, rng.integers(0, 1 << n, size=N, dtype=np.int64))


def run_trials(fn: Callable[[np.random.Generator], float], trials: int, seed: int,
               threads: int = 1) -> np.ndarray:
    """fn(trial_rng(seed, i)) for i < trials, gathered in trial order."""
    if threads <= 1:
        return np.array([fn(trial_rng(seed, i)) for i in range(trials)], dtype=np.float64)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return np.array(list(pool.map(lambda i: fn(trial_rng(seed, i)), range(trials))), dtype=np.float64)


def w_to_uniform_values(n: int, N: int, trials: int, seed: int, *, threads: int = 1,
                        cap: int = DEFAULT_EXACT_CAP, target: Measure | None = None) -> np.ndarray:
    _check_cap(n, cap)
    target = DenseMeasure.uniform(n) if target is None else target

    def one(rng):
        return float(wasserstein_value(sample_empirical(n, N, rng), target, max_dim=cap))

    return run_trials(one, trials, seed, threads)


def estimate_expected_w(n: int, N: int, trials: int, seed: int = 0, *, threads: int = 1,
                        cap: int = DEFAULT_EXACT_CAP, keep_values: bool = True) -> Estimate:
    """Monte Carlo estimate of E[W(mu_N, mu)] with exact per-trial transport."""
    _check_trials(trials)
    if N < 1:
        raise InvalidInputError(f"N must be >= 1, got {N}")
    vals = w_to_uniform_values(n, N, trials, seed, threads=threads, cap=cap)
    return Estimate.from_values(vals, seed, keep_values)


@dataclass
class CheckReport:
    name: str
    passed: bool
    thresholds: dict
    rows: list[dict] = field(default_factory=list)

    def summary(self) -> str:
        return f"{self.name}: {'PASS' if self.passed else 'FAIL'}"


def monotonicity_test(n: int, Ns: Sequence[int], trials: int, seed: int = 0, *,
                      threads: int = 1, cap: int = DEFAULT_EXACT_CAP) -> CheckReport:
    """E[W(mu_N, mu)] should not increase along an ascending list of N.

    Every N uses the same master seed (common random numbers across sizes).
    """
    Ns = list(Ns)
    if any(b < a for a, b in zip(Ns, Ns[1:])):
        raise InvalidInputError("N list must be ascending")
    ests = [estimate_expected_w(n, N, trials, seed, threads=threads, cap=cap) for N in Ns]
    rows, ok = [], True
    for (N0, e0), (N1, e1) in zip(zip(Ns, ests), zip(Ns[1:], ests[1:])):
        diff = e1.mean - e0.mean
        tol = PAIRED_SIGMAS * math.hypot(e0.stderr, e1.stderr)
        good = diff <= tol
        ok &= good
        rows.append({"N_from": N0, "N_to": N1, "mean_from": e0.mean, "mean_to": e1.mean,
                     "difference": diff, "tolerance": tol, "passed": good})
    return CheckReport("monotonicity", ok, {"sigmas": PAIRED_SIGMAS}, rows)


def jittered_measure(n: int, rng: np.random.Generator, magnitude: float = 0.5) -> DenseMeasure:
    """Uniform table perturbed multiplicatively by (1 + magnitude * U[0,1)), renormalized."""
    w = 1.0 + magnitude * rng.random(1 << n)
    return DenseMeasure(n, w / w.sum())


def best_guess_test(n: int, N: int, alternatives: int | Sequence[Measure], trials: int, seed: int = 0, *,
                    magnitude: float = 0.5, threads: int = 1, cap: int = 6) -> CheckReport:
    """Paired comparison of E[W(mu_N, mu)] against E[W(mu_N, v)] for other targets v.

    `alternatives` is either a count of jittered tables (drawn from a
    generator derived from the seed) or an explicit list of measures.
    """
    _check_cap(n, cap)
    _check_trials(trials)
    if isinstance(alternatives, int):
        alt_rng = np.random.default_rng(splitmix64(seed ^ 0xA17E))
        targets = [jittered_measure(n, alt_rng, magnitude) for _ in range(alternatives)]
    else:
        targets = list(alternatives)
    uniform = DenseMeasure.uniform(n)

    def one(rng):
        emp = sample_empirical(n, N, rng)
        base = float(wasserstein_value(emp, uniform, max_dim=cap))
        return [base] + [float(wasserstein_value(emp, t, max_dim=cap)) for t in targets]

    if threads <= 1:
        table = np.array([one(trial_rng(seed, i)) for i in range(trials)])
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            table = np.array(list(pool.map(lambda i: one(trial_rng(seed, i)), range(trials))))
    base = table[:, 0]
    rows, ok = [], True
    for k in range(len(targets)):
        diff = table[:, k + 1] - base
        se = float(diff.std(ddof=1) / math.sqrt(trials))
        good = float(diff.mean()) >= -PAIRED_SIGMAS * se
        ok &= good
        rows.append({"alternative": k, "mean_uniform": float(base.mean()), "mean_alternative": float(table[:, k + 1].mean()),
                     "mean_difference": float(diff.mean()), "paired_stderr": se, "passed": good})
    return CheckReport("best_guess", ok, {"sigmas": PAIRED_SIGMAS, "jitter": magnitude}, rows)


def variance_test(n: int, N: int, trials: int, seed: int = 0, *, threads: int = 1,
                  cap: int = DEFAULT_EXACT_CAP) -> CheckReport:
    if trials < 100:
        raise InvalidInputError(f"variance test needs >= 100 trials, got {trials}")
    vals = w_to_uniform_values(n, N, trials, seed, threads=threads, cap=cap)
    var = float(vals.var(ddof=1))
    bound = bounds.variance_bound(n, N)
    limit = bound * (1.0 + 5.0 / math.sqrt(trials))
    row = {"n": n, "N": N, "sample_variance": var, "bound": bound, "limit": limit, "passed": var <= limit}
    return CheckReport("variance", var <= limit, {"slack": "1 + 5/sqrt(trials)"}, [row])


def concentration_test(n: int, N: int, trials: int, t_grid: Sequence[float], seed: int = 0, *,
                       threads: int = 1, cap: int = DEFAULT_EXACT_CAP) -> CheckReport:
    """Two-sided tails around the empirical median against 2 exp(-t^2 N / 4n^2)."""
    if trials < 500:
        raise InvalidInputError(f"concentration test needs >= 500 trials, got {trials}")
    vals = w_to_uniform_values(n, N, trials, seed, threads=threads, cap=cap)
    med = float(np.median(vals))
    rows, ok = [], True
    for t in t_grid:
        bound = bounds.concentration_bound(n, N, t)
        p0 = min(bound, 1.0)
        limit = bound + TAIL_SIGMAS * math.sqrt(p0 * (1.0 - p0) / trials)
        upper = float(np.mean(vals - med >= t))
        lower = float(np.mean(vals - med <= -t))
        good = upper <= limit and lower <= limit
        ok &= good
        rows.append({"t": t, "median": med, "upper_tail": upper, "lower_tail": lower,
                     "bound": bound, "limit": limit, "passed": good})
    return CheckReport("concentration", ok, {"sigmas": TAIL_SIGMAS}, rows)


def empirical_coefficients(n: int, samples: np.ndarray) -> np.ndarray:
    """Fourier coefficients (1/N) sum_i chi_S(X_i) of one sample, all S."""
    counts = np.bincount(samples, minlength=1 << n).astype(np.float64)
    return fwht(counts) / samples.size


def coefficient_variance_test(n: int, N: int, trials: int, seed: int = 0) -> CheckReport:
    """Mean of squared empirical coefficients against 1/N for every nonempty S."""
    if n > 4:
        raise InvalidInputError(f"coefficient test is limited to n <= 4, got {n}")
    _check_trials(trials)
    sq = np.empty((trials, 1 << n))
    for i in range(trials):
        x = trial_rng(seed, i).integers(0, 1 << n, size=N, dtype=np.int64)
        sq[i] = empirical_coefficients(n, x) ** 2
    mean = sq.mean(axis=0)
    se = sq.std(axis=0, ddof=1) / math.sqrt(trials)
    target = 1.0 / N
    rows, ok = [], True
    for S in range(1 << n):
        if S == 0:
            good = bool(np.all(sq[:, 0] == 1.0))
            rows.append({"S": 0, "mean": float(mean[0]), "stderr": float(se[0]), "target": 1.0, "passed": good})
        else:
            good = abs(mean[S] - target) <= COEF_SIGMAS * se[S] or (se[S] == 0 and mean[S] == target)
            rows.append({"S": S, "mean": float(mean[S]), "stderr": float(se[S]), "target": target, "passed": bool(good)})
        ok &= bool(good)
    return CheckReport("coefficient_variance", ok, {"sigmas": COEF_SIGMAS}, rows)


def tv_lower_values(n: int, N: int, trials: int, seed: int = 0) -> np.ndarray:
    """Exact TV(mu_N, mu) on the same draws as the W estimates."""
    u = DenseMeasure.uniform(n)
    return np.array([float(total_variation_exact(sample_empirical(n, N, trial_rng(seed, i)), u))
                     for i in range(trials)])

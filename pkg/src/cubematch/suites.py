"""Quick invariant suites behind `cubematch verify`."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import bounds, fourier, montecarlo
from .cube import DenseMeasure, EmpiricalMeasure, ball_size, entropy, entropy_inverse
from .transport import total_variation_exact, verify_plan, wasserstein_exact, wasserstein_ssp

SUITES = ("fourier", "transport", "bounds", "montecarlo", "all")


@dataclass
class Check:
    suite: str
    name: str
    passed: bool
    detail: str = ""

    def __post_init__(self):
        self.passed = bool(self.passed)


def _random_measure(n, rng):
    if rng.random() < 0.5:
        return EmpiricalMeasure.from_bits(n, rng.integers(0, 1 << n, size=int(rng.integers(1, 65))))
    w = rng.random(1 << n) * (rng.random(1 << n) < 0.7)
    w[rng.integers(0, 1 << n)] += 1.0
    return DenseMeasure(n, w / w.sum())


def fourier_suite(n_max: int, seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []
    worst = {"roundtrip": 0.0, "parseval": 0.0, "diffusion": 0.0, "self_adjoint": 0.0}
    for n in range(1, n_max + 1):
        f = fourier.CubeFunction(n, rng.normal(size=1 << n))
        s = fourier.wht(f)
        worst["roundtrip"] = max(worst["roundtrip"], float(np.max(np.abs(fourier.inverse_wht(s).values - f.values))))
        worst["parseval"] = max(worst["parseval"], abs(float(np.sum(s.coef**2) - np.mean(f.values**2))))
        v = DenseMeasure(n, (w := rng.random(1 << n)) / w.sum())
        eps = float(rng.uniform(0, 0.5))
        spec = fourier.diffuse_epsilon(v, eps).mass
        worst["diffusion"] = max(worst["diffusion"], float(np.max(np.abs(spec - fourier.diffuse_epsilon_direct(v, eps).mass))))
        lhs = fourier.expectation(fourier.diffuse_epsilon(v, eps), f)
        rhs = float(np.dot(v.mass, fourier.flip_kernel(n, eps) @ f.values))
        worst["self_adjoint"] = max(worst["self_adjoint"], abs(lhs - rhs))
    tols = {"roundtrip": 1e-12, "parseval": 1e-10, "diffusion": 1e-10, "self_adjoint": 1e-10}
    for k, v in worst.items():
        out.append(Check("fourier", k, v <= tols[k], f"max error {v:.2e} (tol {tols[k]:g})"))
    return out


def transport_suite(n_max: int, seed: int = 0, instances: int = 40) -> list[Check]:
    rng = np.random.default_rng(seed)
    agree = certified = sandwich = True
    detail = ""
    for k in range(instances):
        n = 1 + k % n_max
        a, b = _random_measure(n, rng), _random_measure(n, rng)
        sol = wasserstein_exact(a, b)
        if n <= 5 and sol.exact_value != wasserstein_ssp(a, b):
            agree = False
            detail = f"solver disagreement at n={n}"
        rep = verify_plan(sol, a, b)
        certified &= rep.passed
        tv = total_variation_exact(a, b)
        sandwich &= tv <= sol.exact_value <= n * tv
    forced = all(
        wasserstein_exact(DenseMeasure.dirac_bits(n, x), DenseMeasure.uniform(n)).exact_value * 2 == n
        for n in range(1, min(n_max, 6) + 1) for x in range(1 << n)
    )
    return [
        Check("transport", "simplex_vs_ssp", agree, detail),
        Check("transport", "certificates", certified),
        Check("transport", "tv_sandwich", sandwich),
        Check("transport", "forced_coupling", forced),
    ]


def bounds_suite(n_max: int = 30) -> list[Check]:
    sandwich = True
    for n in range(1, n_max + 1):
        for r in range(n // 2 + 1):
            hi = n * entropy(r / n)
            lo = hi - 0.5 * math.log(2 * n)
            lb = math.log(ball_size(n, r))
            sandwich &= lo <= lb + 1e-12 and lb <= hi + 1e-12
    grid = np.linspace(0, 0.5, 1000)
    roundtrip = max(abs(entropy_inverse(entropy(float(x))) - x) for x in grid)
    chern = all(bounds.chernoff_bound(p, d, N) <= 1.0
                for p in (1e-6, 0.01, 0.3, 0.9) for d in (1e-3, 0.1, 1, 10) for N in (1, 10, 1000))
    finite = all(math.isfinite(bounds.lemma21_min(n, N)[0]) for n in (10, 100, 1024) for N in (n * n, 10**6))
    return [
        Check("bounds", "ball_sandwich", sandwich),
        Check("bounds", "entropy_dominance", bounds.entropy_grid_gap() <= 1e-15),
        Check("bounds", "entropy_inverse_roundtrip", roundtrip <= 1e-10, f"max error {roundtrip:.2e}"),
        Check("bounds", "chernoff_le_1", chern),
        Check("bounds", "diffusion_bound_finite", finite),
        Check("bounds", "large_N_limit", 1.9 <= bounds.lemma31_product(30) <= 2.1),
    ]


def montecarlo_suite(n_max: int, seed: int = 0) -> list[Check]:
    n = min(n_max, 4)
    out = []
    coef = montecarlo.coefficient_variance_test(min(n, 3), 10, 2000, seed)
    out.append(Check("montecarlo", "coefficient_variance", coef.passed))
    var = montecarlo.variance_test(n, 16, 200, seed)
    out.append(Check("montecarlo", "variance", var.passed))
    mono = montecarlo.monotonicity_test(n, [4, 16, 64], 60, seed)
    out.append(Check("montecarlo", "monotonicity", mono.passed))
    est = montecarlo.estimate_expected_w(n, 2**n, 60, seed)
    ub = bounds.lemma21_min(n, 2**n)[0]
    out.append(Check("montecarlo", "diffusion_bound_consistency", est.mean - 3 * est.stderr <= ub,
                     f"mean {est.mean:.4f} vs bound {ub:.4f}"))
    return out


def run_suite(name: str, n_max: int, seed: int = 0) -> list[Check]:
    table: dict[str, Callable[[], list[Check]]] = {
        "fourier": lambda: fourier_suite(min(n_max, 8), seed),
        "transport": lambda: transport_suite(min(n_max, 8), seed),
        "bounds": lambda: bounds_suite(),
        "montecarlo": lambda: montecarlo_suite(n_max, seed),
    }
    if name == "all":
        return [c for key in ("fourier", "transport", "bounds", "montecarlo") for c in table[key]()]
    if name not in table:
        raise KeyError(name)
    return table[name]()

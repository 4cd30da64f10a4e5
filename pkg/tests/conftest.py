import numpy as np
import pytest

from cubematch.cube import DenseMeasure, EmpiricalMeasure


def random_measure(n, rng, dense_prob=0.5, max_N=64):
    """Either an empirical measure with N <= max_N or a sparse-ish dense table."""
    if rng.random() >= dense_prob:
        N = int(rng.integers(1, max_N + 1))
        return EmpiricalMeasure.from_bits(n, rng.integers(0, 1 << n, size=N))
    w = rng.random(1 << n) * (rng.random(1 << n) < 0.7)
    w[rng.integers(0, 1 << n)] += 1.0
    return DenseMeasure(n, w / w.sum())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE: list[tuple[int, bool, str]] = []


def record(criterion: int, passed: bool, detail: str) -> bool:
    """Log one acceptance line; printed in the terminal summary."""
    ACCEPTANCE.append((criterion, bool(passed), detail))
    print(f"{'PASS' if passed else 'FAIL'} criterion {criterion:2d}: {detail}")
    return bool(passed)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {k:2d}: {detail}")

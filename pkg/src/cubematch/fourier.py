"""Walsh-Hadamard analysis on the cube, the two diffusion operators, influences.

Functions are tables of 2^n values indexed by bitmask. Measures enter the
spectral side through their density against the uniform measure, so the
coefficient of a measure at S is E_v[chi_S] (and 1 at the empty set).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cube import CubePoint, DenseMeasure, EmpiricalMeasure, Measure, ball_offsets, dense_mass, popcount
from .errors import InvalidInputError

CLIP_TOL = 1e-12
ABORT_TOL = 1e-9


def _dim_of(length: int) -> int:
    n = int(length).bit_length() - 1
    if length < 2 or (1 << n) != length:
        raise InvalidInputError(f"table length {length} is not 2^n with n >= 1")
    return n


@dataclass(frozen=True)
class CubeFunction:
    n: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (1 << self.n,):
            raise InvalidInputError(f"function table must have length 2^{self.n}")
        if not np.all(np.isfinite(v)):
            raise InvalidInputError("function values must be finite")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_values(cls, values) -> "CubeFunction":
        v = np.asarray(values, dtype=np.float64)
        return cls(_dim_of(v.size), v)

    @classmethod
    def parity(cls, n: int, S: int) -> "CubeFunction":
        return cls(n, chi(n, S).astype(np.float64))

    @classmethod
    def distance_to(cls, n: int, x0) -> "CubeFunction":
        bits = x0.bits if isinstance(x0, CubePoint) else int(x0)
        return cls(n, popcount(np.arange(1 << n) ^ bits).astype(np.float64))


@dataclass(frozen=True)
class SpectralVector:
    n: int
    coef: np.ndarray = field(repr=False)

    def degree(self) -> np.ndarray:
        return popcount(np.arange(1 << self.n))


def chi(n: int, S: int) -> np.ndarray:
    """chi_S over all points, as +-1 integers."""
    return 1 - 2 * (popcount(np.arange(1 << n) & S) & 1)


def fwht(a: np.ndarray) -> np.ndarray:
    """Unnormalized fast Walsh-Hadamard transform, O(n 2^n).

    out[S] = sum_x a[x] (-1)^popcount(S & x). Applying it twice gives 2^n a.
    """
    a = np.array(a, dtype=np.float64)
    size = a.size
    h = 1
    while h < size:
        v = a.reshape(-1, 2, h)
        lo = v[:, 0, :].copy()
        v[:, 0, :] += v[:, 1, :]
        v[:, 1, :] = lo - v[:, 1, :]
        h *= 2
    return a


def wht(f: CubeFunction) -> SpectralVector:
    return SpectralVector(f.n, fwht(f.values) / (1 << f.n))


def inverse_wht(s: SpectralVector) -> CubeFunction:
    return CubeFunction(s.n, fwht(s.coef))


def measure_coefficients(v: Measure) -> SpectralVector:
    """E_v[chi_S] for every S."""
    if isinstance(v, EmpiricalMeasure):
        coef = np.zeros(1 << v.n)
        coef[v.points] = v.multiplicity
        coef = fwht(coef) / v.N
    elif isinstance(v, DenseMeasure):
        coef = fwht(v.mass)
    else:
        raise InvalidInputError(f"not a measure: {type(v).__name__}")
    coef[0] = 1.0
    return SpectralVector(v.n, coef)


def _as_probability(n: int, mass: np.ndarray) -> DenseMeasure:
    if mass.min() < -ABORT_TOL:
        raise ArithmeticError(f"diffusion produced mass {mass.min():.3e}")
    mass = np.where(mass < 0, 0.0, mass)
    total = mass.sum()
    if abs(total - 1.0) > ABORT_TOL:
        raise ArithmeticError(f"diffusion lost mass: total {total!r}")
    return DenseMeasure(n, mass / total)


def _check_eps(eps: float) -> None:
    if not 0.0 <= eps <= 0.5:
        raise InvalidInputError(f"epsilon {eps} outside [0, 1/2]")


def diffuse_epsilon(v: Measure, eps: float) -> DenseMeasure:
    """Flip each coordinate independently with probability eps (spectral route)."""
    _check_eps(eps)
    coef = measure_coefficients(v).coef
    deg = popcount(np.arange(1 << v.n))
    mass = fwht(coef * (1.0 - 2.0 * eps) ** deg) / (1 << v.n)
    return _as_probability(v.n, mass)


def flip_kernel(n: int, eps: float) -> np.ndarray:
    """K[x, x'] = (1-eps)^(n-d) eps^d; O(4^n) memory."""
    _check_eps(eps)
    pts = np.arange(1 << n)
    d = popcount(pts[:, None] ^ pts[None, :])
    return (1.0 - eps) ** (n - d) * eps**d


def diffuse_epsilon_direct(v: Measure, eps: float) -> DenseMeasure:
    """Direct O(4^n) convolution with the coordinate-flip kernel."""
    mass = flip_kernel(v.n, eps) @ dense_mass(v)
    return _as_probability(v.n, mass)


def diffuse_ball(v: Measure, r: int, *, allow_large_radius: bool = False) -> DenseMeasure:
    """Average the mass over Hamming balls of radius r."""
    n = v.n
    limit = n if allow_large_radius else n / 2
    if not (isinstance(r, (int, np.integer)) and 0 <= r <= limit):
        raise InvalidInputError(f"radius {r} outside [0, {limit}]")
    mass = dense_mass(v)
    pts = np.arange(1 << n)
    offsets = ball_offsets(n, int(r))
    out = np.zeros_like(mass)
    for z in offsets:
        out += mass[pts ^ z]
    return _as_probability(n, out / offsets.size)


def influence(f: CubeFunction) -> tuple[np.ndarray, float]:
    """Per-coordinate influences from the flip-difference definition, and their sum."""
    pts = np.arange(1 << f.n)
    per = np.empty(f.n)
    for i in range(f.n):
        plus = f.values[pts & ~(1 << i)]
        minus = f.values[pts | (1 << i)]
        per[i] = np.mean((plus - minus) ** 2) / 4.0
    return per, float(per.sum())


def spectral_influence(f: CubeFunction) -> float:
    s = wht(f)
    return float(np.sum(s.degree() * s.coef**2))


def lipschitz_check(f: CubeFunction) -> float:
    """max |f(x) - f(y)| - 1 over adjacent pairs; <= 0 iff f is 1-Lipschitz."""
    pts = np.arange(1 << f.n)
    worst = -np.inf
    for i in range(f.n):
        worst = max(worst, float(np.max(np.abs(f.values - f.values[pts ^ (1 << i)]))))
    return worst - 1.0


def expectation(v: Measure, f: CubeFunction) -> float:
    if isinstance(v, EmpiricalMeasure):
        return float(np.dot(v.multiplicity, f.values[v.points]) / v.N)
    return float(np.dot(v.mass, f.values))

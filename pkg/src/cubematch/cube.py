"""Points, measures and Hamming geometry on the Boolean cube {-1, 1}^n.

A point is stored as an n-bit integer. Bit i = 0 encodes x_i = +1 and bit
i = 1 encodes x_i = -1, so the parity chi_S(x) is (-1)^popcount(S & bits).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidInputError

MAX_DIM = 30
LOG2 = math.log(2.0)


def _check_dim(n: int) -> None:
    if not (isinstance(n, (int, np.integer)) and 1 <= n <= MAX_DIM):
        raise InvalidInputError(f"dimension must be an integer in [1, {MAX_DIM}], got {n!r}")


def popcount(a):
    """Population count for Python ints or integer numpy arrays."""
    if isinstance(a, np.ndarray):
        return np.bitwise_count(a.astype(np.uint64)).astype(np.int64)
    return int(a).bit_count()


@dataclass(frozen=True, order=True)
class CubePoint:
    bits: int
    n: int

    def __post_init__(self):
        _check_dim(self.n)
        if not 0 <= self.bits < (1 << self.n):
            raise InvalidInputError(f"bits {self.bits} out of range for n={self.n}")

    @classmethod
    def from_signs(cls, signs: Sequence[int]) -> "CubePoint":
        bits = 0
        for i, s in enumerate(signs):
            if s not in (1, -1):
                raise InvalidInputError(f"coordinate {i} is {s}, expected +1 or -1")
            if s == -1:
                bits |= 1 << i
        return cls(bits, len(signs))

    def signs(self) -> tuple[int, ...]:
        return tuple(-1 if (self.bits >> i) & 1 else 1 for i in range(self.n))

    def antipode(self) -> "CubePoint":
        return CubePoint(self.bits ^ ((1 << self.n) - 1), self.n)


def hamming(x: CubePoint, y: CubePoint) -> int:
    if x.n != y.n:
        raise InvalidInputError(f"dimension mismatch: {x.n} vs {y.n}")
    return (x.bits ^ y.bits).bit_count()


def distance_matrix(rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Pairwise Hamming distances between two arrays of bitmasks."""
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    return popcount(rows[:, None] ^ cols[None, :])


def ball_size(n: int, r: int) -> int:
    """Exact |B(x, r)| = sum_{i <= r} C(n, i).

    Works for any n >= 1 (the bound evaluators use it far beyond MAX_DIM).
    """
    if n < 1:
        raise InvalidInputError(f"n must be >= 1, got {n}")
    if not 0 <= r <= n:
        raise InvalidInputError(f"radius {r} outside [0, {n}]")
    return sum(math.comb(n, i) for i in range(r + 1))


def ball_offsets(n: int, r: int) -> np.ndarray:
    """Flip masks of weight <= r, ascending."""
    _check_dim(n)
    if not 0 <= r <= n:
        raise InvalidInputError(f"radius {r} outside [0, {n}]")
    masks = np.arange(1 << n, dtype=np.int64)
    return masks[popcount(masks) <= r]


def ball_points(x: CubePoint, r: int) -> list[CubePoint]:
    """Points within distance r of x, ordered by flip mask ascending."""
    if not 0 <= r <= x.n:
        raise InvalidInputError(f"radius {r} outside [0, {x.n}]")
    if r == x.n:
        masks = range(1 << x.n)
    else:
        masks = sorted(
            sum(1 << i for i in flips)
            for k in range(r + 1)
            for flips in combinations(range(x.n), k)
        )
    return [CubePoint(x.bits ^ m, x.n) for m in masks]


def entropy(x: float) -> float:
    """Natural-log binary entropy, with 0 log 0 = 0."""
    if not 0.0 <= x <= 1.0:
        raise InvalidInputError(f"entropy argument {x} outside [0, 1]")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log(x) - (1.0 - x) * math.log1p(-x)


def entropy_inverse(y: float, tol: float = 1e-12) -> float:
    """The x in [0, 1/2] with entropy(x) = y, found by bisection."""
    if not 0.0 <= y <= LOG2 + 1e-15:
        raise InvalidInputError(f"entropy value {y} outside [0, log 2]")
    if y >= LOG2:
        return 0.5
    if y <= 0.0:
        return 0.0
    lo, hi = 0.0, 0.5
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if entropy(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def log_binomial(n: int, i: int) -> float:
    if not 0 <= i <= n:
        raise InvalidInputError(f"binomial index ({n}, {i}) out of range")
    return math.lgamma(n + 1) - math.lgamma(i + 1) - math.lgamma(n - i + 1)


def sample_uniform(n: int, rng: np.random.Generator, size: int | None = None):
    """Uniform cube point(s). With `size`, returns a bitmask array instead."""
    _check_dim(n)
    if size is None:
        return CubePoint(int(rng.integers(0, 1 << n)), n)
    return rng.integers(0, 1 << n, size=size, dtype=np.int64)


@dataclass(frozen=True)
class DenseMeasure:
    """A probability table indexed by point bitmask."""

    n: int
    mass: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_dim(self.n)
        mass = np.asarray(self.mass, dtype=np.float64)
        if mass.shape != (1 << self.n,):
            raise InvalidInputError(f"mass table must have length 2^{self.n}")
        if not np.all(np.isfinite(mass)) or mass.min() < 0:
            raise InvalidInputError("masses must be finite and nonnegative")
        if abs(mass.sum() - 1.0) > 1e-12:
            raise InvalidInputError(f"masses sum to {mass.sum()!r}, not 1")
        mass.setflags(write=False)
        object.__setattr__(self, "mass", mass)

    @classmethod
    def uniform(cls, n: int) -> "DenseMeasure":
        _check_dim(n)
        return cls(n, np.full(1 << n, 1.0 / (1 << n)))

    @classmethod
    def dirac(cls, x: CubePoint) -> "DenseMeasure":
        mass = np.zeros(1 << x.n)
        mass[x.bits] = 1.0
        return cls(x.n, mass)

    @classmethod
    def dirac_bits(cls, n: int, bits: int) -> "DenseMeasure":
        return cls.dirac(CubePoint(bits, n))

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.mass > 0)


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Sample multiset: sorted distinct points and their multiplicities."""

    n: int
    points: np.ndarray = field(repr=False)
    multiplicity: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_dim(self.n)
        pts = np.asarray(self.points, dtype=np.int64)
        cnt = np.asarray(self.multiplicity, dtype=np.int64)
        if pts.shape != cnt.shape or pts.ndim != 1 or pts.size == 0:
            raise InvalidInputError("points and multiplicities must be equal-length, nonempty")
        if np.any(cnt <= 0):
            raise InvalidInputError("multiplicities must be positive")
        if pts.min() < 0 or pts.max() >= (1 << self.n) or np.any(np.diff(pts) <= 0):
            raise InvalidInputError("points must be distinct, sorted and inside the cube")
        pts.setflags(write=False)
        cnt.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "multiplicity", cnt)

    @classmethod
    def from_bits(cls, n: int, bits: Iterable[int]) -> "EmpiricalMeasure":
        arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits, dtype=np.int64)
        if arr.size == 0:
            raise InvalidInputError("empirical measure needs at least one sample")
        pts, cnt = np.unique(arr, return_counts=True)
        return cls(n, pts, cnt)

    @property
    def N(self) -> int:
        return int(self.multiplicity.sum())

    @property
    def counts(self) -> Mapping[CubePoint, int]:
        return {CubePoint(int(p), self.n): int(c) for p, c in zip(self.points, self.multiplicity)}

    def mass_at(self, x: CubePoint) -> Fraction:
        i = np.searchsorted(self.points, x.bits)
        if i < self.points.size and self.points[i] == x.bits:
            return Fraction(int(self.multiplicity[i]), self.N)
        return Fraction(0)

    def to_dense(self) -> DenseMeasure:
        mass = np.zeros(1 << self.n)
        mass[self.points] = self.multiplicity / self.N
        return DenseMeasure(self.n, mass)

    def support(self) -> np.ndarray:
        return self.points.copy()


def empirical_measure(points: Sequence[CubePoint]) -> EmpiricalMeasure:
    if len(points) == 0:
        raise InvalidInputError("empirical measure needs at least one sample")
    n = points[0].n
    if any(p.n != n for p in points):
        raise InvalidInputError("all sample points must share one dimension")
    return EmpiricalMeasure.from_bits(n, [p.bits for p in points])


Measure = DenseMeasure | EmpiricalMeasure


def dense_mass(m: Measure) -> np.ndarray:
    return m.mass if isinstance(m, DenseMeasure) else m.to_dense().mass

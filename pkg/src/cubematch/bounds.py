"""Closed-form bounds on E[W(mu_N, mu)] and the sample-size regime envelopes.

Everything is evaluated in log space so that n up to ~1000 stays finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cube import LOG2, ball_size, entropy, entropy_inverse, log_binomial
from .errors import InvalidInputError

DEFAULT_LAMBDA0 = 0.1
EPS_GRID = tuple(round(0.01 * k, 2) for k in range(51))


def _logsumexp(xs) -> float:
    xs = list(xs)
    if not xs:
        return -math.inf
    top = max(xs)
    if top == -math.inf:
        return -math.inf
    return top + math.log(sum(math.exp(x - top) for x in xs))


def _check_nN(n, N):
    if n < 1 or N < 1:
        raise InvalidInputError(f"need n >= 1 and N >= 1, got n={n}, N={N}")


@dataclass(frozen=True)
class ExperimentParams:
    n: int
    N: int

    def __post_init__(self):
        _check_nN(self.n, self.N)

    @property
    def alpha(self) -> float:
        return math.log(self.N) / math.log(self.n) if self.n > 1 else math.inf

    @property
    def lam(self) -> float:
        return math.log(self.N) / self.n

    @property
    def c(self) -> float:
        return math.exp(math.log(self.N) - self.n * LOG2)


@dataclass(frozen=True)
class DiffusionParams:
    eps: float = 0.0
    r: int = 0
    delta: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.eps <= 0.5:
            raise InvalidInputError(f"epsilon {self.eps} outside [0, 1/2]")
        if self.r < 0:
            raise InvalidInputError(f"radius {self.r} is negative")
        if not self.delta > 0:
            raise InvalidInputError(f"delta {self.delta} must be positive")


def lemma21_log_sum(n: int, eps: float) -> float:
    """log of sum_{i=1}^n C(n, i) (1-2eps)^(2i) / i."""
    if eps == 0.5:
        return -math.inf
    two_log = 2.0 * math.log(1.0 - 2.0 * eps)
    return _logsumexp(log_binomial(n, i) - math.log(i) + i * two_log for i in range(1, n + 1))


def lemma21_bound(n: int, N: int, eps: float) -> float:
    """sqrt(n)/(2 sqrt(N)) (sum_i C(n,i)(1-2eps)^(2i)/i)^(1/2) + eps n."""
    _check_nN(n, N)
    if not 0.0 <= eps <= 0.5:
        raise InvalidInputError(f"epsilon {eps} outside [0, 1/2]")
    log_first = 0.5 * math.log(n) - math.log(2.0) - 0.5 * math.log(N) + 0.5 * lemma21_log_sum(n, eps)
    return math.exp(log_first) + eps * n


def lemma21_min(n: int, N: int, grid=EPS_GRID) -> tuple[float, float]:
    """(bound, eps) minimizing lemma21_bound over an epsilon grid."""
    return min((lemma21_bound(n, N, e), e) for e in grid)


def lemma41_epsilon(n: int, N: int) -> float:
    """The diffusion level used in the N >= n^2 bound, floored at 0."""
    if N < n * n:
        raise InvalidInputError(f"requires N >= n^2, got N={N}, n={n}")
    inner = math.expm1((math.log(N) - 2.0 * math.log(n)) / n)
    return max(0.0, (1.0 - math.sqrt(inner)) / 2.0) if inner < 1.0 else 0.0


def lemma41_bound(n: int, N: int) -> float:
    _check_nN(n, N)
    return lemma41_epsilon(n, N) * n + 1.0


def corollary42_bound(n: int, *, c: float | None = None, alpha: float | None = None) -> float:
    """N = c n^2 (c > 1) or N = n^alpha (alpha >= 2) form of the N >= n^2 bound."""
    if (c is None) == (alpha is None):
        raise InvalidInputError("give exactly one of c or alpha")
    if c is not None:
        if not c > 1:
            raise InvalidInputError(f"c must exceed 1, got {c}")
        return n / 2 - math.sqrt(math.log(c)) / 2 * math.sqrt(n) + 1
    if not alpha >= 2:
        raise InvalidInputError(f"alpha must be >= 2, got {alpha}")
    return n / 2 - math.sqrt((alpha - 2) * math.log(n)) / 2 * math.sqrt(n) + 1


def lower_bound_radius(n: int, N: int) -> int:
    """Largest r <= n/2 with log N + n H(r/n) - n log 2 <= -log n, else 0."""
    if n < 2 or N < 1:
        raise InvalidInputError(f"need n >= 2 and N >= 1, got n={n}, N={N}")
    budget = -math.log(n) - math.log(N) + n * LOG2
    best = 0
    for r in range(n // 2 + 1):
        if n * entropy(r / n) <= budget:
            best = r
        else:
            break
    return best


def _log_chernoff(log_p: float, delta: float, N: float) -> float:
    p = math.exp(log_p)
    return N * (math.log1p(p * delta) - math.log1p(delta) * (p + p * delta))


def chernoff_bound(p: float, delta: float, N: float) -> float:
    """exp(N (log(1 + p delta) - log(1 + delta)(p + p delta)))."""
    if not 0.0 < p < 1.0:
        raise InvalidInputError(f"p = {p} outside (0, 1)")
    if not delta > 0:
        raise InvalidInputError(f"delta must be positive, got {delta}")
    if N < 1:
        raise InvalidInputError(f"N must be >= 1, got {N}")
    return math.exp(_log_chernoff(math.log(p), delta, N))


def _log_ball_fraction(n: int, r: int) -> float:
    return math.log(ball_size(n, r)) - n * LOG2


def _check_radius(n, r):
    if not (0 <= r <= n / 2):
        raise InvalidInputError(f"radius {r} outside [0, n/2]")


def _lemma51_value(n, N, r, delta, log_p):
    log_first = math.log(n) + n * LOG2 + _log_chernoff(log_p, delta, N)
    first = math.exp(log_first) if log_first < 709.0 else math.inf
    return first + delta * n + r


def lemma51_bound(n: int, N: int, r: int, delta: float) -> float:
    """n 2^n chernoff(p, delta, N) + delta n + r, with p the ball fraction.

    Returns inf when the first term exceeds the float range (n 2^n can).
    """
    _check_nN(n, N)
    _check_radius(n, r)
    if not delta > 0:
        raise InvalidInputError(f"delta must be positive, got {delta}")
    return _lemma51_value(n, N, r, delta, _log_ball_fraction(n, r))


def ball_criterion(n: int, N: int, r: int) -> float:
    """R(r) = n 2^n chernoff(p, 1/n, N); r is usable when R(r) <= 1."""
    _check_nN(n, N)
    _check_radius(n, r)
    log_R = math.log(n) + n * LOG2 + _log_chernoff(_log_ball_fraction(n, r), 1.0 / n, N)
    return math.exp(log_R) if log_R < 709.0 else math.inf


def lemma51_min(n: int, N: int, delta: float | None = None) -> tuple[float, int]:
    """(bound, r) minimizing lemma51_bound over r <= n/2 (delta defaults to 1/n)."""
    d = 1.0 / n if delta is None else delta
    _check_nN(n, N)
    if not d > 0:
        raise InvalidInputError(f"delta must be positive, got {d}")
    best, size, term = None, 0, 1
    for r in range(n // 2 + 1):
        # running ball size: sum of C(n, i) for i <= r
        size += term
        term = term * (n - r) // (r + 1)
        cand = (_lemma51_value(n, N, r, d, math.log(size) - n * LOG2), r)
        best = cand if best is None or cand < best else best
    return best


def rstar(lam: float) -> float:
    if not 0.0 < lam < LOG2:
        raise InvalidInputError(f"lambda {lam} outside (0, log 2)")
    return entropy_inverse(LOG2 - lam)


def lemma31_product(n: int) -> float:
    """(n / 2^n) sum_{i=1}^n C(n, i) / i; tends to 2."""
    return math.exp(math.log(n) - n * LOG2 + lemma21_log_sum(n, 0.0))


def lemma31_bound(n: int, c: float) -> float:
    """The eps = 0 bound with N = c 2^n."""
    if not c > 0:
        raise InvalidInputError(f"c must be positive, got {c}")
    log_N = math.log(c) + n * LOG2
    return math.exp(0.5 * math.log(n) - math.log(2.0) - 0.5 * log_N + 0.5 * lemma21_log_sum(n, 0.0))


def second_moment_distance(n: int) -> float:
    """E[d(X1, X2)^2] for independent uniform points: (n^2 + n) / 4."""
    return (n * n + n) / 4.0


def variance_bound(n: int, N: int) -> float:
    _check_nN(n, N)
    return second_moment_distance(n) / (2.0 * N)


def concentration_bound(n: int, N: int, t: float) -> float:
    """2 exp(-t^2 N / (4 D^2)) with D = n; same for both tails."""
    _check_nN(n, N)
    if t < 0:
        raise InvalidInputError(f"t must be nonnegative, got {t}")
    return 2.0 * math.exp(-t * t * N / (4.0 * n * n))


@dataclass
class BoundReport:
    regime: int
    lower: float
    upper: float
    params: dict = field(default_factory=dict)
    formulas: tuple[str, str] = ("", "")
    asymptotic: bool = True
    notes: list[str] = field(default_factory=list)


def classify_regime(p: ExperimentParams, lambda0: float = DEFAULT_LAMBDA0, diverging: bool = False) -> int:
    if p.c >= 1.0:
        return 5 if diverging else 4
    if p.lam >= lambda0:
        return 3
    return 2


def theorem1_envelope(p: ExperimentParams, *, lambda0: float = DEFAULT_LAMBDA0,
                      diverging: bool = False, regime: int | None = None) -> BoundReport:
    """Finite-n reading of the four asymptotic envelopes for E[W(mu_N, mu)]."""
    if p.n < 2:
        raise InvalidInputError("the envelopes need n >= 2")
    reg = classify_regime(p, lambda0, diverging) if regime is None else regime
    n = p.n
    params = {"alpha": p.alpha, "lambda": p.lam, "c": p.c}
    notes: list[str] = []
    if reg == 2:
        a = p.alpha
        nlogn = n * math.log(n)
        lower = n / 2 - math.sqrt((a + 1) / 2 * nlogn)
        if a < 2:
            notes.append("alpha < 2 lies outside the polynomial regime; upper envelope set to n/2")
        upper = n / 2 - math.sqrt(max(a - 2, 0.0) / 4 * nlogn)
        formulas = ("n/2 - sqrt((alpha+1)/2 n log n)", "n/2 - sqrt((alpha-2)/4 n log n)")
    elif reg == 3:
        if not 0 < p.lam < LOG2:
            raise InvalidInputError(f"regime 3 needs 0 < lambda < log 2, got lambda = {p.lam:.6f}")
        rs = rstar(p.lam)
        slope = math.log((1 - rs) / rs)
        params["rstar"] = rs
        lower = rs * n - math.log(n) / slope
        upper = rs * n + 3.5 * math.log(n) / slope
        formulas = ("r* n - log n / log((1-r*)/r*)", "r* n + 3.5 log n / log((1-r*)/r*)")
    elif reg == 4:
        lower = math.exp(-p.c)
        upper = 1 / math.sqrt(2 * p.c)
        formulas = ("exp(-c)", "1/sqrt(2c)")
    elif reg == 5:
        lower = 1 / math.sqrt(2 * math.pi * p.c)
        upper = math.sqrt(2) / (2 * math.sqrt(p.c))
        formulas = ("1/sqrt(2 pi c)", "sqrt(2)/(2 sqrt(c))")
    else:
        raise InvalidInputError(f"unknown regime {reg}")
    return BoundReport(reg, lower, upper, params, formulas, True, notes)


def all_bounds(n: int, N: int, *, eps: float | None = None, r: int | None = None,
               delta: float | None = None, t_grid=(), lambda0: float = DEFAULT_LAMBDA0,
               diverging: bool = False, regime: int | None = None) -> list[dict]:
    """Every bound applicable to (n, N), as flat records."""
    rows: list[dict] = []

    def add(formula, kind, value, asymptotic=False, **params):
        rows.append({"formula": formula, "kind": kind, "value": float(value),
                     "params": params, "asymptotic": asymptotic})

    p = ExperimentParams(n, N)
    val, e_best = lemma21_min(n, N)
    add("diffusion_eps", "upper", val, eps=e_best, grid="0:0.01:0.5")
    if eps is not None:
        add("diffusion_eps", "upper", lemma21_bound(n, N, eps), eps=eps)
    add("diffusion_large_N", "upper", lemma31_bound(n, p.c), c=p.c)
    if N >= n * n:
        add("diffusion_quadratic", "upper", lemma41_bound(n, N), eps=lemma41_epsilon(n, N))
        add("quadratic_alpha", "upper", corollary42_bound(n, alpha=p.alpha), alpha=p.alpha)
        c_quad = N / (n * n)
        if c_quad > 1:
            add("quadratic_c", "upper", corollary42_bound(n, c=c_quad), c=c_quad)
    if n >= 2:
        add("lower_bound_radius", "lower", lower_bound_radius(n, N))
    d = 1.0 / n if delta is None else delta
    val, r_best = lemma51_min(n, N, d)
    add("ball_diffusion", "upper", val, r=r_best, delta=d)
    if r is not None:
        add("ball_diffusion", "upper", lemma51_bound(n, N, r, d), r=r, delta=d)
        if 0 < r <= n / 2:
            pfrac = math.exp(_log_ball_fraction(n, r))
            if 0 < pfrac < 1:
                add("chernoff", "probability", chernoff_bound(pfrac, d, N), p=pfrac, delta=d, r=r)
        add("ball_criterion", "criterion", ball_criterion(n, N, r), r=r)
    add("variance", "upper", variance_bound(n, N))
    for t in t_grid:
        add("concentration", "probability", concentration_bound(n, N, t), t=t)
    if n >= 2:
        rep = theorem1_envelope(p, lambda0=lambda0, diverging=diverging, regime=regime)
        extra = {k: v for k, v in rep.params.items()}
        add(f"envelope.regime{rep.regime}", "envelope_low", rep.lower, True, envelope=rep.formulas[0], **extra)
        add(f"envelope.regime{rep.regime}", "envelope_high", rep.upper, True, envelope=rep.formulas[1], **extra)
    return rows


def entropy_grid_gap(points: int = 1001) -> float:
    """max over a grid of H(x) - (log 2 - 2 (x - 1/2)^2); <= 0 when dominance holds."""
    xs = np.linspace(0.0, 1.0, points)
    return max(entropy(float(x)) - (LOG2 - 2.0 * (x - 0.5) ** 2) for x in xs)

"""Exact Wasserstein-1 distance under the Hamming metric.

Masses are brought to a common integer denominator and solved as integer
min-cost flow, so every reported distance is an exact rational. Two
formulations share the network simplex engine:

* ``bipartite``: arcs support(a) x support(b) with Hamming costs;
* ``cube``: transshipment on the hypercube graph (unit-cost edges between
  neighbours). Hamming distance is the shortest-path metric of that graph,
  so both give the same optimum, and the cube graph has n 2^n arcs instead
  of |supp a| |supp b|.

``wasserstein_ssp`` is an independent successive-shortest-path solver on
the bipartite graph, in pure Python integers, used as a cross-check.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cube import CubePoint, DenseMeasure, EmpiricalMeasure, Measure, distance_matrix, popcount
from .errors import InvalidInputError, ResourceError
from .fourier import CubeFunction, lipschitz_check
from .simplex import decompose_paths, min_cost_flow, to_supply_array

DEFAULT_EXACT_CAP = 12
DEFAULT_MAX_ARCS = 4_000_000
MAX_DENOMINATOR = 10**9
_DYADIC = 1 << 29


@dataclass(frozen=True)
class RationalMeasure:
    """Support bitmasks with integer numerators over one denominator."""

    n: int
    support: np.ndarray
    numer: list[int]
    denom: int

    def scaled(self, target: int) -> list[int]:
        k = target // self.denom
        return [x * k for x in self.numer]


def rationalize(m: Measure) -> RationalMeasure:
    """Exact rational form of a measure.

    Empirical measures are exact (count/N). Dense tables are taken exactly
    when their masses share a denominator <= 10^9 (dyadic tables such as
    the uniform measure, or small fractions), otherwise rounded to
    denominator 10^9 by largest remainders. Zero masses are dropped.
    """
    if isinstance(m, EmpiricalMeasure):
        return RationalMeasure(m.n, m.points.copy(), [int(c) for c in m.multiplicity], m.N)
    if not isinstance(m, DenseMeasure):
        raise InvalidInputError(f"not a probability measure: {type(m).__name__}")
    support = m.support()
    mass = m.mass[support]

    scaled = mass * _DYADIC
    if np.all(scaled == np.floor(scaled)):
        numer = scaled.astype(np.int64)
        if int(numer.sum()) == _DYADIC:
            g = math.gcd(_DYADIC, *(int(x) for x in numer))
            return RationalMeasure(m.n, support, [int(x) // g for x in numer], _DYADIC // g)

    if support.size <= 4096:
        fr = [Fraction(float(x)).limit_denominator(MAX_DENOMINATOR) for x in mass]
        denom = math.lcm(*(f.denominator for f in fr))
        if denom <= MAX_DENOMINATOR and sum(fr) == 1:
            return RationalMeasure(m.n, support, [f.numerator * (denom // f.denominator) for f in fr], denom)

    raw = mass / mass.sum() * MAX_DENOMINATOR
    base = np.floor(raw).astype(np.int64)
    short = MAX_DENOMINATOR - int(base.sum())
    order = np.argsort(-(raw - base), kind="stable")
    base[order[:short]] += 1
    keep = base > 0
    return RationalMeasure(m.n, support[keep], [int(x) for x in base[keep]], MAX_DENOMINATOR)


@dataclass(frozen=True)
class TransportSolution:
    n: int
    exact_value: Fraction
    plan: list[tuple[CubePoint, CubePoint, Fraction]] = field(repr=False)
    potentials: np.ndarray = field(repr=False)
    method: str = "cube"

    @property
    def value(self) -> float:
        return float(self.exact_value)


def _prepare(a: Measure, b: Measure, max_dim: int):
    if not isinstance(a, (DenseMeasure, EmpiricalMeasure)) or not isinstance(b, (DenseMeasure, EmpiricalMeasure)):
        raise InvalidInputError("transport needs two probability measures")
    if a.n != b.n:
        raise InvalidInputError(f"dimension mismatch: {a.n} vs {b.n}")
    if a.n > max_dim:
        raise ResourceError(f"n = {a.n} exceeds the exact-transport cap {max_dim}")
    ra, rb = rationalize(a), rationalize(b)
    denom = math.lcm(ra.denom, rb.denom)
    return ra, rb, denom


def _net_supply(n: int, ra: RationalMeasure, rb: RationalMeasure, denom: int) -> list[int]:
    net = [0] * (1 << n)
    for p, x in zip(ra.support.tolist(), ra.scaled(denom)):
        net[p] += x
    for p, x in zip(rb.support.tolist(), rb.scaled(denom)):
        net[p] -= x
    return net


def cube_arcs(n: int):
    """Directed hypercube edges x -> x ^ (1 << i), arc index x * n + i."""
    pts = np.repeat(np.arange(1 << n, dtype=np.int64), n)
    bits = np.tile(np.int64(1) << np.arange(n, dtype=np.int64), 1 << n)
    return pts, pts ^ bits


def _choose(method: str, ra, rb, n: int) -> str:
    if method == "auto":
        return "bipartite" if ra.support.size * rb.support.size <= n * (1 << n) else "cube"
    if method not in ("cube", "bipartite"):
        raise InvalidInputError(f"unknown transport method {method!r}")
    return method


def wasserstein_value(a: Measure, b: Measure, *, max_dim: int = DEFAULT_EXACT_CAP,
                      max_arcs: int = DEFAULT_MAX_ARCS) -> Fraction:
    """W(a, b) as an exact rational, without building the plan."""
    ra, rb, denom = _prepare(a, b, max_dim)
    n = a.n
    if n * (1 << n) > max_arcs:
        raise ResourceError(f"cube graph with {n * (1 << n)} arcs exceeds the budget {max_arcs}")
    src, dst = cube_arcs(n)
    supply = to_supply_array(_net_supply(n, ra, rb, denom))
    flow, _ = min_cost_flow(1 << n, src, dst, np.ones(src.size, np.int64), supply)
    return Fraction(int(flow.sum()), denom)


def wasserstein_exact(a: Measure, b: Measure, *, method: str = "auto",
                      max_dim: int = DEFAULT_EXACT_CAP, max_arcs: int = DEFAULT_MAX_ARCS) -> TransportSolution:
    """Optimal transport between two cube measures by network simplex.

    Returns the exact optimal cost, a transport plan, and a full table of
    integer Kantorovich potentials f (1-Lipschitz on the whole cube) with
    E_a[f] - E_b[f] = W.
    """
    ra, rb, denom = _prepare(a, b, max_dim)
    n = a.n
    method = _choose(method, ra, rb, n)
    if method == "cube":
        return _solve_cube(n, ra, rb, denom, max_arcs)
    return _solve_bipartite(n, ra, rb, denom, max_arcs)


def _solve_cube(n, ra, rb, denom, max_arcs) -> TransportSolution:
    size = 1 << n
    if n * size > max_arcs:
        raise ResourceError(f"cube graph with {n * size} arcs exceeds the budget {max_arcs}")
    src, dst = cube_arcs(n)
    net = _net_supply(n, ra, rb, denom)
    supply = to_supply_array(net)
    flow, pot = min_cost_flow(size, src, dst, np.ones(src.size, np.int64), supply)

    plan: dict[tuple[int, int], int] = {}
    common = dict(zip(ra.support.tolist(), ra.scaled(denom)))
    for p, x in zip(rb.support.tolist(), rb.scaled(denom)):
        if p in common:
            stay = min(common[p], x)
            if stay > 0:
                plan[(p, p)] = stay
    ps, pt, amt = decompose_paths(size, src, dst, flow, supply)
    for s, t, x in zip(ps.tolist(), pt.tolist(), amt.tolist()):
        plan[(s, t)] = plan.get((s, t), 0) + int(x)

    total = sum(int(x) for x in flow.tolist())
    pot = pot - pot.min()
    return TransportSolution(n, Fraction(total, denom), _plan_list(n, plan, denom), pot, "cube")


def _solve_bipartite(n, ra, rb, denom, max_arcs) -> TransportSolution:
    ns, nt = ra.support.size, rb.support.size
    if ns * nt > max_arcs:
        raise ResourceError(f"bipartite instance with {ns * nt} arcs exceeds the budget {max_arcs}")
    dist = distance_matrix(ra.support, rb.support)
    src = np.repeat(np.arange(ns, dtype=np.int64), nt)
    dst = ns + np.tile(np.arange(nt, dtype=np.int64), ns)
    supply = to_supply_array(ra.scaled(denom) + [-x for x in rb.scaled(denom)])
    flow, pot = min_cost_flow(ns + nt, src, dst, dist.ravel(), supply)

    plan: dict[tuple[int, int], int] = {}
    for k in np.flatnonzero(flow != 0):
        i, j = divmod(int(k), nt)
        plan[(int(ra.support[i]), int(rb.support[j]))] = int(flow[k])
    total = sum(int(x) for x in (flow * dist.ravel()).tolist())

    # c-transform of the target potentials: a 1-Lipschitz extension to the whole cube
    target_pot = pot[ns:]
    table = np.empty(1 << n, dtype=np.int64)
    pts = np.arange(1 << n, dtype=np.int64)
    for lo in range(0, pts.size, 1024):
        chunk = pts[lo:lo + 1024]
        table[lo:lo + 1024] = (distance_matrix(chunk, rb.support) + target_pot[None, :]).min(axis=1)
    table -= table.min()
    return TransportSolution(n, Fraction(total, denom), _plan_list(n, plan, denom), table, "bipartite")


def _plan_list(n, plan, denom):
    return [(CubePoint(s, n), CubePoint(t, n), Fraction(x, denom)) for (s, t), x in sorted(plan.items())]


def wasserstein_ssp(a: Measure, b: Measure, *, max_dim: int = DEFAULT_EXACT_CAP) -> Fraction:
    """W(a, b) by successive shortest paths (Dijkstra with reduced costs).

    Independent of the network simplex route: bipartite graph, residual
    network rebuilt from scratch, Python integers throughout.
    """
    ra, rb, denom = _prepare(a, b, max_dim)
    sup = ra.scaled(denom)
    dem = rb.scaled(denom)
    S = ra.support.tolist()
    T = rb.support.tolist()
    ns, nt = len(S), len(T)
    cost = [[(s ^ t).bit_count() for t in T] for s in S]
    flow = [[0] * nt for _ in range(ns)]
    # node ids: 0..ns-1 sources, ns..ns+nt-1 targets
    pot = [0] * (ns + nt)
    total = 0
    while True:
        dist = [math.inf] * (ns + nt)
        prev = [-1] * (ns + nt)
        heap = []
        # virtual super-source with potential 0 feeding every source with supply left
        for i in range(ns):
            if sup[i] > 0:
                dist[i] = -pot[i]
                heapq.heappush(heap, (-pot[i], i))
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist[u]:
                continue
            if u < ns:
                for j in range(nt):
                    nd = d + cost[u][j] + pot[u] - pot[ns + j]
                    if nd < dist[ns + j]:
                        dist[ns + j] = nd
                        prev[ns + j] = u
                        heapq.heappush(heap, (nd, ns + j))
            else:
                j = u - ns
                for i in range(ns):
                    if flow[i][j] > 0:
                        nd = d - cost[i][j] + pot[u] - pot[i]
                        if nd < dist[i]:
                            dist[i] = nd
                            prev[i] = u
                            heapq.heappush(heap, (nd, i))
        sinks = [j for j in range(nt) if dem[j] > 0 and dist[ns + j] < math.inf]
        if not sinks:
            break
        t = min(sinks, key=lambda j: (dist[ns + j] + pot[ns + j], j))
        for v in range(ns + nt):
            if dist[v] < math.inf:
                pot[v] += dist[v]
        # walk back to the source, collecting the bottleneck
        path = []
        v = ns + t
        amount = dem[t]
        while prev[v] != -1:
            u = prev[v]
            path.append((u, v))
            if u >= ns:  # backward arc target u -> source v
                amount = min(amount, flow[v][u - ns])
            v = u
        amount = min(amount, sup[v])
        for u, w in path:
            if u < ns:
                flow[u][w - ns] += amount
                total += amount * cost[u][w - ns]
            else:
                flow[w][u - ns] -= amount
                total -= amount * cost[w][u - ns]
        sup[v] -= amount
        dem[t] -= amount
    if any(sup) or any(dem):
        raise RuntimeError("successive shortest paths left unmatched mass")
    return Fraction(total, denom)


def total_variation(a: Measure, b: Measure) -> float:
    if a.n != b.n:
        raise InvalidInputError(f"dimension mismatch: {a.n} vs {b.n}")
    from .cube import dense_mass

    return float(np.maximum(dense_mass(a) - dense_mass(b), 0.0).sum())


def total_variation_exact(a: Measure, b: Measure) -> Fraction:
    ra, rb, denom = _prepare(a, b, max(a.n, b.n))
    net = _net_supply(a.n, ra, rb, denom)
    return Fraction(sum(x for x in net if x > 0), denom)


def dual_lower_bound(f: CubeFunction, a: Measure, b: Measure) -> float:
    """E_a[f] - E_b[f] for a 1-Lipschitz f; never exceeds W(a, b)."""
    if f.n != a.n or a.n != b.n:
        raise InvalidInputError("dimension mismatch")
    if lipschitz_check(f) > 1e-12:
        raise InvalidInputError("dual witness is not 1-Lipschitz")
    from .fourier import expectation

    return expectation(a, f) - expectation(b, f)


@dataclass
class PlanReport:
    passed: bool
    checks: dict[str, bool]
    first_failure: str | None = None
    detail: str = ""
    duality_gap: float = math.inf


def verify_plan(sol: TransportSolution, a: Measure, b: Measure) -> PlanReport:
    """Re-check marginals, cost, potential feasibility and the duality gap."""
    checks: dict[str, bool] = {}
    details: list[str] = []

    def exact_masses(m):
        r = rationalize(m)
        return {int(p): Fraction(x, r.denom) for p, x in zip(r.support.tolist(), r.numer)}

    want_a, want_b = exact_masses(a), exact_masses(b)
    got_a: dict[int, Fraction] = {}
    got_b: dict[int, Fraction] = {}
    cost = Fraction(0)
    nonneg = True
    for s, t, x in sol.plan:
        got_a[s.bits] = got_a.get(s.bits, Fraction(0)) + x
        got_b[t.bits] = got_b.get(t.bits, Fraction(0)) + x
        cost += x * (s.bits ^ t.bits).bit_count()
        nonneg &= x >= 0
    checks["plan_nonnegative"] = nonneg
    checks["source_marginal"] = {k: v for k, v in got_a.items() if v} == want_a
    checks["target_marginal"] = {k: v for k, v in got_b.items() if v} == want_b
    checks["plan_cost"] = cost == sol.exact_value and abs(sol.value - float(cost)) <= 1e-12
    if not checks["plan_cost"]:
        details.append(f"plan cost {cost} vs reported {sol.exact_value}")

    pot = np.asarray(sol.potentials, dtype=np.float64)
    if pot.shape == (1 << sol.n,):
        violation = lipschitz_check(CubeFunction(sol.n, pot))
    else:
        violation = math.inf
    checks["potentials_lipschitz"] = violation <= 1e-12
    if not checks["potentials_lipschitz"]:
        details.append(f"Lipschitz violation {violation}")

    if pot.shape == (1 << sol.n,) and np.all(pot == np.round(pot)):
        ipot = [int(x) for x in np.round(pot)]
        dual = sum(ipot[k] * v for k, v in want_a.items()) - sum(ipot[k] * v for k, v in want_b.items())
        gap = abs(float(dual - sol.exact_value))
    elif pot.shape == (1 << sol.n,):
        dual = sum(pot[k] * float(v) for k, v in want_a.items()) - sum(pot[k] * float(v) for k, v in want_b.items())
        gap = abs(dual - sol.value)
    else:
        gap = math.inf
    checks["duality_gap"] = gap < 1e-9
    if not checks["duality_gap"]:
        details.append(f"duality gap {gap}")

    first = next((k for k, ok in checks.items() if not ok), None)
    return PlanReport(first is None, checks, first, "; ".join(details), gap)


def pairwise_lipschitz_violation(potentials: np.ndarray, points: np.ndarray) -> float:
    """max f(x) - f(y) - d(x, y) over all pairs of `points` (exhaustive)."""
    pts = np.asarray(points, dtype=np.int64)
    f = np.asarray(potentials, dtype=np.float64)[pts]
    return float(np.max(f[:, None] - f[None, :] - popcount(pts[:, None] ^ pts[None, :])))

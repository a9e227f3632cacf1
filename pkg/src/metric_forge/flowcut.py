"""Maximum concurrent multicommodity flow, its metric dual, and cut rounding.

max_concurrent_flow solves the edge-flow linear program: route phi * D_i of
every commodity simultaneously within shared edge capacities (undirected
edges become two opposing arcs) and maximize phi.

dual_metric solves the dual program: nonnegative edge lengths and pairwise
distance variables under per-edge upper bounds and triangle inequalities,
with the demand-weighted terminal distances normalized to 1, minimizing the
capacity-weighted edge lengths. Strong duality against phi is verified.

round_to_cut embeds the dual metric by the distance-to-random-subsets map
under the 1-norm and sweeps prefix cuts of every coordinate, which realizes
the best cut of the coordinate-wise decomposition of that l1 metric.
sparsest_cut_bruteforce enumerates all cuts exactly for small instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .core import MetricSpace, Semimetric, WeightedGraph, shortest_path_metric, validate_semimetric
from .embed import BourgainParams, bourgain_coords
from .errors import (
    Infeasible,
    InvalidParameters,
    MalformedInput,
    NoSeparatedCommodity,
    NumericalFailure,
    TooLarge,
)
from .simplex import solve_lp

DUALITY_RTOL = 1e-6


@dataclass(frozen=True)
class FlowInstance:
    """A capacitated graph plus k source-sink-demand triples (0-indexed)."""

    graph: WeightedGraph
    commodities: tuple[tuple[int, int, float], ...]

    @staticmethod
    def build(graph: WeightedGraph, commodities: Sequence[tuple]) -> "FlowInstance":
        out = []
        for s, t, demand in commodities:
            s, t, demand = int(s), int(t), float(demand)
            if s == t:
                raise MalformedInput(f"commodity with identical endpoints {s}")
            if not (0 <= s < graph.n and 0 <= t < graph.n):
                raise MalformedInput(f"commodity endpoint out of range: ({s},{t})")
            if not (math.isfinite(demand) and demand > 0):
                raise MalformedInput(f"demand for ({s},{t}) must be positive")
            out.append((s, t, demand))
        if not out:
            raise MalformedInput("instance needs at least one commodity")
        return FlowInstance(graph, tuple(out))

    @property
    def k(self) -> int:
        return len(self.commodities)


@dataclass(frozen=True)
class CutReport:
    subset: tuple[int, ...]
    capacity: float
    demand_cut: float
    gamma: float


@dataclass(frozen=True)
class FlowResult:
    phi: float
    flows: np.ndarray       # k x 2m, arc order (u->v, v->u) per edge
    duality_gap: float


@dataclass(frozen=True)
class DualMetricResult:
    metric: Semimetric     # normalized shortest-path metric from optimal lengths
    objective: float       # capacity-weighted edge lengths = max phi
    phi: float             # primal optimum used for the strong-duality check


def evaluate_cut(inst: FlowInstance, subset: Sequence[int]) -> CutReport:
    """Capacity, separated demand, and gamma = cap/dem for a vertex subset."""
    s = frozenset(int(i) for i in subset)
    if any(not (0 <= i < inst.graph.n) for i in s):
        raise MalformedInput("cut subset index out of range")
    cap = sum(c for u, v, _, c in inst.graph.edges if (u in s) != (v in s))
    dem = sum(d for a, b, d in inst.commodities if (a in s) != (b in s))
    if dem <= 0:
        raise NoSeparatedCommodity("subset separates no commodity pair")
    return CutReport(tuple(sorted(s)), float(cap), float(dem), float(cap / dem))


def _arc_index(edge_idx: int, reverse: bool) -> int:
    return 2 * edge_idx + (1 if reverse else 0)


def max_concurrent_flow(inst: FlowInstance) -> FlowResult:
    """Largest phi such that phi * D_i of every commodity routes within the
    shared capacities. The simplex duals are checked against phi."""
    g = inst.graph
    if not g.is_connected():
        raise Infeasible("flow instance requires a connected graph")
    n, m, k = g.n, g.m, inst.k
    nvar = 2 * m * k + 1  # per-commodity arc flows, then phi
    phi_col = nvar - 1

    arcs_out: list[list[int]] = [[] for _ in range(n)]
    arcs_in: list[list[int]] = [[] for _ in range(n)]
    for e, (u, v, _, _) in enumerate(g.edges):
        arcs_out[u].append(_arc_index(e, False))
        arcs_in[v].append(_arc_index(e, False))
        arcs_out[v].append(_arc_index(e, True))
        arcs_in[u].append(_arc_index(e, True))

    # Conservation for every vertex except t_i (that row is implied).
    rows = []
    rhs = []
    for i, (s, t, demand) in enumerate(inst.commodities):
        base = 2 * m * i
        for v in range(n):
            if v == t:
                continue
            row = np.zeros(nvar)
            for a in arcs_out[v]:
                row[base + a] += 1.0
            for a in arcs_in[v]:
                row[base + a] -= 1.0
            if v == s:
                row[phi_col] = -demand
            rows.append(row)
            rhs.append(0.0)
    A_eq = np.array(rows)
    b_eq = np.array(rhs)

    A_ub = np.zeros((m, nvar))
    b_ub = np.zeros(m)
    for e, (_, _, _, cap) in enumerate(g.edges):
        for i in range(k):
            base = 2 * m * i
            A_ub[e, base + _arc_index(e, False)] = 1.0
            A_ub[e, base + _arc_index(e, True)] = 1.0
        b_ub[e] = cap

    c = np.zeros(nvar)
    c[phi_col] = 1.0
    res = solve_lp(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, maximize=True)
    phi = float(res.objective)
    dual_obj = float(res.duals @ np.concatenate([b_ub, b_eq]))
    gap = abs(dual_obj - phi)
    if gap > DUALITY_RTOL * max(1.0, abs(phi)):
        raise NumericalFailure(f"primal/dual mismatch: {phi} vs {dual_obj}")
    flows = res.x[:phi_col].reshape(k, 2 * m)
    return FlowResult(phi=phi, flows=flows, duality_gap=gap)


def _pair_index(n: int):
    """Map unordered pair -> variable index, and the inverse list."""
    idx = {}
    pairs = []
    for i in range(n):
        for j in range(i + 1, n):
            idx[(i, j)] = len(pairs)
            pairs.append((i, j))
    return idx, pairs


def dual_metric(inst: FlowInstance, phi: Optional[float] = None) -> DualMetricResult:
    """Minimize capacity-weighted edge lengths over metrics with the
    demand-weighted terminal distances normalized to 1.

    Variables: one length per edge and one distance per vertex pair, with
    d_uv <= w_uv on edges and all triangle inequalities. The optimal lengths
    induce a shortest-path semimetric, renormalized so the result satisfies
    the same constraint set; its capacity-weighted total reproduces the LP
    objective, which must match the primal phi to relative 1e-6.
    """
    g = inst.graph
    n, m = g.n, g.m
    pidx, pairs = _pair_index(n)
    nd = len(pairs)
    nvar = nd + m  # distances then edge lengths

    rows_ub = []
    rhs_ub = []
    for e, (u, v, _, _) in enumerate(g.edges):
        row = np.zeros(nvar)
        row[pidx[(u, v)]] = 1.0
        row[nd + e] = -1.0
        rows_ub.append(row)  # d_uv <= w_uv
        rhs_ub.append(0.0)
    for i in range(n):
        for j in range(i + 1, n):
            for w in range(n):
                if w == i or w == j:
                    continue
                row = np.zeros(nvar)
                row[pidx[(i, j)]] = 1.0
                row[pidx[tuple(sorted((i, w)))]] -= 1.0
                row[pidx[tuple(sorted((w, j)))]] -= 1.0
                rows_ub.append(row)  # d_ij <= d_iw + d_wj
                rhs_ub.append(0.0)

    norm_row = np.zeros(nvar)
    for s, t, demand in inst.commodities:
        norm_row[pidx[tuple(sorted((s, t)))]] += demand

    c = np.zeros(nvar)
    for e, (_, _, _, cap) in enumerate(g.edges):
        c[nd + e] = cap

    res = solve_lp(
        c,
        A_ub=np.array(rows_ub),
        b_ub=np.array(rhs_ub),
        A_eq=norm_row[None, :],
        b_eq=np.array([1.0]),
    )
    objective = float(res.objective)

    if phi is None:
        phi = max_concurrent_flow(inst).phi
    if abs(objective - phi) > DUALITY_RTOL * max(1.0, abs(phi)):
        raise NumericalFailure(
            f"strong duality violated: dual {objective} vs phi {phi}"
        )

    # Re-derive the induced shortest-path semimetric from the edge lengths
    # and renormalize the demand-weighted terminal distances back to 1.
    lengths = res.x[nd:]
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0.0)
    for e, (u, v, _, _) in enumerate(g.edges):
        dist[u, v] = dist[v, u] = min(dist[u, v], lengths[e])
    for kmid in range(n):
        dist = np.minimum(dist, dist[:, kmid][:, None] + dist[kmid, :][None, :])
    weight = sum(d * dist[s, t] for s, t, d in inst.commodities)
    if not np.isfinite(weight) or weight <= 0:
        raise NumericalFailure("degenerate dual metric")
    dist = dist / weight
    metric = validate_semimetric(dist)
    return DualMetricResult(metric=metric, objective=objective, phi=float(phi))


def sparsest_cut_bruteforce(inst: FlowInstance) -> CutReport:
    """Exact minimum gamma over all subsets separating a commodity (n <= 20).

    Enumerates masks over the first n-1 vertices (gamma is complement
    invariant) with vectorized capacity and demand accumulation.
    """
    g = inst.graph
    n = g.n
    if n > 20:
        raise TooLarge("cut enumeration limited to n <= 20")
    if n < 2:
        raise InvalidParameters("need at least two vertices")
    total = 1 << (n - 1)
    best_gamma = math.inf
    best_mask = None
    chunk = 1 << 20
    for start in range(1, total, chunk):
        masks = np.arange(start, min(start + chunk, total), dtype=np.int64)
        cap = np.zeros(masks.shape)
        for u, v, _, cval in g.edges:
            cross = ((masks >> u) ^ (masks >> v)) & 1
            cap += cval * cross
        dem = np.zeros(masks.shape)
        for s, t, d in inst.commodities:
            cross = ((masks >> s) ^ (masks >> t)) & 1
            dem += d * cross
        ok = dem > 0
        if not np.any(ok):
            continue
        gammas = np.where(ok, cap / np.where(ok, dem, 1.0), np.inf)
        i = int(np.argmin(gammas))
        if gammas[i] < best_gamma:
            best_gamma = float(gammas[i])
            best_mask = int(masks[i])
    if best_mask is None:
        raise NoSeparatedCommodity("no subset separates any commodity")
    subset = tuple(v for v in range(n - 1) if (best_mask >> v) & 1)
    return evaluate_cut(inst, subset)


def round_to_cut(inst: FlowInstance, d: Union[MetricSpace, Semimetric, np.ndarray],
                 params: BourgainParams = BourgainParams()) -> CutReport:
    """Best sweep cut of the 1-norm random-subsets embedding of d.

    Every coordinate of the embedding is sorted and each prefix evaluated as
    a cut; the best gamma over all coordinates and prefixes is returned.
    Deterministic for a fixed seed.
    """
    dist = d if isinstance(d, np.ndarray) else d.dist
    dist = np.asarray(dist, dtype=float)
    n = inst.graph.n
    if dist.shape != (n, n):
        raise MalformedInput("metric size does not match the instance")
    coords, _ = bourgain_coords(dist, params, norm=1)
    best: Optional[CutReport] = None
    for t in range(coords.shape[1]):
        order = np.argsort(coords[:, t], kind="stable")
        for cut_size in range(1, n):
            subset = order[:cut_size]
            try:
                report = evaluate_cut(inst, subset.tolist())
            except NoSeparatedCommodity:
                continue
            if best is None or report.gamma < best.gamma:
                best = report
    if best is None:
        raise NoSeparatedCommodity("no sweep cut separates any commodity")
    return best

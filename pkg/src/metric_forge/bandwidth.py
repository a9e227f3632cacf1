"""Graph bandwidth: the embedding-and-project labeling heuristic, the
local-density lower bound, and an exact branch-and-bound oracle.

feige_label embeds the shortest-path metric by distance-to-random-subsets,
projects onto a random direction, and labels vertices in projection order.
beta_lower_bound computes max over centers and radii of |ball| / radius.
bandwidth_bruteforce searches all labelings with gap-based pruning (n <= 10).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import WeightedGraph, shortest_path_metric
from .embed import BourgainParams, bourgain_embed
from .errors import DegenerateSpace, InvalidParameters, MalformedInput, TooLarge
from .seeding import derive_seed


@dataclass(frozen=True)
class Labeling:
    """A bijection vertex -> {1..n}; labels[v] is the label of vertex v."""

    labels: tuple[int, ...]

    def validate(self, n: int) -> None:
        if len(self.labels) != n or sorted(self.labels) != list(range(1, n + 1)):
            raise MalformedInput("labels must be a permutation of 1..n")


def bandwidth_of(g: WeightedGraph, lab: Labeling) -> int:
    """Largest label gap across an edge."""
    lab.validate(g.n)
    if g.m == 0:
        return 0
    return max(abs(lab.labels[u] - lab.labels[v]) for u, v, _, _ in g.edges)


def beta_lower_bound(g: WeightedGraph) -> float:
    """max over vertices x and integer radii r >= 1 of |B_r(x)| / r, where
    B_r(x) counts vertices within hop distance r of x (x included)."""
    if any(length != 1.0 for _, _, length, _ in g.edges):
        raise InvalidParameters("local density requires unit edge lengths")
    n = g.n
    if n == 1:
        return 1.0
    d = shortest_path_metric(g).dist
    diam = int(round(d.max()))
    best = 0.0
    for x in range(n):
        row = d[x]
        for r in range(1, diam + 1):
            ball = int(np.sum(row <= r + 1e-9))
            best = max(best, ball / r)
    return best


def feige_label(g: WeightedGraph, params: BourgainParams = BourgainParams()
                ) -> tuple[Labeling, int]:
    """Label vertices by their order along a random direction of the
    random-subsets embedding of the shortest-path metric.

    Ties in the projection break by vertex index; the whole procedure is
    deterministic given the params seed.
    """
    if g.n < 2:
        raise DegenerateSpace("labeling needs at least two vertices")
    metric = shortest_path_metric(g)
    pts, _ = bourgain_embed(metric, params, norm=2)
    rng = np.random.default_rng(derive_seed(params.seed, "feige.direction"))
    direction = rng.standard_normal(pts.k)
    norm = float(np.linalg.norm(direction))
    if norm > 0:
        direction = direction / norm
    keys = pts.coords @ direction
    order = np.argsort(keys, kind="stable")
    labels = [0] * g.n
    for pos, v in enumerate(order):
        labels[int(v)] = pos + 1
    lab = Labeling(tuple(labels))
    return lab, bandwidth_of(g, lab)


def bandwidth_bruteforce(g: WeightedGraph) -> tuple[int, Labeling]:
    """Exact minimum bandwidth by placing labels 1..n with pruning.

    Prunes a partial labeling when its realized gap, or the forced future
    gap of a placed vertex with unplaced neighbors, reaches the incumbent.
    Deterministic order: vertices tried ascending at each position.
    """
    n = g.n
    if n > 10:
        raise TooLarge("exact bandwidth search limited to n <= 10")
    adj = g.neighbors()
    if g.m == 0:
        return 0, Labeling(tuple(range(1, n + 1)))

    best = n - 1  # complete-graph worst case is always achievable
    best_assign = list(range(n))
    position = [0] * n  # vertex -> label, 0 = unplaced
    placed: list[int] = []

    def partial_bound(next_pos: int) -> int:
        bound = 0
        for v in placed:
            for w in adj[v]:
                if position[w]:
                    bound = max(bound, abs(position[v] - position[w]))
                else:
                    bound = max(bound, next_pos - position[v])
        return bound

    def search(pos: int, realized: int):
        nonlocal best, best_assign
        if realized >= best:
            return
        # Any placed vertex with an unplaced neighbor forces a gap of at
        # least (pos - its position).
        for v in placed:
            if position[v] and any(not position[w] for w in adj[v]):
                if pos - position[v] >= best:
                    return
        if pos > n:
            best = realized
            best_assign = position.copy()
            return
        for v in range(n):
            if position[v]:
                continue
            gap = realized
            ok = True
            for w in adj[v]:
                if position[w]:
                    gvw = pos - position[w]
                    if gvw >= best:
                        ok = False
                        break
                    gap = max(gap, gvw)
            if not ok:
                continue
            position[v] = pos
            placed.append(v)
            search(pos + 1, gap)
            placed.pop()
            position[v] = 0

    search(1, 0)
    return best, Labeling(tuple(best_assign))

"""Graph family generators and structural measurements.

All generators emit unit edge lengths and unit capacities. random_regular
uses the pairing (configuration) model with whole-sample rejection of
self-loops and multi-edges, so the same seed always yields the same graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import WeightedGraph
from .errors import GenerationFailure, InvalidParameters, NotRegular, TooLarge
from .linalg import jacobi_eigvalsh

_PAIRING_ATTEMPTS = 1000


def hypercube(r: int) -> WeightedGraph:
    """The r-dimensional cube: 2^r vertices indexed by r-bit strings,
    edges between strings differing in exactly one bit."""
    if r < 1:
        raise InvalidParameters("hypercube dimension must be >= 1")
    n = 1 << r
    edges = []
    for u in range(n):
        for b in range(r):
            v = u ^ (1 << b)
            if u < v:
                edges.append((u, v, 1.0, 1.0))
    return WeightedGraph.build(n, edges)


def complete_binary_tree(depth: int) -> WeightedGraph:
    """Complete binary tree with `depth` edge levels (2^(depth+1) - 1 nodes)."""
    if depth < 0:
        raise InvalidParameters("depth must be >= 0")
    n = (1 << (depth + 1)) - 1
    edges = []
    for v in range(1, n):
        edges.append(((v - 1) // 2, v, 1.0, 1.0))
    return WeightedGraph.build(n, edges)


def path(n: int) -> WeightedGraph:
    if n < 1:
        raise InvalidParameters("path needs at least one vertex")
    return WeightedGraph.build(n, [(i, i + 1, 1.0, 1.0) for i in range(n - 1)])


def cycle(n: int) -> WeightedGraph:
    if n < 3:
        raise InvalidParameters("cycle needs at least three vertices")
    edges = [(i, (i + 1) % n, 1.0, 1.0) for i in range(n)]
    return WeightedGraph.build(n, edges)


def star(m: int) -> WeightedGraph:
    """K_{1,m}: root vertex 0 with m leaves."""
    if m < 1:
        raise InvalidParameters("star needs at least one leaf")
    return WeightedGraph.build(m + 1, [(0, i, 1.0, 1.0) for i in range(1, m + 1)])


def complete_graph(n: int) -> WeightedGraph:
    if n < 2:
        raise InvalidParameters("complete graph needs at least two vertices")
    edges = [(u, v, 1.0, 1.0) for u in range(n) for v in range(u + 1, n)]
    return WeightedGraph.build(n, edges)


def random_regular(n: int, k: int, seed: int) -> WeightedGraph:
    """Random k-regular graph on n vertices via the pairing model.

    n*k stubs are matched uniformly at random; a sample containing a
    self-loop or a repeated pair is rejected wholesale and redrawn.
    """
    if k < 3:
        raise InvalidParameters("degree must be >= 3")
    if n <= k:
        raise InvalidParameters("need n > k")
    if (n * k) % 2 != 0:
        raise InvalidParameters("n * k must be even")
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n), k)
    for _ in range(_PAIRING_ATTEMPTS):
        perm = rng.permutation(stubs)
        pairs = perm.reshape(-1, 2)
        u = np.minimum(pairs[:, 0], pairs[:, 1])
        v = np.maximum(pairs[:, 0], pairs[:, 1])
        if np.any(u == v):
            continue
        keys = u.astype(np.int64) * n + v
        if np.unique(keys).size != keys.size:
            continue
        edges = [(int(a), int(b), 1.0, 1.0) for a, b in zip(u, v)]
        g = WeightedGraph.build(n, edges)
        if not g.is_connected():
            continue
        return g
    raise GenerationFailure(
        f"pairing model failed to produce a simple connected graph in "
        f"{_PAIRING_ATTEMPTS} attempts"
    )


_FAMILIES = {
    "hypercube": (hypercube, 1),
    "complete_binary_tree": (complete_binary_tree, 1),
    "path": (path, 1),
    "cycle": (cycle, 1),
    "star": (star, 1),
    "random_regular": (random_regular, 3),
}


@dataclass(frozen=True)
class FamilySpec:
    """A named graph family with its parameters, e.g. FamilySpec("hypercube", (3,))."""

    family: str
    params: tuple = field(default_factory=tuple)

    def build(self) -> WeightedGraph:
        if self.family not in _FAMILIES:
            raise InvalidParameters(
                f"unknown family {self.family!r}; choose from {sorted(_FAMILIES)}"
            )
        fn, arity = _FAMILIES[self.family]
        if len(self.params) != arity:
            raise InvalidParameters(
                f"{self.family} takes {arity} parameter(s), got {len(self.params)}"
            )
        return fn(*self.params)


def generate(spec: FamilySpec) -> WeightedGraph:
    return spec.build()


# -- structural measurements --------------------------------------------------


def _require_unit_lengths(g: WeightedGraph) -> None:
    if any(length != 1.0 for _, _, length, _ in g.edges):
        raise InvalidParameters("operation requires unit edge lengths")


def girth(g: WeightedGraph) -> float:
    """Length of the shortest cycle (edge count); math.inf for forests.

    BFS from every vertex; a non-tree edge (u, v) seen from root s closes a
    cycle of length dist(s,u) + dist(s,v) + 1, and the minimum over all
    roots is exact for unit lengths.
    """
    _require_unit_lengths(g)
    adj = g.neighbors()
    best = math.inf
    for s in range(g.n):
        dist = [-1] * g.n
        parent = [-1] * g.n
        dist[s] = 0
        queue = [s]
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            if dist[u] * 2 >= best:
                break
            for w in adj[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
                elif w != parent[u]:
                    cand = dist[u] + dist[w] + 1
                    if cand < best:
                        best = cand
    return best


def spectral_expansion(g: WeightedGraph) -> tuple[float, bool]:
    """Second-largest adjacency eigenvalue of a k-regular graph and the proxy
    flag lambda2 < k - 0.1."""
    _require_unit_lengths(g)
    deg = g.degrees()
    if g.n < 2 or np.any(deg != deg[0]):
        raise NotRegular("graph is not regular")
    k = int(deg[0])
    w = jacobi_eigvalsh(g.adjacency_matrix())
    lambda2 = float(w[-2])
    return lambda2, lambda2 < k - 0.1


def edge_expansion_bruteforce(g: WeightedGraph) -> float:
    """Exact edge expansion: min over nonempty S with |S| <= n/2 of
    (edges across the cut) / |S|. Exhaustive over subsets, so n <= 22."""
    n = g.n
    if n > 22:
        raise TooLarge("edge expansion enumeration limited to n <= 22")
    if n < 2:
        raise InvalidParameters("need at least two vertices")
    best = math.inf
    total = 1 << n
    chunk = 1 << 20
    edges = [(u, v) for u, v, _, _ in g.edges]
    for start in range(1, total, chunk):
        masks = np.arange(start, min(start + chunk, total), dtype=np.int64)
        sizes = np.zeros(masks.shape, dtype=np.int64)
        for b in range(n):
            sizes += (masks >> b) & 1
        keep = (sizes >= 1) & (sizes <= n // 2)
        if not np.any(keep):
            continue
        masks = masks[keep]
        sizes = sizes[keep]
        crossing = np.zeros(masks.shape, dtype=np.int64)
        for u, v in edges:
            crossing += ((masks >> u) ^ (masks >> v)) & 1
        ratios = crossing / sizes
        m = float(ratios.min())
        if m < best:
            best = m
    return best


def resample_for_girth(n: int, k: int, seed: int, min_girth: int,
                       max_tries: int = 500) -> WeightedGraph:
    """Resample random_regular until girth >= min_girth (cap max_tries)."""
    for i in range(max_tries):
        g = random_regular(n, k, np.random.default_rng([seed, i]).integers(2**63))
        if girth(g) >= min_girth:
            return g
    raise GenerationFailure(
        f"no girth-{min_girth} sample within {max_tries} resamples"
    )

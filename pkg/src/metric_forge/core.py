"""Finite metric spaces, graph metrics, maps, and distortion.

The universal input object is MetricSpace: a validated symmetric matrix of
positive off-diagonal distances satisfying the triangle inequality. Cut
semimetrics (zero distances between distinct points allowed) are handled by
a weaker validation level and never masquerade as MetricSpace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from .errors import (
    AsymmetricMatrix,
    CoincidentImages,
    DisconnectedGraph,
    MalformedInput,
    NegativeDistance,
    NonzeroDiagonal,
    TriangleViolation,
    ZeroOffDiagonal,
)

REL_TOL = 1e-9  # metric validation, relative to the largest distance
EIG_TOL = 1e-8  # eigenvalue checks, scaled by matrix max-norm


def _as_square_matrix(matrix) -> np.ndarray:
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise MalformedInput(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] < 1:
        raise MalformedInput("matrix must have at least one row")
    if not np.all(np.isfinite(m)):
        raise MalformedInput("matrix entries must be finite")
    return m


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class MetricSpace:
    """A validated finite metric: n points with a symmetric distance matrix.

    Construct through validate_metric (or shortest_path_metric); the raw
    constructor performs no checks.
    """

    n: int
    dist: np.ndarray
    labels: Optional[tuple[str, ...]] = None

    def diameter(self) -> float:
        return float(self.dist.max()) if self.n > 1 else 0.0

    def restrict(self, points: Sequence[int]) -> "MetricSpace":
        """Submetric on the given point indices (in the given order)."""
        idx = list(points)
        sub = self.dist[np.ix_(idx, idx)]
        labels = tuple(self.labels[i] for i in idx) if self.labels else None
        return MetricSpace(len(idx), _frozen(sub.copy()), labels)

    def scaled(self, factor: float) -> "MetricSpace":
        if factor <= 0:
            raise MalformedInput("scale factor must be positive")
        return MetricSpace(self.n, _frozen(self.dist * factor), self.labels)


@dataclass(frozen=True)
class Semimetric:
    """A validated semimetric: like a metric but zero distances are allowed
    between distinct points. Used by cut metrics and the flow/cut pipeline."""

    n: int
    dist: np.ndarray


def validate_metric(matrix, labels: Optional[Sequence[str]] = None) -> MetricSpace:
    """Validate a distance matrix and wrap it as a MetricSpace.

    Checks symmetry, zero diagonal, positive off-diagonal entries, and the
    triangle inequality up to relative tolerance 1e-9. On a triangle failure
    the raised error carries the witnessing triple.
    """
    m = _as_square_matrix(matrix)
    n = m.shape[0]
    scale = float(m.max(initial=0.0))
    tol = REL_TOL * max(scale, 1.0)

    asym = np.abs(m - m.T)
    if asym.max(initial=0.0) > tol:
        i, j = np.unravel_index(int(np.argmax(asym)), m.shape)
        raise AsymmetricMatrix(f"d({i},{j}) != d({j},{i})")
    m = (m + m.T) / 2.0

    if np.any(m < -tol):
        i, j = np.unravel_index(int(np.argmin(m)), m.shape)
        raise NegativeDistance(f"d({i},{j}) = {m[i, j]:.3g} < 0")
    if np.any(np.abs(np.diag(m)) > tol):
        i = int(np.argmax(np.abs(np.diag(m))))
        raise NonzeroDiagonal(f"d({i},{i}) = {m[i, i]:.3g} != 0")
    np.fill_diagonal(m, 0.0)

    off = m + np.eye(n)  # mask the diagonal for the positivity scan
    if np.any(off <= 0.0):
        i, j = np.unravel_index(int(np.argmin(off)), m.shape)
        raise ZeroOffDiagonal(f"d({i},{j}) = 0 for distinct points")

    _check_triangle(m, tol)

    if labels is not None:
        labels = tuple(labels)
        if len(labels) != n:
            raise MalformedInput("label count does not match point count")
    return MetricSpace(n, _frozen(m), labels)


def validate_semimetric(matrix) -> Semimetric:
    """Weaker validation: symmetric, nonnegative, zero diagonal, triangle
    inequality. Distinct points may coincide (zero distance)."""
    m = _as_square_matrix(matrix)
    n = m.shape[0]
    scale = float(m.max(initial=0.0))
    tol = REL_TOL * max(scale, 1.0)
    if np.abs(m - m.T).max(initial=0.0) > tol:
        raise AsymmetricMatrix("semimetric matrix is not symmetric")
    m = (m + m.T) / 2.0
    if np.any(m < -tol):
        raise NegativeDistance("semimetric has a negative entry")
    m = np.maximum(m, 0.0)
    if np.any(np.abs(np.diag(m)) > tol):
        raise NonzeroDiagonal("semimetric has a nonzero diagonal entry")
    np.fill_diagonal(m, 0.0)
    _check_triangle(m, tol)
    return Semimetric(n, _frozen(m))


def _check_triangle(m: np.ndarray, tol: float) -> None:
    """Raise TriangleViolation with a witness if any triple fails."""
    n = m.shape[0]
    for j in range(n):
        # d(i,k) <= d(i,j) + d(j,k) for all i, k, vectorized over (i, k)
        bound = m[:, j][:, None] + m[j, :][None, :]
        slack = m - bound
        if slack.max(initial=0.0) > tol:
            i, k = np.unravel_index(int(np.argmax(slack)), m.shape)
            raise TriangleViolation(int(i), int(j), int(k), float(slack[i, k]))


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph with nonnegative edge lengths and capacities.

    Edges are (u, v, length, capacity) with 0-indexed endpoints, u < v after
    canonicalization, no duplicate pairs, no self-loops. Connectivity is not
    required at construction; metric extraction enforces it.
    """

    n: int
    edges: tuple[tuple[int, int, float, float], ...]

    @staticmethod
    def build(n: int, edges: Sequence[tuple]) -> "WeightedGraph":
        if n < 1:
            raise MalformedInput("graph needs at least one vertex")
        canon = []
        seen = set()
        for e in edges:
            if len(e) == 3:
                u, v, length = e
                cap = 1.0
            else:
                u, v, length, cap = e
            u, v = int(u), int(v)
            if u == v:
                raise MalformedInput(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise MalformedInput(f"edge ({u},{v}) out of range")
            if u > v:
                u, v = v, u
            if (u, v) in seen:
                raise MalformedInput(f"duplicate edge ({u},{v})")
            seen.add((u, v))
            length = float(length)
            cap = float(cap)
            if not (math.isfinite(length) and length >= 0.0):
                raise MalformedInput(f"edge ({u},{v}) has invalid length {length}")
            if not (math.isfinite(cap) and cap >= 0.0):
                raise MalformedInput(f"edge ({u},{v}) has invalid capacity {cap}")
            canon.append((u, v, length, cap))
        canon.sort(key=lambda e: (e[0], e[1]))
        return WeightedGraph(n, tuple(canon))

    @property
    def m(self) -> int:
        return len(self.edges)

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for u, v, _, _ in self.edges:
            a[u, v] = a[v, u] = 1.0
        return a

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=int)
        for u, v, _, _ in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v, _, _ in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def is_connected(self) -> bool:
        if self.n <= 1:
            return True
        adj = self.neighbors()
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n


def shortest_path_metric(g: WeightedGraph) -> MetricSpace:
    """All-pairs shortest-path metric of a connected weighted graph.

    Floyd–Warshall with a final relaxation sweep so the output satisfies the
    triangle inequality exactly in floating point.
    """
    n = g.n
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0.0)
    for u, v, length, _ in g.edges:
        if length < d[u, v]:
            d[u, v] = d[v, u] = length
    for k in range(n):
        d = np.minimum(d, d[:, k][:, None] + d[k, :][None, :])
    if not np.all(np.isfinite(d)):
        raise DisconnectedGraph("graph has unreachable vertex pairs")
    # Fixed point of the relaxation ensures exact (float) triangle inequality.
    while True:
        relaxed = d
        for k in range(n):
            relaxed = np.minimum(relaxed, relaxed[:, k][:, None] + relaxed[k, :][None, :])
        if np.array_equal(relaxed, d):
            break
        d = relaxed
    d = (d + d.T) / 2.0
    return validate_metric(d)


# -- maps and distortion -----------------------------------------------------

Norm = Union[int, float]  # 1, 2, or math.inf


def pairwise_distances(coords: np.ndarray, norm: Norm = 2) -> np.ndarray:
    """Pairwise distances of row vectors under the 1, 2, or max norm."""
    x = np.asarray(coords, dtype=float)
    diff = x[:, None, :] - x[None, :, :]
    if norm == 2:
        return np.sqrt(np.sum(diff * diff, axis=2))
    if norm == 1:
        return np.sum(np.abs(diff), axis=2)
    if norm == math.inf or norm == "inf":
        return np.max(np.abs(diff), axis=2)
    raise MalformedInput(f"unsupported norm {norm!r} (use 1, 2, or inf)")


@dataclass(frozen=True)
class PointSet:
    """n points in R^k, rows of `coords`."""

    n: int
    k: int
    coords: np.ndarray

    @staticmethod
    def build(coords) -> "PointSet":
        c = np.asarray(coords, dtype=float)
        if c.ndim != 2:
            raise MalformedInput("coords must be a 2-d array")
        if not np.all(np.isfinite(c)):
            raise MalformedInput("coordinates must be finite")
        return PointSet(c.shape[0], c.shape[1], _frozen(c.copy()))

    def distances(self, norm: Norm = 2) -> np.ndarray:
        return pairwise_distances(self.coords, norm)


@dataclass(frozen=True)
class MetricMap:
    """A map from a MetricSpace into a MetricSpace or a normed PointSet.

    `assignment[i]` is the target index of source point i; it must be total
    and injective. `norm` applies only when the target is a PointSet.
    """

    source: MetricSpace
    target: Union[MetricSpace, PointSet]
    assignment: tuple[int, ...]
    norm: Norm = 2

    @staticmethod
    def identity(source: MetricSpace, target: Union[MetricSpace, PointSet],
                 norm: Norm = 2) -> "MetricMap":
        return MetricMap(source, target, tuple(range(source.n)), norm)

    def target_distances(self) -> np.ndarray:
        if isinstance(self.target, PointSet):
            full = self.target.distances(self.norm)
        else:
            full = self.target.dist
        idx = list(self.assignment)
        return full[np.ix_(idx, idx)]

    def validate(self) -> None:
        n = self.source.n
        if len(self.assignment) != n:
            raise MalformedInput("assignment must cover every source point")
        tn = self.target.n
        if any(not (0 <= a < tn) for a in self.assignment):
            raise MalformedInput("assignment index out of range")
        if len(set(self.assignment)) != n:
            raise MalformedInput("assignment must be injective")


class DistortionReport(NamedTuple):
    expansion: float
    contraction: float
    distortion: float


def distortion(m: MetricMap) -> DistortionReport:
    """Expansion, contraction, and their product for a metric map.

    expansion = max over pairs of target/source, contraction = max of
    source/target; a constant rescaling of all distances therefore has
    distortion exactly 1. Coincident images raise CoincidentImages rather
    than reporting an infinite contraction.
    """
    m.validate()
    n = m.source.n
    if n < 2:
        return DistortionReport(1.0, 1.0, 1.0)
    src = m.source.dist
    tgt = m.target_distances()
    iu = np.triu_indices(n, k=1)
    s = src[iu]
    t = tgt[iu]
    zero = np.nonzero(t <= 0.0)[0]
    if zero.size:
        i, j = iu[0][zero[0]], iu[1][zero[0]]
        raise CoincidentImages(int(i), int(j))
    expansion = float(np.max(t / s))
    contraction = float(np.max(s / t))
    return DistortionReport(expansion, contraction, expansion * contraction)


# -- classical constructions -------------------------------------------------

def cut_metric(n: int, s: Sequence[int]) -> np.ndarray:
    """The 0/1 cut semimetric of subset s on n points.

    d(x, y) = 1 exactly when s separates x from y. Empty or full s gives the
    zero matrix. The result is a semimetric, not a MetricSpace.
    """
    if n < 1:
        raise MalformedInput("n must be at least 1")
    subset = set(int(i) for i in s)
    if any(not (0 <= i < n) for i in subset):
        raise MalformedInput("subset index out of range")
    ind = np.zeros(n)
    for i in subset:
        ind[i] = 1.0
    d = np.abs(ind[:, None] - ind[None, :])
    return d


def frechet_linf_embed(x: MetricSpace) -> PointSet:
    """Isometric embedding into the max norm: point i maps to row i of the
    distance matrix. Works for every finite metric (n coordinates)."""
    return PointSet.build(x.dist.copy())


class SquareL2Report(NamedTuple):
    member: bool
    is_metric: bool
    in_cone: bool           # member of the squared-l2 cone AND a metric
    witness: Optional[PointSet]  # realizing points when member
    min_eigenvalue: float   # most negative eigenvalue of the centered matrix


def is_square_l2(matrix, basepoint: int = 0) -> SquareL2Report:
    """Decide whether a hollow symmetric matrix is realizable as squared
    Euclidean distances of a point set.

    Centers at `basepoint`: G(i,j) = (M(b,i) + M(b,j) - M(i,j)) / 2 over the
    other points; membership is positive semidefiniteness of G within
    1e-9 * max|M|. When a member, the witness PointSet reproduces M; when
    not, the report carries the most negative eigenvalue. `is_metric`
    additionally records whether M itself passes metric validation (the
    squared-l2 cone intersected with metrics).
    """
    m = _as_square_matrix(matrix)
    n = m.shape[0]
    scale = float(np.abs(m).max(initial=0.0))
    tol = REL_TOL * max(scale, 1.0)
    if np.abs(m - m.T).max(initial=0.0) > tol:
        raise MalformedInput("matrix must be symmetric")
    if np.abs(np.diag(m)).max(initial=0.0) > tol:
        raise MalformedInput("matrix must have a zero diagonal")
    if m.min(initial=0.0) < -tol:
        raise MalformedInput("matrix must be nonnegative")
    m = (m + m.T) / 2.0
    np.fill_diagonal(m, 0.0)
    if not (0 <= basepoint < n):
        raise MalformedInput("basepoint out of range")

    try:
        validate_metric(m)
        is_metric = True
    except Exception:
        is_metric = False

    if n == 1:
        pts = PointSet.build(np.zeros((1, 1)))
        return SquareL2Report(True, is_metric, is_metric, pts, 0.0)

    others = [i for i in range(n) if i != basepoint]
    mb = m[basepoint]
    g = (mb[others][:, None] + mb[others][None, :] - m[np.ix_(others, others)]) / 2.0
    g = (g + g.T) / 2.0
    w, v = np.linalg.eigh(g)
    min_eig = float(w[0])
    eig_tol = EIG_TOL * max(scale, 1.0)
    member = min_eig >= -eig_tol

    witness = None
    if member:
        w_clip = np.clip(w, 0.0, None)
        rows = v * np.sqrt(w_clip)[None, :]
        coords = np.zeros((n, n - 1))
        for r, i in enumerate(others):
            coords[i] = rows[r]
        witness = PointSet.build(coords)
    return SquareL2Report(member, is_metric, member and is_metric, witness, min_eig)

"""Probabilistic embedding into dominating trees with geometrically
decreasing edge lengths.

sample_hst builds a hierarchy of partitions at diameter scales Delta,
Delta/2, Delta/4, ...: each part is split by a random-permutation,
random-radius decomposition (radius uniform in [scale/4, scale/2] per
center; every point joins the first permuted center within its radius), so
parts at scale Delta_l have diameter at most Delta_l. The edge from a
depth-l node to its children has length Delta / 2^l, which makes every
leaf-to-leaf tree distance at least twice the separation scale and hence at
least the source distance (domination holds by construction).

Tree distances are dyadic multiples of Delta and are accumulated as exact
fractions before the single float conversion.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .core import MetricSpace, validate_metric
from .errors import MalformedInput

DOMINATION_SCALE_CAP = 64  # paranoia cap on rescale passes (never triggered)


@dataclass(frozen=True)
class HstNode:
    """Tree node at a given depth; leaves carry a source point index."""

    depth: int
    children: tuple["HstNode", ...] = ()
    point: Optional[int] = None

    @property
    def is_leaf(self) -> bool:
        return self.point is not None


@dataclass(frozen=True)
class HstTree:
    """Rooted tree over the points of a metric space.

    Edge length from a depth-l node to each child is base_diameter / 2^l;
    leaves are in bijection with source points. length_scale multiplies all
    edge lengths (1 unless defensive rescaling ever fired).
    """

    root: HstNode
    n: int
    base_diameter: float
    length_scale: float = 1.0

    def leaves(self) -> list[HstNode]:
        out = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                out.append(node)
            else:
                stack.extend(reversed(node.children))
        return out

    def leaf_points(self) -> list[int]:
        return [node.point for node in self.leaves()]

    def edge_coefficient(self, depth: int) -> Fraction:
        """Edge length from a depth-`depth` node to a child, as a fraction
        of base_diameter."""
        return Fraction(1, 1 << depth)

    def distance_coefficients(self) -> np.ndarray:
        """Leaf-to-leaf distances as exact dyadic multiples of base_diameter,
        returned as a float matrix in source point order."""
        coeffs = [[Fraction(0)] * self.n for _ in range(self.n)]

        def walk(node: HstNode) -> dict[int, Fraction]:
            if node.is_leaf:
                return {node.point: Fraction(0)}
            edge = self.edge_coefficient(node.depth)
            child_maps = []
            for child in node.children:
                cm = walk(child)
                child_maps.append({p: c + edge for p, c in cm.items()})
            merged: dict[int, Fraction] = {}
            for idx, cm in enumerate(child_maps):
                for other in child_maps[idx + 1:]:
                    for p, cp in cm.items():
                        for q, cq in other.items():
                            coeffs[p][q] = coeffs[q][p] = cp + cq
                merged.update(cm)
            return merged

        walk(self.root)
        out = np.zeros((self.n, self.n))
        for i in range(self.n):
            for j in range(self.n):
                out[i, j] = float(coeffs[i][j])
        return out


def tree_metric(t: HstTree) -> MetricSpace:
    """Leaf-to-leaf path-length metric in source point order."""
    if t.n == 1:
        return MetricSpace(1, np.zeros((1, 1)))
    d = t.distance_coefficients() * (t.base_diameter * t.length_scale)
    return validate_metric(d)


def _decompose(points: list[int], dist: np.ndarray, scale: float,
               rng: np.random.Generator) -> list[list[int]]:
    """Random-permutation low-diameter decomposition of one part.

    Centers are the part's points in a random order, each with its own
    radius uniform in [scale/4, scale/2]; a point joins the first center
    within that radius (every point covers itself, so assignment is total).
    """
    order = [points[i] for i in rng.permutation(len(points))]
    radii = rng.uniform(scale / 4.0, scale / 2.0, size=len(order))
    part_of: dict[int, int] = {}
    for x in points:
        for c_idx, c in enumerate(order):
            if dist[x, c] <= radii[c_idx]:
                part_of[x] = c_idx
                break
    parts: dict[int, list[int]] = {}
    for x in points:
        parts.setdefault(part_of[x], []).append(x)
    return [sorted(parts[key]) for key in sorted(parts)]


def sample_hst(x: MetricSpace, seed: int) -> HstTree:
    """Draw one dominating tree for the metric (deterministic per seed)."""
    n = x.n
    if n == 1:
        return HstTree(HstNode(depth=0, point=0), 1, 0.0)
    rng = np.random.default_rng(seed)
    dist = x.dist
    diameter = float(dist.max())

    def split(points: list[int], depth: int) -> HstNode:
        if len(points) == 1:
            return HstNode(depth=depth, point=points[0])
        scale = diameter / (1 << (depth + 1))
        parts = _decompose(points, dist, scale, rng)
        children = tuple(split(part, depth + 1) for part in parts)
        return HstNode(depth=depth, children=children)

    tree = HstTree(split(sorted(range(n)), 0), n, diameter)
    # Domination holds by construction; verify and rescale defensively.
    td = tree.distance_coefficients() * diameter
    ratio_needed = 1.0
    mask = dist > 0
    if np.any(td[mask] < dist[mask]):
        ratio_needed = float(np.max(dist[mask] / td[mask]))
    if ratio_needed > 1.0:
        tree = HstTree(tree.root, n, diameter, length_scale=ratio_needed)
    return tree


@dataclass(frozen=True)
class TreeDistribution:
    """Finitely many dominating trees with positive weights summing to 1."""

    trees: tuple[HstTree, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.trees) != len(self.weights):
            raise MalformedInput("one weight per tree required")
        if any(w <= 0 for w in self.weights):
            raise MalformedInput("weights must be positive")
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise MalformedInput("weights must sum to 1")


def sample_distribution(x: MetricSpace, trials: int, seed: int) -> TreeDistribution:
    """Empirical uniform distribution over `trials` sampled trees."""
    if trials < 1:
        raise MalformedInput("need at least one trial")
    from .seeding import spawn_seeds

    seeds = spawn_seeds(seed, "hst", trials)
    trees = tuple(sample_hst(x, s) for s in seeds)
    return TreeDistribution(trees, tuple([1.0 / trials] * trials))


def estimate_stretch(x: MetricSpace, trials: int, seed: int) -> tuple[float, np.ndarray]:
    """Average tree-distance inflation per pair over sampled trees.

    Returns the maximum over pairs of the mean (tree distance / source
    distance), and the full per-pair matrix (zero diagonal).
    """
    dist = sample_distribution(x, trials, seed)
    n = x.n
    acc = np.zeros((n, n))
    for tree, weight in zip(dist.trees, dist.weights):
        td = tree.distance_coefficients() * (tree.base_diameter * tree.length_scale)
        acc += weight * td
    per_pair = np.zeros((n, n))
    mask = x.dist > 0
    per_pair[mask] = acc[mask] / x.dist[mask]
    max_stretch = float(per_pair.max()) if n > 1 else 0.0
    return max_stretch, per_pair

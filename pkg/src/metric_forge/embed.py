"""Randomized embeddings into Euclidean space.

bourgain_embed maps each point to its distances from randomly sampled
subsets, O(log n) subsets per size scale 1, 2, 4, ..., n/2. Coordinates are
normalized so the map is non-expansive under the chosen norm, which makes
the measured distortion equal to the contraction.

jl_project applies a scaled Gaussian matrix, the standard dense realization
of projecting onto a random k-dimensional subspace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import MetricSpace, Norm, PointSet
from .errors import DegenerateSpace, InvalidParameters


@dataclass(frozen=True)
class BourgainParams:
    """sets_per_scale defaults to 8 * ceil(log2 n) at call time."""

    seed: int = 0
    sets_per_scale: Optional[int] = None

    def resolve_sets_per_scale(self, n: int) -> int:
        if self.sets_per_scale is not None:
            if self.sets_per_scale < 1:
                raise InvalidParameters("sets_per_scale must be >= 1")
            return self.sets_per_scale
        return 8 * max(1, math.ceil(math.log2(n)))


@dataclass(frozen=True)
class JlParams:
    epsilon: float = 0.5
    target_dim_override: Optional[int] = None
    seed: int = 0

    def target_dim(self, n: int) -> int:
        if self.target_dim_override is not None:
            if self.target_dim_override < 1:
                raise InvalidParameters("target dimension must be >= 1")
            return self.target_dim_override
        if not (0.0 < self.epsilon < 1.0):
            raise InvalidParameters("epsilon must lie in (0, 1)")
        return math.ceil(9.0 * math.log(n) / self.epsilon**2)


def scale_sizes(n: int) -> list[int]:
    """Subset sizes 1, 2, 4, ..., the largest power of two <= n/2."""
    sizes = []
    s = 1
    while s <= n // 2 or not sizes:  # n = 2, 3 still get the size-1 scale
        if s > n:
            break
        sizes.append(s)
        s *= 2
    return sizes


def bourgain_coords(dist: np.ndarray, params: BourgainParams,
                    norm: Norm = 2) -> tuple[np.ndarray, list[np.ndarray]]:
    """Coordinate matrix and the sampled subsets, for a raw distance matrix.

    Row x holds d(x, S) over all sampled subsets S, scaled by 1/T for the
    1-norm and 1/sqrt(T) for the 2-norm (T = number of coordinates), which
    caps the expansion at 1.
    """
    n = dist.shape[0]
    sizes = scale_sizes(n)
    per_scale = params.resolve_sets_per_scale(n)
    rng = np.random.default_rng(params.seed)
    sets: list[np.ndarray] = []
    cols = []
    for size in sizes:
        for _ in range(per_scale):
            subset = np.sort(rng.permutation(n)[:size])
            sets.append(subset)
            cols.append(dist[:, subset].min(axis=1))
    coords = np.stack(cols, axis=1)
    t = coords.shape[1]
    if norm == 1:
        coords = coords / t
    elif norm == 2:
        coords = coords / math.sqrt(t)
    else:
        raise InvalidParameters("bourgain_embed supports norms 1 and 2")
    return coords, sets


def bourgain_embed(x: MetricSpace, params: BourgainParams = BourgainParams(),
                   norm: Norm = 2) -> tuple[PointSet, list[np.ndarray]]:
    """Distance-to-random-subsets embedding of a metric space.

    Returns the embedded points and the sampled subsets (for reproducibility).
    Deterministic for a fixed (input, params) pair.
    """
    if x.n < 2:
        raise DegenerateSpace("embedding needs at least two points")
    coords, sets = bourgain_coords(x.dist, params, norm)
    return PointSet.build(coords), sets


def jl_project(p: PointSet, params: JlParams = JlParams()) -> PointSet:
    """Project points to k dimensions with a k x d Gaussian matrix / sqrt(k).

    k = ceil(9 ln n / epsilon^2) unless overridden. Deterministic per seed.
    """
    if p.n < 2:
        raise DegenerateSpace("projection needs at least two points")
    k = params.target_dim(p.n)
    rng = np.random.default_rng(params.seed)
    proj = rng.standard_normal((k, p.k)) / math.sqrt(k)
    return PointSet.build(p.coords @ proj.T)

"""Minimum Euclidean distortion: exact solver and dual lower-bound certificates.

c2_sdp computes the least distortion of any embedding into l2 by a bracketed
binary search on c: the embedding with expansion <= c and contraction <= 1
exists iff there is a squared-distance matrix D with d^2 <= D <= c^2 d^2
whose double-centered Gram matrix is positive semidefinite. Each feasibility
probe runs Dykstra's alternating projections between the negative-type cone
(eigenvalue clipping in an orthonormal frame of the centered subspace) and
the box of pairwise bounds.

A DualCertificate is a positive-semidefinite matrix with zero row sums; the
ratio of its positive to negative mass against the squared distances lower
bounds c2. Explicit constructions are provided for hypercubes (diagonal
r-1, neighbors -1, antipodes +1) and for regular expanders
(Q = kI - A + (delta/2)(P - I) with P a far-apart perfect matching).
"""

from __future__ import annotations

import itertools
import logging
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    MetricMap,
    MetricSpace,
    PointSet,
    distortion,
    shortest_path_metric,
)
from .embed import BourgainParams, bourgain_embed
from .errors import (
    CertificateCheckFailed,
    CoincidentImages,
    ConvergenceFailure,
    DegenerateCertificate,
    DegenerateSpace,
    DimensionMismatch,
    InvalidCertificate,
    InvalidParameters,
    NoSpectralGap,
    OddOrder,
    TooLarge,
)
from .families import spectral_expansion
from .linalg import jacobi_eigvalsh
from .seeding import derive_seed

log = logging.getLogger(__name__)

CERT_EIG_TOL = 1e-8   # PSD slack, scaled by max|q|
CERT_ROW_TOL = 1e-9   # row-sum slack, scaled by max|q|
FEAS_RESIDUAL = 1e-8  # residual below which a probe is declared feasible
INFEAS_RESIDUAL = 1e-5  # stalled residual above which a probe is infeasible


@dataclass(frozen=True)
class DualCertificate:
    """Symmetric PSD matrix with zero row sums, certifying a c2 lower bound."""

    q: np.ndarray

    def validate(self) -> None:
        q = np.asarray(self.q, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise InvalidCertificate("certificate must be a square matrix")
        scale = max(float(np.abs(q).max(initial=0.0)), 1e-300)
        if np.abs(q - q.T).max(initial=0.0) > CERT_ROW_TOL * scale:
            raise InvalidCertificate("certificate is not symmetric")
        rows = np.abs(q.sum(axis=1))
        worst = int(np.argmax(rows))
        if rows[worst] > CERT_ROW_TOL * scale:
            raise InvalidCertificate(
                f"row {worst} sums to {q.sum(axis=1)[worst]:.3g}, expected 0",
                witness=worst,
            )
        n = q.shape[0]
        if n <= 256:
            w = jacobi_eigvalsh((q + q.T) / 2.0)
        else:
            w = np.linalg.eigvalsh((q + q.T) / 2.0)
        if w[0] < -CERT_EIG_TOL * scale:
            raise InvalidCertificate(
                f"certificate has negative eigenvalue {w[0]:.3g}", witness=float(w[0])
            )


def certificate_value(cert: DualCertificate, x: MetricSpace) -> float:
    """Lower bound on c2(x) from a dual certificate.

    sqrt of (sum of d^2 q over positive entries) / (sum of d^2 |q| over
    negative entries), floored at 1 (every metric has c2 >= 1, and the raw
    ratio can drop below 1 for isometrically embeddable spaces). A
    certificate with no negative mass is vacuous: value 1 plus a
    DegenerateCertificate warning.
    """
    cert.validate()
    q = np.asarray(cert.q, dtype=float)
    if q.shape[0] != x.n:
        raise DimensionMismatch(
            f"certificate is {q.shape[0]}x{q.shape[0]} but the metric has {x.n} points"
        )
    d2 = x.dist**2
    num = float(np.sum(d2[q > 0] * q[q > 0]))
    den = float(-np.sum(d2[q < 0] * q[q < 0]))
    if den == 0.0:
        warnings.warn(
            "certificate has no negative off-diagonal mass; value floored at 1",
            DegenerateCertificate,
        )
        return 1.0
    return max(1.0, math.sqrt(num / den))


def q_hypercube(r: int) -> DualCertificate:
    """The hypercube certificate: diagonal r-1, -1 on cube edges, +1 on
    antipodal pairs. Its value on the cube metric is exactly sqrt(r)."""
    if r < 1:
        raise InvalidParameters("dimension must be >= 1")
    if r > 12:
        raise TooLarge("hypercube certificate limited to r <= 12")
    n = 1 << r
    q = np.zeros((n, n))
    np.fill_diagonal(q, float(r - 1))
    mask = n - 1
    for u in range(n):
        for b in range(r):
            q[u, u ^ (1 << b)] += -1.0
        q[u, u ^ mask] += 1.0
    # Spectrum in the Walsh basis: eigenvalue 2s - 1 + (-1)^s for weight-s
    # characters, nonnegative for every s; verify numerically at small n.
    spectrum = [2 * s - 1 + (-1) ** s for s in range(r + 1)]
    if min(spectrum) < 0:
        raise CertificateCheckFailed("hypercube spectrum check failed")
    cert = DualCertificate(q)
    if n <= 512:
        cert.validate()
    return cert


def greedy_distance_matching(x: MetricSpace) -> tuple[list[tuple[int, int]], float]:
    """Perfect matching by repeatedly pairing the two unpaired points at
    maximum distance (ties broken lexicographically). Returns the pairs and
    the minimum distance achieved across them."""
    n = x.n
    if n % 2 != 0:
        raise OddOrder("matching needs an even number of points")
    d = x.dist
    unpaired = list(range(n))
    pairs: list[tuple[int, int]] = []
    min_dist = math.inf
    while unpaired:
        best = None
        best_d = -1.0
        for a_idx in range(len(unpaired)):
            for b_idx in range(a_idx + 1, len(unpaired)):
                i, j = unpaired[a_idx], unpaired[b_idx]
                if d[i, j] > best_d:
                    best_d = d[i, j]
                    best = (i, j)
        i, j = best
        pairs.append((i, j))
        min_dist = min(min_dist, best_d)
        unpaired.remove(i)
        unpaired.remove(j)
    return pairs, min_dist


def q_expander(g) -> DualCertificate:
    """Certificate kI - A + (delta/2)(P - I) for a k-regular graph with
    spectral gap delta = k - lambda2 and P a greedy far-apart matching."""
    if g.n % 2 != 0:
        raise OddOrder("expander certificate needs an even vertex count")
    lambda2, _ = spectral_expansion(g)
    deg = g.degrees()
    k = float(deg[0])
    delta = k - lambda2
    if delta <= 1e-9 * max(1.0, k):
        raise NoSpectralGap(f"second eigenvalue {lambda2:.6g} leaves no gap below {k}")
    metric = shortest_path_metric(g)
    pairs, min_pair_dist = greedy_distance_matching(metric)
    log.debug("expander matching: min pair distance %s", min_pair_dist)
    n = g.n
    p = np.zeros((n, n))
    for i, j in pairs:
        p[i, j] = p[j, i] = 1.0
    q = k * np.eye(n) - g.adjacency_matrix() + (delta / 2.0) * (p - np.eye(n))
    cert = DualCertificate(q)
    try:
        cert.validate()
    except InvalidCertificate as exc:
        raise CertificateCheckFailed(
            f"greedy pairing produced an invalid certificate: {exc}"
        ) from exc
    return cert


# -- the exact solver ----------------------------------------------------------


@dataclass(frozen=True)
class C2Result:
    value: float
    gram: np.ndarray
    certificate: Optional[DualCertificate]
    tolerance: float


def _centered_complement_basis(n: int) -> np.ndarray:
    """Orthonormal basis of the hyperplane orthogonal to the all-ones vector,
    as columns of an n x (n-1) matrix (Householder frame)."""
    u = np.full(n, 1.0 / math.sqrt(n))
    w = u.copy()
    w[0] -= 1.0
    h = np.eye(n) - 2.0 * np.outer(w, w) / float(w @ w)
    return h[:, 1:]


def _negative_type_projection(x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Project a symmetric matrix onto {X : V^T X V <= 0} (Frobenius metric).

    In the orthonormal frame [ones, V] the constraint touches only the V-block,
    so the projection clips that block's positive eigenvalues to zero.
    """
    b = v.T @ x @ v
    b = (b + b.T) / 2.0
    w, vec = np.linalg.eigh(b)
    pos = w > 0.0
    if not np.any(pos):
        return x
    z = v @ vec[:, pos]
    return x - (z * w[pos][None, :]) @ z.T


def _cone_violation(z: np.ndarray, v: np.ndarray) -> float:
    """Largest eigenvalue of V^T z V clipped at zero: how far the box iterate
    is from the negative-type cone."""
    b = v.T @ z @ v
    lam = float(np.linalg.eigvalsh((b + b.T) / 2.0)[-1])
    return max(lam, 0.0)


@dataclass
class _ProbeOutcome:
    status: str  # 'feasible' | 'infeasible' | 'ambiguous'
    witness: Optional[np.ndarray]
    residual: float
    best_violation: float
    best_iterate: Optional[np.ndarray]


def _probe(d2: np.ndarray, c: float, v: np.ndarray, warm: Optional[np.ndarray],
           cap: int) -> _ProbeOutcome:
    """Dykstra feasibility probe for d2 <= D <= c^2 d2 with D of negative type.

    The residual is the cone violation of the box-feasible iterate; below
    FEAS_RESIDUAL the probe is feasible. An iterate sequence whose residual
    stalls above INFEAS_RESIDUAL is infeasible (the sets have a positive
    gap). The best box iterate and its violation are reported either way so
    the caller can round a near-feasible probe to a certified bracket point.
    """
    lo = d2
    hi = (c * c) * d2
    x = np.clip(warm, lo, hi) if warm is not None else 0.5 * (lo + hi)
    np.fill_diagonal(x, 0.0)
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    best = math.inf
    best_it = 0
    best_viol = math.inf
    best_z = None
    stall_window = 250
    for it in range(cap):
        y = _negative_type_projection(x + p, v)
        p = x + p - y
        z = np.clip(y + q, lo, hi)
        np.fill_diagonal(z, 0.0)
        q = y + q - z
        gap = float(np.abs(z - y).max())
        viol = _cone_violation(z, v)
        if viol < best_viol:
            best_viol = viol
            best_z = z
        if viol < FEAS_RESIDUAL:
            return _ProbeOutcome("feasible", z, viol, best_viol, best_z)
        res = min(gap, viol)
        if res < best * 0.999:
            best = res
            best_it = it
        elif it - best_it > stall_window:
            status = "infeasible" if best > INFEAS_RESIDUAL else "ambiguous"
            return _ProbeOutcome(status, None, best, best_viol, best_z)
        x = z
    status = "infeasible" if best > INFEAS_RESIDUAL else "ambiguous"
    return _ProbeOutcome(status, None, best, best_viol, best_z)


def _witness_from_points(x: MetricSpace, pts: PointSet,
                         scale: float) -> tuple[float, np.ndarray]:
    """Distortion of an embedding and its squared distances rescaled to be
    non-contractive against the normalized metric (a feasible probe witness
    at c = distortion)."""
    rep = distortion(MetricMap.identity(x, pts, 2))
    rho = pts.distances(2) * (rep.contraction / scale)
    return rep.distortion, rho**2


def _upper_bound_embeddings(x: MetricSpace) -> tuple[float, np.ndarray]:
    """A certified upper bound on c2 with a witnessing squared-distance matrix
    (normalized scale), from the better of the random-subsets embedding and
    the distance-matrix-rows embedding read as l2 points."""
    scale = float(x.dist.max())
    candidates = [_witness_from_points(x, PointSet.build(x.dist.copy()), scale)]
    try:
        pts, _ = bourgain_embed(x, BourgainParams(seed=derive_seed(0, "c2.upper")), norm=2)
        candidates.append(_witness_from_points(x, pts, scale))
    except CoincidentImages:
        pass
    return min(candidates, key=lambda t: t[0])


def c2_sdp(x: MetricSpace, rel_tol: float = 1e-3) -> C2Result:
    """Minimum l2 distortion of a finite metric, to relative bracket rel_tol.

    Binary search on c over the feasibility problem described in the module
    docstring. The returned value is the midpoint of the final bracket
    (width <= rel_tol * value); gram is a feasible Gram matrix at the upper
    end of the bracket. Raises ConvergenceFailure when a probe's residual is
    ambiguous (neither clearly feasible nor clearly stalled) at the
    iteration cap.
    """
    if not (1e-7 <= rel_tol <= 0.1):
        raise InvalidParameters("rel_tol must lie in [1e-7, 0.1]")
    n = x.n
    if n < 2:
        raise DegenerateSpace("c2 needs at least two points")
    scale = float(x.dist.max())
    dn = x.dist / scale
    d2 = dn**2

    ub, warm = _upper_bound_embeddings(x)
    ub = min(ub, float(n - 1))
    lo_c, hi_c = 1.0, max(1.0, ub * (1.0 + 1e-12))
    if n == 2:
        lo_c = hi_c = 1.0

    v = _centered_complement_basis(n)
    iu = ~np.eye(n, dtype=bool)
    d2_min = float(d2[iu].min())
    best_feasible = warm
    residual = 0.0
    while hi_c - lo_c > rel_tol * 0.5 * (hi_c + lo_c):
        mid = 0.5 * (lo_c + hi_c)
        # Tighter brackets need more patience from the alternating projections;
        # infeasible probes exit early through the stall detector regardless.
        rel_width = (hi_c - lo_c) / mid
        cap = int(min(80000, 3000 + 40.0 / max(rel_width, 1e-7)))
        out = _probe(d2, mid, v, best_feasible, cap)
        log.debug("probe c=%.8f -> %s (res %.3g, cap %d)", mid, out.status, out.residual, cap)
        if out.status == "feasible":
            hi_c = mid
            best_feasible = out.witness
            residual = out.residual
        elif out.status == "infeasible":
            lo_c = mid
        else:
            # Round the near-feasible iterate: adding lam * (J - I) restores
            # cone membership and stays in the box once c grows to c_adj.
            lam = out.best_violation
            c_adj = math.sqrt(mid * mid + lam / d2_min) * (1.0 + 1e-12)
            if out.best_iterate is not None and c_adj <= mid + 0.5 * (hi_c - mid):
                hi_c = c_adj
                best_feasible = out.best_iterate + lam * (1.0 - np.eye(n))
                residual = 0.0
            else:
                raise ConvergenceFailure(lo_c, hi_c, out.residual)

    value = 0.5 * (lo_c + hi_c)
    j = np.eye(n) - np.full((n, n), 1.0 / n)
    gram_n = -0.5 * j @ best_feasible @ j
    gram_n = (gram_n + gram_n.T) / 2.0
    w, vec = np.linalg.eigh(gram_n)
    gram_n = (vec * np.clip(w, 0.0, None)[None, :]) @ vec.T
    tolerance = (hi_c - lo_c) / value + residual
    return C2Result(float(value), gram_n * scale**2, None, float(tolerance))


def ramsey_subset(x: MetricSpace, t: float,
                  rel_tol: float = 1e-3) -> tuple[tuple[int, ...], int]:
    """Largest subset whose restricted metric has c2 at most t.

    Exhaustive over subsets in decreasing size, lexicographic order within a
    size (so ties go to the lexicographically smallest subset). Any subset of
    at most three points embeds isometrically, so sizes <= 3 short-circuit.
    """
    if x.n > 14:
        raise TooLarge("ramsey search limited to n <= 14")
    if t < 1.0:
        raise InvalidParameters("t must be >= 1")
    threshold = t * (1.0 + rel_tol)
    for size in range(x.n, 3, -1):
        for subset in itertools.combinations(range(x.n), size):
            value = c2_sdp(x.restrict(subset), rel_tol).value
            if value <= threshold:
                return subset, size
    size = min(3, x.n)
    return tuple(range(size)), size

"""Symmetric eigendecomposition by cyclic Jacobi rotations.

Dependency-free solver used for adjacency spectra and certificate checks
(n up to a few hundred). Convergence: off-diagonal Frobenius norm below
1e-10 relative to the matrix norm.
"""

import numpy as np

from .errors import NumericalFailure

JACOBI_TOL = 1e-10
_MAX_SWEEPS = 60


def _offdiag_norm(a: np.ndarray) -> float:
    mask = ~np.eye(a.shape[0], dtype=bool)
    return float(np.sqrt(np.sum(a[mask] ** 2)))


def jacobi_eigh(a: np.ndarray, tol: float = JACOBI_TOL):
    """Eigenvalues (ascending) and eigenvectors of a symmetric matrix.

    Cyclic sweeps of Givens rotations, zeroing each off-diagonal pair in
    turn, until the off-diagonal norm drops below tol * ||a||_F.

    Returns:
        (w, v): eigenvalues in ascending order, eigenvectors as columns of v.
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("jacobi_eigh expects a square matrix")
    n = a.shape[0]
    if not np.allclose(a, a.T, atol=1e-12 * max(1.0, float(np.abs(a).max(initial=0.0)))):
        raise ValueError("jacobi_eigh expects a symmetric matrix")
    a = (a + a.T) / 2.0
    v = np.eye(n)
    if n == 1:
        return a.diagonal().copy(), v

    scale = max(float(np.linalg.norm(a)), 1e-300)
    threshold = tol * scale
    for _ in range(_MAX_SWEEPS):
        if _offdiag_norm(a) <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    a[p, q] = a[q, p] = 0.0
                    continue
                # Stable rotation angle (classical Rutishauser formulas).
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c

                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0

                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        if _offdiag_norm(a) > 1e3 * threshold:
            raise NumericalFailure("Jacobi sweeps did not converge")

    w = a.diagonal().copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def jacobi_eigvalsh(a: np.ndarray, tol: float = JACOBI_TOL) -> np.ndarray:
    """Eigenvalues only, ascending."""
    w, _ = jacobi_eigh(a, tol=tol)
    return w

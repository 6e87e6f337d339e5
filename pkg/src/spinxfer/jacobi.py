"""Cyclic Jacobi eigensolver for small dense real symmetric matrices."""

from __future__ import annotations

import numba
import numpy as np

from .errors import EigenConvergenceError

MAX_SWEEPS = 60
REL_TOL = 1e-14


@numba.njit(cache=True)
def _off_norm(a):
    n = a.shape[0]
    s = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                s += a[i, j] * a[i, j]
    return np.sqrt(s)


@numba.njit(cache=True)
def _jacobi_kernel(a, rel_tol, max_sweeps):
    n = a.shape[0]
    v = np.eye(n)
    off0 = _off_norm(a)
    fro = np.sqrt(np.sum(a * a))
    # below ~eps*||A|| further rotations only shuffle rounding noise
    target = max(rel_tol * off0, 4e-16 * fro)
    sweeps = 0
    off = off0
    while off > target:
        if sweeps >= max_sweeps:
            return v, sweeps, off, False
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                if abs(apq) < 1e-300:
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                theta = (aqq - app) / (2.0 * apq)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
        off = _off_norm(a)
    return v, sweeps, off, True


def jacobi_eigh(matrix, rel_tol: float = REL_TOL, max_sweeps: int = MAX_SWEEPS):
    """Eigen-decompose a real symmetric matrix by cyclic Jacobi rotations.

    Sweeps stop once the off-diagonal Frobenius norm falls below
    ``rel_tol`` times its initial value (or reaches the rounding floor
    ``4 eps ||A||_F``). Returns ascending eigenvalues and the matching
    orthonormal eigenvectors as columns. Each eigenvector's largest-magnitude
    entry is made positive so output is deterministic.

    Raises EigenConvergenceError after ``max_sweeps`` sweeps.
    """
    a = np.array(matrix, dtype=np.float64, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    if not np.array_equal(a, a.T):
        raise ValueError("matrix is not symmetric")
    v, sweeps, off, ok = _jacobi_kernel(a, rel_tol, max_sweeps)
    if not ok:
        raise EigenConvergenceError(
            f"Jacobi did not converge in {sweeps} sweeps (off-diagonal norm {off:.3e})"
        )
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    v = v[:, order]
    pivots = np.argmax(np.abs(v), axis=0)
    signs = np.sign(v[pivots, np.arange(v.shape[1])])
    signs[signs == 0] = 1.0
    return w, v * signs

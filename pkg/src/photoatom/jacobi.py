"""Cyclic Jacobi diagonalization of Hermitian matrices.

Slow (O(n^3) per sweep with Python-level pivots) but entirely independent of
LAPACK's SVD, which is the point: it checks the production Schmidt path.
"""

from __future__ import annotations

import math

import numpy as np


class JacobiConvergenceError(ArithmeticError):
    pass


def _off_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def jacobi_eigh(h, tol: float = 1e-14, max_sweeps: int = 60):
    """Eigenvalues (ascending) and eigenvectors (columns) of Hermitian ``h``.

    Each rotation first removes the phase of the pivot a_pq, then applies the
    real symmetric Schur rotation; sweeps stop once the off-diagonal Frobenius
    norm falls below ``tol`` times the full norm.
    """
    a = np.array(h, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    scale = np.linalg.norm(a)
    if not np.allclose(a, a.conj().T, rtol=0, atol=1e-12 * max(scale, 1e-300)):
        raise ValueError("matrix is not Hermitian")
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)
    if scale == 0:
        return np.zeros(n), v

    skip = tol * scale / n
    for _ in range(max_sweeps):
        off = _off_norm(a)
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= skip:
                    continue
                phase = apq / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(1.0 + theta * theta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                e = phase.conjugate()

                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - s * e * cq
                a[:, q] = s * cp + c * e * cq
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * phase * rq
                a[q, :] = s * rp + c * phase * rq
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real

                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * e * vq
                v[:, q] = s * vp + c * e * vq
    else:
        off = _off_norm(a)
        if off > tol * scale:
            raise JacobiConvergenceError(
                f"no convergence after {max_sweeps} sweeps: off-diagonal norm {off:.3e}"
            )

    w = np.diag(a).real
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]

"""Pure-Python (numpy) cyclic complex Jacobi eigensolver for Hermitian matrices.

Reference implementation and fallback when the compiled kernel is unavailable.
One rotation zeroes the (p, q) entry: with a_pq = |a_pq| e^{i phi}, the phase is
absorbed into the plane rotation so the pivot reduces to the real symmetric case.
"""

import math

import numpy as np


def hermitian_eigh(h, tol=1e-12, max_sweeps=60):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    h : (n, n) complex ndarray, assumed Hermitian (only enforced by symmetrization)
    tol : relative off-diagonal Frobenius mass at which to stop
    max_sweeps : hard cap on full cyclic sweeps

    Returns
    -------
    w : (n,) float ndarray, eigenvalues in descending order
    v : (n, n) complex ndarray, unitary with h = v @ diag(w) @ v.conj().T
    """
    a = np.array(h, dtype=np.complex128, copy=True)
    n = a.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=np.complex128)
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=np.complex128)
    if n == 1:
        return np.array([a[0, 0].real]), v

    fro = np.linalg.norm(a)
    if fro == 0.0:
        return np.zeros(n), v
    target = tol * fro
    skip = target / (2.0 * n)

    for _ in range(max_sweeps):
        off = math.sqrt(max(np.linalg.norm(a) ** 2 - np.sum(np.abs(np.diag(a)) ** 2), 0.0))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                m = abs(apq)
                if m <= skip:
                    continue
                w = apq / m
                wc = w.conjugate()
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * m)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c

                # columns (right multiplication by the rotation)
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * wc * cq
                a[:, q] = s * w * cp + c * cq
                # rows (left multiplication by its adjoint)
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * w * rq
                a[q, :] = s * wc * rp + c * rq
                # pivot entries in closed form, killing rounding drift
                a[p, p] = app - t * m
                a[q, q] = aqq + t * m
                a[p, q] = 0.0
                a[q, p] = 0.0

                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * wc * vq
                v[:, q] = s * w * vp + c * vq

    w = np.real(np.diag(a)).copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]

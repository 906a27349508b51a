# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled cyclic complex Jacobi eigensolver for Hermitian matrices.

Same algorithm as jacobi_pure; this is the hot kernel behind every operator
norm, PSD check and maximizing vector in the package.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def hermitian_eigh(h, double tol=1e-12, int max_sweeps=60):
    """Return (eigenvalues descending, unitary eigenvector matrix)."""
    a_arr = np.array(h, dtype=np.complex128, order="C", copy=True)
    cdef Py_ssize_t n = a_arr.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=np.complex128)
    a_arr = 0.5 * (a_arr + a_arr.conj().T)
    v_arr = np.eye(n, dtype=np.complex128)
    if n == 1:
        return np.array([a_arr[0, 0].real]), v_arr

    cdef double complex[:, ::1] a = a_arr
    cdef double complex[:, ::1] v = v_arr

    cdef double fro2 = 0.0
    cdef Py_ssize_t i, j, p, q, sweep
    for i in range(n):
        for j in range(n):
            fro2 += (a[i, j].real * a[i, j].real + a[i, j].imag * a[i, j].imag)
    cdef double fro = sqrt(fro2)
    if fro == 0.0:
        return np.zeros(n), v_arr
    cdef double target = tol * fro
    cdef double skip = target / (2.0 * n)

    cdef double off2, m, app, aqq, tau, t, c, s
    cdef double complex apq, w, wc, cp, cq
    for sweep in range(max_sweeps):
        off2 = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off2 += 2.0 * (a[i, j].real * a[i, j].real + a[i, j].imag * a[i, j].imag)
        if sqrt(off2) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                m = sqrt(apq.real * apq.real + apq.imag * apq.imag)
                if m <= skip:
                    continue
                w = apq / m
                wc = w.conjugate()
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * m)
                if tau >= 0.0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c

                for i in range(n):
                    cp = a[i, p]
                    cq = a[i, q]
                    a[i, p] = c * cp - s * wc * cq
                    a[i, q] = s * w * cp + c * cq
                for i in range(n):
                    cp = a[p, i]
                    cq = a[q, i]
                    a[p, i] = c * cp - s * w * cq
                    a[q, i] = s * wc * cp + c * cq
                a[p, p] = app - t * m
                a[q, q] = aqq + t * m
                a[p, q] = 0.0
                a[q, p] = 0.0

                for i in range(n):
                    cp = v[i, p]
                    cq = v[i, q]
                    v[i, p] = c * cp - s * wc * cq
                    v[i, q] = s * w * cp + c * cq

    w_arr = np.real(np.diag(a_arr)).copy()
    order = np.argsort(-w_arr, kind="stable")
    return w_arr[order], v_arr[:, order]

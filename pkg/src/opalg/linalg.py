"""Dense complex linear algebra substrate.

Matrices are plain 2-d complex128 ndarrays; ``as_matrix`` is the validating
constructor (finite entries only, 0x0 matrices are legal). The Hermitian
eigensolver is the package kernel (cyclic complex Jacobi, compiled when
available); the operator norm is sqrt of the top eigenvalue of M*M — no
general SVD exists in the package.
"""

import math

import numpy as np

from . import _kernel
from .config import DEFAULT, ToleranceConfig
from .errors import DimensionMismatch, InvalidMatrix, NotHermitian, NotSquare

# convergence floor for the kernel; structural_tol is honored when tighter
_KERNEL_TOL = 1e-12


def as_matrix(data) -> np.ndarray:
    """Validate and return a 2-d complex128 matrix (copy only when needed)."""
    m = np.asarray(data, dtype=np.complex128)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    if m.ndim != 2:
        raise InvalidMatrix(f"expected a 2-d matrix, got ndim={m.ndim}")
    if m.size and not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(m.imag))):
        raise InvalidMatrix("matrix has non-finite entries")
    return m


def as_vector(data) -> np.ndarray:
    v = np.asarray(data, dtype=np.complex128).reshape(-1)
    if v.size and not (np.all(np.isfinite(v.real)) and np.all(np.isfinite(v.imag))):
        raise InvalidMatrix("vector has non-finite entries")
    return v


def frob_inner(a, b) -> complex:
    """Frobenius inner product <a, b> = trace(a* b), conjugate-linear in a."""
    return complex(np.vdot(a, b))


def frob_norm(a) -> float:
    return float(np.linalg.norm(a))


def hermitian_eig(m, cfg: ToleranceConfig = DEFAULT):
    """Eigenvalues (descending) and unitary eigenvectors of a Hermitian matrix.

    Raises NotSquare / NotHermitian when the input fails the preconditions;
    the Hermitian residual is measured in Frobenius norm against
    structural_tol * (1 + ||m||_F).
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise NotSquare(f"matrix is {m.shape[0]}x{m.shape[1]}")
    if m.shape[0] == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=np.complex128)
    scale = frob_norm(m)
    if frob_norm(m - m.conj().T) > cfg.structural_tol * (1.0 + scale):
        raise NotHermitian("symmetry residual exceeds structural_tol")
    tol = min(cfg.structural_tol, _KERNEL_TOL)
    w, v = _kernel.hermitian_eigh(m, tol)
    return w, v


def hermitian_eigvals(m, cfg: ToleranceConfig = DEFAULT) -> np.ndarray:
    return hermitian_eig(m, cfg)[0]


def operator_norm(m) -> float:
    """Largest singular value, computed as sqrt(lambda_max(M* M))."""
    m = as_matrix(m)
    if m.size == 0:
        return 0.0
    if min(m.shape) == 1:
        return float(np.linalg.norm(m))
    h = m.conj().T @ m
    h = 0.5 * (h + h.conj().T)
    n = h.shape[0]
    if n == 2:
        # closed form for the 2x2 Hermitian top eigenvalue
        tr = h[0, 0].real + h[1, 1].real
        det = h[0, 0].real * h[1, 1].real - (h[0, 1] * h[1, 0]).real
        disc = max(tr * tr - 4.0 * det, 0.0)
        top = 0.5 * (tr + math.sqrt(disc))
        return math.sqrt(max(top, 0.0))
    w, _ = _kernel.hermitian_eigh(h, _KERNEL_TOL)
    return math.sqrt(max(float(w[0]), 0.0))


def psd_check(m, cfg: ToleranceConfig = DEFAULT) -> bool:
    """True iff the Hermitian matrix m has min eigenvalue >= -psd_tol."""
    w = hermitian_eigvals(m, cfg)
    if w.size == 0:
        return True
    return bool(w[-1] >= -cfg.psd_tol)


def orthonormalize(vectors, cfg: ToleranceConfig = DEFAULT):
    """Orthonormal basis of the span of the given vectors.

    Modified Gram-Schmidt with one reorthogonalization pass; candidates whose
    residual falls below structural_tol * (1 + original norm) are dropped, so
    rank-deficient inputs shrink. The input order determines the output order.
    """
    basis = []
    for vec in vectors:
        v = as_vector(vec)
        if basis and v.size != basis[0].size:
            raise DimensionMismatch("vectors of mixed dimension")
        orig = float(np.linalg.norm(v))
        w = v.copy()
        for _ in range(2):
            for b in basis:
                w = w - np.vdot(b, w) * b
        nrm = float(np.linalg.norm(w))
        if nrm > cfg.structural_tol * (1.0 + orig):
            basis.append(w / nrm)
    return basis


def ampliate(blocks) -> np.ndarray:
    """Assemble a d x d grid of m x m blocks into one dm x dm matrix."""
    rows = [list(r) for r in blocks]
    d = len(rows)
    if d == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    if any(len(r) != d for r in rows):
        raise DimensionMismatch("block grid is not square")
    mats = [[as_matrix(b) for b in r] for r in rows]
    m = mats[0][0].shape[0]
    for r in mats:
        for b in r:
            if b.shape != (m, m):
                raise DimensionMismatch(f"block of shape {b.shape}, expected {(m, m)}")
    out = np.zeros((d * m, d * m), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            out[i * m : (i + 1) * m, j * m : (j + 1) * m] = mats[i][j]
    return out


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def matrix_unit(n: int, i: int, j: int) -> np.ndarray:
    e = np.zeros((n, n), dtype=np.complex128)
    e[i, j] = 1.0
    return e


def random_matrix(rng: np.random.Generator, rows: int, cols=None) -> np.ndarray:
    cols = rows if cols is None else cols
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / math.sqrt(2.0)


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    a = random_matrix(rng, n)
    return 0.5 * (a + a.conj().T)


def random_unitary(rng: np.random.Generator, n: int, cfg: ToleranceConfig = DEFAULT) -> np.ndarray:
    """Haar-ish unitary from orthonormalized Gaussian columns."""
    g = random_matrix(rng, n)
    cols = orthonormalize([g[:, k] for k in range(n)], cfg)
    if len(cols) < n:  # astronomically unlikely; retry with fresh entropy
        return random_unitary(rng, n, cfg)
    return np.stack(cols, axis=1)

"""Finite-dimensional operator algebras as multiplicatively closed matrix spans.

An algebra is stored through a Frobenius-orthonormal basis of its linear span;
saturation runs breadth-first product rounds until the Gram rank is stable for
a full round (bounded by the ambient dimension squared).
"""

import numpy as np

from .config import DEFAULT, ToleranceConfig
from .errors import DimensionMismatch
from .linalg import (
    ampliate,
    as_matrix,
    frob_norm,
    hermitian_eig,
    identity,
    operator_norm,
    orthonormalize,
    psd_check,
)


class FiniteOperatorAlgebra:
    """A multiplicatively closed subspace of M_m with a Frobenius-orthonormal basis."""

    def __init__(self, ambient_dim, basis, unital, generators):
        self.ambient_dim = int(ambient_dim)
        self.basis = [as_matrix(b) for b in basis]
        self.unital = bool(unital)
        self.generators = [as_matrix(g) for g in generators]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def element(self, coeffs) -> np.ndarray:
        """Linear combination of the basis."""
        out = np.zeros((self.ambient_dim, self.ambient_dim), dtype=np.complex128)
        for c, b in zip(np.asarray(coeffs, dtype=np.complex128), self.basis):
            out += c * b
        return out

    def random_element(self, rng) -> np.ndarray:
        coeffs = rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim)
        return self.element(coeffs)

    def closure_residual(self, cfg: ToleranceConfig = DEFAULT) -> float:
        """Largest membership residual over products of basis pairs."""
        worst = 0.0
        for a in self.basis:
            for b in self.basis:
                p = a @ b
                _, res = _project(self.basis, p)
                worst = max(worst, res)
        return worst


def _vec(m) -> np.ndarray:
    return np.asarray(m, dtype=np.complex128).reshape(-1)


def _project(basis, m):
    """Frobenius projection coefficients onto an orthonormal matrix basis and the residual."""
    coeffs = np.array([np.vdot(b, m) for b in basis], dtype=np.complex128)
    resid = m - sum(c * b for c, b in zip(coeffs, basis)) if basis else m
    return coeffs, frob_norm(resid)


def generate_algebra(generators, unital, cfg: ToleranceConfig = DEFAULT) -> FiniteOperatorAlgebra:
    """Smallest multiplicatively closed span of the generators (and I when unital).

    Breadth-first product rounds; stops when one full round adds no rank.
    """
    gens = [as_matrix(g) for g in generators]
    if not gens:
        raise DimensionMismatch("need at least one generator to fix the ambient dimension")
    m = gens[0].shape[0]
    for g in gens:
        if g.shape[0] != g.shape[1]:
            raise DimensionMismatch("generators must be square")
        if g.shape[0] != m:
            raise DimensionMismatch("generators of mixed ambient dimension")
    seeds = list(gens)
    if unital:
        seeds = [identity(m)] + seeds

    basis_vecs = orthonormalize([_vec(s) for s in seeds], cfg)
    basis = [v.reshape(m, m) for v in basis_vecs]
    while True:
        candidates = [a @ b for a in basis for b in basis]
        new_vecs = orthonormalize(basis_vecs + [_vec(c) for c in candidates], cfg)
        if len(new_vecs) == len(basis_vecs):
            break
        basis_vecs = new_vecs
        basis = [v.reshape(m, m) for v in basis_vecs]
    return FiniteOperatorAlgebra(m, basis, unital, gens)


def membership(alg: FiniteOperatorAlgebra, m, cfg: ToleranceConfig = DEFAULT):
    """Projection coefficients of m onto span(alg), or None when absent.

    Membership holds when the Frobenius residual is at most
    structural_tol * (1 + ||m||_F).
    """
    m = as_matrix(m)
    if m.shape != (alg.ambient_dim, alg.ambient_dim):
        raise DimensionMismatch(f"element of shape {m.shape} against ambient {alg.ambient_dim}")
    coeffs, resid = _project(alg.basis, m)
    if resid <= cfg.structural_tol * (1.0 + frob_norm(m)):
        return coeffs
    return None


def adjoint_intersection(alg: FiniteOperatorAlgebra, cfg: ToleranceConfig = DEFAULT):
    """Orthonormal basis of {x in span(alg) : x* in span(alg)}.

    The condition is linear in the span coefficients: the component of x*
    orthogonal to the span must vanish. The returned basis is *-closed as a
    set of spans (x in the subspace implies x* is).
    """
    k = alg.dim
    if k == 0:
        return []
    m = alg.ambient_dim
    # residual directions of the adjoints of the basis
    resid_dirs = []
    for b in alg.basis:
        coeffs, _ = _project(alg.basis, b.conj().T)
        r = b.conj().T - sum(c * q for c, q in zip(coeffs, alg.basis))
        resid_dirs.append(_vec(r))
    # find nullspace of c -> sum_k c_k resid_k via the Gram matrix
    r_mat = np.stack(resid_dirs, axis=1)  # (m*m, k)
    gram = r_mat.conj().T @ r_mat
    w, v = hermitian_eig(gram, cfg)
    null_cols = [v[:, i] for i in range(k) if w[i] <= cfg.structural_tol]
    mats = [sum(c * b for c, b in zip(col, alg.basis)) for col in null_cols]
    vecs = orthonormalize([_vec(x) for x in mats], cfg)
    return [v.reshape(m, m) for v in vecs]


def level_norm(grid) -> float:
    """Norm of a d x d array over a common M_m, via its ampliation."""
    return operator_norm(ampliate(grid))


def hyponormal_defect(a, cfg: ToleranceConfig = DEFAULT):
    """(psd_check(a*a - aa*), ||a*a - aa*||) for a square matrix a.

    In finite dimensions a positive self-commutator has zero trace, so a
    passing check forces the commutator norm below psd_tol * dim.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch("hyponormality needs a square matrix")
    comm = a.conj().T @ a - a @ a.conj().T
    comm = 0.5 * (comm + comm.conj().T)
    return psd_check(comm, cfg), operator_norm(comm)

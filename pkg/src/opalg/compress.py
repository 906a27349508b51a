"""Norm-attaining finite-dimensional compressions.

The construction: take the maximizing vector of the target, close it up under
the word factors' suffix products and one round of the algebra action; the
resulting subspace is invariant for the algebra, and compressing every factor
to it leaves the action on the seed vectors untouched. In a finite ambient
space the identity representation plays the role of the cyclic-vector
construction, so compressions attain the ambient norm on the nose.
"""

from dataclasses import dataclass, field

import numpy as np

from .algebras import FiniteOperatorAlgebra, membership
from .config import DEFAULT, ToleranceConfig
from .errors import DimensionMismatch, EntriesNotInAlgebra, ZeroMatrix
from .linalg import (
    ampliate,
    as_matrix,
    as_vector,
    hermitian_eig,
    operator_norm,
    orthonormalize,
)


@dataclass
class WordSpec:
    """One product word: factors drawn from an algebra and its adjoint, with a coefficient.

    Each factor is (adjoint_flag, matrix); the word evaluates to
    coefficient * f_1 f_2 ... f_N with f_k = matrix* when flagged.
    """

    factors: tuple
    coefficient: complex = 1.0

    def __post_init__(self):
        factors = []
        dim = None
        for adj, m in self.factors:
            m = as_matrix(m)
            if m.shape[0] != m.shape[1]:
                raise DimensionMismatch("word factors must be square")
            if dim is None:
                dim = m.shape[0]
            elif m.shape[0] != dim:
                raise DimensionMismatch("word factors of mixed ambient dimension")
            factors.append((bool(adj), m))
        self.factors = tuple(factors)
        self.coefficient = complex(self.coefficient)

    @classmethod
    def plain(cls, *matrices, coefficient=1.0):
        return cls(tuple((False, m) for m in matrices), coefficient)

    def factor_matrices(self):
        return [m.conj().T if adj else m for adj, m in self.factors]

    def evaluate(self) -> np.ndarray:
        mats = self.factor_matrices()
        out = mats[0].copy()
        for m in mats[1:]:
            out = out @ m
        return self.coefficient * out


@dataclass
class CompressionReport:
    """Outcome of a compression: the subspace, the compressed operators, and the gaps."""

    subspace_basis: np.ndarray  # columns: orthonormal basis of F
    compressed_ops: dict
    identity_residual: float
    norm_original: float
    norm_compressed: float
    dim_F: int
    extras: dict = field(default_factory=dict)


def maximizing_vector(a, cfg: ToleranceConfig = DEFAULT) -> np.ndarray:
    """Unit vector with ||A zeta|| >= ||A|| - norm_tol: top eigenvector of A*A."""
    a = as_matrix(a)
    nrm = operator_norm(a)
    if nrm == 0.0:
        raise ZeroMatrix("maximizing vector of the zero matrix")
    h = a.conj().T @ a
    h = 0.5 * (h + h.conj().T)
    _, v = hermitian_eig(h, cfg)
    zeta = v[:, 0]
    return zeta / np.linalg.norm(zeta)


def _word_suffix_vectors(words, xi_list):
    """Suffix-product images x_k ... x_N xi for every word and seed vector."""
    out = []
    for word in words:
        mats = word.factor_matrices()
        for xi in xi_list:
            v = xi.copy()
            for m in reversed(mats):
                v = m @ v
                out.append(v.copy())
    return out


def _invariant_subspace(alg, seed_vectors, cfg):
    """F = F0 + span(alg . F0), invariant for the algebra by closure of the span."""
    f0 = orthonormalize(seed_vectors, cfg)
    extended = list(f0)
    for b in alg.basis:
        for v in f0:
            extended.append(b @ v)
    basis = orthonormalize(extended, cfg)
    if not basis:
        raise ZeroMatrix("empty subspace: no seed vectors")
    return np.stack(basis, axis=1)


def _compress(p_basis, m):
    return p_basis.conj().T @ m @ p_basis


def _invariance_residual(alg, p_basis):
    proj = p_basis @ p_basis.conj().T
    comp = np.eye(proj.shape[0], dtype=np.complex128) - proj
    worst = 0.0
    for b in alg.basis:
        worst = max(worst, operator_norm(comp @ b @ proj))
    return worst


def invariant_compression(alg: FiniteOperatorAlgebra, words, xi_list, cfg: ToleranceConfig = DEFAULT) -> CompressionReport:
    """Finite subspace F containing the seeds, invariant for alg, on which every
    word sum acts through its compressed factors.

    F0 is spanned by the seeds and all suffix-product images of the words; F
    adds one round of the algebra action. For each word, the fully compressed
    product applied to a seed equals the uncompressed product applied to it,
    and the report's identity_residual is the worst such defect (also checked
    for the sum of all words).
    """
    xi_list = [as_vector(x) for x in xi_list]
    m = alg.ambient_dim
    for x in xi_list:
        if x.size != m:
            raise DimensionMismatch("seed vector outside the ambient space")
    for w in words:
        for _, f in w.factors:
            if f.shape[0] != m:
                raise DimensionMismatch("word factor outside the ambient space")

    seeds = list(xi_list) + _word_suffix_vectors(words, xi_list)
    p = _invariant_subspace(alg, seeds, cfg)

    residual = _invariance_residual(alg, p)
    compressed = {}
    for k, w in enumerate(words):
        compressed[f"word{k}"] = w.coefficient * _chain(p, w.factor_matrices())

    worst = 0.0
    for k, w in enumerate(words):
        direct = w.evaluate()
        comp_chain = compressed[f"word{k}"]
        for xi in xi_list:
            lhs = direct @ xi
            rhs = p @ (comp_chain @ (p.conj().T @ xi))
            worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    if words:
        total_direct = sum(w.evaluate() for w in words)
        total_comp = sum(compressed.values())
        for xi in xi_list:
            lhs = total_direct @ xi
            rhs = p @ (total_comp @ (p.conj().T @ xi))
            worst = max(worst, float(np.linalg.norm(lhs - rhs)))
        norm_orig = operator_norm(total_direct)
        norm_comp = operator_norm(total_comp)
    else:
        norm_orig = norm_comp = 0.0
    worst = max(worst, residual)

    return CompressionReport(
        subspace_basis=p,
        compressed_ops=compressed,
        identity_residual=worst,
        norm_original=norm_orig,
        norm_compressed=norm_comp,
        dim_F=p.shape[1],
        extras={"invariance_residual": residual},
    )


def _chain(p, mats):
    """Product of the compressions P* m P in order."""
    out = np.eye(p.shape[1], dtype=np.complex128)
    for m in mats:
        out = out @ _compress(p, m)
    return out


def norm_attaining_compression(alg: FiniteOperatorAlgebra, grid, cfg: ToleranceConfig = DEFAULT) -> CompressionReport:
    """Compression pi(b) = P_F b|_F attaining the norm of a d x d array over span(alg).

    F is spanned by the components of the maximizing vector of the ampliation
    together with their algebra orbit, so the compressed array still reaches
    the maximizing vector: no norm is lost. pi is multiplicative on alg because
    F is invariant.
    """
    rows = [list(r) for r in grid]  # grid: d x d nested sequence of matrices; wrap singles as [[a]]
    d = len(rows)
    entries = []
    for r in rows:
        if len(r) != d:
            raise DimensionMismatch("array must be square")
        row = []
        for e in r:
            e = as_matrix(e)
            if membership(alg, e, cfg) is None:
                raise EntriesNotInAlgebra("array entry outside span(alg)")
            row.append(e)
        entries.append(row)

    big = ampliate(entries)
    zeta = maximizing_vector(big, cfg)
    m = alg.ambient_dim
    xis = [zeta[i * m : (i + 1) * m] for i in range(d)]
    p = _invariant_subspace(alg, xis, cfg)

    compressed_entries = [[_compress(p, e) for e in r] for r in entries]
    norm_orig = operator_norm(big)
    norm_comp = operator_norm(ampliate(compressed_entries))

    residual = _invariance_residual(alg, p)
    mult = _multiplicativity_residual(alg, p, cfg)

    ops = {f"a{i}{j}": compressed_entries[i][j] for i in range(d) for j in range(d)}
    return CompressionReport(
        subspace_basis=p,
        compressed_ops=ops,
        identity_residual=max(residual, mult),
        norm_original=norm_orig,
        norm_compressed=norm_comp,
        dim_F=p.shape[1],
        extras={"multiplicativity_residual": mult, "invariance_residual": residual},
    )


def _multiplicativity_residual(alg, p, cfg):
    worst = 0.0
    for a in alg.basis:
        ca = _compress(p, a)
        for b in alg.basis:
            cb = _compress(p, b)
            worst = max(worst, operator_norm(_compress(p, a @ b) - ca @ cb))
    return worst


@dataclass
class BimoduleCompression:
    """Compression to the algebra orbit of a vector family.

    rho(t) = P_X t|_X satisfies rho(a* t b) = rho(a)* rho(t) rho(b) for a, b in
    the algebra (only there) and restricts to a homomorphism on it.
    """

    basis: np.ndarray
    algebra: FiniteOperatorAlgebra
    bimodule_residual: float
    multiplicativity_residual: float

    def rho(self, t) -> np.ndarray:
        return _compress(self.basis, as_matrix(t))

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def bimodule_compression(alg: FiniteOperatorAlgebra, xi_list, cfg: ToleranceConfig = DEFAULT, samples: int = 20) -> BimoduleCompression:
    """Build rho on X = span(Xi u alg.Xi) and verify the bimodule identity on
    seeded samples a, b from the algebra and t from the ambient."""
    xi_list = [as_vector(x) for x in xi_list]
    if not xi_list:
        raise DimensionMismatch("need at least one seed vector")
    p = _invariant_subspace(alg, xi_list, cfg)

    rng = cfg.rng("compress", "bimodule", len(xi_list))
    m = alg.ambient_dim
    worst = 0.0
    for _ in range(samples):
        a = alg.random_element(rng)
        b = alg.random_element(rng)
        t = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
        lhs = _compress(p, a.conj().T @ t @ b)
        rhs = _compress(p, a).conj().T @ _compress(p, t) @ _compress(p, b)
        worst = max(worst, operator_norm(lhs - rhs))
    mult = _multiplicativity_residual(alg, p, cfg)
    return BimoduleCompression(p, alg, worst, mult)


def certifying_xi(grid, zeta, cfg: ToleranceConfig = DEFAULT):
    """Seed family {zeta_j} u {t_ij zeta_j} for a d x d array: once the bimodule
    compression is built on it, the compressed array reaches ||T zeta||."""
    rows = [[as_matrix(e) for e in r] for r in grid]
    d = len(rows)
    if any(len(r) != d for r in rows):
        raise DimensionMismatch("array must be square")
    m = rows[0][0].shape[0]
    zeta = as_vector(zeta)
    if zeta.size != d * m:
        raise DimensionMismatch(f"vector of size {zeta.size}, expected {d * m}")
    comps = [zeta[j * m : (j + 1) * m] for j in range(d)]
    xi = list(comps)
    for i in range(d):
        for j in range(d):
            xi.append(rows[i][j] @ comps[j])
    return xi


def word_norm_compression(alg: FiniteOperatorAlgebra, words, cfg: ToleranceConfig = DEFAULT) -> CompressionReport:
    """Star-word compression: factors from span(alg) and span(alg)*, compressed
    to an alg-invariant subspace containing the maximizing vector of the sum.

    The compressed star-word evaluates identically on the maximizing vector, so
    its norm is at least the ambient norm of the sum.
    """
    for w in words:
        for adj, f in w.factors:
            if membership(alg, f, cfg) is None and membership(alg, f.conj().T, cfg) is None:
                raise EntriesNotInAlgebra("word factor outside span(alg) and span(alg)*")
    total = sum(w.evaluate() for w in words)
    zeta = maximizing_vector(total, cfg)
    report = invariant_compression(alg, words, [zeta], cfg)
    compressed_total = sum(report.compressed_ops.values())
    report.norm_original = operator_norm(total)
    report.norm_compressed = operator_norm(compressed_total)
    report.compressed_ops["sum"] = compressed_total
    return report

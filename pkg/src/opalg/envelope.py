"""C*-envelopes of subspaces of finite-dimensional C*-algebras.

The generated C*-algebra decomposes through its central projections; deleting
a set of central summands is completely isometric on the subspace exactly when
no matrix level loses norm, and the largest such deletion cuts the algebra
down to the envelope. The deficit of a candidate deletion is estimated by
multi-start ascent over coefficient space plus dense random sampling; blocks
are handled separately, which keeps every norm evaluation small.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .algebras import FiniteOperatorAlgebra, generate_algebra, membership
from .config import DEFAULT, ToleranceConfig
from .errors import (
    DecompositionError,
    DimensionMismatch,
    EmptyRetention,
    NotStarClosed,
)
from .linalg import (
    as_matrix,
    frob_norm,
    hermitian_eig,
    identity,
    operator_norm,
    orthonormalize,
)


@dataclass
class UnitalSubspace:
    """A subspace of M_m whose span contains the identity."""

    ambient_dim: int
    basis: list
    contains_identity: bool = True

    def __post_init__(self):
        self.basis = [as_matrix(b) for b in self.basis]
        m = self.ambient_dim
        for b in self.basis:
            if b.shape != (m, m):
                raise DimensionMismatch(f"basis element of shape {b.shape} in M_{m}")
        # identity must lie in the span
        vecs = [b.reshape(-1) for b in self.basis]
        target = identity(m).reshape(-1)
        ortho = orthonormalize(vecs)
        resid = target.copy()
        for q in ortho:
            resid = resid - np.vdot(q, resid) * q
        if np.linalg.norm(resid) > 1e-8 * math.sqrt(m):
            raise DimensionMismatch("span does not contain the identity")
        self.contains_identity = True

    @property
    def dim(self) -> int:
        return len(self.basis)


@dataclass
class BlockDecomposition:
    """Central projections of a star-closed algebra with the reduced block data."""

    projections: list  # central projections in the ambient
    block_dims: list  # reduced dims d_i with sum d_i^2 = dim(alg)
    change_of_basis: np.ndarray  # unitary stacking the range bases
    range_bases: list  # (m, rank_i) isometries onto the projection ranges

    @property
    def num_blocks(self) -> int:
        return len(self.projections)

    def components(self, mat) -> list:
        """Per-block compressions R_i* mat R_i (exactly norm-decomposing for
        elements commuting with the projections)."""
        return [r.conj().T @ mat @ r for r in self.range_bases]


def generate_cstar(s: UnitalSubspace, cfg: ToleranceConfig = DEFAULT) -> FiniteOperatorAlgebra:
    """Smallest star-closed multiplicatively closed span containing S."""
    gens = list(s.basis) + [b.conj().T for b in s.basis]
    alg = generate_algebra(gens, unital=True, cfg=cfg)
    # product rounds preserve star-closure of the generating set, but re-saturate
    # with adjoints until stable to be safe against rounding drops
    for _ in range(4):
        extra = [b.conj().T for b in alg.basis]
        bigger = generate_algebra(alg.basis + extra, unital=True, cfg=cfg)
        if bigger.dim == alg.dim:
            break
        alg = bigger
    return alg


def _check_star_closed(alg: FiniteOperatorAlgebra, cfg) -> None:
    for b in alg.basis:
        if membership(alg, b.conj().T, cfg) is None:
            raise NotStarClosed("basis adjoint falls outside the span")


def _center_basis(alg: FiniteOperatorAlgebra, cfg):
    """Orthonormal basis of {z in span(alg) : [z, b] = 0 for all basis b}."""
    k = alg.dim
    m = alg.ambient_dim
    rows = []
    for b in alg.basis:
        block = np.stack([(q @ b - b @ q).reshape(-1) for q in alg.basis], axis=1)
        rows.append(block)
    constraint = np.concatenate(rows, axis=0)  # (k*m*m, k)
    gram = constraint.conj().T @ constraint
    w, v = hermitian_eig(gram, cfg)
    scale = max(float(w[0]), 1.0) if w.size else 1.0
    cols = [v[:, i] for i in range(k) if w[i] <= 1e-10 * scale]
    out = []
    for c in cols:
        out.append(sum(ci * bi for ci, bi in zip(c, alg.basis)))
    return out


def _cluster_projections(h, cfg):
    """Spectral projections of a Hermitian element, grouping nearby eigenvalues."""
    w, v = hermitian_eig(h, cfg)
    n = len(w)
    spread = max(float(w[0] - w[-1]), 1.0)
    groups = []
    start = 0
    for i in range(1, n + 1):
        if i == n or w[i - 1] - w[i] > 1e-6 * spread:
            groups.append((start, i))
            start = i
    return [v[:, a:b] @ v[:, a:b].conj().T for a, b in groups]


def _refine(ps, qs):
    """Common refinement of two commuting families of projections."""
    out = []
    for p in ps:
        for q in qs:
            t = p @ q
            r = float(np.trace(t).real)
            if r > 0.5:
                out.append(t)
    return out


def block_decompose(alg: FiniteOperatorAlgebra, cfg: ToleranceConfig = DEFAULT) -> BlockDecomposition:
    """Central projections via spectral splitting of generic central elements.

    Two independent seeds are refined against each other (generic elements
    separate the blocks with probability one; the refinement plus the per-block
    trivial-center check catches the measure-zero collisions). Block dims d_i
    come from the compressed span dimensions and must satisfy
    sum d_i^2 = dim(alg).
    """
    _check_star_closed(alg, cfg)
    m = alg.ambient_dim
    center = _center_basis(alg, cfg)
    if not center:
        raise DecompositionError("unital algebra with empty center")

    def generic_hermitian(label):
        rng = cfg.rng("envelope", "split", label)
        wcoef = rng.standard_normal(len(center)) + 1j * rng.standard_normal(len(center))
        wsum = sum(c * z for c, z in zip(wcoef, center))
        return wsum + wsum.conj().T

    projs = _cluster_projections(generic_hermitian(0), cfg)
    projs = _refine(projs, _cluster_projections(generic_hermitian(1), cfg))

    # determinism: order blocks by their diagonal fingerprint
    projs.sort(key=lambda p: tuple(np.round(np.diag(p).real, 9)), reverse=True)

    total = np.zeros((m, m), dtype=np.complex128)
    for p in projs:
        if operator_norm(p @ p - p) > 1e-8:
            raise DecompositionError("non-idempotent spectral cluster")
        for b in alg.basis:
            if operator_norm(p @ b - b @ p) > 1e-7 * (1.0 + operator_norm(b)):
                raise DecompositionError("spectral cluster is not central")
        total += p
    if operator_norm(total - identity(m)) > 1e-8:
        raise DecompositionError("central projections do not sum to the identity")

    range_bases = []
    block_dims = []
    for p in projs:
        w, v = hermitian_eig(p, cfg)
        rank = int(np.sum(w > 0.5))
        r = v[:, :rank]
        range_bases.append(r)
        comp = [r.conj().T @ b @ r for b in alg.basis]
        ortho = orthonormalize([c.reshape(-1) for c in comp], cfg)
        d2 = len(ortho)
        d = math.isqrt(d2)
        if d * d != d2:
            raise DecompositionError(f"compressed span dimension {d2} is not a square")
        # simple-block check: the compressed algebra must have trivial center
        sub = FiniteOperatorAlgebra(rank, [v2.reshape(rank, rank) for v2 in ortho], True, comp)
        if len(_center_basis(sub, cfg)) != 1:
            raise DecompositionError("compressed block is not simple; seeds failed to split")
        block_dims.append(d)

    if sum(d * d for d in block_dims) != alg.dim:
        raise DecompositionError("block dims inconsistent with the algebra dimension")
    change = np.concatenate(range_bases, axis=1)
    return BlockDecomposition(projs, block_dims, change, range_bases)


# -- complete-isometry deficit -------------------------------------------------

def _assemble(block_comps, c):
    """Block matrix of sum_{u,v,k} c[u,v,k] E_uv (x) comp_k for one block."""
    d = c.shape[0]
    r = block_comps.shape[1]
    out = np.einsum("uvk,kab->uavb", c, block_comps).reshape(d * r, d * r)
    return out


def _top_pair(mat):
    h = mat.conj().T @ mat
    h = 0.5 * (h + h.conj().T)
    w, v = hermitian_eig(h)
    sigma = math.sqrt(max(float(w[0]), 0.0))
    vvec = v[:, 0]
    if sigma > 0:
        uvec = mat @ vvec / sigma
    else:
        uvec = np.zeros(mat.shape[0], dtype=np.complex128)
    return sigma, uvec, vvec


class _DeficitProblem:
    """Shared state for deficit estimation over one (decomposition, retained) pair."""

    def __init__(self, decomp: BlockDecomposition, basis, retained, d):
        self.comps = []
        for r in decomp.range_bases:
            stack = np.stack([r.conj().T @ b @ r for b in basis], axis=0)  # (K, r_i, r_i)
            self.comps.append(stack)
        self.retained = sorted(retained)
        self.all_blocks = range(len(decomp.range_bases))
        self.d = d
        self.k = len(basis)

    def norms(self, c):
        return [operator_norm(_assemble(comp, c)) for comp in self.comps]

    def value(self, c):
        ns = self.norms(c)
        f = max(ns)
        if f <= 0.0:
            return 0.0
        g = max(ns[i] for i in self.retained)
        return 1.0 - g / f

    def _grad_of_block(self, c, i):
        mat = _assemble(self.comps[i], c)
        sigma, u, v = _top_pair(mat)
        r = self.comps[i].shape[1]
        d = self.d
        u_chunks = u.reshape(d, r)
        v_chunks = v.reshape(d, r)
        # g[a, b, k] = <u_a, comp_k v_b>
        img = np.einsum("kab,vb->kva", self.comps[i], v_chunks)  # (K, d, r_i)
        g = np.einsum("ua,kva->uvk", u_chunks.conj(), img)
        return sigma, g

    def ascent(self, rng, iters):
        d, k = self.d, self.k
        c = rng.standard_normal((d, d, k)) + 1j * rng.standard_normal((d, d, k))
        c /= np.linalg.norm(c)
        val = self.value(c)
        step = 0.3
        for _ in range(iters):
            ns = self.norms(c)
            f = max(ns)
            if f <= 0.0:
                break
            i_f = int(np.argmax(ns))
            i_g = self.retained[int(np.argmax([ns[i] for i in self.retained]))]
            gval = ns[i_g]
            _, grad_f = self._grad_of_block(c, i_f)
            _, grad_g = self._grad_of_block(c, i_g)
            direction = (gval / f**2) * np.conj(grad_f) - (1.0 / f) * np.conj(grad_g)
            nrm = np.linalg.norm(direction)
            if nrm < 1e-14:
                break
            improved = False
            while step >= 1e-6:
                cand = c + step * direction / nrm
                cand /= np.linalg.norm(cand)
                cand_val = self.value(cand)
                if cand_val > val + 1e-14:
                    c, val = cand, cand_val
                    step = min(step * 1.5, 1.0)
                    improved = True
                    break
                step *= 0.5
            if not improved:
                break
        return val


def complete_isometry_deficit(
    s: UnitalSubspace,
    retained,
    levels: int,
    cfg: ToleranceConfig = DEFAULT,
    decomposition: BlockDecomposition | None = None,
) -> float:
    """Estimated worst norm loss of the central-summand deletion on M_d(S), d <= levels.

    Multi-start alternating ascent (singular pair updates alternating with
    coefficient steps) plus 10^4 seeded random samples; always >= 0 because a
    quotient by central summands is contractive. retained indexes blocks of the
    decomposition (by default the canonical one of C*(S)); a custom
    decomposition only needs projections commuting with C*(S).
    """
    retained = sorted(set(retained))
    if not retained:
        raise EmptyRetention("retention must keep at least one block")
    if decomposition is None:
        decomposition = block_decompose(generate_cstar(s, cfg), cfg)
    else:
        _check_commuting(decomposition, s, cfg)
    deficit, _ = _deficit_estimate(
        s, retained, levels, cfg, decomposition, cfg.opt_starts, cfg.opt_iters, 10_000
    )
    return deficit


def _check_commuting(decomposition: BlockDecomposition, s: UnitalSubspace, cfg) -> None:
    """A supplied decomposition must commute with S and S*: that already makes it
    commute with the generated C*-algebra, so norms split across the blocks."""
    for p in decomposition.projections:
        for b in s.basis:
            scale = 1.0 + operator_norm(b)
            if operator_norm(p @ b - b @ p) > 1e-8 * scale:
                raise DecompositionError("projection does not commute with the subspace")
            bs = b.conj().T
            if operator_norm(p @ bs - bs @ p) > 1e-8 * scale:
                raise DecompositionError("projection does not commute with the adjoints")


def _deficit_estimate(s, retained, levels, cfg, decomp, starts, iters, samples, label="deficit"):
    if set(retained) == set(range(decomp.num_blocks)):
        return 0.0, True  # quotient is the identity
    best = 0.0
    per_level_samples = max(1, samples // max(1, levels))
    results = []
    for d in range(1, max(1, levels) + 1):
        prob = _DeficitProblem(decomp, s.basis, retained, d)
        rng = cfg.rng("envelope", label, d, tuple(retained))
        for _ in range(per_level_samples):
            c = rng.standard_normal((d, d, prob.k)) + 1j * rng.standard_normal((d, d, prob.k))
            best = max(best, prob.value(c))
        for _ in range(starts):
            results.append(prob.ascent(rng, iters))
    unanimous = True
    if results:
        best = max(best, max(results))
        unanimous = all(abs(v - best) <= cfg.norm_tol for v in results)
    return best, unanimous


def _witness_search(s, retained, levels, cfg, decomp, threshold):
    """Cheap pass hunting for any element that loses norm; early exit on a hit."""
    for d in range(1, max(1, levels) + 1):
        prob = _DeficitProblem(decomp, s.basis, retained, d)
        rng = cfg.rng("envelope", "witness", d, tuple(retained))
        for _ in range(96):
            c = rng.standard_normal((d, d, prob.k)) + 1j * rng.standard_normal((d, d, prob.k))
            val = prob.value(c)
            if val > threshold:
                return val
        for _ in range(4):
            val = prob.ascent(rng, 40)
            if val > threshold:
                return val
    return None


@dataclass
class ShilovResult:
    deletable: tuple
    envelope_dims: tuple
    decomposition: BlockDecomposition
    per_deletion: dict = field(default_factory=dict)
    confidence: int = 0
    flagged: bool = False


def shilov_ideal_search(s: UnitalSubspace, cfg: ToleranceConfig = DEFAULT) -> ShilovResult:
    """Largest set of central summands of C*(S) whose deletion is completely
    isometric on S (at levels up to min(ambient dim, retained size)).

    Candidates are enumerated in decreasing deletion size (exhaustive up to 12
    summands, greedy largest-first beyond); a deletion is rejected as soon as a
    witness element loses more than norm_tol, and accepted only after the full
    multi-start estimate plus dense sampling stay below norm_tol.
    """
    alg = generate_cstar(s, cfg)
    decomp = block_decompose(alg, cfg)
    k = decomp.num_blocks
    per_deletion = {}
    flagged = False

    def levels_for(retained):
        return max(1, min(s.ambient_dim, sum(decomp.block_dims[i] for i in retained)))

    def evaluate(deletion):
        nonlocal flagged
        retained = [i for i in range(k) if i not in deletion]
        lv = levels_for(retained)
        witness = _witness_search(s, retained, lv, cfg, decomp, 10.0 * cfg.norm_tol)
        if witness is not None:
            per_deletion[deletion] = witness
            if witness <= 100.0 * cfg.norm_tol:
                flagged = True
            return None
        deficit, unanimous = _deficit_estimate(
            s, retained, lv, cfg, decomp, cfg.opt_starts, cfg.opt_iters, 10_000
        )
        per_deletion[deletion] = deficit
        if deficit <= cfg.norm_tol and unanimous:
            return deficit
        if deficit <= 10.0 * cfg.norm_tol:
            flagged = True
        return None

    accepted = ()
    confidence = 0
    if k > 1:
        if k <= 12:
            found = False
            for size in range(k - 1, 0, -1):
                for deletion in itertools.combinations(range(k), size):
                    if evaluate(frozenset(deletion)) is not None:
                        accepted = tuple(sorted(deletion))
                        confidence = cfg.opt_starts
                        found = True
                        break
                if found:
                    break
        else:
            order = sorted(range(k), key=lambda i: -decomp.block_dims[i])
            current: set = set()
            for i in order:
                if len(current) + 1 == k:
                    break
                trial = frozenset(current | {i})
                if evaluate(trial) is not None:
                    current.add(i)
            accepted = tuple(sorted(current))
            confidence = cfg.opt_starts if current else 0

    # refined deficits for all single deletions (reporting)
    if k > 1:
        for i in range(k):
            deletion = frozenset([i])
            if deletion in per_deletion and per_deletion[deletion] > 10.0 * cfg.norm_tol:
                retained = [j for j in range(k) if j != i]
                refined, _ = _deficit_estimate(
                    s, retained, min(2, levels_for(retained)), cfg, decomp,
                    max(1, cfg.opt_starts // 4), min(cfg.opt_iters, 120), 512,
                    label="refine",
                )
                per_deletion[deletion] = max(per_deletion[deletion], refined)

    envelope_dims = tuple(decomp.block_dims[i] for i in range(k) if i not in accepted)
    return ShilovResult(
        deletable=accepted,
        envelope_dims=envelope_dims,
        decomposition=decomp,
        per_deletion=dict(per_deletion),
        confidence=confidence,
        flagged=flagged,
    )


# -- the 2x2 construction -------------------------------------------------------

def build_AS(s: UnitalSubspace) -> UnitalSubspace:
    """Upper-triangular 2x2 algebra over S: scalars on the diagonal, S in the corner.

    Its basis is the two diagonal identity blocks plus a corner copy of S; the
    span is closed under products, and its generated C*-algebra is the full
    2x2 matrix algebra over C*(S)."""
    m = s.ambient_dim
    zero = np.zeros((m, m), dtype=np.complex128)
    eye = identity(m)
    basis = [
        ampliate_2x2(eye, zero, zero, zero),
        ampliate_2x2(zero, zero, zero, eye),
    ]
    for b in s.basis:
        basis.append(ampliate_2x2(zero, b, zero, zero))
    return UnitalSubspace(2 * m, basis)


def ampliate_2x2(a, b, c, d) -> np.ndarray:
    m = a.shape[0]
    out = np.zeros((2 * m, 2 * m), dtype=np.complex128)
    out[:m, :m] = a
    out[:m, m:] = b
    out[m:, :m] = c
    out[m:, m:] = d
    return out


@dataclass
class M2EnvelopeReport:
    base: ShilovResult
    doubled: ShilovResult
    dims_match: bool
    deleted_match: bool

    @property
    def ok(self) -> bool:
        return self.dims_match and self.deleted_match


def m2_envelope_check(s: UnitalSubspace, cfg: ToleranceConfig = DEFAULT) -> M2EnvelopeReport:
    """Envelope block dims of the 2x2 construction must be the doubled envelope
    dims of S, with the deleted summands in the same correspondence."""
    base = shilov_ideal_search(s, cfg)
    doubled = shilov_ideal_search(build_AS(s), cfg)
    dims_match = sorted(2 * d for d in base.envelope_dims) == sorted(doubled.envelope_dims)
    deleted_base = sorted(
        2 * base.decomposition.block_dims[i] for i in base.deletable
    )
    deleted_doubled = sorted(doubled.decomposition.block_dims[i] for i in doubled.deletable)
    return M2EnvelopeReport(base, doubled, dims_match, deleted_base == deleted_doubled)


def ideal_lattice_m2_check(alg: FiniteOperatorAlgebra, cfg: ToleranceConfig = DEFAULT) -> bool:
    """Every central projection of M_2(alg) must be I_2 (x) p for a central
    projection p of alg (the two ideal lattices match)."""
    _check_star_closed(alg, cfg)
    base = block_decompose(alg, cfg)
    m2_basis = []
    for u in range(2):
        for v in range(2):
            e = np.zeros((2, 2), dtype=np.complex128)
            e[u, v] = 1.0
            for b in alg.basis:
                m2_basis.append(np.kron(e, b))
    m2_alg = generate_algebra(m2_basis, unital=True, cfg=cfg)
    big = block_decompose(m2_alg, cfg)
    if big.num_blocks != base.num_blocks:
        return False
    eye2 = np.eye(2, dtype=np.complex128)
    for q in big.projections:
        if not any(frob_norm(q - np.kron(eye2, p)) <= 1e-8 for p in base.projections):
            return False
    return True

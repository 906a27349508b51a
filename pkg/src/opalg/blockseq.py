"""Elements of prod_n M_{r_n} with eventually-stable block descriptions.

A BlockElement stores explicit blocks up to the profile horizon N1 and a tail
template (optional identity coefficient plus fixed-index matrix-unit anchors)
that generates every block beyond it. Templates are closed under sums,
products and adjoints, which makes sup norms and quotient norms (the limsup of
block norms) exactly computable instead of estimated.
"""

import math

import numpy as np

from .config import DEFAULT, ToleranceConfig
from .errors import (
    DimensionMismatch,
    FormMismatch,
    IndexOutOfExplicitRange,
    ProfileMismatch,
)
from .linalg import ampliate, as_matrix, operator_norm


class BlockProfile:
    """Size rule n -> r_n plus the explicit horizon N1.

    Supported rules: constant r_n = r, and linear r_n = n.
    """

    def __init__(self, kind, horizon, r=None):
        if kind not in ("constant", "linear"):
            raise ValueError(f"unsupported size rule {kind!r}")
        if horizon < 1:
            raise ValueError("horizon must be >= 1")
        if kind == "constant" and (r is None or r < 1):
            raise ValueError("constant profile needs r >= 1")
        self.kind = kind
        self.horizon = int(horizon)
        self.r = int(r) if r is not None else None

    def size(self, n: int) -> int:
        if n < 1:
            raise ValueError("block index must be >= 1")
        return self.r if self.kind == "constant" else n

    def __eq__(self, other):
        return (
            isinstance(other, BlockProfile)
            and self.kind == other.kind
            and self.horizon == other.horizon
            and self.r == other.r
        )

    def __repr__(self):
        extra = f", r={self.r}" if self.kind == "constant" else ""
        return f"BlockProfile({self.kind!r}, horizon={self.horizon}{extra})"


def linear_profile(horizon: int) -> BlockProfile:
    return BlockProfile("linear", horizon)


def constant_profile(r: int, horizon: int) -> BlockProfile:
    return BlockProfile("constant", horizon, r=r)


class TailTemplate:
    """lambda * I + sum of scalar matrix-unit anchors, instantiated in every tail block."""

    def __init__(self, ident=0.0, anchors=None):
        self.ident = complex(ident)
        self.anchors = {}
        for (i, j), w in (anchors or {}).items():
            w = complex(w)
            if w != 0.0:
                self.anchors[(int(i), int(j))] = w

    @property
    def extent(self) -> int:
        """Number of leading coordinates the anchors touch."""
        if not self.anchors:
            return 0
        return 1 + max(max(i, j) for (i, j) in self.anchors)

    def is_zero(self) -> bool:
        return self.ident == 0.0 and not self.anchors

    def instantiate(self, m: int) -> np.ndarray:
        if self.extent > m:
            raise IndexOutOfExplicitRange(f"template touches index {self.extent - 1} in M_{m}")
        out = self.ident * np.eye(m, dtype=np.complex128)
        for (i, j), w in self.anchors.items():
            out[i, j] += w
        return out

    def __add__(self, other):
        anchors = dict(self.anchors)
        for k, w in other.anchors.items():
            anchors[k] = anchors.get(k, 0.0) + w
        return TailTemplate(self.ident + other.ident, anchors)

    def scaled(self, c):
        c = complex(c)
        return TailTemplate(c * self.ident, {k: c * w for k, w in self.anchors.items()})

    def __mul__(self, other):
        anchors = {}
        for (i, j), w in self.anchors.items():
            if other.ident != 0.0:
                anchors[(i, j)] = anchors.get((i, j), 0.0) + w * other.ident
            for (k, l), u in other.anchors.items():
                if j == k:
                    anchors[(i, l)] = anchors.get((i, l), 0.0) + w * u
        if self.ident != 0.0:
            for (k, l), u in other.anchors.items():
                anchors[(k, l)] = anchors.get((k, l), 0.0) + self.ident * u
        return TailTemplate(self.ident * other.ident, anchors)

    def adjoint(self):
        return TailTemplate(
            self.ident.conjugate(), {(j, i): w.conjugate() for (i, j), w in self.anchors.items()}
        )

    def __eq__(self, other):
        return (
            isinstance(other, TailTemplate)
            and self.ident == other.ident
            and self.anchors == other.anchors
        )

    def __repr__(self):
        return f"TailTemplate(ident={self.ident}, anchors={self.anchors})"


class BlockElement:
    """Element of prod_n M_{r_n}: explicit blocks for n <= N1, template beyond."""

    def __init__(self, profile: BlockProfile, blocks, tail: TailTemplate | None = None):
        self.profile = profile
        self.tail = tail if tail is not None else TailTemplate()
        blocks = list(blocks)
        if len(blocks) != profile.horizon:
            raise DimensionMismatch(
                f"expected {profile.horizon} explicit blocks, got {len(blocks)}"
            )
        self.blocks = []
        for n, b in enumerate(blocks, start=1):
            b = as_matrix(b)
            want = profile.size(n)
            if b.shape != (want, want):
                raise DimensionMismatch(f"block {n} has shape {b.shape}, expected {(want, want)}")
            self.blocks.append(b)
        if self.tail.extent > profile.size(profile.horizon + 1):
            raise IndexOutOfExplicitRange("tail anchors do not fit the first tail block")

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, profile: BlockProfile) -> "BlockElement":
        blocks = [np.zeros((profile.size(n), profile.size(n)), dtype=np.complex128)
                  for n in range(1, profile.horizon + 1)]
        return cls(profile, blocks, TailTemplate())

    @classmethod
    def one(cls, profile: BlockProfile) -> "BlockElement":
        blocks = [np.eye(profile.size(n), dtype=np.complex128)
                  for n in range(1, profile.horizon + 1)]
        return cls(profile, blocks, TailTemplate(ident=1.0))

    @classmethod
    def from_tail(cls, profile: BlockProfile, tail: TailTemplate) -> "BlockElement":
        """Element whose every block (explicit and tail) is the template."""
        blocks = [tail.instantiate(profile.size(n)) for n in range(1, profile.horizon + 1)]
        return cls(profile, blocks, tail)

    # -- arithmetic ---------------------------------------------------------
    def _check(self, other):
        if self.profile != other.profile:
            raise ProfileMismatch(f"{self.profile} vs {other.profile}")

    def __add__(self, other):
        self._check(other)
        return BlockElement(
            self.profile,
            [a + b for a, b in zip(self.blocks, other.blocks)],
            self.tail + other.tail,
        )

    def __sub__(self, other):
        return self + other.scaled(-1.0)

    def scaled(self, c) -> "BlockElement":
        return BlockElement(self.profile, [c * b for b in self.blocks], self.tail.scaled(c))

    def __rmul__(self, c):
        if np.isscalar(c):
            return self.scaled(c)
        return NotImplemented

    def __matmul__(self, other):
        self._check(other)
        return BlockElement(
            self.profile,
            [a @ b for a, b in zip(self.blocks, other.blocks)],
            self.tail * other.tail,
        )

    def adjoint(self) -> "BlockElement":
        return BlockElement(
            self.profile, [b.conj().T for b in self.blocks], self.tail.adjoint()
        )

    def gamma(self, n: int) -> np.ndarray:
        """The n-th block; instantiates the tail template for n beyond the horizon."""
        if n < 1:
            raise ValueError("block index must be >= 1")
        if n <= self.profile.horizon:
            return self.blocks[n - 1].copy()
        return self.tail.instantiate(self.profile.size(n))

    def __repr__(self):
        return f"BlockElement({self.profile!r}, tail={self.tail!r})"


def gamma(elem: BlockElement, n: int) -> np.ndarray:
    return elem.gamma(n)


# -- d x d arrays of block elements ----------------------------------------

def _as_grid(a):
    if isinstance(a, BlockElement):
        return [[a]]
    rows = [list(r) for r in a]
    d = len(rows)
    if d == 0 or any(len(r) != d for r in rows):
        raise DimensionMismatch("array of block elements is not square")
    profile = rows[0][0].profile
    for r in rows:
        for e in r:
            if not isinstance(e, BlockElement):
                raise DimensionMismatch("array entries must be BlockElements")
            if e.profile != profile:
                raise ProfileMismatch("array entries over mixed profiles")
    return rows


def gamma_grid(a, n: int) -> np.ndarray:
    """Ampliated n-th block of a d x d array."""
    rows = _as_grid(a)
    return ampliate([[e.gamma(n) for e in r] for r in rows])


def _tail_block_index(rows) -> int:
    """Smallest block index whose instantiation realizes the eventual tail norm."""
    profile = rows[0][0].profile
    n1 = profile.horizon
    if profile.kind == "constant":
        return n1 + 1
    extent = max((e.tail.extent for r in rows for e in r), default=0)
    return max(n1 + 1, extent + 1)


def sup_norm(a) -> float:
    """sup_n of the ampliated block norms; exact because tails are stable."""
    rows = _as_grid(a)
    n1 = rows[0][0].profile.horizon
    best = 0.0
    for n in range(1, n1 + 1):
        best = max(best, operator_norm(gamma_grid(rows, n)))
    return max(best, operator_norm(gamma_grid(rows, _tail_block_index(rows))))


def quotient_norm(a) -> float:
    """Norm in the quotient by the blockwise-vanishing part: the limsup of block
    norms, which equals the stable tail value."""
    rows = _as_grid(a)
    return operator_norm(gamma_grid(rows, _tail_block_index(rows)))


def strict_kappa_gap(a, cfg: ToleranceConfig = DEFAULT):
    """(sup_norm - quotient_norm, gap > norm_tol)."""
    gap = sup_norm(a) - quotient_norm(a)
    return gap, bool(gap > cfg.norm_tol)


def norm_attaining_block(a, cfg: ToleranceConfig = DEFAULT):
    """Smallest explicit block index attaining the sup norm (within norm_tol).

    The explicit horizon is the finite search window; when the sup is only
    realized by the tail template (the behavior at infinity), returns None.
    """
    rows = _as_grid(a)
    n1 = rows[0][0].profile.horizon
    s = sup_norm(rows)
    for n in range(1, n1 + 1):
        if operator_norm(gamma_grid(rows, n)) >= s - cfg.norm_tol:
            return n
    return None


# -- the paired-shift generators and the canonical shuffle ------------------

def shift_generator(m: int, horizon=None) -> BlockElement:
    """The m-th paired-shift generator in prod_n M_n: the (2m-1, 2m) matrix unit
    with weight 1 at block n = 2m, weight 1/2 in every later block, 0 before."""
    if m < 1:
        raise ValueError("generator index must be >= 1")
    if horizon is None:
        horizon = 2 * m
    if horizon < 2 * m:
        raise ValueError(f"horizon must be >= {2 * m} for generator {m}")
    profile = linear_profile(horizon)
    blocks = []
    for n in range(1, horizon + 1):
        b = np.zeros((n, n), dtype=np.complex128)
        if n == 2 * m:
            b[2 * m - 2, 2 * m - 1] = 1.0
        elif n > 2 * m:
            b[2 * m - 2, 2 * m - 1] = 0.5
        blocks.append(b)
    return BlockElement(profile, blocks, TailTemplate(anchors={(2 * m - 2, 2 * m - 1): 0.5}))


def coefficient_element(profile: BlockProfile, c0, c_list) -> "list[list[BlockElement]]":
    """d x d array C0 (x) I + sum_k C_k (x) T_k over the given linear profile."""
    c0 = as_matrix(c0)
    cs = [as_matrix(c) for c in c_list]
    d = c0.shape[0]
    if c0.shape != (d, d) or any(c.shape != (d, d) for c in cs):
        raise DimensionMismatch("coefficients must be square of one size")
    if profile.kind != "linear":
        raise FormMismatch("shift generators live over the linear profile")
    if profile.horizon < 2 * len(cs):
        raise FormMismatch("profile horizon too small for the generator count")
    one = BlockElement.one(profile)
    gens = [shift_generator(k + 1, profile.horizon) for k in range(len(cs))]
    grid = []
    for i in range(d):
        row = []
        for j in range(d):
            e = c0[i, j] * one
            for c, g in zip(cs, gens):
                e = e + c[i, j] * g
            row.append(e)
        grid.append(row)
    return grid


def _recognize_coefficients(rows):
    """Recover (C0, [C_k]) from an array built from the paired-shift generators."""
    profile = rows[0][0].profile
    if profile.kind != "linear":
        raise FormMismatch("expected the linear profile")
    d = len(rows)
    r = 0
    for row in rows:
        for e in row:
            for (i, j) in e.tail.anchors:
                if j != i + 1 or i % 2 != 0:
                    raise FormMismatch(f"anchor at {(i, j)} is not a paired shift position")
                r = max(r, (i + 2) // 2)
    if profile.horizon < 2 * r:
        raise FormMismatch("horizon too small for the recognized generators")
    c0 = np.array([[rows[i][j].tail.ident for j in range(d)] for i in range(d)])
    cs = []
    for k in range(1, r + 1):
        ck = np.array(
            [[2.0 * rows[i][j].tail.anchors.get((2 * k - 2, 2 * k - 1), 0.0) for j in range(d)]
             for i in range(d)]
        )
        cs.append(ck)
    expected = coefficient_element(profile, c0, cs)
    for i in range(d):
        for j in range(d):
            a, b = rows[i][j], expected[i][j]
            if a.tail != b.tail:
                raise FormMismatch("tail template outside the supported form")
            for ba, bb in zip(a.blocks, b.blocks):
                if np.max(np.abs(ba - bb)) > 1e-12 * (1.0 + np.max(np.abs(bb))):
                    raise FormMismatch("explicit blocks outside the supported form")
    return c0, cs


def shuffle_norms(a, n: int) -> "list[float]":
    """Block norms of gamma_n(A) after the canonical shuffle, for A of the form
    C0 (x) I + sum_k C_k (x) T_k.

    Pairs (2k-1, 2k) with 2k < n contribute [[C0, C_k/2], [0, C0]]; the pair
    with 2k = n contributes the full-weight block; identity padding contributes
    one ||C0|| entry. The max of the list is the norm of the ampliated block.
    """
    rows = _as_grid(a)
    c0, cs = _recognize_coefficients(rows)
    r = len(cs)
    d = c0.shape[0]
    zero = np.zeros((d, d), dtype=np.complex128)

    def corner(ck, w):
        return operator_norm(ampliate([[c0, w * ck], [zero, c0]]))

    values = []
    for k in range(1, min(n // 2, r) + 1):
        if 2 * k == n:
            values.append(corner(cs[k - 1], 1.0))
        else:
            values.append(corner(cs[k - 1], 0.5))
    if n % 2 == 1 or n // 2 > r:
        values.append(operator_norm(c0))
    return values


# -- block algebras ----------------------------------------------------------

class BlockAlgebra:
    """Span of block-sequence generators, saturated under products.

    Tail templates are closed under products, so saturation tracks both the
    explicit blocks and the symbolic tails. The span basis is orthonormal in
    the flattened (blocks, identity coefficient, anchor weights) coordinates.
    """

    def __init__(self, generators, unital=True, cfg: ToleranceConfig = DEFAULT, max_rounds=20):
        gens = list(generators)
        if not gens:
            raise DimensionMismatch("need at least one generator")
        profile = gens[0].profile
        for g in gens:
            if g.profile != profile:
                raise ProfileMismatch("generators over mixed profiles")
        self.profile = profile
        self.generators = gens
        self.unital = bool(unital)
        seeds = ([BlockElement.one(profile)] if unital else []) + gens
        basis = _orthonormal_elements(seeds, cfg)
        for _ in range(max_rounds):
            candidates = [a @ b for a in basis for b in basis]
            new_basis = _orthonormal_elements(basis + candidates, cfg)
            if len(new_basis) == len(basis):
                break
            basis = new_basis
        self.span_basis = basis

    @property
    def dim(self) -> int:
        return len(self.span_basis)


def _anchor_support(elems):
    keys = set()
    for e in elems:
        keys.update(e.tail.anchors.keys())
    return sorted(keys)


def _vectorize(elem: BlockElement, support):
    parts = [b.reshape(-1) for b in elem.blocks]
    parts.append(np.array([elem.tail.ident], dtype=np.complex128))
    parts.append(np.array([elem.tail.anchors.get(k, 0.0) for k in support], dtype=np.complex128))
    return np.concatenate(parts)


def _orthonormal_elements(elems, cfg):
    """Gram-Schmidt on block elements through their flat coordinates."""
    support = _anchor_support(elems)
    basis, vecs = [], []
    for e in elems:
        v = _vectorize(e, support)
        orig = float(np.linalg.norm(v))
        w = v.copy()
        reduced = e
        for _ in range(2):
            for bv, be in zip(vecs, basis):
                c = np.vdot(bv, w)
                if c != 0.0:
                    w = w - c * bv
                    reduced = reduced - complex(c) * be
        nrm = float(np.linalg.norm(w))
        if nrm > cfg.structural_tol * (1.0 + orig):
            vecs.append(w / nrm)
            basis.append(reduced.scaled(1.0 / nrm))
    return basis


def compact_part(alg: BlockAlgebra, cfg: ToleranceConfig = DEFAULT):
    """Basis of the zero-tail subspace of span(alg): the elements vanishing at
    infinity (the compact part)."""
    basis = alg.span_basis
    if not basis:
        return []
    support = _anchor_support(basis)
    tails = np.stack(
        [np.concatenate(([e.tail.ident], [e.tail.anchors.get(k, 0.0) for k in support]))
         for e in basis],
        axis=1,
    ).astype(np.complex128)
    gram = tails.conj().T @ tails
    from .linalg import hermitian_eig

    w, v = hermitian_eig(gram, cfg)
    out = []
    for i in range(len(basis)):
        if w[i] <= cfg.structural_tol:
            col = v[:, i]
            e = BlockElement.zero(alg.profile)
            for c, b in zip(col, basis):
                e = e + complex(c) * b
            e = BlockElement(alg.profile, e.blocks, TailTemplate())  # tail is zero by construction
            out.append(e)
    return out


def gamma_quotient_surjectivity(alg: BlockAlgebra, n: int, levels: int, cfg: ToleranceConfig = DEFAULT):
    """Does the compact part surject onto M_{r_n} under gamma_n, and at what cost.

    Returns (surjective, deficit). The deficit samples unit-norm targets in
    M_d(M_{r_n}) for d <= levels, takes the least-squares preimage through the
    compact part plus a multi-start kernel refinement, and reports the worst
    achieved preimage norm minus one: an upper-bound diagnostic, not a
    certificate. Non-surjective algebras report (False, inf).
    """
    if n > alg.profile.horizon:
        raise IndexOutOfExplicitRange("gamma index beyond the explicit horizon")
    rn = alg.profile.size(n)
    compact = compact_part(alg, cfg)
    if not compact:
        return False, math.inf
    g_mat = np.stack([k.gamma(n).reshape(-1) for k in compact], axis=1)  # (rn^2, |K|)
    kernel = _nullspace(g_mat, cfg)
    if g_mat.shape[1] - kernel.shape[1] < rn * rn:
        return False, math.inf

    rng = cfg.rng("blockseq", "epssurj", n)
    deficit = 0.0
    for d in range(1, max(1, levels) + 1):
        for _ in range(8):
            target = rng.standard_normal((d * rn, d * rn)) + 1j * rng.standard_normal((d * rn, d * rn))
            if rng.random() < 0.5:  # rank-one contractions are the sharp targets
                u = target[:, 0] / np.linalg.norm(target[:, 0])
                v = target[0, :] / np.linalg.norm(target[0, :])
                target = np.outer(u, v.conj())
            target = target / operator_norm(target)
            achieved = _preimage_norm(compact, g_mat, kernel, target, d, rn, cfg, rng)
            deficit = max(deficit, achieved - 1.0)
    return True, max(deficit, 0.0)


def _nullspace(g_mat, cfg):
    from .linalg import hermitian_eig

    gram = g_mat.conj().T @ g_mat
    w, v = hermitian_eig(gram, cfg)
    scale = max(float(w[0]), 1.0) if w.size else 1.0
    cols = [v[:, i] for i in range(v.shape[1]) if w[i] <= cfg.structural_tol * scale]
    return np.stack(cols, axis=1) if cols else np.zeros((g_mat.shape[1], 0), dtype=np.complex128)


def _preimage_norm(compact, g_mat, kernel, target, d, rn, cfg, rng):
    coeffs = np.zeros((d, d, len(compact)), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            block = target[i * rn : (i + 1) * rn, j * rn : (j + 1) * rn]
            sol, *_ = np.linalg.lstsq(g_mat, block.reshape(-1), rcond=None)
            coeffs[i, j] = sol

    def grid_norm(cf):
        grid = []
        for i in range(d):
            row = []
            for j in range(d):
                e = BlockElement.zero(compact[0].profile)
                for c, k in zip(cf[i, j], compact):
                    e = e + complex(c) * k
                row.append(e)
            grid.append(row)
        return sup_norm(grid)

    best = grid_norm(coeffs)
    kdim = kernel.shape[1]
    if kdim == 0:
        return best
    # local search over kernel directions (they leave gamma_n untouched)
    starts = max(1, cfg.opt_starts // 8)
    for _ in range(starts):
        cur = coeffs.copy()
        cur_val = grid_norm(cur)
        step = 0.5
        for _ in range(40):
            delta = rng.standard_normal((d, d, kdim)) + 1j * rng.standard_normal((d, d, kdim))
            cand = cur + step * np.einsum("ijk,lk->ijl", delta, kernel)
            val = grid_norm(cand)
            if val < cur_val - 1e-14:
                cur, cur_val = cand, val
            else:
                step *= 0.7
                if step < 1e-4:
                    break
        best = min(best, cur_val)
    return best

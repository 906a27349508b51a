"""C*-correspondences over finite-dimensional C*-algebras and their truncated
Fock representations.

Three correspondence kinds are supported: the graph correspondence of a finite
directed graph (basis: paths), the free module C^d over the scalars (basis:
words), and an algebra viewed as a correspondence over itself (basis: scaled
matrix units under the trace inner product). Creation operators raise the
Fock level and annihilate the top level of the truncation, so identity checks
quantify over levels <= N-1 where the defect cannot reach.
"""

import math
from dataclasses import dataclass

import numpy as np

from .algebras import generate_algebra
from .compress import CompressionReport, WordSpec, invariant_compression, maximizing_vector
from .config import DEFAULT, ToleranceConfig
from .errors import (
    BadSymbol,
    BadVertexSet,
    CutoffTooSmall,
    DimensionMismatch,
    ElementOutsideX,
)
from .linalg import ampliate, as_matrix, as_vector, operator_norm


# -- coefficient algebras ----------------------------------------------------

class FiniteCStarAlgebra:
    """Direct sum of matrix blocks with a faithful tracial state.

    Elements are dense block-diagonal complex matrices; trace_weights are the
    state's weights per block (strictly positive, summing to one).
    """

    def __init__(self, block_dims, trace_weights=None):
        self.block_dims = tuple(int(k) for k in block_dims)
        if not self.block_dims or any(k < 1 for k in self.block_dims):
            raise ValueError("block dims must be positive")
        if trace_weights is None:
            trace_weights = [1.0 / len(self.block_dims)] * len(self.block_dims)
        self.trace_weights = tuple(float(w) for w in trace_weights)
        if len(self.trace_weights) != len(self.block_dims):
            raise ValueError("one weight per block required")
        if any(w <= 0 for w in self.trace_weights):
            raise ValueError("trace must be faithful: weights strictly positive")
        if abs(sum(self.trace_weights) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")
        self.total_dim = sum(self.block_dims)
        self._offsets = np.cumsum((0,) + self.block_dims[:-1])

    def identity(self) -> np.ndarray:
        return np.eye(self.total_dim, dtype=np.complex128)

    def block_slice(self, b):
        o = int(self._offsets[b])
        return slice(o, o + self.block_dims[b])

    def as_element(self, a) -> np.ndarray:
        """Validate block-diagonal support."""
        a = as_matrix(a)
        if a.shape != (self.total_dim, self.total_dim):
            raise DimensionMismatch(f"element of shape {a.shape}, ambient {self.total_dim}")
        mask = np.ones_like(a, dtype=bool)
        for b in range(len(self.block_dims)):
            s = self.block_slice(b)
            mask[s, s] = False
        if mask.any():
            off = float(np.max(np.abs(a[mask])))
            if off > 1e-12 * (1.0 + float(np.max(np.abs(a)))):
                raise ElementOutsideX("element has off-block entries")
            if off > 0.0:
                a = a.copy()
                a[mask] = 0.0
        return a

    def matrix_units(self):
        units = []
        for b, k in enumerate(self.block_dims):
            o = int(self._offsets[b])
            for i in range(k):
                for j in range(k):
                    u = np.zeros((self.total_dim, self.total_dim), dtype=np.complex128)
                    u[o + i, o + j] = 1.0
                    units.append(u)
        return units

    def trace(self, a) -> complex:
        out = 0.0
        for b, k in enumerate(self.block_dims):
            s = self.block_slice(b)
            out += self.trace_weights[b] * np.trace(a[s, s]) / k
        return complex(out)

    def random_element(self, rng) -> np.ndarray:
        a = np.zeros((self.total_dim, self.total_dim), dtype=np.complex128)
        for b, k in enumerate(self.block_dims):
            s = self.block_slice(b)
            a[s, s] = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
        return a


# -- graphs -------------------------------------------------------------------

@dataclass(frozen=True)
class Graph:
    """Finite directed graph; edges carry (name, source, range)."""

    vertices: tuple
    edges: tuple  # of (name, source, range)

    def __post_init__(self):
        vset = set(self.vertices)
        if len(vset) != len(self.vertices):
            raise ValueError("duplicate vertex names")
        for name, s, r in self.edges:
            if s not in vset or r not in vset:
                raise ValueError(f"edge {name} touches unknown vertex")

    def vertex_index(self, v) -> int:
        return self.vertices.index(v)

    def source_index(self, e_idx) -> int:
        return self.vertex_index(self.edges[e_idx][1])

    def range_index(self, e_idx) -> int:
        return self.vertex_index(self.edges[e_idx][2])


def parse_graph(text: str) -> Graph:
    """One record per line: 'vertex NAME' or 'edge NAME SOURCE RANGE'."""
    vertices, edges = [], []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "vertex" and len(parts) == 2:
            vertices.append(parts[1])
        elif parts[0] == "edge" and len(parts) == 4:
            edges.append((parts[1], parts[2], parts[3]))
        else:
            raise ValueError(f"line {ln}: expected 'vertex NAME' or 'edge NAME SRC RNG'")
    return Graph(tuple(vertices), tuple(edges))


def load_graph(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


# -- correspondences ----------------------------------------------------------

class GraphCorrespondence:
    """Edge functions over c0(V): inner product sums over edges with a common source."""

    kind = "graph"

    def __init__(self, graph: Graph):
        if not graph.vertices:
            raise ValueError("graph needs at least one vertex")
        self.graph = graph
        self.algebra = FiniteCStarAlgebra((1,) * len(graph.vertices))
        self.x_dim = len(graph.edges)

    def as_x(self, x) -> np.ndarray:
        x = as_vector(x)
        if x.size != self.x_dim:
            raise ElementOutsideX(f"edge vector of size {x.size}, expected {self.x_dim}")
        return x

    def phi(self, a, x) -> np.ndarray:
        """Left action: scale x(e) by a(r(e))."""
        d = np.diag(a)
        return np.array([d[self.graph.range_index(e)] * x[e] for e in range(self.x_dim)])

    def xact(self, x, a) -> np.ndarray:
        d = np.diag(a)
        return np.array([x[e] * d[self.graph.source_index(e)] for e in range(self.x_dim)])

    def inner(self, x, y) -> np.ndarray:
        vals = np.zeros(len(self.graph.vertices), dtype=np.complex128)
        for e in range(self.x_dim):
            vals[self.graph.source_index(e)] += np.conj(x[e]) * y[e]
        return np.diag(vals)

    def random_x(self, rng) -> np.ndarray:
        return rng.standard_normal(self.x_dim) + 1j * rng.standard_normal(self.x_dim)

    def delta_edge(self, e_idx) -> np.ndarray:
        v = np.zeros(self.x_dim, dtype=np.complex128)
        v[e_idx] = 1.0
        return v


class FreeCorrespondence:
    """C^d over the scalars; the Fock space is the full word space."""

    kind = "free"

    def __init__(self, d: int):
        if d < 1:
            raise ValueError("need d >= 1")
        self.d = d
        self.algebra = FiniteCStarAlgebra((1,), (1.0,))
        self.x_dim = d

    def as_x(self, x) -> np.ndarray:
        x = as_vector(x)
        if x.size != self.d:
            raise ElementOutsideX(f"vector of size {x.size}, expected {self.d}")
        return x

    def phi(self, a, x):
        return complex(a[0, 0]) * x

    def xact(self, x, a):
        return x * complex(a[0, 0])

    def inner(self, x, y):
        return np.array([[np.vdot(x, y)]], dtype=np.complex128)

    def random_x(self, rng):
        return rng.standard_normal(self.d) + 1j * rng.standard_normal(self.d)


class SelfCorrespondence:
    """A finite-dimensional C*-algebra as a correspondence over itself."""

    kind = "self"

    def __init__(self, algebra: FiniteCStarAlgebra):
        self.algebra = algebra
        self.x_dim = algebra.total_dim  # elements are block-diagonal matrices

    def as_x(self, x) -> np.ndarray:
        return self.algebra.as_element(x)

    def phi(self, a, x):
        return a @ x

    def xact(self, x, a):
        return x @ a

    def inner(self, x, y):
        return x.conj().T @ y

    def random_x(self, rng):
        return self.algebra.random_element(rng)


# -- truncated Fock spaces ----------------------------------------------------

class TruncatedFockSpace:
    """Level-graded realization of the Fock correspondence up to level N.

    The basis is orthonormal for the trace localization of the module inner
    product; for graphs it is exactly the path basis, for the free module the
    word basis, and for a self-correspondence the scaled matrix units repeated
    per level.
    """

    def __init__(self, corr, cutoff: int):
        if cutoff < 1:
            raise CutoffTooSmall("cutoff must be >= 1")
        self.corr = corr
        self.cutoff = int(cutoff)
        self._build_basis()

    # basis bookkeeping
    def _build_basis(self):
        corr = self.corr
        if corr.kind == "graph":
            g = corr.graph
            levels = [[("v", v) for v in range(len(g.vertices))]]
            for _ in range(self.cutoff):
                prev = levels[-1]
                nxt = []
                for e in range(len(g.edges)):
                    for item in prev:
                        if self._range_of(item) == corr.graph.source_index(e):
                            nxt.append(("p", (e,) + (item[1] if item[0] == "p" else ())))
                # keep deterministic order: by (edge tuple)
                nxt.sort(key=lambda it: it[1])
                levels.append(nxt)
            self.levels = levels
        elif corr.kind == "free":
            levels = [[()]]
            for k in range(self.cutoff):
                prev = levels[-1]
                levels.append([(letter,) + w for letter in range(corr.d) for w in prev])
            self.levels = levels
        elif corr.kind == "self":
            alg = corr.algebra
            units = []
            for b, kdim in enumerate(alg.block_dims):
                for i in range(kdim):
                    for j in range(kdim):
                        units.append((b, i, j))
            self.unit_labels = units
            self.levels = [list(units) for _ in range(self.cutoff + 1)]
            self._unit_mats = []
            self._unit_scales = []
            for (b, i, j) in units:
                m = np.zeros((alg.total_dim, alg.total_dim), dtype=np.complex128)
                o = int(alg._offsets[b])
                m[o + i, o + j] = 1.0
                self._unit_mats.append(m)
                self._unit_scales.append(math.sqrt(alg.block_dims[b] / alg.trace_weights[b]))
        else:
            raise ValueError(f"unknown correspondence kind {corr.kind!r}")

        self.level_dims = [len(lv) for lv in self.levels]
        self.level_offsets = np.cumsum([0] + self.level_dims)
        self.dim = int(self.level_offsets[-1])

    def _range_of(self, item):
        """Range vertex of a graph basis item (its outermost edge, or the vertex)."""
        if item[0] == "v":
            return item[1]
        return self.corr.graph.range_index(item[1][0])

    def level_slice(self, k):
        return slice(int(self.level_offsets[k]), int(self.level_offsets[k + 1]))

    def level_projector(self, max_level: int) -> np.ndarray:
        p = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for k in range(min(max_level, self.cutoff) + 1):
            s = self.level_slice(k)
            p[s, s] = np.eye(self.level_dims[k])
        return p

    # operators
    def creation(self, x) -> np.ndarray:
        """Creation operator of x: raises the level, annihilates level N."""
        x = self.corr.as_x(x)
        corr = self.corr
        out = np.zeros((self.dim, self.dim), dtype=np.complex128)
        if corr.kind == "graph":
            for k in range(self.cutoff):
                src = self.levels[k]
                dst = self.levels[k + 1]
                index = {item: i for i, item in enumerate(dst)}
                off_s, off_d = self.level_offsets[k], self.level_offsets[k + 1]
                for ci, item in enumerate(src):
                    rng_v = self._range_of(item)
                    tail = item[1] if item[0] == "p" else ()
                    for e in range(corr.x_dim):
                        if x[e] != 0 and corr.graph.source_index(e) == rng_v:
                            ri = index[("p", (e,) + tail)]
                            out[off_d + ri, off_s + ci] += x[e]
        elif corr.kind == "free":
            for k in range(self.cutoff):
                src = self.levels[k]
                dst = self.levels[k + 1]
                index = {w: i for i, w in enumerate(dst)}
                off_s, off_d = self.level_offsets[k], self.level_offsets[k + 1]
                for ci, w in enumerate(src):
                    for letter in range(corr.d):
                        if x[letter] != 0:
                            out[off_d + index[(letter,) + w], off_s + ci] += x[letter]
        else:  # self
            block = self._left_mult_matrix(x)
            for k in range(self.cutoff):
                s, d = self.level_slice(k), self.level_slice(k + 1)
                out[d, s] = block
        return out

    def left_action(self, a) -> np.ndarray:
        """rho(a): block-diagonal across levels; level 0 is left multiplication."""
        a = self.corr.algebra.as_element(a)
        corr = self.corr
        out = np.zeros((self.dim, self.dim), dtype=np.complex128)
        if corr.kind == "graph":
            d = np.diag(a)
            for k in range(self.cutoff + 1):
                off = self.level_offsets[k]
                for ci, item in enumerate(self.levels[k]):
                    out[off + ci, off + ci] = d[self._range_of(item)]
        elif corr.kind == "free":
            out = complex(a[0, 0]) * np.eye(self.dim, dtype=np.complex128)
        else:
            block = self._left_mult_matrix(a)
            for k in range(self.cutoff + 1):
                s = self.level_slice(k)
                out[s, s] = block
        return out

    def _left_mult_matrix(self, x) -> np.ndarray:
        """Left multiplication by x on L^2(A, trace), in the scaled-unit basis."""
        alg = self.corr.algebra
        n = len(self.unit_labels)
        out = np.zeros((n, n), dtype=np.complex128)
        for q in range(n):
            img = x @ self._unit_mats[q] * self._unit_scales[q]
            for p in range(n):
                out[p, q] = self._unit_scales[p] * alg.trace(self._unit_mats[p].conj().T @ img)
        return out

    def vacuum_dim(self) -> int:
        return self.level_dims[0]


def creation(f: TruncatedFockSpace, x) -> np.ndarray:
    return f.creation(x)


def left_action(f: TruncatedFockSpace, a) -> np.ndarray:
    return f.left_action(a)


def covariance_check(f: TruncatedFockSpace, samples: int = 10, cfg: ToleranceConfig = DEFAULT) -> float:
    """Worst defect of the three module relations over seeded samples, with all
    operators compressed to levels <= N-1 (the truncation's only lossy level)."""
    if f.cutoff < 2:
        raise CutoffTooSmall("need cutoff >= 2 to check relations below the top level")
    rng = cfg.rng("fock", "covariance", f.corr.kind, f.dim)
    p = f.level_projector(f.cutoff - 1)
    worst = 0.0
    for _ in range(samples):
        a = f.corr.algebra.random_element(rng)
        x1 = f.corr.random_x(rng)
        x2 = f.corr.random_x(rng)
        t1, t2 = f.creation(x1), f.creation(x2)
        r1 = f.left_action(a) @ t1 - f.creation(f.corr.phi(a, x1))
        r2 = t1 @ f.left_action(a) - f.creation(f.corr.xact(x1, a))
        r3 = t1.conj().T @ t2 - f.left_action(f.corr.inner(x1, x2))
        for r in (r1, r2, r3):
            worst = max(worst, operator_norm(p @ r @ p))
    return worst


# -- tensor polynomials -------------------------------------------------------

class TensorPoly:
    """Noncommutative polynomial in the symbols rho(a) and t(x)."""

    def __init__(self, terms):
        self.terms = tuple((complex(c), tuple(syms)) for c, syms in terms)

    @classmethod
    def rho(cls, a) -> "TensorPoly":
        return cls([(1.0, (("rho", a),))])

    @classmethod
    def t(cls, x) -> "TensorPoly":
        return cls([(1.0, (("t", x),))])

    @classmethod
    def one(cls) -> "TensorPoly":
        return cls([(1.0, ())])

    @classmethod
    def zero(cls) -> "TensorPoly":
        return cls([])

    def __add__(self, other):
        return TensorPoly(self.terms + other.terms)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, other):
        if np.isscalar(other):
            return TensorPoly([(c * complex(other), s) for c, s in self.terms])
        return TensorPoly(
            [(c1 * c2, s1 + s2) for c1, s1 in self.terms for c2, s2 in other.terms]
        )

    def __rmul__(self, other):
        if np.isscalar(other):
            return TensorPoly([(complex(other) * c, s) for c, s in self.terms])
        return NotImplemented


def _symbol_matrix(f: TruncatedFockSpace, sym) -> np.ndarray:
    kind, data = sym
    try:
        if kind == "rho":
            return f.left_action(data)
        if kind == "t":
            return f.creation(data)
    except (ElementOutsideX, DimensionMismatch) as exc:
        raise BadSymbol(str(exc)) from exc
    raise BadSymbol(f"unknown symbol kind {kind!r}")


def eval_tensor_poly(f: TruncatedFockSpace, poly: TensorPoly) -> np.ndarray:
    """Matrix of the polynomial on the truncation; linear in the coefficients."""
    out = np.zeros((f.dim, f.dim), dtype=np.complex128)
    eye = np.eye(f.dim, dtype=np.complex128)
    for coef, syms in poly.terms:
        m = eye
        for sym in syms:
            m = m @ _symbol_matrix(f, sym)
        out += coef * m
    return out


def toeplitz_norm_estimate(corr, poly: TensorPoly, n_list, cfg: ToleranceConfig = DEFAULT):
    """Norms of the polynomial at increasing cutoffs: a non-decreasing sequence
    of lower bounds for the full Fock norm (never an exact value)."""
    n_list = list(n_list)
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("cutoff list must be increasing")
    out = []
    for n in n_list:
        f = TruncatedFockSpace(corr, n)
        out.append(operator_norm(eval_tensor_poly(f, poly)))
    return out


# -- RFD compression of tensor polynomials ------------------------------------

def _left_action_algebra(f: TruncatedFockSpace, cfg):
    mats = [f.left_action(u) for u in f.corr.algebra.matrix_units()]
    return generate_algebra(mats, unital=True, cfg=cfg)


def rfd_compression_tensor(f: TruncatedFockSpace, grid, cfg: ToleranceConfig = DEFAULT) -> CompressionReport:
    """Norm-attaining compression of a d x d array of tensor polynomials.

    The subspace comes from the suffix construction seeded with the maximizing
    vector's components and is invariant for the left action; the compressed
    pair (rho', t') keeps rho' a unital *-homomorphism and both module
    relations (the isometry relation is what compression gives up), and the
    entrywise compressed evaluation attains the truncated norm.
    """
    rows = [list(r) for r in grid]
    d = len(rows)
    if any(len(r) != d for r in rows):
        raise DimensionMismatch("array must be square")

    mats = [[eval_tensor_poly(f, poly) for poly in r] for r in rows]
    big = ampliate(mats)
    zeta = maximizing_vector(big, cfg)
    m = f.dim
    xis = [zeta[i * m : (i + 1) * m] for i in range(d)]

    words = []
    for r in rows:
        for poly in r:
            for coef, syms in poly.terms:
                if syms:
                    words.append(
                        WordSpec(tuple((False, _symbol_matrix(f, s)) for s in syms), coef)
                    )
    alg = _left_action_algebra(f, cfg)
    base = invariant_compression(alg, words, xis, cfg)
    p = base.subspace_basis

    def comp(mat):
        return p.conj().T @ mat @ p

    def eval_compressed(poly):
        out = np.zeros((p.shape[1], p.shape[1]), dtype=np.complex128)
        eye = np.eye(p.shape[1], dtype=np.complex128)
        for coef, syms in poly.terms:
            mcur = eye
            for s in syms:
                mcur = mcur @ comp(_symbol_matrix(f, s))
            out += coef * mcur
        return out

    comp_entries = [[eval_compressed(poly) for poly in r] for r in rows]
    norm_orig = operator_norm(big)
    norm_comp = operator_norm(ampliate(comp_entries))

    # compressed-pair relations
    rng = cfg.rng("fock", "rfd-compress", f.corr.kind, d)
    worst = 0.0
    units = f.corr.algebra.matrix_units()
    comp_units = [comp(f.left_action(u)) for u in units]
    for i, u in enumerate(units):
        worst = max(worst, operator_norm(comp(f.left_action(u.conj().T)) - comp_units[i].conj().T))
        for j, v in enumerate(units):
            worst = max(
                worst, operator_norm(comp(f.left_action(u @ v)) - comp_units[i] @ comp_units[j])
            )
    for _ in range(10):
        a = f.corr.algebra.random_element(rng)
        x = f.corr.random_x(rng)
        ca, cx = comp(f.left_action(a)), comp(f.creation(x))
        worst = max(worst, operator_norm(ca @ cx - comp(f.creation(f.corr.phi(a, x)))))
        worst = max(worst, operator_norm(cx @ ca - comp(f.creation(f.corr.xact(x, a)))))

    ops = {f"s{i}{j}": comp_entries[i][j] for i in range(d) for j in range(d)}
    return CompressionReport(
        subspace_basis=p,
        compressed_ops=ops,
        identity_residual=base.identity_residual,
        norm_original=norm_orig,
        norm_compressed=norm_comp,
        dim_F=p.shape[1],
        extras={"covariance_residual": worst},
    )


# -- subgraph restriction ------------------------------------------------------

@dataclass
class SubgraphRestriction:
    """Generator-level restriction map onto the induced subgraph's tensor algebra."""

    parent: Graph
    sub: Graph
    vertex_map: dict  # parent vertex index -> sub vertex index
    edge_map: dict  # parent edge index -> sub edge index (only edges inside F)

    def gamma(self, a) -> np.ndarray:
        """Restrict a diagonal coefficient to the retained vertices."""
        d = np.diag(a)
        out = np.zeros(len(self.sub.vertices), dtype=np.complex128)
        for pv, sv in self.vertex_map.items():
            out[sv] = d[pv]
        return np.diag(out)

    def delta(self, x) -> np.ndarray:
        """Restrict an edge vector to edges inside the subgraph (others to 0)."""
        out = np.zeros(len(self.sub.edges), dtype=np.complex128)
        for pe, se in self.edge_map.items():
            out[se] = x[pe]
        return out

    def map_poly(self, poly: TensorPoly) -> TensorPoly:
        terms = []
        for coef, syms in poly.terms:
            mapped = []
            for kind, data in syms:
                if kind == "rho":
                    mapped.append(("rho", self.gamma(data)))
                else:
                    mapped.append(("t", self.delta(data)))
            terms.append((coef, tuple(mapped)))
        return TensorPoly(terms)


def subgraph_restriction(graph: Graph, f_vertices, cutoff: int, cfg: ToleranceConfig = DEFAULT, samples: int = 12):
    """Restriction onto the subgraph induced by f_vertices, with its isometry
    deficit on sampled elements of the subalgebra generated by the retained
    generators (expected ~0 at a common cutoff: the parent action on paths that
    stay inside the subgraph is the subgraph action)."""
    f_set = list(dict.fromkeys(f_vertices))
    if not f_set:
        raise BadVertexSet("empty vertex set")
    if any(v not in graph.vertices for v in f_set):
        raise BadVertexSet(f"unknown vertices in {f_set}")

    vmap, emap = {}, {}
    sub_edges = []
    for v in f_set:
        vmap[graph.vertex_index(v)] = len(vmap)
    for idx, (name, s, r) in enumerate(graph.edges):
        if s in f_set and r in f_set:
            emap[idx] = len(sub_edges)
            sub_edges.append((name, s, r))
    sub = Graph(tuple(f_set), tuple(sub_edges))
    restr = SubgraphRestriction(graph, sub, vmap, emap)

    corr_g = GraphCorrespondence(graph)
    corr_h = GraphCorrespondence(sub)
    fock_g = TruncatedFockSpace(corr_g, cutoff)
    fock_h = TruncatedFockSpace(corr_h, cutoff)

    rng = cfg.rng("fock", "subgraph", len(f_set), cutoff)
    # generator polynomials of the retained subalgebra
    gen_polys = [TensorPoly.rho(_vertex_delta_matrix(graph, v)) for v in f_set]
    gen_polys += [TensorPoly.t(corr_g.delta_edge(e)) for e in emap]

    deficit = 0.0
    mult_resid = 0.0
    for _ in range(samples):
        s1 = _random_word_poly(gen_polys, rng)
        s2 = _random_word_poly(gen_polys, rng)
        for s in (s1, s2, s1 + s2):
            a_g = eval_tensor_poly(fock_g, s)
            a_h = eval_tensor_poly(fock_h, restr.map_poly(s))
            deficit = max(deficit, operator_norm(a_g) - operator_norm(a_h))
        prod_h = eval_tensor_poly(fock_h, restr.map_poly(s1 * s2))
        sep_h = eval_tensor_poly(fock_h, restr.map_poly(s1)) @ eval_tensor_poly(fock_h, restr.map_poly(s2))
        mult_resid = max(mult_resid, operator_norm(prod_h - sep_h))
    return restr, max(deficit, mult_resid)


def _vertex_delta_matrix(graph: Graph, v) -> np.ndarray:
    n = len(graph.vertices)
    m = np.zeros((n, n), dtype=np.complex128)
    m[graph.vertex_index(v), graph.vertex_index(v)] = 1.0
    return m


def _random_word_poly(gen_polys, rng) -> TensorPoly:
    out = TensorPoly.zero()
    n_terms = int(rng.integers(1, 4))
    for _ in range(n_terms):
        length = int(rng.integers(1, 4))
        term = None
        for _ in range(length):
            g = gen_polys[int(rng.integers(0, len(gen_polys)))]
            term = g if term is None else term * g
        coef = complex(rng.standard_normal() + 1j * rng.standard_normal())
        out = out + coef * term
    return out

"""Compression constructions: invariant subspaces, norm attainment, bimodule maps."""

import numpy as np
import pytest

from opalg.algebras import generate_algebra
from opalg.compress import (
    WordSpec,
    bimodule_compression,
    certifying_xi,
    invariant_compression,
    maximizing_vector,
    norm_attaining_compression,
    word_norm_compression,
)
from opalg.errors import EntriesNotInAlgebra, ZeroMatrix
from opalg.linalg import ampliate, identity, matrix_unit, operator_norm

from conftest import rand_complex


def upper_triangular_algebra(n=3):
    gens = [matrix_unit(n, i, j) for i in range(n) for j in range(i + 1, n)]
    return generate_algebra(gens, unital=True)


class TestMaximizingVector:
    def test_matrix_unit(self):
        z = maximizing_vector(matrix_unit(2, 0, 1))
        assert abs(abs(z[1]) - 1.0) < 1e-12

    def test_diag(self):
        z = maximizing_vector(np.diag([1.0, 2.0]))
        assert abs(abs(z[1]) - 1.0) < 1e-12

    def test_random(self, rng):
        a = rand_complex(rng, 6, 6)
        z = maximizing_vector(a)
        assert np.linalg.norm(a @ z) / operator_norm(a) >= 1 - 1e-9

    def test_zero_rejected(self):
        with pytest.raises(ZeroMatrix):
            maximizing_vector(np.zeros((2, 2)))


class TestInvariantCompression:
    def test_no_words(self, rng):
        alg = generate_algebra([rand_complex(rng, 4, 4)], unital=True)
        rep = invariant_compression(alg, [], [np.eye(4)[:, 0]])
        assert rep.identity_residual <= 1e-10
        assert rep.dim_F >= 1

    def test_two_factor_word(self, rng):
        alg = generate_algebra([identity(8)], unital=True)
        w = WordSpec.plain(rand_complex(rng, 8, 8), rand_complex(rng, 8, 8))
        rep = invariant_compression(alg, [w], [np.eye(8)[:, 0]])
        assert rep.identity_residual <= 1e-10

    def test_star_word(self, rng):
        alg = upper_triangular_algebra()
        a, b = alg.random_element(rng), alg.random_element(rng)
        w = WordSpec(((False, a), (True, b), (False, a)))
        rep = invariant_compression(alg, [w], [np.eye(3)[:, 0]])
        assert rep.identity_residual <= 1e-10

    def test_exhaustive_word_lengths(self, rng):
        # all word lengths <= 4, plain and adjoint-bearing, several seeds
        for seed in range(5):
            local = np.random.default_rng(seed)
            gens = [rand_complex(local, 5, 5) for _ in range(2)]
            alg = generate_algebra(gens, unital=True)
            xis = [np.asarray(local.standard_normal(5), dtype=complex)]
            for length in range(1, 5):
                factors = tuple(
                    (bool(local.integers(0, 2)), rand_complex(local, 5, 5)) for _ in range(length)
                )
                w = WordSpec(factors, coefficient=complex(local.standard_normal()))
                rep = invariant_compression(alg, [w], xis)
                assert rep.identity_residual <= 1e-10

    def test_dim_bound(self, rng):
        alg = generate_algebra([rand_complex(rng, 6, 6)], unital=True)
        grid = [[alg.random_element(rng) for _ in range(2)] for _ in range(2)]
        rep = norm_attaining_compression(alg, grid)
        assert rep.dim_F <= (2) * (1 + alg.dim)


class TestNormAttaining:
    def test_scalar_algebra(self):
        alg = generate_algebra([identity(4)], unital=True)
        rep = norm_attaining_compression(alg, [[identity(4)]])
        assert rep.dim_F == 1
        assert rep.norm_original == pytest.approx(1.0)
        assert rep.norm_compressed == pytest.approx(1.0)

    def test_upper_triangular_corner(self):
        alg = upper_triangular_algebra()
        rep = norm_attaining_compression(alg, [[matrix_unit(3, 0, 2)]])
        assert rep.norm_compressed >= 1.0 - 1e-8
        assert rep.dim_F <= 3

    def test_seeded_suite(self):
        for seed in range(20):
            rng = np.random.default_rng(seed)
            gens = [rand_complex(rng, 6, 6) for _ in range(int(rng.integers(1, 4)))]
            alg = generate_algebra(gens, unital=True)
            for d in (1, 2):
                grid = [[alg.random_element(rng) for _ in range(d)] for _ in range(d)]
                rep = norm_attaining_compression(alg, grid)
                assert rep.norm_original - rep.norm_compressed <= 1e-8
                assert rep.extras["multiplicativity_residual"] <= 1e-9

    def test_entries_must_lie_in_span(self, rng):
        alg = generate_algebra([matrix_unit(2, 0, 1)], unital=True)
        with pytest.raises(EntriesNotInAlgebra):
            norm_attaining_compression(alg, [[matrix_unit(2, 1, 0)]])


class TestBimodule:
    def test_full_space_identity_map(self, rng):
        alg = generate_algebra([rand_complex(rng, 3, 3)], unital=True)
        bim = bimodule_compression(alg, [np.eye(3)[:, k] for k in range(3)])
        assert bim.dim == 3
        t = rand_complex(rng, 3, 3)
        assert operator_norm(bim.rho(t)) == pytest.approx(operator_norm(t))

    def test_identity_on_samples(self, rng):
        alg = upper_triangular_algebra()
        bim = bimodule_compression(alg, [np.eye(3)[:, 0]], samples=25)
        assert bim.bimodule_residual <= 1e-10
        assert bim.multiplicativity_residual <= 1e-10

    def test_specialization_t_identity(self, rng):
        alg = upper_triangular_algebra()
        bim = bimodule_compression(alg, [np.asarray(rng.standard_normal(3), dtype=complex)])
        a, b = alg.random_element(rng), alg.random_element(rng)
        lhs = bim.rho(a.conj().T @ b)
        rhs = bim.rho(a).conj().T @ bim.rho(b)
        assert operator_norm(lhs - rhs) <= 1e-10

    def test_identity_needs_algebra_membership(self, rng):
        # the bimodule identity may genuinely fail when a, b are not in the algebra
        alg = generate_algebra([matrix_unit(3, 0, 1)], unital=True)
        bim = bimodule_compression(alg, [np.eye(3)[:, 0]])
        a = matrix_unit(3, 1, 0) + matrix_unit(3, 2, 1)  # outside span(alg)
        t = identity(3)
        lhs = bim.rho(a.conj().T @ t @ a)
        rhs = bim.rho(a).conj().T @ bim.rho(t) @ bim.rho(a)
        assert operator_norm(lhs - rhs) > 1e-3


class TestHyponormalPipeline:
    def test_compression_route_agrees_with_trace_argument(self, rng):
        # a hyponormal element of a generated algebra: the compressed copies all
        # have PSD self-commutators with zero trace, so both routes see a normal
        # element and the ambient commutator vanishes
        from opalg.algebras import hyponormal_defect

        d = np.diag(rand_complex(rng, 4))
        alg = generate_algebra([d], unital=True)
        a = alg.random_element(rng)  # diagonal, hence normal
        ok, nrm = hyponormal_defect(a)
        assert ok and nrm <= 1e-9
        for k in range(1, 4):
            xi = [np.asarray(rng.standard_normal(4), dtype=complex) for _ in range(k)]
            bim = bimodule_compression(alg, xi)
            b = bim.rho(a)
            comm = b.conj().T @ b - b @ b.conj().T
            assert abs(np.trace(comm)) <= 1e-10
            assert operator_norm(comm) <= 1e-9


class TestCertifyingXi:
    def test_certificate(self, rng):
        d = 2
        grid = [[rand_complex(rng, 5, 5) for _ in range(d)] for _ in range(d)]
        big = ampliate(grid)
        zeta = maximizing_vector(big)
        xi = certifying_xi(grid, zeta)
        assert len(xi) == d + d * d
        alg = generate_algebra([rand_complex(rng, 5, 5)], unital=True)
        bim = bimodule_compression(alg, xi)
        comp = [[bim.rho(grid[i][j]) for j in range(d)] for i in range(d)]
        assert operator_norm(ampliate(comp)) >= operator_norm(big) - 1e-8

    def test_zero_image_vacuous(self, rng):
        grid = [[np.zeros((3, 3), dtype=complex)]]
        zeta = np.asarray(rng.standard_normal(3), dtype=complex)
        zeta /= np.linalg.norm(zeta)
        xi = certifying_xi(grid, zeta)
        assert len(xi) == 2  # zeta and the zero image


class TestWordNorm:
    def test_single_plain_word_matches_norm_attainment(self, rng):
        alg = upper_triangular_algebra()
        a = alg.random_element(rng)
        rep = word_norm_compression(alg, [WordSpec.plain(a)])
        rep2 = norm_attaining_compression(alg, [[a]])
        assert rep.norm_compressed >= rep.norm_original - 1e-8
        assert abs(rep.norm_original - rep2.norm_original) < 1e-12

    def test_cstar_identity(self, rng):
        alg = upper_triangular_algebra()
        a = alg.random_element(rng)
        rep = word_norm_compression(alg, [WordSpec(((True, a), (False, a)))])
        assert abs(rep.norm_original - operator_norm(a) ** 2) < 1e-9
        assert rep.norm_compressed >= rep.norm_original - 1e-8

    def test_mixed_word_sum(self, rng):
        gens = [rand_complex(rng, 5, 5) for _ in range(2)]
        alg = generate_algebra(gens, unital=True)
        words = []
        for _ in range(3):
            a, b, c = (alg.random_element(rng) for _ in range(3))
            words.append(WordSpec(((False, a), (True, b), (False, c))))
        rep = word_norm_compression(alg, words)
        assert rep.norm_compressed >= rep.norm_original - 1e-8

    def test_factors_must_be_in_algebra(self, rng):
        alg = generate_algebra([matrix_unit(3, 0, 1)], unital=True)
        with pytest.raises(EntriesNotInAlgebra):
            word_norm_compression(alg, [WordSpec.plain(matrix_unit(3, 2, 0))])

    def test_plain_factor_from_the_adjoint_side(self, rng):
        # a factor lying in span(alg)* is accepted without the adjoint flag
        alg = generate_algebra([matrix_unit(3, 0, 1)], unital=True)
        rep = word_norm_compression(alg, [WordSpec.plain(matrix_unit(3, 1, 0))])
        assert rep.norm_compressed >= rep.norm_original - 1e-8

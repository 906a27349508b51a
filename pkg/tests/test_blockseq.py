"""Block sequences: exact tail norms, the worked quotient example, surjectivity."""

import numpy as np
import pytest

from opalg.blockseq import (
    BlockAlgebra,
    BlockElement,
    TailTemplate,
    coefficient_element,
    compact_part,
    constant_profile,
    gamma,
    gamma_grid,
    gamma_quotient_surjectivity,
    linear_profile,
    norm_attaining_block,
    quotient_norm,
    shift_generator,
    shuffle_norms,
    strict_kappa_gap,
    sup_norm,
)
from opalg.errors import FormMismatch, IndexOutOfExplicitRange, ProfileMismatch
from opalg.linalg import operator_norm

from conftest import rand_complex


def random_element(rng, profile):
    blocks = [rand_complex(rng, profile.size(n), profile.size(n)) for n in range(1, profile.horizon + 1)]
    anchors = {}
    first_tail = profile.size(profile.horizon + 1)
    for _ in range(int(rng.integers(0, 3))):
        i, j = int(rng.integers(0, first_tail)), int(rng.integers(0, first_tail))
        anchors[(i, j)] = complex(rng.standard_normal(), rng.standard_normal())
    ident = complex(rng.standard_normal(), rng.standard_normal()) if rng.random() < 0.5 else 0.0
    return BlockElement(profile, blocks, TailTemplate(ident, anchors))


class TestGamma:
    def test_shift_blocks(self):
        t1 = shift_generator(1)
        assert np.array_equal(gamma(t1, 2), np.array([[0, 1], [0, 0]], dtype=complex))
        g3 = gamma(t1, 3)
        assert g3.shape == (3, 3) and g3[0, 1] == 0.5 and np.count_nonzero(g3) == 1
        assert np.array_equal(gamma(t1, 1), np.zeros((1, 1)))

    def test_template_index_bound(self):
        with pytest.raises(IndexOutOfExplicitRange):
            BlockElement(constant_profile(2, 1), [np.zeros((2, 2))], TailTemplate(anchors={(2, 0): 1.0}))


class TestNorms:
    def test_zero(self):
        assert sup_norm(BlockElement.zero(linear_profile(2))) == 0.0

    def test_shift_sup_and_quotient(self):
        t1 = shift_generator(1)
        assert sup_norm(t1) == pytest.approx(1.0)
        assert quotient_norm(t1) == pytest.approx(0.5)

    def test_identity_grid(self):
        one = BlockElement.one(linear_profile(3))
        assert sup_norm(one) == pytest.approx(1.0)
        gap, strict = strict_kappa_gap(one)
        assert gap == pytest.approx(0.0) and not strict

    def test_commutator_quarter(self):
        t1 = shift_generator(1)
        comm = t1.adjoint() @ t1 - t1 @ t1.adjoint()
        assert quotient_norm(comm) == 0.25

    def test_compact_element(self):
        prof = constant_profile(2, 2)
        blocks = [np.eye(2, dtype=complex), np.zeros((2, 2))]
        e = BlockElement(prof, blocks, TailTemplate())
        assert quotient_norm(e) == 0.0 and sup_norm(e) == 1.0


class TestLimsupOracle:
    def test_matches_brute_force(self, rng):
        for trial in range(50):
            if trial % 2 == 0:
                profile = linear_profile(int(rng.integers(1, 4)))
            else:
                profile = constant_profile(int(rng.integers(1, 4)), int(rng.integers(1, 4)))
            d = int(rng.integers(1, 3))
            grid = [[random_element(rng, profile) for _ in range(d)] for _ in range(d)]
            n1 = profile.horizon
            brute = [operator_norm(gamma_grid(grid, n)) for n in range(1, n1 + 21)]
            assert abs(quotient_norm(grid) - max(brute[n1:])) <= 1e-12
            assert abs(sup_norm(grid) - max(brute)) <= 1e-12


class TestAttainingBlock:
    def test_shift(self):
        assert norm_attaining_block(shift_generator(1)) == 2

    def test_identity(self):
        assert norm_attaining_block(BlockElement.one(linear_profile(2))) == 1

    def test_sup_only_at_infinity(self):
        prof = constant_profile(1, 10)
        blocks = [np.array([[1.0 - 1.0 / n]], dtype=complex) for n in range(1, 11)]
        e = BlockElement(prof, blocks, TailTemplate(ident=1.0))
        assert norm_attaining_block(e) is None


class TestShuffle:
    def test_single_generator_block(self, rng):
        c0 = rand_complex(rng, 2, 2)
        c1 = rand_complex(rng, 2, 2)
        grid = coefficient_element(linear_profile(2), c0, [c1])
        vals = shuffle_norms(grid, 2)
        assert len(vals) == 1
        z = np.zeros((2, 2))
        gamma_full = np.block([[c0, c1], [z, c0]])
        assert vals[0] == pytest.approx(operator_norm(gamma_full))

    def test_zero_coefficients(self, rng):
        c0 = rand_complex(rng, 2, 2)
        grid = coefficient_element(linear_profile(2), c0, [np.zeros((2, 2))])
        for n in (2, 3, 5):
            vals = shuffle_norms(grid, n)
            assert all(abs(v - operator_norm(c0)) < 1e-12 for v in vals)

    def test_max_matches_direct(self, rng):
        for _ in range(5):
            d, r = int(rng.integers(1, 3)), int(rng.integers(1, 4))
            c0 = rand_complex(rng, d, d)
            cs = [rand_complex(rng, d, d) for _ in range(r)]
            grid = coefficient_element(linear_profile(2 * r), c0, cs)
            for n in range(2, 2 * r + 3):
                assert abs(max(shuffle_norms(grid, n)) - operator_norm(gamma_grid(grid, n))) <= 1e-10

    def test_rejects_other_elements(self, rng):
        prof = linear_profile(2)
        bad = BlockElement(
            prof,
            [np.zeros((1, 1)), np.zeros((2, 2))],
            TailTemplate(anchors={(1, 0): 1.0}),  # lower-triangular anchor
        )
        with pytest.raises(FormMismatch):
            shuffle_norms(bad, 2)


class TestAlgebraStructure:
    def test_products_vanish(self):
        gens = [shift_generator(m, 8) for m in range(1, 5)]
        for a in gens:
            for b in gens:
                p = a @ b
                assert p.tail.is_zero()
                assert all(np.count_nonzero(blk) == 0 for blk in p.blocks)

    def test_profile_mismatch(self):
        with pytest.raises(ProfileMismatch):
            shift_generator(1, 2) + shift_generator(1, 4)

    def test_template_product_adjoint(self):
        t = TailTemplate(ident=2.0, anchors={(0, 1): 0.5})
        u = t * t.adjoint()
        inst = u.instantiate(3)
        direct = t.instantiate(3) @ t.adjoint().instantiate(3)
        assert np.allclose(inst, direct)

    def test_span_dimension(self):
        alg = BlockAlgebra([shift_generator(m, 8) for m in range(1, 5)], unital=True)
        assert alg.dim == 5  # identity plus the four generators


class TestCompactPart:
    def test_paired_shift_algebra_trivial(self):
        alg = BlockAlgebra([shift_generator(m, 8) for m in range(1, 5)], unital=True)
        assert compact_part(alg) == []

    def test_zero_tail_generator(self):
        prof = constant_profile(2, 2)
        blocks = [np.zeros((2, 2), dtype=complex), np.eye(2, dtype=complex)]
        g = BlockElement(prof, blocks, TailTemplate())
        alg = BlockAlgebra([g], unital=True)
        comp = compact_part(alg)
        assert len(comp) == 1
        assert comp[0].tail.is_zero()

    def test_rank_nullity(self, rng):
        # mixed generators: compact dimension equals the nullity of the tail map
        prof = constant_profile(2, 2)
        gens = []
        for k in range(3):
            blocks = [rand_complex(rng, 2, 2) for _ in range(2)]
            tail = TailTemplate(anchors={(0, 1): 1.0}) if k == 0 else TailTemplate()
            gens.append(BlockElement(prof, blocks, tail))
        alg = BlockAlgebra(gens, unital=False)
        tails = np.array([[1.0 if not g.tail.is_zero() else 0.0] for g in alg.span_basis])
        comp = compact_part(alg)
        # tail map has rank <= 1 here
        assert len(comp) >= alg.dim - 1


class TestSurjectivity:
    def test_paired_shift_fails(self):
        alg = BlockAlgebra([shift_generator(m, 8) for m in range(1, 5)], unital=True)
        surjective, deficit = gamma_quotient_surjectivity(alg, 2, 2)
        assert not surjective and deficit == np.inf

    def test_matrix_units_succeed(self):
        prof = constant_profile(2, 3)
        gens = []
        for i in range(2):
            for j in range(2):
                blocks = [np.zeros((2, 2), dtype=complex) for _ in range(3)]
                blocks[2][i, j] = 1.0
                gens.append(BlockElement(prof, blocks, TailTemplate()))
        alg = BlockAlgebra(gens, unital=True)
        surjective, deficit = gamma_quotient_surjectivity(alg, 3, 2)
        assert surjective and deficit <= 1e-8

    def test_small_span_fails(self):
        prof = constant_profile(2, 3)
        blocks = [np.zeros((2, 2), dtype=complex) for _ in range(3)]
        blocks[2][0, 0] = 1.0
        alg = BlockAlgebra([BlockElement(prof, blocks, TailTemplate())], unital=True)
        surjective, _ = gamma_quotient_surjectivity(alg, 3, 1)
        assert not surjective

    def test_explicit_range_guard(self):
        alg = BlockAlgebra([shift_generator(1, 2)], unital=True)
        with pytest.raises(IndexOutOfExplicitRange):
            gamma_quotient_surjectivity(alg, 5, 1)

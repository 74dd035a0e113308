from fractions import Fraction

import numpy as np
import pytest

from sicq.geometry import (
    basis_distribution,
    bloch_geometry,
    delsarte_bound,
    flat_zeros_vector,
    gram_equidistant,
    isu_bound_check,
    nflat_min_distance,
    zeros_overlap_test,
)
from sicq.sampling import complete_basis, get_rng, random_state_vector
from sicq.sicframe import real_sic_feasibility
from sicq.sicrep import purity_check, rho_to_prob, sic_inner


class TestBasisDistribution:
    def test_d2_values(self):
        assert np.allclose(basis_distribution(2, 0), [1 / 2, 1 / 6, 1 / 6, 1 / 6], atol=1e-15)

    @pytest.mark.parametrize("d", [2, 3, 5, 7])
    def test_normalized(self, d):
        for k in (0, d * d - 1):
            assert basis_distribution(d, k).sum() == pytest.approx(1.0, abs=1e-12)

    def test_pairwise_inner_matches_sic_overlap(self):
        # <<e_j|e_k>> reproduces tr(Pi_j Pi_k) = (d delta + 1)/(d+1) via sic_inner
        for d in (2, 3, 4):
            e1, e2 = basis_distribution(d, 0), basis_distribution(d, 1)
            assert sic_inner(e1, e2, d) == pytest.approx(1 / (d + 1), abs=1e-12)
            assert sic_inner(e1, e1, d) == pytest.approx(1.0, abs=1e-12)

    def test_index_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            basis_distribution(2, 4)


class TestBlochGeometry:
    def test_d2_constants(self):
        rep = bloch_geometry(2)
        assert rep.sphere_radius_sq == Fraction(1, 12)
        assert rep.max_zeros == 1
        assert rep.max_equidistant == 2

    def test_d3_constants(self):
        rep = bloch_geometry(3)
        assert rep.sphere_radius_sq == Fraction(2, 36)
        assert rep.max_zeros == 3

    @pytest.mark.parametrize("d", list(range(2, 21)))
    def test_exact_formulas(self, d):
        rep = bloch_geometry(d)
        assert rep.sphere_radius_sq == Fraction(d - 1, d * d * (d + 1))
        assert rep.max_zeros == d * (d - 1) // 2
        assert rep.max_equidistant == d
        assert rep.flat_poke_threshold == d * (d - 1) // 2

    def test_basis_distributions_on_sphere(self):
        for d in (2, 3, 5):
            rep = bloch_geometry(d)
            for k in (0, d * d - 1):
                e = basis_distribution(d, k)
                dist_sq = float(np.sum((e - rep.center) ** 2))
                assert dist_sq == pytest.approx(float(rep.sphere_radius_sq), abs=1e-14)

    def test_below_range(self):
        with pytest.raises(ValueError):
            bloch_geometry(1)


class TestNFlatDistance:
    def test_d3_two_zeros_pokes_out(self):
        val = nflat_min_distance(3, 2)
        assert val == Fraction(2, 9 * 7)
        assert val < bloch_geometry(3).sphere_radius_sq  # 2 < d(d-1)/2 = 3

    def test_zero_flat_is_center(self):
        assert nflat_min_distance(4, 0) == 0

    def test_qubit_boundary_case(self):
        # only for d=2 does the sphere just touch the simplex faces
        assert nflat_min_distance(2, 1) == bloch_geometry(2).sphere_radius_sq == Fraction(1, 12)

    def test_poke_threshold_matches_flat_count(self):
        for d in (2, 3, 4, 5):
            r2 = bloch_geometry(d).sphere_radius_sq
            for n in range(0, d * d):
                pokes = nflat_min_distance(d, n) < r2
                assert pokes == (n < d * (d - 1) // 2)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            nflat_min_distance(2, 4)


class TestGramEquidistant:
    def test_d3_three_points_feasible_rank_two(self):
        rep = gram_equidistant(3, 3)
        assert rep.lambda0 == 0
        assert rep.feasible
        assert rep.rank == 2

    def test_d3_four_points_infeasible(self):
        rep = gram_equidistant(3, 4)
        assert rep.lambda0 == Fraction(-1, 36)
        assert not rep.feasible

    def test_d2_witness_pair_realizes_bound(self, frames):
        rep = gram_equidistant(2, 2)
        assert rep.lambda0 == 0 and rep.feasible
        # two orthogonal qubit states: SIC images are maximally distant
        frame = frames[2]
        p0 = rho_to_prob(frame, np.diag([1.0, 0.0]).astype(complex))
        p1 = rho_to_prob(frame, np.diag([0.0, 1.0]).astype(complex))
        assert float(p0 @ p1) == pytest.approx(1 / 6, abs=1e-12)
        assert sic_inner(p0, p1, 2) == pytest.approx(0.0, abs=1e-10)

    def test_feasible_iff_at_most_d(self):
        for d in (2, 3, 5):
            for n in range(2, d + 3):
                assert gram_equidistant(d, n).feasible == (n <= d)

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            gram_equidistant(3, 1)


class TestFlatZerosVectors:
    def test_d3_column_pattern(self):
        z = flat_zeros_vector(3, [0, 3, 6])
        assert np.allclose(z, np.array([0, 1, 1, 0, 1, 1, 0, 1, 1]) / 6, atol=1e-15)

    def test_d2_single_zero(self):
        assert np.allclose(flat_zeros_vector(2, [0]), [0, 1 / 3, 1 / 3, 1 / 3], atol=1e-15)

    def test_satisfies_purity_quadratic_exactly(self, structures):
        z = flat_zeros_vector(3, [0, 3, 6])
        assert purity_check(structures[3], z).quadratic_residual < 1e-15

    def test_wrong_count(self):
        with pytest.raises(ValueError, match="zero positions"):
            flat_zeros_vector(3, [0, 1])

    def test_duplicates(self):
        with pytest.raises(ValueError, match="duplicate"):
            flat_zeros_vector(3, [0, 0, 1])


class TestZerosOverlap:
    def test_d4_disjoint_pair_inadmissible(self):
        z1 = flat_zeros_vector(4, range(6))
        z2 = flat_zeros_vector(4, range(6, 12))
        rep = zeros_overlap_test(z1, z2, 4)
        assert rep.shared_nonzeros == 4
        assert rep.overlap == pytest.approx(4 * (2 / 20) ** 2, abs=1e-15)
        assert not rep.admissible

    def test_d3_column_triples_pairwise_admissible(self):
        cols = [flat_zeros_vector(3, [0, 3, 6]), flat_zeros_vector(3, [1, 4, 7]),
                flat_zeros_vector(3, [2, 5, 8])]
        for a in range(3):
            for b in range(a + 1, 3):
                rep = zeros_overlap_test(cols[a], cols[b], 3)
                assert rep.admissible
                assert rep.shared_nonzeros == 3

    def test_self_overlap(self):
        z = flat_zeros_vector(3, [0, 1, 2])
        rep = zeros_overlap_test(z, z, 3)
        assert rep.shared_nonzeros == 6
        assert rep.overlap == pytest.approx(2 / 12, abs=1e-15)
        assert rep.admissible

    def test_non_flat_input_rejected(self):
        with pytest.raises(ValueError, match="flat zeros-bound"):
            zeros_overlap_test(np.full(9, 1 / 9), flat_zeros_vector(3, [0, 1, 2]), 3)


class TestDelsarte:
    @pytest.mark.parametrize("d", list(range(2, 21)))
    def test_zeros_bound_parameters_exact(self, d):
        assert delsarte_bound(d - 1, Fraction(1, d + 1)) == Fraction(d * (d - 1), 2)

    def test_real_case_parameters(self):
        for d in (2, 4, 15):
            assert delsarte_bound(d, Fraction(1, d + 2)) == Fraction(d * (d + 1), 2)
            assert real_sic_feasibility(d).delsarte_bound == Fraction(d * (d + 1), 2)

    def test_small_example(self):
        assert delsarte_bound(2, Fraction(1, 3)) == 4

    def test_vacuous_bound_rejected(self):
        with pytest.raises(ValueError, match="vacuous"):
            delsarte_bound(3, Fraction(1, 2))


class TestIsuBound:
    def test_von_neumann_ground_saturates(self, frames):
        for d in (2, 3):
            frame = frames[d]
            basis = complete_basis(random_state_vector(d, get_rng(d)))
            rep = isu_bound_check(frame, basis)
            assert rep.isu
            assert rep.self_overlap_bound == pytest.approx((d + d) / (d * d * (d + 1)), abs=1e-15)
            # rank-1 posteriors are pure states: self-overlap hits 2/(d(d+1))
            assert rep.max_posterior_self_overlap == pytest.approx(2 / (d * (d + 1)), abs=1e-10)
            assert rep.bound_satisfied

    def test_sic_ground(self, frames):
        d = 3
        frame = frames[d]
        rep = isu_bound_check(frame, frame.effects)
        assert rep.isu
        assert rep.n_ground == d * d
        assert rep.self_overlap_bound == pytest.approx(1 / d, abs=1e-15)
        assert rep.max_posterior_self_overlap == pytest.approx(2 / (d * (d + 1)), abs=1e-10)
        assert rep.bound_satisfied

    def test_unequal_traces_not_isu(self, frames):
        d = 2
        a = np.diag([0.3, 0.0]).astype(complex)
        ground = np.array([a, np.eye(2) - a])
        rep = isu_bound_check(frames[d], ground)
        assert not rep.isu


def test_pure_state_sweep_respects_all_bounds(frames):
    rng = get_rng(77)
    for d in (2, 3, 4, 5):
        frame = frames[d]
        r2 = float(bloch_geometry(d).sphere_radius_sq)
        vecs = rng.standard_normal((2000, d)) + 1j * rng.standard_normal((2000, d))
        vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
        probs = np.abs(vecs.conj() @ frame.frame_vectors().T) ** 2 / d
        dist_sq = ((probs - 1 / (d * d)) ** 2).sum(axis=1)
        assert np.max(np.abs(dist_sq - r2)) < 1e-9
        assert probs.max() <= 1 / d + 1e-9
        assert (probs < 1e-12).sum(axis=1).max() <= d * (d - 1) // 2

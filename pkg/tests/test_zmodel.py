import numpy as np
import pytest

import relgauss as rg
from relgauss.errors import (
    FieldRegionError,
    ProtocolNotApplicableError,
    StatisticsError,
)

OMEGA = 50.0
WIDE_CAP = rg.CapacitorZModel(charge=1.0, plate_density=1.0,
                              separation=20.0, x_left=-10.0)


def packets(centers, omega=OMEGA):
    return tuple(rg.position_wavepacket(c, omega) for c in centers)


def canonical_cm_state(separation=6.0, omega=OMEGA):
    """Equal-mass pair, particle 1 split by ``separation``: CM branches at
    0 and separation/2, relational branches at 0 and -separation."""
    cfg = rg.ParticleConfig(
        masses=(1.0, 1.0),
        branches=(((np.sqrt(0.5), 0.0), (np.sqrt(0.5), separation)),
                  ((1.0, 0.0),)),
        omega=omega)
    ext = cfg.build_state()
    pmap = rg.build_partition_map(cfg.masses)
    return ext, rg.to_cm_relational(ext, pmap)


class TestInteractionEnergy:
    def test_single_packet_center(self):
        z = rg.CapacitorZModel(charge=2.0, plate_density=1.0,
                               separation=2.0, x_left=-0.5)
        state = rg.product_state(rg.EXTERNAL, packets((0.3,)))
        assert rg.interaction_energy(state, z) == pytest.approx(0.6, abs=1e-12)

    def test_equal_superposition_midpoint(self):
        z = rg.CapacitorZModel(charge=1.0, plate_density=1.0,
                               separation=4.0, x_left=-1.0)
        state = rg.superposition(rg.EXTERNAL, [
            (np.sqrt(0.5), packets((0.0,), omega=2000.0)),
            (np.sqrt(0.5), packets((1.0,), omega=2000.0)),
        ])
        assert rg.interaction_energy(state, z) == pytest.approx(0.5, abs=1e-9)

    def test_zero_coupling(self):
        z = rg.CapacitorZModel(charge=0.0, plate_density=3.0,
                               separation=1.0, x_left=0.0)
        state = rg.product_state(rg.EXTERNAL, packets((0.5,)))
        assert rg.interaction_energy(state, z) == 0.0

    def test_outside_field_region_rejected(self):
        z = rg.CapacitorZModel(charge=1.0, plate_density=1.0,
                               separation=1.0, x_left=0.0)
        state = rg.product_state(rg.EXTERNAL, packets((1.1,)))
        with pytest.raises(FieldRegionError):
            rg.interaction_energy(state, z)

    def test_density_operator_input(self):
        _, cm = canonical_cm_state()
        rho = rg.pure_to_density(cm)
        assert rg.interaction_energy(rho, WIDE_CAP) == pytest.approx(
            rg.interaction_energy(cm, WIDE_CAP), abs=1e-10)


class TestBranchEnergies:
    def test_mass_fraction_weighted_shift(self):
        z = rg.CapacitorZModel(charge=1.0, plate_density=1.0,
                               separation=4.0, x_left=-1.0)
        cfg = rg.ParticleConfig(
            masses=(1.0, 1.0),
            branches=(((np.sqrt(0.5), 0.2), (np.sqrt(0.5), 0.7)),
                      ((1.0, 0.4),)),
            omega=OMEGA)
        e = rg.branch_energies(cfg.build_state(), z, cfg.masses)
        # CM shift is the branch displacement weighted by the mass fraction
        assert e[1] - e[0] == pytest.approx(0.5 * 0.5, abs=1e-12)

    def test_coincident_branches_equal(self):
        z = WIDE_CAP
        state = rg.superposition(rg.EXTERNAL, [
            (np.sqrt(0.5), packets((1.0, 0.0))),
            (np.sqrt(0.5), packets((1.0, 0.0))),
        ])
        e = rg.branch_energies(state, z)
        assert e[0] == pytest.approx(e[1], abs=1e-14)

    def test_relational_factor_energy_independent(self):
        # moving relational centers at fixed CM leaves every energy alone
        z = WIDE_CAP
        base = rg.superposition(rg.CM_RELATIONAL, [
            (np.sqrt(0.5), packets((0.0, 1.0, -2.0))),
            (np.sqrt(0.5), packets((3.0, 5.0, 4.0))),
        ])
        moved = rg.superposition(rg.CM_RELATIONAL, [
            (np.sqrt(0.5), packets((0.0, -7.0, 9.0))),
            (np.sqrt(0.5), packets((3.0, 2.0, -6.0))),
        ])
        assert rg.branch_energies(base, z) == pytest.approx(
            rg.branch_energies(moved, z), abs=1e-12)

    def test_partition_independence(self):
        ext, cm = canonical_cm_state()
        e_ext = rg.branch_energies(ext, WIDE_CAP, (1.0, 1.0))
        e_cm = rg.branch_energies(cm, WIDE_CAP)
        assert max(abs(a - b) for a, b in zip(e_ext, e_cm)) <= 1e-10


class TestSwapUnitaries:
    def test_fermionic_swap_exact(self):
        u = rg.build_swap_unitary(rg.ModePair(source=0, target=1,
                                              statistics="fermion"))
        assert u.shape == (4, 4)
        a0, a1 = rg.fermion_mode_operators(2)
        for lhs, rhs in ((a0, a1), (a1, a0),
                         (a0.conj().T, a1.conj().T), (a1.conj().T, a0.conj().T)):
            assert np.max(np.abs(u.conj().T @ lhs @ u - rhs)) == 0.0
        assert np.max(np.abs(u.conj().T @ u - np.eye(4))) == 0.0

    def test_bosonic_swap_on_truncated_space(self):
        d = 16
        u = rg.build_swap_unitary(rg.ModePair(source=0, target=1,
                                              statistics="boson", truncation=d))
        a0, a1 = rg.boson_mode_operators(2, d)
        assert np.max(np.abs(u.conj().T @ a0 @ u - a1)) <= 1e-10
        assert np.max(np.abs(u.conj().T @ u - np.eye(d * d))) <= 1e-10

    def test_self_swap_rejected(self):
        with pytest.raises(ValueError):
            rg.ModePair(source=2, target=2, statistics="fermion")

    def test_unknown_statistics_rejected(self):
        with pytest.raises(StatisticsError):
            rg.ModePair(source=0, target=1, statistics="anyon")


class TestExtractionCondition:
    def test_distinct_canonical_fermions(self):
        a, b = rg.fermion_mode_operators(2)
        assert rg.check_extraction_condition(a, b, "fermion")

    def test_same_mode_fails(self):
        a, _ = rg.fermion_mode_operators(2)
        assert not rg.check_extraction_condition(a, a, "fermion")

    @pytest.mark.parametrize("coeff", [1.0, 0.5, 0.01])
    def test_linear_mix_fails_unless_coefficient_vanishes(self, coeff):
        a, b = rg.fermion_mode_operators(2)
        mixed = coeff * a + np.sqrt(max(0.0, 1 - coeff ** 2)) * b
        assert not rg.check_extraction_condition(a, mixed, "fermion")

    def test_zero_mix_coefficient_passes(self):
        a, b = rg.fermion_mode_operators(2)
        assert rg.check_extraction_condition(a, 0.0 * a + b, "fermion")

    def test_bosonic_variant(self):
        a, b = rg.boson_mode_operators(2, 8)
        assert rg.check_extraction_condition(a, b, "boson")
        assert not rg.check_extraction_condition(a, a, "boson")


class TestExtractionEnergyCost:
    def test_twirled_input_raises(self):
        _, cm = canonical_cm_state()
        tw = rg.g_twirl(rg.pure_to_density(cm))
        coupling = rg.PositionCoupling(np.zeros(tw.n_slots))
        with pytest.raises(ProtocolNotApplicableError):
            rg.extraction_energy_cost(coupling, tw)

    def test_canonical_half_unit_cost(self):
        # CM branches at 0 and 1, unit coupling: branch collapses cost -+1/2
        _, cm = canonical_cm_state(separation=2.0)
        rho = rg.pure_to_density(cm)
        coupling = rg.PositionCoupling.cm_coupling(
            rg.CapacitorZModel(1.0, 1.0, 10.0, -1.0), cm.n_slots)
        res = rg.extraction_energy_cost(coupling, rho)
        assert res.initial_energy == pytest.approx(0.5, abs=1e-10)
        assert res.delta_mixture == pytest.approx(0.0, abs=1e-10)
        assert sorted(res.delta_branches) == pytest.approx([-0.5, 0.5],
                                                           abs=1e-10)

    def test_zero_hamiltonian_zero_cost(self):
        _, cm = canonical_cm_state()
        rho = rg.pure_to_density(cm)
        res = rg.extraction_energy_cost(rg.PositionCoupling(np.zeros(2)), rho)
        assert res.delta_mixture == 0.0
        assert res.delta_branches == (0.0, 0.0)

    def test_explicit_final_state(self):
        _, cm = canonical_cm_state(separation=2.0)
        rho = rg.pure_to_density(cm)
        final = rg.WavepacketDensityOperator(
            rg.CM_RELATIONAL, (rho.terms[1],), np.eye(1, dtype=complex))
        coupling = rg.PositionCoupling.cm_coupling(
            rg.CapacitorZModel(1.0, 1.0, 10.0, -1.0), 2)
        delta = rg.extraction_energy_cost(coupling, rho, rho_final=final)
        assert delta == pytest.approx(0.5, abs=1e-10)

    def test_mixture_is_branch_mean(self):
        amp = np.sqrt(np.array([0.3, 0.7]))
        state = rg.superposition(rg.CM_RELATIONAL, [
            (amp[0], packets((0.0, 0.0))),
            (amp[1], packets((4.0, 6.0))),
        ])
        rho = rg.pure_to_density(state)
        coupling = rg.PositionCoupling(np.array([1.0, 0.0]))
        res = rg.extraction_energy_cost(coupling, rho)
        weights = np.abs(np.diag(rho.coefficients))
        weights = weights / weights.sum()
        mean = float(weights @ np.array(res.branch_final_energies))
        assert res.mixture_energy == pytest.approx(mean, abs=1e-10)

    def test_relational_perturbation_leaves_cost(self):
        state_a = rg.superposition(rg.CM_RELATIONAL, [
            (np.sqrt(0.5), packets((0.0, 0.0))),
            (np.sqrt(0.5), packets((1.0, 6.0))),
        ])
        state_b = rg.superposition(rg.CM_RELATIONAL, [
            (np.sqrt(0.5), packets((0.0, 2.5))),
            (np.sqrt(0.5), packets((1.0, -4.0))),
        ])
        coupling = rg.PositionCoupling(np.array([1.0, 0.0]))
        res_a = rg.extraction_energy_cost(coupling, rg.pure_to_density(state_a))
        res_b = rg.extraction_energy_cost(coupling, rg.pure_to_density(state_b))
        assert res_a.delta_branches == pytest.approx(res_b.delta_branches,
                                                     abs=1e-10)
        assert res_a.delta_mixture == pytest.approx(res_b.delta_mixture,
                                                    abs=1e-10)

    def test_wrong_support_shape_rejected(self):
        _, cm = canonical_cm_state()
        rho = rg.pure_to_density(cm)
        coupling = rg.PositionCoupling(np.array([1.0, 0.0, 0.0]))
        with pytest.raises(rg.DimensionMismatchError):
            rg.extraction_energy_cost(coupling, rho)

    def test_nonzero_cost_for_distinct_cm_branches(self):
        for sep in (1.0, 2.5, 4.0):
            _, cm = canonical_cm_state(separation=2 * sep)
            rho = rg.pure_to_density(cm)
            coupling = rg.PositionCoupling(np.array([1.0, 0.0]))
            res = rg.extraction_energy_cost(coupling, rho)
            assert all(abs(d) > 1e-6 for d in res.delta_branches)

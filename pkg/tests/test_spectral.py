import numpy as np
import pytest

from roughwell.grid import ComplexField, Grid
from roughwell.potentials import PotentialProfile
from roughwell.spectral import (check_exponential_decay, lorentz_norm,
                                project_continuous, project_point,
                                radial_average, refined_reference_energies,
                                solve_bound_states)


class TestBoundStates:
    def test_single_bound_state_of_deep_well(self, basis10, well10, grid3):
        assert len(basis10) == 1
        E0 = basis10.energies[0]
        assert -3.0 < E0 < -2.0
        assert basis10.residuals[0] <= 1e-7 * abs(E0)
        assert basis10.gram_defect() < 1e-8

    def test_energy_against_lanczos_same_grid(self, basis10, well10, grid3):
        ref = refined_reference_energies(well10, grid3, k=1, tol=1e-6)
        assert abs(basis10.energies[0] - ref[0]) / abs(ref[0]) < 1e-4

    def test_shallow_well_has_no_states(self, grid3):
        shallow = PotentialProfile("gaussian_well", 1.0, 1.0)
        basis = solve_bound_states(shallow, grid3, k_max=2, tol=1e-6)
        assert basis.empty
        # independent Lanczos confirms nothing sits below the floor
        ref = refined_reference_energies(shallow, grid3, k=1, tol=1e-6)
        assert ref[0] > -0.02 * shallow.depth

    def test_zero_potential_empty_basis(self, grid3):
        basis = solve_bound_states(PotentialProfile("gaussian_well", 0.0, 1.0),
                                   grid3, k_max=1)
        assert basis.empty

    def test_deeper_well_multiple_states(self, basis25):
        assert len(basis25) >= 2
        assert basis25.energies[0] < basis25.energies[1] + 1e-9
        assert basis25.gram_defect() < 1e-8
        res_ok = basis25.residuals <= 1e-6 * np.abs(basis25.energies)
        assert res_ok.all()

    def test_ground_state_radial(self, basis10):
        g0 = basis10.states[0]
        # real up to a global phase, and symmetric under axis flips
        phase = g0.ravel()[np.abs(g0).argmax()]
        g0r = (g0 * np.conj(phase / abs(phase))).real
        assert np.abs(g0r[::-1, :, :] - np.roll(g0r, -1, axis=0)[::-1, :, :]).max() < 1e-5 \
            or np.abs(g0r - g0r.transpose(1, 0, 2)).max() < 1e-5

    def test_coarse_grid_rejected(self, well10):
        with pytest.raises(ValueError):
            solve_bound_states(well10, Grid(3, 16, 4.0), k_max=1)


class TestProjections:
    def test_eigenstate_projects_to_unit_vector(self, basis10, grid3):
        fld = ComplexField(grid3, basis10.states[0])
        zeta = project_point(fld, basis10)
        assert abs(zeta[0] - 1.0) < 1e-8
        cont = project_continuous(fld, basis10)
        assert cont.norm2() < 1e-6

    def test_orthogonal_field_zero_coefficients(self, basis10, grid3):
        rng = np.random.default_rng(0)
        vals = rng.standard_normal(grid3.shape) + 1j * rng.standard_normal(grid3.shape)
        fld = ComplexField(grid3, vals)
        cont = project_continuous(fld, basis10)
        zeta = project_point(cont, basis10)
        assert np.abs(zeta).max() < 1e-10 * cont.norm2()

    def test_pythagoras(self, basis10, grid3):
        rng = np.random.default_rng(4)
        vals = rng.standard_normal(grid3.shape) + 1j * rng.standard_normal(grid3.shape)
        fld = ComplexField(grid3, vals)
        zeta = project_point(fld, basis10)
        cont = project_continuous(fld, basis10)
        total = fld.mass()
        split = cont.mass() + float(np.sum(np.abs(zeta) ** 2))
        assert abs(total - split) / total < 1e-10

    def test_projector_algebra(self, basis10, grid3):
        # P_p^2 = P_p and P_p P_c = 0 on random fields
        rng = np.random.default_rng(9)
        vals = rng.standard_normal(grid3.shape) + 1j * rng.standard_normal(grid3.shape)
        fld = ComplexField(grid3, vals)
        zeta1 = project_point(fld, basis10)
        pp = np.tensordot(zeta1, basis10.states, axes=(0, 0))
        zeta2 = project_point(ComplexField(grid3, pp), basis10)
        assert np.abs(zeta2 - zeta1).max() < 1e-10 * np.abs(zeta1).max()

    def test_grid_mismatch_rejected(self, basis10):
        other = Grid(3, 32, 5.0)
        fld = ComplexField(other, np.ones(other.shape, dtype=complex))
        with pytest.raises(ValueError):
            project_point(fld, basis10)


class TestDecayCheck:
    def test_synthetic_exponential(self):
        g = Grid(3, 64, 8.0)
        r = np.sqrt(g.r_squared())
        rep = check_exponential_decay(np.exp(-r), -1.0, g)
        assert rep.conclusive
        assert abs(rep.rate - 1.0) / 1.0 < 0.02

    def test_yukawa_profile_recovers_rate(self):
        g = Grid(3, 64, 8.0)
        r = np.sqrt(g.r_squared())
        kappa = 1.6
        vals = np.exp(-kappa * r) / np.maximum(r, g.h / 2)
        rep = check_exponential_decay(vals, -kappa ** 2, g)
        assert rep.conclusive
        assert abs(rep.rate - kappa) / kappa < 0.05
        assert 0.5 < rep.prefactor_power < 1.5

    def test_gaussian_negative_control(self):
        g = Grid(3, 64, 8.0)
        rep = check_exponential_decay(np.exp(-g.r_squared() / 4), -1.0, g)
        assert not rep.conclusive

    def test_requires_negative_energy(self):
        g = Grid(3, 32, 4.0)
        with pytest.raises(ValueError):
            check_exponential_decay(np.ones(g.shape), 0.5, g)

    def test_radial_average_shells(self):
        g = Grid(3, 32, 4.0)
        rc, avg = radial_average(np.ones(g.shape), g)
        assert np.allclose(avg, 1.0)
        assert rc[0] < g.h


class TestLorentzNorm:
    def test_indicator_exact_value(self):
        # measure-1 indicator at p=6, q=2: (p/q)^{1/q} m^{1/p} = sqrt(3)
        vals = np.zeros(256)
        vals[:8] = 1.0
        got = lorentz_norm(vals, 6, 2, cell_volume=1.0 / 8)
        assert abs(got - np.sqrt(3)) < 1e-12

    def test_scaling_exact(self):
        rng = np.random.default_rng(3)
        vals = rng.standard_normal(500)
        a = lorentz_norm(2.5 * vals, 6, 2, 0.01)
        b = lorentz_norm(vals, 6, 2, 0.01)
        assert a == pytest.approx(2.5 * b, rel=1e-13)

    def test_p2q2_equals_l2(self):
        rng = np.random.default_rng(8)
        vals = rng.standard_normal(1000) + 1j * rng.standard_normal(1000)
        vol = 0.037
        l2 = np.sqrt((np.abs(vals) ** 2).sum() * vol)
        assert abs(lorentz_norm(vals, 2, 2, vol) - l2) / l2 < 1e-12

    def test_rejects_bad_exponents(self):
        with pytest.raises(ValueError):
            lorentz_norm(np.ones(4), 1.0, 2.0)
        with pytest.raises(ValueError):
            lorentz_norm(np.ones(4), 2.0, 0.5)

    def test_zero_field(self):
        assert lorentz_norm(np.zeros(16), 6, 2, 1.0) == 0.0

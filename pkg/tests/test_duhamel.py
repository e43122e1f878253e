import numpy as np
import pytest

from roughwell.duhamel import (DuhamelKernel, OperatorNormResult, PiPath,
                               duhamel_T_apply, operator_norm_estimate,
                               perturbed_pi)
from roughwell.grid import Grid, free_propagate_values
from roughwell.potentials import PotentialProfile


@pytest.fixture(scope="module")
def ker_grid():
    return Grid(1, 128, 12.0)


@pytest.fixture(scope="module")
def ker_profile():
    return PotentialProfile("gaussian_well", 3.0, 1.0)


@pytest.fixture(scope="module")
def times():
    return np.linspace(0.0, 4.0, 33)


class TestApply:
    def test_zero_source(self, ker_grid, ker_profile, times):
        pi = PiPath.zero(times, 1)
        F = np.zeros((len(times), ker_grid.n), dtype=complex)
        out = duhamel_T_apply(pi, F, ker_profile, ker_grid)
        assert not np.any(out)

    def test_zero_potential(self, ker_grid, times):
        flat = PotentialProfile("gaussian_well", 0.0, 1.0)
        pi = PiPath.zero(times, 1)
        rng = np.random.default_rng(0)
        F = rng.standard_normal((len(times), ker_grid.n)) + 0j
        out = duhamel_T_apply(pi, F, flat, ker_grid)
        assert np.abs(out).max() < 1e-15

    def test_delta_slot_matches_direct_composition(self, ker_grid, ker_profile, times):
        # F concentrated in the s=0 slot: (TF)(t) = (dt/2) V2 U(t) V1 f
        pi = PiPath.zero(times, 1)
        f = np.exp(-ker_grid.r_squared()).astype(complex)
        F = np.zeros((len(times), ker_grid.n), dtype=complex)
        F[0] = f
        out = duhamel_T_apply(pi, F, ker_profile, ker_grid)
        dt = times[1] - times[0]
        V1 = ker_profile.v1(ker_grid)
        V2 = ker_profile.v2(ker_grid)
        for i in (1, 7, 20):
            direct = 0.5 * dt * V2 * free_propagate_values(V1 * f, ker_grid, times[i])
            assert np.abs(out[i] - direct).max() < 1e-12

    def test_causality(self, ker_grid, ker_profile, times):
        # sources in later slots never affect earlier outputs
        pi = PiPath.zero(times, 1)
        F = np.zeros((len(times), ker_grid.n), dtype=complex)
        F[10] = np.exp(-ker_grid.r_squared())
        out = duhamel_T_apply(pi, F, ker_profile, ker_grid)
        assert np.abs(out[:11]).max() == 0.0
        assert np.abs(out[11:]).max() > 0.0

    def test_adjoint_pairing(self, ker_grid, ker_profile, times):
        rng = np.random.default_rng(1)
        shape = (len(times), ker_grid.n)
        F = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        G = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        pi, _ = perturbed_pi(times, eps=0.05, seed=5)
        K = DuhamelKernel(pi, ker_profile, ker_grid)
        meas = K.dt * ker_grid.cell_volume
        lhs = (np.conj(K.apply(F)) * G).sum() * meas
        rhs = (np.conj(F) * K.apply_adjoint(G)).sum() * meas
        assert abs(lhs - rhs) / abs(lhs) < 1e-12


def test_perturbed_pi_norm_known_by_construction(times):
    pi, pi0 = perturbed_pi(times, eps=0.02, seed=9, kinds=("gamma", "alpha"))
    # unit-sup bumps scaled by eps/2 per component sum to eps
    assert pi.pi_norm_upper(pi0) == pytest.approx(0.02, rel=1e-12)


class TestOperatorNorm:
    def test_equal_paths_give_zero(self, ker_grid, ker_profile, times):
        pi, pi0 = perturbed_pi(times, eps=0.0)
        res = operator_norm_estimate(pi, pi0, ker_profile, ker_grid, max_iter=30)
        assert res.value <= 1e-12

    def test_zero_potential_gives_zero(self, ker_grid, times):
        flat = PotentialProfile("gaussian_well", 0.0, 1.0)
        pi, pi0 = perturbed_pi(times, eps=0.05)
        res = operator_norm_estimate(pi, pi0, flat, ker_grid, max_iter=30)
        assert res.value <= 1e-14

    def test_against_dense_svd(self):
        # small enough to build the full matrix of T(pi) - T(pi0)
        g = Grid(1, 16, 6.0)
        prof = PotentialProfile("gaussian_well", 2.0, 1.0)
        ts = np.linspace(0.0, 2.0, 9)
        pi, pi0 = perturbed_pi(ts, eps=0.08, seed=2)
        Kp = DuhamelKernel(pi, prof, g)
        K0 = DuhamelKernel(pi0, prof, g)
        dim = len(ts) * g.n
        Mat = np.zeros((dim, dim), dtype=complex)
        for j in range(dim):
            e = np.zeros(dim, dtype=complex)
            e[j] = 1.0
            E = e.reshape(len(ts), g.n)
            Mat[:, j] = (Kp.apply(E) - K0.apply(E)).ravel()
        sig = np.linalg.svd(Mat, compute_uv=False)[0]
        # the L^2_{t,x} norm carries the uniform measure, so the operator
        # norm equals the plain matrix norm
        res = operator_norm_estimate(pi, pi0, prof, g, tol=1e-6, max_iter=400)
        assert res.value == pytest.approx(sig, rel=1e-3)

    def test_sweep_slope_and_bound(self, ker_grid, ker_profile):
        ts = np.linspace(0.0, 4.0, 33)
        eps_list = [1e-3, 1e-2, 1e-1]
        vals = []
        for eps in eps_list:
            pi, pi0 = perturbed_pi(ts, eps=eps, seed=3)
            vals.append(operator_norm_estimate(pi, pi0, ker_profile, ker_grid).value)
        lx = np.log(eps_list)
        ly = np.log(vals)
        slope = np.polyfit(lx, ly, 1)[0]
        assert slope >= 0.35
        C = max(v / e ** 0.4 for v, e in zip(vals, eps_list))
        assert all(v <= C * e ** 0.4 * (1 + 1e-9) for v, e in zip(vals, eps_list))

    def test_nonconvergence_is_flagged(self, ker_grid, ker_profile, times):
        pi, pi0 = perturbed_pi(times, eps=0.05, seed=11)
        res = operator_norm_estimate(pi, pi0, ker_profile, ker_grid,
                                     tol=1e-14, max_iter=21)
        assert isinstance(res, OperatorNormResult)
        if not res.converged:
            assert res.value > 0.0


class TestSliceDecay3D:
    def test_slice_norm_decay_exponent(self):
        # ||V2 U(tau) V1|| on Gaussian probes decays like tau^{-3/2} in 3D;
        # the window sits past the <tau>-shoulder and before box wraparound
        g = Grid(3, 64, 20.0)
        prof = PotentialProfile("gaussian_well", 3.0, 1.0)
        V1 = prof.v1(g)
        V2 = prof.v2(g)
        taus = np.geomspace(1.2, 5.0, 6)
        rng = np.random.default_rng(4)
        vol = g.cell_volume
        probes = []
        for _ in range(3):
            c = rng.uniform(-1.0, 1.0, 3)
            p = np.exp(-((g.coords()[0] - c[0]) ** 2
                         + (g.coords()[1] - c[1]) ** 2
                         + (g.coords()[2] - c[2]) ** 2)).astype(complex)
            p /= np.sqrt((np.abs(p) ** 2).sum() * vol)
            probes.append(p)
        norms = []
        for tau in taus:
            best = 0.0
            for p in probes:
                out = V2 * free_propagate_values(V1 * p, g, tau)
                best = max(best, np.sqrt((np.abs(out) ** 2).sum() * vol))
            norms.append(best)
        slope = np.polyfit(np.log(taus), np.log(norms), 1)[0]
        assert slope <= -1.4

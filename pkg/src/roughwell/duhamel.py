"""Discretized Duhamel kernel T(pi) and operator-norm estimation.

    (T(pi) F)(t) = int_0^t V2 S_pi(t) U(t-s) S_pi(s)^{-1} V1 F(s) ds

with U the free flow and S_pi the frame isometry of the parameter path
pi = (gamma, v, beta, alpha).  The free flow between every pair of times
separates as U(t-s) = a(t) b(s) in Fourier variables, so one application
of T costs a single weighted prefix sum over the time grid.

The s-integral uses trapezoid weights with the half-cell at s = t excluded;
the kernel is bounded there, only the dispersive estimate is singular.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import FrameParams, Grid, boost_values, dilate_values, shift_values


@dataclass
class PiPath:
    """Parameter path sampled on the kernel's time grid."""

    times: np.ndarray           # (M,)
    gamma: np.ndarray           # (M, dim)
    v: np.ndarray               # (M, dim)
    beta: np.ndarray            # (M,)
    alpha: np.ndarray           # (M,)

    @staticmethod
    def zero(times, dim=1) -> "PiPath":
        M = len(times)
        return PiPath(np.asarray(times, dtype=float), np.zeros((M, dim)),
                      np.zeros((M, dim)), np.zeros(M), np.zeros(M))

    def frame(self, i) -> FrameParams:
        return FrameParams(self.gamma[i], self.v[i], float(self.beta[i]),
                           float(self.alpha[i]))

    def pi_norm_upper(self, other: "PiPath") -> float:
        """Sup-norm upper bound for the perturbation norm ||pi - pi0||;
        exact by construction for the synthesized sweep perturbations."""
        return float(
            np.abs(self.alpha - other.alpha).max()
            + np.abs(self.gamma - other.gamma).max()
            + np.abs(self.v - other.v).max()
            + np.abs(self.beta - other.beta).max())


class DuhamelKernel:
    """T(pi) on the discrete L^2_{t,x} of a (time grid) x (space grid) box."""

    def __init__(self, pi: PiPath, profile, grid: Grid):
        self.pi = pi
        self.grid = grid
        self.profile = profile
        self.V1 = profile.v1(grid)
        self.V2 = profile.v2(grid)
        self.k2 = grid.k_squared()
        self.M = len(pi.times)
        if self.M < 2:
            raise ValueError("need at least two time samples")
        dts = np.diff(pi.times)
        if not np.allclose(dts, dts[0]):
            raise ValueError("kernel time grid must be uniform")
        self.dt = float(dts[0])
        entries = self.M * grid.n ** grid.dim
        if entries > 2 * 10 ** 7:
            raise MemoryError(
                f"kernel workspace of {entries:.2e} entries; use a 1D grid or"
                " fewer time points")
        t = pi.times
        self.a = np.exp(1j * np.multiply.outer(t, self.k2))    # (M, *shape)
        self.b = np.exp(-1j * np.multiply.outer(t, self.k2))
        self._trivial_frames = not (np.any(pi.gamma) or np.any(pi.v)
                                    or np.any(pi.beta) or np.any(pi.alpha))

    def _apply_frames(self, rows, inverse):
        """S_pi(t_i) (or its inverse) applied to each time slice."""
        if self._trivial_frames:
            return rows
        out = np.empty_like(rows)
        for i in range(self.M):
            fp = self.pi.frame(i)
            vals = rows[i]
            if inverse:
                if fp.beta != 0.0:
                    vals = dilate_values(vals, self.grid, -fp.beta, self.grid.dim / 2.0)
                vals = shift_values(vals, self.grid, -fp.gamma)
                vals = boost_values(vals, self.grid, -fp.v)
                if fp.alpha != 0.0:
                    vals = vals * np.exp(-1j * fp.alpha)
            else:
                if fp.alpha != 0.0:
                    vals = vals * np.exp(1j * fp.alpha)
                vals = boost_values(vals, self.grid, fp.v)
                vals = shift_values(vals, self.grid, fp.gamma)
                if fp.beta != 0.0:
                    vals = dilate_values(vals, self.grid, fp.beta, self.grid.dim / 2.0)
            out[i] = vals
        return out

    def apply(self, F: np.ndarray) -> np.ndarray:
        """(T F)_i = sum_{j<=i-1} w_j V2 S(t_i) U(t_i - s_j) S(s_j)^{-1} V1 F_j."""
        F = np.asarray(F, dtype=complex)
        rows = self.V1 * F
        rows = self._apply_frames(rows, inverse=True)
        ax = tuple(range(1, rows.ndim))
        rhat = np.fft.fftn(rows, axes=ax)
        c = self.b * rhat
        C = np.cumsum(c, axis=0)
        out_hat = np.zeros_like(c)
        # trapezoid over [0, t_i] with the s = t_i half-cell dropped:
        # weights dt/2 at j=0, dt at 1..i-1
        for i in range(1, self.M):
            out_hat[i] = self.a[i] * self.dt * (C[i - 1] - 0.5 * c[0])
        out = np.fft.ifftn(out_hat, axes=ax)
        out = self._apply_frames(out, inverse=False)
        return self.V2 * out

    def apply_adjoint(self, G: np.ndarray) -> np.ndarray:
        """Adjoint with respect to the L^2_{t,x} inner product on the grid."""
        G = np.asarray(G, dtype=complex)
        rows = self.V2 * G
        rows = self._apply_frames(rows, inverse=True)
        ax = tuple(range(1, rows.ndim))
        ghat = np.fft.fftn(rows, axes=ax)
        d = np.conj(self.a) * ghat
        # (T* G)_j = w_j / dt * sum_{i>j} dt conj(b_j) d_i   (w_0 = dt/2 else dt)
        S = np.cumsum(d[::-1], axis=0)[::-1]                     # S_j = sum_{i>=j} d_i
        out_hat = np.zeros_like(d)
        for j in range(self.M - 1):
            w = 0.5 * self.dt if j == 0 else self.dt
            out_hat[j] = w * np.conj(self.b[j]) * S[j + 1]
        out = np.fft.ifftn(out_hat, axes=ax)
        out = self._apply_frames(out, inverse=False)
        return self.V1 * out


def duhamel_T_apply(pi: PiPath, F: np.ndarray, profile, grid: Grid) -> np.ndarray:
    """Convenience wrapper: one application of T(pi) to time-indexed samples."""
    return DuhamelKernel(pi, profile, grid).apply(F)


@dataclass
class OperatorNormResult:
    value: float
    iterations: int
    converged: bool
    history: list


def operator_norm_estimate(pi: PiPath, pi0: PiPath, profile, grid: Grid,
                           tol: float = 1e-3, max_iter: int = 200,
                           min_iter: int = 20, seed: int = 0) -> OperatorNormResult:
    """||T(pi) - T(pi0)|| on discrete L^2_{t,x} by power iteration on the
    normal operator; returns sqrt of the top eigenvalue.  Non-convergence
    within max_iter returns the current bound with converged=False."""
    Tp = DuhamelKernel(pi, profile, grid)
    T0 = DuhamelKernel(pi0, profile, grid)

    def A(F):
        return Tp.apply(F) - T0.apply(F)

    def At(G):
        return Tp.apply_adjoint(G) - T0.apply_adjoint(G)

    rng = np.random.default_rng(seed)
    shape = (len(pi.times),) + grid.shape
    F = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    meas = Tp.dt * grid.cell_volume

    def nrm(X):
        return float(np.sqrt((np.abs(X) ** 2).sum() * meas))

    F /= nrm(F)
    prev = None
    history = []
    for it in range(1, max_iter + 1):
        G = A(F)
        gn = nrm(G)
        history.append(gn)
        if gn == 0.0:
            return OperatorNormResult(0.0, it, True, history)
        F = At(G)
        fn = nrm(F)
        if fn == 0.0:
            return OperatorNormResult(gn, it, True, history)
        F /= fn
        if prev is not None and it >= min_iter and abs(gn - prev) <= tol * max(gn, 1e-300):
            return OperatorNormResult(gn, it, True, history)
        prev = gn
    return OperatorNormResult(prev if prev is not None else 0.0, max_iter, False, history)


def perturbed_pi(times, dim: int = 1, eps: float = 0.0, seed: int = 3,
                 kinds=("gamma", "alpha")) -> tuple:
    """A base path pi0 and a perturbation pi with ||pi - pi0|| = eps by
    construction: smooth unit-sup bumps scaled by eps are added to the
    requested components."""
    times = np.asarray(times, dtype=float)
    T = times[-1]
    rng = np.random.default_rng(seed)
    pi0 = PiPath.zero(times, dim)
    pi = PiPath.zero(times, dim)
    nk = len(kinds)
    for kind in kinds:
        ph = rng.uniform(0, 2 * np.pi)
        bump = np.sin(2.0 * np.pi * times / T + ph)
        bump = bump / np.abs(bump).max()
        if kind == "gamma":
            pi.gamma = pi.gamma.copy()
            pi.gamma[:, 0] = (eps / nk) * bump
        elif kind == "alpha":
            pi.alpha = (eps / nk) * bump
        elif kind == "v":
            pi.v = pi.v.copy()
            pi.v[:, 0] = (eps / nk) * bump
        elif kind == "beta":
            pi.beta = (eps / nk) * bump
        else:
            raise ValueError(f"unknown perturbation kind {kind!r}")
    return pi, pi0

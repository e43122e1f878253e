"""Mass/energy accounting, Strichartz integrals, ionization metrics, and
channel-limit estimates over recorded runs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import (ComplexField, FrameParams, kinetic_quadratic_form,
                   sample_moving_potential)
from .modulation import ModulationState, evolve_modulation_integral
from .spectral import BoundStateBasis


@dataclass
class EnergyBreakdown:
    kinetic: float
    potential: float
    nonlinear: float
    total: float


def energy(fld: ComplexField, profile=None, fp: FrameParams | None = None,
           nonlinear=None) -> EnergyBreakdown:
    """Kinetic, potential and total energy in the co-moving sense
    E[Z(x + gamma(t), t)] = <H(t) Z, Z>, evaluated in the lab frame.

    The kinetic term is the full <-Delta Z, Z> quadratic form: with the
    Hamiltonian -Delta + V this is the combination that is conserved for a
    static frame and that obeys the translation flux identity.
    """
    g = fld.grid
    kin = kinetic_quadratic_form(fld.values, g)
    pot = 0.0
    if profile is not None:
        if fp is None:
            fp = FrameParams.zero(g.dim)
        Vm = sample_moving_potential(profile, fp, g)
        pot = float((Vm * np.abs(fld.values) ** 2).sum() * g.cell_volume)
    nl = 0.0
    if nonlinear is not None:
        c1, c2 = nonlinear
        y = np.abs(fld.values) ** 2
        nl = float(((0.6 * c1) * y ** (5.0 / 3.0) + (c2 / 3.0) * y ** 3).sum() * g.cell_volume)
    return EnergyBreakdown(kinetic=kin, potential=pot, nonlinear=nl, total=kin + pot + nl)


# ---------------------------------------------------------------------------
# Strichartz accumulation
# ---------------------------------------------------------------------------

@dataclass
class StrichartzReport:
    linf_l2: float
    l2_lorentz62: float
    running: np.ndarray
    tail_increment_ratio: float
    source_dual_l2t: float = 0.0    # L^2_t L^{6/5,2}_x of a separable source


def strichartz_accumulate(bundle) -> StrichartzReport:
    """Running L^2_t L^{6,2}_x integral of a recorded run plus a saturation
    detector: the fraction of the squared integral accumulated over the
    second half of the horizon.  Separable sources also get the dual-pair
    L^2_t L^{6/5,2}_x norm."""
    t = bundle.times
    l62 = bundle.data["lorentz62"]
    sq = np.concatenate([[0.0], np.cumsum(0.5 * (l62[1:] ** 2 + l62[:-1] ** 2) * np.diff(t))])
    total = sq[-1]
    half = np.searchsorted(t, t[-1] / 2.0)
    tail = total - sq[half]
    ratio = tail / total if total > 0 else 0.0
    src_dual = 0.0
    cfg = bundle.config
    if cfg is not None and cfg.source.kind == "separable":
        from .spectral import lorentz_norm
        fdual = lorentz_norm(cfg.source.f_values, 6.0 / 5.0, 2.0,
                             cfg.grid.cell_volume)
        phi2 = np.array([abs(cfg.source.phi(tt)) ** 2 for tt in t])
        src_dual = fdual * float(np.sqrt(np.trapezoid(phi2, t)))
    return StrichartzReport(
        linf_l2=float(np.sqrt(bundle.data["mass"].max())),
        l2_lorentz62=float(np.sqrt(total)),
        running=np.sqrt(sq),
        tail_increment_ratio=float(ratio),
        source_dual_l2t=src_dual)


# ---------------------------------------------------------------------------
# ionization
# ---------------------------------------------------------------------------

@dataclass
class IonizationReport:
    times: np.ndarray
    pp_series: np.ndarray
    tail_min: float
    transfer_estimate: float


def ionization_metrics(bundle, basis: BoundStateBasis,
                       tail_start_fraction: float = 0.5) -> IonizationReport:
    """Normalized bound mass over time; tail_min operationalizes the liminf
    as the minimum over [T/2, T].  transfer_estimate is the mass-transfer
    proxy sup_t |pp(t) - pp(0)|^{1/2}."""
    if basis is None or basis.empty:
        raise ValueError("ionization is undefined without bound states")
    t = bundle.times
    pp = bundle.data["pp_mass"]
    if pp[0] <= 0:
        raise ValueError("initial data carries no bound-state mass")
    rel = pp / pp[0]
    start = np.searchsorted(t, tail_start_fraction * t[-1])
    return IonizationReport(
        times=t, pp_series=rel,
        tail_min=float(rel[start:].min()),
        transfer_estimate=float(np.sqrt(np.abs(pp - pp[0]).max())))


# ---------------------------------------------------------------------------
# channel wave-operator limit
# ---------------------------------------------------------------------------

@dataclass
class ChannelReport:
    times: np.ndarray
    series: np.ndarray          # B(t)^{-1} zeta~(t) over record times
    limit: np.ndarray           # value at the final time
    cauchy_residual: float      # max pairwise distance over the last quarter


def wave_operator_estimate(bundle, basis: BoundStateBasis, path,
                           modstate: ModulationState | None = None,
                           window_fraction: float = 0.25) -> ChannelReport:
    """Channel limit lim B(t)^{-1} zeta~(t): evaluates the dressed amplitude
    of the modulation integral and reports the Cauchy residual over the last
    quarter of the horizon.  A stationary path cancels the phases exactly."""
    if modstate is None:
        modstate = evolve_modulation_integral(bundle, basis, path)
    q = np.stack([
        modstate.B[m].conj().T @ modstate.zeta_tilde[m]
        for m in range(len(modstate.times))])
    t = modstate.times
    start = np.searchsorted(t, (1.0 - window_fraction) * t[-1])
    tail = q[start:]
    res = 0.0
    for i in range(len(tail)):
        d = np.abs(tail[i + 1:] - tail[i])
        if d.size:
            res = max(res, float(np.sqrt((d ** 2).sum(axis=1)).max()))
    return ChannelReport(times=t, series=q, limit=q[-1], cauchy_residual=res)


# ---------------------------------------------------------------------------
# fit helpers
# ---------------------------------------------------------------------------

def loglog_slope(x, y):
    """(slope, intercept, r^2) of log y against log x."""
    lx, ly = np.log(np.asarray(x, dtype=float)), np.log(np.asarray(y, dtype=float))
    A = np.column_stack([lx, np.ones_like(lx)])
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    fit = A @ coef
    ss_res = float(((ly - fit) ** 2).sum())
    ss_tot = float(((ly - ly.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(coef[0]), float(coef[1]), r2


def spearman(x, y) -> float:
    from scipy.stats import spearmanr
    return float(spearmanr(x, y).statistic)


def energy_flux_residual(bundle, gamma_dot):
    """Centered-difference residual of the translation energy identity
    dE/dt = -gamma_dot . <Z, grad V(x - gamma) Z> at interior record times.

    gamma_dot : callable t -> (dim,) derivative of the configured smooth path
    (an experiment input, not something the solver ever uses).
    """
    t = bundle.times
    E = bundle.data["energy"]
    flux = bundle.data["flux"]
    res = []
    for i in range(1, len(t) - 1):
        dEdt = (E[i + 1] - E[i - 1]) / (t[i + 1] - t[i - 1])
        gd = np.atleast_1d(gamma_dot(t[i]))
        res.append(dEdt + float(np.dot(gd, flux[i])))
    return np.array(res)

"""Experiment orchestration: config ingestion, content-addressed run
directories, sweeps, paired comparisons, and plot-data export."""

from __future__ import annotations

import configparser
import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .diagnostics import (ionization_metrics, loglog_slope, spearman,
                          strichartz_accumulate, wave_operator_estimate)
from .evolve import EvolveConfig, InitialState, SourceSpec, evolve
from .grid import ComplexField, Grid
from .io import (save_basis, save_field, save_path_csv, save_trajectory_csv,
                 write_tidy_csv)
from .modulation import evolve_modulation_integral
from .paths import (ParamPath, gen_brownian_path, gen_bv_step_path,
                    gen_h12_path, gen_settling_path, gen_sine_path,
                    gamma_norm_estimate, h12_norm_fourier)
from .potentials import PotentialProfile
from .spectral import solve_bound_states

MEMORY_CAP_DEFAULT = 4 * 1024 ** 3
FIELD_WORKSPACE_FACTOR = 12     # complex field copies alive during a run


class ConfigError(ValueError):
    def __init__(self, field_name, message):
        self.field_name = field_name
        super().__init__(f"config field [{field_name}]: {message}")


def _get(cfg, section, key, conv, default=None, required=False):
    if not cfg.has_option(section, key):
        if required:
            raise ConfigError(f"{section}.{key}", "missing required field")
        return default
    raw = cfg.get(section, key)
    try:
        return conv(raw)
    except Exception:
        raise ConfigError(f"{section}.{key}", f"cannot parse {raw!r}")


def _floats(raw):
    return [float(x) for x in raw.replace(";", ",").split(",") if x.strip()]


def read_config(path: str) -> configparser.ConfigParser:
    cfg = configparser.ConfigParser()
    if not cfg.read(path):
        raise ConfigError("file", f"cannot read config {path}")
    cfg._config_path = os.path.abspath(path)
    return cfg


def config_echo(cfg: configparser.ConfigParser) -> dict:
    return {s: dict(cfg.items(s)) for s in cfg.sections()}


def make_run_id(echo: dict) -> str:
    payload = json.dumps({"config": echo, "version": __version__}, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def build_grid(cfg) -> Grid:
    dim = _get(cfg, "grid", "dim", int, required=True)
    n = _get(cfg, "grid", "n", int, required=True)
    L = _get(cfg, "grid", "l", float, required=True)
    cap = int(os.environ.get("ROUGHWELL_MEMCAP", MEMORY_CAP_DEFAULT))
    need = 16 * (n ** dim) * FIELD_WORKSPACE_FACTOR
    if need > cap:
        raise ConfigError("grid.n", f"estimated {need/2**30:.1f} GiB exceeds the {cap/2**30:.1f} GiB cap")
    try:
        return Grid(dim, n, L)
    except ValueError as exc:
        raise ConfigError("grid", str(exc))


def build_profile(cfg) -> PotentialProfile | None:
    if not cfg.has_section("profile"):
        return None
    kind = _get(cfg, "profile", "kind", str, default="gaussian_well")
    depth = _get(cfg, "profile", "depth", float, required=True)
    width = _get(cfg, "profile", "width", float, default=1.0)
    try:
        return PotentialProfile(kind, depth, width)
    except ValueError as exc:
        raise ConfigError("profile", str(exc))


def build_path(cfg, dim, T, delta, seed_offset=0, section="path") -> ParamPath:
    if not cfg.has_section(section):
        return ParamPath.zero(dim, T, delta)
    kind = _get(cfg, section, "kind", str, default="zero")
    component = _get(cfg, section, "component", str, default="D")
    amplitude = _get(cfg, section, "amplitude", float, default=0.0)
    seed = _get(cfg, section, "seed", int, default=0) + seed_offset
    tags = {}
    exact = {}
    if kind == "zero":
        samples = None
    elif kind == "h12":
        q = _get(cfg, section, "q", float, default=1.1)
        modes = _get(cfg, section, "modes", int, default=256)
        samples, fn = gen_h12_path(amplitude, T, delta, q=q, modes=modes, seed=seed)
        samples = samples - samples[0]
        f0 = fn(0.0)
        exact[component] = _shifted_vec(fn, f0, dim, component)
        tags[component] = "h12c"
    elif kind == "brownian":
        sigma2 = _get(cfg, section, "sigma2", float, default=amplitude or 1.0)
        samples = gen_brownian_path(sigma2, T, delta, seed=seed)
        tags[component] = "brownian"
    elif kind == "bv":
        jumps_raw = _get(cfg, section, "jumps", str, default="")
        jumps = []
        for item in jumps_raw.split(";"):
            if item.strip():
                tj, inc = item.split(":")
                jumps.append((float(tj), float(inc)))
        samples = gen_bv_step_path(jumps, T, delta)
        tags[component] = "bv"
    elif kind == "sine":
        omega = _get(cfg, section, "omega", float, default=1.0)
        samples, fn, dfn = gen_sine_path(amplitude, omega, T, delta)
        exact[component] = _vecify(fn, dim, component)
        tags[component] = "smooth"
    elif kind == "settling":
        tau = _get(cfg, section, "tau", float, default=1.0)
        power = _get(cfg, section, "power", float, default=0.5)
        samples, fn = gen_settling_path(amplitude, tau, T, delta, power=power)
        exact[component] = _vecify(fn, dim, component)
        tags[component] = "smooth"
    else:
        raise ConfigError(f"{section}.kind", f"unknown path kind {kind!r}")
    kwargs = {component: samples}
    return ParamPath.from_components(T, delta, dim=dim, tags=tags, exact=exact, **kwargs)


def _vecify(fn, dim, component):
    if component in ("beta", "alpha"):
        return lambda t: float(fn(t))
    def vec(t):
        out = np.zeros(dim)
        out[0] = fn(t)
        return out
    return vec


def _shifted_vec(fn, f0, dim, component):
    if component in ("beta", "alpha"):
        return lambda t: float(fn(t)) - f0
    def vec(t):
        out = np.zeros(dim)
        out[0] = fn(t) - f0
        return out
    return vec


def build_evolve_config(cfg, grid, profile, path, basis) -> EvolveConfig:
    dt = _get(cfg, "evolve", "dt", float, required=True)
    T = _get(cfg, "evolve", "t", float, required=True)
    init_kind = _get(cfg, "evolve", "initial", str, default="gaussian")
    init = InitialState(
        kind=init_kind,
        sigma=_get(cfg, "evolve", "sigma", float, default=1.0),
        center=tuple(_get(cfg, "evolve", "center", _floats, default=[])),
        momentum=tuple(_get(cfg, "evolve", "momentum", _floats, default=[])),
        weights=tuple(_get(cfg, "evolve", "weights", _floats, default=[])),
    )
    source = SourceSpec(kind="none")
    if cfg.has_section("source"):
        skind = _get(cfg, "source", "kind", str, default="none")
        if skind == "nonlinear":
            source = SourceSpec(kind="nonlinear",
                                c1=_get(cfg, "source", "c1", float, default=0.0),
                                c2=_get(cfg, "source", "c2", float, default=0.0),
                                cap=_get(cfg, "source", "cap", float, default=50.0))
        elif skind != "none":
            raise ConfigError("source.kind", f"unsupported in config files: {skind!r}")
    try:
        return EvolveConfig(
            grid=grid, dt=dt, T=T, profile=profile, path=path, initial=init,
            source=source, basis=basis,
            snapshot_stride=_get(cfg, "evolve", "snapshot_stride", int, default=0),
            diag_stride=_get(cfg, "evolve", "diag_stride", int, default=1),
            record_lorentz=_get(cfg, "evolve", "record_lorentz",
                                lambda s: s.lower() in ("1", "true", "yes"), default=True),
            wraparound_threshold=_get(cfg, "evolve", "wraparound_threshold", float, default=1e-4),
            wraparound_policy=_get(cfg, "evolve", "wraparound_policy", str, default="abort"),
        )
    except ValueError as exc:
        raise ConfigError("evolve", str(exc))


def _outdir(run_id: str, outdir: str | None) -> str:
    root = outdir or os.environ.get("ROUGHWELL_OUTDIR", "runs")
    path = os.path.join(root, run_id)
    os.makedirs(path, exist_ok=True)
    return path


def _manifest(run_dir, run_id, echo, outputs, flags, t0):
    man = {
        "run_id": run_id,
        "version": __version__,
        "config": echo,
        "started_unix": t0,
        "finished_unix": time.time(),
        "outputs": sorted(outputs),
        "flags": flags,
    }
    path = os.path.join(run_dir, "manifest.json")
    with open(path, "w") as fh:
        json.dump(man, fh, indent=1, sort_keys=True)
    return man


def _summary(run_dir, payload):
    with open(os.path.join(run_dir, "summary.json"), "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True, default=float)


def _solve_basis_if_needed(cfg, grid, profile):
    needs = cfg.has_section("solver") or \
        _get(cfg, "evolve", "initial", str, default="gaussian") in ("ground_state", "mix")
    if profile is None or profile.depth == 0.0 or not needs:
        return None
    return solve_bound_states(
        profile, grid,
        k_max=_get(cfg, "solver", "k_max", int, default=1) if cfg.has_section("solver") else 1,
        tol=_get(cfg, "solver", "tol", float, default=1e-6) if cfg.has_section("solver") else 1e-6)


# ---------------------------------------------------------------------------
# experiment entry points
# ---------------------------------------------------------------------------

def run_experiment(config_path: str, subcommand: str, outdir: str | None = None,
                   seed: int | None = None, workers: int = 1) -> dict:
    """Run one experiment; returns the manifest dict.  Creates
    <outdir>/<run_id>/ with manifest.json, summary.json and CSV artifacts.
    Invalid configs leave no partial outputs behind."""
    cfg = read_config(config_path)
    if seed is not None:
        if not cfg.has_section("run"):
            cfg.add_section("run")
        cfg.set("run", "seed", str(seed))
    echo = config_echo(cfg)
    echo["__subcommand__"] = subcommand
    run_id = make_run_id(echo)
    run_dir = _outdir(run_id, outdir)
    try:
        return _run_experiment_body(cfg, subcommand, run_id, run_dir, workers, echo)
    except Exception:
        if not os.path.exists(os.path.join(run_dir, "manifest.json")):
            import shutil
            shutil.rmtree(run_dir, ignore_errors=True)
        raise


def _run_experiment_body(cfg, subcommand, run_id, run_dir, workers, echo):
    t0 = time.time()
    outputs = []
    flags = {}

    if subcommand == "bound-states":
        grid = build_grid(cfg)
        profile = build_profile(cfg)
        if profile is None:
            raise ConfigError("profile", "bound-states requires a [profile] section")
        basis = solve_bound_states(
            profile, grid,
            k_max=_get(cfg, "solver", "k_max", int, default=4),
            tol=_get(cfg, "solver", "tol", float, default=1e-6))
        bdir = os.path.join(run_dir, "basis")
        save_basis(basis, bdir, run_id=run_id)
        outputs += [os.path.relpath(os.path.join(bdir, p), run_dir)
                    for p in os.listdir(bdir)]
        flags["threshold_resonance_proxy"] = bool(
            len(basis) and np.any(np.abs(basis.energies) < 0.05 * profile.depth))
        _summary(run_dir, {"energies": list(basis.energies),
                           "residuals": list(basis.residuals),
                           "gram_defect": basis.gram_defect()})

    elif subcommand in ("evolve", "nls"):
        grid = build_grid(cfg)
        profile = build_profile(cfg)
        dt = _get(cfg, "evolve", "dt", float, required=True)
        T = _get(cfg, "evolve", "t", float, required=True)
        basis = _solve_basis_if_needed(cfg, grid, profile)
        path = build_path(cfg, grid.dim, T, dt)
        ecfg = build_evolve_config(cfg, grid, profile, path, basis)
        if subcommand == "nls" and ecfg.source.kind != "nonlinear":
            raise ConfigError("source.kind", "nls requires kind = nonlinear")
        bundle = evolve(ecfg)
        flags.update(bundle.flags)
        csv_path = os.path.join(run_dir, "diagnostics.csv")
        save_trajectory_csv(bundle, csv_path)
        outputs.append("diagnostics.csv")
        for idx, (ts, vals) in enumerate(bundle.snapshots):
            base = os.path.join(run_dir, f"snapshot_{idx:04d}")
            save_field(ComplexField(grid, vals, time=ts), base, run_id=run_id)
            outputs += [f"snapshot_{idx:04d}.bin", f"snapshot_{idx:04d}.json"]
        rep = strichartz_accumulate(bundle)
        summary = {
            "mass_drift": float(abs(bundle.data["mass"][-1] / bundle.data["mass"][0] - 1.0)),
            "sup_energy": float(np.max(np.abs(bundle.data["energy"]))),
            "strichartz": rep.l2_lorentz62,
            "strichartz_tail_ratio": rep.tail_increment_ratio,
        }
        if basis is not None and not basis.empty and bundle.data["pp_mass"][0] > 0:
            ion = ionization_metrics(bundle, basis)
            summary["tail_min"] = ion.tail_min
            summary["transfer_estimate"] = ion.transfer_estimate
        _summary(run_dir, summary)

    elif subcommand == "paths-gen":
        T = _get(cfg, "path", "t", float, required=True)
        delta = _get(cfg, "path", "delta", float, required=True)
        dim = _get(cfg, "grid", "dim", int, default=3) if cfg.has_section("grid") else 3
        path = build_path(cfg, dim, T, delta)
        save_path_csv(path, os.path.join(run_dir, "path.csv"),
                      metadata={"generator": echo.get("path", {}), "run_id": run_id})
        outputs += ["path.csv", "path.json"]
        _summary(run_dir, {"samples": len(path.times)})

    elif subcommand == "paths-norms":
        T = _get(cfg, "path", "t", float, required=True)
        delta = _get(cfg, "path", "delta", float, required=True)
        path = build_path(cfg, 3, T, delta)
        comp = _get(cfg, "path", "component", str, default="D")
        series = {"D": path.D[:, 0], "v": path.v[:, 0],
                  "beta": path.beta, "alpha": path.alpha}[comp]
        rep = gamma_norm_estimate(series, delta)
        _summary(run_dir, {
            "besov_half": rep.besov_s, "sup": rep.sup, "bv": rep.bv,
            "gamma_upper": rep.gamma_upper,
            "plancherel_h12": h12_norm_fourier(series, delta),
            "jumps_detected": len(rep.jumps)})

    elif subcommand == "kernel-norm":
        man = _kernel_norm_experiment(cfg, run_dir, outputs)
        _summary(run_dir, man)

    elif subcommand == "ionization-sweep":
        man = _ionization_sweep(cfg, run_dir, outputs, workers=workers)
        flags.update(man.pop("flags", {}))
        _summary(run_dir, man)

    elif subcommand == "modulation":
        grid = build_grid(cfg)
        profile = build_profile(cfg)
        dt = _get(cfg, "evolve", "dt", float, required=True)
        T = _get(cfg, "evolve", "t", float, required=True)
        basis = solve_bound_states(
            profile, grid,
            k_max=_get(cfg, "solver", "k_max", int, default=1),
            tol=_get(cfg, "solver", "tol", float, default=1e-6))
        path = build_path(cfg, grid.dim, T, dt)
        ecfg = build_evolve_config(cfg, grid, profile, path, basis)
        bundle = evolve(ecfg)
        flags.update(bundle.flags)
        mod = evolve_modulation_integral(bundle, basis, path)
        direct = np.sqrt((np.abs(bundle.zeta) ** 2).sum(axis=1))
        integral = np.sqrt((np.abs(mod.zeta) ** 2).sum(axis=1))
        denom = max(direct.max(), 1e-300)
        write_tidy_csv(os.path.join(run_dir, "modulation.csv"), {
            "t": bundle.times, "abs_zeta_direct": direct,
            "abs_zeta_integral": integral,
            "unitarity_defect": np.full(len(bundle.times), mod.unitarity_defect()),
        })
        outputs.append("modulation.csv")
        chan = wave_operator_estimate(bundle, basis, path, modstate=mod)
        _summary(run_dir, {
            "rel_sup_difference": float(np.abs(direct - integral).max() / denom),
            "unitarity_defect": mod.unitarity_defect(),
            "hermiticity_defect": mod.hermiticity_defect(),
            "cauchy_residual": chan.cauchy_residual})

    else:
        raise ConfigError("subcommand", f"unknown subcommand {subcommand!r}")

    return _manifest(run_dir, run_id, echo, outputs, flags, t0)


def _kernel_norm_experiment(cfg, run_dir, outputs):
    from .duhamel import operator_norm_estimate, perturbed_pi
    grid = build_grid(cfg)
    profile = build_profile(cfg)
    T = _get(cfg, "kernel", "t", float, default=6.0)
    M = _get(cfg, "kernel", "time_points", int, default=49)
    eps_list = _get(cfg, "kernel", "epsilons", _floats,
                    default=[1e-3, 3.16e-3, 1e-2, 3.16e-2, 1e-1])
    seed = _get(cfg, "kernel", "seed", int, default=3)
    times = np.linspace(0.0, T, M)
    norms = []
    for eps in eps_list:
        pi, pi0 = perturbed_pi(times, dim=grid.dim, eps=eps, seed=seed)
        r = operator_norm_estimate(pi, pi0, profile, grid)
        norms.append(r.value)
    slope, intercept, r2 = loglog_slope(eps_list, norms)
    C = max(v / (e ** 0.4) for v, e in zip(norms, eps_list))
    write_tidy_csv(os.path.join(run_dir, "kernel_sweep.csv"),
                   {"eps": eps_list, "norm": norms},
                   comments=[f"fit slope={slope:.6g} intercept={intercept:.6g} r2={r2:.6g}",
                             f"fitted C={C:.6g} for eps^0.4 bound"])
    outputs.append("kernel_sweep.csv")
    return {"slope": slope, "intercept": intercept, "r2": r2, "C": C,
            "eps": list(eps_list), "norms": [float(v) for v in norms]}


def _one_ionization_run(args):
    (config_path, amplitude, kind, seed, T) = args
    cfg = read_config(config_path)
    grid = build_grid(cfg)
    profile = build_profile(cfg)
    dt = _get(cfg, "evolve", "dt", float, required=True)
    basis = solve_bound_states(profile, grid, k_max=1, tol=1e-6)
    delta = dt
    if kind == "h12":
        samples, fn = gen_h12_path(amplitude, T, delta,
                                   q=_get(cfg, "path", "q", float, default=1.1),
                                   modes=_get(cfg, "path", "modes", int, default=256),
                                   seed=seed)
        f0 = fn(0.0)
        path = ParamPath.from_components(
            T, delta, dim=grid.dim, D=samples - samples[0],
            tags={"D": "h12c"}, exact={"D": _shifted_vec(fn, f0, grid.dim, "D")})
        sup = float(np.abs(samples - samples[0]).max())
    elif kind == "brownian":
        raw = gen_brownian_path(1.0, T, delta, seed=seed)
        sup_target = amplitude
        sc = sup_target / max(np.abs(raw).max(), 1e-300)
        path = ParamPath.from_components(T, delta, dim=grid.dim, D=raw * sc,
                                         tags={"D": "brownian"})
        sup = float(np.abs(raw * sc).max())
    else:  # stationary
        path = ParamPath.zero(grid.dim, T, delta)
        sup = 0.0
    ecfg = EvolveConfig(
        grid=grid, dt=dt, T=T, profile=profile, path=path,
        initial=InitialState(kind="ground_state"), basis=basis,
        diag_stride=_get(cfg, "evolve", "diag_stride", int, default=5),
        record_lorentz=False, wraparound_policy="flag")
    bundle = evolve(ecfg)
    ion = ionization_metrics(bundle, basis)
    return {"kind": kind, "amplitude": amplitude, "seed": seed, "sup": sup,
            "tail_min": ion.tail_min, "transfer": ion.transfer_estimate,
            "flags": bundle.flags}


def _ionization_sweep(cfg, run_dir, outputs, workers=1):
    T = _get(cfg, "evolve", "t", float, required=True)
    amplitudes = _get(cfg, "sweep", "amplitudes", _floats, required=True)
    seed = _get(cfg, "path", "seed", int, default=7)
    # workers re-read the config file by path
    jobs = [(cfg._config_path, a, "h12", seed, T) for a in amplitudes]
    jobs.append((cfg._config_path, 0.0, "stationary", seed, T))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_one_ionization_run, jobs))
    else:
        results = [_one_ionization_run(j) for j in jobs]
    for k, r in enumerate(results):
        child = os.path.join(run_dir, f"child_{k:02d}")
        os.makedirs(child, exist_ok=True)
        with open(os.path.join(child, "summary.json"), "w") as fh:
            json.dump({k2: v for k2, v in r.items() if k2 != "flags"} | {
                "flags": r["flags"]}, fh, indent=1, sort_keys=True, default=float)
        outputs.append(f"child_{k:02d}/summary.json")
    station = [r for r in results if r["kind"] == "stationary"][0]
    sweep = [r for r in results if r["kind"] == "h12"]
    tails = [r["tail_min"] for r in sweep]
    rho = spearman(amplitudes, tails)
    threshold = 0.0
    for a, tm in zip(amplitudes, tails):
        if tm >= 0.5:
            threshold = a
    write_tidy_csv(os.path.join(run_dir, "ionization_curve.csv"),
                   {"amplitude": amplitudes, "tail_min": tails,
                    "sup": [r["sup"] for r in sweep]},
                   comments=[f"spearman={rho:.4f}",
                             f"calibrated_threshold={threshold:.6g}",
                             f"stationary_tail_min={station['tail_min']:.12g}"])
    outputs.append("ionization_curve.csv")
    flags = {"wraparound_breach": any(r["flags"]["wraparound_breach"] for r in results)}
    return {"amplitudes": list(amplitudes), "tails": tails, "spearman": rho,
            "calibrated_threshold": threshold,
            "stationary_tail_min": station["tail_min"], "flags": flags}


# ---------------------------------------------------------------------------
# report / export over existing runs
# ---------------------------------------------------------------------------

def report_run(run_dir: str) -> dict:
    with open(os.path.join(run_dir, "manifest.json")) as fh:
        man = json.load(fh)
    summary_path = os.path.join(run_dir, "summary.json")
    summary = {}
    if os.path.exists(summary_path):
        with open(summary_path) as fh:
            summary = json.load(fh)
    return {"run_id": man["run_id"], "flags": man["flags"], "summary": summary,
            "outputs": man["outputs"]}


def export_plot_data(run_dir: str, kind: str, out_path: str):
    """Tidy CSV with fitted parameters in the comment header."""
    import csv as _csv

    def read_diag():
        path = os.path.join(run_dir, "diagnostics.csv")
        if not os.path.exists(path):
            raise FileNotFoundError(f"{run_dir} has no diagnostics.csv")
        with open(path) as fh:
            rows = [r for r in _csv.reader(fh) if r and not r[0].startswith("#")]
        header, data = rows[0], np.array([[float(x) for x in r] for r in rows[1:]])
        return header, data

    if kind == "decay_fit":
        header, data = read_diag()
        t = data[:, header.index("t")]
        sup = data[:, header.index("sup_abs")]
        m = t > 0
        slope, intercept, r2 = loglog_slope(t[m], sup[m])
        write_tidy_csv(out_path, {"log_t": np.log(t[m]), "log_sup": np.log(sup[m])},
                       comments=[f"fit slope={slope:.6g} intercept={intercept:.6g} r2={r2:.6g}"])
    elif kind == "ionization_curve":
        src = os.path.join(run_dir, "ionization_curve.csv")
        if not os.path.exists(src):
            raise FileNotFoundError(f"{run_dir} has no ionization_curve.csv")
        with open(src) as fh_in, open(out_path, "w") as fh_out:
            fh_out.write(fh_in.read())
    elif kind == "slope_sweep":
        src = os.path.join(run_dir, "kernel_sweep.csv")
        if not os.path.exists(src):
            raise FileNotFoundError(f"{run_dir} has no kernel_sweep.csv")
        with open(src) as fh:
            lines = fh.read().splitlines()
        comments = [l[2:] for l in lines if l.startswith("#")]
        rows = [l.split(",") for l in lines if not l.startswith("#")]
        eps = np.array([float(r[0]) for r in rows[1:]])
        nrm = np.array([float(r[1]) for r in rows[1:]])
        slope, intercept, _ = loglog_slope(eps, nrm)
        write_tidy_csv(out_path, {"log_eps": np.log(eps), "log_norm": np.log(nrm)},
                       comments=comments + [f"slope={slope:.6g}", f"intercept={intercept:.6g}"])
    elif kind == "norm_ratio":
        header, data = read_diag()
        t = data[:, header.index("t")]
        e = data[:, header.index("energy")]
        m = data[:, header.index("mass")]
        write_tidy_csv(out_path, {"t": t, "energy": e, "mass": m,
                                  "ratio": e / np.maximum(m, 1e-300)})
    else:
        raise ValueError(f"unknown export kind {kind!r}")
    return out_path

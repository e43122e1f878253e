"""File formats: field snapshots, path CSVs, trajectory CSVs, manifests.

Snapshot format: raw little-endian float64 pairs (re, im), row-major over
axes, with a JSON sidecar {dim, n, L, frame, time, run_id}.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .grid import ComplexField, Grid


def save_field(fld: ComplexField, path_base: str, run_id: str = "") -> tuple:
    """Write <base>.bin and <base>.json; returns both paths."""
    inter = np.empty(fld.values.size * 2, dtype="<f8")
    flat = fld.values.ravel(order="C")
    inter[0::2] = flat.real
    inter[1::2] = flat.imag
    bin_path = path_base + ".bin"
    json_path = path_base + ".json"
    inter.tofile(bin_path)
    sidecar = {"dim": fld.grid.dim, "n": fld.grid.n, "L": fld.grid.L,
               "frame": fld.frame, "time": fld.time, "run_id": run_id}
    with open(json_path, "w") as fh:
        json.dump(sidecar, fh, indent=1, sort_keys=True)
    return bin_path, json_path


def load_field(path_base: str) -> ComplexField:
    with open(path_base + ".json") as fh:
        meta = json.load(fh)
    grid = Grid(meta["dim"], meta["n"], meta["L"])
    raw = np.fromfile(path_base + ".bin", dtype="<f8")
    vals = (raw[0::2] + 1j * raw[1::2]).reshape(grid.shape, order="C")
    return ComplexField(grid, vals, frame=meta["frame"], time=meta["time"])


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def save_path_csv(path, csv_path: str, metadata: dict | None = None):
    """Columns t, D_x.., v_x.., beta, alpha plus a JSON metadata sidecar."""
    dim = path.dim
    cols = ["t"] + [f"D_{c}" for c in "xyz"[:dim]] + [f"v_{c}" for c in "xyz"[:dim]] \
        + ["beta", "alpha"]
    with open(csv_path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for i, t in enumerate(path.times):
            row = [t] + list(path.D[i]) + list(path.v[i]) + [path.beta[i], path.alpha[i]]
            fh.write(",".join(_fmt(x) for x in row) + "\n")
    meta = dict(metadata or {})
    meta.setdefault("dim", dim)
    meta.setdefault("tags", path.tags)
    with open(os.path.splitext(csv_path)[0] + ".json", "w") as fh:
        json.dump(meta, fh, indent=1, sort_keys=True, default=str)


def load_path_csv(csv_path: str):
    from .paths import ParamPath
    with open(csv_path) as fh:
        header = fh.readline().strip().split(",")
        rows = [list(map(float, line.strip().split(","))) for line in fh if line.strip()]
    arr = np.array(rows)
    dim = sum(1 for c in header if c.startswith("D_"))
    times = arr[:, 0]
    D = arr[:, 1:1 + dim]
    v = arr[:, 1 + dim:1 + 2 * dim]
    beta = arr[:, 1 + 2 * dim]
    alpha = arr[:, 2 + 2 * dim]
    tags = {}
    meta_path = os.path.splitext(csv_path)[0] + ".json"
    if os.path.exists(meta_path):
        with open(meta_path) as fh:
            tags = json.load(fh).get("tags", {})
    return ParamPath(times, D, v, beta, alpha, dim=dim, tags=tags)


def save_trajectory_csv(bundle, csv_path: str, comments: list | None = None):
    """One row per recorded time; fitted parameters go into '#' header lines."""
    t = bundle.times
    scalar_cols = ["mass", "kinetic", "potential", "energy", "nl_energy",
                   "pp_mass", "sup_abs", "lorentz62", "strichartz_running",
                   "shell_frac"]
    ncomp = bundle.data["flux"].shape[1] if bundle.data["flux"].ndim == 2 else 0
    flux_cols = [f"flux_{c}" for c in "xyz"[:ncomp]]
    nzeta = bundle.zeta.shape[1] if bundle.zeta.ndim == 2 else 0
    zeta_cols = []
    for k in range(nzeta):
        zeta_cols += [f"zeta{k}_re", f"zeta{k}_im"]
    with open(csv_path, "w") as fh:
        for line in comments or []:
            fh.write(f"# {line}\n")
        fh.write(",".join(["t"] + scalar_cols + flux_cols + zeta_cols) + "\n")
        for i in range(len(t)):
            row = [t[i]] + [bundle.data[c][i] for c in scalar_cols]
            row += [bundle.data["flux"][i][c] for c in range(ncomp)]
            for k in range(nzeta):
                row += [bundle.zeta[i, k].real, bundle.zeta[i, k].imag]
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def save_basis(basis, dirpath: str, run_id: str = ""):
    os.makedirs(dirpath, exist_ok=True)
    for k in range(len(basis)):
        fld = ComplexField(basis.grid, basis.states[k])
        save_field(fld, os.path.join(dirpath, f"state_{k}"), run_id=run_id)
    with open(os.path.join(dirpath, "spectrum.json"), "w") as fh:
        json.dump({"energies": list(map(float, basis.energies)),
                   "residuals": list(map(float, basis.residuals))},
                  fh, indent=1)


def write_tidy_csv(path: str, columns: dict, comments: list | None = None):
    names = list(columns)
    n = len(next(iter(columns.values()))) if columns else 0
    with open(path, "w") as fh:
        for line in comments or []:
            fh.write(f"# {line}\n")
        fh.write(",".join(names) + "\n")
        for i in range(n):
            fh.write(",".join(_fmt(columns[c][i]) for c in names) + "\n")

"""Shaking a quantum well: how much of the bound state survives?

The ground state rides a well whose position follows a rough H^{1/2}-class
path.  Small shaking leaves most of the bound mass in place (incomplete
ionization), and the transfer grows monotonically with the driving
amplitude.  A Brownian path of the same sup-norm distributes its power very
differently across frequencies; the production-scale comparison (acceptance
criterion 12, larger box and horizon) shows it ionizing systematically more
than the H^{1/2} path, while at this demo's small box the recycled radiation
blurs the contrast.
"""

import numpy as np

from roughwell import Grid, PotentialProfile, solve_bound_states
from roughwell.evolve import EvolveConfig, InitialState, evolve
from roughwell.paths import ParamPath, gen_brownian_path, gen_h12_path
from roughwell.diagnostics import ionization_metrics

grid = Grid(dim=3, n=32, L=4.0)
well = PotentialProfile("gaussian_well", depth=10.0, width=1.0)
basis = solve_bound_states(well, grid, k_max=1, tol=1e-7)
print(f"ground state energy: {basis.energies[0]:.4f}\n")

T, dt = 12.0, 0.02


def run(path):
    cfg = EvolveConfig(grid=grid, dt=dt, T=T, profile=well, path=path,
                       initial=InitialState(kind="ground_state"), basis=basis,
                       record_lorentz=False, diag_stride=5,
                       wraparound_policy="flag")
    return ionization_metrics(evolve(cfg), basis)


print("amplitude sweep (H^1/2 path, seed 7):")
sup_ref = None
for A in (0.1, 0.3, 0.9):
    samples, fn = gen_h12_path(A, T, dt, seed=7)
    f0 = fn(0.0)
    def vec(t, fn=fn, f0=f0):
        out = np.zeros(3)
        out[0] = fn(t) - f0
        return out
    path = ParamPath.from_components(T, dt, dim=3, D=samples - samples[0],
                                     exact={"D": vec})
    rep = run(path)
    sup = float(np.abs(samples - samples[0]).max())
    if A == 0.3:
        sup_ref = sup
    print(f"  A={A:4.1f} (sup {sup:5.3f}):  surviving bound fraction "
          f"{rep.tail_min:.4f},  transfer proxy {rep.transfer_estimate:.4f}")

raw = gen_brownian_path(1.0, T, dt, seed=7)
scale = sup_ref / np.abs(raw).max()
bpath = ParamPath.from_components(T, dt, dim=3, D=raw * scale, tags={"D": "brownian"})
rep = run(bpath)
print(f"\nBrownian path matched to sup {sup_ref:.3f}:  surviving fraction "
      f"{rep.tail_min:.4f}  (same sup-norm, different spectral fine structure;"
      f" see the acceptance suite for the production-scale contrast)")

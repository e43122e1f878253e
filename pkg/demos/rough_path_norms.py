"""The zoo of driving paths and their norm estimates.

Three generators -- step paths of bounded variation, random Fourier series
sitting just inside H^{1/2}, and Brownian motion -- probed by the dyadic
modulus-of-continuity estimator, the Plancherel-side estimate, and the
jump-peeling composite-norm bound.  Brownian paths show their logarithmic
H^{1/2} failure as per-scale content that refuses to decay.
"""

import numpy as np

from roughwell.paths import (besov_norm, gamma_norm_estimate, gen_brownian_path,
                             gen_bv_step_path, gen_h12_path, h12_norm_fourier)

T, delta = 4.0, 4.0 / 2048

steps = gen_bv_step_path([(1.0, 1.0), (2.5, -0.4)], T, delta)
h12, _ = gen_h12_path(1.0, T, delta, seed=42)
brown = gen_brownian_path(0.5, T, delta, seed=42)

for name, f in (("BV steps", steps), ("H^1/2 series", h12), ("Brownian", brown)):
    rep = gamma_norm_estimate(f, delta)
    plancherel = h12_norm_fourier(f, delta)
    print(f"{name:13s}: dyadic B^1/2 = {rep.besov_s:7.3f}   "
          f"plancherel = {plancherel:7.3f}   sup = {rep.sup:6.3f}   "
          f"variation = {rep.bv:8.3f}   jumps found = {len(rep.jumps)}")
    print(f"{'':13s}  composite upper bound = {rep.gamma_upper:.3f}")

print("\nper-scale content g(2^-k) of the Brownian path (flat = log divergence):")
_, per_scale = besov_norm(brown, delta, return_scales=True)
for h, g in per_scale:
    print(f"   scale {h:8.5f}: {g:.3f}")

print("\nan added unit jump is peeled off cleanly:")
t = np.arange(len(h12)) * delta
rep = gamma_norm_estimate(h12 + (t >= 2.0), delta)
print(f"   detected jumps: {[(round(tj, 4), round(float(np.real(sz)), 4)) for tj, sz in rep.jumps]}")

"""Rough parameter paths and their Besov / BV / composite norm estimators.

Paths live on a uniform time grid over [0, T].  The translation gamma is
always the derived quantity gamma = D + 2 * int_0^t v.  Norm estimation
follows the dyadic modulus-of-continuity construction: per dyadic scale
2^{-k} in [delta, T] the estimator takes

    g(2^k) = 2^{sk} * sup_{0 < h <= 2^{-k}} ||f(.+h) - f||_{L^2}

on the reflection-periodized signal (halved so the window is counted once)
and returns the l^2 sum over scales.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import FrameParams

BV = "bv"
H12C = "h12c"
BROWNIAN = "brownian"
COMPOSITE = "composite"
SMOOTH = "smooth"


# ---------------------------------------------------------------------------
# parameter paths
# ---------------------------------------------------------------------------

def _as_component(arr, M, dim):
    """Broadcast a scalar series onto axis 0 of an (M, dim) component."""
    if arr is None:
        return np.zeros((M, dim))
    arr = np.asarray(arr, dtype=float)
    if arr.ndim == 1:
        out = np.zeros((M, dim))
        out[:, 0] = arr
        return out
    if arr.shape != (M, dim):
        raise ValueError(f"component shape {arr.shape} != ({M}, {dim})")
    return arr.copy()


@dataclass
class ParamPath:
    """Sampled rough parameter path (D, v, beta, alpha) with derived gamma.

    Attributes
    ----------
    times : (M,) uniform grid over [0, T]
    D, v : (M, dim) sampled arrays
    beta, alpha : (M,) sampled arrays
    tags : modality per component ("bv", "h12c", "brownian", "composite", "smooth")
    exact : optional closed-form evaluators, keyed by
        "D", "v", "int_v", "beta", "alpha"; vector evaluators return (dim,)
    """

    times: np.ndarray
    D: np.ndarray
    v: np.ndarray
    beta: np.ndarray
    alpha: np.ndarray
    dim: int = 3
    tags: dict = field(default_factory=dict)
    exact: dict = field(default_factory=dict)

    def __post_init__(self):
        M = len(self.times)
        if M < 2:
            raise ValueError("path needs at least two samples")
        dts = np.diff(self.times)
        if not np.allclose(dts, dts[0], rtol=1e-9, atol=1e-12):
            raise ValueError("path time grid must be uniform")
        for name in ("D", "v"):
            if getattr(self, name).shape != (M, self.dim):
                raise ValueError(f"{name} must have shape ({M}, {self.dim})")
        for name in ("beta", "alpha"):
            if getattr(self, name).shape != (M,):
                raise ValueError(f"{name} must have shape ({M},)")
        # Galilean normalization gamma(0) = 0
        self.D = self.D - self.D[0]
        if not np.all(np.isfinite(self.D)) or not np.all(np.isfinite(self.v)):
            raise ValueError("path samples must be finite")

    @property
    def delta(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def T(self) -> float:
        return float(self.times[-1])

    def int_v(self) -> np.ndarray:
        """Trapezoid antiderivative of v on the sample grid, (M, dim)."""
        iv = np.zeros_like(self.v)
        iv[1:] = np.cumsum(0.5 * (self.v[1:] + self.v[:-1]) * self.delta, axis=0)
        return iv

    def gamma(self) -> np.ndarray:
        return self.D + 2.0 * self.int_v()

    def _eval(self, name, samples, t, kind):
        fn = self.exact.get(name)
        if fn is not None:
            return np.asarray(fn(t), dtype=float)
        pos = (t - self.times[0]) / self.delta
        if kind == "step":
            i = min(max(int(np.floor(pos + 1e-12)), 0), len(self.times) - 1)
            return samples[i]
        i = min(max(int(np.floor(pos)), 0), len(self.times) - 2)
        w = min(max(pos - i, 0.0), 1.0)
        return (1.0 - w) * samples[i] + w * samples[i + 1]

    def _interp_kind(self, component) -> str:
        tag = self.tags.get(component, SMOOTH)
        return "step" if tag in (BV, BROWNIAN) else "linear"

    def D_at(self, t: float) -> np.ndarray:
        return self._eval("D", self.D, t, self._interp_kind("D"))

    def v_at(self, t: float) -> np.ndarray:
        return self._eval("v", self.v, t, self._interp_kind("v"))

    def int_v_at(self, t: float) -> np.ndarray:
        if "int_v" in self.exact:
            return np.asarray(self.exact["int_v"](t), dtype=float)
        return self._eval("int_v", self.int_v(), t, "linear")

    def beta_at(self, t: float) -> float:
        return float(self._eval("beta", self.beta, t, self._interp_kind("beta")))

    def frame_at(self, t: float) -> FrameParams:
        D = self.D_at(t)
        iv = self.int_v_at(t)
        v = self.v_at(t)
        beta = self.beta_at(t)
        alpha = float(self._eval("alpha", self.alpha, t, self._interp_kind("alpha")))
        return FrameParams(gamma=D + 2.0 * iv, v=v, beta=beta, alpha=alpha)

    @staticmethod
    def zero(dim: int, T: float, delta: float) -> "ParamPath":
        times = _time_grid(T, delta)
        M = len(times)
        return ParamPath(times, np.zeros((M, dim)), np.zeros((M, dim)),
                         np.zeros(M), np.zeros(M), dim=dim)

    @staticmethod
    def from_components(T, delta, dim=3, D=None, v=None, beta=None, alpha=None,
                        tags=None, exact=None) -> "ParamPath":
        times = _time_grid(T, delta)
        M = len(times)
        b = np.zeros(M) if beta is None else np.asarray(beta, dtype=float)
        a = np.zeros(M) if alpha is None else np.asarray(alpha, dtype=float)
        return ParamPath(times, _as_component(D, M, dim), _as_component(v, M, dim),
                         b, a, dim=dim, tags=dict(tags or {}), exact=dict(exact or {}))


def _time_grid(T, delta):
    M = int(round(T / delta))
    if abs(M * delta - T) > 1e-9 * max(T, 1.0):
        raise ValueError("T must be an integer multiple of delta")
    return delta * np.arange(M + 1)


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def gen_bv_step_path(jumps, T, delta) -> np.ndarray:
    """Right-continuous piecewise-constant path from (time, increment) jumps.

    Duplicate jump times are merged by summing the increments.
    """
    times = _time_grid(T, delta)
    merged = {}
    for tj, inc in jumps:
        if not 0.0 <= tj <= T:
            raise ValueError(f"jump time {tj} outside [0, {T}]")
        merged[float(tj)] = merged.get(float(tj), 0.0) + float(inc)
    f = np.zeros(len(times))
    for tj, inc in merged.items():
        f[times >= tj - 1e-12] += inc
    return f


def gen_h12_path(amplitude, T, delta, q=1.1, modes=256, seed=0):
    """Random Fourier series with spectrum k^{-1} (1 + ln k)^{-q}.

    For q > 1/2 the series lies in H^{1/2} (sum k c_k^2 < infinity) while
    sitting close to the boundary of that space; q <= 1/2 is rejected.
    Returns (samples, exact_evaluator).
    """
    if q <= 0.5:
        raise ValueError(f"q must exceed 1/2 for an H^(1/2) path, got {q}")
    times = _time_grid(T, delta)
    rng = np.random.default_rng(seed)
    ks = np.arange(1, modes + 1)
    phases = rng.uniform(0.0, 2.0 * np.pi, modes)
    coeff = amplitude * (1.0 / ks) * (1.0 + np.log(ks)) ** (-q)

    def evaluate(t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        tt = np.atleast_1d(t)
        out = (np.cos(2.0 * np.pi * np.outer(tt, ks) / T + phases) * coeff).sum(axis=1)
        return float(out[0]) if scalar else out

    return evaluate(times), evaluate


def gen_brownian_path(sigma2, T, delta, seed=0) -> np.ndarray:
    """Sampled Brownian path: seeded Gaussian increments N(0, sigma2 * delta)."""
    if sigma2 < 0:
        raise ValueError("sigma2 must be nonnegative")
    times = _time_grid(T, delta)
    rng = np.random.default_rng(seed)
    if sigma2 == 0.0:
        return np.zeros(len(times))
    inc = rng.normal(0.0, np.sqrt(sigma2 * delta), len(times) - 1)
    return np.concatenate([[0.0], np.cumsum(inc)])


def gen_sine_path(amplitude, omega, T, delta):
    """Smooth a*sin(omega t) path with its exact evaluator and derivative."""
    times = _time_grid(T, delta)
    f = lambda t: amplitude * np.sin(omega * np.asarray(t, dtype=float))
    df = lambda t: amplitude * omega * np.cos(omega * np.asarray(t, dtype=float))
    return f(times), f, df


def gen_settling_path(amplitude, tau, T, delta, power=0.5):
    """Monotone path a*(1 - (1 + t/tau)^{-power}); the derivative decays
    like t^{-(power+1)}, so the moving well settles down at late times."""
    times = _time_grid(T, delta)
    f = lambda t: amplitude * (1.0 - (1.0 + np.asarray(t, dtype=float) / tau) ** -power)
    return f(times), f


# ---------------------------------------------------------------------------
# norm estimators
# ---------------------------------------------------------------------------

def _reflect_circle(f):
    """Even circular extension of the sample array along axis 0."""
    if len(f) < 3:
        raise ValueError("need at least 3 samples")
    return np.concatenate([f, f[-2:0:-1]], axis=0)


def _increment_norms(f, delta, jmax):
    """d(h_j) for shifts h_j = j*delta on the reflection circle, halved
    so the original window is counted once.  Works for scalar or vector
    (axis 1) samples, real or complex."""
    fe = _reflect_circle(np.asarray(f, dtype=complex))
    d = np.empty(jmax + 1)
    d[0] = 0.0
    for j in range(1, jmax + 1):
        inc = np.roll(fe, -j, axis=0) - fe
        mag2 = np.abs(inc) ** 2
        if mag2.ndim > 1:
            mag2 = mag2.sum(axis=tuple(range(1, mag2.ndim)))
        d[j] = np.sqrt(0.5 * mag2.sum() * delta)
    return d


def dyadic_scales(T, delta):
    kmin = int(np.ceil(np.log2(1.0 / T) - 1e-9))
    kmax = int(np.floor(np.log2(1.0 / delta) + 1e-9))
    return [2.0 ** (-k) for k in range(kmin, kmax + 1)]   # coarse -> fine


def besov_norm(f, delta, s=0.5, return_scales=False):
    """Dyadic modulus-of-continuity estimate of the homogeneous Besov
    B^s seminorm of a sampled path, truncated to resolvable scales.

    Raises ValueError when fewer than 4 dyadic scales fit in [delta, T].
    """
    if not 0.0 < s < 1.0:
        raise ValueError(f"s must lie in (0, 1), got {s}")
    f = np.asarray(f)
    T = (len(f) - 1) * delta
    scales = dyadic_scales(T, delta)
    if len(scales) < 4:
        raise ValueError(f"only {len(scales)} dyadic scales in [delta, T]; grid too coarse")
    P = len(f) * 2 - 2
    jmax = min(int(np.floor(scales[0] / delta + 1e-9)), P // 2)
    d = _increment_norms(f, delta, jmax)
    run = np.maximum.accumulate(d)   # sup over all shifts <= h
    per_scale = []
    for hk in scales:
        j = min(int(np.floor(hk / delta + 1e-9)), jmax)
        g = (hk ** -s) * run[j] if j >= 1 else 0.0
        per_scale.append((hk, g))
    total = float(np.sqrt(sum(g * g for _, g in per_scale)))
    if return_scales:
        return total, per_scale
    return total


def h12_norm_fourier(f, delta, taper_frac=0.05):
    """Plancherel-side H^{1/2} estimate: ||(|lambda|^{1/2}) f_hat||_2 of the
    tapered path (cosine ramps of `taper_frac` at both ends)."""
    f = np.asarray(f, dtype=complex)
    M = len(f)
    w = np.ones(M)
    ntap = max(2, int(round(taper_frac * M)))
    ramp = 0.5 * (1.0 - np.cos(np.pi * np.arange(ntap) / ntap))
    w[:ntap] *= ramp
    w[-ntap:] *= ramp[::-1]
    g = f * w
    lam = 2.0 * np.pi * np.fft.fftfreq(M, d=delta)
    ghat = delta * np.fft.fft(g, axis=0) / np.sqrt(2.0 * np.pi)
    dlam = 2.0 * np.pi / (M * delta)
    mag2 = np.abs(ghat) ** 2
    if mag2.ndim > 1:
        mag2 = mag2.sum(axis=tuple(range(1, mag2.ndim)))
    return float(np.sqrt(np.sum(np.abs(lam) * mag2) * dlam))


@dataclass
class PathNormReport:
    besov_s: float
    sup: float
    bv: float
    gamma_upper: float
    decomposition: tuple          # (continuous part, jump part) sample arrays
    jumps: list                   # [(time, size)] detected steps
    s: float = 0.5


def gamma_norm_estimate(f, delta, s=0.5, theta=8.0) -> PathNormReport:
    """Upper bound for the composite (H^{1/2} cap C) + BV path norm.

    Increments larger than theta * median|increment| are peeled into a
    right-continuous step part; the remainder is estimated in H^{1/2} cap C.
    The bound is gamma_upper = (besov + sup)(remainder) + (variation + sup)(steps);
    no infimum over decompositions is attempted.
    """
    f = np.asarray(f, dtype=complex)
    if np.isrealobj(np.asarray(f)) or np.allclose(f.imag, 0.0):
        f = f.real.astype(float)
    inc = np.diff(f, axis=0)
    mag = np.abs(inc)
    med = float(np.median(mag))
    if med > 0.0:
        jump_mask = mag > theta * med
    else:
        jump_mask = mag > 0.0
    masked = np.where(jump_mask, inc, 0.0)
    step = np.concatenate([np.zeros_like(f[:1]), np.cumsum(masked, axis=0)])
    remainder = f - step
    bes = besov_norm(remainder, delta, s=s)
    sup_rem = float(np.abs(remainder).max())
    variation = float(np.abs(masked).sum())
    sup_step = float(np.abs(step).max())
    times = delta * np.arange(len(f))
    if f.ndim == 1:
        jumps = [(float(times[j + 1]),
                  complex(inc[j]) if np.iscomplexobj(inc) else float(inc[j]))
                 for j in np.nonzero(jump_mask)[0]]
    else:
        jumps = [(float(times[j + 1]), inc[j].copy())
                 for j in sorted(set(np.nonzero(jump_mask)[0]))]
    return PathNormReport(
        besov_s=bes,
        sup=float(np.abs(f).max()),
        bv=float(mag.sum()),
        gamma_upper=(bes + sup_rem) + (variation + sup_step),
        decomposition=(remainder, step),
        jumps=jumps,
        s=s,
    )


def gammaprime_norm_estimate(f, delta, s=0.5, theta=8.0) -> float:
    """Estimate for the derivative-class norm: the composite norm of the
    running integral of f (the antiderivative of a derivative-class element
    lies in the path class)."""
    f = np.asarray(f, dtype=float)
    F = np.zeros_like(f)
    F[1:] = np.cumsum(0.5 * (f[1:] + f[:-1]) * delta, axis=0)
    return gamma_norm_estimate(F, delta, s=s, theta=theta).gamma_upper

"""Periodic grid, spectral transforms, and Galilean/dilation frame operators.

The box is [-L, L)^dim with n points per axis; all transforms are plain FFTs
on that lattice.  Sign convention used throughout the package:

    i dZ/dt + H(t) Z = F,   H(t) = -Laplacian + V(x, t),

so the free flow is Z(t) = exp(+i t |k|^2) in Fourier variables and a bound
state g with energy E < 0 evolves as exp(+i E t) g.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

LAB = "lab"
COMOVING = "comoving"


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [-L, L)^dim.

    Parameters
    ----------
    dim : int
        Spatial dimension, 1 or 3.
    n : int
        Points per axis; must be a power of two >= 8.
    L : float
        Box half-width.
    """

    dim: int
    n: int
    L: float

    def __post_init__(self):
        if self.dim not in (1, 3):
            raise ValueError(f"dim must be 1 or 3, got {self.dim}")
        if self.n < 8 or (self.n & (self.n - 1)) != 0:
            raise ValueError(f"n must be a power of two >= 8, got {self.n}")
        if not self.L > 0:
            raise ValueError(f"L must be positive, got {self.L}")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.n

    @property
    def cell_volume(self) -> float:
        return self.h ** self.dim

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.dim

    def axis_coords(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.n)

    def coords(self) -> list:
        """Open (broadcastable) coordinate arrays, one per axis."""
        x = self.axis_coords()
        if self.dim == 1:
            return [x]
        return list(np.meshgrid(*([x] * self.dim), indexing="ij", sparse=True))

    def k_axis(self) -> np.ndarray:
        """Frequency lattice per axis, (pi/L) * {-n/2, ..., n/2-1} in FFT order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.h)

    def k_coords(self) -> list:
        k = self.k_axis()
        if self.dim == 1:
            return [k]
        return list(np.meshgrid(*([k] * self.dim), indexing="ij", sparse=True))

    def k_squared(self) -> np.ndarray:
        return _k_squared(self.dim, self.n, self.L)

    def r_squared(self) -> np.ndarray:
        return _r_squared(self.dim, self.n, self.L)


@lru_cache(maxsize=32)
def _k_squared(dim, n, L):
    g = Grid(dim, n, L)
    ks = g.k_coords()
    out = ks[0] ** 2
    for k in ks[1:]:
        out = out + k ** 2
    return out


@lru_cache(maxsize=32)
def _r_squared(dim, n, L):
    g = Grid(dim, n, L)
    xs = g.coords()
    out = xs[0] ** 2
    for x in xs[1:]:
        out = out + x ** 2
    return np.broadcast_to(out, g.shape).copy()


@dataclass(frozen=True)
class FrameParams:
    """One sample of the Galilean frame: translation gamma, boost v,
    dilation beta and global phase alpha."""

    gamma: np.ndarray
    v: np.ndarray
    beta: float = 0.0
    alpha: float = 0.0

    @staticmethod
    def zero(dim: int) -> "FrameParams":
        return FrameParams(np.zeros(dim), np.zeros(dim), 0.0, 0.0)

    def is_zero(self) -> bool:
        return (
            not np.any(self.gamma)
            and not np.any(self.v)
            and self.beta == 0.0
            and self.alpha == 0.0
        )


@dataclass(frozen=True)
class ComplexField:
    """Complex-valued function sampled on a Grid, tagged with frame and time."""

    grid: Grid
    values: np.ndarray
    frame: str = LAB
    time: float = 0.0

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"values shape {self.values.shape} does not match grid {self.grid.shape}"
            )

    def with_values(self, values, time=None) -> "ComplexField":
        return replace(self, values=values, time=self.time if time is None else time)

    def norm2(self) -> float:
        """Discrete L^2 norm, weighted by the cell volume."""
        return float(np.sqrt((np.abs(self.values) ** 2).sum() * self.grid.cell_volume))

    def mass(self) -> float:
        return float((np.abs(self.values) ** 2).sum() * self.grid.cell_volume)

    def inner(self, other: "ComplexField") -> complex:
        """<self, other> = sum conj(self) * other * cell_volume."""
        if other.grid != self.grid:
            raise ValueError("grid mismatch in inner product")
        return complex((np.conj(self.values) * other.values).sum() * self.grid.cell_volume)


def inner(a: np.ndarray, b: np.ndarray, cell_volume: float) -> complex:
    return complex((np.conj(a) * b).sum() * cell_volume)


def norm2(a: np.ndarray, cell_volume: float) -> float:
    return float(np.sqrt((np.abs(a) ** 2).sum() * cell_volume))


# ---------------------------------------------------------------------------
# spectral transform
# ---------------------------------------------------------------------------

def spectral_transform(fld: ComplexField, direction: str = "forward") -> ComplexField:
    """Unitary Fourier transform onto the orthonormal box modes.

    Forward returns the coefficients c_k of f in the basis
    (2L)^{-dim/2} exp(i k x), laid out in FFT order; the plain l^2 norm of
    the coefficient array equals the weighted L^2 norm of the field.
    A constant field 1 maps to a single DC entry of value (2L)^{dim/2}.
    """
    g = fld.grid
    scale = g.cell_volume / (2.0 * g.L) ** (g.dim / 2.0)
    # phase (-1)^m per axis accounts for the grid starting at -L
    m = np.fft.fftfreq(g.n, d=1.0 / g.n).astype(int)
    sgn1 = np.where(m % 2 == 0, 1.0, -1.0)
    sgn = sgn1
    for _ in range(g.dim - 1):
        sgn = np.multiply.outer(sgn, sgn1)
    if direction == "forward":
        return fld.with_values(np.fft.fftn(fld.values) * scale * sgn)
    if direction == "inverse":
        return fld.with_values(np.fft.ifftn(fld.values * sgn) / scale)
    raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")


# ---------------------------------------------------------------------------
# free propagator
# ---------------------------------------------------------------------------

def free_propagate_values(values: np.ndarray, grid: Grid, dt: float) -> np.ndarray:
    """Apply exp(+i |k|^2 dt) in Fourier space (free flow of i dZ/dt - Delta Z = 0...
    see module docstring for the sign convention)."""
    if dt == 0.0:
        return values.copy()
    return np.fft.ifftn(np.fft.fftn(values) * np.exp(1j * grid.k_squared() * dt))


def apply_free_propagator(fld: ComplexField, dt: float) -> ComplexField:
    if not np.isfinite(dt):
        raise ValueError("dt must be finite")
    return fld.with_values(free_propagate_values(fld.values, fld.grid, dt), time=fld.time + dt)


# ---------------------------------------------------------------------------
# frame operators
# ---------------------------------------------------------------------------

BETA_MAX_DEFAULT = 0.5


def shift_values(values: np.ndarray, grid: Grid, gamma) -> np.ndarray:
    """Exact spectral translation (e^{gamma grad} f)(x) = f(x + gamma)."""
    gamma = np.atleast_1d(np.asarray(gamma, dtype=float))
    if not np.any(gamma):
        return values.copy()
    vhat = np.fft.fftn(values)
    for ax, (k, gax) in enumerate(zip(grid.k_coords(), gamma)):
        if gax != 0.0:
            vhat = vhat * np.exp(1j * k * gax)
    return np.fft.ifftn(vhat)


def boost_values(values: np.ndarray, grid: Grid, v) -> np.ndarray:
    """Pointwise phase e^{i v . x}."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if not np.any(v):
        return values.copy()
    out = values
    for x, vax in zip(grid.coords(), v):
        if vax != 0.0:
            out = out * np.exp(1j * vax * x)
    return out


@lru_cache(maxsize=16)
def _dilation_matrix(n, L, beta):
    """Per-axis evaluation matrix of the trig interpolant at x -> e^beta x."""
    g = Grid(1, n, L)
    x = g.axis_coords()
    s = (np.exp(beta) * x + L) / g.h          # fractional lattice coordinates
    m = np.fft.fftfreq(n, d=1.0 / n)          # signed mode indices
    return np.exp(2j * np.pi * np.outer(s, m) / n) / n


def dilate_values(values: np.ndarray, grid: Grid, beta: float, weight: float) -> np.ndarray:
    """Fourier-resampled dilation f(x) -> e^{weight*beta} f(e^beta x)."""
    if beta == 0.0:
        return values.copy()
    E = _dilation_matrix(grid.n, grid.L, float(beta))
    out = np.fft.fftn(values)
    for ax in range(grid.dim):
        out = np.tensordot(E, out, axes=(1, ax))
        out = np.moveaxis(out, 0, ax)
    return np.exp(weight * beta) * out


def apply_frame(
    fld: ComplexField,
    fp: FrameParams,
    weight: str = "3/2",
    direction: str = "forward",
    beta_max: float = BETA_MAX_DEFAULT,
) -> ComplexField:
    """Composite frame operator S = Dil(beta) Shift(gamma) Boost(v) Phase(alpha).

    weight "3/2" uses the L^2-unitary dilation e^{(dim/2) beta} f(e^beta x);
    weight "2" uses e^{2 beta} f(e^beta x) (the rescaling a potential carries).
    The inverse direction undoes the forward exactly (up to resampling error
    in the dilation).
    """
    if abs(fp.beta) > beta_max:
        raise ValueError(f"|beta|={abs(fp.beta)} exceeds beta_max={beta_max}")
    if weight == "3/2":
        w = fld.grid.dim / 2.0
    elif weight == "2":
        w = 2.0
    else:
        raise ValueError(f"weight must be '3/2' or '2', got {weight!r}")
    g = fld.grid
    vals = fld.values
    if direction == "forward":
        if fp.alpha != 0.0:
            vals = vals * np.exp(1j * fp.alpha)
        vals = boost_values(vals, g, fp.v)
        vals = shift_values(vals, g, fp.gamma)
        vals = dilate_values(vals, g, fp.beta, w)
    elif direction == "inverse":
        vals = dilate_values(vals, g, -fp.beta, w)
        vals = shift_values(vals, g, -np.atleast_1d(fp.gamma))
        vals = boost_values(vals, g, -np.atleast_1d(fp.v))
        if fp.alpha != 0.0:
            vals = vals * np.exp(-1j * fp.alpha)
    else:
        raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    return fld.with_values(vals)


def sample_moving_potential(profile, fp: FrameParams, grid: Grid) -> np.ndarray:
    """Analytic sample of the lab-frame multiplication potential
    e^{-2 beta} V(e^{-beta}(x - gamma)).

    Exact at the grid nodes; no resampling is involved because the profile
    has a closed-form evaluator.
    """
    gamma = np.atleast_1d(np.asarray(fp.gamma, dtype=float))
    scale = np.exp(-fp.beta)
    xs = grid.coords()
    r2 = None
    for x, gax in zip(xs, gamma):
        term = (scale * (x - gax)) ** 2
        r2 = term if r2 is None else r2 + term
    vals = np.exp(-2.0 * fp.beta) * profile.evaluate_r2(r2)
    return np.broadcast_to(vals, grid.shape).copy()


def sample_moving_potential_gradient(profile, fp: FrameParams, grid: Grid) -> list:
    """Analytic gradient of the sampled moving potential, one array per axis."""
    gamma = np.atleast_1d(np.asarray(fp.gamma, dtype=float))
    scale = np.exp(-fp.beta)
    xs = grid.coords()
    y = [scale * (x - gax) for x, gax in zip(xs, gamma)]
    r2 = y[0] ** 2
    for yc in y[1:]:
        r2 = r2 + yc ** 2
    dVdr2 = profile.evaluate_dr2(r2)
    # d/dx_c [e^{-2b} V(y)] = e^{-3b} * dV/dy_c,  dV/dy_c = 2 y_c V'(r^2)
    out = []
    for yc in y:
        gc = np.exp(-2.0 * fp.beta) * scale * 2.0 * yc * dVdr2
        out.append(np.broadcast_to(gc, grid.shape).copy())
    return out


def gradient_values(values: np.ndarray, grid: Grid) -> list:
    """Spectral gradient, one array per axis."""
    vhat = np.fft.fftn(values)
    out = []
    for ax, k in enumerate(grid.k_coords()):
        out.append(np.fft.ifftn(1j * k * vhat))
    return out


def kinetic_quadratic_form(values: np.ndarray, grid: Grid) -> float:
    """<-Delta f, f> via the spectral |k|^2 multiplier."""
    vhat = np.fft.fftn(values)
    w = grid.cell_volume / values.size
    return float(np.sum(grid.k_squared() * np.abs(vhat) ** 2) * w)


def h1_norm(values: np.ndarray, grid: Grid) -> float:
    """Discrete H^1 norm (mass + gradient energy)."""
    m = (np.abs(values) ** 2).sum() * grid.cell_volume
    return float(np.sqrt(m + kinetic_quadratic_form(values, grid)))


def boundary_shell_fraction(values: np.ndarray, grid: Grid, margin: float | None = None) -> float:
    """Fraction of the total mass within `margin` of the box boundary."""
    if margin is None:
        margin = max(2.0 * grid.h, 0.1 * grid.L)
    x = np.abs(grid.axis_coords())
    near = x > grid.L - margin
    mask = near
    if grid.dim == 3:
        mask = near[:, None, None] | near[None, :, None] | near[None, None, :]
    dens = np.abs(values) ** 2
    tot = dens.sum()
    if tot == 0.0:
        return 0.0
    return float(dens[mask].sum() / tot)

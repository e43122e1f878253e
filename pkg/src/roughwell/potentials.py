"""Closed-form radial potential wells and their factorizations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KINDS = ("gaussian_well", "exponential_well")


@dataclass(frozen=True)
class PotentialProfile:
    """Attractive radial well with a closed-form evaluator.

    gaussian_well:     V(x) = -depth * exp(-|x|^2 / width^2)
    exponential_well:  V(x) = -depth * exp(-|x| / width)

    Both are in L^{3/2} \\cap L^2 \\cap L^infty by construction.
    """

    kind: str
    depth: float
    width: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.depth < 0:
            raise ValueError("depth must be nonnegative")
        if not self.width > 0:
            raise ValueError("width must be positive")

    def evaluate_r2(self, r2):
        """V as a function of |x|^2."""
        if self.kind == "gaussian_well":
            return -self.depth * np.exp(-r2 / self.width ** 2)
        return -self.depth * np.exp(-np.sqrt(r2) / self.width)

    def evaluate_dr2(self, r2):
        """dV/d(r^2)."""
        if self.kind == "gaussian_well":
            return (self.depth / self.width ** 2) * np.exp(-r2 / self.width ** 2)
        r = np.sqrt(np.maximum(r2, 1e-300))
        return (self.depth / (2.0 * self.width)) * np.exp(-r / self.width) / r

    def sample(self, grid) -> np.ndarray:
        """V at the grid nodes, centered at the origin."""
        return np.broadcast_to(self.evaluate_r2(grid.r_squared()), grid.shape).copy()

    def v1(self, grid) -> np.ndarray:
        """V1 = |V|^{1/2}."""
        return np.sqrt(np.abs(self.sample(grid)))

    def v2(self, grid) -> np.ndarray:
        """V2 = |V|^{1/2} sgn V; the wells are attractive so V2 = -V1."""
        return -self.v1(grid)

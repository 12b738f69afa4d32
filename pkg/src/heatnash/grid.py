"""Uniform interval/time grids, region masks and the discrete L2 pairing."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from heatnash.errors import ConfigurationError, StructuralError


@dataclass(frozen=True)
class SpatialGrid:
    """Interior nodes ``x_j = j*h`` of ``(0, length)``; boundary values are 0."""

    length: float
    n_interior: int

    def __post_init__(self):
        if not (np.isfinite(self.length) and self.length > 0):
            raise ConfigurationError(f"domain length must be > 0, got {self.length!r}")
        if int(self.n_interior) != self.n_interior or self.n_interior < 3:
            raise ConfigurationError(f"n_interior must be an integer >= 3, got {self.n_interior!r}")

    @property
    def h(self) -> float:
        return self.length / (self.n_interior + 1)

    @property
    def nodes(self) -> np.ndarray:
        return self.h * np.arange(1, self.n_interior + 1)

    def laplacian_bands(self):
        """Diagonal and off-diagonal of the 3-point Dirichlet matrix for ``-d2/dx2``."""
        inv_h2 = 1.0 / self.h**2
        diag = np.full(self.n_interior, 2.0 * inv_h2)
        off = np.full(self.n_interior - 1, -inv_h2)
        return diag, off

    def check(self, f, name="field") -> np.ndarray:
        f = np.asarray(f, dtype=float)
        if f.shape != (self.n_interior,):
            raise StructuralError(
                f"{name} has shape {f.shape}, expected ({self.n_interior},) for this grid"
            )
        return f


@dataclass(frozen=True)
class TimeGrid:
    horizon: float
    n_steps: int

    def __post_init__(self):
        if not (np.isfinite(self.horizon) and self.horizon > 0):
            raise ConfigurationError(f"horizon must be > 0, got {self.horizon!r}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise ConfigurationError(f"n_steps must be an integer >= 1, got {self.n_steps!r}")

    @property
    def dt(self) -> float:
        return self.horizon / self.n_steps

    @property
    def nodes(self) -> np.ndarray:
        return self.dt * np.arange(self.n_steps + 1)


@dataclass(frozen=True)
class SubdomainMask:
    """Indicator of the open interval ``(left, right)`` sampled at the interior nodes."""

    grid: SpatialGrid
    left: float
    right: float
    node_flags: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (0.0 <= self.left < self.right <= self.grid.length):
            raise ConfigurationError(
                f"region ({self.left}, {self.right}) must satisfy 0 <= left < right <= {self.grid.length}"
            )
        x = self.grid.nodes
        flags = (x > self.left) & (x < self.right)
        if not flags.any():
            raise ConfigurationError(f"region ({self.left}, {self.right}) contains no grid node")
        flags.setflags(write=False)
        object.__setattr__(self, "node_flags", flags)

    @property
    def interval(self) -> tuple[float, float]:
        return (self.left, self.right)

    @property
    def indicator(self) -> np.ndarray:
        return self.node_flags.astype(float)

    @property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.node_flags)

    def overlaps(self, other: "SubdomainMask") -> bool:
        return bool(np.any(self.node_flags & other.node_flags))


def inner_product_h(grid: SpatialGrid, f, g) -> float:
    """Rectangle-rule pairing ``h * sum_j f_j g_j``."""
    f = grid.check(f, "f")
    g = grid.check(g, "g")
    return float(grid.h * np.dot(f, g))


def norm_h(grid: SpatialGrid, f) -> float:
    return float(np.sqrt(inner_product_h(grid, f, f)))


def slice_norms(grid: SpatialGrid, values) -> np.ndarray:
    """Row-wise ``norm_h`` of a ``(n_slices, n_interior)`` array."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[1] != grid.n_interior:
        raise StructuralError(f"expected (n, {grid.n_interior}) array, got {values.shape}")
    return np.sqrt(grid.h * np.einsum("ij,ij->i", values, values))

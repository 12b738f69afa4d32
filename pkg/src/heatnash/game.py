"""Problem data for the two-player heat-equation game."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import lapack

from heatnash.errors import ConfigurationError, LinearSolveError, StructuralError
from heatnash.grid import SpatialGrid, SubdomainMask, TimeGrid

PLAYERS = (1, 2)


class SameTargetWarning(UserWarning):
    """y1 == y2: existence still holds but the bang-bang dichotomy assumes y1 != y2."""


def check_player(player) -> int:
    if player not in PLAYERS:
        raise StructuralError(f"player must be 1 or 2, got {player!r}")
    return int(player)


@dataclass(frozen=True, eq=False)
class GameSpec:
    """Full game instance.

    ``potential`` has one row per time node (``n_steps + 1`` rows); row ``k`` is
    the coefficient ``a(., t_k)``. A scalar is broadcast to a constant field.
    """

    grid: SpatialGrid
    time: TimeGrid
    potential: np.ndarray
    mask1: SubdomainMask
    mask2: SubdomainMask
    cap1: float
    cap2: float
    y0: np.ndarray
    y1: np.ndarray
    y2: np.ndarray

    def __post_init__(self):
        n, steps = self.grid.n_interior, self.time.n_steps
        pot = np.asarray(self.potential, dtype=float)
        if pot.ndim == 0:
            pot = np.full((steps + 1, n), float(pot))
        if pot.shape != (steps + 1, n):
            raise StructuralError(f"potential has shape {pot.shape}, expected ({steps + 1}, {n})")
        if not np.all(np.isfinite(pot)):
            raise ConfigurationError("potential contains non-finite values")
        object.__setattr__(self, "potential", _frozen(pot))
        for name in ("y0", "y1", "y2"):
            arr = self.grid.check(getattr(self, name), name)
            if not np.all(np.isfinite(arr)):
                raise ConfigurationError(f"{name} contains non-finite values")
            object.__setattr__(self, name, _frozen(arr))
        for name in ("mask1", "mask2"):
            if getattr(self, name).grid != self.grid:
                raise StructuralError(f"{name} is defined on a different grid")
        if self.mask1.overlaps(self.mask2):
            raise ConfigurationError(
                f"control regions {self.mask1.interval} and {self.mask2.interval} must be disjoint"
            )
        for name in ("cap1", "cap2"):
            cap = float(getattr(self, name))
            if not (np.isfinite(cap) and cap >= 0):
                raise ConfigurationError(f"{name} must be >= 0, got {cap!r}")
            object.__setattr__(self, name, cap)
        if np.array_equal(self.y1, self.y2):
            warnings.warn(
                "targets y1 and y2 coincide; Nash equilibria still exist but the "
                "bang-bang dichotomy relies on the standing assumption y1 != y2",
                SameTargetWarning,
                stacklevel=3,
            )

    @property
    def h(self) -> float:
        return self.grid.h

    @property
    def dt(self) -> float:
        return self.time.dt

    @property
    def n_steps(self) -> int:
        return self.time.n_steps

    def mask(self, player) -> SubdomainMask:
        return self.mask1 if check_player(player) == 1 else self.mask2

    def cap(self, player) -> float:
        return self.cap1 if check_player(player) == 1 else self.cap2

    def target(self, player) -> np.ndarray:
        return self.y1 if check_player(player) == 1 else self.y2

    def replace(self, **changes) -> "GameSpec":
        fields = dict(
            grid=self.grid, time=self.time, potential=self.potential,
            mask1=self.mask1, mask2=self.mask2, cap1=self.cap1, cap2=self.cap2,
            y0=self.y0, y1=self.y1, y2=self.y2,
        )
        fields.update(changes)
        return GameSpec(**fields)

    @cached_property
    def _step_factors(self) -> list:
        """LU factors of ``I + dt*(A_h + diag(a_{k+1}))`` for k = 0..n_steps-1.

        Identical potential rows share one factorization.
        """
        diag, off = self.grid.laplacian_bands()
        dt = self.dt
        by_row = {}
        out = []
        for k in range(1, self.n_steps + 1):
            row = self.potential[k]
            key = row.tobytes()
            if key not in by_row:
                d = 1.0 + dt * (diag + row)
                e = dt * off
                dl, du_, du, du2, ipiv, info = lapack.dgttrf(e, d, e)
                if info > 0:
                    raise LinearSolveError(
                        f"zero pivot {info} in step matrix at t={k * dt:g}"
                    )
                by_row[key] = (dl, du_, du, du2, ipiv)
            out.append(by_row[key])
        return out

    def step_solve(self, k: int, rhs: np.ndarray) -> np.ndarray:
        """Solve ``(I + dt*(A_h + diag(a_{k+1}))) x = rhs`` (k is the step index)."""
        dl, d, du, du2, ipiv = self._step_factors[k]
        x, info = lapack.dgttrs(dl, d, du, du2, ipiv, rhs.reshape(-1, 1))
        if info != 0:
            raise LinearSolveError(f"dgttrs failed with info={info}")
        return x[:, 0]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a

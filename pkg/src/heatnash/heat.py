"""Implicit Euler solvers for the controlled heat equation and its adjoint.

With ``M_{k+1} = I + dt*(A_h + diag(a_{k+1}))`` (``A_h`` the Dirichlet 3-point
Laplacian) the forward step is

    y_{k+1} = M_{k+1}^{-1} y_k + dt*(chi_1 u1_k + chi_2 u2_k)

i.e. implicit Euler for the free evolution with the slice-k source deposited
at the end of the step. The adjoint sweep is ``phi_N = p``,
``M_{k+1} phi_k = phi_{k+1}``. Because every ``M_{k+1}`` is symmetric the two
sweeps are exact transposes and

    <z_N, p>_h = dt * sum_k <chi v_k, phi_{k+1}>_h

holds to round-off, so slice ``k`` of a control pairs with ``phi_{k+1}``.
"""

from __future__ import annotations

import numpy as np

from heatnash.controls import Control
from heatnash.errors import StructuralError
from heatnash.game import GameSpec, check_player


def _check_control(spec: GameSpec, u: Control, player: int, name: str) -> np.ndarray:
    if u.values.shape != (spec.n_steps, spec.grid.n_interior):
        raise StructuralError(
            f"{name} has shape {u.values.shape}, expected ({spec.n_steps}, {spec.grid.n_interior})"
        )
    if u.mask.grid != spec.grid or not np.array_equal(u.mask.node_flags, spec.mask(player).node_flags):
        raise StructuralError(f"{name} is not supported on the region of player {player}")
    return u.values


def _march(spec: GameSpec, y0: np.ndarray, source: np.ndarray) -> np.ndarray:
    """Forward sweep with a precomputed ``(n_steps, n)`` source (already masked)."""
    dt = spec.dt
    y = np.empty((spec.n_steps + 1, spec.grid.n_interior))
    y[0] = y0
    for k in range(spec.n_steps):
        y[k + 1] = spec.step_solve(k, y[k]) + dt * source[k]
    return y


def solve_forward(spec: GameSpec, u1: Control, u2: Control) -> np.ndarray:
    """State ``y`` at every time node, shape ``(n_steps + 1, n_interior)``."""
    v1 = _check_control(spec, u1, 1, "u1")
    v2 = _check_control(spec, u2, 2, "u2")
    source = v1 * spec.mask1.indicator + v2 * spec.mask2.indicator
    return _march(spec, spec.y0, source)


def solve_linearized(spec: GameSpec, v: Control, which) -> np.ndarray:
    """Response ``z`` to a control perturbation of one player, from ``z(0) = 0``."""
    which = check_player(which)
    vals = _check_control(spec, v, which, "v")
    source = vals * spec.mask(which).indicator
    return _march(spec, np.zeros(spec.grid.n_interior), source)


def solve_adjoint(spec: GameSpec, terminal) -> np.ndarray:
    """Backward sweep ``phi_N = terminal``, ``M_{k+1} phi_k = phi_{k+1}``."""
    terminal = spec.grid.check(terminal, "terminal")
    phi = np.empty((spec.n_steps + 1, spec.grid.n_interior))
    phi[-1] = terminal
    for k in range(spec.n_steps - 1, -1, -1):
        phi[k] = spec.step_solve(k, phi[k + 1])
    return phi

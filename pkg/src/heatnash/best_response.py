"""Player objectives, adjoint gradients and the projected-gradient best response.

Gradients are represented in the pairing ``<f, g> = sum_k <f_k, g_k>_h``, in which
the gradient of ``0.5 * J_i**2`` is ``-dt * chi_i * phi_{k+1}``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from heatnash.controls import (
    Control,
    bang_bang_from_adjoint,
    masked_adjoint,
    project_admissible,
    vi_residual,
)
from heatnash.errors import ConfigurationError
from heatnash.game import GameSpec, check_player
from heatnash.grid import norm_h
from heatnash.heat import solve_adjoint, solve_forward

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BestResponseOptions:
    max_iters: int = 500
    vi_tol: float = 1e-8
    step_init: float = 1.0
    backtrack_factor: float = 0.5
    armijo_c: float = 1e-4

    def __post_init__(self):
        if int(self.max_iters) != self.max_iters or self.max_iters < 0:
            raise ConfigurationError(f"max_iters must be a nonnegative integer, got {self.max_iters!r}")
        if not self.vi_tol > 0:
            raise ConfigurationError(f"vi_tol must be > 0, got {self.vi_tol!r}")
        if not self.step_init > 0:
            raise ConfigurationError(f"step_init must be > 0, got {self.step_init!r}")
        for name in ("backtrack_factor", "armijo_c"):
            val = getattr(self, name)
            if not 0 < val < 1:
                raise ConfigurationError(f"{name} must lie in (0, 1), got {val!r}")


@dataclass
class BestResponseOutcome:
    control: Control
    objective: float  # J_i, not the squared surrogate
    vi_residual: float
    iters: int
    converged: bool
    surrogate_history: list = field(default_factory=list)  # 0.5*J^2 at accepted iterates


def _pair(spec: GameSpec, player: int, own: Control, other: Control):
    return (own, other) if player == 1 else (other, own)


def _mismatch(spec: GameSpec, player: int, u1: Control, u2: Control) -> np.ndarray:
    return solve_forward(spec, u1, u2)[-1] - spec.target(player)


def objective(spec: GameSpec, player, u1: Control, u2: Control) -> float:
    """``J_i = |y(T; u1, u2) - y_i|_h``."""
    player = check_player(player)
    return norm_h(spec.grid, _mismatch(spec, player, u1, u2))


def surrogate(spec: GameSpec, player, u1: Control, u2: Control) -> float:
    """``0.5 * J_i**2`` (smooth, same minimizers as J_i)."""
    r = _mismatch(spec, check_player(player), u1, u2)
    return 0.5 * spec.h * float(np.dot(r, r))


def player_adjoint(spec: GameSpec, player, u1: Control, u2: Control) -> np.ndarray:
    """Adjoint with terminal ``y_i - y(T; u1, u2)`` (phi for player 1, psi for player 2)."""
    player = check_player(player)
    return solve_adjoint(spec, -_mismatch(spec, player, u1, u2))


def gradient(spec: GameSpec, player, u1: Control, u2: Control) -> np.ndarray:
    player = check_player(player)
    phi = player_adjoint(spec, player, u1, u2)
    return -spec.dt * masked_adjoint(phi, spec.mask(player))


def finite_difference_gradient(spec: GameSpec, player, u1: Control, u2: Control, eps: float) -> np.ndarray:
    """Central differences of ``0.5*J_i**2`` over every masked node and slice.

    Raw partial derivatives are divided by ``h`` so the result is comparable with
    :func:`gradient` (same pairing).
    """
    player = check_player(player)
    if not eps > 0:
        raise ConfigurationError(f"eps must be > 0, got {eps!r}")
    own = u1 if player == 1 else u2
    other = u2 if player == 1 else u1
    base = np.array(own.values)
    out = np.zeros_like(base)
    for k in range(spec.n_steps):
        for j in own.mask.indices:
            vals = base.copy()
            vals[k, j] = base[k, j] + eps
            plus = surrogate(spec, player, *_pair(spec, player, own.with_values(vals), other))
            vals[k, j] = base[k, j] - eps
            minus = surrogate(spec, player, *_pair(spec, player, own.with_values(vals), other))
            out[k, j] = (plus - minus) / (2.0 * eps)
    return out / spec.h


def _dot(spec: GameSpec, f: np.ndarray, g: np.ndarray) -> float:
    return spec.h * float(np.sum(f * g))


def solve_best_response(
    spec: GameSpec,
    player,
    other: Control,
    opts: BestResponseOptions | None = None,
    initial: Control | None = None,
) -> BestResponseOutcome:
    """Minimize ``J_player`` over the player's admissible set with ``other`` fixed.

    Projected gradient on ``0.5*J**2`` with Armijo backtracking along the
    projection arc. The trial step is ``step_init`` on the first iteration and a
    Barzilai-Borwein step afterwards. Stops once the VI residual drops to
    ``vi_tol``. The default starting point is the bang-bang control built from
    the adjoint at zero own control (zero if that adjoint vanishes).
    """
    player = check_player(player)
    opts = opts or BestResponseOptions()
    other_player = 3 - player
    other.require_admissible(f"control of player {other_player}")
    mask, cap = spec.mask(player), spec.cap(player)
    zero = Control.zeros(spec, player)

    if cap == 0.0:
        u1, u2 = _pair(spec, player, zero, other)
        return BestResponseOutcome(zero, objective(spec, player, u1, u2), 0.0, 0, True)

    if initial is None:
        phi0 = player_adjoint(spec, player, *_pair(spec, player, zero, other))
        u = bang_bang_from_adjoint(phi0, mask, cap, spec.time).control
    else:
        u = project_admissible(initial)

    def evaluate(ctrl):
        y = solve_forward(spec, *_pair(spec, player, ctrl, other))
        r = y[-1] - spec.target(player)
        return 0.5 * spec.h * float(np.dot(r, r)), r

    f, r = evaluate(u)
    history = [f]
    step = opts.step_init
    prev = None  # (u, g) of the previous accepted iterate
    converged = False
    vi = np.inf
    it = 0
    while True:
        phi = solve_adjoint(spec, -r)
        vi = vi_residual(u, phi)
        if vi <= opts.vi_tol:
            converged = True
            break
        if it >= opts.max_iters:
            break
        g = -spec.dt * masked_adjoint(phi, mask)
        if prev is not None:
            du = u.values - prev[0]
            dg = g - prev[1]
            curv = _dot(spec, du, dg)
            step = _dot(spec, du, du) / curv if curv > 0 else opts.step_init
        s = step
        accepted = False
        for _ in range(60):
            trial = project_admissible(u.with_values(u.values - s * g))
            d = trial.values - u.values
            f_new, r_new = evaluate(trial)
            if f_new <= f + opts.armijo_c * _dot(spec, g, d):
                accepted = True
                break
            s *= opts.backtrack_factor
        if not accepted:
            log.debug("player %d: line search stalled at iter %d (vi=%g)", player, it, vi)
            break
        prev = (u.values, g)
        u, f, r = trial, f_new, r_new
        history.append(f)
        it += 1

    return BestResponseOutcome(
        control=u,
        objective=norm_h(spec.grid, r),
        vi_residual=float(vi),
        iters=it,
        converged=converged,
        surrogate_history=history,
    )

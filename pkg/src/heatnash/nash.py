"""Iterated best response for the two-player game and equilibrium certification."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from heatnash.best_response import (
    BestResponseOptions,
    objective,
    player_adjoint,
    solve_best_response,
)
from heatnash.controls import Control, project_admissible, vi_residual
from heatnash.errors import ConfigurationError
from heatnash.game import GameSpec
from heatnash.grid import slice_norms

log = logging.getLogger(__name__)

MODES = ("gauss_seidel", "jacobi")


@dataclass(frozen=True)
class NashOptions:
    mode: str = "gauss_seidel"
    max_rounds: int = 200
    relax: float = 1.0
    nash_tol: float = 1e-6
    br_opts: BestResponseOptions = field(default_factory=BestResponseOptions)

    def __post_init__(self):
        mode = self.mode.replace("-", "_")
        if mode not in MODES:
            raise ConfigurationError(f"mode must be one of {MODES}, got {self.mode!r}")
        object.__setattr__(self, "mode", mode)
        if int(self.max_rounds) != self.max_rounds or self.max_rounds < 0:
            raise ConfigurationError(f"max_rounds must be a nonnegative integer, got {self.max_rounds!r}")
        if not 0 < self.relax <= 1:
            raise ConfigurationError(f"relax must lie in (0, 1], got {self.relax!r}")
        if not self.nash_tol > 0:
            raise ConfigurationError(f"nash_tol must be > 0, got {self.nash_tol!r}")


class RoundRecord(NamedTuple):
    round: int
    vi1: float
    vi2: float
    J1: float
    J2: float
    update_distance: float


@dataclass
class EquilibriumResult:
    u1: Control
    u2: Control
    vi1: float
    vi2: float
    J1: float
    J2: float
    rounds: int
    converged: bool
    history: list[RoundRecord]
    best_round: int = 0
    initialization: str = "zero"

    @property
    def max_vi(self) -> float:
        return max(self.vi1, self.vi2)


def pair_residuals(spec: GameSpec, u1: Control, u2: Control):
    """(vi1, vi2, J1, J2), each player's VI residual against its own adjoint."""
    phi = player_adjoint(spec, 1, u1, u2)
    psi = player_adjoint(spec, 2, u1, u2)
    return (
        vi_residual(u1, phi),
        vi_residual(u2, psi),
        objective(spec, 1, u1, u2),
        objective(spec, 2, u1, u2),
    )


def _relaxed(old: Control, new: Control, relax: float) -> Control:
    if relax == 1.0:
        return new
    return project_admissible(old.with_values((1.0 - relax) * old.values + relax * new.values))


def _distance(spec: GameSpec, a: Control, b: Control) -> float:
    d = slice_norms(spec.grid, a.values - b.values)
    return float(np.sqrt(spec.dt * np.sum(d * d)))


def solve_nash(
    spec: GameSpec,
    opts: NashOptions | None = None,
    initial: tuple[Control, Control] | None = None,
    on_round=None,
) -> EquilibriumResult:
    """Best-response rounds until both VI residuals are at most ``nash_tol``.

    Starts from the zero pair unless ``initial`` is given. Round 0 of the
    history is the starting pair; convergence is only declared after at least
    one round. The returned pair is the one with the smallest ``max(vi1, vi2)``
    seen (earliest on ties). After the first round each best response is warm
    started from the player's current control. ``on_round(rnd, u1, u2)`` is
    called after every round.
    """
    opts = opts or NashOptions()
    if initial is None:
        u1, u2 = Control.zeros(spec, 1), Control.zeros(spec, 2)
        init_label = "zero"
    else:
        u1, u2 = project_admissible(initial[0]), project_admissible(initial[1])
        init_label = "given"

    vi1, vi2, J1, J2 = pair_residuals(spec, u1, u2)
    history = [RoundRecord(0, vi1, vi2, J1, J2, 0.0)]
    best = (max(vi1, vi2), 0, u1, u2, vi1, vi2, J1, J2)
    converged = False
    br = opts.br_opts
    rounds = 0
    for rnd in range(1, opts.max_rounds + 1):
        warm1 = None if rnd == 1 else u1
        warm2 = None if rnd == 1 else u2
        if opts.mode == "gauss_seidel":
            new1 = _relaxed(u1, solve_best_response(spec, 1, u2, br, warm1).control, opts.relax)
            new2 = _relaxed(u2, solve_best_response(spec, 2, new1, br, warm2).control, opts.relax)
        else:
            r1 = solve_best_response(spec, 1, u2, br, warm1).control
            r2 = solve_best_response(spec, 2, u1, br, warm2).control
            new1, new2 = _relaxed(u1, r1, opts.relax), _relaxed(u2, r2, opts.relax)
        dist = float(np.hypot(_distance(spec, new1, u1), _distance(spec, new2, u2)))
        u1, u2 = new1, new2
        rounds = rnd
        vi1, vi2, J1, J2 = pair_residuals(spec, u1, u2)
        history.append(RoundRecord(rnd, vi1, vi2, J1, J2, dist))
        if on_round is not None:
            on_round(rnd, u1, u2)
        log.debug("round %d: vi1=%.3e vi2=%.3e dist=%.3e", rnd, vi1, vi2, dist)
        if max(vi1, vi2) < best[0]:
            best = (max(vi1, vi2), rnd, u1, u2, vi1, vi2, J1, J2)
        if max(vi1, vi2) <= opts.nash_tol:
            converged = True
            break

    _, best_round, b1, b2, bv1, bv2, bJ1, bJ2 = best
    return EquilibriumResult(
        u1=b1, u2=b2, vi1=bv1, vi2=bv2, J1=bJ1, J2=bJ2,
        rounds=rounds, converged=converged, history=history,
        best_round=best_round, initialization=init_label,
    )


class Probe(NamedTuple):
    player: int
    index: int
    J_deviation: float
    J_pair: float
    violated: bool


@dataclass
class Certificate:
    vi1: float
    vi2: float
    J1: float
    J2: float
    tol: float
    first_order_pass: bool
    probes: list[Probe]
    probe_pass: bool
    seed: int

    @property
    def passed(self) -> bool:
        return self.first_order_pass and self.probe_pass

    @property
    def violations(self) -> list[Probe]:
        return [p for p in self.probes if p.violated]


def random_deviation(spec: GameSpec, player: int, base: Control, rng: np.random.Generator, index: int) -> Control:
    """Seeded admissible deviation: alternately a local perturbation of ``base``
    on a few slices and a fully random admissible control."""
    mask, cap = spec.mask(player), spec.cap(player)
    noise = rng.standard_normal((spec.n_steps, spec.grid.n_interior)) * mask.indicator
    noise_norms = slice_norms(spec.grid, noise)
    noise_norms[noise_norms == 0] = 1.0
    directions = noise / noise_norms[:, None]
    if index % 2 == 0:
        n_slices = int(rng.integers(1, spec.n_steps + 1))
        slices = rng.choice(spec.n_steps, size=n_slices, replace=False)
        scale = cap * 10.0 ** -float(rng.integers(0, 3))
        vals = np.array(base.values)
        vals[slices] += scale * directions[slices]
    else:
        radii = cap * rng.uniform(0.0, 1.0, spec.n_steps)
        vals = directions * radii[:, None]
    return project_admissible(base.with_values(vals))


def check_equilibrium(
    spec: GameSpec,
    u1: Control,
    u2: Control,
    tol: float,
    n_probes: int,
    seed: int,
    extra_probes: dict | None = None,
) -> Certificate:
    """Two-part Nash certificate for the pair ``(u1, u2)``.

    (a) both VI residuals at most ``tol``; (b) no probed unilateral deviation
    lowers the deviating player's cost by more than ``tol``. ``extra_probes``
    maps a player id to additional deviation controls checked after the random
    ones.
    """
    u1.require_admissible("u1")
    u2.require_admissible("u2")
    vi1, vi2, J1, J2 = pair_residuals(spec, u1, u2)
    rng = np.random.default_rng(seed)
    probes = []
    extra_probes = extra_probes or {}
    for player, base, J_pair in ((1, u1, J1), (2, u2, J2)):
        deviations = [random_deviation(spec, player, base, rng, i) for i in range(n_probes)]
        deviations += list(extra_probes.get(player, ()))
        for i, dev in enumerate(deviations):
            dev.require_admissible(f"probe {i} of player {player}")
            pair = (dev, u2) if player == 1 else (u1, dev)
            J_dev = objective(spec, player, *pair)
            probes.append(Probe(player, i, J_dev, J_pair, J_dev < J_pair - tol))
    return Certificate(
        vi1=vi1, vi2=vi2, J1=J1, J2=J2, tol=tol,
        first_order_pass=vi1 <= tol and vi2 <= tol,
        probes=probes,
        probe_pass=not any(p.violated for p in probes),
        seed=seed,
    )

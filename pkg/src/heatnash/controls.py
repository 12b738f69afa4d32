"""Admissible controls: per-slice L2-ball constraints on a fixed region.

A control is piecewise constant in time. Slice ``k`` acts on ``[t_k, t_{k+1})``
and is paired with the adjoint at ``t_{k+1}``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from heatnash.errors import ConfigurationError, ContractViolation, StructuralError
from heatnash.grid import SubdomainMask, TimeGrid, slice_norms

ADMISSIBLE_RTOL = 1e-12
DEGENERACY_RTOL = 1e-14
DEFAULT_SAT_TOL = 1e-3


@dataclass(frozen=True, eq=False)
class Control:
    """Slices ``values[k]`` (shape ``(n_steps, n_interior)``) supported on ``mask``."""

    values: np.ndarray
    mask: SubdomainMask
    cap: float
    time: TimeGrid

    def __post_init__(self):
        cap = float(self.cap)
        if not (np.isfinite(cap) and cap >= 0):
            raise ConfigurationError(f"control cap must be >= 0, got {self.cap!r}")
        object.__setattr__(self, "cap", cap)
        vals = np.array(self.values, dtype=float, copy=True)
        expected = (self.time.n_steps, self.mask.grid.n_interior)
        if vals.shape != expected:
            raise StructuralError(f"control values have shape {vals.shape}, expected {expected}")
        if not np.all(np.isfinite(vals)):
            raise StructuralError("control values contain non-finite entries")
        if np.any(vals[:, ~self.mask.node_flags] != 0.0):
            raise StructuralError(f"control does not vanish outside region {self.mask.interval}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def zeros(cls, spec, player) -> "Control":
        return cls(
            np.zeros((spec.n_steps, spec.grid.n_interior)),
            spec.mask(player),
            spec.cap(player),
            spec.time,
        )

    @classmethod
    def for_player(cls, spec, player, values, *, clip_to_mask=False) -> "Control":
        values = np.asarray(values, dtype=float)
        mask = spec.mask(player)
        if clip_to_mask:
            values = values * mask.indicator
        return cls(values, mask, spec.cap(player), spec.time)

    def with_values(self, values) -> "Control":
        return Control(values, self.mask, self.cap, self.time)

    @property
    def grid(self):
        return self.mask.grid

    def norms(self) -> np.ndarray:
        return slice_norms(self.grid, self.values)

    def is_admissible(self) -> bool:
        return bool(np.all(self.norms() <= self.cap * (1.0 + ADMISSIBLE_RTOL)))

    def require_admissible(self, name="control"):
        if not self.is_admissible():
            worst = float(self.norms().max())
            raise ContractViolation(
                f"{name} is not admissible: max slice norm {worst!r} exceeds cap {self.cap!r}"
            )


def project_admissible(u: Control) -> Control:
    """Euclidean projection onto the product of per-slice balls of radius ``cap``."""
    norms = u.norms()
    if u.cap == 0.0:
        return u.with_values(np.zeros_like(u.values))
    scale = np.ones_like(norms)
    over = norms > u.cap
    scale[over] = u.cap / norms[over]
    return u.with_values(u.values * scale[:, None])


def masked_adjoint(phi, mask: SubdomainMask) -> np.ndarray:
    """``mask * phi_{k+1}`` for k = 0..n_steps-1."""
    phi = np.asarray(phi, dtype=float)
    if phi.ndim != 2 or phi.shape[1] != mask.grid.n_interior:
        raise StructuralError(f"adjoint has shape {phi.shape}, not a trajectory on the mask's grid")
    return phi[1:] * mask.indicator


class BangBang(NamedTuple):
    control: Control
    degenerate: np.ndarray  # slice indices where the masked adjoint is numerically zero


def degenerate_threshold(masked_norms: np.ndarray) -> float:
    peak = float(masked_norms.max()) if masked_norms.size else 0.0
    return DEGENERACY_RTOL * peak


def bang_bang_from_adjoint(phi, mask: SubdomainMask, cap: float, time: TimeGrid) -> BangBang:
    """Maximizer of ``<u_k, chi phi_{k+1}>`` over the ball of radius ``cap``, slice by slice.

    Slices whose masked adjoint norm does not exceed ``1e-14 * max_k norm`` are set
    to zero and reported as degenerate.
    """
    mphi = masked_adjoint(phi, mask)
    if mphi.shape[0] != time.n_steps:
        raise StructuralError(
            f"adjoint has {mphi.shape[0] + 1} time nodes, expected {time.n_steps + 1}"
        )
    norms = slice_norms(mask.grid, mphi)
    eps = degenerate_threshold(norms)
    good = norms > eps
    values = np.zeros_like(mphi)
    values[good] = cap * mphi[good] / norms[good, None]
    return BangBang(Control(values, mask, cap, time), np.flatnonzero(~good))


def vi_residual(u: Control, phi) -> float:
    """First-order gap ``dt * sum_k [cap*|chi phi_{k+1}|_h - <u_k, chi phi_{k+1}>_h]``.

    Nonnegative for admissible ``u``; zero exactly when every slice maximizes the
    pairing with the masked adjoint. Per-slice terms are clipped at 0 so that
    round-off (and the 1e-12 admissibility slack) cannot make the gap negative.
    """
    u.require_admissible("u")
    mphi = masked_adjoint(phi, u.mask)
    if mphi.shape != u.values.shape:
        raise StructuralError(f"adjoint time nodes do not match control with {u.time.n_steps} slices")
    h = u.grid.h
    support = u.cap * slice_norms(u.grid, mphi)
    pairing = h * np.einsum("ij,ij->i", u.values, mphi)
    return float(u.time.dt * np.sum(np.maximum(support - pairing, 0.0)))


class SaturationProfile(NamedTuple):
    times: np.ndarray
    norms: np.ndarray
    fraction: float
    sat_tol: float


def saturation_profile(u: Control, sat_tol: float = DEFAULT_SAT_TOL) -> SaturationProfile:
    """Slice norms at ``t_k`` and the share of slices with ``|norm - cap| <= sat_tol*max(cap, 1)``."""
    norms = u.norms()
    hit = np.abs(norms - u.cap) <= sat_tol * max(u.cap, 1.0)
    return SaturationProfile(u.time.nodes[:-1], norms, float(hit.mean()), sat_tol)


def write_control_csv(u: Control, path) -> Path:
    """``k,t,node_index,value`` rows for masked nodes; node_index j is 1-based (x_j = j*h)."""
    path = Path(path)
    times = u.time.nodes
    idx = u.mask.indices
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "t", "node_index", "value"])
        for k in range(u.time.n_steps):
            for j in idx:
                w.writerow([k, repr(float(times[k])), int(j) + 1, repr(float(u.values[k, j]))])
    return path


def read_control_csv(path, spec, player) -> Control:
    path = Path(path)
    mask = spec.mask(player)
    values = np.zeros((spec.n_steps, spec.grid.n_interior))
    seen = np.zeros_like(values, dtype=bool)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["k", "t", "node_index", "value"]:
            raise StructuralError(f"{path}: header must be k,t,node_index,value")
        for row in reader:
            k, j = int(row["k"]), int(row["node_index"]) - 1
            if not (0 <= k < spec.n_steps and 0 <= j < spec.grid.n_interior):
                raise StructuralError(f"{path}: entry (k={k}, node_index={j + 1}) outside the grid")
            if not mask.node_flags[j]:
                raise StructuralError(f"{path}: node_index {j + 1} lies outside region {mask.interval}")
            values[k, j] = float(row["value"])
            seen[k, j] = True
    if not np.array_equal(seen, np.broadcast_to(mask.node_flags, seen.shape)):
        raise StructuralError(f"{path}: missing entries for some masked nodes")
    return Control(values, mask, spec.cap(player), spec.time)

"""Bang-bang verification of computed equilibria and report export."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from heatnash.best_response import player_adjoint
from heatnash.controls import (
    DEFAULT_SAT_TOL,
    SaturationProfile,
    degenerate_threshold,
    masked_adjoint,
    saturation_profile,
)
from heatnash.game import GameSpec
from heatnash.grid import slice_norms
from heatnash.nash import EquilibriumResult

DEFAULT_SAT_THRESHOLD = 0.99
VERDICTS = ("player1_saturated", "player2_saturated", "both_saturated", "neither")


@dataclass
class BangBangReport:
    sat_fraction_1: float
    sat_fraction_2: float
    degenerate_slices_1: int
    degenerate_slices_2: int
    verdict: str
    sat_tol: float
    sat_threshold: float
    profile_1: SaturationProfile
    profile_2: SaturationProfile


def classify(frac1: float, frac2: float, sat_threshold: float) -> str:
    s1, s2 = frac1 >= sat_threshold, frac2 >= sat_threshold
    if s1 and s2:
        return "both_saturated"
    if s1:
        return "player1_saturated"
    if s2:
        return "player2_saturated"
    return "neither"


class AdjointProfile(NamedTuple):
    times: np.ndarray  # t_{k+1}, k = 0..n_steps-1
    masked_norms: np.ndarray
    threshold: float
    n_degenerate: int


@dataclass
class NondegeneracyReport:
    phi: AdjointProfile
    psi: AdjointProfile
    targets_differ: bool

    @property
    def dichotomy_observable(self) -> bool:
        """False only if y1 != y2 and both masked adjoints vanish on some slices."""
        if not self.targets_differ:
            return True
        return self.phi.n_degenerate == 0 or self.psi.n_degenerate == 0


def _adjoint_profile(spec: GameSpec, player: int, result: EquilibriumResult) -> AdjointProfile:
    adj = player_adjoint(spec, player, result.u1, result.u2)
    norms = slice_norms(spec.grid, masked_adjoint(adj, spec.mask(player)))
    eps = degenerate_threshold(norms)
    return AdjointProfile(spec.time.nodes[1:], norms, eps, int(np.sum(norms <= eps)))


def adjoint_nondegeneracy(spec: GameSpec, result: EquilibriumResult) -> NondegeneracyReport:
    """Masked norms of phi (terminal y1 - y(T)) and psi (terminal y2 - y(T)) per slice."""
    return NondegeneracyReport(
        phi=_adjoint_profile(spec, 1, result),
        psi=_adjoint_profile(spec, 2, result),
        targets_differ=not np.array_equal(spec.y1, spec.y2),
    )


def verify_bang_bang(
    spec: GameSpec,
    result: EquilibriumResult,
    sat_tol: float = DEFAULT_SAT_TOL,
    sat_threshold: float = DEFAULT_SAT_THRESHOLD,
) -> BangBangReport:
    p1 = saturation_profile(result.u1, sat_tol)
    p2 = saturation_profile(result.u2, sat_tol)
    nondeg = adjoint_nondegeneracy(spec, result)
    return BangBangReport(
        sat_fraction_1=p1.fraction,
        sat_fraction_2=p2.fraction,
        degenerate_slices_1=nondeg.phi.n_degenerate,
        degenerate_slices_2=nondeg.psi.n_degenerate,
        verdict=classify(p1.fraction, p2.fraction, sat_threshold),
        sat_tol=sat_tol,
        sat_threshold=sat_threshold,
        profile_1=p1,
        profile_2=p2,
    )


def _fmt(x) -> str:
    return repr(float(x))


def write_residuals_csv(result: EquilibriumResult, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["round", "vi1", "vi2", "J1", "J2", "update_distance"])
        for rec in result.history:
            w.writerow([rec.round] + [_fmt(v) for v in rec[1:]])
    return path


def result_scalars(result: EquilibriumResult) -> dict:
    return {
        "vi1": float(result.vi1),
        "vi2": float(result.vi2),
        "J1": float(result.J1),
        "J2": float(result.J2),
        "rounds": int(result.rounds),
        "best_round": int(result.best_round),
        "converged": bool(result.converged),
        "initialization": result.initialization,
    }


def report_scalars(report: BangBangReport) -> dict:
    return {
        "sat_fraction_1": report.sat_fraction_1,
        "sat_fraction_2": report.sat_fraction_2,
        "degenerate_slices_1": report.degenerate_slices_1,
        "degenerate_slices_2": report.degenerate_slices_2,
        "verdict": report.verdict,
        "sat_tol": report.sat_tol,
        "sat_threshold": report.sat_threshold,
    }


def write_json(data: dict, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(data, indent=2, sort_keys=True, allow_nan=False) + "\n")
    return path


def export_report(
    result: EquilibriumResult,
    report: BangBangReport,
    out_dir,
    config: dict | None = None,
    seed: int | None = None,
) -> dict[str, Path]:
    """Write ``saturation.csv``, ``residuals.csv`` and ``summary.json`` to ``out_dir``."""
    from heatnash import __version__

    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        sat_path = out_dir / "saturation.csv"
        times = result.u1.time.nodes
        n1, n2 = result.u1.norms(), result.u2.norms()
        with sat_path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["k", "t", "norm_u1", "norm_u2", "cap1", "cap2"])
            for k in range(len(n1)):
                w.writerow([k, _fmt(times[k]), _fmt(n1[k]), _fmt(n2[k]),
                            _fmt(result.u1.cap), _fmt(result.u2.cap)])
        res_path = write_residuals_csv(result, out_dir / "residuals.csv")
        summary = {
            "tool": "heatnash",
            "version": __version__,
            "seed": seed,
            "result": result_scalars(result),
            "bang_bang": report_scalars(report),
            "config": config,
        }
        sum_path = write_json(summary, out_dir / "summary.json")
    except OSError as exc:
        raise OSError(f"cannot write report to {exc.filename or out_dir}: {exc.strerror}") from exc
    return {"saturation": sat_path, "residuals": res_path, "summary": sum_path}

"""Command-line entry point: ``heatnash <command> ...``.

Exit codes: 0 success, 1 failed gradient check or other runtime error,
2 configuration/usage error, 3 Nash iteration did not converge (outputs still
written), 4 equilibrium certification failed.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from heatnash import __version__
from heatnash.analysis import (
    adjoint_nondegeneracy,
    export_report,
    report_scalars,
    result_scalars,
    verify_bang_bang,
    write_json,
)
from heatnash.best_response import finite_difference_gradient, gradient, objective, solve_best_response
from heatnash.config import build, demo_config, dump_config, load_config, DEMOS
from heatnash.controls import Control, project_admissible, read_control_csv, write_control_csv
from heatnash.errors import ConfigurationError, StructuralError
from heatnash.heat import solve_forward
from heatnash.nash import EquilibriumResult, check_equilibrium, pair_residuals, solve_nash

log = logging.getLogger("heatnash")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NO_CONVERGENCE, EXIT_NOT_CERTIFIED = 0, 1, 2, 3, 4
GRADIENT_RTOL = 1e-6


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="heatnash", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help, config=True, out=True, out_required=True, seed=False):
        sp = sub.add_parser(name, help=help)
        if config:
            sp.add_argument("--config", required=True, type=Path)
        if out:
            sp.add_argument("--out", required=out_required, type=Path)
        if seed:
            sp.add_argument("--seed", type=int, help="override the config seed")
        return sp

    sp = add("forward", "solve the state equation and write the trajectory")
    sp.add_argument("--controls", type=Path, help="directory with u1.csv/u2.csv (default: zero controls)")

    sp = add("gradient-check", "compare adjoint gradient with central differences",
             out_required=False, seed=True)
    sp.add_argument("--player", type=int, choices=(1, 2), required=True)
    sp.add_argument("--eps", type=float, default=1e-5)

    sp = add("best-response", "solve one player's best response", seed=True)
    sp.add_argument("--player", type=int, choices=(1, 2), required=True)
    sp.add_argument("--other", type=Path, help="directory holding the other player's control CSV")

    sp = add("nash", "iterate best responses to a Nash equilibrium", seed=True)
    sp.add_argument("--mode", choices=("gauss-seidel", "jacobi"))
    sp.add_argument("--relax", type=float)
    sp.add_argument("--max-rounds", type=int)
    sp.add_argument("--tol", type=float)

    sp = add("verify", "certify a control pair as a Nash equilibrium", out_required=False, seed=True)
    sp.add_argument("--controls", type=Path, required=True)
    sp.add_argument("--tol", type=float, default=1e-5)
    sp.add_argument("--probes", type=int, default=64)

    sp = add("demo", "write a preset configuration", config=False)
    sp.add_argument("--name", required=True, choices=sorted(DEMOS))
    return p


def _load(args):
    cfg = load_config(args.config)
    if getattr(args, "seed", None) is not None:
        cfg["seed"] = args.seed
    return cfg


def _base_summary(command: str, cfg: dict | None) -> dict:
    return {
        "tool": "heatnash",
        "version": __version__,
        "command": command,
        "seed": None if cfg is None else cfg["seed"],
        "config": cfg,
    }


def _read_pair(spec, directory: Path):
    return read_control_csv(directory / "u1.csv", spec, 1), read_control_csv(directory / "u2.csv", spec, 2)


def _random_admissible(spec, player, rng) -> Control:
    mask = spec.mask(player)
    vals = rng.standard_normal((spec.n_steps, spec.grid.n_interior)) * mask.indicator
    u = Control.for_player(spec, player, vals)
    norms = u.norms()
    radii = 0.5 * spec.cap(player) * rng.uniform(0.0, 1.0, spec.n_steps)
    scale = np.divide(radii, norms, out=np.zeros_like(norms), where=norms > 0)
    return project_admissible(u.with_values(vals * scale[:, None]))


def cmd_forward(args) -> int:
    cfg = _load(args)
    spec, _, _ = build(cfg)
    if args.controls:
        u1, u2 = _read_pair(spec, args.controls)
    else:
        u1, u2 = Control.zeros(spec, 1), Control.zeros(spec, 2)
    y = solve_forward(spec, u1, u2)
    args.out.mkdir(parents=True, exist_ok=True)
    with (args.out / "state.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "t", "node_index", "value"])
        for k, t in enumerate(spec.time.nodes):
            for j in range(spec.grid.n_interior):
                w.writerow([k, repr(float(t)), j + 1, repr(float(y[k, j]))])
    summary = _base_summary("forward", cfg)
    summary["J1"] = objective(spec, 1, u1, u2)
    summary["J2"] = objective(spec, 2, u1, u2)
    write_json(summary, args.out / "summary.json")
    print(f"J1={summary['J1']!r} J2={summary['J2']!r}")
    return EXIT_OK


def cmd_gradient_check(args) -> int:
    cfg = _load(args)
    spec, _, _ = build(cfg)
    if not args.eps > 0:
        raise ConfigurationError(f"--eps must be > 0, got {args.eps!r}")
    rng = np.random.default_rng(cfg["seed"])
    u1, u2 = _random_admissible(spec, 1, rng), _random_admissible(spec, 2, rng)
    g = gradient(spec, args.player, u1, u2)
    fd = finite_difference_gradient(spec, args.player, u1, u2, args.eps)
    scale = float(np.max(np.abs(g)))
    err = float(np.max(np.abs(fd - g))) / scale if scale > 0 else float(np.max(np.abs(fd)))
    ok = err <= GRADIENT_RTOL
    print(f"player {args.player}: max relative error {err:.3e} (eps={args.eps:g}) {'PASS' if ok else 'FAIL'}")
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        summary = _base_summary("gradient-check", cfg)
        summary.update(player=args.player, eps=args.eps, max_relative_error=err, passed=ok)
        write_json(summary, args.out / "summary.json")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_best_response(args) -> int:
    cfg = _load(args)
    spec, _, br = build(cfg)
    other_player = 3 - args.player
    if args.other:
        other = read_control_csv(args.other / f"u{other_player}.csv", spec, other_player)
    else:
        other = Control.zeros(spec, other_player)
    out = solve_best_response(spec, args.player, other, br)
    args.out.mkdir(parents=True, exist_ok=True)
    write_control_csv(out.control, args.out / f"u{args.player}.csv")
    write_control_csv(other, args.out / f"u{other_player}.csv")
    summary = _base_summary("best-response", cfg)
    summary.update(
        player=args.player, objective=out.objective, vi_residual=out.vi_residual,
        iters=out.iters, converged=out.converged,
    )
    write_json(summary, args.out / "summary.json")
    print(f"player {args.player}: J={out.objective!r} vi={out.vi_residual:.3e} iters={out.iters}")
    return EXIT_OK


def cmd_nash(args) -> int:
    cfg = _load(args)
    overrides = {"mode": args.mode, "relax": args.relax, "max_rounds": args.max_rounds, "nash_tol": args.tol}
    for key, val in overrides.items():
        if val is not None:
            cfg["nash"][key] = val.replace("-", "_") if key == "mode" else val
    spec, nash_opts, _ = build(cfg)
    result = solve_nash(spec, nash_opts)
    report = verify_bang_bang(spec, result)
    args.out.mkdir(parents=True, exist_ok=True)
    write_control_csv(result.u1, args.out / "u1.csv")
    write_control_csv(result.u2, args.out / "u2.csv")
    dump_config(cfg, args.out / "config.json")
    export_report(result, report, args.out, config=cfg, seed=cfg["seed"])
    status = "converged" if result.converged else "NOT converged"
    print(
        f"{status} after {result.rounds} rounds: vi1={result.vi1:.3e} vi2={result.vi2:.3e} "
        f"J1={result.J1:.6g} J2={result.J2:.6g} verdict={report.verdict}"
    )
    return EXIT_OK if result.converged else EXIT_NO_CONVERGENCE


def cmd_verify(args) -> int:
    cfg = _load(args)
    spec, _, _ = build(cfg)
    u1, u2 = _read_pair(spec, args.controls)
    cert = check_equilibrium(spec, u1, u2, args.tol, args.probes, cfg["seed"])
    vi1, vi2, J1, J2 = pair_residuals(spec, u1, u2)
    result = EquilibriumResult(u1, u2, vi1, vi2, J1, J2, 0, cert.passed, [], initialization="file")
    report = verify_bang_bang(spec, result)
    nondeg = adjoint_nondegeneracy(spec, result)
    out = args.out or args.controls / "verify"
    out.mkdir(parents=True, exist_ok=True)
    summary = _base_summary("verify", cfg)
    summary.update(
        tol=args.tol, probes=args.probes, vi1=cert.vi1, vi2=cert.vi2, J1=cert.J1, J2=cert.J2,
        first_order_pass=cert.first_order_pass, probe_pass=cert.probe_pass, passed=cert.passed,
        violations=[p._asdict() for p in cert.violations],
        bang_bang=report_scalars(report),
        dichotomy_observable=nondeg.dichotomy_observable,
    )
    write_json(summary, out / "summary.json")
    print(
        f"first-order {'pass' if cert.first_order_pass else 'FAIL'} (vi1={cert.vi1:.3e}, vi2={cert.vi2:.3e}); "
        f"probes {'pass' if cert.probe_pass else 'FAIL'} ({len(cert.violations)} violations); "
        f"verdict={report.verdict}"
    )
    return EXIT_OK if cert.passed else EXIT_NOT_CERTIFIED


def cmd_demo(args) -> int:
    cfg = demo_config(args.name)
    args.out.mkdir(parents=True, exist_ok=True)
    path = dump_config(cfg, args.out / "config.json")
    summary = _base_summary("demo", cfg)
    summary["name"] = args.name
    write_json(summary, args.out / "summary.json")
    print(path)
    return EXIT_OK


COMMANDS = {
    "forward": cmd_forward,
    "gradient-check": cmd_gradient_check,
    "best-response": cmd_best_response,
    "nash": cmd_nash,
    "verify": cmd_verify,
    "demo": cmd_demo,
}


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    logging.captureWarnings(True)
    try:
        return COMMANDS[args.command](args)
    except (ConfigurationError, StructuralError) as exc:
        print(f"heatnash: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


run_command = main

if __name__ == "__main__":
    sys.exit(main())

"""JSON run configuration: schema validation, presets and instance construction."""

from __future__ import annotations

import copy
import json
import math
from pathlib import Path

import numpy as np

from heatnash.best_response import BestResponseOptions
from heatnash.errors import ConfigurationError
from heatnash.game import GameSpec
from heatnash.grid import SpatialGrid, SubdomainMask, TimeGrid
from heatnash.nash import MODES, NashOptions

TOP_KEYS = {
    "domain_length", "n_interior", "horizon", "n_steps", "potential",
    "omega1", "omega2", "cap1", "cap2", "y0", "y1", "y2", "seed", "nash", "br",
}
REQUIRED = ("domain_length", "n_interior", "horizon", "n_steps", "omega1", "omega2", "cap1", "cap2")
NASH_KEYS = {"mode", "max_rounds", "relax", "nash_tol"}
BR_KEYS = {"max_iters", "vi_tol", "step_init", "backtrack_factor", "armijo_c"}
PRESETS = ("zero", "sin1", "neg_sin1", "gauss:c,w")

DEFAULT_1D = {
    "domain_length": 1.0,
    "n_interior": 49,
    "horizon": 0.5,
    "n_steps": 50,
    "potential": {"constant": 0.0},
    "omega1": [0.1, 0.4],
    "omega2": [0.6, 0.9],
    "cap1": 5.0,
    "cap2": 5.0,
    "y0": {"preset": "zero"},
    "y1": {"preset": "sin1"},
    "y2": {"preset": "neg_sin1"},
    "seed": 0,
    "nash": {"mode": "gauss_seidel", "max_rounds": 200, "relax": 1.0, "nash_tol": 1e-6},
    "br": {"max_iters": 500, "vi_tol": 1e-8, "step_init": 1.0, "backtrack_factor": 0.5, "armijo_c": 1e-4},
}
DEMOS = {"default-1d": DEFAULT_1D}


def demo_config(name: str) -> dict:
    try:
        return copy.deepcopy(DEMOS[name])
    except KeyError:
        raise ConfigurationError(f"unknown demo {name!r}; available: {sorted(DEMOS)}") from None


def preset_field(name: str, grid: SpatialGrid) -> np.ndarray:
    x, L = grid.nodes, grid.length
    if name == "zero":
        return np.zeros_like(x)
    if name == "sin1":
        return np.sin(np.pi * x / L)
    if name == "neg_sin1":
        return -np.sin(np.pi * x / L)
    if name.startswith("gauss:"):
        try:
            c, w = (float(p) for p in name[len("gauss:"):].split(","))
        except ValueError:
            raise ConfigurationError(f"preset {name!r} must look like gauss:c,w") from None
        if not w > 0:
            raise ConfigurationError(f"preset {name!r}: width must be > 0")
        return np.exp(-(((x - c) / w) ** 2))
    raise ConfigurationError(f"unknown preset {name!r}; expected one of {PRESETS}")


def _read_numbers(path: Path) -> np.ndarray:
    rows = []
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read data file {path}: {exc.strerror}") from exc
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([float(v) for v in line.replace(",", " ").split()])
        except ValueError:
            raise ConfigurationError(f"{path}: non-numeric entry in line {line!r}") from None
    if not rows or len({len(r) for r in rows}) != 1:
        raise ConfigurationError(f"{path}: expected a non-empty rectangular table of numbers")
    return np.array(rows, dtype=float)


def _is_real(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def validate(cfg: dict) -> list[str]:
    """Every schema problem in ``cfg``, one message per offending key."""
    errs = []
    if not isinstance(cfg, dict):
        return ["config: top level must be a JSON object"]
    for key in sorted(set(cfg) - TOP_KEYS):
        errs.append(f"{key}: unknown key")
    for key in REQUIRED:
        if key not in cfg:
            errs.append(f"{key}: required")
    for key in ("domain_length", "horizon"):
        if key in cfg and not (_is_real(cfg[key]) and cfg[key] > 0):
            errs.append(f"{key}: must be a real number > 0")
    if "n_interior" in cfg and not (_is_int(cfg["n_interior"]) and cfg["n_interior"] >= 3):
        errs.append("n_interior: must be an integer >= 3")
    if "n_steps" in cfg and not (_is_int(cfg["n_steps"]) and cfg["n_steps"] >= 1):
        errs.append("n_steps: must be an integer >= 1")
    for key in ("cap1", "cap2"):
        if key in cfg and not (_is_real(cfg[key]) and cfg[key] >= 0):
            errs.append(f"{key}: must be a real number >= 0")
    length = cfg.get("domain_length") if _is_real(cfg.get("domain_length")) else None
    for key in ("omega1", "omega2"):
        if key not in cfg:
            continue
        om = cfg[key]
        if not (isinstance(om, list) and len(om) == 2 and all(_is_real(v) for v in om)):
            errs.append(f"{key}: must be a [left, right] pair of reals")
        elif not (0 <= om[0] < om[1] and (length is None or om[1] <= length)):
            errs.append(f"{key}: must satisfy 0 <= left < right <= domain_length")
    om1, om2 = cfg.get("omega1"), cfg.get("omega2")
    if (
        isinstance(om1, list) and isinstance(om2, list) and len(om1) == len(om2) == 2
        and all(_is_real(v) for v in om1 + om2)
        and om1[0] < om2[1] and om2[0] < om1[1]
    ):
        errs.append(
            f"omega1 {tuple(om1)} and omega2 {tuple(om2)}: control regions must be disjoint"
        )
    if "potential" in cfg:
        pot = cfg["potential"]
        if not (isinstance(pot, dict) and len(pot) == 1 and set(pot) <= {"constant", "file"}):
            errs.append("potential: must be {\"constant\": real} or {\"file\": path}")
        elif "constant" in pot and not _is_real(pot["constant"]):
            errs.append("potential.constant: must be a real number")
        elif "file" in pot and not isinstance(pot["file"], str):
            errs.append("potential.file: must be a path string")
    for key in ("y0", "y1", "y2"):
        if key not in cfg:
            continue
        f = cfg[key]
        if not (isinstance(f, dict) and len(f) == 1 and set(f) <= {"preset", "file"}):
            errs.append(f"{key}: must be {{\"preset\": name}} or {{\"file\": path}}")
        elif not isinstance(next(iter(f.values())), str):
            errs.append(f"{key}: value must be a string")
    if "seed" in cfg and not (_is_int(cfg["seed"]) and cfg["seed"] >= 0):
        errs.append("seed: must be a nonnegative integer")
    for section, allowed in (("nash", NASH_KEYS), ("br", BR_KEYS)):
        sec = cfg.get(section, {})
        if not isinstance(sec, dict):
            errs.append(f"{section}: must be an object")
            continue
        for key in sorted(set(sec) - allowed):
            errs.append(f"{section}.{key}: unknown key")
    nash = cfg.get("nash", {}) if isinstance(cfg.get("nash"), dict) else {}
    if "mode" in nash and (not isinstance(nash["mode"], str) or nash["mode"].replace("-", "_") not in MODES):
        errs.append(f"nash.mode: must be one of {list(MODES)}")
    if "max_rounds" in nash and not (_is_int(nash["max_rounds"]) and nash["max_rounds"] >= 0):
        errs.append("nash.max_rounds: must be an integer >= 0")
    if "relax" in nash and not (_is_real(nash["relax"]) and 0 < nash["relax"] <= 1):
        errs.append("nash.relax: must lie in (0, 1]")
    if "nash_tol" in nash and not (_is_real(nash["nash_tol"]) and nash["nash_tol"] > 0):
        errs.append("nash.nash_tol: must be > 0")
    br = cfg.get("br", {}) if isinstance(cfg.get("br"), dict) else {}
    if "max_iters" in br and not (_is_int(br["max_iters"]) and br["max_iters"] >= 0):
        errs.append("br.max_iters: must be an integer >= 0")
    for key in ("vi_tol", "step_init"):
        if key in br and not (_is_real(br[key]) and br[key] > 0):
            errs.append(f"br.{key}: must be > 0")
    for key in ("backtrack_factor", "armijo_c"):
        if key in br and not (_is_real(br[key]) and 0 < br[key] < 1):
            errs.append(f"br.{key}: must lie in (0, 1)")
    return errs


def normalize(cfg: dict, base_dir: Path | str = ".") -> dict:
    """Validated copy of ``cfg`` with defaults filled and data-file paths made absolute."""
    errs = validate(cfg)
    if errs:
        raise ConfigurationError("invalid configuration:\n  " + "\n  ".join(errs))
    base_dir = Path(base_dir)
    out = copy.deepcopy(cfg)
    out.setdefault("potential", {"constant": 0.0})
    for key in ("y0", "y1", "y2"):
        out.setdefault(key, {"preset": "zero"})
    out.setdefault("seed", 0)
    out["nash"] = {**DEFAULT_1D["nash"], **cfg.get("nash", {})}
    out["nash"]["mode"] = out["nash"]["mode"].replace("-", "_")
    out["br"] = {**DEFAULT_1D["br"], **cfg.get("br", {})}
    for key in ("potential", "y0", "y1", "y2"):
        if "file" in out[key]:
            out[key] = {"file": str((base_dir / out[key]["file"]).resolve())}
    for key in ("domain_length", "horizon", "cap1", "cap2"):
        out[key] = float(out[key])
    if "constant" in out["potential"]:
        out["potential"] = {"constant": float(out["potential"]["constant"])}
    out["omega1"] = [float(v) for v in out["omega1"]]
    out["omega2"] = [float(v) for v in out["omega2"]]
    return out


def _field(entry: dict, grid: SpatialGrid, name: str) -> np.ndarray:
    if "preset" in entry:
        return preset_field(entry["preset"], grid)
    data = _read_numbers(Path(entry["file"])).ravel()
    if data.size != grid.n_interior:
        raise ConfigurationError(
            f"{name}: file {entry['file']} has {data.size} values, expected {grid.n_interior}"
        )
    return data


def build(cfg: dict) -> tuple[GameSpec, NashOptions, BestResponseOptions]:
    """Instance and solver options from a normalized config."""
    grid = SpatialGrid(cfg["domain_length"], cfg["n_interior"])
    time = TimeGrid(cfg["horizon"], cfg["n_steps"])
    pot = cfg["potential"]
    if "constant" in pot:
        potential = np.full((time.n_steps + 1, grid.n_interior), pot["constant"])
    else:
        potential = _read_numbers(Path(pot["file"]))
        if potential.shape != (time.n_steps + 1, grid.n_interior):
            raise ConfigurationError(
                f"potential: file {pot['file']} has shape {potential.shape}, "
                f"expected ({time.n_steps + 1}, {grid.n_interior})"
            )
    masks = []
    for key in ("omega1", "omega2"):
        try:
            masks.append(SubdomainMask(grid, *cfg[key]))
        except ConfigurationError as exc:
            raise ConfigurationError(f"{key}: {exc}") from None
    if masks[0].overlaps(masks[1]):
        raise ConfigurationError(
            f"omega1 {tuple(cfg['omega1'])} and omega2 {tuple(cfg['omega2'])} overlap; "
            "the two control regions must be disjoint"
        )
    spec = GameSpec(
        grid=grid, time=time, potential=potential,
        mask1=masks[0], mask2=masks[1], cap1=cfg["cap1"], cap2=cfg["cap2"],
        y0=_field(cfg["y0"], grid, "y0"),
        y1=_field(cfg["y1"], grid, "y1"),
        y2=_field(cfg["y2"], grid, "y2"),
    )
    br = BestResponseOptions(**cfg["br"])
    nash = NashOptions(br_opts=br, **cfg["nash"])
    return spec, nash, br


def load_config(path) -> dict:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON ({exc})") from exc
    return normalize(raw, path.parent)


def parse_config(path) -> tuple[GameSpec, NashOptions, BestResponseOptions]:
    return build(load_config(path))


def dump_config(cfg: dict, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(cfg, indent=2, sort_keys=True) + "\n")
    return path


__all__ = [
    "DEFAULT_1D", "build", "demo_config", "dump_config",
    "load_config", "normalize", "parse_config", "preset_field", "validate",
]

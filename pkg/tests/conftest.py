import numpy as np
import pytest

from heatnash.config import DEFAULT_1D, build, normalize
from heatnash.controls import Control, project_admissible
from heatnash.game import GameSpec
from heatnash.grid import SpatialGrid, SubdomainMask, TimeGrid


def make_spec(
    n=49, length=1.0, horizon=0.5, n_steps=50, a=0.0,
    w1=(0.11, 0.39), w2=(0.61, 0.89), cap1=1.0, cap2=1.0,
    y0=None, y1=None, y2=None,
):
    grid = SpatialGrid(length, n)
    x = grid.nodes
    s = np.sin(np.pi * x / length)
    return GameSpec(
        grid=grid,
        time=TimeGrid(horizon, n_steps),
        potential=a,
        mask1=SubdomainMask(grid, *w1),
        mask2=SubdomainMask(grid, *w2),
        cap1=cap1,
        cap2=cap2,
        y0=np.zeros(n) if y0 is None else y0,
        y1=s if y1 is None else y1,
        y2=-s if y2 is None else y2,
    )


def random_control(spec, player, rng, radius=1.0, scale=None):
    """Admissible control with slice norms uniform in [0, radius*cap]."""
    mask = spec.mask(player)
    vals = rng.standard_normal((spec.n_steps, spec.grid.n_interior)) * mask.indicator
    u = Control.for_player(spec, player, vals)
    norms = u.norms()
    cap = spec.cap(player) if scale is None else scale
    target = radius * cap * rng.uniform(0.0, 1.0, spec.n_steps)
    u = u.with_values(vals * (target / norms)[:, None])
    return project_admissible(u) if scale is None else u


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line for an acceptance criterion and return ``ok``."""

    def record(number, title, ok, detail):
        line = f"[acceptance {number}] {'PASS' if ok else 'FAIL'} {title}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip("]"))):
            terminalreporter.write_line(line)


@pytest.fixture
def default_spec():
    return build(normalize(DEFAULT_1D))[0]


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from heatnash.controls import (
    Control,
    bang_bang_from_adjoint,
    project_admissible,
    read_control_csv,
    saturation_profile,
    vi_residual,
    write_control_csv,
)
from heatnash.errors import ConfigurationError, ContractViolation, StructuralError
from heatnash.grid import SpatialGrid, SubdomainMask, TimeGrid, slice_norms

from conftest import make_spec, random_control

# h = 0.5, nodes 0.5, 1.0, 1.5; the mask keeps the first two
GRID = SpatialGrid(2.0, 3)
MASK = SubdomainMask(GRID, 0.0, 1.2)
ONE_STEP = TimeGrid(1.0, 1)


def ctrl(values, cap, time=ONE_STEP):
    return Control(np.atleast_2d(np.asarray(values, dtype=float)), MASK, cap, time)


def test_projection_keeps_interior_point():
    u = ctrl([0.5 / np.sqrt(0.5) / np.sqrt(2), 0.5 / np.sqrt(0.5) / np.sqrt(2), 0.0], 1.0)
    assert u.norms()[0] == pytest.approx(0.5)
    assert np.array_equal(project_admissible(u).values, u.values)


def test_projection_normalizes():
    u = ctrl([3.0, 4.0, 0.0], 1.0)
    assert u.norms()[0] == pytest.approx(3.5355339059, abs=1e-9)
    p = project_admissible(u)
    assert p.values[0, :2] == pytest.approx([0.84853, 1.13137], abs=1e-5)
    assert p.norms()[0] == pytest.approx(1.0, abs=1e-15)


def test_zero_cap_projection():
    p = project_admissible(ctrl([3.0, 4.0, 0.0], 0.0))
    assert np.all(p.values == 0.0)


def test_negative_cap_rejected():
    with pytest.raises(ConfigurationError):
        ctrl([0.0, 0.0, 0.0], -1.0)


def test_support_enforced():
    with pytest.raises(StructuralError, match="vanish"):
        ctrl([0.0, 0.0, 1.0], 1.0)


def test_bang_bang_arithmetic():
    phi = np.array([[0.0, 0.0, 0.0], [3.0, 4.0, 7.0]])
    bb = bang_bang_from_adjoint(phi, MASK, 2.0, ONE_STEP)
    assert bb.control.values[0] == pytest.approx([1.69706, 2.26274, 0.0], abs=1e-5)
    assert bb.control.norms()[0] == pytest.approx(2.0, abs=1e-14)
    assert bb.degenerate.size == 0


def test_bang_bang_zero_adjoint():
    spec = make_spec()
    phi = np.zeros((spec.n_steps + 1, 49))
    bb = bang_bang_from_adjoint(phi, spec.mask1, 1.0, spec.time)
    assert np.all(bb.control.values == 0.0)
    assert list(bb.degenerate) == list(range(spec.n_steps))


def test_bang_bang_pairs_slice_k_with_next_adjoint():
    time = TimeGrid(1.0, 2)
    phi = np.array([[9.0, 9.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    u = bang_bang_from_adjoint(phi, MASK, 1.0, time).control
    assert u.values[0, 1] == 0.0 and u.values[0, 0] > 0
    assert u.values[1, 0] == 0.0 and u.values[1, 1] > 0


def test_vi_residual_cases(rng):
    spec = make_spec(a=0.5)
    phi = rng.standard_normal((spec.n_steps + 1, 49))
    bb = bang_bang_from_adjoint(phi, spec.mask1, spec.cap1, spec.time).control
    assert vi_residual(bb, phi) <= 1e-14
    zero = Control.zeros(spec, 1)
    mphi_norms = slice_norms(spec.grid, phi[1:] * spec.mask1.indicator)
    assert vi_residual(zero, phi) == pytest.approx(spec.dt * spec.cap1 * mphi_norms.sum(), rel=1e-14)
    u = random_control(spec, 1, rng)
    assert vi_residual(u, np.zeros_like(phi)) == 0.0


def test_vi_residual_rejects_inadmissible(rng):
    spec = make_spec()
    u = random_control(spec, 1, rng, scale=1.0)
    big = u.with_values(u.values * 10.0 / u.norms().min())
    with pytest.raises(ContractViolation):
        vi_residual(big, np.ones((spec.n_steps + 1, 49)))


def test_saturation_profile_cases(rng):
    spec = make_spec()
    phi = rng.standard_normal((spec.n_steps + 1, 49))
    bb = bang_bang_from_adjoint(phi, spec.mask1, spec.cap1, spec.time).control
    prof = saturation_profile(bb)
    assert prof.fraction == 1.0
    assert np.array_equal(prof.times, spec.time.nodes[:-1])
    assert saturation_profile(Control.zeros(spec, 1)).fraction == 0.0
    zcap = make_spec(cap1=0.0)
    assert saturation_profile(Control.zeros(zcap, 1)).fraction == 1.0


def test_csv_round_trip_is_bit_exact(tmp_path, rng):
    spec = make_spec()
    u = random_control(spec, 2, rng)
    path = write_control_csv(u, tmp_path / "u2.csv")
    assert path.read_text().splitlines()[0] == "k,t,node_index,value"
    back = read_control_csv(path, spec, 2)
    assert np.array_equal(back.values, u.values)
    with pytest.raises(StructuralError):
        read_control_csv(path, spec, 1)


# -- properties -------------------------------------------------------------

N_STEPS = 4
TIME4 = TimeGrid(1.0, N_STEPS)
finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
slices = arrays(np.float64, (N_STEPS, 2), elements=finite)
caps = st.one_of(st.just(0.0), st.floats(1e-6, 50.0))


def embed(v):
    return np.hstack([v, np.zeros((N_STEPS, 1))])


@settings(max_examples=200, deadline=None)
@given(slices, caps)
def test_projection_idempotent_and_admissible(v, cap):
    p = project_admissible(Control(embed(v), MASK, cap, TIME4))
    assert p.is_admissible()
    pp = project_admissible(p)
    assert np.allclose(pp.values, p.values, rtol=1e-14, atol=1e-300)


@settings(max_examples=200, deadline=None)
@given(slices, slices, caps)
def test_projection_nonexpansive(a, b, cap):
    pa = project_admissible(Control(embed(a), MASK, cap, TIME4))
    pb = project_admissible(Control(embed(b), MASK, cap, TIME4))
    lhs = slice_norms(GRID, pa.values - pb.values)
    rhs = slice_norms(GRID, embed(a) - embed(b))
    assert np.all(lhs <= rhs * (1 + 1e-12) + 1e-12)


adjoints = arrays(np.float64, (N_STEPS + 1, 3), elements=finite)


@settings(max_examples=200, deadline=None)
@given(adjoints, slices, caps)
def test_vi_residual_nonnegative(phi, v, cap):
    u = project_admissible(Control(embed(v), MASK, cap, TIME4))
    assert vi_residual(u, phi) >= 0.0
    bb = bang_bang_from_adjoint(phi, MASK, cap, TIME4)
    assert bb.control.is_admissible()
    assert np.all(bb.control.values[:, ~MASK.node_flags] == 0.0)
    scale = max(cap, 1.0) * max(np.abs(phi).max(), 1.0)
    assert vi_residual(bb.control, phi) <= 1e-12 * scale


@settings(max_examples=200, deadline=None)
@given(adjoints, caps, st.floats(1e-3, 1e3))
def test_bang_bang_scaling_covariance(phi, cap, c):
    a = bang_bang_from_adjoint(phi, MASK, cap, TIME4)
    b = bang_bang_from_adjoint(c * phi, MASK, cap, TIME4)
    good = np.setdiff1d(np.arange(N_STEPS), np.union1d(a.degenerate, b.degenerate))
    assert np.allclose(a.control.values[good], b.control.values[good], rtol=1e-12, atol=1e-12 * max(cap, 1))
    norms = a.control.norms()
    ok = np.isclose(norms, cap, rtol=1e-12, atol=0) | (norms == 0.0)
    assert np.all(ok)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from givp.errors import ConfigurationError, ContractViolation
from givp.integrate import IntegratorConfig
from givp.special_fn import bessel_j
from givp.unicycle import (
    TWO_PI,
    BesselControllerParams,
    ThetaRemapParams,
    bessel_controller,
    beta,
    simulate_unicycle,
    theta_ic_map,
    unicycle_field,
)

# quadrature of the closed-form heading, scripts/oracle_values.py
REMAPPED_XY_AT_10 = (-25993.41557682098, 21228.65692980084)

params_strategy = st.builds(
    BesselControllerParams,
    N=st.just(3),
    a=st.floats(-10, -1e-3),
    C=st.lists(st.floats(-100, 100), min_size=3, max_size=3),
)


def test_field_examples():
    assert unicycle_field([0, 0, 0.0], [1, 0]).tolist() == [1.0, 0.0, 0.0]
    out = unicycle_field([0, 0, math.pi / 2], [2, 0])
    assert np.allclose(out, [0, 2, 0], atol=1e-15, rtol=0)
    for theta in (-3.0, 0.2, 5.0):
        assert unicycle_field([1, 1, theta], [0, 1]).tolist() == [0.0, 0.0, 1.0]


def test_field_dimension_checks():
    with pytest.raises(ContractViolation):
        unicycle_field([0, 0], [1, 0])
    with pytest.raises(ContractViolation):
        unicycle_field([0, 0, 0], [1, 0, 0])


def test_controller_vanishes_at_zero_heading():
    u = bessel_controller(0.0, BesselControllerParams())
    assert u.tolist() == [0.0, 0.0]


def test_controller_single_term():
    p = BesselControllerParams(N=1, a=-1.0, C=[1.0])
    u1, u2 = bessel_controller(1.0, p)
    assert u1 == pytest.approx(-3 * 0.4400505857449335, abs=1e-14)
    assert u2 == -1.0


def test_controller_zero_coefficients():
    u = bessel_controller(TWO_PI, BesselControllerParams(N=2, a=-1.0, C=[0.0, 0.0]))
    assert u.tolist() == [0.0, -TWO_PI]


@pytest.mark.parametrize("theta", [-2.5, -0.3, 0.7, 4.0, TWO_PI, 12.0])
def test_controller_matches_term_by_term_sum(theta):
    p = BesselControllerParams(N=4, a=-0.7, C=[1.0, -2.0, 0.5, 3.0])
    expected = sum((2 * i + 1) * p.a * p.C[i - 1] * bessel_j(i, theta) * theta ** (i + 1) for i in range(1, 5))
    assert bessel_controller(theta, p)[0] == pytest.approx(expected, rel=1e-13, abs=1e-15)


@given(p=params_strategy)
def test_origin_is_equilibrium_for_any_params(p):
    u = bessel_controller(0.0, p)
    assert u.tolist() == [0.0, 0.0]
    assert np.all(unicycle_field([1.0, -1.0, 0.0], u) == 0.0)


def test_controller_is_smooth_at_zero():
    p = BesselControllerParams()
    diffs = [(bessel_controller(h, p)[0] - bessel_controller(-h, p)[0]) / (2 * h) for h in (1e-2, 1e-3, 1e-4)]
    assert all(math.isfinite(d) for d in diffs)
    # u1 ~ 1.5 a theta^3 near 0, so the centred difference shrinks like h^2
    assert abs(diffs[0]) < 1e-3 and abs(diffs[1]) < abs(diffs[0]) and abs(diffs[2]) < abs(diffs[1])


@pytest.mark.parametrize("kwargs", [dict(a=0.0), dict(a=1.0), dict(N=0), dict(N=2, C=[1.0]),
                                    dict(C=[1.0, 2.0, 3.0, 4.0, math.nan]), dict(N=65)])
def test_controller_params_validation(kwargs):
    with pytest.raises(ConfigurationError):
        BesselControllerParams(**kwargs)


def test_remap_params_validation():
    with pytest.raises(ConfigurationError):
        ThetaRemapParams(zero_tol=0.0)


def test_beta():
    assert beta(0.0) == 1
    assert beta(1.0) == 0
    assert beta(-3.7) == 0
    assert beta(5e-13) == 1
    assert beta(-0.0) == 1


def test_theta_ic_map_examples():
    assert theta_ic_map([3, 4, 0.0]).tolist() == [3.0, 4.0, TWO_PI]
    assert theta_ic_map([3, 4, 0.5]).tolist() == [3.0, 4.0, 0.5]
    once = theta_ic_map([0, 0, 0.0])
    assert theta_ic_map(once).tolist() == [0.0, 0.0, TWO_PI]


@given(theta=st.floats(-1e-11, 1e-11), tol=st.floats(1e-14, 1e-3))
def test_theta_ic_map_range(theta, tol):
    out = theta_ic_map([0.0, 0.0, theta], ThetaRemapParams(zero_tol=tol))
    assert not -tol < out[2] < tol


def test_unmapped_zero_heading_is_stationary():
    traj = simulate_unicycle([3.0, 4.0, 0.0], integ=IntegratorConfig(t_end=10.0))
    assert np.all(traj.states == np.array([3.0, 4.0, 0.0]))
    assert np.all(traj.inputs == 0.0)


@pytest.fixture(scope="module")
def remapped_run():
    return simulate_unicycle([3.0, 4.0, 0.0], remap=ThetaRemapParams(), integ=IntegratorConfig(t_end=10.0))


def test_remapped_run_heading(remapped_run):
    assert remapped_run.states[0, 2] == TWO_PI
    assert abs(remapped_run.final_state[2] - TWO_PI * math.exp(-10)) <= 1e-8


def test_remapped_run_moves(remapped_run):
    x, y = remapped_run.final_state[:2]
    assert math.hypot(x - 3.0, y - 4.0) > 1e-3
    assert x == pytest.approx(REMAPPED_XY_AT_10[0], rel=1e-9)
    assert y == pytest.approx(REMAPPED_XY_AT_10[1], rel=1e-9)


def test_nonzero_heading_follows_exponential():
    traj = simulate_unicycle([0.0, 0.0, 1.0], remap=ThetaRemapParams(), integ=IntegratorConfig(t_end=5.0))
    assert np.max(np.abs(traj.states[:, 2] - np.exp(-traj.times))) <= 1e-8


@settings(max_examples=8)
@given(
    x0=st.tuples(st.floats(-5, 5), st.floats(-5, 5), st.floats(-7, 7)),
    a=st.floats(-2.0, -0.2),
)
def test_heading_decouples(x0, a):
    p = BesselControllerParams(N=3, a=a, C=[0.3, -0.2, 0.1])
    traj = simulate_unicycle(x0, p, ThetaRemapParams(), IntegratorConfig(t_end=2.0, h=1e-3))
    theta0 = traj.states[0, 2]
    assert np.max(np.abs(traj.states[:, 2] - theta0 * np.exp(a * traj.times))) <= 1e-8
    assert traj.metadata["control_params"]["a"] == a

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from givp.core import (
    ControlLaw,
    InitialConditionMap,
    SystemModel,
    Trajectory,
    apply_ic_map,
    as_state,
    identity_map,
    make_givp,
)
from givp.errors import ConfigurationError, ContractViolation
from givp.integrate import IntegratorConfig, integrate
from givp.unicycle import (
    ThetaRemapParams,
    bessel_control_law,
    theta_remap,
    unicycle_system,
)

finite = st.floats(allow_nan=False, allow_infinity=False, min_value=-1e6, max_value=1e6)
states3 = st.tuples(finite, finite, st.one_of(finite, st.just(0.0), st.just(-0.0),
                                              st.floats(min_value=-1e-11, max_value=1e-11)))

MAPS = [identity_map(3), theta_remap(ThetaRemapParams())]


def test_as_state_rejects_nan_and_wrong_length():
    with pytest.raises(ContractViolation):
        as_state([1.0, math.nan, 0.0])
    with pytest.raises(ContractViolation):
        as_state([1.0, 2.0], 3)
    with pytest.raises(ContractViolation):
        as_state([])


def test_identity_map_passes_through():
    out = apply_ic_map(identity_map(3), [1.0, -2.0, 0.5])
    assert out.tolist() == [1.0, -2.0, 0.5]


@pytest.mark.parametrize(
    "x0, expected",
    [((3.0, 4.0, 0.0), (3.0, 4.0, 2 * math.pi)), ((3.0, 4.0, 1.5), (3.0, 4.0, 1.5))],
)
def test_theta_remap_cases(x0, expected):
    assert apply_ic_map(theta_remap(ThetaRemapParams()), x0).tolist() == list(expected)


def test_apply_ic_map_contract():
    with pytest.raises(ContractViolation):
        apply_ic_map(identity_map(3), [1.0, 2.0])
    with pytest.raises(ContractViolation):
        apply_ic_map(identity_map(3), [1.0, 2.0, math.inf])
    bad = InitialConditionMap(lambda x: np.append(x, 1.0), "grows")
    with pytest.raises(ContractViolation):
        apply_ic_map(bad, [1.0])
    nan_map = InitialConditionMap(lambda x: x * math.nan, "nan")
    with pytest.raises(ContractViolation):
        apply_ic_map(nan_map, [1.0])


@pytest.mark.parametrize("ic_map", MAPS, ids=lambda m: m.description)
@given(x0=states3)
def test_maps_are_idempotent(ic_map, x0):
    once = apply_ic_map(ic_map, x0)
    twice = apply_ic_map(ic_map, once)
    assert once.tobytes() == twice.tobytes()


@given(x0=states3)
def test_theta_remap_never_returns_zero_heading(x0):
    assert apply_ic_map(MAPS[1], x0)[2] != 0.0


def test_make_givp_unicycle_bessel_remap():
    p = make_givp(unicycle_system(), bessel_control_law(), theta_remap())
    assert p.dimension == 3
    assert p.field(np.array([0.0, 0.0, 1.0])).shape == (3,)
    assert p.initial_state([0.0, 0.0, 0.0])[2] == 2 * math.pi


def test_make_givp_zero_controller_gives_zero_field():
    p = make_givp(unicycle_system(), ControlLaw.zero(2), identity_map(3))
    for x in ([0.0, 0.0, 0.0], [1.0, -2.0, 3.0]):
        assert p.field(np.array(x)).tolist() == [0.0, 0.0, 0.0]


def test_make_givp_scalar_system():
    sys1 = SystemModel(1, 0, lambda x, u: -2.0 * x, label="scalar")
    p = make_givp(sys1)
    assert p.dimension == 1
    assert p.field(np.array([1.5])).tolist() == [-3.0]


def test_make_givp_dimension_mismatch_names_component():
    with pytest.raises(ConfigurationError, match="bessel"):
        make_givp(unicycle_system(), ControlLaw(1, lambda x: [0.0], label="bessel"))
    with pytest.raises(ConfigurationError, match="theta_remap"):
        sys1 = SystemModel(1, 0, lambda x, u: x)
        make_givp(sys1, None, theta_remap())


def test_identity_map_reproduces_classical_ivp():
    sys1 = SystemModel(2, 0, lambda x, u: np.array([-x[1], x[0]]))
    classical = make_givp(sys1)
    mapped = make_givp(sys1, None, InitialConditionMap(lambda x: x, "identity-explicit"))
    cfg = IntegratorConfig(h=1e-2, t_end=1.0)
    a = integrate(classical, [1.0, 0.0], cfg)
    b = integrate(mapped, [1.0, 0.0], cfg)
    assert a.states.tobytes() == b.states.tobytes()
    assert a.times.tobytes() == b.times.tobytes()


def test_trajectory_rejects_bad_times():
    with pytest.raises(ContractViolation):
        Trajectory(np.array([0.0, 0.0]), np.zeros((2, 1)), np.zeros((2, 0)), {})
    with pytest.raises(ContractViolation):
        Trajectory(np.array([0.1]), np.zeros((1, 1)), np.zeros((1, 0)), {})

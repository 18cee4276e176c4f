import math
import zlib

import numpy as np
import pytest

from givp.core import SystemModel, make_givp
from givp.errors import ConfigurationError, DivergenceError, StepUnderflowError
from givp.integrate import IntegratorConfig, integrate, step_dopri5, step_rk4

# 1 - h + h^2/2 - h^3/6 + h^4/24 at h = 1/10, exactly 72387/80000
RK4_LINEAR_STEP = 0.9048375


def scalar_problem(a=-1.0):
    return make_givp(SystemModel(1, 0, lambda x, u: a * x, label="linear"))


def test_rk4_zero_field_is_identity():
    out = step_rk4(lambda x: np.zeros(3), np.array([1.0, 2.0, 3.0]), 0.1)
    assert out.tolist() == [1.0, 2.0, 3.0]


def test_rk4_linear_step_is_taylor_polynomial():
    out = step_rk4(lambda x: -x, np.array([1.0]), 0.1)
    assert out[0] == pytest.approx(RK4_LINEAR_STEP, abs=1e-15)


@pytest.mark.parametrize("h", [0.1, 0.05, 0.025])
def test_rk4_rotation_local_error_is_fifth_order(h):
    out = step_rk4(lambda x: np.array([-x[1], x[0]]), np.array([1.0, 0.0]), h)
    exact = np.array([math.cos(h), math.sin(h)])
    # leading local error term of RK4 on a rotation is h^5 / 120
    assert np.linalg.norm(out - exact) <= 1.01 * h**5 / 120
    assert abs(out @ out - 1.0) <= h**5


def test_rk4_rejects_nonfinite_derivative():
    with pytest.raises(DivergenceError):
        step_rk4(lambda x: x * math.inf, np.array([1.0]), 0.1)


def test_scalar_exponential_matches_closed_form():
    traj = integrate(scalar_problem(), [2 * math.pi], IntegratorConfig(t_end=10.0, h=1e-3))
    assert abs(traj.final_state[0] - 2 * math.pi * math.exp(-10)) <= 1e-8
    assert traj.final_time == 10.0


def test_order_of_convergence():
    errs = []
    for h in (1e-2, 5e-3, 2.5e-3):
        traj = integrate(scalar_problem(), [1.0], IntegratorConfig(t_end=1.0, h=h))
        errs.append(abs(traj.final_state[0] - math.exp(-1.0)))
    for coarse, fine in zip(errs, errs[1:]):
        assert 13 <= coarse / fine <= 19


def test_fixed_step_times_are_multiples_of_h():
    traj = integrate(scalar_problem(), [1.0], IntegratorConfig(t_end=1.0, h=1e-3))
    k = np.arange(len(traj))
    assert np.array_equal(traj.times[:-1], k[:-1] * 1e-3)
    assert traj.times[-1] == 1.0


def test_record_every_thins_samples_and_keeps_end():
    traj = integrate(scalar_problem(), [1.0], IntegratorConfig(t_end=1.0, h=0.01, record_every=30))
    assert traj.times.tolist()[:3] == [0.0, 0.3, 0.6]
    assert traj.final_time == 1.0


def test_non_integer_step_count_ends_at_t_end():
    traj = integrate(scalar_problem(), [1.0], IntegratorConfig(t_end=0.25, h=0.1))
    assert traj.times.tolist() == [0.0, 0.1, 0.2, 0.25]


def test_fixed_step_is_deterministic():
    cfg = IntegratorConfig(t_end=2.0, h=1e-2)
    p = make_givp(SystemModel(2, 0, lambda x, u: np.array([math.sin(x[1]), -x[0] ** 3])))
    a = integrate(p, [0.3, -1.2], cfg)
    b = integrate(p, [0.3, -1.2], cfg)
    assert a.states.tobytes() == b.states.tobytes()


def test_first_sample_is_mapped_initial_condition():
    from givp.core import InitialConditionMap

    p = make_givp(SystemModel(1, 0, lambda x, u: -x), None,
                  InitialConditionMap(lambda x: np.abs(x), "abs"))
    traj = integrate(p, [-0.7], IntegratorConfig(t_end=0.1, h=0.01))
    assert traj.states[0].tolist() == [0.7]
    assert traj.metadata["x0_raw"] == [-0.7]
    assert traj.metadata["x0_mapped"] == [0.7]


def test_zero_field_constant_trajectory():
    p = make_givp(SystemModel(3, 0, lambda x, u: np.zeros(3)))
    for cfg in (IntegratorConfig(t_end=1.0, h=0.1), IntegratorConfig(method="rk45_adaptive", t_end=1.0)):
        traj = integrate(p, [1.0, -2.0, 3.0], cfg)
        assert np.all(traj.states == np.array([1.0, -2.0, 3.0]))


def test_adaptive_meets_tolerance():
    cfg = IntegratorConfig(method="rk45_adaptive", t_end=10.0, rel_tol=1e-10, abs_tol=1e-13)
    traj = integrate(scalar_problem(), [2 * math.pi], cfg)
    expected = 2 * math.pi * np.exp(-traj.times)
    assert np.max(np.abs(traj.states[:, 0] - expected)) <= 1e-8
    assert len(traj) < 2000


def test_dopri5_is_fifth_order():
    errs = []
    for h in (0.2, 0.1):
        x, _, _ = step_dopri5(lambda x: -x, np.array([1.0]), h)
        errs.append(abs(x[0] - math.exp(-h)))
    assert 40 <= errs[0] / errs[1] <= 80  # local error O(h^6)


def test_divergence_error_carries_partial_trajectory():
    p = make_givp(SystemModel(1, 0, lambda x, u: x * x))
    with pytest.raises(DivergenceError) as info:
        integrate(p, [1.0], IntegratorConfig(t_end=2.0, h=1e-3))
    exc = info.value
    assert exc.trajectory.status == "diverged"
    assert np.all(np.isfinite(exc.state))
    assert exc.time < 1.0 + 1e-2  # blow-up of 1/(1-t)


def test_step_underflow():
    # a field that flips sign with every bit of the state has no smooth
    # solution; the error estimate stays O(h) and the step collapses
    def rough(x, u):
        return np.array([1e3 if zlib.crc32(x.tobytes()) % 2 else -1e3])

    p = make_givp(SystemModel(1, 0, rough))
    cfg = IntegratorConfig(method="rk45_adaptive", t_end=1.0, rel_tol=1e-12, abs_tol=1e-15)
    with pytest.raises(StepUnderflowError) as info:
        integrate(p, [0.5], cfg)
    assert info.value.time < 1e-6


@pytest.mark.parametrize(
    "kwargs",
    [dict(h=0.0), dict(h=-1.0), dict(t_end=0.0), dict(rel_tol=1.0), dict(abs_tol=0.0),
     dict(method="euler"), dict(record_every=0), dict(h=math.nan)],
)
def test_config_validation(kwargs):
    with pytest.raises(ConfigurationError):
        IntegratorConfig(**kwargs)

"""Unicycle kinematics, Bessel-series feedback and the heading remap.

State is ``(x, y, theta)`` in metres and radians; input is ``(u1, u2)``, the
forward speed and the turn rate. The feedback

    u1 = sum_{i=1..N} (2i + 1) * a * C_i * J_i(theta) * theta**(i + 1)
    u2 = a * theta,  a < 0

is smooth in theta, and it vanishes on the whole plane ``theta = 0``. Starting
there the robot never moves, which is why the heading remap sends an initial
``theta0 = 0`` to ``2*pi`` before integration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (
    ControlLaw,
    InitialConditionMap,
    SystemModel,
    Trajectory,
    as_input,
    as_state,
    identity_map,
    make_givp,
)
from .errors import ConfigurationError
from .integrate import IntegratorConfig, integrate
from .special_fn import MAX_ORDER, bessel_j_orders

__all__ = [
    "TWO_PI",
    "BesselControllerParams",
    "ThetaRemapParams",
    "unicycle_field",
    "unicycle_system",
    "bessel_controller",
    "bessel_control_law",
    "beta",
    "theta_ic_map",
    "theta_remap",
    "closed_loop_problem",
    "simulate_unicycle",
]

TWO_PI = 2.0 * math.pi


def _finite(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigurationError(f"{name} must be a finite real, got {value!r}")


@dataclass(frozen=True)
class BesselControllerParams:
    """Series length ``N``, gain ``a < 0`` and coefficients ``C_1..C_N``.

    ``C`` defaults to all ones.
    """

    N: int = 5
    a: float = -1.0
    C: Optional[tuple] = None
    max_order: int = MAX_ORDER

    def __post_init__(self):
        if isinstance(self.N, bool) or int(self.N) != self.N or self.N < 1:
            raise ConfigurationError(f"N must be a positive integer, got {self.N!r}")
        if self.N > self.max_order:
            raise ConfigurationError(f"N={self.N} exceeds the order ceiling {self.max_order}")
        _finite(self.a, "gain a")
        if not self.a < 0:
            raise ConfigurationError(f"gain a must be negative, got {self.a}")
        coeffs = (1.0,) * int(self.N) if self.C is None else tuple(float(c) for c in self.C)
        if len(coeffs) != self.N:
            raise ConfigurationError(f"expected {self.N} coefficients C, got {len(coeffs)}")
        for i, c in enumerate(coeffs, start=1):
            _finite(c, f"C_{i}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "C", coeffs)

    def as_dict(self) -> dict:
        return {"N": self.N, "a": self.a, "C": list(self.C)}


@dataclass(frozen=True)
class ThetaRemapParams:
    zero_tol: float = 1e-12
    wrap_value: float = field(default=TWO_PI, init=False)

    def __post_init__(self):
        _finite(self.zero_tol, "zero_tol")
        if not self.zero_tol > 0:
            raise ConfigurationError(f"zero_tol must be positive, got {self.zero_tol}")

    def as_dict(self) -> dict:
        return {"zero_tol": self.zero_tol, "wrap_value": self.wrap_value}


def unicycle_field(state, u) -> np.ndarray:
    """``(cos(theta) * u1, sin(theta) * u1, u2)``."""
    state = as_state(state, 3)
    u = as_input(u, 2)
    theta = state[2]
    return np.array([math.cos(theta) * u[0], math.sin(theta) * u[0], u[1]])


def _field_unchecked(state, u):
    theta = state[2]
    return np.array([math.cos(theta) * u[0], math.sin(theta) * u[0], u[1]])


def unicycle_system() -> SystemModel:
    return SystemModel(3, 2, _field_unchecked, label="unicycle")


def _controller(theta: float, params: BesselControllerParams) -> np.ndarray:
    a = params.a
    if theta == 0.0:
        # every term carries theta**(i+1); skip the Bessel evaluation
        return np.array([0.0, a * theta])
    j = bessel_j_orders(params.N, theta)
    u1 = 0.0
    power = theta
    for i, c in enumerate(params.C, start=1):
        power *= theta
        u1 += (2 * i + 1) * a * c * j[i] * power
    return np.array([u1, a * theta])


def bessel_controller(theta: float, params: BesselControllerParams = BesselControllerParams()) -> np.ndarray:
    """Control input ``(u1, u2)`` at heading ``theta``."""
    _finite(theta, "theta")
    return _controller(float(theta), params)


def bessel_control_law(params: BesselControllerParams = BesselControllerParams()) -> ControlLaw:
    return ControlLaw(2, lambda x: _controller(x[2], params), label="bessel", params=params.as_dict())


def beta(theta0: float, zero_tol: float = 1e-12) -> int:
    """Indicator of a zero initial heading: 1 if ``|theta0| < zero_tol`` else 0."""
    return 1 if abs(theta0) < zero_tol else 0


def theta_ic_map(state, params: ThetaRemapParams = ThetaRemapParams()) -> np.ndarray:
    """Shift a zero heading to ``2*pi``; ``(x, y)`` and nonzero headings pass through."""
    state = as_state(state, 3)
    out = state.copy()
    out[2] = state[2] + params.wrap_value * beta(state[2], params.zero_tol)
    out.flags.writeable = False
    return out


def theta_remap(params: ThetaRemapParams = ThetaRemapParams()) -> InitialConditionMap:
    return InitialConditionMap(
        lambda x: theta_ic_map(x, params), "theta_remap", dimension=3, params=params.as_dict()
    )


def closed_loop_problem(
    ctrl: BesselControllerParams = BesselControllerParams(),
    remap: Optional[ThetaRemapParams] = None,
):
    ic_map = identity_map(3) if remap is None else theta_remap(remap)
    return make_givp(unicycle_system(), bessel_control_law(ctrl), ic_map)


def simulate_unicycle(
    x0,
    ctrl: BesselControllerParams = BesselControllerParams(),
    remap: Optional[ThetaRemapParams] = None,
    integ: IntegratorConfig = IntegratorConfig(),
) -> Trajectory:
    """Integrate the closed loop from ``x0``; ``remap=None`` means the identity map."""
    return integrate(closed_loop_problem(ctrl, remap), x0, integ)

"""Explicit Runge-Kutta time stepping for autonomous closed-loop fields.

Two schemes: classical RK4 with a fixed step (the default, reproducible to
the bit) and Dormand-Prince 5(4) with step-size control.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional

import numpy as np

from .core import ClosedLoopProblem, Trajectory, as_state
from .errors import ConfigurationError, DivergenceError, StepUnderflowError

__all__ = [
    "METHODS",
    "DIVERGENCE_NORM",
    "IntegratorConfig",
    "step_rk4",
    "step_dopri5",
    "integrate",
]

METHODS = ("rk4_fixed", "rk45_adaptive")
DIVERGENCE_NORM = 1e12

Field = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk4_fixed"
    h: float = 1e-3
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    t_end: float = 10.0
    record_every: int = 1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigurationError(f"unknown integrator method {self.method!r}; choose from {METHODS}")
        for name in ("h", "rel_tol", "abs_tol", "t_end"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ConfigurationError(f"integrator {name} must be a finite number, got {value!r}")
        if self.h <= 0:
            raise ConfigurationError(f"step h must be positive, got {self.h}")
        if not 0 < self.rel_tol < 1 or not 0 < self.abs_tol < 1:
            raise ConfigurationError("tolerances must lie strictly between 0 and 1")
        if self.t_end <= 0:
            raise ConfigurationError(f"t_end must be positive, got {self.t_end}")
        if isinstance(self.record_every, bool) or int(self.record_every) != self.record_every or self.record_every < 1:
            raise ConfigurationError(f"record_every must be a positive integer, got {self.record_every!r}")

    def describe(self) -> dict:
        d = asdict(self)
        if self.method == "rk4_fixed":
            d.pop("rel_tol")
            d.pop("abs_tol")
        else:
            d.pop("h")
        return d


def _derivative(g: Field, x: np.ndarray, t: Optional[float]) -> np.ndarray:
    k = g(x)
    if not np.all(np.isfinite(k)):
        raise DivergenceError(f"non-finite derivative at t={t}", state=x, time=t)
    return k


def step_rk4(g: Field, x, h: float, t: Optional[float] = None) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step of size ``h``."""
    if not h > 0:
        raise ConfigurationError(f"step h must be positive, got {h}")
    x = np.asarray(x, dtype=np.float64)
    half = 0.5 * h
    k1 = _derivative(g, x, t)
    k2 = _derivative(g, x + half * k1, t)
    k3 = _derivative(g, x + half * k2, t)
    k4 = _derivative(g, x + h * k3, t)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))


def step_dopri5(g: Field, x, h: float, k1=None, t: Optional[float] = None):
    """One Dormand-Prince step; returns ``(x_new, error_estimate, k_last)``.

    ``k_last`` is ``g(x_new)`` and can be passed back as ``k1`` (FSAL).
    """
    x = np.asarray(x, dtype=np.float64)
    ks = [_derivative(g, x, t) if k1 is None else k1]
    for row in _A[1:]:
        incr = sum(a * k for a, k in zip(row, ks) if a != 0.0)
        ks.append(_derivative(g, x + h * incr, t))
    # stage 7 is evaluated at the 5th-order solution itself
    x_new = x + h * sum(b * k for b, k in zip(_B5, ks) if b != 0.0)
    err = h * sum(e * k for e, k in zip(_E, ks))
    return x_new, err, ks[-1]


def _check_state(x: np.ndarray, t: float) -> None:
    if not np.all(np.isfinite(x)):
        raise DivergenceError(f"state became non-finite at t={t}", state=x, time=t)
    if np.linalg.norm(x) > DIVERGENCE_NORM:
        raise DivergenceError(f"state norm exceeded {DIVERGENCE_NORM:g} at t={t}", state=x, time=t)


class _Recorder:
    def __init__(self, problem: ClosedLoopProblem):
        self.problem = problem
        self.times: list[float] = []
        self.states: list[np.ndarray] = []
        self.inputs: list[np.ndarray] = []

    def add(self, t: float, x: np.ndarray) -> None:
        self.times.append(t)
        self.states.append(np.array(x, dtype=np.float64))
        self.inputs.append(self.problem.control_at(x))

    def build(self, metadata: dict, status: str = "ok") -> Trajectory:
        m = self.problem.input_dimension
        return Trajectory(
            times=np.array(self.times, dtype=np.float64),
            states=np.vstack(self.states),
            inputs=np.vstack(self.inputs) if m else np.zeros((len(self.times), 0)),
            metadata=metadata,
            status=status,
        )


def integrate(problem: ClosedLoopProblem, x0_raw, config: IntegratorConfig = IntegratorConfig()) -> Trajectory:
    """Apply the problem's initial-condition map once, then step to ``t_end``.

    Raises :class:`DivergenceError` (with the partial trajectory attached) if
    the state becomes non-finite or its norm exceeds ``DIVERGENCE_NORM``.
    """
    x0_raw = as_state(x0_raw, problem.dimension, what="initial condition")
    x0 = problem.initial_state(x0_raw)
    metadata = {
        "system": problem.system.label,
        "control": problem.control.label,
        "control_params": dict(problem.control.params),
        "ic_map": problem.ic_map.description,
        "ic_map_params": dict(problem.ic_map.params),
        "x0_raw": x0_raw.tolist(),
        "x0_mapped": x0.tolist(),
        "integrator": config.describe(),
    }
    rec = _Recorder(problem)
    rec.add(0.0, x0)
    g = problem.field
    try:
        if config.method == "rk4_fixed":
            _run_fixed(g, x0, config, rec)
        else:
            _run_adaptive(g, x0, config, rec)
    except DivergenceError as exc:
        exc.trajectory = rec.build(metadata, status="diverged")
        raise
    return rec.build(metadata)


def _run_fixed(g: Field, x: np.ndarray, config: IntegratorConfig, rec: _Recorder) -> None:
    h = config.h
    n_steps = max(1, math.ceil(config.t_end / h - 1e-9))
    every = config.record_every
    t = 0.0
    for k in range(1, n_steps + 1):
        t_next = k * h if k < n_steps else config.t_end
        x_new = step_rk4(g, x, t_next - t, t)
        _check_state(x_new, t_next)
        x, t = x_new, t_next
        if k % every == 0 or k == n_steps:
            rec.add(t, x)


def _error_norm(err, x, x_new, config: IntegratorConfig) -> float:
    scale = config.abs_tol + config.rel_tol * np.maximum(np.abs(x), np.abs(x_new))
    return float(np.sqrt(np.mean((err / scale) ** 2)))


def _run_adaptive(g: Field, x: np.ndarray, config: IntegratorConfig, rec: _Recorder) -> None:
    t_end = config.t_end
    h_min = 1e-14 * t_end
    k1 = _derivative(g, x, 0.0)
    # starting step from the size of x and x'
    d0 = np.linalg.norm(x / (config.abs_tol + config.rel_tol * np.abs(x)))
    d1 = np.linalg.norm(k1 / (config.abs_tol + config.rel_tol * np.abs(x)))
    h = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h = min(h, t_end, 0.1 * t_end)
    t = 0.0
    accepted = 0
    while t < t_end:
        h = min(h, t_end - t)
        if h < h_min:
            raise StepUnderflowError(f"adaptive step {h:g} fell below {h_min:g} at t={t}", state=x, time=t)
        x_new, err, k_last = step_dopri5(g, x, h, k1, t)
        e = _error_norm(err, x, x_new, config)
        if not math.isfinite(e):
            h *= 0.2
            continue
        if e <= 1.0:
            t_new = t + h if t_end - (t + h) > 1e-12 * t_end else t_end
            _check_state(x_new, t_new)
            x, t, k1 = x_new, t_new, k_last
            accepted += 1
            if accepted % config.record_every == 0 or t == t_end:
                rec.add(t, x)
            factor = 5.0 if e == 0.0 else min(5.0, 0.9 * e ** -0.2)
        else:
            factor = max(0.2, 0.9 * e ** -0.2)
        h *= factor

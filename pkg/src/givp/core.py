"""Domain types and the composition rule of a generalized initial value problem.

A generalized IVP is an ODE ``x' = f(x)`` whose initial state is not the raw
``x0`` but ``phi(x0)`` for a mapping ``phi`` of the domain into a subset of
itself. The mapping is applied once, at ``t = 0``; after that the flow is the
ordinary one.

States and inputs are plain 1-D float64 numpy arrays; :func:`as_state` and
:func:`as_input` are the validating constructors used at every boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from .errors import ConfigurationError, ContractViolation

StateVector = np.ndarray
ControlInput = np.ndarray

__all__ = [
    "StateVector",
    "ControlInput",
    "as_state",
    "as_input",
    "SystemModel",
    "ControlLaw",
    "InitialConditionMap",
    "identity_map",
    "Trajectory",
    "ClosedLoopProblem",
    "apply_ic_map",
    "make_givp",
]


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def as_state(values, dimension: Optional[int] = None, what: str = "state") -> StateVector:
    """Validate ``values`` as a finite 1-D vector and return a read-only copy."""
    try:
        arr = np.array(values, dtype=np.float64).reshape(-1)
    except (TypeError, ValueError) as exc:
        raise ContractViolation(f"{what} is not a real vector: {values!r}") from exc
    if arr.size == 0 and (dimension is None or dimension > 0):
        raise ContractViolation(f"{what} is empty")
    if dimension is not None and arr.size != dimension:
        raise ContractViolation(f"{what} has dimension {arr.size}, expected {dimension}")
    if not np.all(np.isfinite(arr)):
        raise ContractViolation(f"{what} has non-finite entries: {arr.tolist()}")
    return _frozen(arr)


def as_input(values, dimension: Optional[int] = None) -> ControlInput:
    if dimension == 0:
        arr = np.array(values, dtype=np.float64).reshape(-1)
        if arr.size:
            raise ContractViolation(f"control input has dimension {arr.size}, expected 0")
        return _frozen(arr)
    return as_state(values, dimension, what="control input")


@dataclass(frozen=True)
class SystemModel:
    """Controlled vector field ``f(x, u)`` on R^n with m inputs.

    ``field`` receives a state of length ``dimension`` and an input of length
    ``input_dimension`` (0 for autonomous systems) and returns the derivative.
    """

    dimension: int
    input_dimension: int
    field: Callable[[np.ndarray, np.ndarray], Any]
    label: str = "system"

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise ConfigurationError(f"system dimension must be a positive integer, got {self.dimension!r}")
        if int(self.input_dimension) != self.input_dimension or self.input_dimension < 0:
            raise ConfigurationError(
                f"system input dimension must be a non-negative integer, got {self.input_dimension!r}"
            )

    def __call__(self, x, u) -> np.ndarray:
        out = np.asarray(self.field(x, u), dtype=np.float64).reshape(-1)
        if out.size != self.dimension:
            raise ContractViolation(
                f"{self.label}: field returned {out.size} components, expected {self.dimension}"
            )
        return out


@dataclass(frozen=True)
class ControlLaw:
    """State feedback ``u = law(x)`` producing ``output_dimension`` inputs."""

    output_dimension: int
    law: Callable[[np.ndarray], Any]
    label: str = "control"
    params: dict = field(default_factory=dict)

    def __call__(self, x) -> np.ndarray:
        out = np.asarray(self.law(x), dtype=np.float64).reshape(-1)
        if out.size != self.output_dimension:
            raise ContractViolation(
                f"{self.label}: produced {out.size} inputs, expected {self.output_dimension}"
            )
        return out

    @classmethod
    def zero(cls, output_dimension: int) -> "ControlLaw":
        zeros = np.zeros(output_dimension)
        zeros.flags.writeable = False
        return cls(output_dimension, lambda x: zeros, label="zero")


@dataclass(frozen=True)
class InitialConditionMap:
    """The mapping ``phi`` sending a raw initial condition into ``Omega*``.

    Registered maps must be idempotent: ``phi(phi(x)) == phi(x)``.
    ``dimension`` is optional; ``None`` accepts any length.
    """

    map: Callable[[np.ndarray], Any]
    description: str
    dimension: Optional[int] = None
    params: dict = field(default_factory=dict)

    def __call__(self, x0) -> StateVector:
        return apply_ic_map(self, x0)


def identity_map(dimension: Optional[int] = None) -> InitialConditionMap:
    return InitialConditionMap(lambda x: x, "identity", dimension)


def apply_ic_map(ic_map: InitialConditionMap, x0) -> StateVector:
    """Return ``phi(x0)``, checking both the argument and the result."""
    x0 = as_state(x0, ic_map.dimension, what="initial condition")
    mapped = np.array(ic_map.map(x0), dtype=np.float64).reshape(-1)
    if mapped.size != x0.size:
        raise ContractViolation(
            f"ic map {ic_map.description!r} changed dimension {x0.size} -> {mapped.size}"
        )
    if not np.all(np.isfinite(mapped)):
        raise ContractViolation(f"ic map {ic_map.description!r} produced non-finite state")
    return _frozen(mapped)


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered samples of a run.

    ``states`` has shape (K, n) and ``inputs`` shape (K, m). ``status`` is
    ``"ok"`` for a completed run and ``"diverged"`` for the partial record
    attached to a :class:`~givp.errors.DivergenceError`.
    """

    times: np.ndarray
    states: np.ndarray
    inputs: np.ndarray
    metadata: dict
    status: str = "ok"

    def __post_init__(self):
        if self.times.ndim != 1 or len(self.times) == 0:
            raise ContractViolation("trajectory needs at least one sample")
        if self.states.shape[0] != len(self.times) or self.inputs.shape[0] != len(self.times):
            raise ContractViolation("trajectory arrays disagree in length")
        if self.times[0] != 0.0 or np.any(np.diff(self.times) <= 0):
            raise ContractViolation("trajectory times must start at 0 and increase strictly")
        for arr in (self.times, self.states, self.inputs):
            arr.flags.writeable = False

    def __len__(self):
        return len(self.times)

    @property
    def initial_state(self) -> np.ndarray:
        return self.states[0]

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def final_time(self) -> float:
        return float(self.times[-1])


@dataclass(frozen=True)
class ClosedLoopProblem:
    """System, feedback and initial-condition map bundled for integration."""

    system: SystemModel
    control: ControlLaw
    ic_map: InitialConditionMap

    @property
    def dimension(self) -> int:
        return self.system.dimension

    @property
    def input_dimension(self) -> int:
        return self.system.input_dimension

    @property
    def label(self) -> str:
        return f"{self.system.label} / {self.control.label}"

    def control_at(self, x) -> np.ndarray:
        return self.control(x)

    def field(self, x) -> np.ndarray:
        """Autonomous closed-loop field ``g(x) = f(x, u(x))``."""
        return self.system(x, self.control(x))

    def initial_state(self, x0_raw) -> StateVector:
        return apply_ic_map(self.ic_map, as_state(x0_raw, self.dimension, what="initial condition"))


def make_givp(
    system: SystemModel,
    control: Optional[ControlLaw] = None,
    ic_map: Optional[InitialConditionMap] = None,
) -> ClosedLoopProblem:
    """Bundle ``f``, ``u`` and ``phi``; the identity map gives a classical IVP."""
    if control is None:
        control = ControlLaw.zero(system.input_dimension)
    if ic_map is None:
        ic_map = identity_map(system.dimension)
    if control.output_dimension != system.input_dimension:
        raise ConfigurationError(
            f"control {control.label!r} outputs {control.output_dimension} inputs but "
            f"system {system.label!r} takes {system.input_dimension}"
        )
    if ic_map.dimension is not None and ic_map.dimension != system.dimension:
        raise ConfigurationError(
            f"ic map {ic_map.description!r} has dimension {ic_map.dimension} but "
            f"system {system.label!r} has dimension {system.dimension}"
        )
    return ClosedLoopProblem(system, control, ic_map)


def is_finite_real(value) -> bool:
    try:
        return math.isfinite(value)
    except TypeError:
        return False

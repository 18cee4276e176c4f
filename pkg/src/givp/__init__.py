"""Generalized initial value problems, worked through on the unicycle robot."""

from .analysis import (
    ConvergenceVerdict,
    DirectionReport,
    SweepTable,
    constant_direction_check,
    convergence_verdict,
    lattice,
    sweep_initial_conditions,
    theta_closed_form,
)
from .core import (
    ClosedLoopProblem,
    ControlLaw,
    InitialConditionMap,
    SystemModel,
    Trajectory,
    apply_ic_map,
    identity_map,
    make_givp,
)
from .errors import (
    ConfigurationError,
    ContractViolation,
    DivergenceError,
    IndeterminateError,
    RangeError,
    StepUnderflowError,
)
from .integrate import IntegratorConfig, integrate, step_rk4
from .special_fn import bessel_j, bessel_j_oracle, bessel_j_orders
from .unicycle import (
    BesselControllerParams,
    ThetaRemapParams,
    bessel_controller,
    beta,
    simulate_unicycle,
    theta_ic_map,
    unicycle_field,
)

__version__ = "0.1.0"

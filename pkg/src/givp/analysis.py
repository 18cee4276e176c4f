"""Numerical verdicts on trajectories and closed-loop fields.

* :func:`convergence_verdict` classifies a single run.
* :func:`constant_direction_check` samples a ball around a point and measures
  how far the normalized field ``g / |g|`` turns inside it. A smooth
  stabilizer forced to keep one direction near the origin could only move
  along a straight line; a large deviation shows the field is not of that
  kind.
* :func:`sweep_initial_conditions` runs the unicycle closed loop over a grid
  of starting points.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.stats import qmc

from .core import Trajectory, as_state
from .errors import ContractViolation, DivergenceError, IndeterminateError, StepUnderflowError
from .integrate import IntegratorConfig
from .unicycle import BesselControllerParams, ThetaRemapParams, simulate_unicycle

__all__ = [
    "CLASSIFICATIONS",
    "SAMPLING_SEED",
    "ConvergenceVerdict",
    "DirectionReport",
    "SweepRow",
    "SweepTable",
    "theta_closed_form",
    "convergence_verdict",
    "sample_ball",
    "unit_angle",
    "constant_direction_check",
    "lattice",
    "sweep_initial_conditions",
]

CLASSIFICATIONS = (
    "converged_to_origin",
    "stationary_nonconvergent",
    "moving_nonconvergent",
    "diverged",
)
SAMPLING_SEED = 20200614


def theta_closed_form(theta_init: float, a: float, t: float) -> float:
    """Heading under ``theta' = a * theta``: ``theta_init * exp(a * t)``."""
    return theta_init * math.exp(a * t)


@dataclass(frozen=True)
class ConvergenceVerdict:
    converged: bool
    final_norm: float
    theta_final: float
    displacement: float
    max_excursion: float
    classification: str

    def as_dict(self) -> dict:
        return {
            "converged": self.converged,
            "final_norm": self.final_norm,
            "theta_final": self.theta_final,
            "displacement": self.displacement,
            "max_excursion": self.max_excursion,
            "classification": self.classification,
        }


def _planar(states: np.ndarray) -> np.ndarray:
    # position part: (x, y) for n >= 2, the whole state for scalar systems
    return states[:, :2] if states.shape[1] >= 2 else states


def convergence_verdict(traj: Trajectory, eps: float = 1e-3, stationarity_tol: float = 1e-9) -> ConvergenceVerdict:
    """Classify a run by its end point and its planar motion.

    ``displacement`` is the planar distance of the final sample from the
    first one; stationarity is judged on the largest such distance over the
    whole run (``max_excursion``).
    """
    if traj is None or len(traj) == 0:
        raise ContractViolation("cannot classify an empty trajectory")
    final = traj.final_state
    final_norm = float(np.linalg.norm(final))
    pos = _planar(traj.states)
    dist = np.linalg.norm(pos - pos[0], axis=1)
    displacement = float(dist[-1])
    excursion = float(dist.max())
    if traj.status == "diverged":
        cls = "diverged"
    elif final_norm <= eps:
        cls = "converged_to_origin"
    elif excursion <= stationarity_tol:
        cls = "stationary_nonconvergent"
    else:
        cls = "moving_nonconvergent"
    return ConvergenceVerdict(
        converged=cls == "converged_to_origin",
        final_norm=final_norm,
        theta_final=float(final[-1]),
        displacement=displacement,
        max_excursion=excursion,
        classification=cls,
    )


@dataclass(frozen=True)
class DirectionReport:
    """Outcome of :func:`constant_direction_check`.

    ``max_angular_deviation`` is the largest angle between any two sampled
    directions; ``line_deviation`` is the same maximum with opposite
    directions identified (angle folded to ``[0, pi/2]``). The verdict uses
    the unfolded number.
    """

    is_constant_direction: bool
    max_angular_deviation: float
    max_reference_deviation: float
    line_deviation: float
    reference_direction: tuple
    reference_state: tuple
    witnesses: list
    excluded_count: int
    sample_count: int
    angle_tol: float
    center: tuple
    radius: float

    def as_dict(self) -> dict:
        return {
            "is_constant_direction": self.is_constant_direction,
            "max_angular_deviation": self.max_angular_deviation,
            "max_reference_deviation": self.max_reference_deviation,
            "line_deviation": self.line_deviation,
            "reference_direction": list(self.reference_direction),
            "reference_state": list(self.reference_state),
            "witnesses": self.witnesses,
            "excluded_count": self.excluded_count,
            "sample_count": self.sample_count,
            "angle_tol": self.angle_tol,
            "center": list(self.center),
            "radius": self.radius,
        }


def sample_ball(center, radius: float, n_samples: int = 2048, seed: int = SAMPLING_SEED) -> np.ndarray:
    """Deterministic points in the closed ball ``B(center, radius)``.

    ``n_samples`` scrambled-Halton points (cube mapped radially onto the
    ball) followed by the ``2n`` points ``center +- radius * e_i``.
    """
    center = as_state(center, what="center")
    if not (isinstance(radius, (int, float)) and math.isfinite(radius) and radius > 0):
        raise ContractViolation(f"radius must be positive and finite, got {radius!r}")
    if isinstance(n_samples, bool) or int(n_samples) != n_samples or n_samples < 2:
        raise ContractViolation(f"n_samples must be an integer >= 2, got {n_samples!r}")
    n = center.size
    cube = 2.0 * qmc.Halton(d=n, scramble=True, seed=seed).random(int(n_samples)) - 1.0
    sup = np.abs(cube).max(axis=1)
    euc = np.linalg.norm(cube, axis=1)
    scale = np.divide(sup, euc, out=np.zeros_like(sup), where=euc > 0)
    ball = cube * scale[:, None]
    axes = np.vstack([np.eye(n), -np.eye(n)])
    return center + radius * np.vstack([ball, axes])


def unit_angle(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Angle between unit vectors (last axis), ``2 * atan2(|u - v|, |u + v|)``.

    Accurate at both ends of ``[0, pi]``, unlike ``arccos`` of the dot product.
    """
    return 2.0 * np.arctan2(np.linalg.norm(u - v, axis=-1), np.linalg.norm(u + v, axis=-1))


def constant_direction_check(
    field: Callable[[np.ndarray], np.ndarray],
    center,
    radius: float = 0.5,
    n_samples: int = 2048,
    angle_tol: float = 1e-6,
    norm_floor: float = 1e-9,
    seed: int = SAMPLING_SEED,
    n_witnesses: int = 5,
    chunk: int = 256,
) -> DirectionReport:
    """Does ``field / |field|`` stay (within ``angle_tol``) constant on the ball?

    Samples with ``|field| < norm_floor`` have no direction and are skipped;
    they are counted in ``excluded_count``. Raises :class:`IndeterminateError`
    if every sample is skipped.
    """
    if not norm_floor > 0:
        raise ContractViolation(f"norm_floor must be positive, got {norm_floor!r}")
    if not angle_tol >= 0:
        raise ContractViolation(f"angle_tol must be non-negative, got {angle_tol!r}")
    points = sample_ball(center, radius, n_samples, seed)
    values = np.array([np.asarray(field(p), dtype=np.float64) for p in points])
    if not np.all(np.isfinite(values)):
        raise ContractViolation("field is not finite on the sample set")
    norms = np.linalg.norm(values, axis=1)
    keep = norms >= norm_floor
    excluded = int(np.count_nonzero(~keep))
    if not keep.any():
        raise IndeterminateError(
            f"field norm below {norm_floor:g} at all {len(points)} samples; the condition is vacuous"
        )
    states = points[keep]
    dirs = values[keep] / norms[keep][:, None]
    ref = dirs[0]
    ref_dev = float(unit_angle(dirs, ref).max())

    k = len(dirs)
    max_dev = 0.0
    line_dev = 0.0
    best = []  # (angle, i, j) row maxima
    for lo in range(0, k, chunk):
        block = unit_angle(dirs[lo : lo + chunk, None, :], dirs[None, :, :])
        max_dev = max(max_dev, float(block.max()))
        line_dev = max(line_dev, float(np.minimum(block, math.pi - block).max()))
        cols = block.argmax(axis=1)
        for r, c in enumerate(cols):
            best.append((float(block[r, c]), lo + r, int(c)))
    best.sort(key=lambda item: -item[0])
    witnesses, seen = [], set()
    for angle, i, j in best:
        pair = (min(i, j), max(i, j))
        if angle == 0.0 or pair in seen:
            continue
        seen.add(pair)
        witnesses.append(
            {"angle": angle, "state_a": states[pair[0]].tolist(), "state_b": states[pair[1]].tolist()}
        )
        if len(witnesses) == n_witnesses:
            break

    return DirectionReport(
        is_constant_direction=max_dev <= angle_tol,
        max_angular_deviation=max_dev,
        max_reference_deviation=ref_dev,
        line_deviation=line_dev,
        reference_direction=tuple(ref.tolist()),
        reference_state=tuple(states[0].tolist()),
        witnesses=witnesses,
        excluded_count=excluded,
        sample_count=len(points),
        angle_tol=float(angle_tol),
        center=tuple(np.asarray(center, dtype=float).tolist()),
        radius=float(radius),
    )


def lattice(lower: Sequence[float], upper: Sequence[float], counts: Sequence[int]) -> list[np.ndarray]:
    """Axis-aligned grid, last coordinate varying fastest."""
    if not (len(lower) == len(upper) == len(counts)):
        raise ContractViolation("lattice bounds and counts must have equal length")
    axes = []
    for lo, hi, c in zip(lower, upper, counts):
        if isinstance(c, bool) or int(c) != c or c < 1:
            raise ContractViolation(f"lattice counts must be positive integers, got {c!r}")
        if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
            raise ContractViolation(f"bad lattice interval [{lo}, {hi}]")
        axes.append(np.linspace(lo, hi, int(c)) if c > 1 else np.array([float(lo)]))
    return [np.array(p) for p in itertools.product(*axes)]


@dataclass(frozen=True)
class SweepRow:
    index: int
    x0: tuple
    x0_mapped: Optional[tuple]
    verdict: ConvergenceVerdict
    error: Optional[str] = None

    def as_dict(self) -> dict:
        d = {"index": self.index, "x0": list(self.x0)}
        d["x0_mapped"] = None if self.x0_mapped is None else list(self.x0_mapped)
        d.update(self.verdict.as_dict())
        d["error"] = self.error
        return d


@dataclass(frozen=True)
class SweepTable:
    rows: list
    counts: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"rows": [r.as_dict() for r in self.rows], "counts": dict(self.counts)}


def _sweep_row(index, x0, ctrl, remap, integ, eps, stationarity_tol) -> SweepRow:
    x0_t = tuple(float(v) for v in x0)
    try:
        traj = simulate_unicycle(x0, ctrl, remap, integ)
    except DivergenceError as exc:
        verdict = convergence_verdict(exc.trajectory, eps, stationarity_tol)
        return SweepRow(index, x0_t, tuple(exc.trajectory.metadata["x0_mapped"]), verdict, str(exc))
    except StepUnderflowError as exc:
        state = np.asarray(exc.state, dtype=float)
        verdict = ConvergenceVerdict(
            False, float(np.linalg.norm(state)), float(state[-1]), math.nan, math.nan, "diverged"
        )
        return SweepRow(index, x0_t, None, verdict, str(exc))
    verdict = convergence_verdict(traj, eps, stationarity_tol)
    return SweepRow(index, x0_t, tuple(traj.metadata["x0_mapped"]), verdict)


def sweep_initial_conditions(
    grid: Sequence,
    ctrl: BesselControllerParams = BesselControllerParams(),
    remap_on: bool = True,
    integ: IntegratorConfig = IntegratorConfig(),
    eps: float = 1e-3,
    stationarity_tol: float = 1e-9,
    remap: Optional[ThetaRemapParams] = None,
) -> SweepTable:
    """One verdict per starting point, in input order.

    A divergent row is recorded as ``diverged`` and the sweep continues.
    """
    grid = [as_state(x, 3, what=f"grid point {i}") for i, x in enumerate(grid)]
    if not grid:
        raise ContractViolation("empty grid")
    remap = (remap or ThetaRemapParams()) if remap_on else None
    rows = [_sweep_row(i, x, ctrl, remap, integ, eps, stationarity_tol) for i, x in enumerate(grid)]
    counts = {c: 0 for c in CLASSIFICATIONS}
    for row in rows:
        counts[row.verdict.classification] += 1
    return SweepTable(rows, counts)

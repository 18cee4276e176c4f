"""Same start, with and without the heading remap.

    python scripts/contrast.py [--x0 3,4,0] [--t-end 10] [--csv-dir DIR]
"""

import argparse
import math
from pathlib import Path

from givp.analysis import constant_direction_check, convergence_verdict
from givp.cli import write_trajectory_csv
from givp.integrate import IntegratorConfig
from givp.unicycle import BesselControllerParams, ThetaRemapParams, closed_loop_problem, simulate_unicycle


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--x0", default="3,4,0")
    ap.add_argument("--t-end", type=float, default=10.0)
    ap.add_argument("--csv-dir", type=Path)
    args = ap.parse_args()

    x0 = [float(v) for v in args.x0.split(",")]
    ctrl = BesselControllerParams()
    integ = IntegratorConfig(t_end=args.t_end)
    for label, remap in (("identity", None), ("theta_remap", ThetaRemapParams())):
        traj = simulate_unicycle(x0, ctrl, remap, integ)
        v = convergence_verdict(traj)
        theta0 = traj.states[0, 2]
        err = max(abs(th - theta0 * math.exp(ctrl.a * t)) for t, th in zip(traj.times, traj.states[:, 2]))
        print(f"{label:12s} x(0)={traj.states[0].tolist()} -> {traj.final_state.tolist()}")
        print(f"{'':12s} {v.classification}, displacement {v.displacement:.6g}, "
              f"max heading error vs closed form {err:.2e}")
        if args.csv_dir:
            args.csv_dir.mkdir(parents=True, exist_ok=True)
            write_trajectory_csv(traj, args.csv_dir / f"{label}.csv")

    report = constant_direction_check(closed_loop_problem(ctrl).field, [0.0, 0.0, 0.0], 0.5)
    print(f"direction spread on B(0, 0.5): {report.max_angular_deviation:.6f} rad "
          f"(line {report.line_deviation:.4f}), excluded {report.excluded_count}/{report.sample_count}")


if __name__ == "__main__":
    main()

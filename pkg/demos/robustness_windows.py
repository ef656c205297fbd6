"""Walkthrough: how forgiving the cancellation condition is.

The twisting cancels exactly at drive ratio Omega/omega_m = 0.8131 and a
second-period phase of pi/2.  Detuning either knob leaves a residual
interaction; this script sweeps both with the alternation-averaged effective
models and reports where the precision still beats the standard quantum
limit.
"""

import numpy as np

from aiqmsim import (DriveParams, RamseyConfig, SpinSystem, h_eff_phase,
                     h_eff_ratio, run_signal_model, solve_drive_ratio)

N = 100
OMEGA_M = 2 * np.pi * 20 * N
SQL = 10.0


def ratio_precision(ratio):
    system = SpinSystem(N)
    cfg = RamseyConfig(n_particles=N)

    def h_of(delta):
        p = DriveParams(chi=1.0, delta=delta, omega_m=OMEGA_M,
                        Omega=ratio * OMEGA_M)
        return h_eff_ratio(p, system).hamiltonian

    return run_signal_model(cfg, h_of).delta_omega0


def phase_precision(alpha2_over_pi):
    system = SpinSystem(N)
    cfg = RamseyConfig(n_particles=N)
    ideal = solve_drive_ratio(-1.0 / 3.0)

    def h_of(delta):
        p = DriveParams(chi=1.0, delta=delta, omega_m=OMEGA_M,
                        Omega=ideal * OMEGA_M)
        return h_eff_phase(p, system, alpha2_over_pi * np.pi).hamiltonian

    return run_signal_model(cfg, h_of).delta_omega0


def report_window(name, grid, precision_fn):
    flagged = [x for x in grid if precision_fn(x) < SQL]
    print(f"{name}: sub-SQL window [{min(flagged):.2f}, {max(flagged):.2f}] "
          f"on a {grid[1] - grid[0]:.2f}-step grid")


def main():
    print(f"cancellation point: ratio = {solve_drive_ratio(-1.0 / 3.0):.4f}")
    print(f"precision there: {ratio_precision(solve_drive_ratio(-1.0 / 3.0)):.3f} "
          f"(SQL = {SQL})")
    report_window("drive ratio", np.round(np.arange(0.55, 0.951, 0.02), 10),
                  ratio_precision)
    report_window("second-period phase (units of pi)",
                  np.round(np.arange(0.05, 0.951, 0.02), 10), phase_precision)


if __name__ == "__main__":
    main()

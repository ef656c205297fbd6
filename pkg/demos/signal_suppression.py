"""Walkthrough: why phase alternation rescues a squeezed Ramsey sequence.

A squeezed input state is prepared by one-axis twisting, the transition
frequency is encoded as a phase around Jz, and the population imbalance is
read out after a pi/2 pulse.  With the twisting left on (no modulation) the
uncertainty of the readout blows up; alternating the drive phase cancels the
twisting and keeps the precision below the standard quantum limit.
"""

import numpy as np

from aiqmsim import (RamseyConfig, SimulationMode, SpinSystem, oat_squeezed_input,
                     run_fig2_protocol, variance)


def main():
    system = SpinSystem(100)
    state = oat_squeezed_input(system, 0.03)
    print(f"input state: Var(Jy) = {variance(state, system.jy):.3f}  "
          f"(coherent value {system.n_particles / 4:.1f})")

    print("\nprecision at the operating point (N=100, chi=delta=1, t_s=0.01):")
    header = f"{'mode':<12} {'<Jz>':>10} {'dJz':>10} {'precision':>10} {'SQL':>6}"
    print(header)
    print("-" * len(header))
    for mode in (SimulationMode.FULL_DRIVE, SimulationMode.EFFECTIVE,
                 SimulationMode.BARE):
        res = run_fig2_protocol(RamseyConfig(mode=mode))
        print(f"{mode.value:<12} {res.jz_mean:>10.4f} {res.jz_std:>10.4f} "
              f"{res.delta_omega0:>10.4f} {res.sql:>6.1f}")

    print("\nprecision * accumulation time stays flat under alternation:")
    for chi_t in np.linspace(0.01, 0.1, 4):
        eff = run_fig2_protocol(RamseyConfig(mode=SimulationMode.EFFECTIVE,
                                             t_signal=chi_t))
        bare = run_fig2_protocol(RamseyConfig(mode=SimulationMode.BARE,
                                              t_signal=chi_t))
        print(f"  chi*t_s = {chi_t:.2f}: alternation {eff.delta_omega0 * chi_t:.4f}, "
              f"undriven {bare.delta_omega0 * chi_t:>9.4f}  (SQL*t_s = 0.1)")


if __name__ == "__main__":
    main()

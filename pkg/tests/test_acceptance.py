"""Acceptance suite: one test per headline criterion, each printing a
pass/fail line with the measured numbers.  Run with ``pytest -v -s``.
"""

import math

import numpy as np
from scipy.special import j0

from aiqmsim import dynamics, floquet, metrology, protocol, spin


def report(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def cancellation_params(chi=1.0, delta=1.0, omega_m=2 * np.pi * 2000.0, alpha=0.0):
    return floquet.DriveParams.at_twist_cancellation(chi, delta, omega_m, alpha)


def test_c01_bessel_condition():
    ratio = floquet.solve_drive_ratio(-1.0 / 3.0)
    k0 = j0(2 * ratio)
    ok = abs(ratio - 0.8131) < 5e-3 and abs(k0 - 0.4404) < 5e-4
    report("C01 drive-ratio condition", ok,
           f"ratio={ratio:.6f} (ref 0.8131), K0={k0:.6f} (ref 0.4404)")


def test_c02_effective_model_validity():
    base = dict(n_particles=100, chi=1.0, delta=1.0, t_signal=0.01,
                omega_m_factor=20.0, chi_t_prepare=0.03)
    full = protocol.run_fig2_protocol(
        protocol.RamseyConfig(mode=protocol.SimulationMode.FULL_DRIVE, **base))
    eff = protocol.run_fig2_protocol(
        protocol.RamseyConfig(mode=protocol.SimulationMode.EFFECTIVE, **base))
    rel = lambda a, b: abs(a - b) / abs(b)
    devs = (rel(full.jz_mean, eff.jz_mean), rel(full.jz_std, eff.jz_std),
            rel(full.delta_omega0, eff.delta_omega0))
    ok = max(devs) < 0.02 and full.delta_omega0 < 10.0
    report("C02 effective-model validity", ok,
           f"mean/std/precision deviations {devs[0]:.2%}/{devs[1]:.2%}/{devs[2]:.2%} "
           f"(<2%), precision {full.delta_omega0:.3f} < SQL 10")


def test_c03_time_resource_scaling():
    products = []
    worst_bare_ratio = 0.0
    for chi_t in np.linspace(0.01, 0.1, 10):
        eff = protocol.run_fig2_protocol(protocol.RamseyConfig(
            mode=protocol.SimulationMode.EFFECTIVE, t_signal=chi_t))
        products.append(eff.delta_omega0 * chi_t)
        bare = protocol.run_fig2_protocol(protocol.RamseyConfig(
            mode=protocol.SimulationMode.BARE, t_signal=chi_t))
        worst_bare_ratio = max(worst_bare_ratio, bare.delta_omega0 / bare.sql)
    spread = (max(products) - min(products)) / float(np.mean(products))
    ok = spread < 0.05 and worst_bare_ratio > 1.0
    report("C03 time-resource scaling", ok,
           f"precision*t spread {spread:.2%} (<5%), "
           f"undriven max precision/SQL {worst_bare_ratio:.1f} (>1)")


def test_c04_chi_robustness():
    eff_values = []
    for chi in np.logspace(-1, 1, 9):
        res = protocol.run_fig2_protocol(protocol.RamseyConfig(
            mode=protocol.SimulationMode.EFFECTIVE, chi=chi))
        eff_values.append(res.delta_omega0)
    spread = (max(eff_values) - min(eff_values)) / float(np.mean(eff_values))

    full_devs = []
    for chi in (0.5, 1.0, 2.0):
        res_f = protocol.run_fig2_protocol(protocol.RamseyConfig(
            mode=protocol.SimulationMode.FULL_DRIVE, chi=chi))
        res_e = protocol.run_fig2_protocol(protocol.RamseyConfig(
            mode=protocol.SimulationMode.EFFECTIVE, chi=chi,
            t_signal=res_f.metadata["t_signal"]))
        full_devs.append(abs(res_f.delta_omega0 - res_e.delta_omega0)
                         / res_e.delta_omega0)

    bare_values = [protocol.run_fig2_protocol(protocol.RamseyConfig(
        mode=protocol.SimulationMode.BARE, chi=chi)).delta_omega0
        for chi in (0.5, 1.0, 2.0, 4.0)]
    bare_increases = all(b > a for a, b in zip(bare_values, bare_values[1:]))

    ok = spread < 0.03 and max(full_devs) < 0.03 and bare_increases
    report("C04 interaction-strength robustness", ok,
           f"driven spread {spread:.2%} (<3%) over two decades, full-drive "
           f"deviations {', '.join(f'{d:.2%}' for d in full_devs)} (<3%), "
           f"undriven precision increasing with chi: {bare_increases}")


def test_c05_modulation_frequency_convergence():
    deviations = {}
    for factor in (2, 5, 10, 20, 40):
        full_cfg = protocol.RamseyConfig(mode=protocol.SimulationMode.FULL_DRIVE,
                                         omega_m_factor=float(factor))
        res_f = protocol.run_fig2_protocol(full_cfg)
        res_e = protocol.run_fig2_protocol(protocol.RamseyConfig(
            mode=protocol.SimulationMode.EFFECTIVE, omega_m_factor=float(factor),
            t_signal=res_f.metadata["t_signal"]))
        deviations[factor] = abs(res_f.delta_omega0 - res_e.delta_omega0) \
            / res_e.delta_omega0
    ok = deviations[20] < 0.02 and deviations[40] <= deviations[20]
    report("C05 modulation-frequency convergence", ok,
           "relative deviations " +
           ", ".join(f"x{f}: {d:.3%}" for f, d in deviations.items()) +
           " (x20 < 2%, x40 <= x20)")


def _window_precision(kind: str, x: float) -> float:
    system = spin.SpinSystem(100)
    omega_m = 2 * np.pi * 20 * 100
    cfg = protocol.RamseyConfig(n_particles=100)
    if kind == "ratio":
        def h_of(delta):
            p = floquet.DriveParams(chi=1.0, delta=delta, omega_m=omega_m,
                                    Omega=x * omega_m)
            return floquet.h_eff_ratio(p, system).hamiltonian
    else:
        p0 = cancellation_params(omega_m=omega_m)

        def h_of(delta):
            return floquet.h_eff_phase(p0.with_(delta=delta), system,
                                       x * np.pi).hamiltonian
    return protocol.run_signal_model(cfg, h_of).delta_omega0


def test_c06_robustness_windows():
    sql = 10.0
    ratio_grid = np.round(np.arange(0.55, 0.9501, 0.01), 10)
    ratio_flags = {x: _window_precision("ratio", x) < sql for x in ratio_grid}
    ratio_window = [x for x, f in ratio_flags.items() if f]
    lo_r, hi_r = min(ratio_window), max(ratio_window)
    contains_r = all(ratio_flags[x] for x in ratio_grid if 0.65 <= x <= 0.84)
    contained_r = 0.59 <= lo_r and hi_r <= 0.90

    alpha_grid = np.round(np.arange(0.05, 0.9501, 0.01), 10)
    alpha_flags = {x: _window_precision("alpha", x) < sql for x in alpha_grid}
    alpha_window = [x for x, f in alpha_flags.items() if f]
    lo_a, hi_a = min(alpha_window), max(alpha_window)
    contains_a = all(alpha_flags[x] for x in alpha_grid if 0.31 <= x <= 0.69)
    contained_a = 0.25 <= lo_a and hi_a <= 0.75

    ok = contains_r and contained_r and contains_a and contained_a
    report("C06 robustness windows", ok,
           f"drive-ratio window [{lo_r:.2f}, {hi_r:.2f}] "
           f"(contains [0.65,0.84]: {contains_r}, within [0.59,0.90]: {contained_r}); "
           f"phase window [{lo_a:.2f}, {hi_a:.2f}] "
           f"(contains [0.31,0.69]: {contains_a}, within [0.25,0.75]: {contained_a})")


def test_c07_averaging_identities():
    system = spin.SpinSystem(14)
    rng = np.random.default_rng(2024)
    worst_ratio, worst_phase = 0.0, 0.0
    for _ in range(20):
        chi, delta = rng.uniform(0.2, 3.0), rng.uniform(-2.0, 2.0)
        omega_m = rng.uniform(10.0, 500.0)
        p_any = floquet.DriveParams(chi=chi, delta=delta, omega_m=omega_m,
                                    Omega=rng.uniform(0.0, 1.1) * omega_m)
        mean = (floquet.h_floquet_general(p_any.with_(alpha=0.0),
                                          system).hamiltonian.matrix
                + floquet.h_floquet_general(p_any.with_(alpha=np.pi / 2),
                                            system).hamiltonian.matrix) / 2
        got = floquet.h_eff_ratio(p_any, system).hamiltonian.matrix
        worst_ratio = max(worst_ratio, float(np.abs(got - mean).max()))

        p_cond = cancellation_params(chi=chi, delta=delta, omega_m=omega_m)
        alpha2 = rng.uniform(0.0, np.pi)
        mean2 = (floquet.h_floquet_general(p_cond.with_(alpha=0.0),
                                           system).hamiltonian.matrix
                 + floquet.h_floquet_general(p_cond.with_(alpha=alpha2),
                                             system).hamiltonian.matrix) / 2
        got2 = floquet.h_eff_phase(p_cond, system, alpha2).hamiltonian.matrix
        worst_phase = max(worst_phase, float(np.abs(got2 - mean2).max()))
    ok = worst_ratio < 1e-10 and worst_phase < 1e-10
    report("C07 averaging identities", ok,
           f"max deviations {worst_ratio:.2e} / {worst_phase:.2e} (<1e-10, 20 draws)")


def test_c08_full_stage_protocol():
    eff = protocol.run_full_stage_protocol(
        protocol.FullStageConfig(mode=protocol.SimulationMode.EFFECTIVE))
    full = protocol.run_full_stage_protocol(
        protocol.FullStageConfig(mode=protocol.SimulationMode.FULL_DRIVE))
    dev = abs(full.delta_omega0 - eff.delta_omega0) / eff.delta_omega0

    samples = []
    for n in (20, 40, 60, 80, 100):
        res = protocol.run_full_stage_protocol(protocol.FullStageConfig(
            n_particles=n, mode=protocol.SimulationMode.EFFECTIVE))
        samples.append((n, res.delta_omega0))
    fit = metrology.fit_scaling(samples)
    at_100 = samples[-1][1]
    ok = (dev < 0.05 and 0.85 <= fit.exponent <= 1.05
          and abs(at_100 - 3.4) / 3.4 < 0.20)
    report("C08 full-stage protocol", ok,
           f"full-drive vs effective deviation {dev:.2%} (<5%); scaling exponent "
           f"{fit.exponent:.3f} (in [0.85,1.05]), prefactor {fit.prefactor:.0f}; "
           f"precision/chi at N=100: {at_100:.3f} (3.4 +- 20%)")


def test_c09_detection_noise():
    cfg = protocol.FullStageConfig(mode=protocol.SimulationMode.EFFECTIVE)
    res = protocol.run_full_stage_protocol(cfg)
    sigmas = np.linspace(0.0, 2.0 * math.sqrt(100), 21)
    noisy = [metrology.apply_detection_noise(res, metrology.NoiseModel(s))
             for s in sigmas]
    values = [r.delta_omega0 for r in noisy]
    monotone = all(b >= a for a, b in zip(values, values[1:]))
    below = all(r.delta_omega0 < res.sql
                for r, s in zip(noisy, sigmas) if s <= 0.9 * math.sqrt(100))

    outcomes, probs = protocol.full_stage_jz_distribution(cfg)
    worst = 0.0
    for s in (0.5, 3.0, 9.0):
        _, var_conv = metrology.gaussian_smeared_moments(probs, outcomes, s)
        worst = max(worst, abs(var_conv - (res.jz_std ** 2 + s ** 2)))
    ok = monotone and below and worst < 1e-10
    report("C09 detection noise", ok,
           f"monotone: {monotone}; below SQL through 0.9*sqrt(N): {below} "
           f"(value at sigma=9: {values[9]:.2f} vs SQL {res.sql:.1f}); "
           f"convolution vs closed form {worst:.1e} (<1e-10)")


def test_c10_property_suite():
    checks = {}

    worst = 0.0
    for n in (1, 2, 5, 50, 100):
        system = spin.SpinSystem(n)
        jx, jy, jz = (op.matrix for op in spin.build_spin_operators(system))
        j = system.total_spin
        worst = max(
            worst,
            float(np.abs(jx @ jy - jy @ jx - 1j * jz).max()),
            float(np.abs(jy @ jz - jz @ jy - 1j * jx).max()),
            float(np.abs(jz @ jx - jx @ jz - 1j * jy).max()),
            float(np.abs(jx @ jx + jy @ jy + jz @ jz
                         - j * (j + 1) * np.eye(system.dim)).max()))
    checks["spin algebra"] = worst < 1e-12

    system = spin.SpinSystem(100)
    p = cancellation_params(omega_m=2 * np.pi * 20 * 100 * 1.0)
    ham = floquet.rotating_hamiltonian_fn(p, system)
    cfg = dynamics.PropagationConfig(steps_per_drive_period=64)
    unitary = dynamics.propagator_timedep(ham, 0.0, p.period, cfg).matrix
    checks["propagation unitarity"] = bool(
        np.abs(unitary.conj().T @ unitary - np.eye(system.dim)).max() < 1e-8)

    sys40 = spin.SpinSystem(40)
    p40 = cancellation_params(omega_m=2 * np.pi * 20 * 40)
    ham40 = floquet.rotating_hamiltonian_fn(p40, sys40)
    state40 = spin.coherent_state(sys40, np.pi / 2, 0.0)
    ref = dynamics.evolve_timedep(
        ham40, 0.0, p40.period,
        dynamics.PropagationConfig(steps_per_drive_period=4096), state40)
    errors, dts = [], []
    for steps in (32, 64, 128, 256):
        out = dynamics.evolve_timedep(
            ham40, 0.0, p40.period,
            dynamics.PropagationConfig(steps_per_drive_period=steps), state40)
        errors.append(float(np.linalg.norm(out.amplitudes - ref.amplitudes)))
        dts.append(p40.period / steps)
    slope = float(np.polyfit(np.log(dts), np.log(errors), 1)[0])
    checks["second-order convergence"] = 1.8 <= slope <= 2.2

    state = spin.oat_squeezed_input(system, 0.03)
    target = spin.StateVector(system, np.exp(
        -1j * p.k0 * system.m_values * 0.008) * state.amplitudes)
    deficits = []
    for n_blk, k in ((8, 1), (4, 2), (2, 4)):
        sched = protocol.AiqmSchedule(n=n_blk, k=k, period=p.period)
        out = protocol.accumulate_aiqm(state, p, sched, "effective")
        deficits.append(1.0 - spin.fidelity(out, target))
    ratios = [a / b for a, b in zip(deficits, deficits[1:])]
    checks["alternation error halving"] = all(3.2 < r < 5.2 for r in ratios)

    sys20 = spin.SpinSystem(20)
    p20 = cancellation_params(omega_m=2 * np.pi * 20 * 20)
    lhs, rhs = protocol.encode_axis_check(0.05 / p20.k0, p20, sys20)
    checks["encoding-axis identity"] = bool(
        np.abs(lhs.matrix - rhs.matrix).max() < 1e-10)

    ramsey = protocol.run_plain_ramsey(n_particles=100, delta=1.0, t_signal=0.01)
    checks["plain Ramsey saturates SQL"] = \
        abs(ramsey.delta_omega0 - ramsey.sql) / ramsey.sql < 1e-6

    ok = all(checks.values())
    report("C10 property suite", ok,
           "; ".join(f"{k}: {'ok' if v else 'VIOLATED'}" for k, v in checks.items())
           + f" (convergence slope {slope:.2f}, halving ratios "
           + ", ".join(f"{r:.2f}" for r in ratios) + ")")

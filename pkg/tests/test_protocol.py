import numpy as np
import pytest

from aiqmsim import floquet, protocol, spin
from aiqmsim.errors import ConditionViolatedError, ScheduleError


def cancellation_params(chi=1.0, delta=1.0, omega_m=2 * np.pi * 2000.0):
    return floquet.DriveParams.at_twist_cancellation(chi, delta, omega_m)


def test_schedule_tiles_exactly():
    sched = protocol.AiqmSchedule(n=3, k=5, period=0.25)
    assert sched.t_signal == 2 * 5 * 3 * 0.25
    snapped = protocol.AiqmSchedule.for_signal_time(0.01, 2 * np.pi * 2000.0)
    assert snapped.k == 10
    assert snapped.t_signal == pytest.approx(0.01, rel=1e-12)


def test_schedule_rejects_degenerate_cycles():
    with pytest.raises(ScheduleError):
        protocol.AiqmSchedule(n=0, k=1, period=0.1)
    with pytest.raises(ScheduleError):
        protocol.AiqmSchedule(n=1, k=0, period=0.1)
    with pytest.raises(ScheduleError):
        # shorter than a single alternation cycle
        protocol.AiqmSchedule.for_signal_time(1e-5, 2 * np.pi * 100.0)


def test_mode_parsing():
    assert protocol.SimulationMode.parse("full") is protocol.SimulationMode.FULL_DRIVE
    assert protocol.SimulationMode.parse(protocol.SimulationMode.BARE) \
        is protocol.SimulationMode.BARE
    with pytest.raises(ValueError):
        protocol.SimulationMode.parse("exact")


def test_accumulate_aiqm_guards():
    system = spin.SpinSystem(10)
    state = spin.coherent_state(system, np.pi / 2, 0.0)
    sched = protocol.AiqmSchedule(n=1, k=1, period=2 * np.pi / 100.0)
    off_condition = floquet.DriveParams(chi=1.0, delta=0.0, omega_m=100.0, Omega=10.0)
    with pytest.raises(ConditionViolatedError):
        protocol.accumulate_aiqm(state, off_condition, sched, "effective")
    good = floquet.DriveParams.at_twist_cancellation(1.0, 0.0, 100.0)
    with pytest.raises(ScheduleError):
        protocol.accumulate_aiqm(state, good, sched, "bare")
    mismatched = protocol.AiqmSchedule(n=1, k=1, period=0.123)
    with pytest.raises(ScheduleError):
        protocol.accumulate_aiqm(state, good, mismatched, "full")


def test_aiqm_cancellation_at_zero_detuning():
    """With no detuning the two half-cycles undo each other exactly."""
    rng = np.random.default_rng(5)
    system = spin.SpinSystem(60)
    p = cancellation_params(delta=0.0, omega_m=2 * np.pi * 20 * 60)
    for chi_t in rng.uniform(0.01, 0.05, size=3):
        state = spin.rotate(spin.oat_squeezed_input(system, chi_t), "z",
                            rng.uniform(0, 2 * np.pi))
        sched = protocol.AiqmSchedule(n=1, k=7, period=p.period)
        out = protocol.accumulate_aiqm(state, p, sched, "effective")
        assert spin.fidelity(out, state) > 1 - 1e-3


def test_aiqm_trotter_error_scaling():
    """The deviation from the collapsed signal evolution is second order in
    the block length: halving nT divides the fidelity deficit by about 4."""
    system = spin.SpinSystem(100)
    omega_m = 2 * np.pi * 20 * 100
    p = cancellation_params(delta=1.0, omega_m=omega_m)
    t_signal = 0.008
    state = spin.oat_squeezed_input(system, 0.03)
    target = spin.StateVector(
        system, np.exp(-1j * p.k0 * p.delta * system.m_values * t_signal)
        * state.amplitudes)
    deficits = []
    for n, k in ((8, 1), (4, 2), (2, 4)):
        sched = protocol.AiqmSchedule(n=n, k=k, period=p.period)
        assert sched.t_signal == pytest.approx(t_signal, rel=1e-12)
        out = protocol.accumulate_aiqm(state, p, sched, "effective")
        deficits.append(1.0 - spin.fidelity(out, target))
    for coarse, fine in zip(deficits, deficits[1:]):
        assert 3.2 < coarse / fine < 5.2


def test_accumulate_bare_phase_only_limits():
    system = spin.SpinSystem(14)
    state = spin.coherent_state(system, np.pi / 2, 0.3)
    out = protocol.accumulate_bare(state, 0.0, 2.0, 0.7)
    expected = np.exp(-1j * 2.0 * system.m_values * 0.7) * state.amplitudes
    assert np.abs(out.amplitudes - expected).max() < 1e-12
    frozen = protocol.accumulate_bare(state, 1.3, 0.4, 0.0)
    assert np.array_equal(frozen.amplitudes, state.amplitudes)


def test_bare_uncertainty_exceeds_alternation():
    cfg = protocol.RamseyConfig(mode=protocol.SimulationMode.EFFECTIVE)
    eff = protocol.run_fig2_protocol(cfg)
    bare = protocol.run_fig2_protocol(
        protocol.RamseyConfig(mode=protocol.SimulationMode.BARE))
    assert bare.jz_std > eff.jz_std


def test_fulldrive_matches_effective_small_system():
    base = dict(n_particles=40, chi=1.0, delta=1.0, t_signal=0.01)
    full = protocol.run_fig2_protocol(
        protocol.RamseyConfig(mode=protocol.SimulationMode.FULL_DRIVE, **base))
    eff = protocol.run_fig2_protocol(
        protocol.RamseyConfig(mode=protocol.SimulationMode.EFFECTIVE, **base))
    assert full.jz_mean == pytest.approx(eff.jz_mean, rel=0.02)
    assert full.jz_std == pytest.approx(eff.jz_std, rel=0.02)
    assert full.delta_omega0 == pytest.approx(eff.delta_omega0, rel=0.02)


def test_ramsey_time_resource_scaling():
    values = []
    for chi_t in np.linspace(0.01, 0.1, 5):
        cfg = protocol.RamseyConfig(mode=protocol.SimulationMode.EFFECTIVE,
                                    t_signal=chi_t)
        res = protocol.run_fig2_protocol(cfg)
        values.append(res.delta_omega0 * chi_t)
    spread = (max(values) - min(values)) / np.mean(values)
    assert spread < 0.05


def test_run_signal_model_pipeline():
    system = spin.SpinSystem(50)
    cfg = protocol.RamseyConfig(n_particles=50)
    p = cancellation_params(omega_m=2 * np.pi * 20 * 50)

    def h_of(delta):
        return floquet.h_signal_eff(p.with_(delta=delta), system).hamiltonian

    res = protocol.run_signal_model(cfg, h_of)
    direct = protocol.run_fig2_protocol(
        protocol.RamseyConfig(n_particles=50, mode=protocol.SimulationMode.EFFECTIVE))
    assert res.delta_omega0 == pytest.approx(direct.delta_omega0, rel=1e-9)


def test_full_stage_readout_reverses_preparation():
    """With no signal window the echo undoes the twist: the measured mean
    matches an interaction-free run through the same rotations."""
    t_en = 3 * np.log(120) / 120
    with_twist = protocol.full_stage_states(
        protocol.FullStageConfig(n_particles=60, t_signal=0.0,
                                 mode=protocol.SimulationMode.EFFECTIVE))
    without = protocol.full_stage_states(
        protocol.FullStageConfig(n_particles=60, chi=0.0, t_entangle=t_en,
                                 t_signal=0.0, omega_m=2 * np.pi * 6000.0,
                                 mode=protocol.SimulationMode.EFFECTIVE))
    jz = spin.SpinSystem(60).jz
    mean_twist = spin.expectation(with_twist[-1][1], jz)
    mean_plain = spin.expectation(without[-1][1], jz)
    assert abs(mean_twist - mean_plain) < 1e-6


def test_full_stage_checkpoints_and_plan():
    cfg = protocol.FullStageConfig(n_particles=30, t_signal=0.01,
                                   mode=protocol.SimulationMode.FULL_DRIVE,
                                   omega_m_factor=100.0)
    plan = protocol.plan_full_stage(cfg)
    period = 2 * np.pi / cfg.resolved_omega_m()
    assert plan.periods_entangle == round(cfg.resolved_t_entangle() / period)
    assert plan.t_entangle == pytest.approx(plan.periods_entangle * period, rel=1e-12)
    assert plan.t_signal == pytest.approx(2 * plan.periods_signal_cycles * period,
                                          rel=1e-12)
    states = protocol.full_stage_states(cfg)
    assert [name for name, _ in states] == ["initial", "entangled", "encoded",
                                            "readout", "final"]
    for _, state in states:
        assert abs(state.norm() - 1.0) < 1e-9


def test_full_stage_swap_convention_flips_twist_sign():
    base = protocol.FullStageConfig(n_particles=24, t_signal=0.0,
                                    mode=protocol.SimulationMode.EFFECTIVE)
    swapped = protocol.FullStageConfig(n_particles=24, t_signal=0.0,
                                       mode=protocol.SimulationMode.EFFECTIVE,
                                       swap_drive_roles=True)
    ent_a = dict(protocol.full_stage_states(base))["entangled"]
    ent_b = dict(protocol.full_stage_states(swapped))["entangled"]
    # complex-conjugate pair in the Dicke basis, not the same state
    assert np.abs(ent_a.amplitudes - ent_b.amplitudes.conj()).max() < 1e-10
    assert spin.fidelity(ent_a, ent_b) < 0.999


def test_full_stage_precision_beats_sql_effective():
    res = protocol.run_full_stage_protocol(protocol.FullStageConfig())
    assert res.beats_sql()
    assert res.slope != 0.0


def test_encode_axis_identity():
    system = spin.SpinSystem(20)
    p = cancellation_params(omega_m=2 * np.pi * 20 * 20)
    t_signal = 0.05 / p.k0   # encoded phase delta_eff * t = 0.05
    lhs, rhs = protocol.encode_axis_check(t_signal, p, system)
    assert np.abs(lhs.matrix - rhs.matrix).max() < 1e-10

    lhs0, rhs0 = protocol.encode_axis_check(0.0, p, system)
    eye = np.eye(system.dim)
    assert np.abs(lhs0.matrix - eye).max() < 1e-12
    assert np.abs(rhs0.matrix - eye).max() < 1e-12

    lhs_d0, rhs_d0 = protocol.encode_axis_check(0.3, p.with_(delta=0.0), system)
    assert np.abs(lhs_d0.matrix - eye).max() < 1e-12
    assert np.abs(rhs_d0.matrix - eye).max() < 1e-12


def test_plain_ramsey_saturates_sql():
    res = protocol.run_plain_ramsey(n_particles=80, delta=1.0, t_signal=0.02)
    assert res.delta_omega0 == pytest.approx(res.sql, rel=1e-6)


def test_slopes_are_finite_at_operating_points():
    for mode in (protocol.SimulationMode.EFFECTIVE, protocol.SimulationMode.BARE):
        res = protocol.run_fig2_protocol(protocol.RamseyConfig(n_particles=60,
                                                               mode=mode))
        assert abs(res.slope) > 0.0

"""Simulator for entanglement-enhanced metrology under alternating
in-phase/quadrature drive modulation of a one-axis-twisting spin ensemble."""

from ._version import __version__
from .spin import (HusimiMap, SpinOperator, SpinSystem, SqueezedInputParams,
                   StateVector, build_spin_operators, coherent_state, dicke_state,
                   expectation, fidelity, husimi_q, oat_squeezed_input, rotate,
                   variance)
from .dynamics import (PropagationConfig, TimeDependentHamiltonian, evolve_static,
                       evolve_timedep, propagator_static, propagator_timedep)
from .floquet import (DriveParams, EffectiveModel, h_eff_phase, h_eff_ratio,
                      h_entangle_eff, h_floquet_general, h_inphase_eff,
                      h_quadrature_eff, h_readout_eff, h_rotating,
                      rotating_hamiltonian_fn, solve_drive_ratio)
from .metrology import (NoiseModel, PrecisionResult, ScalingFit,
                        apply_detection_noise, estimate_precision, fit_scaling,
                        gaussian_smeared_moments, reference_limits)
from .protocol import (AiqmSchedule, FullStageConfig, RamseyConfig, SimulationMode,
                       StagePlan, accumulate_aiqm, accumulate_bare,
                       encode_axis_check, full_stage_states, plan_full_stage,
                       run_fig2_protocol, run_full_stage_protocol,
                       run_plain_ramsey, run_signal_model)
from .experiments import (ExperimentConfig, PhysicsConfig, ResultTable, SweepConfig,
                          husimi_checkpoint_tables, list_presets, preset_config,
                          run_experiment, validate_config)

__all__ = [name for name in dir() if not name.startswith("_")]

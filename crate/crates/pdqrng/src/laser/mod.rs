//! Gain-switched semiconductor laser model: rate equations, drive
//! waveforms, phase-diffusion accounting, steady-state analysis, detector
//! filtering, pulse metrology, and parameter fitting.

pub mod drive;
pub mod filter;
pub mod fit;
pub mod integrate;
pub mod params;
pub mod phase;
pub mod pulse;
pub mod steady;

pub use drive::{DriveWaveform, DutyShape};
pub use filter::{filter_time_constant, low_pass_filter};
pub use fit::{fit_parameters, verify_envelope, FitReport, FitSettings, ReferenceTrace};
pub use integrate::{integrate_rate_equations, Trajectory, PHOTON_FLOOR};
pub use params::LaserParams;
pub use phase::{accumulate_phase_variance, phase_variance_profile, sample_pulse_phases};
pub use pulse::{pulse_metrics, tail_window, PulseMetrics};
pub use steady::{steady_state_near_threshold, steady_state_operating_point, SteadyState};

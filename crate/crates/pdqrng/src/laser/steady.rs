//! Steady-state solutions of the rate equations, in both directions:
//! extracting (n_th, R0) from a threshold measurement, and solving for the
//! operating point (s, n) at a constant current.
//!
//! At steady state with n ≈ n_th the equations reduce to
//!   R_sp = γ·(1 − 1/√(1+s/s_sat))·s                    (photon balance)
//!   I/q  = γ_e·n_th + γ·s/√(1+s/s_sat)                 (carrier balance)

use super::params::LaserParams;
use crate::error::Error;

#[derive(Debug, Clone, Copy)]
pub struct SteadyState {
    /// I_th': measured threshold-region bias, A
    pub current: f64,
    /// s_th': intracavity photons implied by the measured power
    pub photons: f64,
    /// measured detected power, W
    pub measured_power: f64,
    /// extracted n_th
    pub carriers_threshold: f64,
    /// extracted R0
    pub spont_coupling: f64,
}

impl SteadyState {
    /// Relative residuals of the two balance equations; both vanish for a
    /// consistent extraction.
    pub fn residuals(&self, params: &LaserParams) -> (f64, f64) {
        let s = self.photons;
        let compression = (1.0 + s / params.photon_saturation).sqrt();
        let rsp = self.carriers_threshold * params.carrier_decay * self.spont_coupling;
        let photon_balance = params.cavity_decay * (1.0 - 1.0 / compression) * s;
        let r_photon = (rsp - photon_balance) / rsp.abs().max(f64::MIN_POSITIVE);
        let injected = self.current / params.electron_charge;
        let consumed =
            params.carrier_decay * self.carriers_threshold + params.cavity_decay * s / compression;
        let r_carrier = (injected - consumed) / injected.abs().max(f64::MIN_POSITIVE);
        (r_photon, r_carrier)
    }
}

/// Extract (n_th, R0) from a bias current and the power it emits near
/// threshold. The measured power converts to photons through the explicit
/// conversion factor in `params` (logged by callers; the extraction is
/// sensitive to it).
pub fn steady_state_near_threshold(
    current: f64,
    measured_power: f64,
    params: &LaserParams,
) -> Result<SteadyState, Error> {
    if !(measured_power > 0.0) || !(current > 0.0) {
        return Err(Error::Validation(format!(
            "need positive current/power, got {current} A, {measured_power} W"
        )));
    }
    let s = measured_power / params.watts_per_photon();
    let compression = (1.0 + s / params.photon_saturation).sqrt();
    let injected = current / params.electron_charge;
    let n_th = (injected - params.cavity_decay * s / compression) / params.carrier_decay;
    if !(n_th > 0.0) {
        return Err(Error::NoRoot {
            lo: 0.0,
            hi: injected / params.carrier_decay,
        });
    }
    let r0 = params.cavity_decay * (1.0 - 1.0 / compression) * s / (params.carrier_decay * n_th);
    Ok(SteadyState {
        current,
        photons: s,
        measured_power,
        carriers_threshold: n_th,
        spont_coupling: r0,
    })
}

/// Forward steady state: photon and carrier numbers at a constant current,
/// found by eliminating n and bisecting the carrier-balance residual in s.
pub fn steady_state_operating_point(
    params: &LaserParams,
    current: f64,
) -> Result<(f64, f64), Error> {
    params.validate()?;
    if !(current > 0.0) {
        return Err(Error::Validation(format!(
            "need positive current, got {current}"
        )));
    }
    // photon balance solved for n at given s
    let n_of_s = |s: f64| {
        let compression = (1.0 + s / params.photon_saturation).sqrt();
        let gain_slope = params.gain_per_carrier / compression;
        (params.cavity_decay * s + gain_slope * params.carriers_transparency * s)
            / (gain_slope * s + params.carrier_decay * params.spont_coupling)
    };
    let residual = |s: f64| {
        let n = n_of_s(s);
        let compression = (1.0 + s / params.photon_saturation).sqrt();
        current / params.electron_charge
            - params.carrier_decay * n
            - params.gain_per_carrier * (n - params.carriers_transparency) * s / compression
    };
    let mut lo = 0.0;
    let mut hi = 1.0;
    // residual(0) = I/q > 0; expand until the residual turns negative
    while residual(hi) > 0.0 {
        hi *= 4.0;
        if hi > 1e18 {
            return Err(Error::NoRoot { lo, hi });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if residual(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = 0.5 * (lo + hi);
    Ok((s, n_of_s(s)))
}

//! Fixed-step RK4 integration of the photon/carrier rate equations:
//!
//!   ds/dt = G_N[(n−n0)/√(1+s/s_sat) − (n_th−n0)]·s + R_sp
//!   dn/dt = I(t)/q − γ_e·n − G_N(n−n0)·s/√(1+s/s_sat)
//!
//! with R_sp = n·γ_e·R0 and G_N(n_th−n0) = γ.

use super::drive::DriveWaveform;
use super::params::LaserParams;
use super::phase::phase_variance_profile;
use crate::error::Error;

/// Smallest photon number used in 1/s denominators: the cavity is never
/// emptier than vacuum-level fluctuation, and flooring s only reduces the
/// claimed phase diffusion, keeping the bound conservative.
pub const PHOTON_FLOOR: f64 = 1.0;

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub dt: f64,
    /// s
    pub times: Vec<f64>,
    /// intracavity photon number s(t)
    pub photons: Vec<f64>,
    /// carrier number n(t)
    pub carriers: Vec<f64>,
    /// R_sp(t) = n·γ_e·R0, 1/s
    pub spont_rate: Vec<f64>,
    /// accumulated phase variance ⟨Δθ²⟩ from t=0, rad², non-decreasing
    pub phase_variance: Vec<f64>,
    /// detected power, W
    pub output_power: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn duration(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }
}

#[inline]
fn derivatives(p: &LaserParams, current: f64, s: f64, n: f64) -> (f64, f64) {
    let compression = (1.0 + s / p.photon_saturation).sqrt();
    let net = p.gain_per_carrier
        * ((n - p.carriers_transparency) / compression
            - (p.carriers_threshold - p.carriers_transparency));
    let ds = net * s + p.spontaneous_rate(n);
    let dn = current / p.electron_charge
        - p.carrier_decay * n
        - p.gain_per_carrier * (n - p.carriers_transparency) * s / compression;
    (ds, dn)
}

pub fn integrate_rate_equations(
    params: &LaserParams,
    drive: &DriveWaveform,
    s_init: f64,
    n_init: f64,
) -> Result<Trajectory, Error> {
    params.validate()?;
    drive.validate()?;
    if s_init < 0.0 || n_init < 0.0 {
        return Err(Error::Validation(
            "initial photon/carrier numbers must be >= 0".into(),
        ));
    }
    let dt = drive.dt;
    let steps = drive.steps();
    let mut photons = Vec::with_capacity(steps + 1);
    let mut carriers = Vec::with_capacity(steps + 1);
    let mut times = Vec::with_capacity(steps + 1);
    photons.push(s_init);
    carriers.push(n_init);
    times.push(0.0);

    let mut s = s_init;
    let mut n = n_init;
    for i in 0..steps {
        let t = i as f64 * dt;
        let (k1s, k1n) = derivatives(params, drive.current(t), s, n);
        let i_mid = drive.current(t + dt / 2.0);
        let (k2s, k2n) = derivatives(params, i_mid, s + dt / 2.0 * k1s, n + dt / 2.0 * k1n);
        let (k3s, k3n) = derivatives(params, i_mid, s + dt / 2.0 * k2s, n + dt / 2.0 * k2n);
        let (k4s, k4n) = derivatives(params, drive.current(t + dt), s + dt * k3s, n + dt * k3n);
        let s_next = s + dt / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
        let n_next = n + dt / 6.0 * (k1n + 2.0 * k2n + 2.0 * k3n + k4n);
        // finiteness checked before clamping: max() would mask a NaN as 0
        if !s_next.is_finite() || !n_next.is_finite() {
            return Err(Error::IntegrationDiverged { time_s: t + dt });
        }
        s = s_next.max(0.0);
        n = n_next.max(0.0);
        photons.push(s);
        carriers.push(n);
        times.push((i + 1) as f64 * dt);
    }

    let spont_rate: Vec<f64> = carriers
        .iter()
        .map(|&n| params.spontaneous_rate(n))
        .collect();
    let phase_variance = phase_variance_profile(
        dt,
        &photons,
        &spont_rate,
        params.linewidth_enhancement,
        PHOTON_FLOOR,
    );
    let wpp = params.watts_per_photon();
    let output_power: Vec<f64> = photons.iter().map(|&s| wpp * s).collect();

    Ok(Trajectory {
        dt,
        times,
        photons,
        carriers,
        spont_rate,
        phase_variance,
        output_power,
    })
}

//! Recursive parameter extraction against an observed filtered power trace.
//!
//! For every (cavity length, s_sat) candidate: derive the cavity decay from
//! geometry, extract (n_th, R0) from the threshold measurement, then find
//! the largest gain G_N whose simulated filtered trace stays at or above the
//! observed trace at every sample (the conservative envelope constraint).
//! The candidate minimizing the RMS deviation wins.

use super::drive::DriveWaveform;
use super::filter::low_pass_filter;
use super::integrate::integrate_rate_equations;
use super::params::LaserParams;
use super::pulse::tail_window;
use super::steady::steady_state_near_threshold;
use crate::error::Error;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct ReferenceTrace {
    pub times: Vec<f64>,
    pub powers: Vec<f64>,
}

impl ReferenceTrace {
    pub fn validate(&self, period: f64) -> Result<(), Error> {
        if self.times.len() != self.powers.len() || self.times.len() < 16 {
            return Err(Error::Validation(format!(
                "reference trace needs >= 16 matching samples, got {}/{}",
                self.times.len(),
                self.powers.len()
            )));
        }
        for w in self.times.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Validation("reference times must increase".into()));
            }
        }
        if self.powers.iter().any(|p| !p.is_finite()) {
            return Err(Error::Validation("reference powers must be finite".into()));
        }
        let span = self.times.last().unwrap() - self.times[0];
        if span < 2.0 * period * (1.0 - 1e-6) {
            return Err(Error::Validation(format!(
                "reference trace spans {span} s, needs >= 2 drive periods ({} s)",
                2.0 * period
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct FitSettings {
    /// candidate cavity lengths, m
    pub cavity_lengths: Vec<f64>,
    /// log-spaced photon-saturation scan bounds and point count; the
    /// initial s_sat is always included as an extra candidate
    pub s_sat_bounds: (f64, f64),
    pub s_sat_points: usize,
    /// threshold-region observables feeding the (n_th, R0) extraction
    pub threshold_current: f64,
    pub threshold_power: f64,
    /// periods discarded before comparing, and integrator step for fit runs
    pub warmup_periods: usize,
    pub dt: f64,
    /// detector model applied to simulated power before comparison, Hz
    pub detector_bandwidth: f64,
}

impl Default for FitSettings {
    fn default() -> Self {
        FitSettings {
            cavity_lengths: vec![100e-6, 200e-6, 500e-6, 1000e-6],
            s_sat_bounds: (1e4, 1e7),
            s_sat_points: 30,
            threshold_current: 10e-3,
            threshold_power: 0.3e-3,
            warmup_periods: 10,
            dt: 1e-13,
            detector_bandwidth: 12.5e9,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub params: LaserParams,
    /// RMS deviation of the winning candidate at its maximal gain, W
    pub rms: f64,
    /// candidates evaluated / found infeasible
    pub evaluated: usize,
    pub infeasible: usize,
    pub provenance: BTreeMap<String, String>,
}

struct CandidateFit {
    params: LaserParams,
    gain: f64,
    rms: f64,
}

/// Simulated filtered power over the final drive period, as a periodic
/// lookup table.
struct PeriodicTrace {
    dt: f64,
    period: f64,
    samples: Vec<f64>,
}

impl PeriodicTrace {
    fn at(&self, t: f64) -> f64 {
        let x = t.rem_euclid(self.period) / self.dt;
        let i = x.floor() as usize;
        let frac = x - i as f64;
        let a = self.samples[i.min(self.samples.len() - 1)];
        let b = self.samples[(i + 1).min(self.samples.len() - 1)];
        a + frac * (b - a)
    }
}

fn simulate_period(
    params: &LaserParams,
    drive: &DriveWaveform,
    settings: &FitSettings,
) -> Result<PeriodicTrace, Error> {
    let period = drive.period();
    let mut fit_drive = drive.clone();
    fit_drive.dt = settings.dt;
    fit_drive.duration = (settings.warmup_periods as f64 + 1.0) * period;
    let traj = integrate_rate_equations(params, &fit_drive, 1000.0, 5e7)?;
    let filtered = low_pass_filter(&traj.output_power, settings.dt, settings.detector_bandwidth)?;
    let (start, end) = tail_window(filtered.len(), settings.dt, period)?;
    Ok(PeriodicTrace {
        dt: settings.dt,
        period,
        samples: filtered[start..=end].to_vec(),
    })
}

/// Best-case envelope margin of a simulated period against the observed
/// trace over all cyclic time shifts, plus the smallest RMS among shifts
/// that satisfy the envelope.
fn align(sim: &PeriodicTrace, observed: &ReferenceTrace, shifts: usize) -> (f64, Option<f64>) {
    let t0 = observed.times[0];
    let mut best_margin = f64::NEG_INFINITY;
    let mut best_rms: Option<f64> = None;
    for k in 0..shifts {
        let tau = k as f64 / shifts as f64 * sim.period;
        let mut margin = f64::INFINITY;
        let mut sq = 0.0;
        for (t, &p) in observed.times.iter().zip(&observed.powers) {
            let v = sim.at(t - t0 + tau);
            margin = margin.min(v - p);
            let d = v - p;
            sq += d * d;
        }
        if margin > best_margin {
            best_margin = margin;
        }
        if margin >= 0.0 {
            let rms = (sq / observed.times.len() as f64).sqrt();
            if best_rms.is_none_or(|r| rms < r) {
                best_rms = Some(rms);
            }
        }
    }
    (best_margin, best_rms)
}

fn evaluate_candidate(
    length: f64,
    s_sat: f64,
    base: &LaserParams,
    drive: &DriveWaveform,
    observed: &ReferenceTrace,
    settings: &FitSettings,
    shifts: usize,
) -> Option<CandidateFit> {
    let mut geom = *base;
    geom.cavity_length = length;
    geom.photon_saturation = s_sat;
    let geom = geom.derive_consistent();
    let threshold =
        steady_state_near_threshold(settings.threshold_current, settings.threshold_power, &geom)
            .ok()?;
    if !(threshold.carriers_threshold > 0.0) || !(threshold.spont_coupling > 0.0) {
        return None;
    }
    let mut candidate = geom;
    candidate.carriers_threshold = threshold.carriers_threshold;
    candidate.spont_coupling = threshold.spont_coupling;

    let gain_floor = candidate.cavity_decay / candidate.carriers_threshold;
    let with_gain = |g: f64| {
        let mut p = candidate;
        p.gain_per_carrier = g;
        p.derive_consistent()
    };
    let margin_of = |g: f64| -> f64 {
        if g <= gain_floor {
            return f64::NEG_INFINITY;
        }
        match simulate_period(&with_gain(g), drive, settings) {
            Ok(sim) => align(&sim, observed, shifts).0,
            Err(_) => f64::NEG_INFINITY,
        }
    };

    // coarse scan for the most conservative region, then golden-section
    // refinement of the margin maximum
    let scan: Vec<f64> = (0..40)
        .map(|i| gain_floor * 1.05 * 300f64.powf(i as f64 / 39.0))
        .collect();
    let margins: Vec<f64> = scan.iter().map(|&g| margin_of(g)).collect();
    let i_best = margins
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())?
        .0;
    if margins[i_best] == f64::NEG_INFINITY {
        return None;
    }
    let mut a = scan[i_best.saturating_sub(1)];
    let mut b = scan[(i_best + 1).min(scan.len() - 1)];
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let mut f1 = margin_of(x1);
    let mut f2 = margin_of(x2);
    for _ in 0..20 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = margin_of(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = margin_of(x1);
        }
    }
    let g_peak = 0.5 * (a + b);
    if margin_of(g_peak) < 0.0 {
        return None; // no gain satisfies the envelope for this candidate
    }

    // the maximal conservative gain sits above the margin peak; bracket it
    let mut lo = g_peak;
    let mut hi = g_peak * 1.05;
    let mut guard = 0;
    while margin_of(hi) >= 0.0 {
        lo = hi;
        hi *= 1.05;
        guard += 1;
        if guard > 400 {
            break; // trivially conservative: any gain this large dominates
        }
    }
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if margin_of(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let gain = lo;
    let params = with_gain(gain);
    params.validate().ok()?;
    let sim = simulate_period(&params, drive, settings).ok()?;
    let (_, rms) = align(&sim, observed, shifts);
    rms.map(|rms| CandidateFit { params, gain, rms })
}

pub fn fit_parameters(
    observed: &ReferenceTrace,
    base: &LaserParams,
    drive: &DriveWaveform,
    settings: &FitSettings,
) -> Result<FitReport, Error> {
    let period = drive.period();
    observed.validate(period)?;
    if settings.cavity_lengths.is_empty() {
        return Err(Error::Validation(
            "need at least one candidate cavity length".into(),
        ));
    }
    if settings.s_sat_points < 2 || settings.s_sat_bounds.0 <= 0.0 {
        return Err(Error::Validation("need a positive s_sat grid".into()));
    }

    let mut s_sats: Vec<f64> = (0..settings.s_sat_points)
        .map(|i| {
            let f = i as f64 / (settings.s_sat_points - 1) as f64;
            settings.s_sat_bounds.0 * (settings.s_sat_bounds.1 / settings.s_sat_bounds.0).powf(f)
        })
        .collect();
    s_sats.push(base.photon_saturation);

    // shift grid at roughly the observed sampling resolution
    let obs_step =
        (observed.times.last().unwrap() - observed.times[0]) / (observed.times.len() - 1) as f64;
    let shifts = ((period / obs_step).round() as usize).clamp(64, 4096);

    let grid: Vec<(f64, f64)> = settings
        .cavity_lengths
        .iter()
        .flat_map(|&l| s_sats.iter().map(move |&s| (l, s)))
        .collect();

    let results: Vec<Option<CandidateFit>> = grid
        .par_iter()
        .map(|&(l, s)| evaluate_candidate(l, s, base, drive, observed, settings, shifts))
        .collect();

    let evaluated = grid.len();
    let infeasible = results.iter().filter(|r| r.is_none()).count();
    let best = results
        .into_iter()
        .flatten()
        .min_by(|a, b| a.rms.partial_cmp(&b.rms).unwrap())
        .ok_or_else(|| {
            Error::InfeasibleFit(format!(
                "no (cavity_length, s_sat, G_N) candidate keeps the simulated power above \
                 the observed trace ({evaluated} candidates tried)"
            ))
        })?;

    let mut provenance = BTreeMap::new();
    provenance.insert(
        "cavity_length".into(),
        format!(
            "selected from {:?} m by minimum RMS deviation",
            settings.cavity_lengths
        ),
    );
    provenance.insert(
        "photon_saturation".into(),
        format!(
            "selected from log grid [{:.3e}, {:.3e}] x {} plus initial {:.3e}",
            settings.s_sat_bounds.0,
            settings.s_sat_bounds.1,
            settings.s_sat_points,
            base.photon_saturation
        ),
    );
    provenance.insert(
        "carriers_threshold".into(),
        format!(
            "near-threshold extraction at I' = {} A, P' = {} W, conversion {:.6e} W/photon",
            settings.threshold_current,
            settings.threshold_power,
            best.params.watts_per_photon()
        ),
    );
    provenance.insert(
        "spont_coupling".into(),
        "near-threshold extraction (photon balance at threshold)".into(),
    );
    provenance.insert(
        "gain_per_carrier".into(),
        format!(
            "maximal gain keeping simulated filtered power >= observed everywhere: {:.6e}",
            best.gain
        ),
    );
    provenance.insert(
        "carriers_transparency".into(),
        "derived: n_th - cavity_decay/gain_per_carrier".into(),
    );
    provenance.insert("mirror_loss".into(), "derived: 1.4/cavity_length".into());
    provenance.insert(
        "cavity_decay".into(),
        "derived: c(mirror_loss + scatter_loss)/effective_index".into(),
    );

    Ok(FitReport {
        params: best.params,
        rms: best.rms,
        evaluated,
        infeasible,
        provenance,
    })
}

/// Envelope check used by fit-verification mode: simulate with the given
/// parameters and report the best cyclic-alignment margin and RMS against
/// the observed trace.
pub fn verify_envelope(
    params: &LaserParams,
    observed: &ReferenceTrace,
    drive: &DriveWaveform,
    settings: &FitSettings,
) -> Result<(f64, f64), Error> {
    observed.validate(drive.period())?;
    let sim = simulate_period(params, drive, settings)?;
    let obs_step =
        (observed.times.last().unwrap() - observed.times[0]) / (observed.times.len() - 1) as f64;
    let shifts = ((drive.period() / obs_step).round() as usize).clamp(64, 4096);
    let (margin, rms) = align(&sim, observed, shifts);
    match rms {
        Some(rms) => Ok((margin, rms)),
        None => Err(Error::InfeasibleFit(format!(
            "simulated power dips {:.3e} W below the observed trace",
            -margin
        ))),
    }
}

//! Unbalanced Mach-Zehnder interference of successive pulses, detection
//! noise, and ADC digitization.
//!
//! The pipeline represents each optical pulse by a single power scalar per
//! arm (one sampled point per pulse, as a triggered oscilloscope records).
//! Interference of pulse j with delayed pulse j−1 produces
//!
//!   u_out = u₁ + u₂ + 2|g|√(u₁u₂)·cos(θ_j − θ_{j−1} + Δφ) + u_noise
//!
//! with the fringe visibility |g| absorbing decoherence and mode mismatch.

use crate::error::Error;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct InterferometerConfig {
    /// field transmission coefficients of the input coupler
    pub coupler1: (f64, f64),
    /// field transmission coefficients of the output coupler
    pub coupler2: (f64, f64),
    /// short-arm delay, s
    pub arm_delay1: f64,
    /// long-arm delay, s
    pub arm_delay2: f64,
    /// static interferometer phase Δφ, rad
    pub static_phase: f64,
    /// fringe visibility |g| in [0, 1]
    pub visibility: f64,
    /// detector bandwidth, Hz
    pub detector_bandwidth: f64,
    /// mean power reaching the detector through arm 1, W
    pub mean_u1: f64,
    /// mean power reaching the detector through arm 2, W
    pub mean_u2: f64,
    /// pulse-to-pulse standard deviation of each arm power, W
    pub arm_sigma: f64,
}

impl InterferometerConfig {
    pub fn validate(&self) -> Result<(), Error> {
        for (name, (e1, e2)) in [("coupler1", self.coupler1), ("coupler2", self.coupler2)] {
            let total = e1 * e1 + e2 * e2;
            if total > 1.0 + 1e-12 {
                return Err(Error::Validation(format!(
                    "{name} gain: |e1|^2 + |e2|^2 = {total} > 1"
                )));
            }
        }
        if !(0.0..=1.0).contains(&self.visibility) {
            return Err(Error::Validation(format!(
                "visibility {} outside [0,1]",
                self.visibility
            )));
        }
        if self.mean_u1 <= 0.0 || self.mean_u2 <= 0.0 || self.arm_sigma < 0.0 {
            return Err(Error::Validation(
                "arm power statistics must be positive".into(),
            ));
        }
        if self.detector_bandwidth <= 0.0 {
            return Err(Error::Validation(
                "detector bandwidth must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Interfering pulse j with pulse j−1 requires the arm imbalance to
    /// equal the pulse period.
    pub fn delay_matches_prf(&self, prf: f64) -> bool {
        let imbalance = self.arm_delay2 - self.arm_delay1;
        (imbalance - 1.0 / prf).abs() <= 1e-3 / prf
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AdcConfig {
    /// resolution b in bits
    pub resolution_bits: u32,
    /// dynamic range A, W
    pub range: f64,
    /// detection + digitization noise variance, W²
    pub noise_variance: f64,
    /// sampling instant relative to the detected pulse peak, s
    pub sample_offset: f64,
}

impl AdcConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.resolution_bits < 1 || self.resolution_bits > 16 {
            return Err(Error::Validation(format!(
                "ADC resolution must be 1..=16 bits, got {}",
                self.resolution_bits
            )));
        }
        if self.range <= 0.0 || self.noise_variance < 0.0 {
            return Err(Error::Validation("ADC range/noise out of range".into()));
        }
        Ok(())
    }

    pub fn bin_width(&self) -> f64 {
        self.range / (1u64 << self.resolution_bits) as f64
    }

    pub fn max_code(&self) -> u16 {
        ((1u64 << self.resolution_bits) - 1) as u16
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PulseRecord {
    pub index: u64,
    pub u1: f64,
    pub u2: f64,
    pub theta: f64,
    pub u_out: f64,
    pub noise: f64,
}

/// Deterministic core of the interference: noise values are supplied per
/// pulse. Record j (j ≥ 1) interferes pulse j with pulse j−1 through the
/// delayed arm; pulse 0 has no predecessor and produces no record.
pub fn interfere_with_noise(
    u1_seq: &[f64],
    u2_seq: &[f64],
    phases: &[f64],
    cfg: &InterferometerConfig,
    noise: &[f64],
    first_index: u64,
) -> Result<Vec<PulseRecord>, Error> {
    let n = u1_seq.len();
    if u2_seq.len() != n || phases.len() != n || noise.len() != n {
        return Err(Error::Validation(format!(
            "pulse train length mismatch: u1 {} u2 {} phases {} noise {}",
            n,
            u2_seq.len(),
            phases.len(),
            noise.len()
        )));
    }
    if n < 2 {
        return Err(Error::Validation(
            "need at least 2 pulses to interfere".into(),
        ));
    }
    let g = cfg.visibility;
    let mut out = Vec::with_capacity(n - 1);
    for j in 1..n {
        let (u1, u2) = (u1_seq[j], u2_seq[j - 1]);
        let cos = (phases[j] - phases[j - 1] + cfg.static_phase).cos();
        let raw = u1 + u2 + 2.0 * g * (u1 * u2).sqrt() * cos + noise[j];
        out.push(PulseRecord {
            index: first_index + j as u64,
            u1,
            u2,
            theta: phases[j],
            // detected power is non-negative; clamping touches a negligible tail
            u_out: raw.max(0.0),
            noise: noise[j],
        });
    }
    Ok(out)
}

/// Convenience entry: draws the per-pulse detection noise internally.
pub fn interfere_pulse_train<R: Rng>(
    u1_seq: &[f64],
    u2_seq: &[f64],
    phases: &[f64],
    cfg: &InterferometerConfig,
    noise_variance: f64,
    rng: &mut R,
) -> Result<Vec<PulseRecord>, Error> {
    let dist = Normal::new(0.0, noise_variance.max(0.0).sqrt())
        .map_err(|e| Error::Validation(format!("noise distribution: {e}")))?;
    let noise: Vec<f64> = (0..u1_seq.len()).map(|_| dist.sample(rng)).collect();
    interfere_with_noise(u1_seq, u2_seq, phases, cfg, &noise, 0)
}

/// Independent Gaussian arm powers around the configured mean, clamped at 0.
pub fn generate_arm_powers<R: Rng>(count: usize, mean: f64, sigma: f64, rng: &mut R) -> Vec<f64> {
    let dist = Normal::new(mean, sigma).expect("valid arm distribution");
    (0..count).map(|_| dist.sample(rng).max(0.0)).collect()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct VisibilityEstimate {
    pub value: f64,
    /// raw estimate exceeded 1 and was clamped
    pub clamped: bool,
    /// variance decomposition left nothing for the interference term
    pub degenerate: bool,
}

/// Moment-based visibility estimator:
/// |g| = √( (var_out − var_u1 − var_u2 − var_noise) / (2·E[√u₁]²·E[√u₂]²) ).
///
/// `mean_sqrt_u1_sq` is E[√u₁]² taken directly as provided; at the measured
/// arm fluctuations it differs from E[u₁] only at the 10⁻³ level.
pub fn estimate_visibility(
    var_out: f64,
    var_u1: f64,
    var_u2: f64,
    var_noise: f64,
    mean_sqrt_u1_sq: f64,
    mean_sqrt_u2_sq: f64,
) -> Result<VisibilityEstimate, Error> {
    let denom = 2.0 * mean_sqrt_u1_sq * mean_sqrt_u2_sq;
    if denom <= 0.0 {
        return Err(Error::Validation(format!(
            "visibility denominator must be positive, got {denom}"
        )));
    }
    let numer = var_out - var_u1 - var_u2 - var_noise;
    if numer < 0.0 {
        return Ok(VisibilityEstimate {
            value: 0.0,
            clamped: false,
            degenerate: true,
        });
    }
    let raw = (numer / denom).sqrt();
    Ok(VisibilityEstimate {
        value: raw.min(1.0),
        clamped: raw > 1.0,
        degenerate: false,
    })
}

/// Map detected powers to ADC codes: floor(u/Δu) clamped to the rails.
pub fn sample_and_digitize(records: &[PulseRecord], adc: &AdcConfig) -> Vec<u16> {
    let du = adc.bin_width();
    let max = adc.max_code();
    records
        .iter()
        .map(|r| {
            let bin = (r.u_out / du).floor();
            if bin < 0.0 {
                0
            } else if bin >= max as f64 {
                max
            } else {
                bin as u16
            }
        })
        .collect()
}

/// Sample moments of a pulse-record batch, in the shape the visibility
/// estimator consumes. Noise variance is measured from the stored draws.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MeasuredStatistics {
    pub var_out: f64,
    pub var_u1: f64,
    pub var_u2: f64,
    pub var_noise: f64,
    pub mean_sqrt_u1_sq: f64,
    pub mean_sqrt_u2_sq: f64,
    pub count: usize,
}

/// Streaming moment accumulator so chunked generation never has to hold
/// every record in memory.
#[derive(Debug, Clone, Copy, Default)]
pub struct StatsAccumulator {
    n: u64,
    s_out: (f64, f64),
    s_u1: (f64, f64),
    s_u2: (f64, f64),
    s_noise: (f64, f64),
    sqrt_u1: f64,
    sqrt_u2: f64,
}

impl StatsAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, r: &PulseRecord) {
        self.n += 1;
        self.s_out.0 += r.u_out;
        self.s_out.1 += r.u_out * r.u_out;
        self.s_u1.0 += r.u1;
        self.s_u1.1 += r.u1 * r.u1;
        self.s_u2.0 += r.u2;
        self.s_u2.1 += r.u2 * r.u2;
        self.s_noise.0 += r.noise;
        self.s_noise.1 += r.noise * r.noise;
        self.sqrt_u1 += r.u1.sqrt();
        self.sqrt_u2 += r.u2.sqrt();
    }

    pub fn extend(&mut self, records: &[PulseRecord]) {
        for r in records {
            self.push(r);
        }
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn finalize(&self) -> Result<MeasuredStatistics, Error> {
        if self.n < 2 {
            return Err(Error::Validation(
                "need at least 2 records for statistics".into(),
            ));
        }
        let n = self.n as f64;
        let var = |s: (f64, f64)| (s.1 - s.0 * s.0 / n) / (n - 1.0);
        Ok(MeasuredStatistics {
            var_out: var(self.s_out),
            var_u1: var(self.s_u1),
            var_u2: var(self.s_u2),
            var_noise: var(self.s_noise),
            mean_sqrt_u1_sq: (self.sqrt_u1 / n).powi(2),
            mean_sqrt_u2_sq: (self.sqrt_u2 / n).powi(2),
            count: self.n as usize,
        })
    }
}

pub fn measure_statistics(records: &[PulseRecord]) -> Result<MeasuredStatistics, Error> {
    let mut acc = StatsAccumulator::new();
    acc.extend(records);
    acc.finalize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn cfg(g: f64) -> InterferometerConfig {
        InterferometerConfig {
            coupler1: (
                std::f64::consts::FRAC_1_SQRT_2,
                std::f64::consts::FRAC_1_SQRT_2,
            ),
            coupler2: (
                std::f64::consts::FRAC_1_SQRT_2,
                std::f64::consts::FRAC_1_SQRT_2,
            ),
            arm_delay1: 0.0,
            arm_delay2: 1.0 / 5.825e9,
            static_phase: 0.0,
            visibility: g,
            detector_bandwidth: 12.5e9,
            mean_u1: 0.97e-3,
            mean_u2: 0.90e-3,
            arm_sigma: 45e-6,
        }
    }

    #[test]
    fn constructive_interference() {
        let u = 1.0e-3;
        let records =
            interfere_with_noise(&[u, u], &[u, u], &[0.3, 0.3], &cfg(1.0), &[0.0, 0.0], 0).unwrap();
        assert_eq!(records.len(), 1);
        assert!((records[0].u_out - 4.0 * u).abs() < 1e-18);
    }

    #[test]
    fn zero_visibility_ignores_phase() {
        let records = interfere_with_noise(
            &[1e-3, 1e-3, 1e-3],
            &[2e-3, 2e-3, 2e-3],
            &[0.0, 1.0, 2.5],
            &cfg(0.0),
            &[0.0; 3],
            0,
        )
        .unwrap();
        for r in &records {
            assert!((r.u_out - 3e-3).abs() < 1e-18);
        }
    }

    #[test]
    fn length_mismatch_rejected() {
        let e = interfere_with_noise(&[1.0, 1.0], &[1.0], &[0.0, 0.0], &cfg(0.9), &[0.0; 2], 0);
        assert!(e.is_err());
    }

    #[test]
    fn variance_matches_arcsine_prediction() {
        // constant arms, uniform phase differences, no noise:
        // var(u_out) → span²/8 with span = 4|g|√(u1·u2)
        let n = 200_000;
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let u1 = vec![0.97e-3; n];
        let u2 = vec![0.90e-3; n];
        // independent uniform phases make θ_j − θ_{j-1} wrap uniformly
        let phases: Vec<f64> = (0..n)
            .map(|_| rng.gen_range(0.0..(2.0 * std::f64::consts::PI)))
            .collect();
        let c = cfg(0.9);
        let records = interfere_with_noise(&u1, &u2, &phases, &c, &vec![0.0; n], 0).unwrap();
        let stats = measure_statistics(&records).unwrap();
        let span = 4.0 * 0.9 * (0.97e-3_f64 * 0.90e-3).sqrt();
        let predicted = span * span / 8.0;
        // 3σ Monte Carlo band for the variance of the arcsine variance
        let tol = 3.0 * predicted * (2.0f64 / n as f64).sqrt() * 1.6;
        assert!(
            (stats.var_out - predicted).abs() < tol,
            "var {} vs predicted {predicted}",
            stats.var_out
        );
    }

    #[test]
    fn energy_bound_with_unit_visibility() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let n = 10_000;
        let u1 = generate_arm_powers(n, 0.97e-3, 45e-6, &mut rng);
        let u2 = generate_arm_powers(n, 0.90e-3, 45e-6, &mut rng);
        let phases: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let records = interfere_with_noise(&u1, &u2, &phases, &cfg(1.0), &vec![0.0; n], 0).unwrap();
        for r in &records {
            let lo = (r.u1.sqrt() - r.u2.sqrt()).powi(2);
            let hi = (r.u1.sqrt() + r.u2.sqrt()).powi(2);
            assert!(r.u_out >= lo - 1e-15 && r.u_out <= hi + 1e-15);
        }
    }

    #[test]
    fn phase_offset_invariance() {
        // shifting every θ_j by a constant leaves u_out unchanged pulse by pulse
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let n = 1000;
        let u1 = vec![1e-3; n];
        let u2 = vec![1e-3; n];
        let phases: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..20.0)).collect();
        let shifted: Vec<f64> = phases.iter().map(|p| p + 1.234).collect();
        let a = interfere_with_noise(&u1, &u2, &phases, &cfg(0.9), &vec![0.0; n], 0).unwrap();
        let b = interfere_with_noise(&u1, &u2, &shifted, &cfg(0.9), &vec![0.0; n], 0).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.u_out - y.u_out).abs() < 1e-15);
        }
    }

    #[test]
    fn visibility_reference_statistics() {
        // §6.1 numbers, in mW² and mW
        let est = estimate_visibility(1.4, 2.0e-3, 2.1e-3, 1.45e-4, 0.97, 0.90).unwrap();
        assert!((est.value - 0.90).abs() < 0.01, "got {}", est.value);
        assert!(!est.clamped && !est.degenerate);
    }

    #[test]
    fn visibility_degenerate_and_clamped() {
        let zero = estimate_visibility(4.245e-3, 2.0e-3, 2.1e-3, 1.45e-4, 0.97, 0.90).unwrap();
        assert_eq!(zero.value, 0.0);
        assert!(zero.degenerate);

        let big = estimate_visibility(10.0, 0.0, 0.0, 0.0, 0.97, 0.90).unwrap();
        assert_eq!(big.value, 1.0);
        assert!(big.clamped);
    }

    #[test]
    fn visibility_estimator_closes_the_loop() {
        // full generation via the pulse-train path, estimator applied to
        // measured moments recovers the configured |g|
        let n = 1_000_000;
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        let c = cfg(0.75);
        let u1 = generate_arm_powers(n, c.mean_u1, c.arm_sigma, &mut rng);
        let u2 = generate_arm_powers(n, c.mean_u2, c.arm_sigma, &mut rng);
        let theta_var = 9.45f64.powi(2);
        let phases: Vec<f64> = {
            use rand_distr::Distribution;
            let d = rand_distr::Normal::new(0.0, theta_var.sqrt()).unwrap();
            (0..n).map(|_| d.sample(&mut rng)).collect()
        };
        let records = interfere_pulse_train(&u1, &u2, &phases, &c, 1.45e-10, &mut rng).unwrap();
        let m = measure_statistics(&records).unwrap();
        let est = estimate_visibility(
            m.var_out,
            m.var_u1,
            m.var_u2,
            m.var_noise,
            m.mean_sqrt_u1_sq,
            m.mean_sqrt_u2_sq,
        )
        .unwrap();
        // dominant Monte Carlo error is var_out's: relative 3·√(2/n) on the
        // numerator maps to half that on |g|
        assert!(
            (est.value - 0.75).abs() < 0.75 * 3.0 * (2.0 / n as f64).sqrt(),
            "estimated {}",
            est.value
        );
    }

    #[test]
    fn digitize_rails_and_monotonicity() {
        let adc = AdcConfig {
            resolution_bits: 14,
            range: 5e-3,
            noise_variance: 0.0,
            sample_offset: 13e-12,
        };
        let mk = |u: f64| PulseRecord {
            index: 0,
            u1: 0.0,
            u2: 0.0,
            theta: 0.0,
            u_out: u,
            noise: 0.0,
        };
        let recs: Vec<PulseRecord> = [0.0, 1e-7, 2.5e-3, 4.999e-3, 5e-3, 1.0]
            .iter()
            .map(|&u| mk(u))
            .collect();
        let bins = sample_and_digitize(&recs, &adc);
        assert_eq!(bins[0], 0);
        assert_eq!(bins[4], 16383);
        assert_eq!(bins[5], 16383);
        for w in bins.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn coupler_validation() {
        let mut c = cfg(0.9);
        c.coupler1 = (0.9, 0.9);
        assert!(c.validate().is_err());
        c.coupler1 = (0.6, 0.6);
        assert!(c.validate().is_ok());
        assert!(c.delay_matches_prf(5.825e9));
    }
}

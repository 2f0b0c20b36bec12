//! Phase-diffusion variance bound and per-pulse phase sampling.
//!
//! Between pulses the optical phase diffuses with rate
//! d⟨Δθ²⟩/dt = R_sp(t)·(1+α²)/(2·s(t)); the trajectory carries its running
//! integral. Per-pulse phases are then independent zero-mean Gaussians with
//! the accumulated variance.

use super::integrate::Trajectory;
use crate::error::Error;
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// Cumulative trapezoid of the diffusion rate on the trajectory grid.
/// `floor` guards the 1/s singularity at a conservative one-photon level.
pub fn phase_variance_profile(
    dt: f64,
    photons: &[f64],
    spont_rate: &[f64],
    linewidth_enhancement: f64,
    floor: f64,
) -> Vec<f64> {
    let boost = 1.0 + linewidth_enhancement * linewidth_enhancement;
    let rate = |i: usize| spont_rate[i] * boost / (2.0 * photons[i].max(floor));
    let mut out = Vec::with_capacity(photons.len());
    let mut acc = 0.0;
    let mut prev = if photons.is_empty() { 0.0 } else { rate(0) };
    out.push(0.0);
    for i in 1..photons.len() {
        let r = rate(i);
        acc += dt * 0.5 * (prev + r);
        prev = r;
        out.push(acc);
    }
    out
}

/// Accumulated ⟨Δθ²⟩ over [t_start, t_end], read from the trajectory's
/// cumulative profile with linear interpolation at the endpoints. Interval
/// additivity holds to rounding because the result is a difference of the
/// same profile.
pub fn accumulate_phase_variance(
    traj: &Trajectory,
    t_start: f64,
    t_end: f64,
) -> Result<f64, Error> {
    if !(t_start < t_end) {
        return Err(Error::Validation(format!(
            "need t_start < t_end, got [{t_start}, {t_end}]"
        )));
    }
    if t_start < 0.0 || t_end > traj.duration() + 1e-12 * traj.dt {
        return Err(Error::Validation(format!(
            "[{t_start}, {t_end}] outside trajectory range [0, {}]",
            traj.duration()
        )));
    }
    Ok(profile_at(traj, t_end) - profile_at(traj, t_start))
}

fn profile_at(traj: &Trajectory, t: f64) -> f64 {
    let x = (t / traj.dt).clamp(0.0, (traj.len() - 1) as f64);
    let i = (x.floor() as usize).min(traj.len() - 2);
    let frac = x - i as f64;
    traj.phase_variance[i] + frac * (traj.phase_variance[i + 1] - traj.phase_variance[i])
}

/// N independent zero-mean Gaussian phases of the given variance. With the
/// variances this pipeline certifies (> (2π)² rad²) the wrapped phase is
/// uniform to < 1e-8, so successive-pulse phase differences are uniform too.
pub fn sample_pulse_phases<R: Rng>(
    variance: f64,
    count: usize,
    rng: &mut R,
) -> Result<Vec<f64>, Error> {
    if !(variance > 0.0) {
        return Err(Error::Validation(format!(
            "phase variance must be positive, got {variance}"
        )));
    }
    let dist = Normal::new(0.0, variance.sqrt())
        .map_err(|e| Error::Validation(format!("phase distribution: {e}")))?;
    Ok((0..count).map(|_| dist.sample(rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedSchedule;
    use crate::stats::ks_statistic;

    /// Trajectory with hand-set columns for quadrature tests.
    fn synthetic(dt: f64, photons: Vec<f64>, spont: Vec<f64>, alpha: f64) -> Trajectory {
        let n = photons.len();
        let pv = phase_variance_profile(dt, &photons, &spont, alpha, 1.0);
        Trajectory {
            dt,
            times: (0..n).map(|i| i as f64 * dt).collect(),
            photons: photons.clone(),
            carriers: vec![0.0; n],
            spont_rate: spont,
            phase_variance: pv,
            output_power: vec![0.0; n],
        }
    }

    #[test]
    fn constant_integrand_is_exact() {
        // rate r, photons σ, interval T → r(1+α²)T/(2σ)
        let (r, sigma, alpha, dt) = (3.0e12, 2.0e4, 5.4, 1e-13);
        let n = 1001;
        let traj = synthetic(dt, vec![sigma; n], vec![r; n], alpha);
        let t_end = (n - 1) as f64 * dt;
        let got = accumulate_phase_variance(&traj, 0.0, t_end).unwrap();
        let expect = r * (1.0 + alpha * alpha) * t_end / (2.0 * sigma);
        assert!((got - expect).abs() / expect < 1e-12);
    }

    #[test]
    fn interval_additivity() {
        let dt = 1e-13;
        let n = 4096;
        let photons: Vec<f64> = (0..n)
            .map(|i| 1e3 + (i as f64 * 0.01).sin().abs() * 1e5)
            .collect();
        let spont: Vec<f64> = (0..n)
            .map(|i| 1e12 * (1.0 + (i as f64 * 0.003).cos().abs()))
            .collect();
        let traj = synthetic(dt, photons, spont, 5.4);
        let (a, b, c) = (3.7e-12, 1.234e-10, 3.9e-10);
        let ab = accumulate_phase_variance(&traj, a, b).unwrap();
        let bc = accumulate_phase_variance(&traj, b, c).unwrap();
        let ac = accumulate_phase_variance(&traj, a, c).unwrap();
        assert!(((ab + bc) - ac).abs() <= 1e-12 * ac.abs());
    }

    #[test]
    fn doubling_photons_halves_variance_exactly() {
        let dt = 1e-13;
        let n = 2000;
        let photons: Vec<f64> = (0..n).map(|i| 2.0 + (i % 37) as f64 * 13.5).collect();
        let spont: Vec<f64> = (0..n).map(|i| 5e11 + (i % 11) as f64 * 1e10).collect();
        let doubled: Vec<f64> = photons.iter().map(|&s| 2.0 * s).collect();
        let base = phase_variance_profile(dt, &photons, &spont, 5.4, 1.0);
        let half = phase_variance_profile(dt, &doubled, &spont, 5.4, 1.0);
        // scaling by a power of two commutes with every rounding step
        for (b, h) in base.iter().zip(&half) {
            assert_eq!(*h, b / 2.0);
        }
    }

    #[test]
    fn alpha_scaling_ratio() {
        let dt = 1e-13;
        let n = 1500;
        let photons: Vec<f64> = (0..n).map(|i| 10.0 + i as f64).collect();
        let spont: Vec<f64> = vec![1e12; n];
        let with = phase_variance_profile(dt, &photons, &spont, 5.4, 1.0);
        let without = phase_variance_profile(dt, &photons, &spont, 0.0, 1.0);
        let ratio = without.last().unwrap() / with.last().unwrap();
        let expect = 1.0 / (1.0 + 5.4 * 5.4);
        assert!((ratio - expect).abs() / expect < 1e-12);
    }

    #[test]
    fn floor_guards_empty_cavity() {
        let dt = 1e-13;
        let traj = synthetic(dt, vec![0.0; 100], vec![1e12; 100], 5.4);
        let v = accumulate_phase_variance(&traj, 0.0, 99.0 * dt).unwrap();
        let expect = 1e12 * (1.0 + 5.4 * 5.4) * 99.0 * dt / 2.0; // s floored at 1
        assert!((v - expect).abs() / expect < 1e-12);
    }

    #[test]
    fn out_of_range_rejected() {
        let traj = synthetic(1e-13, vec![1.0; 10], vec![1.0; 10], 0.0);
        assert!(accumulate_phase_variance(&traj, 0.0, 1e-9).is_err());
        assert!(accumulate_phase_variance(&traj, 5e-13, 2e-13).is_err());
    }

    #[test]
    fn sampled_phase_variance_within_3_sigma() {
        let mut rng = SeedSchedule::new(42).substream("phase-test", 0);
        let v = 9.45f64 * 9.45;
        let n = 1_000_000;
        let phases = sample_pulse_phases(v, n, &mut rng).unwrap();
        let mean = phases.iter().sum::<f64>() / n as f64;
        let var = phases.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / (n - 1) as f64;
        // var of the sample variance of a Gaussian: 2v²/(n−1)
        let sigma = v * (2.0 / (n as f64 - 1.0)).sqrt();
        assert!(
            (var - v).abs() < 3.0 * sigma,
            "sample variance {var} vs {v}"
        );
    }

    #[test]
    fn cos_phase_is_arcsine_beyond_full_randomization() {
        // variance just above (2π)²: cos θ passes a KS test against the
        // arcsine CDF at 1% significance
        let mut rng = SeedSchedule::new(7).substream("phase-ks", 0);
        let v = (2.0 * std::f64::consts::PI).powi(2) * 1.01;
        let n = 100_000;
        let mut x: Vec<f64> = sample_pulse_phases(v, n, &mut rng)
            .unwrap()
            .iter()
            .map(|t| t.cos())
            .collect();
        x.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let cdf = |u: f64| 0.5 + u.clamp(-1.0, 1.0).asin() / std::f64::consts::PI;
        let d = ks_statistic(&x, cdf);
        let critical = 1.628 / (n as f64).sqrt(); // 1% significance
        assert!(d < critical, "KS statistic {d} over critical {critical}");
    }

    #[test]
    fn fixed_seed_reproduces() {
        let v = 100.0;
        let a = sample_pulse_phases(v, 1000, &mut SeedSchedule::new(5).substream("p", 3)).unwrap();
        let b = sample_pulse_phases(v, 1000, &mut SeedSchedule::new(5).substream("p", 3)).unwrap();
        assert_eq!(a, b);
    }
}

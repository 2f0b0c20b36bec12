//! Arcsine model of the interfered signal and min-entropy of its
//! digitization.
//!
//! The interference term follows an arcsine law on [u_min, u_max] when the
//! phase difference is uniform. Digitizing that law concentrates probability
//! in the bins at the edges of the support, and the min-entropy of the bin
//! distribution is what limits extractable randomness.

use crate::error::Error;
use crate::interferometer::AdcConfig;
use serde::Serialize;

/// Arcsine distribution support. `u_min`/`u_max` are powers in watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcsineModel {
    pub u_min: f64,
    pub u_max: f64,
}

impl ArcsineModel {
    pub fn new(u_min: f64, u_max: f64) -> Result<Self, Error> {
        if !(u_max > u_min) || !u_min.is_finite() || !u_max.is_finite() {
            return Err(Error::Validation(format!(
                "arcsine support requires u_max > u_min, got [{u_min}, {u_max}]"
            )));
        }
        Ok(Self { u_min, u_max })
    }

    pub fn span(&self) -> f64 {
        self.u_max - self.u_min
    }

    /// Density 1/(π√((u−a)(b−u))) inside the support, 0 outside.
    pub fn pdf(&self, u: f64) -> f64 {
        if u <= self.u_min || u >= self.u_max {
            return 0.0;
        }
        1.0 / (std::f64::consts::PI * ((u - self.u_min) * (self.u_max - u)).sqrt())
    }

    /// CDF (2/π)·asin √((u−a)/(b−a)), clamped outside the support.
    pub fn cdf(&self, u: f64) -> f64 {
        if u <= self.u_min {
            0.0
        } else if u >= self.u_max {
            1.0
        } else {
            let r = ((u - self.u_min) / self.span()).sqrt();
            2.0 / std::f64::consts::PI * r.asin()
        }
    }

    /// Mean (a+b)/2 and variance (b−a)²/8.
    pub fn moments(&self) -> (f64, f64) {
        let mean = 0.5 * (self.u_min + self.u_max);
        let var = self.span() * self.span() / 8.0;
        (mean, var)
    }

    /// Map a phase difference to the interfered power it produces:
    /// u(φ) = mid + (span/2)·cos φ. Uniform φ on [0, π) gives this model.
    pub fn from_phase(&self, phi: f64) -> f64 {
        0.5 * (self.u_min + self.u_max) + 0.5 * self.span() * phi.cos()
    }
}

/// Support bounds implied by mean arm powers and fringe visibility:
/// u_min = u₁ + u₂ − 2|g|√(u₁u₂), u_max = u₁ + u₂ + 2|g|√(u₁u₂).
pub fn arcsine_bounds(mean_u1: f64, mean_u2: f64, visibility: f64) -> Result<ArcsineModel, Error> {
    if mean_u1 <= 0.0 || mean_u2 <= 0.0 {
        return Err(Error::Validation(format!(
            "arm means must be positive, got {mean_u1}, {mean_u2}"
        )));
    }
    if !(0.0..=1.0).contains(&visibility) {
        return Err(Error::Validation(format!(
            "visibility must be in [0,1], got {visibility}"
        )));
    }
    let cross = 2.0 * visibility * (mean_u1 * mean_u2).sqrt();
    ArcsineModel::new(mean_u1 + mean_u2 - cross, mean_u1 + mean_u2 + cross)
}

/// Closed-form mass of the first digitizer bin above u_min:
/// (2/π)·asin √(A/(2^b·span)).
pub fn first_bin_probability(model: &ArcsineModel, adc: &AdcConfig) -> Result<f64, Error> {
    let du = adc.bin_width();
    if du >= model.span() {
        return Err(Error::Validation(format!(
            "distribution narrower than one ADC bin: span {} <= bin {}",
            model.span(),
            du
        )));
    }
    Ok(2.0 / std::f64::consts::PI * (du / model.span()).sqrt().asin())
}

/// Per-bin probability masses of the digitized arcsine on the true ADC grid
/// (bins anchored at 0, clamped at both rails).
pub fn digitized_mass_function(model: &ArcsineModel, adc: &AdcConfig) -> Vec<f64> {
    let nbins = 1usize << adc.resolution_bits;
    let du = adc.bin_width();
    let mut mass = vec![0.0; nbins];
    for (k, m) in mass.iter_mut().enumerate() {
        let lo = k as f64 * du;
        let hi = lo + du;
        *m = model.cdf(hi) - model.cdf(lo);
    }
    // anything outside the converter range saturates into the rail bins
    mass[0] += model.cdf(0.0);
    mass[nbins - 1] += 1.0 - model.cdf(nbins as f64 * du);
    mass
}

/// Min-entropy −log₂ max pᵢ of an explicit mass function.
pub fn min_entropy_exact(mass_function: &[f64]) -> Result<f64, Error> {
    if mass_function.is_empty() {
        return Err(Error::Validation("empty mass function".into()));
    }
    let mut max = 0.0f64;
    let mut sum = 0.0f64;
    for &p in mass_function {
        if !(p >= 0.0) {
            return Err(Error::Validation(format!("negative probability {p}")));
        }
        sum += p;
        max = max.max(p);
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Validation(format!(
            "mass function sums to {sum}, expected 1 within 1e-9"
        )));
    }
    Ok(-max.log2())
}

/// Closed-form min-entropy of the digitized arcsine:
/// b/2 − (1/2)·log₂(4·A/(π²·span)).
pub fn min_entropy_closed_form(adc: &AdcConfig, span: f64) -> f64 {
    assert!(span > 0.0, "span must be positive");
    let b = adc.resolution_bits as f64;
    b / 2.0 - 0.5 * (4.0 * adc.range / (std::f64::consts::PI.powi(2) * span)).log2()
}

/// Randomness production rate in bits/s.
pub fn randomness_rate(h_bits: f64, prf: f64) -> f64 {
    assert!(h_bits >= 0.0);
    h_bits * prf
}

/// Worst-case fractional deviation from uniformity of a wrapped, folded
/// Gaussian phase distribution on [0, π):
/// max over θ of |π·G_π(θ) − 1| with G_π(θ) = Σ_{s=±1} Σ_n G(sθ + 2πn).
pub fn wrapped_gaussian_uniformity_error(variance: f64) -> f64 {
    assert!(variance > 0.0, "variance must be positive");
    wrapped_gaussian_error_impl(variance, 1e-18, 8192)
}

pub(crate) fn wrapped_gaussian_error_impl(variance: f64, term_cutoff: f64, grid: usize) -> f64 {
    let sigma = variance.sqrt();
    let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    // |x| beyond which a single Gaussian term falls under the cutoff
    let x_cut = if norm <= term_cutoff {
        0.0
    } else {
        sigma * (2.0 * (norm / term_cutoff).ln()).sqrt()
    };
    let n_max = ((x_cut + std::f64::consts::PI) / (2.0 * std::f64::consts::PI)).ceil() as i64 + 1;
    let gauss = |x: f64| norm * (-x * x / (2.0 * variance)).exp();
    let mut worst = 0.0f64;
    for i in 0..grid {
        let theta = i as f64 / grid as f64 * std::f64::consts::PI;
        let mut g = 0.0;
        for n in -n_max..=n_max {
            let shift = 2.0 * std::f64::consts::PI * n as f64;
            for s in [1.0, -1.0] {
                let term = gauss(s * theta + shift);
                if term >= term_cutoff {
                    g += term;
                }
            }
        }
        worst = worst.max((g * std::f64::consts::PI - 1.0).abs());
    }
    worst
}

/// Interference model with fluctuating arm powers and additive detection
/// noise. Conditioned on the phase difference φ, the output power is
/// Gaussian to first order in the arm fluctuations:
///   μ(φ) = m₁ + m₂ + 2|g|√(m₁m₂)·cos φ
///   σ²(φ) = c₁²v₁ + c₂²v₂ + v_n,  c_i = 1 + |g|·cos φ·√(m_j/m_i)
#[derive(Debug, Clone, Copy)]
pub struct NoisyArcsineModel {
    pub mean_u1: f64,
    pub var_u1: f64,
    pub mean_u2: f64,
    pub var_u2: f64,
    pub visibility: f64,
    pub noise_variance: f64,
}

impl NoisyArcsineModel {
    pub fn validate(&self) -> Result<(), Error> {
        if self.mean_u1 <= 0.0 || self.mean_u2 <= 0.0 {
            return Err(Error::Validation("arm means must be positive".into()));
        }
        if self.var_u1 < 0.0 || self.var_u2 < 0.0 {
            return Err(Error::Validation("arm variances must be >= 0".into()));
        }
        if !(self.noise_variance > 0.0) {
            return Err(Error::Validation(
                "noise variance must be positive (use the noiseless model otherwise)".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.visibility) {
            return Err(Error::Validation(format!(
                "visibility must be in [0,1], got {}",
                self.visibility
            )));
        }
        Ok(())
    }

    fn conditional(&self, cos_phi: f64) -> (f64, f64) {
        let g = self.visibility;
        let cross = (self.mean_u1 * self.mean_u2).sqrt();
        let mu = self.mean_u1 + self.mean_u2 + 2.0 * g * cross * cos_phi;
        let c1 = 1.0 + g * cos_phi * (self.mean_u2 / self.mean_u1).sqrt();
        let c2 = 1.0 + g * cos_phi * (self.mean_u1 / self.mean_u2).sqrt();
        let var = c1 * c1 * self.var_u1 + c2 * c2 * self.var_u2 + self.noise_variance;
        (mu, var.sqrt())
    }

    /// Exact total output variance: the arcsine term span²/8 = 2g²m₁m₂
    /// plus the arm and noise variances. The cross term is uncorrelated
    /// with the arm sum because E[cos φ] = 0.
    pub fn predicted_output_variance(&self) -> f64 {
        2.0 * self.visibility * self.visibility * self.mean_u1 * self.mean_u2
            + self.var_u1
            + self.var_u2
            + self.noise_variance
    }
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * crate::stats::special::erfc(-z / std::f64::consts::SQRT_2)
}

/// Per-code probability masses of the digitized noisy interference model:
/// p_k = (1/π)∫₀^π P(code = k | φ) dφ by composite Simpson over φ, with
/// out-of-range mass absorbed into the rail codes.
pub fn digitized_mass_function_noisy(
    model: &NoisyArcsineModel,
    adc: &AdcConfig,
    phi_steps: usize,
) -> Result<Vec<f64>, Error> {
    model.validate()?;
    adc.validate()?;
    if phi_steps < 8 || !phi_steps.is_multiple_of(2) {
        return Err(Error::Validation(format!(
            "phi_steps must be even and >= 8, got {phi_steps}"
        )));
    }
    let nbins = 1usize << adc.resolution_bits;
    let du = adc.bin_width();
    let mut mass = vec![0.0f64; nbins];
    let h = std::f64::consts::PI / phi_steps as f64;
    let mut weight_sum = 0.0;
    for i in 0..=phi_steps {
        let w = if i == 0 || i == phi_steps {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        weight_sum += w;
        let (mu, sigma) = model.conditional((i as f64 * h).cos());
        // codes more than 8σ from μ carry < 1e-15 of this node's mass
        let k_lo = (((mu - 8.0 * sigma) / du).floor() as i64).clamp(0, nbins as i64 - 1) as usize;
        let k_hi = (((mu + 8.0 * sigma) / du).floor() as i64).clamp(0, nbins as i64 - 1) as usize;
        for (k, m) in mass.iter_mut().enumerate().take(k_hi + 1).skip(k_lo) {
            let lo = if k == 0 {
                0.0 // the bottom rail absorbs everything below it
            } else {
                normal_cdf((k as f64 * du - mu) / sigma)
            };
            let hi = if k == nbins - 1 {
                1.0 // the top rail absorbs everything above it
            } else {
                normal_cdf(((k + 1) as f64 * du - mu) / sigma)
            };
            *m += w * (hi - lo);
        }
    }
    // Simpson weights sum to 3·steps/... normalize by the actual sum so the
    // masses add to one exactly up to the 8σ truncation
    for m in &mut mass {
        *m /= weight_sum;
    }
    Ok(mass)
}

/// Certification summary for one run.
#[derive(Debug, Clone, Serialize)]
pub struct EntropyReport {
    pub visibility: f64,
    pub visibility_clamped: bool,
    pub visibility_degenerate: bool,
    pub u_min_w: f64,
    pub u_max_w: f64,
    pub span_w: f64,
    pub h_exact_bits: f64,
    pub h_closed_form_bits: f64,
    pub first_bin_prob: f64,
    pub reduction_factor: f64,
    pub bit_rate_bps: f64,
    /// where each input statistic came from (measured file, config, ...)
    pub provenance: std::collections::BTreeMap<String, String>,
}

impl EntropyReport {
    /// Build a report from estimated visibility and mean generalized arm
    /// powers. `h_exact` uses the true ADC grid; the reduction factor is
    /// b / H_exact as certified.
    pub fn build(
        visibility: crate::interferometer::VisibilityEstimate,
        mean_u1: f64,
        mean_u2: f64,
        adc: &AdcConfig,
        prf: f64,
        provenance: std::collections::BTreeMap<String, String>,
    ) -> Result<Self, Error> {
        let g = visibility.value;
        if g == 0.0 {
            return Err(Error::Validation(
                "zero visibility gives zero arcsine span; nothing to certify".into(),
            ));
        }
        let model = arcsine_bounds(mean_u1, mean_u2, g)?;
        let mass = digitized_mass_function(&model, adc);
        let h_exact = min_entropy_exact(&mass)?;
        let h_closed = min_entropy_closed_form(adc, model.span());
        let first_bin = first_bin_probability(&model, adc)?;
        Ok(Self {
            visibility: g,
            visibility_clamped: visibility.clamped,
            visibility_degenerate: visibility.degenerate,
            u_min_w: model.u_min,
            u_max_w: model.u_max,
            span_w: model.span(),
            h_exact_bits: h_exact,
            h_closed_form_bits: h_closed,
            first_bin_prob: first_bin,
            reduction_factor: adc.resolution_bits as f64 / h_exact,
            bit_rate_bps: randomness_rate(h_exact, prf),
            provenance,
        })
    }
}

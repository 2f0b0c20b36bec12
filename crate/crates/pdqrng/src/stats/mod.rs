//! Statistical validation: autocorrelation, symbol-uniformity deviation,
//! a minimal randomness test battery, and meta-statistics over many runs.

pub mod battery;
pub mod special;

pub use battery::{
    block_frequency_test, monobit_test, proportion_interval, run_battery, runs_test,
    BatterySummary, TestOutcome, TestProportion,
};
pub use special::{erfc, incomplete_gamma_upper, ln_gamma};

use crate::error::Error;

/// Normalized autocorrelation r(k) = Σ(x_i−x̄)(x_{i+k}−x̄) / Σ(x_i−x̄)²
/// for k = 1..=max_lag; `include_zero` prepends r(0) = 1.
pub fn autocorrelation(
    samples: &[f64],
    max_lag: usize,
    include_zero: bool,
) -> Result<Vec<f64>, Error> {
    if max_lag == 0 || samples.len() <= max_lag {
        return Err(Error::Validation(format!(
            "need more than {max_lag} samples for lag {max_lag}, got {}",
            samples.len()
        )));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let denom: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum();
    if denom == 0.0 {
        return Err(Error::DegenerateInput(
            "autocorrelation of a constant sequence".into(),
        ));
    }
    let mut out = Vec::with_capacity(max_lag + usize::from(include_zero));
    if include_zero {
        out.push(1.0);
    }
    for k in 1..=max_lag {
        let num: f64 = samples[..samples.len() - k]
            .iter()
            .zip(&samples[k..])
            .map(|(a, b)| (a - mean) * (b - mean))
            .sum();
        out.push(num / denom);
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct UniformityReport {
    /// per-bin deviation P_i − 2^{−k}
    pub deviations: Vec<f64>,
    /// one-sigma multinomial band √(2^{−k}(1−2^{−k})/N)
    pub sigma: f64,
    pub bits: u32,
    pub count: usize,
}

impl UniformityReport {
    pub fn max_abs_deviation(&self) -> f64 {
        self.deviations.iter().fold(0.0, |m, d| m.max(d.abs()))
    }
}

/// Per-symbol deviation from the ideal k-bit uniform distribution.
pub fn uniformity_deviation(symbols: &[u16], bits: u32) -> Result<UniformityReport, Error> {
    if bits == 0 || bits > 16 {
        return Err(Error::Validation(format!(
            "symbol width {bits} out of 1..=16"
        )));
    }
    let k = 1usize << bits;
    if symbols.len() < k {
        return Err(Error::Validation(format!(
            "need at least 2^{bits} = {k} symbols, got {}",
            symbols.len()
        )));
    }
    let mut counts = vec![0usize; k];
    for &s in symbols {
        let s = s as usize;
        if s >= k {
            return Err(Error::Validation(format!(
                "symbol {s} does not fit in {bits} bits"
            )));
        }
        counts[s] += 1;
    }
    let n = symbols.len() as f64;
    let ideal = 1.0 / k as f64;
    let deviations = counts.iter().map(|&c| c as f64 / n - ideal).collect();
    Ok(UniformityReport {
        deviations,
        sigma: (ideal * (1.0 - ideal) / n).sqrt(),
        bits,
        count: symbols.len(),
    })
}

/// Meta-statistic over a set of P-values: 10-bin Pearson chi-square
/// against uniformity, mapped through Q(9/2, χ²/2).
pub fn pvalue_uniformity(p_values: &[f64]) -> Result<f64, Error> {
    if p_values.len() < 10 {
        return Err(Error::Validation(format!(
            "P-value uniformity needs >= 10 values, got {}",
            p_values.len()
        )));
    }
    let s = p_values.len() as f64;
    let mut hist = [0usize; 10];
    for &p in p_values {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Validation(format!("P-value {p} outside [0,1]")));
        }
        let bin = ((p * 10.0) as usize).min(9);
        hist[bin] += 1;
    }
    let expected = s / 10.0;
    let chi2: f64 = hist
        .iter()
        .map(|&f| {
            let d = f as f64 - expected;
            d * d / expected
        })
        .sum();
    Ok(incomplete_gamma_upper(4.5, chi2 / 2.0))
}

#[derive(Debug, Clone)]
pub struct ChiSquareFit {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// bin count after pooling low-expectation bins
    pub pooled_bins: usize,
}

/// Pearson goodness-of-fit of observed counts against expected counts.
/// Adjacent bins are pooled left-to-right until each pool expects at
/// least `min_expected`; a deficient final pool merges backwards.
pub fn chi_square_goodness(
    observed: &[u64],
    expected: &[f64],
    min_expected: f64,
) -> Result<ChiSquareFit, Error> {
    if observed.len() != expected.len() || observed.is_empty() {
        return Err(Error::Validation(
            "observed/expected bin counts must match and be non-empty".into(),
        ));
    }
    if expected.iter().any(|&e| !e.is_finite() || e < 0.0) {
        return Err(Error::Validation(
            "expected counts must be finite and >= 0".into(),
        ));
    }
    let mut pools: Vec<(f64, f64)> = Vec::new();
    let mut acc_o = 0.0;
    let mut acc_e = 0.0;
    for (&o, &e) in observed.iter().zip(expected) {
        acc_o += o as f64;
        acc_e += e;
        if acc_e >= min_expected {
            pools.push((acc_o, acc_e));
            acc_o = 0.0;
            acc_e = 0.0;
        }
    }
    if acc_e > 0.0 || acc_o > 0.0 {
        if let Some(last) = pools.last_mut() {
            last.0 += acc_o;
            last.1 += acc_e;
        } else {
            pools.push((acc_o, acc_e));
        }
    }
    if pools.len() < 2 {
        return Err(Error::DegenerateInput(
            "fewer than two pooled bins with sufficient expectation".into(),
        ));
    }
    let statistic: f64 = pools
        .iter()
        .map(|&(o, e)| {
            let d = o - e;
            d * d / e
        })
        .sum();
    let dof = pools.len() - 1;
    Ok(ChiSquareFit {
        statistic,
        dof,
        p_value: incomplete_gamma_upper(dof as f64 / 2.0, statistic / 2.0),
        pooled_bins: pools.len(),
    })
}

/// Kolmogorov–Smirnov statistic of samples against a reference CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    d
}

//! Per-period pulse metrics on a filtered power trace.

use crate::error::Error;

#[derive(Debug, Clone, Copy)]
pub struct PulseMetrics {
    /// maximum filtered power in the window, W
    pub peak: f64,
    /// inter-pulse floor of the window, W
    pub baseline: f64,
    /// full width of the baseline-subtracted pulse at 1/e² of its peak, s
    pub width_1e2: f64,
}

/// Index range (inclusive) of the last `span` seconds of a trace sampled at
/// `dt`, e.g. the final drive period of a warmed-up pulse train.
pub fn tail_window(len: usize, dt: f64, span: f64) -> Result<(usize, usize), Error> {
    if len < 2 {
        return Err(Error::Validation("trace too short for a window".into()));
    }
    let end = len - 1;
    let total = end as f64 * dt;
    if span > total + 1e-9 * dt {
        return Err(Error::Validation(format!(
            "window span {span} exceeds trace duration {total}"
        )));
    }
    let start = ((total - span) / dt).round() as usize;
    Ok((start.min(end - 1), end))
}

/// Pulse metrics over one period of a (circularly treated) filtered trace.
///
/// The width measure is the standard laser-pulse convention: full width at
/// 1/e² of the baseline-subtracted peak, scanned outward from the rolled
/// peak position so a pulse straddling the window edge is handled.
pub fn pulse_metrics(power: &[f64], dt: f64) -> Result<PulseMetrics, Error> {
    if power.len() < 8 {
        return Err(Error::Validation(
            "window too short for pulse metrics".into(),
        ));
    }
    let n = power.len();
    let peak = power.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let baseline = power.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(peak > baseline) {
        return Err(Error::DegenerateInput(
            "flat power trace has no pulse".into(),
        ));
    }
    let argmax = power
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    // roll the window so the peak sits at the center
    let shift = (n / 2 + n - argmax) % n;
    let at = |i: usize| power[(i + n - shift) % n] - baseline;
    let center = n / 2;
    let level = (peak - baseline) * (-2.0f64).exp();
    let mut lo = center;
    while lo > 0 && at(lo) > level {
        lo -= 1;
    }
    let mut hi = center;
    while hi < n - 1 && at(hi) > level {
        hi += 1;
    }
    Ok(PulseMetrics {
        peak,
        baseline,
        width_1e2: (hi - lo) as f64 * dt,
    })
}

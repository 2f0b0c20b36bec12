//! Detector/oscilloscope bandwidth model: a causal single-pole recursive
//! filter with time constant τ = 0.35/bandwidth (the usual rise-time
//! relation), y[i] = y[i−1] + (1 − e^{−dt/τ})(x[i] − y[i−1]).

use crate::error::Error;

pub fn filter_time_constant(bandwidth: f64) -> f64 {
    0.35 / bandwidth
}

pub fn low_pass_filter(signal: &[f64], dt: f64, bandwidth: f64) -> Result<Vec<f64>, Error> {
    if !(bandwidth > 0.0) || !(dt > 0.0) {
        return Err(Error::Validation(format!(
            "need positive dt/bandwidth, got dt = {dt}, bandwidth = {bandwidth}"
        )));
    }
    let tau = filter_time_constant(bandwidth);
    let a = 1.0 - (-dt / tau).exp();
    let mut out = Vec::with_capacity(signal.len());
    let mut acc = match signal.first() {
        Some(&x) => x,
        None => return Ok(out),
    };
    for &x in signal {
        acc += a * (x - acc);
        out.push(acc);
    }
    Ok(out)
}

//! Periodic pump-current waveforms.

use crate::error::Error;
use serde::{Deserialize, Serialize};

/// Shape of one drive period. The instantaneous current is
/// dc_bias + rf_amplitude · shape(t), with shape in [-1, 1] nominally.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DutyShape {
    /// shape(t) = sin(2π·prf·t)
    Sinusoid,
    /// One period sampled at `times` ∈ [0, 1/prf) with linear interpolation
    /// and periodic wraparound.
    Sampled { times: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DriveWaveform {
    /// A
    pub dc_bias: f64,
    /// A
    pub rf_amplitude: f64,
    /// pulse repetition frequency, Hz
    pub prf: f64,
    pub duty_shape: DutyShape,
    /// total integration time, s
    pub duration: f64,
    /// integrator step, s; must resolve the pulse: dt < 1/(100·prf)
    pub dt: f64,
}

impl DriveWaveform {
    /// The reference drive: 15 mA bias, 45 mA RF at 5.825 GHz, which holds
    /// the diode reverse-biased for about 40% of each cycle. 24 periods give
    /// the pulse train ample time to lock to the drive before the final
    /// period is analyzed.
    pub fn reference_defaults() -> Self {
        let prf = 5.825e9;
        DriveWaveform {
            dc_bias: 15e-3,
            rf_amplitude: 45e-3,
            prf,
            duty_shape: DutyShape::Sinusoid,
            duration: 24.0 / prf,
            dt: 2e-14,
        }
    }

    pub fn period(&self) -> f64 {
        1.0 / self.prf
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.prf > 0.0) {
            return Err(Error::Validation(format!(
                "prf must be positive, got {}",
                self.prf
            )));
        }
        if !(self.dt > 0.0) || self.dt >= 1.0 / (100.0 * self.prf) {
            return Err(Error::Validation(format!(
                "dt = {} must satisfy 0 < dt < 1/(100·prf) = {}",
                self.dt,
                1.0 / (100.0 * self.prf)
            )));
        }
        if !(self.duration >= self.dt) {
            return Err(Error::Validation(format!(
                "duration {} shorter than one step {}",
                self.duration, self.dt
            )));
        }
        if self.rf_amplitude < 0.0 {
            return Err(Error::Validation("rf_amplitude must be >= 0".into()));
        }
        if let DutyShape::Sampled { times, values } = &self.duty_shape {
            if times.len() != values.len() || times.len() < 2 {
                return Err(Error::Validation(
                    "sampled shape needs >= 2 matching time/value points".into(),
                ));
            }
            let period = self.period();
            for w in times.windows(2) {
                if !(w[1] > w[0]) {
                    return Err(Error::Validation(
                        "sampled shape times must increase".into(),
                    ));
                }
            }
            if times[0] < 0.0 || *times.last().unwrap() >= period {
                return Err(Error::Validation(format!(
                    "sampled shape times must lie in [0, period = {period})"
                )));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::Validation(
                    "sampled shape values must be finite".into(),
                ));
            }
        }
        Ok(())
    }

    /// Instantaneous pump current, A. May be negative: the diode is driven
    /// into reverse bias between pulses.
    pub fn current(&self, t: f64) -> f64 {
        self.dc_bias + self.rf_amplitude * self.shape(t)
    }

    fn shape(&self, t: f64) -> f64 {
        match &self.duty_shape {
            DutyShape::Sinusoid => (2.0 * std::f64::consts::PI * self.prf * t).sin(),
            DutyShape::Sampled { times, values } => {
                let period = self.period();
                let tp = t.rem_euclid(period);
                // position in the sample list; wrap the final segment
                match times.binary_search_by(|x| x.partial_cmp(&tp).unwrap()) {
                    Ok(i) => values[i],
                    Err(0) => {
                        // before the first sample: segment from last point,
                        // wrapped back one period
                        let (t0, v0) = (*times.last().unwrap() - period, *values.last().unwrap());
                        let (t1, v1) = (times[0], values[0]);
                        lerp(tp, t0, v0, t1, v1)
                    }
                    Err(i) if i == times.len() => {
                        let (t0, v0) = (times[i - 1], values[i - 1]);
                        let (t1, v1) = (times[0] + period, values[0]);
                        lerp(tp, t0, v0, t1, v1)
                    }
                    Err(i) => lerp(tp, times[i - 1], values[i - 1], times[i], values[i]),
                }
            }
        }
    }

    pub fn steps(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }
}

fn lerp(t: f64, t0: f64, v0: f64, t1: f64, v1: f64) -> f64 {
    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinusoid_reverse_bias_fraction() {
        let d = DriveWaveform::reference_defaults();
        d.validate().unwrap();
        let n = 100_000;
        let below = (0..n)
            .filter(|&i| d.current(i as f64 / n as f64 * d.period()) < 0.0)
            .count();
        let frac = below as f64 / n as f64;
        // "reverse-biased for about 40% of the cycle"
        assert!((frac - 0.392).abs() < 0.005, "reverse fraction {frac}");
    }

    #[test]
    fn dt_invariant_enforced() {
        let mut d = DriveWaveform::reference_defaults();
        d.dt = 1.0 / (100.0 * d.prf);
        assert!(d.validate().is_err());
        d.dt = 1e-12;
        assert!(d.validate().is_ok());
    }

    #[test]
    fn sampled_shape_interpolates_and_wraps() {
        let prf = 1e9;
        let d = DriveWaveform {
            dc_bias: 0.0,
            rf_amplitude: 1.0,
            prf,
            duty_shape: DutyShape::Sampled {
                times: vec![0.0, 0.25e-9, 0.5e-9, 0.75e-9],
                values: vec![0.0, 1.0, 0.0, -1.0],
            },
            duration: 10e-9,
            dt: 1e-12,
        };
        d.validate().unwrap();
        assert!((d.current(0.125e-9) - 0.5).abs() < 1e-12);
        assert!((d.current(0.25e-9) - 1.0).abs() < 1e-12);
        // wrap segment: from (0.75 ns, -1) to (1.0 ns, 0)
        assert!((d.current(0.875e-9) - (-0.5)).abs() < 1e-12);
        // periodicity
        assert!((d.current(3.125e-9) - d.current(0.125e-9)).abs() < 1e-12);
    }

    #[test]
    fn sampled_shape_validation() {
        let bad = DriveWaveform {
            dc_bias: 0.0,
            rf_amplitude: 1.0,
            prf: 1e9,
            duty_shape: DutyShape::Sampled {
                times: vec![0.0, 1.5e-9],
                values: vec![0.0, 1.0],
            },
            duration: 10e-9,
            dt: 1e-12,
        };
        assert!(bad.validate().is_err(), "times beyond one period");
    }
}

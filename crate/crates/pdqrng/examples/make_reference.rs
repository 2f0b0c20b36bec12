//! Regenerates data/reference_pulse.csv: a bench-style observed pulse trace
//! for the fit command and its tests. The trace is a fine-grid simulation of
//! the default device, resampled to a 0.5 ps oscilloscope grid over the last
//! two drive periods, uniformly depressed by 6% and given a slow 0.5%
//! sinusoidal ripple so it sits strictly below any faithful simulation, the
//! way a calibration-limited measurement would.

use pdqrng::io::write_reference_csv;
use pdqrng::laser::{
    integrate_rate_equations, low_pass_filter, DriveWaveform, LaserParams, ReferenceTrace,
};
use std::path::Path;

fn main() {
    let params = LaserParams::reference_defaults();
    let mut drive = DriveWaveform::reference_defaults();
    drive.dt = 2e-14;
    let traj = integrate_rate_equations(&params, &drive, 1000.0, 5e7).unwrap();
    let filtered = low_pass_filter(&traj.output_power, traj.dt, 12.5e9).unwrap();

    let period = drive.period();
    let t_end = traj.times[traj.len() - 1];
    let t_start = t_end - 2.0 * period;
    let step = 0.5e-12;
    let n = (2.0 * period / step).ceil() as usize + 1;

    let mut times = Vec::with_capacity(n);
    let mut powers = Vec::with_capacity(n);
    for i in 0..n {
        let t = (i as f64 * step).min(t_end - t_start);
        let src = t_start + t;
        // linear interpolation on the fine simulation grid
        let x = src / traj.dt;
        let k = (x.floor() as usize).min(filtered.len() - 2);
        let frac = x - k as f64;
        let p = filtered[k] * (1.0 - frac) + filtered[k + 1] * frac;
        let ripple = 1.0 + 0.005 * (2.0 * std::f64::consts::PI * t / period + 1.0).sin();
        times.push(t);
        powers.push(p * 0.94 * ripple);
    }

    let out = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/reference_pulse.csv");
    let trace = ReferenceTrace { times, powers };
    write_reference_csv(&out, &trace).unwrap();
    println!("wrote {} samples to {}", trace.times.len(), out.display());
}

//! File formats: CSV for plot-ready data, little-endian binary for
//! samples, packed bytes for bit streams, JSON for reports. Floats are
//! written with 17 significant digits so every value round-trips exactly.

use crate::bits::BitStream;
use crate::error::Error;
use crate::interferometer::PulseRecord;
use crate::laser::{ReferenceTrace, Trajectory};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

pub const TRAJECTORY_HEADER: &str = "time_s,photons,carriers,rsp_per_s,phase_var_rad2,power_w";
pub const PULSE_HEADER: &str = "j,u1_w,u2_w,theta_rad,uout_w,bin";
pub const REFERENCE_HEADER: &str = "time_s,power_w";

pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> Result<(), Error> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for i in 0..traj.len() {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            traj.times[i],
            traj.photons[i],
            traj.carriers[i],
            traj.spont_rate[i],
            traj.phase_variance[i],
            traj.output_power[i]
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_pulse_csv(path: &Path, records: &[PulseRecord], codes: &[u16]) -> Result<(), Error> {
    if records.len() != codes.len() {
        return Err(Error::Validation(format!(
            "record/code count mismatch: {} vs {}",
            records.len(),
            codes.len()
        )));
    }
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{PULSE_HEADER}")?;
    for (r, &c) in records.iter().zip(codes) {
        writeln!(
            w,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            r.index, r.u1, r.u2, r.theta, r.u_out, c
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Little-endian 16-bit sample file.
pub fn write_samples_binary(path: &Path, codes: &[u16]) -> Result<(), Error> {
    let mut w = BufWriter::new(File::create(path)?);
    for &c in codes {
        w.write_all(&c.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_samples_binary(path: &Path) -> Result<Vec<u16>, Error> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() % 2 != 0 {
        return Err(Error::Validation(format!(
            "sample file {} has odd length {}",
            path.display(),
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(2)
        .map(|c| u16::from_le_bytes([c[0], c[1]]))
        .collect())
}

pub fn write_reference_csv(path: &Path, trace: &ReferenceTrace) -> Result<(), Error> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{REFERENCE_HEADER}")?;
    for (t, p) in trace.times.iter().zip(&trace.powers) {
        writeln!(w, "{t:.16e},{p:.16e}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_reference_csv(path: &Path) -> Result<ReferenceTrace, Error> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Validation(format!("{}: empty file", path.display())))??;
    if header.trim() != REFERENCE_HEADER {
        return Err(Error::Validation(format!(
            "{}: expected header '{REFERENCE_HEADER}', got '{}'",
            path.display(),
            header.trim()
        )));
    }
    let mut times = Vec::new();
    let mut powers = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let parse = |s: Option<&str>| -> Result<f64, Error> {
            s.map(str::trim)
                .ok_or_else(|| {
                    Error::Validation(format!("{}:{}: missing column", path.display(), lineno + 2))
                })?
                .parse()
                .map_err(|e| Error::Validation(format!("{}:{}: {e}", path.display(), lineno + 2)))
        };
        times.push(parse(parts.next())?);
        powers.push(parse(parts.next())?);
    }
    Ok(ReferenceTrace { times, powers })
}

/// Raw packed bytes, MSB-first; the exact bit count travels in the
/// manifest because the file has no header.
pub fn write_bits(path: &Path, bits: &BitStream) -> Result<(), Error> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(bits.as_bytes())?;
    w.flush()?;
    Ok(())
}

pub fn read_bits(path: &Path, bit_count: Option<usize>) -> Result<BitStream, Error> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    let len = bit_count.unwrap_or(bytes.len() * 8);
    BitStream::from_bytes(bytes, len)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Validation(format!("report serialization: {e}")))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn sha256_hex_file(path: &Path) -> Result<String, Error> {
    let mut hasher = Sha256::new();
    let mut file = File::open(path)?;
    let mut buf = [0u8; 65536];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

//! Minimal randomness test battery (monobit frequency, block frequency,
//! runs) and the two meta-statistics computed over many sequences: the
//! accepted proportion with its confidence interval, and the P-value
//! uniformity statistic.

use super::pvalue_uniformity;
use super::special::{erfc, incomplete_gamma_upper};
use crate::bits::BitStream;
use crate::error::Error;
use rayon::prelude::*;
use serde::Serialize;

pub const BLOCK_FREQUENCY_BLOCK: usize = 128;

#[derive(Debug, Clone, Serialize)]
pub struct TestOutcome {
    pub test_name: String,
    pub p_value: f64,
    pub pass: bool,
    pub sequence_id: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct TestProportion {
    pub test_name: String,
    /// fraction of sequences accepted at the significance level
    pub proportion: f64,
    pub interval_low: f64,
    pub interval_high: f64,
    pub within_interval: bool,
    /// uniformity of the m P-values; None when m < 10
    pub p_value_t: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BatterySummary {
    /// number of sequences tested
    pub m: usize,
    /// P-values per test (equals m here: one P-value per sequence)
    pub s_count: usize,
    pub sequence_bits: usize,
    pub significance: f64,
    pub tests: Vec<TestProportion>,
}

/// Acceptance-proportion confidence interval 1−α ± 3√((1−α)α/m).
pub fn proportion_interval(significance: f64, m: usize) -> (f64, f64) {
    let p = 1.0 - significance;
    let half = 3.0 * (p * significance / m as f64).sqrt();
    (p - half, p + half)
}

/// Monobit frequency test: p = erfc(|Σ(2x−1)| / √(2n)).
pub fn monobit_test(bits: &BitStream, start: usize, len: usize) -> Result<f64, Error> {
    if len == 0 {
        return Err(Error::Validation(
            "monobit test on an empty sequence".into(),
        ));
    }
    let ones = bits.count_ones(start, len) as f64;
    let s_obs = (2.0 * ones - len as f64).abs() / (len as f64).sqrt();
    Ok(erfc(s_obs / std::f64::consts::SQRT_2))
}

/// Block frequency test with fixed block size M: χ² = 4M Σ(π_i − 1/2)²,
/// p = Q(N/2, χ²/2) over the N full blocks; the tail is discarded.
pub fn block_frequency_test(bits: &BitStream, start: usize, len: usize) -> Result<f64, Error> {
    let m = BLOCK_FREQUENCY_BLOCK;
    let blocks = len / m;
    if blocks == 0 {
        return Err(Error::Validation(format!(
            "block frequency test needs at least {m} bits, got {len}"
        )));
    }
    let mut chi2 = 0.0;
    for b in 0..blocks {
        let pi = bits.count_ones(start + b * m, m) as f64 / m as f64;
        chi2 += (pi - 0.5) * (pi - 0.5);
    }
    chi2 *= 4.0 * m as f64;
    Ok(incomplete_gamma_upper(blocks as f64 / 2.0, chi2 / 2.0))
}

/// Runs test. Not applicable (p = 0) when the ones fraction already fails
/// the monobit prerequisite |π − 1/2| ≥ 2/√n.
pub fn runs_test(bits: &BitStream, start: usize, len: usize) -> Result<f64, Error> {
    if len < 2 {
        return Err(Error::Validation("runs test needs at least 2 bits".into()));
    }
    let n = len as f64;
    let pi = bits.count_ones(start, len) as f64 / n;
    if (pi - 0.5).abs() >= 2.0 / n.sqrt() {
        return Ok(0.0);
    }
    let mut runs = 1u64;
    let mut prev = bits.get(start);
    for i in 1..len {
        let cur = bits.get(start + i);
        runs += u64::from(cur != prev);
        prev = cur;
    }
    let expected = 2.0 * n * pi * (1.0 - pi);
    let p = erfc((runs as f64 - expected).abs() / (2.0 * (2.0 * n).sqrt() * pi * (1.0 - pi)));
    Ok(p)
}

const TEST_NAMES: [&str; 3] = ["monobit", "block_frequency", "runs"];

fn run_sequence(bits: &BitStream, start: usize, len: usize) -> Result<[f64; 3], Error> {
    Ok([
        monobit_test(bits, start, len)?,
        block_frequency_test(bits, start, len)?,
        runs_test(bits, start, len)?,
    ])
}

/// Splits the stream into floor(len/seq_len) sequences, runs every test on
/// each, and aggregates the meta-statistics.
pub fn run_battery(
    bits: &BitStream,
    seq_len: usize,
    significance: f64,
) -> Result<(Vec<TestOutcome>, BatterySummary), Error> {
    if !(0.0 < significance && significance < 1.0) {
        return Err(Error::Validation(format!(
            "significance level {significance} outside (0,1)"
        )));
    }
    if seq_len < 2 * BLOCK_FREQUENCY_BLOCK {
        return Err(Error::Validation(format!(
            "sequence length {seq_len} too short for the test subset"
        )));
    }
    let m = bits.len() / seq_len;
    if m < 2 {
        return Err(Error::Validation(format!(
            "need >= 2 sequences of {seq_len} bits, stream has {}",
            bits.len()
        )));
    }

    let per_sequence: Vec<[f64; 3]> = (0..m)
        .into_par_iter()
        .map(|i| run_sequence(bits, i * seq_len, seq_len))
        .collect::<Result<_, _>>()?;

    let mut outcomes = Vec::with_capacity(m * TEST_NAMES.len());
    for (i, ps) in per_sequence.iter().enumerate() {
        for (name, &p) in TEST_NAMES.iter().zip(ps) {
            outcomes.push(TestOutcome {
                test_name: (*name).into(),
                p_value: p,
                pass: p >= significance,
                sequence_id: i,
            });
        }
    }

    let (interval_low, interval_high) = proportion_interval(significance, m);
    let tests = TEST_NAMES
        .iter()
        .enumerate()
        .map(|(t, name)| {
            let ps: Vec<f64> = per_sequence.iter().map(|row| row[t]).collect();
            let accepted = ps.iter().filter(|&&p| p >= significance).count();
            let proportion = accepted as f64 / m as f64;
            let p_value_t = if m >= 10 {
                Some(pvalue_uniformity(&ps).expect("m >= 10 P-values in [0,1]"))
            } else {
                None
            };
            TestProportion {
                test_name: (*name).into(),
                proportion,
                interval_low,
                interval_high,
                within_interval: proportion >= interval_low && proportion <= interval_high,
                p_value_t,
            }
        })
        .collect();

    Ok((
        outcomes,
        BatterySummary {
            m,
            s_count: m,
            sequence_bits: seq_len,
            significance,
            tests,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedSchedule;
    use crate::stats::ks_statistic;
    use rand::RngCore;

    fn random_stream(bits: usize, seed: u64) -> BitStream {
        let mut bytes = vec![0u8; bits.div_ceil(8)];
        SeedSchedule::new(seed)
            .substream("battery-test", 0)
            .fill_bytes(&mut bytes);
        BitStream::from_bytes(bytes, bits).unwrap()
    }

    #[test]
    fn interval_matches_published_arithmetic() {
        let (lo, hi) = proportion_interval(0.01, 1500);
        assert!((lo - 0.9823).abs() < 5e-5, "low {lo}");
        assert!((hi - 0.9977).abs() < 5e-5, "high {hi}");
    }

    #[test]
    fn all_zeros_rejects_everywhere() {
        let bits = BitStream::from_bytes(vec![0u8; 4096], 32768).unwrap();
        let (outcomes, summary) = run_battery(&bits, 4096, 0.01).unwrap();
        assert!(outcomes.iter().all(|o| !o.pass));
        for t in &summary.tests {
            assert_eq!(t.proportion, 0.0);
            assert!(!t.within_interval);
        }
    }

    #[test]
    fn prng_stream_passes_battery() {
        let bits = random_stream(100 * 100_000, 1234);
        let (_, summary) = run_battery(&bits, 100_000, 0.01).unwrap();
        for t in &summary.tests {
            assert!(
                t.within_interval,
                "{} proportion {} outside [{}, {}]",
                t.test_name, t.proportion, t.interval_low, t.interval_high
            );
            let pt = t.p_value_t.unwrap();
            assert!(pt > 1e-4, "{} P_value_T = {pt}", t.test_name);
        }
    }

    #[test]
    fn too_few_sequences_is_config_error() {
        let bits = random_stream(4096, 5);
        assert!(matches!(
            run_battery(&bits, 4000, 0.01),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn monobit_null_pvalues_are_uniform() {
        let n_seq = 10_000;
        let seq_bits = 10_000;
        let bits = random_stream(n_seq * seq_bits, 77);
        let p: Vec<f64> = (0..n_seq)
            .map(|i| monobit_test(&bits, i * seq_bits, seq_bits).unwrap())
            .collect();
        let d = ks_statistic(&p, |x| x.clamp(0.0, 1.0));
        let critical = 1.628 / (n_seq as f64).sqrt();
        assert!(d < critical, "KS {d:.4} over {critical:.4}");
    }

    #[test]
    fn block_frequency_null_pvalues_are_uniform() {
        let n_seq = 2_000;
        let seq_bits = 12_800;
        let bits = random_stream(n_seq * seq_bits, 78);
        let p: Vec<f64> = (0..n_seq)
            .map(|i| block_frequency_test(&bits, i * seq_bits, seq_bits).unwrap())
            .collect();
        let d = ks_statistic(&p, |x| x.clamp(0.0, 1.0));
        let critical = 1.628 / (n_seq as f64).sqrt();
        assert!(d < critical, "KS {d:.4} over {critical:.4}");
    }

    #[test]
    fn runs_test_flags_alternation() {
        let mut s = BitStream::new();
        for i in 0..10_000 {
            s.push(i % 2 == 0);
        }
        assert!(runs_test(&s, 0, 10_000).unwrap() < 1e-10);
        // balanced but maximally runny input still passes monobit
        assert!(monobit_test(&s, 0, 10_000).unwrap() > 0.9);
    }

    #[test]
    fn runs_test_null_accepts() {
        let bits = random_stream(1_000_000, 79);
        let p = runs_test(&bits, 0, 1_000_000).unwrap();
        assert!(p > 0.01, "runs p = {p}");
    }

    #[test]
    fn biased_stream_fails_monobit() {
        // 56% ones: far outside the null at 100k bits
        let mut rng = SeedSchedule::new(80).substream("battery-bias", 0);
        let mut s = BitStream::new();
        for _ in 0..100_000 {
            s.push(rng.next_u32() % 100 < 56);
        }
        assert!(monobit_test(&s, 0, 100_000).unwrap() < 1e-6);
    }
}

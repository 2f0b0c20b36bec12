//! Hash-based randomness extraction: packs b-bit samples into a bit
//! stream, hashes consecutive fixed-size bit blocks with a 512-bit
//! digest, and keeps a fraction 1/RF of the digest bits so the output
//! carries the certified entropy.

use crate::bits::BitStream;
use crate::error::Error;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha512};

pub const DIGEST_BITS: usize = 512;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtractionConfig {
    /// raw bits per sample, b
    pub input_bits_per_sample: u32,
    /// reduction factor RF = b / H_min; the compression ratio
    pub reduction_factor: f64,
    /// identifier of the 512-bit hash ("sha-512" is the build default)
    pub hash_algorithm: String,
    /// input bits consumed per hash invocation; blocks are carved from
    /// the packed stream regardless of sample boundaries
    pub block_size: usize,
}

impl ExtractionConfig {
    pub fn new(input_bits_per_sample: u32, reduction_factor: f64) -> Self {
        ExtractionConfig {
            input_bits_per_sample,
            reduction_factor,
            hash_algorithm: "sha-512".into(),
            block_size: DIGEST_BITS,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.input_bits_per_sample == 0 || self.input_bits_per_sample > 16 {
            return Err(Error::Validation(format!(
                "input bits per sample {} outside 1..=16",
                self.input_bits_per_sample
            )));
        }
        if !(self.reduction_factor >= 1.0) {
            return Err(Error::Validation(format!(
                "reduction factor {} < 1: refusing to expand entropy",
                self.reduction_factor
            )));
        }
        if self.hash_algorithm != "sha-512" {
            return Err(Error::Validation(format!(
                "unknown hash algorithm '{}'; available: sha-512",
                self.hash_algorithm
            )));
        }
        if self.block_size < DIGEST_BITS || !self.block_size.is_multiple_of(8) {
            return Err(Error::Validation(format!(
                "block size {} must be a byte-aligned size of at least {DIGEST_BITS} bits",
                self.block_size
            )));
        }
        if self.block_size as f64 / self.reduction_factor > DIGEST_BITS as f64 {
            return Err(Error::Validation(format!(
                "block size {} over RF {} asks for more than {DIGEST_BITS} digest bits",
                self.block_size, self.reduction_factor
            )));
        }
        Ok(())
    }

    /// Output bits contributed by block `i` (1-based), chosen so that any
    /// prefix of i blocks has emitted exactly floor(i·block/RF) bits.
    fn bits_from_block(&self, i: usize) -> usize {
        let per = self.block_size as f64 / self.reduction_factor;
        (i as f64 * per).floor() as usize - ((i - 1) as f64 * per).floor() as usize
    }
}

/// Big-endian bit packing of the low `b` bits of each sample, zero-padded
/// to a byte boundary at the tail.
pub fn pack_samples(samples: &[u16], b: u32) -> Result<BitStream, Error> {
    if b == 0 || b > 16 {
        return Err(Error::Validation(format!(
            "sample width {b} outside 1..=16"
        )));
    }
    let limit = 1u32 << b;
    let mut out = BitStream::with_capacity(samples.len() * b as usize);
    for (i, &s) in samples.iter().enumerate() {
        if (s as u32) >= limit {
            return Err(Error::Validation(format!(
                "sample {s} at index {i} does not fit in {b} bits"
            )));
        }
        out.push_bits(s as u64, b);
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct ExtractionOutcome {
    pub bits: BitStream,
    /// trailing samples none of whose bits reached a hashed block
    pub dropped_tail_samples: usize,
    /// packed bits left over after the last full block
    pub dropped_tail_bits: usize,
    pub blocks_hashed: usize,
}

/// Hashes packed sample blocks and truncates each digest so the output
/// length is exactly floor(blocks · block_size / RF) bits.
pub fn extract(samples: &[u16], cfg: &ExtractionConfig) -> Result<ExtractionOutcome, Error> {
    cfg.validate()?;
    let b = cfg.input_bits_per_sample as usize;
    let packed = pack_samples(samples, cfg.input_bits_per_sample)?;
    let blocks = packed.len() / cfg.block_size;
    if blocks == 0 {
        return Err(Error::Validation(format!(
            "need at least {} packed bits for one block, got {}",
            cfg.block_size,
            packed.len()
        )));
    }
    let consumed_bits = blocks * cfg.block_size;
    let dropped_tail_bits = packed.len() - consumed_bits;
    let dropped_tail_samples = samples.len() - consumed_bits.div_ceil(b);

    let block_bytes = cfg.block_size / 8;
    let digests: Vec<[u8; 64]> = packed.as_bytes()[..blocks * block_bytes]
        .par_chunks(block_bytes)
        .map(|chunk| {
            let mut hasher = Sha512::new();
            hasher.update(chunk);
            hasher.finalize().into()
        })
        .collect();

    let per = cfg.block_size as f64 / cfg.reduction_factor;
    let total_bits = (blocks as f64 * per).floor() as usize;
    let mut out = BitStream::with_capacity(total_bits);
    for (i, digest) in digests.iter().enumerate() {
        let keep = cfg.bits_from_block(i + 1);
        debug_assert!(keep <= DIGEST_BITS);
        for bit in 0..keep {
            out.push((digest[bit / 8] >> (7 - bit % 8)) & 1 == 1);
        }
    }
    debug_assert_eq!(out.len(), total_bits);
    Ok(ExtractionOutcome {
        bits: out,
        dropped_tail_samples,
        dropped_tail_bits,
        blocks_hashed: blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedSchedule;
    use rand::Rng;

    #[test]
    fn pack_layout_is_big_endian() {
        let s = pack_samples(&[0x3FFF, 0x0000], 14).unwrap();
        assert_eq!(s.as_bytes(), &[0xFF, 0xFC, 0x00, 0x00]);
        assert_eq!(s.len(), 28);
    }

    #[test]
    fn pack_single_bits() {
        let s = pack_samples(&[1u16; 8], 1).unwrap();
        assert_eq!(s.as_bytes(), &[0xFF]);
        assert!(pack_samples(&[], 14).unwrap().is_empty());
        assert!(pack_samples(&[2], 1).is_err());
    }

    #[test]
    fn output_length_contract() {
        // 1024 14-bit samples = 14336 bits = exactly 28 blocks of 512;
        // RF = 2 keeps 7168 bits and consumes every sample
        let mut rng = SeedSchedule::new(1).substream("extract-len", 0);
        let samples: Vec<u16> = (0..1024).map(|_| rng.gen_range(0..1 << 14)).collect();
        let cfg = ExtractionConfig::new(14, 2.0);
        let out = extract(&samples, &cfg).unwrap();
        assert_eq!(out.bits.len(), 7168);
        assert_eq!(out.blocks_hashed, 28);
        assert_eq!(out.dropped_tail_samples, 0);
        assert_eq!(out.dropped_tail_bits, 0);
    }

    #[test]
    fn irrational_reduction_factor_totals_exactly() {
        let mut rng = SeedSchedule::new(2).substream("extract-rf", 0);
        let samples: Vec<u16> = (0..3600).map(|_| rng.gen_range(0..1 << 14)).collect();
        let rf = 14.0 / 7.33;
        let out = extract(&samples, &ExtractionConfig::new(14, rf)).unwrap();
        let expected = (out.blocks_hashed as f64 * (512.0 / rf)).floor() as usize;
        assert_eq!(out.bits.len(), expected);
        // 3600*14 = 50400 bits = 98 blocks + 224 spare bits = 16 samples
        assert_eq!(out.blocks_hashed, 98);
        assert_eq!(out.dropped_tail_bits, 224);
        assert_eq!(out.dropped_tail_samples, 16);
    }

    #[test]
    fn extraction_is_deterministic() {
        let mut rng = SeedSchedule::new(3).substream("extract-det", 0);
        let samples: Vec<u16> = (0..500).map(|_| rng.gen_range(0..1 << 14)).collect();
        let cfg = ExtractionConfig::new(14, 1.9);
        let a = extract(&samples, &cfg).unwrap();
        let b = extract(&samples, &cfg).unwrap();
        assert_eq!(a.bits, b.bits);
    }

    #[test]
    fn reduction_below_one_refused() {
        let samples = vec![0u16; 100];
        assert!(matches!(
            extract(&samples, &ExtractionConfig::new(14, 0.99)),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn unknown_hash_refused() {
        let mut cfg = ExtractionConfig::new(14, 2.0);
        cfg.hash_algorithm = "whirlpool".into();
        assert!(extract(&[0u16; 100], &cfg).is_err());
    }

    #[test]
    fn avalanche_flipping_one_input_bit() {
        // flipping any single input bit flips ~50% of that block's output
        let mut rng = SeedSchedule::new(4).substream("extract-aval", 0);
        let cfg = ExtractionConfig::new(16, 1.0); // 32 samples/block, keep all
        let trials = 1000;
        let mut flipped = Vec::with_capacity(trials);
        for _ in 0..trials {
            let mut samples: Vec<u16> = (0..32).map(|_| rng.gen()).collect();
            let base = extract(&samples, &cfg).unwrap().bits;
            samples[rng.gen_range(0..32)] ^= 1 << rng.gen_range(0..16);
            let alt = extract(&samples, &cfg).unwrap().bits;
            let dist = base
                .as_bytes()
                .iter()
                .zip(alt.as_bytes())
                .map(|(x, y)| (x ^ y).count_ones() as usize)
                .sum::<usize>();
            flipped.push(dist as f64 / 512.0);
        }
        let mean = flipped.iter().sum::<f64>() / trials as f64;
        // null: Binomial(512, 1/2)/512 averaged over trials
        let sigma = 0.5 / (512.0f64 * trials as f64).sqrt();
        assert!(
            (mean - 0.5).abs() < 3.0 * sigma,
            "avalanche mean {mean} vs 0.5 +- {:.2e}",
            3.0 * sigma
        );
    }

    #[test]
    fn nominal_reduction_maps_14_to_about_7() {
        // RF near 1.9: every consumed 14-bit sample yields ~7.37 bits
        let mut rng = SeedSchedule::new(5).substream("extract-79", 0);
        let samples: Vec<u16> = (0..3600).map(|_| rng.gen_range(0..1 << 14)).collect();
        let out = extract(&samples, &ExtractionConfig::new(14, 1.9)).unwrap();
        let consumed = (out.blocks_hashed * 512) as f64 / 14.0;
        let per_sample = out.bits.len() as f64 / consumed;
        assert!(
            (per_sample - 14.0 / 1.9).abs() < 0.01,
            "{per_sample} bits/sample"
        );
    }
}

//! Pipeline configuration: one TOML file drives every stage.

use crate::error::Error;
use crate::extractor::{ExtractionConfig, DIGEST_BITS};
use crate::interferometer::{AdcConfig, InterferometerConfig};
use crate::laser::{DriveWaveform, LaserParams};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LaserSection {
    #[serde(flatten)]
    pub params: LaserParams,
    /// fit parameters against the reference trace before simulating
    #[serde(default)]
    pub fit_mode: bool,
    /// two-column time/power CSV of the observed filtered pulse train
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_trace: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSection {
    /// pulses to generate, N
    pub pulses: u64,
    /// master seed; every stage derives named substreams from it
    pub seed: u64,
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtractionSection {
    pub hash_algorithm: String,
    pub block_size: usize,
    /// overrides the certified b/H reduction factor when set
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduction_factor: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatsSection {
    /// bits per sequence fed to the battery
    pub seq_len: usize,
    /// sequences to test; None uses every full sequence in the stream
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// significance level for every test
    pub significance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub laser: LaserSection,
    pub drive: DriveWaveform,
    pub interferometer: InterferometerConfig,
    pub adc: AdcConfig,
    pub run: RunSection,
    pub extraction: ExtractionSection,
    pub stats: StatsSection,
}

impl PipelineConfig {
    /// Reference operating point: every constant of the measured device.
    pub fn reference_defaults() -> Self {
        let drive = DriveWaveform::reference_defaults();
        let prf = drive.prf;
        PipelineConfig {
            laser: LaserSection {
                params: LaserParams::reference_defaults(),
                fit_mode: false,
                reference_trace: None,
            },
            drive,
            interferometer: InterferometerConfig {
                coupler1: (
                    std::f64::consts::FRAC_1_SQRT_2,
                    std::f64::consts::FRAC_1_SQRT_2,
                ),
                coupler2: (
                    std::f64::consts::FRAC_1_SQRT_2,
                    std::f64::consts::FRAC_1_SQRT_2,
                ),
                arm_delay1: 0.0,
                arm_delay2: 1.0 / prf,
                static_phase: 0.0,
                visibility: 0.90,
                detector_bandwidth: 12.5e9,
                mean_u1: 0.97e-3,
                mean_u2: 0.90e-3,
                // between the per-arm measured variances 2.0 and 2.1 mW²
                arm_sigma: 4.5e-5,
            },
            adc: AdcConfig {
                resolution_bits: 14,
                range: 5e-3,
                noise_variance: 1.45e-10,
                sample_offset: 0.0,
            },
            run: RunSection {
                pulses: 1_500_000,
                seed: 42,
                out_dir: PathBuf::from("out"),
            },
            extraction: ExtractionSection {
                hash_algorithm: "sha-512".into(),
                block_size: DIGEST_BITS,
                reduction_factor: None,
            },
            stats: StatsSection {
                seq_len: 1_000_000,
                m: None,
                significance: 0.01,
            },
        }
    }

    /// Extraction config at a certified reduction factor, honoring any
    /// configured override.
    pub fn extraction_config(&self, certified_rf: f64) -> ExtractionConfig {
        ExtractionConfig {
            input_bits_per_sample: self.adc.resolution_bits,
            reduction_factor: self.extraction.reduction_factor.unwrap_or(certified_rf),
            hash_algorithm: self.extraction.hash_algorithm.clone(),
            block_size: self.extraction.block_size,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        self.laser.params.validate()?;
        self.drive.validate()?;
        self.interferometer.validate()?;
        self.adc.validate()?;
        if self.run.pulses < 2 {
            return Err(Error::Validation(format!(
                "need at least 2 pulses to interfere, got {}",
                self.run.pulses
            )));
        }
        if self.laser.fit_mode && self.laser.reference_trace.is_none() {
            return Err(Error::Validation(
                "fit mode requires laser.reference_trace".into(),
            ));
        }
        if let Some(path) = &self.laser.reference_trace {
            if !path.exists() {
                return Err(Error::Validation(format!(
                    "reference trace {} does not exist",
                    path.display()
                )));
            }
        }
        if let Some(rf) = self.extraction.reduction_factor {
            if !(rf >= 1.0) {
                return Err(Error::Validation(format!(
                    "configured reduction factor {rf} < 1"
                )));
            }
        }
        if self.stats.seq_len < 256 {
            return Err(Error::Validation(format!(
                "stats.seq_len {} too short for the test subset",
                self.stats.seq_len
            )));
        }
        if !(0.0 < self.stats.significance && self.stats.significance < 1.0) {
            return Err(Error::Validation(format!(
                "stats.significance {} outside (0,1)",
                self.stats.significance
            )));
        }
        if !self.interferometer.delay_matches_prf(self.drive.prf) {
            return Err(Error::Validation(format!(
                "arm imbalance {:.4e} s does not match the pulse period {:.4e} s",
                self.interferometer.arm_delay2 - self.interferometer.arm_delay1,
                1.0 / self.drive.prf
            )));
        }
        Ok(())
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_toml_str(text: &str) -> Result<Self, Error> {
        toml::from_str(text).map_err(|e| Error::Validation(format!("config parse: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Validation(format!("config {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }
}

//! Rate-equation parameter set and its consistency rules.

use crate::error::Error;
use serde::{Deserialize, Serialize};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0; // m/s
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19; // C
pub const PLANCK_CONSTANT: f64 = 6.626_070_15e-34; // J s

/// Gain-switched laser-diode parameters.
///
/// Two derived quantities are stored redundantly and checked instead of
/// recomputed, so that a config file always states the numbers it ran with:
/// `cavity_decay` = c(α_m+α_s)/n̄ and `gain_per_carrier` = γ/(n_th−n0).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LaserParams {
    /// G_N: modal gain per carrier above transparency, 1/s
    pub gain_per_carrier: f64,
    /// n0: carrier number at transparency
    pub carriers_transparency: f64,
    /// n_th: carrier number at threshold
    pub carriers_threshold: f64,
    /// s_sat: photon number scale of gain compression
    pub photon_saturation: f64,
    /// γ_e: carrier recombination rate, 1/s
    pub carrier_decay: f64,
    /// γ: cavity photon decay rate, 1/s
    pub cavity_decay: f64,
    /// α: linewidth enhancement factor
    pub linewidth_enhancement: f64,
    /// R0: spontaneous-emission coupling, R_sp = n·γ_e·R0
    pub spont_coupling: f64,
    /// L: cavity length, m
    pub cavity_length: f64,
    /// n̄: group effective index
    pub effective_index: f64,
    /// α_s: internal scatter loss, 1/m
    pub scatter_loss: f64,
    /// α_m: mirror loss, 1/m (≈ 1.4/L for as-cleaved facets)
    pub mirror_loss: f64,
    /// q: charge per injected carrier, C
    pub electron_charge: f64,
    /// λ: emission wavelength, m
    pub wavelength: f64,
    /// fraction of the mirror-escape power reaching the detector
    pub collection_efficiency: f64,
}

const CONSISTENCY_TOL: f64 = 1e-9;

impl LaserParams {
    /// The fitted device of the reference experiment: a 500 µm Fabry-Perot
    /// diode at 1550 nm, G_N = 2.3e4 /s, n_th = 5.62e7, s_sat = 7.7e5,
    /// R0 = 8.8e-4, γ_e = 1e9 /s, α = 5.4.
    pub fn reference_defaults() -> Self {
        let p = LaserParams {
            gain_per_carrier: 2.3e4,
            carriers_transparency: 0.0, // derived below
            carriers_threshold: 5.62e7,
            photon_saturation: 7.7e5,
            carrier_decay: 1e9,
            cavity_decay: 0.0, // derived below
            linewidth_enhancement: 5.4,
            spont_coupling: 8.8e-4,
            cavity_length: 500e-6,
            effective_index: 4.33,
            scatter_loss: 450.0,
            mirror_loss: 0.0, // derived below
            electron_charge: ELEMENTARY_CHARGE,
            wavelength: 1550e-9,
            collection_efficiency: 0.64,
        };
        p.derive_consistent()
    }

    /// Recompute the dependent fields (α_m, γ, n0) from the primary ones
    /// (L, n̄, α_s, n_th, G_N). Fit candidates go through this whenever
    /// geometry or gain changes.
    pub fn derive_consistent(mut self) -> Self {
        self.mirror_loss = 1.4 / self.cavity_length;
        self.cavity_decay =
            SPEED_OF_LIGHT * (self.mirror_loss + self.scatter_loss) / self.effective_index;
        self.carriers_transparency =
            self.carriers_threshold - self.cavity_decay / self.gain_per_carrier;
        self
    }

    pub fn validate(&self) -> Result<(), Error> {
        let positive = [
            ("gain_per_carrier", self.gain_per_carrier),
            ("carriers_transparency", self.carriers_transparency),
            ("carriers_threshold", self.carriers_threshold),
            ("photon_saturation", self.photon_saturation),
            ("carrier_decay", self.carrier_decay),
            ("cavity_decay", self.cavity_decay),
            ("spont_coupling", self.spont_coupling),
            ("cavity_length", self.cavity_length),
            ("effective_index", self.effective_index),
            ("scatter_loss", self.scatter_loss),
            ("mirror_loss", self.mirror_loss),
            ("electron_charge", self.electron_charge),
            ("wavelength", self.wavelength),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Validation(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.linewidth_enhancement < 0.0 {
            return Err(Error::Validation(
                "linewidth_enhancement must be >= 0".into(),
            ));
        }
        if !(self.collection_efficiency > 0.0 && self.collection_efficiency <= 1.0) {
            return Err(Error::Validation(format!(
                "collection_efficiency must be in (0,1], got {}",
                self.collection_efficiency
            )));
        }
        if self.carriers_threshold <= self.carriers_transparency {
            return Err(Error::Validation(format!(
                "carriers_threshold {} must exceed carriers_transparency {}",
                self.carriers_threshold, self.carriers_transparency
            )));
        }
        let gamma_geom =
            SPEED_OF_LIGHT * (self.mirror_loss + self.scatter_loss) / self.effective_index;
        if rel_err(self.cavity_decay, gamma_geom) > CONSISTENCY_TOL {
            return Err(Error::Validation(format!(
                "cavity_decay {} inconsistent with c(mirror_loss+scatter_loss)/effective_index = {}",
                self.cavity_decay, gamma_geom
            )));
        }
        let gain_from_decay =
            self.cavity_decay / (self.carriers_threshold - self.carriers_transparency);
        if rel_err(self.gain_per_carrier, gain_from_decay) > CONSISTENCY_TOL {
            return Err(Error::Validation(format!(
                "gain_per_carrier {} inconsistent with cavity_decay/(n_th - n0) = {}",
                self.gain_per_carrier, gain_from_decay
            )));
        }
        Ok(())
    }

    /// γ_m = c·α_m/n̄: rate at which cavity photons escape through the mirrors.
    pub fn mirror_escape_rate(&self) -> f64 {
        SPEED_OF_LIGHT * self.mirror_loss / self.effective_index
    }

    /// Single-photon energy hc/λ, J.
    pub fn photon_energy(&self) -> f64 {
        PLANCK_CONSTANT * SPEED_OF_LIGHT / self.wavelength
    }

    /// Detected watts per intracavity photon: ħω·γ_m scaled by the
    /// collection efficiency. This is the power-to-photon conversion used
    /// everywhere (trajectory export, threshold extraction, fitting).
    pub fn watts_per_photon(&self) -> f64 {
        self.photon_energy() * self.mirror_escape_rate() * self.collection_efficiency
    }

    /// R_sp(n) = n·γ_e·R0, 1/s.
    pub fn spontaneous_rate(&self, carriers: f64) -> f64 {
        carriers * self.carrier_decay * self.spont_coupling
    }
}

impl Default for LaserParams {
    fn default() -> Self {
        Self::reference_defaults()
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_match_known_constants() {
        let p = LaserParams::reference_defaults();
        p.validate().unwrap();
        assert!(rel_err(p.mirror_loss, 2800.0) < 1e-12);
        assert!((p.cavity_decay - 2.250174338337182e11).abs() / 2.25e11 < 1e-12);
        assert!((p.carriers_transparency - 4.641663331157747e7).abs() / 4.6e7 < 1e-12);
        // detected conversion: hc/λ · c·α_m/n̄ · 0.64
        assert!((p.watts_per_photon() - 1.590068543943799e-8).abs() / 1.59e-8 < 1e-12);
    }

    #[test]
    fn inconsistent_gain_rejected() {
        let mut p = LaserParams::reference_defaults();
        p.gain_per_carrier *= 1.001;
        assert!(p.validate().is_err());
        p = p.derive_consistent();
        p.validate().unwrap();
    }

    #[test]
    fn inconsistent_decay_rejected() {
        let mut p = LaserParams::reference_defaults();
        p.cavity_decay *= 1.0 + 1e-6;
        assert!(p.validate().is_err());
    }

    #[test]
    fn threshold_must_exceed_transparency() {
        let mut p = LaserParams::reference_defaults();
        p.carriers_threshold = p.carriers_transparency * 0.5;
        assert!(p.validate().is_err());
    }

    #[test]
    fn derive_consistent_tracks_geometry() {
        let mut p = LaserParams::reference_defaults();
        p.cavity_length = 100e-6;
        let p = p.derive_consistent();
        p.validate().unwrap();
        assert!(rel_err(p.mirror_loss, 14000.0) < 1e-12);
        assert!(p.cavity_decay > 2.25e11); // shorter cavity decays faster
    }
}

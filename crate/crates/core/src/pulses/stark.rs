//! Intensity → Rabi frequency, dynamic Stark shift and effective two-photon
//! coupling.

use serde::Serialize;

use super::constants::{angular_frequency, field_squared, HBAR, PER_NS};
use super::mercury::{MercuryData, TransitionRecord, GROUND, TARGET};
use crate::{Error, Result};

/// Denominators smaller than this fraction of the smallest contributing
/// transition frequency are treated as resonant.
const RESONANCE_FRACTION: f64 = 1e-3;

fn check_intensity(i: f64) -> Result<()> {
    if !i.is_finite() {
        return Err(Error::NonFinite("intensity"));
    }
    if i < 0.0 {
        return Err(Error::NegativeIntensity(i));
    }
    Ok(())
}

/// Ω = dℰ/ħ in rad/ns for a field of `intensity` W/cm².
pub fn rabi_from_intensity(transition: &TransitionRecord, intensity: f64) -> Result<f64> {
    check_intensity(intensity)?;
    Ok(transition.dipole_si() * field_squared(intensity).sqrt() / HBAR / PER_NS)
}

/// Inverse of [`rabi_from_intensity`]: W/cm² needed for `omega` rad/ns.
pub fn intensity_for_rabi(transition: &TransitionRecord, omega: f64) -> Result<f64> {
    let per_sqrt = rabi_from_intensity(transition, 1.0)?;
    Ok((omega / per_sqrt).powi(2))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct StarkTerm {
    label: String,
    /// |d₃ⱼ|², C²m².
    dipole_sq: f64,
    /// (E_j − E₃)/ħ, rad/s.
    offset: f64,
}

/// Second-order light shift of one level by a nonresonant field.
///
/// Each contributing level `j` adds `|d₃ⱼ|²/(E_j − E₃ + ħω_S)`; with the
/// shipped mercury data at 1064 nm this reproduces −1885 s⁻¹ per W/cm².
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StarkContext {
    pub state: String,
    pub wavelength_nm: f64,
    terms: Vec<StarkTerm>,
}

impl StarkContext {
    pub fn new(
        data: &MercuryData,
        state: &str,
        wavelength_nm: f64,
        contributors: &[&str],
    ) -> Result<Self> {
        if !(wavelength_nm.is_finite() && wavelength_nm > 0.0) {
            return Err(Error::invalid("stark wavelength", format!("{wavelength_nm} nm")));
        }
        if contributors.is_empty() {
            return Err(Error::invalid("stark contributors", "at least one level required"));
        }
        let e3 = data.level_energy(state)?;
        let terms = contributors
            .iter()
            .map(|j| {
                let r = data.transition(state, j)?;
                Ok(StarkTerm {
                    label: (*j).to_string(),
                    dipole_sq: r.dipole_si().powi(2),
                    offset: data.level_energy(j)? - e3,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(StarkContext {
            state: state.to_string(),
            wavelength_nm,
            terms,
        })
    }

    /// Shift of 7¹S₀ from 6¹P₁ and 7¹P₁.
    pub fn mercury(data: &MercuryData, wavelength_nm: f64) -> Result<Self> {
        Self::new(data, TARGET, wavelength_nm, &["6^1P_1", "7^1P_1"])
    }

    /// Signed shift of the level's energy, in rad/s per W/cm².
    pub fn coefficient(&self) -> Result<f64> {
        let w = angular_frequency(self.wavelength_nm);
        let min_offset = self
            .terms
            .iter()
            .map(|t| t.offset.abs())
            .fold(f64::INFINITY, f64::min);
        let mut sum = 0.0;
        for t in &self.terms {
            let den = t.offset + w;
            if den.abs() <= RESONANCE_FRACTION * min_offset {
                return Err(Error::ResonantDenominator {
                    transition: format!("{}<->{}", self.state, t.label),
                    detuning: den,
                });
            }
            sum += t.dipole_sq / (HBAR * den);
        }
        Ok(field_squared(1.0) / (4.0 * HBAR) * sum)
    }
}

/// Magnitude Δ_S (rad/ns) of the Stark shift for `intensity` W/cm².
pub fn stark_shift_from_intensity(ctx: &StarkContext, intensity: f64) -> Result<f64> {
    check_intensity(intensity)?;
    Ok(ctx.coefficient()?.abs() * intensity / PER_NS)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct TwoPhotonTerm {
    label: String,
    /// d₁ⱼ dⱼ₃, C²m².
    dipole_product: f64,
    /// (E_j − E₁)/ħ, rad/s.
    offset: f64,
}

/// Effective two-photon coupling between the ground and target states through
/// nonresonant intermediate levels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoPhotonContext {
    pub wavelength_nm: f64,
    terms: Vec<TwoPhotonTerm>,
}

impl TwoPhotonContext {
    pub fn new(data: &MercuryData, wavelength_nm: f64, intermediates: &[&str]) -> Result<Self> {
        if !(wavelength_nm.is_finite() && wavelength_nm > 0.0) {
            return Err(Error::invalid("pump wavelength", format!("{wavelength_nm} nm")));
        }
        if intermediates.is_empty() {
            return Err(Error::invalid("intermediates", "at least one level required"));
        }
        let terms = intermediates
            .iter()
            .map(|j| {
                let d1 = data.transition(GROUND, j)?.dipole_si();
                let d3 = data.transition(j, TARGET)?.dipole_si();
                Ok(TwoPhotonTerm {
                    label: (*j).to_string(),
                    dipole_product: d1 * d3,
                    offset: data.level_energy(j)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TwoPhotonContext {
            wavelength_nm,
            terms,
        })
    }

    /// 6³P₁, 6¹P₁, 7¹P₁ and 9¹P₁ intermediates.
    pub fn mercury(data: &MercuryData, wavelength_nm: f64) -> Result<Self> {
        Self::new(
            data,
            wavelength_nm,
            &["6^3P_1", "6^1P_1", "7^1P_1", "9^1P_1"],
        )
    }

    /// Ω_eff in rad/s per W/cm².
    pub fn coefficient(&self) -> Result<f64> {
        let w = angular_frequency(self.wavelength_nm);
        let min_offset = self
            .terms
            .iter()
            .map(|t| t.offset.abs())
            .fold(f64::INFINITY, f64::min);
        let mut sum = 0.0;
        for t in &self.terms {
            let den = t.offset - w;
            if den.abs() <= RESONANCE_FRACTION * min_offset {
                return Err(Error::ResonantDenominator {
                    transition: format!("{GROUND}<->{}", t.label),
                    detuning: den,
                });
            }
            sum += t.dipole_product / (HBAR * den);
        }
        Ok(field_squared(1.0) / (2.0 * HBAR) * sum)
    }

    /// Pump intensity (W/cm²) giving `omega_eff` rad/ns.
    pub fn intensity_for(&self, omega_eff: f64) -> Result<f64> {
        Ok(omega_eff * PER_NS / self.coefficient()?.abs())
    }
}

/// Ω_eff (rad/ns) for a pump of `intensity` W/cm².
pub fn effective_two_photon_rabi(ctx: &TwoPhotonContext, intensity: f64) -> Result<f64> {
    check_intensity(intensity)?;
    Ok(ctx.coefficient()? * intensity / PER_NS)
}

//! Scenario files: TOML with unit-suffixed quantities.
//!
//! Every dimensional value is a string such as `"0.8 ns"`, `"16 MW/cm2"`,
//! `"1064 nm"` or `"20 rad/ns"`; bare numbers are rejected for them. Two
//! relative units are accepted: `T` (the pulse width) for times and
//! `delta2` (Δ₂) or `/T` for frequencies.
//!
//! ```toml
//! protocol = "SACS"
//! shape = "sine-squared"
//! width = "1 ns"
//! delay = "0.8 ns"
//!
//! [drive1]
//! intensity = "0.9 MW/cm2"
//! [drive2]
//! intensity = "1.9 MW/cm2"
//! [stark]
//! intensity = "16 MW/cm2"
//! wavelength = "1064 nm"
//! [detuning]
//! delta2 = "20 rad/ns"
//! delta3 = "-20 rad/ns"
//! ```

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize};

use super::{
    make_gaussian_pair, make_half_scrap, make_sacs, make_stirap, GaussianPairParams,
    HalfScrapParams, Protocol, SacsParams, ScenarioConfig, StirapParams,
};
use crate::propagator::TimeGrid;
use crate::pulses::constants::PER_NS;
use crate::pulses::{
    effective_two_photon_rabi, rabi_from_intensity, stark_shift_from_intensity, EnvelopeShape,
    MercuryData, StarkContext, TwoPhotonContext,
};
use crate::{Error, Result};

/// A number with a unit suffix, kept unresolved until the context (Δ₂, T)
/// is known.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quantity {
    pub value: f64,
    pub unit: String,
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let split = s
            .char_indices()
            .find(|&(i, c)| {
                !(c.is_ascii_digit() || c == '.' || c == '-' || c == '+')
                    && !((c == 'e' || c == 'E')
                        && s[i + 1..].starts_with(|d: char| d.is_ascii_digit() || d == '-' || d == '+'))
            })
            .map_or(s.len(), |(i, _)| i);
        let (num, unit) = s.split_at(split);
        let value: f64 = num
            .parse()
            .map_err(|_| Error::Config(format!("cannot read a number from '{s}'")))?;
        if !value.is_finite() {
            return Err(Error::Config(format!("non-finite quantity '{s}'")));
        }
        let unit = unit.trim().to_string();
        if unit.is_empty() {
            return Err(Error::Config(format!("'{s}' needs a unit")));
        }
        Ok(Quantity { value, unit })
    }
}

impl<'de> Deserialize<'de> for Quantity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = Quantity;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a quantity string with a unit, e.g. \"0.8 ns\"")
            }
            fn visit_str<E: serde::de::Error>(self, s: &str) -> std::result::Result<Quantity, E> {
                s.parse().map_err(E::custom)
            }
        }
        d.deserialize_str(V)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.value, self.unit)
    }
}

/// Scales for relative units.
#[derive(Debug, Clone, Copy)]
pub struct UnitContext {
    pub delta2: f64,
    pub width: f64,
}

impl Quantity {
    fn wrong(&self, kind: &str) -> Error {
        Error::Config(format!("'{self}' is not a {kind}"))
    }

    /// ns.
    pub fn time(&self, ctx: Option<&UnitContext>) -> Result<f64> {
        let f = match self.unit.as_str() {
            "ns" => 1.0,
            "ps" => 1e-3,
            "fs" => 1e-6,
            "us" | "µs" => 1e3,
            "s" => 1e9,
            "T" => ctx.ok_or_else(|| self.wrong("time without a known width"))?.width,
            _ => return Err(self.wrong("time")),
        };
        Ok(self.value * f)
    }

    /// rad/ns.
    pub fn frequency(&self, ctx: Option<&UnitContext>) -> Result<f64> {
        let f = match self.unit.as_str() {
            "rad/ns" | "1/ns" | "/ns" | "ns^-1" => 1.0,
            "rad/us" | "1/us" => 1e-3,
            "rad/ps" | "1/ps" => 1e3,
            "rad/s" | "1/s" => 1.0 / PER_NS,
            "delta2" | "Δ₂" => ctx.ok_or_else(|| self.wrong("frequency without a known Δ₂"))?.delta2,
            "/T" | "1/T" => 1.0 / ctx.ok_or_else(|| self.wrong("frequency without a known width"))?.width,
            _ => return Err(self.wrong("frequency")),
        };
        Ok(self.value * f)
    }

    /// W/cm².
    pub fn intensity(&self) -> Result<f64> {
        let f = match self.unit.as_str() {
            "W/cm2" => 1.0,
            "kW/cm2" => 1e3,
            "MW/cm2" => 1e6,
            "GW/cm2" => 1e9,
            "W/m2" => 1e-4,
            _ => return Err(self.wrong("intensity")),
        };
        Ok(self.value * f)
    }

    /// nm.
    pub fn wavelength(&self) -> Result<f64> {
        let f = match self.unit.as_str() {
            "nm" => 1.0,
            "um" | "µm" => 1e3,
            "A" | "Å" => 0.1,
            _ => return Err(self.wrong("wavelength")),
        };
        Ok(self.value * f)
    }

    /// rad.
    pub fn angle(&self) -> Result<f64> {
        let f = match self.unit.as_str() {
            "rad" => 1.0,
            "deg" | "°" => PI / 180.0,
            "pi" | "π" => PI,
            _ => return Err(self.wrong("angle")),
        };
        Ok(self.value * f)
    }
}

/// A field given by intensity (converted with the mercury data) or directly
/// as a Rabi frequency.
#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    pub intensity: Option<Quantity>,
    pub rabi: Option<Quantity>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct StarkSection {
    pub intensity: Option<Quantity>,
    pub shift: Option<Quantity>,
    pub wavelength: Option<Quantity>,
    pub width: Option<Quantity>,
    /// Centre offset after the Stokes pulse (Gaussian pair only).
    pub offset: Option<Quantity>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DetuningSection {
    pub delta2: Option<Quantity>,
    pub delta3: Option<Quantity>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub dt: Option<Quantity>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FStirapSection {
    pub alpha: Quantity,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct HalfScrapSection {
    pub wavelength: Option<Quantity>,
    pub intensity: Option<Quantity>,
    pub omega_eff: Option<Quantity>,
    pub readout: Option<Quantity>,
    /// Δ_P^max / Ω_eff^max.
    pub pump_shift: Option<f64>,
    pub static_detuning: Option<Quantity>,
    pub readout_detuning: Option<Quantity>,
}

/// One sweep axis. `min`/`max` carry units; relative units (`delta2`, `T`,
/// `/T`) are resolved against the scenario.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSection {
    pub min: Quantity,
    pub max: Quantity,
    pub count: usize,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Detuning, Stokes peak or Rabi-frequency axis.
    pub x: Option<AxisSection>,
    /// Delay or Stark axis.
    pub y: Option<AxisSection>,
    /// Level for `levelline`, as a frequency.
    pub level: Option<Quantity>,
    /// Stark coordinate of the level-line anchor (Ω = 0).
    pub anchor: Option<Quantity>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub protocol: Protocol,
    pub shape: Option<EnvelopeShape>,
    pub width: Option<Quantity>,
    pub delay: Option<Quantity>,
    pub beta: Option<Quantity>,
    #[serde(default)]
    pub weight_control: bool,
    /// Use the Gaussian pump/Stokes/Stark layout of the contour sweeps.
    #[serde(default)]
    pub gaussian_pair: bool,
    /// Mercury data file; the shipped table when absent.
    pub data: Option<PathBuf>,
    #[serde(default)]
    pub drive1: DriveSection,
    #[serde(default)]
    pub drive2: DriveSection,
    pub stark: Option<StarkSection>,
    #[serde(default)]
    pub detuning: DetuningSection,
    #[serde(default)]
    pub grid: GridSection,
    pub fstirap: Option<FStirapSection>,
    pub half_scrap: Option<HalfScrapSection>,
    pub sweep: Option<SweepSection>,
}

/// Quantities derived from laboratory inputs, reported alongside results.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Derived {
    pub values: BTreeMap<String, f64>,
}

impl Derived {
    fn set(&mut self, k: &str, v: f64) {
        self.values.insert(k.to_string(), v);
    }
}

/// A parsed and resolved scenario file.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub file: ConfigFile,
    pub scenario: ScenarioConfig,
    pub grid: TimeGrid,
    pub context: UnitContext,
    pub derived: Derived,
    /// Stark peak Δ_S^max, rad/ns (zero if absent).
    pub stark_peak: f64,
    /// Gaussian-pair parameters when `gaussian_pair` is set.
    pub pair: Option<GaussianPairParams>,
    pub data: MercuryData,
}

fn need<'a>(q: &'a Option<Quantity>, what: &str) -> Result<&'a Quantity> {
    q.as_ref()
        .ok_or_else(|| Error::Config(format!("missing {what}")))
}

impl LoadedConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path.parent())
    }

    /// Parse `text`; a relative `data` path resolves against `base`.
    pub fn parse(text: &str, base: Option<&Path>) -> Result<Self> {
        let file: ConfigFile =
            toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        Self::resolve(file, base)
    }

    pub fn resolve(file: ConfigFile, base: Option<&Path>) -> Result<Self> {
        let data = match &file.data {
            None => MercuryData::shipped(),
            Some(p) => {
                let p = match base {
                    Some(b) if p.is_relative() => b.join(p),
                    _ => p.clone(),
                };
                MercuryData::load(&p).map_err(|e| Error::Config(e.to_string()))?
            }
        };
        let mut derived = Derived::default();
        let width = need(&file.width, "width")?.time(None)?;
        if !(width > 0.0) {
            return Err(Error::Config(format!("width must be > 0, got {width} ns")));
        }
        let delta2 = match &file.detuning.delta2 {
            Some(q) => q.frequency(Some(&UnitContext { delta2: 0.0, width }))?,
            None => 0.0,
        };
        let ctx = UnitContext { delta2, width };
        let delta3 = match &file.detuning.delta3 {
            Some(q) => q.frequency(Some(&ctx))?,
            None => -delta2,
        };
        let delay = match &file.delay {
            Some(q) => q.time(Some(&ctx))?,
            None => 0.0,
        };
        let beta = match &file.beta {
            Some(q) => q.angle()?,
            None => 0.0,
        };
        let (t1, t2) = data.driving_transitions()?;
        let drive = |d: &DriveSection, tr, key: &str, derived: &mut Derived| -> Result<f64> {
            match (&d.intensity, &d.rabi) {
                (Some(i), None) => {
                    let i = i.intensity()?;
                    let o = rabi_from_intensity(tr, i)?;
                    derived.set(&format!("{key}_intensity_w_cm2"), i);
                    derived.set(&format!("{key}_rabi_rad_ns"), o);
                    Ok(o)
                }
                (None, Some(r)) => {
                    let o = r.frequency(Some(&ctx))?;
                    derived.set(&format!("{key}_rabi_rad_ns"), o);
                    Ok(o)
                }
                (None, None) => Ok(0.0),
                _ => Err(Error::Config(format!("{key}: give intensity or rabi, not both"))),
            }
        };
        let omega1 = drive(&file.drive1, t1, "drive1", &mut derived)?;
        let omega2 = drive(&file.drive2, t2, "drive2", &mut derived)?;
        let stark_sec = file.stark.clone().unwrap_or_default();
        let stark_peak = match (&stark_sec.intensity, &stark_sec.shift) {
            (Some(i), None) => {
                let nm = need(&stark_sec.wavelength, "stark.wavelength")?.wavelength()?;
                let sc = StarkContext::mercury(&data, nm)?;
                let i = i.intensity()?;
                let s = stark_shift_from_intensity(&sc, i)?;
                derived.set("stark_coefficient_per_w_cm2", sc.coefficient()?);
                derived.set("stark_intensity_w_cm2", i);
                derived.set("stark_peak_rad_ns", s);
                s
            }
            (None, Some(s)) => {
                let s = s.frequency(Some(&ctx))?;
                derived.set("stark_peak_rad_ns", s);
                s
            }
            (None, None) => 0.0,
            _ => return Err(Error::Config("stark: give intensity or shift, not both".into())),
        };
        let stark_width = match &stark_sec.width {
            Some(q) => q.time(Some(&ctx))?,
            None => width,
        };
        let shape = file.shape.unwrap_or(EnvelopeShape::SineSquared);

        let pair = if file.gaussian_pair {
            if !matches!(file.protocol, Protocol::Sacs | Protocol::Stirap) {
                return Err(Error::Config("gaussian_pair applies to SACS or STIRAP".into()));
            }
            Some(GaussianPairParams {
                pump: omega1,
                stokes: omega2,
                stark: stark_peak,
                width,
                delay,
                stark_offset: match &stark_sec.offset {
                    Some(q) => q.time(Some(&ctx))?,
                    None => width,
                },
                delta2,
                beta,
            })
        } else {
            None
        };
        let scenario = match (&pair, file.protocol) {
            (Some(p), _) => make_gaussian_pair(p)?,
            (None, Protocol::Sacs) => make_sacs(&SacsParams {
                shape,
                omega1,
                omega2,
                stark: stark_peak,
                width,
                stark_width,
                delay,
                delta2,
                two_photon_detuning: delta2 + delta3,
                beta,
                weight_control: file.weight_control,
            })?,
            (None, Protocol::Stirap | Protocol::FStirap) => {
                if (delta2 + delta3).abs() > 1e-12 * delta2.abs().max(1.0) {
                    return Err(Error::Config(
                        "STIRAP needs two-photon resonance (delta3 = -delta2)".into(),
                    ));
                }
                let alpha = match (&file.protocol, &file.fstirap) {
                    (Protocol::FStirap, Some(f)) => Some(f.alpha.angle()?),
                    (Protocol::FStirap, None) => {
                        return Err(Error::Config("F-STIRAP needs [fstirap] alpha".into()))
                    }
                    _ => None,
                };
                make_stirap(
                    &StirapParams {
                        pump: omega1,
                        stokes: omega2,
                        width,
                        delay,
                        delta2,
                        beta,
                    },
                    alpha,
                )?
            }
            (None, Protocol::HalfScrap) => {
                let h = file
                    .half_scrap
                    .clone()
                    .ok_or_else(|| Error::Config("HALF-SCRAP needs a [half_scrap] section".into()))?;
                let omega_eff = match (&h.intensity, &h.omega_eff) {
                    (Some(i), None) => {
                        let nm = need(&h.wavelength, "half_scrap.wavelength")?.wavelength()?;
                        let tp = TwoPhotonContext::mercury(&data, nm)?;
                        let i = i.intensity()?;
                        let o = effective_two_photon_rabi(&tp, i)?.abs();
                        derived.set("two_photon_coefficient_per_w_cm2", tp.coefficient()?);
                        derived.set("pump_intensity_w_cm2", i);
                        o
                    }
                    (None, Some(o)) => {
                        let o = o.frequency(Some(&ctx))?;
                        if let Some(nm) = &h.wavelength {
                            let tp = TwoPhotonContext::mercury(&data, nm.wavelength()?)?;
                            derived.set("two_photon_coefficient_per_w_cm2", tp.coefficient()?);
                            derived.set("pump_intensity_w_cm2", tp.intensity_for(o)?);
                        }
                        o
                    }
                    _ => {
                        return Err(Error::Config(
                            "half_scrap: give exactly one of intensity or omega_eff".into(),
                        ))
                    }
                };
                derived.set("omega_eff_rad_ns", omega_eff);
                make_half_scrap(&HalfScrapParams {
                    omega_eff,
                    pump_width: width,
                    stark: stark_peak,
                    stark_width,
                    readout: match &h.readout {
                        Some(q) => q.time(Some(&ctx))?,
                        None => 2.0 * width,
                    },
                    pump_shift: h.pump_shift.unwrap_or(0.1),
                    static_detuning: h
                        .static_detuning
                        .as_ref()
                        .map(|q| q.frequency(Some(&ctx)))
                        .transpose()?,
                    readout_detuning: match &h.readout_detuning {
                        Some(q) => q.frequency(Some(&ctx))?,
                        None => 0.0,
                    },
                })?
            }
        };
        let dt = match &file.grid.dt {
            Some(q) => Some(q.time(Some(&ctx))?),
            None => None,
        };
        let grid = scenario.grid(dt)?;
        Ok(LoadedConfig {
            file,
            scenario,
            grid,
            context: ctx,
            derived,
            stark_peak,
            pair,
            data,
        })
    }
}

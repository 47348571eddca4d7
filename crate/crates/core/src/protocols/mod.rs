//! Scenario builders for SACS, STIRAP, F-STIRAP and half-SCRAP, final-state
//! analysis and the four-wave-mixing source term.

pub mod config;

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::adiabatic::StateVector;
use crate::hamiltonian::HermitianMatrix3;
use crate::propagator::{TimeGrid, Trajectory};
use crate::pulses::{EnvelopeShape, PulseEnvelope, Waveform};
use crate::{Error, Result, Warning, C64};

/// `dt·max‖H‖` used when no step is given.
pub const DEFAULT_STEP_PRODUCT: f64 = 0.05;
/// Intermediate-state residual above which an outcome counts as non-adiabatic.
pub const NON_ADIABATIC_RESIDUAL: f64 = 0.05;
/// Relative mismatch tolerated between the two SACS peaks outside
/// weight-control mode. Intensity-derived Rabi frequencies of the mercury
/// case differ by about 1.3%.
pub const SACS_PEAK_TOLERANCE: f64 = 0.02;
/// Weights below this leave the relative phase undefined.
const PHASE_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Protocol {
    #[serde(rename = "SACS")]
    Sacs,
    #[serde(rename = "STIRAP")]
    Stirap,
    #[serde(rename = "F-STIRAP")]
    FStirap,
    #[serde(rename = "HALF-SCRAP")]
    HalfScrap,
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Protocol::Sacs => "SACS",
            Protocol::Stirap => "STIRAP",
            Protocol::FStirap => "F-STIRAP",
            Protocol::HalfScrap => "HALF-SCRAP",
        })
    }
}

/// Two-level half-SCRAP parameters carried by a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfScrapModel {
    /// Static detuning δ of the target diagonal, rad/ns.
    pub static_detuning: f64,
    /// Δ_P(t) = `pump_shift · Ω_eff(t)`.
    pub pump_shift: f64,
    /// Readout time t_f, ns; also the end of the scenario.
    pub readout: f64,
}

/// One complete simulation.
///
/// For the three-level protocols `drive1` is Ω₁ (pump, 1–2) and `drive2` is
/// Ω₂ (Stokes, 2–3). For half-SCRAP `drive1` carries the effective two-photon
/// coupling Ω_eff on 1–3 and `drive2` is empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub protocol: Protocol,
    pub drive1: Waveform,
    pub drive2: Waveform,
    pub stark: Waveform,
    pub delta2: f64,
    pub delta3: f64,
    pub beta: f64,
    pub initial: StateVector,
    /// Target mixing angle of F-STIRAP.
    pub alpha: Option<f64>,
    pub half_scrap: Option<HalfScrapModel>,
    /// Allows unequal SACS drive peaks.
    pub weight_control: bool,
    pub start: f64,
    pub end: f64,
    pub warnings: Vec<Warning>,
}

impl ScenarioConfig {
    pub fn hamiltonian_at(&self, t: f64) -> HermitianMatrix3 {
        let o1 = self.drive1.value(t);
        let s = self.stark.value(t);
        match &self.half_scrap {
            Some(m) => {
                let delta_eff = m.static_detuning - s - m.pump_shift * o1;
                HermitianMatrix3::new(
                    [0.0, self.delta2, delta_eff],
                    C64::default(),
                    C64::new(0.5 * o1, 0.0),
                    C64::default(),
                )
            }
            None => {
                let o2 = self.drive2.value(t);
                HermitianMatrix3::new(
                    [0.0, self.delta2, self.delta2 + self.delta3 - s],
                    C64::new(0.5 * o1, 0.0),
                    C64::default(),
                    C64::from_polar(0.5 * o2, self.beta),
                )
            }
        }
    }

    /// (Ω₁, Ω₂, Δ_S) at `t`.
    pub fn couplings_at(&self, t: f64) -> (f64, f64, f64) {
        (self.drive1.value(t), self.drive2.value(t), self.stark.value(t))
    }

    /// Effective half-SCRAP detuning Δ_eff(t); zero for other protocols.
    pub fn effective_detuning(&self, t: f64) -> f64 {
        self.half_scrap.map_or(0.0, |m| {
            m.static_detuning - self.stark.value(t) - m.pump_shift * self.drive1.value(t)
        })
    }

    /// Largest envelope value at `t` relative to its own peak. Half-SCRAP
    /// reads out with the pump on by design and reports zero.
    pub fn activity_at(&self, t: f64) -> f64 {
        if self.half_scrap.is_some() {
            return 0.0;
        }
        [&self.drive1, &self.drive2, &self.stark]
            .iter()
            .map(|w| w.relative_activity(t))
            .fold(0.0, f64::max)
    }

    /// Upper bound on the spectral norm of H(t) over the scenario.
    pub fn norm_bound(&self) -> f64 {
        let o1 = self.drive1.peak_bound();
        let o2 = self.drive2.peak_bound();
        let s = self.stark.peak_bound();
        match &self.half_scrap {
            Some(m) => {
                let d = m.static_detuning.abs() + s + m.pump_shift.abs() * o1;
                (self.delta2.powi(2) + d * d + 0.5 * o1 * o1).sqrt()
            }
            None => {
                let d3 = (self.delta2 + self.delta3).abs() + s;
                (self.delta2.powi(2) + d3 * d3 + 0.5 * (o1 * o1 + o2 * o2)).sqrt()
            }
        }
    }

    /// Grid over the scenario span. Without `dt` the step satisfies
    /// `dt·max‖H‖ ≤ 0.05`.
    pub fn grid(&self, dt: Option<f64>) -> Result<TimeGrid> {
        let span = self.end - self.start;
        let dt = match dt {
            Some(dt) => dt,
            None => {
                let bound = self.norm_bound();
                let dt = if bound > 0.0 {
                    DEFAULT_STEP_PRODUCT / bound
                } else {
                    span / 100.0
                };
                dt.min(span / 100.0)
            }
        };
        TimeGrid::new(self.start, self.end, dt)
    }
}

fn span_of(waves: &[&Waveform]) -> Option<(f64, f64)> {
    waves
        .iter()
        .filter_map(|w| w.support())
        .reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)))
}

fn check_finite(fields: &[(&'static str, f64)]) -> Result<()> {
    for (name, v) in fields {
        if !v.is_finite() {
            return Err(Error::NonFinite(name));
        }
    }
    Ok(())
}

/// SACS: a Stark pulse starting at t = 0 and two simultaneous driving pulses
/// starting `delay` later. Sine-squared pulses use `width` as T (duration πT);
/// Gaussians are centred at 0 (Stark) and `delay` (drives).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SacsParams {
    pub shape: EnvelopeShape,
    pub omega1: f64,
    pub omega2: f64,
    pub stark: f64,
    pub width: f64,
    pub stark_width: f64,
    pub delay: f64,
    pub delta2: f64,
    /// Two-photon detuning Δ₂ + Δ₃.
    pub two_photon_detuning: f64,
    pub beta: f64,
    pub weight_control: bool,
}

impl SacsParams {
    /// Equal sine-squared drives of peak `omega` on two-photon resonance.
    pub fn new(omega: f64, stark: f64, width: f64, delay: f64, delta2: f64) -> Self {
        SacsParams {
            shape: EnvelopeShape::SineSquared,
            omega1: omega,
            omega2: omega,
            stark,
            width,
            stark_width: width,
            delay,
            delta2,
            two_photon_detuning: 0.0,
            beta: 0.0,
            weight_control: false,
        }
    }

    /// The mercury operating point: T = 1 ns, Δ₂ = 20, Ω = 52.1, Δ_S = 30.5,
    /// τ = 0.8 ns.
    pub fn mercury() -> Self {
        Self::new(52.1, 30.5, 1.0, 0.8, 20.0)
    }
}

pub fn make_sacs(p: &SacsParams) -> Result<ScenarioConfig> {
    check_finite(&[
        ("omega1", p.omega1),
        ("omega2", p.omega2),
        ("stark", p.stark),
        ("width", p.width),
        ("stark_width", p.stark_width),
        ("delay", p.delay),
        ("delta2", p.delta2),
        ("two_photon_detuning", p.two_photon_detuning),
        ("beta", p.beta),
    ])?;
    if p.shape == EnvelopeShape::Zero {
        return Err(Error::invalid("shape", "SACS needs a non-zero pulse shape"));
    }
    if !p.weight_control {
        let mismatch = (p.omega1 - p.omega2).abs() / p.omega1.abs().max(p.omega2.abs()).max(1e-300);
        if mismatch > SACS_PEAK_TOLERANCE {
            return Err(Error::InvalidScenario(format!(
                "SACS drive peaks {} and {} differ by {:.1}%; enable weight control for unequal fields",
                p.omega1,
                p.omega2,
                100.0 * mismatch
            )));
        }
    }
    let d1 = PulseEnvelope::new(p.shape, p.omega1, p.width, p.delay)?;
    let d2 = PulseEnvelope::new(p.shape, p.omega2, p.width, p.delay)?;
    let s = PulseEnvelope::new(p.shape, p.stark, p.stark_width, 0.0)?;
    let mut warnings = Vec::new();
    if let Some((s0, s1)) = s.support() {
        if p.delay < s0 || p.delay >= s1 {
            warnings.push(Warning::DelayOutsideStark {
                delay: p.delay,
                stark_end: s1,
            });
        }
    }
    if p.two_photon_detuning != 0.0 {
        warnings.push(Warning::TwoPhotonDetuned {
            detuning: p.two_photon_detuning,
        });
    }
    let (drive1, drive2, stark) = (Waveform::from(d1), Waveform::from(d2), Waveform::from(s));
    let (start, end) = span_of(&[&drive1, &drive2, &stark])
        .ok_or_else(|| Error::InvalidScenario("all envelopes are zero".into()))?;
    Ok(ScenarioConfig {
        protocol: Protocol::Sacs,
        drive1,
        drive2,
        stark,
        delta2: p.delta2,
        delta3: p.two_photon_detuning - p.delta2,
        beta: p.beta,
        initial: StateVector::ground(),
        alpha: None,
        half_scrap: None,
        weight_control: p.weight_control,
        start,
        end,
        warnings,
    })
}

/// Gaussian pump centred at 0, Stokes centred at `delay` and an optional
/// Stark pulse centred at `delay + stark_offset`, all of width T. Negative
/// `delay` is the counterintuitive order. Used by the delay/peak contour
/// sweeps; drive peaks are independent, so weight control is on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPairParams {
    pub pump: f64,
    pub stokes: f64,
    pub stark: f64,
    pub width: f64,
    pub delay: f64,
    pub stark_offset: f64,
    pub delta2: f64,
    pub beta: f64,
}

pub fn make_gaussian_pair(p: &GaussianPairParams) -> Result<ScenarioConfig> {
    check_finite(&[
        ("pump", p.pump),
        ("stokes", p.stokes),
        ("stark", p.stark),
        ("width", p.width),
        ("delay", p.delay),
        ("stark_offset", p.stark_offset),
        ("delta2", p.delta2),
        ("beta", p.beta),
    ])?;
    let drive1 = Waveform::from(PulseEnvelope::gaussian(p.pump, p.width, 0.0)?);
    let drive2 = Waveform::from(PulseEnvelope::gaussian(p.stokes, p.width, p.delay)?);
    let stark = if p.stark > 0.0 {
        Waveform::from(PulseEnvelope::gaussian(
            p.stark,
            p.width,
            p.delay + p.stark_offset,
        )?)
    } else {
        Waveform::zero()
    };
    let (start, end) = span_of(&[&drive1, &drive2, &stark])
        .ok_or_else(|| Error::InvalidScenario("all envelopes are zero".into()))?;
    Ok(ScenarioConfig {
        protocol: if p.stark > 0.0 {
            Protocol::Sacs
        } else {
            Protocol::Stirap
        },
        drive1,
        drive2,
        stark,
        delta2: p.delta2,
        delta3: -p.delta2,
        beta: p.beta,
        initial: StateVector::ground(),
        alpha: None,
        half_scrap: None,
        weight_control: true,
        start,
        end,
        warnings: Vec::new(),
    })
}

/// STIRAP and F-STIRAP pulse parameters (Gaussian, width T, Δ₃ = −Δ₂).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StirapParams {
    pub pump: f64,
    pub stokes: f64,
    pub width: f64,
    /// Time by which the Stokes pulse leads the pump, > 0.
    pub delay: f64,
    pub delta2: f64,
    pub beta: f64,
}

impl StirapParams {
    pub fn new(peak: f64, width: f64, delay: f64) -> Self {
        StirapParams {
            pump: peak,
            stokes: peak,
            width,
            delay,
            delta2: 0.0,
            beta: 0.0,
        }
    }
}

/// STIRAP (`alpha = None`) or F-STIRAP with final mixing angle `alpha`.
///
/// STIRAP: Stokes centred at −delay, pump at 0. F-STIRAP: the Stokes field
/// is an early pulse at −delay plus `cos α` times a common envelope at 0,
/// and the pump is `sin α` times the same common envelope, so both fields
/// vanish together with Ω_P/Ω_S → tan α.
pub fn make_stirap(p: &StirapParams, alpha: Option<f64>) -> Result<ScenarioConfig> {
    check_finite(&[
        ("pump", p.pump),
        ("stokes", p.stokes),
        ("width", p.width),
        ("delay", p.delay),
        ("delta2", p.delta2),
        ("beta", p.beta),
    ])?;
    if p.delay <= 0.0 {
        return Err(Error::InvalidScenario(format!(
            "the Stokes pulse must precede the pump (delay {} <= 0)",
            p.delay
        )));
    }
    let (protocol, drive1, drive2) = match alpha {
        None => (
            Protocol::Stirap,
            Waveform::from(PulseEnvelope::gaussian(p.pump, p.width, 0.0)?),
            Waveform::from(PulseEnvelope::gaussian(p.stokes, p.width, -p.delay)?),
        ),
        Some(a) => {
            if !(a.is_finite() && a > 0.0 && a < FRAC_PI_2) {
                return Err(Error::invalid("alpha", format!("must lie in (0, pi/2), got {a}")));
            }
            let common = PulseEnvelope::gaussian(p.pump, p.width, 0.0)?;
            (
                Protocol::FStirap,
                Waveform::from(common.scaled(a.sin())),
                Waveform(vec![
                    PulseEnvelope::gaussian(p.stokes, p.width, -p.delay)?,
                    common.scaled(a.cos()),
                ]),
            )
        }
    };
    let (start, end) = span_of(&[&drive1, &drive2])
        .ok_or_else(|| Error::InvalidScenario("all envelopes are zero".into()))?;
    Ok(ScenarioConfig {
        protocol,
        drive1,
        drive2,
        stark: Waveform::zero(),
        delta2: p.delta2,
        delta3: -p.delta2,
        beta: p.beta,
        initial: StateVector::ground(),
        alpha,
        half_scrap: None,
        weight_control: true,
        start,
        end,
        warnings: Vec::new(),
    })
}

/// Half-SCRAP two-level model between states 1 and 3.
///
/// The Stark pulse is a Gaussian centred at 0; the effective two-photon
/// pump is a Gaussian centred at `readout`, where the run stops. The target
/// diagonal is Δ_eff(t) = δ − Δ_S(t) − Δ_P(t) with Δ_P = `pump_shift`·Ω_eff.
/// Without an explicit `static_detuning`, δ is chosen so that
/// Δ_eff(readout) = `readout_detuning`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfScrapParams {
    pub omega_eff: f64,
    pub pump_width: f64,
    pub stark: f64,
    pub stark_width: f64,
    pub readout: f64,
    pub pump_shift: f64,
    pub static_detuning: Option<f64>,
    pub readout_detuning: f64,
}

impl HalfScrapParams {
    pub fn new(omega_eff: f64, stark: f64) -> Self {
        HalfScrapParams {
            omega_eff,
            pump_width: 1.0,
            stark,
            stark_width: 1.0,
            readout: 2.0,
            pump_shift: 0.1,
            static_detuning: None,
            readout_detuning: 0.0,
        }
    }
}

pub fn make_half_scrap(p: &HalfScrapParams) -> Result<ScenarioConfig> {
    check_finite(&[
        ("omega_eff", p.omega_eff),
        ("pump_width", p.pump_width),
        ("stark", p.stark),
        ("stark_width", p.stark_width),
        ("readout", p.readout),
        ("pump_shift", p.pump_shift),
        ("readout_detuning", p.readout_detuning),
    ])?;
    if p.readout <= 0.0 {
        return Err(Error::InvalidScenario(
            "the Stark pulse must precede the pump (readout <= Stark centre)".into(),
        ));
    }
    if p.pump_shift < 0.0 {
        return Err(Error::invalid("pump_shift", "must be >= 0"));
    }
    let pump = PulseEnvelope::gaussian(p.omega_eff, p.pump_width, p.readout)?;
    let stark = if p.stark > 0.0 {
        Waveform::from(PulseEnvelope::gaussian(p.stark, p.stark_width, 0.0)?)
    } else {
        Waveform::zero()
    };
    let static_detuning = match p.static_detuning {
        Some(d) => {
            check_finite(&[("static_detuning", d)])?;
            d
        }
        None => p.readout_detuning + stark.value(p.readout) + p.pump_shift * pump.value(p.readout),
    };
    let drive1 = Waveform::from(pump);
    let start = span_of(&[&drive1, &stark]).map_or(0.0, |s| s.0);
    let mut sc = ScenarioConfig {
        protocol: Protocol::HalfScrap,
        drive1,
        drive2: Waveform::zero(),
        stark,
        delta2: 0.0,
        delta3: 0.0,
        beta: 0.0,
        initial: StateVector::ground(),
        alpha: None,
        half_scrap: Some(HalfScrapModel {
            static_detuning,
            pump_shift: p.pump_shift,
            readout: p.readout,
        }),
        weight_control: false,
        start,
        end: p.readout,
        warnings: Vec::new(),
    };
    let omega_f = sc.drive1.value(p.readout);
    let delta_f = sc.effective_detuning(p.readout);
    if omega_f <= delta_f.abs() {
        sc.warnings.push(Warning::ReadoutCondition {
            omega_eff: omega_f,
            delta_eff: delta_f,
        });
    }
    Ok(sc)
}

/// Mixing angle θ ∈ [0, π/2] of the half-SCRAP state that starts in ψ₁
/// while the Stark shift holds level 3 below level 1: tan 2θ = Ω/(−Δ_eff).
/// The transferred weight is sin²θ.
pub fn half_scrap_mixing_angle(omega_eff: f64, delta_eff: f64) -> f64 {
    0.5 * omega_eff.atan2(-delta_eff)
}

/// Final-state weights and relative phase in the rotating frame.
///
/// The physical amplitude of ψ₃ carries the extra factor e^{−i(ω₁+ω₂)t};
/// it is bookkept symbolically and never sampled.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuperpositionReport {
    pub weight1: f64,
    pub weight3: f64,
    pub residual: f64,
    /// arg(C₃/C₁) in (−π, π]; `None` if either weight is negligible.
    pub relative_phase: Option<f64>,
    pub non_adiabatic: bool,
    pub integrated_p2: f64,
    pub norm_drift: f64,
    pub warnings: Vec<Warning>,
}

pub fn analyze_state(state: &StateVector) -> SuperpositionReport {
    let p = state.populations();
    let relative_phase = if p[0] > PHASE_FLOOR && p[2] > PHASE_FLOOR {
        Some((state.0[2] / state.0[0]).arg())
    } else {
        None
    };
    let mut warnings = Vec::new();
    let non_adiabatic = p[1] > NON_ADIABATIC_RESIDUAL;
    if non_adiabatic {
        warnings.push(Warning::NonAdiabatic { residual: p[1] });
    }
    SuperpositionReport {
        weight1: p[0],
        weight3: p[2],
        residual: p[1],
        relative_phase,
        non_adiabatic,
        integrated_p2: 0.0,
        norm_drift: (state.norm() - 1.0).abs(),
        warnings,
    }
}

pub fn analyze_final(traj: &Trajectory) -> Result<SuperpositionReport> {
    let last = traj.final_state().ok_or(Error::EmptyTrajectory)?;
    let mut r = analyze_state(last);
    r.integrated_p2 = traj.integrated_p2;
    r.norm_drift = traj.norm_drift;
    let mut warnings = traj.warnings.clone();
    warnings.append(&mut r.warnings);
    r.warnings = warnings;
    Ok(r)
}

/// Wrap an angle into (−π, π].
pub fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Four-wave-mixing probe: Ω₃ couples 3–4 with detuning Δ₄; Ω₄ is the
/// generated field, usually negligible. `scale` absorbs d₄₁, the field
/// normalisation and the number density.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FwmContext {
    pub omega3: Waveform,
    pub omega4: Waveform,
    pub delta4: f64,
    pub scale: f64,
}

impl FwmContext {
    pub fn new(omega3: Waveform, delta4: f64, scale: f64) -> Result<Self> {
        let ctx = FwmContext {
            omega3,
            omega4: Waveform::zero(),
            delta4,
            scale,
        };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn validate(&self) -> Result<()> {
        check_finite(&[("delta4", self.delta4), ("scale", self.scale)])?;
        let peak = self.omega3.peak_bound().max(self.omega4.peak_bound());
        if self.delta4.abs() < 10.0 * peak || self.delta4 == 0.0 {
            return Err(Error::EliminationInvalid {
                delta4: self.delta4,
                omega3: peak,
            });
        }
        Ok(())
    }

    /// Adiabatically eliminated C₄ = Ω₃C₃/(2Δ₄) + Ω₄C₁/(2Δ₄).
    pub fn c4(&self, t: f64, state: &StateVector) -> C64 {
        let k = 0.5 / self.delta4;
        state.0[2] * (self.omega3.value(t) * k) + state.0[0] * (self.omega4.value(t) * k)
    }
}

/// Ground–target coherence C₃*C₁.
pub fn coherence(state: &StateVector) -> C64 {
    state.0[2].conj() * state.0[0]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FwmSample {
    pub t: f64,
    pub c4: C64,
    pub source: C64,
}

/// Slowly varying source amplitude 𝒫₄ = scale · C₄* C₁ along `traj`; with
/// Ω₄ = 0 this is scale · C₃*C₁ · Ω₃/(2Δ₄).
pub fn fwm_source(traj: &Trajectory, ctx: &FwmContext) -> Result<Vec<FwmSample>> {
    ctx.validate()?;
    Ok(traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, s)| {
            let c4 = ctx.c4(t, s);
            FwmSample {
                t,
                c4,
                source: c4.conj() * s.0[0] * ctx.scale,
            }
        })
        .collect())
}

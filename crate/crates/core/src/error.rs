use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value for {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dark state undefined when both Rabi frequencies vanish")]
    UndefinedDarkState,

    #[error("time step must be positive, got {0}")]
    NonPositiveStep(f64),

    #[error("step size violates stability bound: dt*|H| = {0:.3} >= 0.5")]
    StepTooLarge(f64),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("negative intensity {0} W/cm2")]
    NegativeIntensity(f64),

    #[error("resonant denominator for transition {transition}: |detuning| = {detuning:.4e} rad/s")]
    ResonantDenominator { transition: String, detuning: f64 },

    #[error("data load error: {0}")]
    DataLoad(String),

    #[error("adiabatic elimination invalid: |delta4| = {delta4} < 10 * peak omega3 = {omega3}")]
    EliminationInvalid { delta4: f64, omega3: f64 },

    #[error("no contour at level {0}")]
    EmptyPath(f64),

    #[error("empty trajectory")]
    EmptyTrajectory,

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors that reflect invalid physics rather than malformed input.
    pub fn is_physics(&self) -> bool {
        matches!(
            self,
            Error::ResonantDenominator { .. }
                | Error::EliminationInvalid { .. }
                | Error::StepTooLarge(_)
                | Error::UndefinedDarkState
        )
    }
}

/// Non-fatal conditions raised while building or running a scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// Driving pulses start outside the Stark pulse support, so the system
    /// point leaves the surface of the followed adiabatic state.
    DelayOutsideStark { delay: f64, stark_end: f64 },
    /// An envelope is still above 1e-12 of its peak at the end of the grid.
    EnvelopesActive { time: f64, relative: f64 },
    /// Half-SCRAP readout condition: effective Rabi frequency does not exceed
    /// the effective detuning.
    ReadoutCondition { omega_eff: f64, delta_eff: f64 },
    /// Intermediate-state residual above 0.05 at the end of the run.
    NonAdiabatic { residual: f64 },
    /// Two-photon resonance is broken for a protocol that assumes it.
    TwoPhotonDetuned { detuning: f64 },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::DelayOutsideStark { delay, stark_end } => write!(
                f,
                "driving delay {delay} ns lies outside the Stark support [0, {stark_end}] ns"
            ),
            Warning::EnvelopesActive { time, relative } => write!(
                f,
                "envelopes still active at t = {time} ns (relative amplitude {relative:.3e})"
            ),
            Warning::ReadoutCondition {
                omega_eff,
                delta_eff,
            } => write!(
                f,
                "readout condition violated: omega_eff = {omega_eff:.4} <= |delta_eff| = {:.4}",
                delta_eff.abs()
            ),
            Warning::NonAdiabatic { residual } => {
                write!(f, "non-adiabatic outcome: intermediate residual {residual:.4}")
            }
            Warning::TwoPhotonDetuned { detuning } => {
                write!(f, "two-photon detuning {detuning} rad/ns is not zero")
            }
        }
    }
}

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Gaussian envelopes are treated as zero beyond this many widths from centre.
const GAUSSIAN_CUTOFF: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvelopeShape {
    /// `peak · sin²((t − delay)/width)` on `[delay, delay + π·width]`.
    SineSquared,
    /// `peak · exp(−((t − delay)/width)²)`, truncated at 6 widths.
    Gaussian,
    Zero,
}

/// One pulse profile. Values are in rad/ns, times in ns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseEnvelope {
    pub shape: EnvelopeShape,
    pub peak: f64,
    pub width: f64,
    /// Start time for sine-squared pulses, centre for Gaussians.
    pub delay: f64,
}

impl PulseEnvelope {
    pub fn new(shape: EnvelopeShape, peak: f64, width: f64, delay: f64) -> Result<Self> {
        if !(peak.is_finite() && width.is_finite() && delay.is_finite()) {
            return Err(Error::NonFinite("pulse envelope"));
        }
        if shape != EnvelopeShape::Zero {
            if width <= 0.0 {
                return Err(Error::invalid("width", format!("must be > 0, got {width}")));
            }
            if peak < 0.0 {
                return Err(Error::invalid("peak", format!("must be >= 0, got {peak}")));
            }
        }
        Ok(PulseEnvelope {
            shape,
            peak,
            width,
            delay,
        })
    }

    pub fn sine_squared(peak: f64, width: f64, start: f64) -> Result<Self> {
        Self::new(EnvelopeShape::SineSquared, peak, width, start)
    }

    pub fn gaussian(peak: f64, width: f64, centre: f64) -> Result<Self> {
        Self::new(EnvelopeShape::Gaussian, peak, width, centre)
    }

    pub fn zero() -> Self {
        PulseEnvelope {
            shape: EnvelopeShape::Zero,
            peak: 0.0,
            width: 1.0,
            delay: 0.0,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self.shape {
            EnvelopeShape::Zero => 0.0,
            EnvelopeShape::SineSquared => {
                let x = t - self.delay;
                if x < 0.0 || x > PI * self.width {
                    0.0
                } else {
                    let s = (x / self.width).sin();
                    self.peak * s * s
                }
            }
            EnvelopeShape::Gaussian => {
                let x = (t - self.delay) / self.width;
                if x.abs() > GAUSSIAN_CUTOFF {
                    0.0
                } else {
                    self.peak * (-x * x).exp()
                }
            }
        }
    }

    /// Interval outside which the envelope is exactly zero.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self.shape {
            EnvelopeShape::Zero => None,
            _ if self.peak == 0.0 => None,
            EnvelopeShape::SineSquared => Some((self.delay, self.delay + PI * self.width)),
            EnvelopeShape::Gaussian => Some((
                self.delay - GAUSSIAN_CUTOFF * self.width,
                self.delay + GAUSSIAN_CUTOFF * self.width,
            )),
        }
    }

    pub fn peak_time(&self) -> f64 {
        match self.shape {
            EnvelopeShape::SineSquared => self.delay + 0.5 * PI * self.width,
            _ => self.delay,
        }
    }

    /// Analytic time integral over the support.
    pub fn area(&self) -> f64 {
        match self.shape {
            EnvelopeShape::Zero => 0.0,
            EnvelopeShape::SineSquared => 0.5 * PI * self.width * self.peak,
            EnvelopeShape::Gaussian => PI.sqrt() * self.width * self.peak,
        }
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.peak *= factor;
        self
    }
}

/// Sum of envelopes driving one channel. An empty waveform is identically zero.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Waveform(pub Vec<PulseEnvelope>);

impl Waveform {
    pub fn zero() -> Self {
        Waveform(Vec::new())
    }

    pub fn single(p: PulseEnvelope) -> Self {
        Waveform(vec![p])
    }

    pub fn value(&self, t: f64) -> f64 {
        self.0.iter().map(|p| p.value(t)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|p| p.support().is_none())
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        self.0
            .iter()
            .filter_map(PulseEnvelope::support)
            .reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)))
    }

    /// Sum of component peaks; an upper bound on the waveform.
    pub fn peak_bound(&self) -> f64 {
        self.0.iter().map(|p| p.peak).sum()
    }

    /// Largest ratio of a component's value at `t` to its own peak.
    pub fn relative_activity(&self, t: f64) -> f64 {
        self.0
            .iter()
            .filter(|p| p.peak > 0.0)
            .map(|p| p.value(t) / p.peak)
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Waveform(self.0.iter().map(|p| p.scaled(factor)).collect())
    }
}

impl From<PulseEnvelope> for Waveform {
    fn from(p: PulseEnvelope) -> Self {
        Waveform::single(p)
    }
}

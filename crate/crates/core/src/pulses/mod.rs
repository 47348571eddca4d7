//! Pulse envelopes and laboratory-to-model conversions.

pub mod constants;
mod envelope;
mod mercury;
mod stark;

pub use envelope::{EnvelopeShape, PulseEnvelope, Waveform};
pub use mercury::{
    validate_table, Level, MercuryData, RowDeviation, TransitionRecord, SHIPPED_TABLE,
};
pub use stark::{
    effective_two_photon_rabi, intensity_for_rabi, rabi_from_intensity, stark_shift_from_intensity,
    StarkContext, TwoPhotonContext,
};

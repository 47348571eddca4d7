//! Adiabatic preparation of nondegenerate coherent superpositions in a
//! three-state ladder atom.
//!
//! The crate is organised bottom-up:
//!
//! * [`hamiltonian`], [`eigen`] and [`adiabatic`] build the rotating-wave
//!   Hamiltonian, diagonalise it and follow adiabatic states through time.
//! * [`pulses`] holds envelope shapes and the conversions from laboratory
//!   quantities (intensity, wavelength, mercury spectroscopy) to Rabi
//!   frequencies and Stark shifts.
//! * [`propagator`] integrates the Schrödinger equation with exactly unitary
//!   steps and records trajectories.
//! * [`protocols`] assembles SACS, STIRAP, F-STIRAP and half-SCRAP scenarios and
//!   analyses the final superposition.
//! * [`sweeps`] runs parameter scans, eigenvalue surfaces and level-line
//!   extraction.
//!
//! Angular frequencies are in rad/ns and times in ns throughout.

pub mod adiabatic;
pub mod eigen;
mod error;
pub mod hamiltonian;
pub mod propagator;
pub mod protocols;
pub mod pulses;
pub mod sweeps;

pub use adiabatic::{dark_state, nonadiabatic_coupling, track_adiabatic, CouplingMatrix, StateVector};
pub use eigen::{eigensystem, AdiabaticFrame, FrameOrdering};
pub use error::{Error, Result, Warning};
pub use hamiltonian::{build_hamiltonian, HamiltonianParams, HermitianMatrix3};

/// Complex scalar used for amplitudes and matrix entries.
pub type C64 = num_complex::Complex64;

/// Version string written into manifests and sidecars.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

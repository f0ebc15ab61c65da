//! Deterministic simulator of a fast two-pulse Rydberg CNOT built on the
//! transition-slow-down (TSD) effect, for two neutral atoms.
//!
//! The crate models the three-channel drive (control `|1><->|r>`, target
//! `|0><->|r>` and `|1><->|r>`) through the two-pulse spin-echo sequence,
//! evolves the blockaded (5-level) or interacting (6-level) two-atom system
//! exactly, and evaluates the gate's error budgets:
//!
//! * Doppler dephasing, ensemble-averaged over a deterministic velocity grid;
//! * Rabi-amplitude fluctuation over a deterministic offset grid;
//! * Rydberg-state decay via the time integral of the Rydberg populations;
//!
//! plus the AC-Stark compensation conditions of the underlying two-photon
//! drive (Clebsch-Gordan branching factor, detuning choice, field-amplitude
//! ratio).
//!
//! All numerics are generic over the real scalar type ([`scalar::Scalar`],
//! implemented for `f32` and `f64`); the aliases below fix the `f64`
//! instantiation the CLI uses. Clebsch-Gordan algebra is exact big-rational
//! arithmetic under the square root.

pub mod checks;
pub mod ensembles;
pub mod error;
pub mod matrix;
pub mod metrics;
pub mod propagator;
pub mod qmodel;
pub mod scalar;
pub mod sequence;
pub mod stark;

pub use error::{Error, Result};

/// Concrete scalar used by the CLI and the acceptance suite.
pub type Real = f64;
/// Complex number over [`Real`].
pub type C64 = num_complex::Complex<f64>;
/// Dense complex matrix over [`Real`].
pub type CMatrix = matrix::ComplexMatrix<Real>;
/// Pure state over [`Real`].
pub type State = qmodel::AtomState<Real>;
/// Gate configuration over [`Real`].
pub type GateConfig = qmodel::GateChannelConfig<Real>;

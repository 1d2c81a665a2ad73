//! Entanglement purification of qudit (`d`-level) systems.
//!
//! Bell-diagonal states are handled in coefficient space as a `d x d` matrix
//! `alpha[phase][amplitude]`; recurrence, hashing and multipartite protocols
//! act on these coefficients directly. The [`oracle`] module cross-checks the
//! coefficient maps against dense density-matrix simulation for small `d`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod error;
pub mod hashing;
pub mod multipartite;
pub mod oracle;
pub mod recurrence;
pub mod states;

mod numeric;

pub use algebra::{BellIndex, Dimension, GhzIndex};
pub use error::{Error, Result};
pub use recurrence::{NoiseParams, Protocol, ProtocolStep, PurificationRegime, Subroutine, Trajectory};
pub use states::{CoeffMatrix, PresetKind, StatePreset};

//! Exact evaluation, strategy search, Monte Carlo simulation and
//! semi-device-independent certification for the pair-identification game.
//!
//! A Manager draws a value `x_i` out of `d` possibilities and hands it to
//! Alice. Bob receives an index `j` naming a two-element set `S_j` that
//! contains `x_i`, plus one message from Alice (a classical symbol or a
//! qubit). The game is won when Bob names `x_i` with probability strictly
//! above one half for every admissible `(i, j)`.
//!
//! Module map:
//! - [`qubit`]: pure qubit states, Helstrom discrimination, Born sampling.
//! - [`game`]: canonical game specification and exact success matrices.
//! - [`classical`]: exhaustive and closed-form classical optima.
//! - [`quantum`]: canonical ensembles, ensemble diagnostics and optimizers.
//! - [`sim`]: seeded round generation.
//! - [`certify`]: witness and coherence certification from round records.

pub mod certify;
pub mod classical;
pub mod error;
pub mod game;
pub mod optim;
pub mod quantum;
pub mod qubit;
pub mod record;
pub mod sim;

pub use certify::{CoherenceVerdict, CellCounts, QuantumnessVerdict, WitnessReport};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use game::{GameSpec, Strategy, SuccessMatrix};
pub use quantum::Ensemble;
pub use qubit::{QubitState, TwoOutcomeMeasurement};
pub use record::RoundRecord;

/// Tolerance for logic decisions (winning threshold, degeneracy, phase equality).
pub const EPS_ALG: f64 = 1e-9;

/// Tolerance for algebraic identities (normalization, effect completeness).
pub const EPS_NUM: f64 = 1e-12;

/// Crate version, recorded in certification reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

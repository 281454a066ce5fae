//! Exact formulas, stochastic simulation and algebraic identity checks for the
//! totally asymmetric simple exclusion process with second class particles.
//!
//! Species labels follow the usual convention: label `2` marks a first class
//! particle, label `1` a second class particle. A first class particle may
//! exchange places with a second class particle sitting immediately to its
//! right; the reverse exchange is forbidden.
//!
//! The crate is organized bottom-up:
//!
//! * [`model`] holds configurations, species words and the jump rules.
//! * [`simulator`] draws Gillespie paths and solves the master equation by
//!   uniformization, giving two independent references for exact values.
//! * [`bethe`] evaluates the one-dimensional contour moments every exact
//!   formula factors into.
//! * [`matrices`] builds the `2^N x 2^N` scattering matrices and their
//!   diagonal closed forms.
//! * [`exact`] evaluates transition and event probabilities.
//! * [`identities`] checks the algebraic identities behind the formulas at
//!   random spectral points.

pub mod bethe;
pub mod dd;
pub mod exact;
pub mod identities;
pub mod linalg;
pub mod matrices;
pub mod model;
pub mod perm;
pub mod simulator;

pub use bethe::{ContourMomentKey, MomentTable, QuadratureSpec, SeriesSpec};

pub use exact::{ExactResult, Method};
pub use model::{EventSpec, Move, MoveKind, ParticleConfig, Species, SpeciesSequence};
pub use simulator::{OracleParams, ProbEstimate};

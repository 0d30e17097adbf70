//! Simulation lab for the three-stage associative-memory account of
//! tip-of-the-tongue (TOT) recall.
//!
//! The crate is organized in four layers:
//!
//! - [`netcore`] — bipolar patterns, Hebbian synaptic matrices, damage
//!   (severed links / dead input neurons) and one-shot threshold decoding.
//! - [`curvelab`] — exact rational recall-probability curves P(d) over cue
//!   distortion, Monte Carlo estimates, TOT curve classification, and
//!   damage-ensemble statistics.
//! - [`retrieval`] — the localize / retrieve / verify episode loop with
//!   feeling-of-knowing, strategy phases, and chronometry.
//! - [`scenario`] — the canonical "Horse Name" episode configuration and its
//!   narrative stage map.
//!
//! All computations are deterministic: exact arithmetic where feasible,
//! seeded ChaCha streams everywhere else.

pub mod curvelab;
pub mod error;
pub mod netcore;
pub mod retrieval;
pub mod scenario;

pub use error::Error;

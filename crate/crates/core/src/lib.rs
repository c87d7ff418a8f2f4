//! Quantum correlations in the CHSH scenario.
//!
//! The crate covers the 8-dimensional correlation space of two parties with
//! two binary measurements each: canonical qubit realisations, the local
//! and no-signalling polytopes, Bell operator spectra, two analytic families
//! of self-testing functionals, extremality criteria for quantum points and
//! a linear program that searches for exposing functionals.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod expose;
pub mod extremality;
pub mod families;
pub mod model;
pub mod polytope;
pub mod sampling;
pub mod scan;
pub mod spectrum;

pub use error::{ChshError, Result};
pub use model::{point_from_realization, ProbabilityPoint, ProbabilityTable, Realization};
pub use polytope::Functional;

//! Verification toolkit for integrable-systems descriptions of surfaces in
//! `H` and `O`: Hamiltonian stationary Lagrangian surfaces, surfaces with
//! harmonic left Gauss map, ρ-harmonic surfaces in the octonions, and
//! superharmonic maps on the superplane `R^{2|2}`.

pub mod algebra;
pub mod catalog;
pub mod error;
pub mod gauss;
pub mod gridcalc;
pub mod lift;
pub mod pipeline;
pub mod report;
pub mod superspace;

pub use error::{Error, Result};

//! Grassmann calculus on `R^{2|2}` for superharmonic maps into spheres:
//! superfields, component equations, super frames, the λ-family of
//! connections and the holomorphic-potential ODE.

mod coeff;
pub mod dpw;
mod examples;
mod field;
mod frame;
mod grassmann;

pub use coeff::{Coefficient, Jet, Sample};
pub use examples::SuperExample;
pub use field::*;
pub use frame::*;
pub use grassmann::{reorder_sign, Grassmann, Parity};

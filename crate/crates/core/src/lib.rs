//! Numerical laboratory for vanishing-viscosity limits of 2D Navier–Stokes
//! with measure-valued vorticity: spectral tools, concentration functionals,
//! refined Nash-type inequalities, a pseudo-spectral solver, exact radial
//! solutions and parameter sweeps.

// `!(x > 0.0)` guards deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exact;
pub mod field;
pub mod grid;
pub mod inequality;
pub mod io;
pub mod norms;
pub mod quadrature;
pub mod solver;
pub mod spectral;
pub mod sweep;

pub use error::{Error, Result};
pub use field::{SpectralField, VelocityField};
pub use grid::GridSpec;

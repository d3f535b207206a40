//! Numerical toolkit for the semilinear time-fractional heat-wave equation
//! `u = L_a(t) u0 + B_a(u)`: Mittag-Leffler functions, a periodic spectral
//! propagator, mild-solution solvers, Morrey-type norm estimators and
//! scaling diagnostics.

pub mod error;
pub mod grid;
pub mod norms;
pub mod propagator;
pub mod quad;
pub mod scaling;
pub mod solver;
pub mod special;

pub use error::{FhwError, Result};

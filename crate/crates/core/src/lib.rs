//! Numerical Bochner-Martinelli-Koppelman calculus on Euclidean domains.
//!
//! Modules:
//! - [`exterior`]: complex differential forms, wedge, Hodge star, `dbar`.
//! - [`geometry`]: domains by defining functions, boundary frames, quadrature.
//! - [`qops`]: first-order operators, adjoints, Green-Stokes and weak boundary values.
//! - [`friedrichs`]: interior and boundary-adapted mollification on the half-space.
//! - [`bmk`]: the Bochner-Martinelli-Koppelman kernel and its integral operators.
//! - [`young`]: exponent admissibility and empirical norms for kernel operators.

pub mod bmk;
pub mod error;
pub mod expr;
pub mod exterior;
pub mod field;
pub mod friedrichs;
pub mod geometry;
mod gauss;
pub mod qops;
pub mod young;

pub use error::{Error, Result};
pub use exterior::{Bidegree, DifferentialForm, FormValue, MultiIndex};
pub use field::{DerivativeMode, Field, Poly};
pub use num_complex::Complex64 as C64;

//! Brute-force numerical oracle.
//!
//! Builds the dressed and double-dressed Liouvillians as dense
//! superoperators on column-stacked density matrices, solves them for their
//! steady states, propagates them in time and evaluates the probe
//! susceptibility from two-time correlations. Nothing here reuses the
//! closed-form expressions it is meant to check.

mod density;
mod draws;
mod liouvillian;
mod regression;
mod solve;

pub use density::DensityMatrix;
pub use draws::random_regime_params;
pub use liouvillian::{
    build_liouvillian_dicke, build_liouvillian_single, DickeOperators, Generator, Liouvillian, DICKE_CAPACITY,
};
pub use regression::{regression_spectrum, CUTOFF_WIDTHS};
pub use solve::{propagate, steady_state, SolvePath, Stationary};

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

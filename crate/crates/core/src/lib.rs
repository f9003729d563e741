//! Numerical procedures around unconditional convergence of series.
//!
//! * [`workspace`]: scalars (`f64` or exact rationals), dense and sparse
//!   vectors, ℓ^p norms.
//! * [`series`]: term generators, permutations, partial sums under several
//!   summation strategies.
//! * [`rearrangement`]: greedy Riemann rearrangement and block
//!   constructions.
//! * [`diagnostics`]: finite-truncation tests for each equivalent form of
//!   unconditional convergence, and a heuristic classifier.
//! * [`sgd`]: order sensitivity of accumulated gradient updates.
//! * [`frame`]: finite frames, canonical duals and coefficient thresholding.
//! * [`cli`]: the `uncond` command-line front end.

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod frame;
pub mod rearrangement;
mod rng;
pub mod series;
pub mod sgd;
pub mod workspace;

pub use error::{Error, Result};
pub use series::{Order, Permutation, SeriesSpec, SummationStrategy};
pub use workspace::{Scalar, ScalarMode, Vector};

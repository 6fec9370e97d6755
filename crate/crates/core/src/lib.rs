//! Randomized-sketch preconditioned normal equations for dense
//! overdetermined least squares, with mixed-precision preconditioners and
//! closed-form forward error bounds.
//!
//! ```
//! use sketchpne::probgen::generate_problem;
//! use sketchpne::solvers::{algorithm1_pipeline, PipelineOptions};
//!
//! let p = generate_problem(500, 10, 1e6, 1e-6, 7).unwrap();
//! let mut rep = algorithm1_pipeline(&p.a, &p.b, &PipelineOptions::default()).unwrap();
//! rep.set_reference(&p.x_star);
//! assert_eq!(rep.precision.unwrap().selected.name(), "single");
//! assert!(rep.relative_error.unwrap() < 1e-6);
//! ```

// NaN-rejecting checks are written as `!(x >= lo)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod bounds;
pub mod dense;
pub mod error;
pub mod harness;
pub mod precision;
pub mod probgen;
pub mod rng;
pub mod sketch;
pub mod solvers;

mod par;
mod timing;

pub use dense::Matrix;
pub use error::{Error, Result};
pub use precision::{PrecisionChoice, PrecisionLevel};
pub use probgen::{generate_problem, LeastSquaresProblem};
pub use sketch::Transform;
pub use solvers::{Method, SolveReport};

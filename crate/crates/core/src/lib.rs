//! Numerical toolkit for stepsize schedules of gradient descent-ascent (GDA)
//! on min-max problems `min_x max_y f(x, y)`.
//!
//! The crate provides
//!
//! - problem instances with gradient oracles ([`problems`]),
//! - Chebyshev-root machinery and polynomial bounds ([`chebyshev`]),
//! - stepsize-pair schedules, including the slingshot families ([`schedules`]),
//! - a GDA engine and first-order baselines ([`solvers`]),
//! - numerical checkers for the convergence certificates ([`certify`]),
//! - a config-driven experiment runner ([`harness`]).
//!
//! ```
//! use mmx_core::problems::BilinearProblem;
//! use mmx_core::schedules::{slingshot_bilinear, RootOrdering};
//! use mmx_core::solvers::{run_gda, RunOptions};
//! use mmx_core::Point;
//! use nalgebra::DMatrix;
//!
//! let p = BilinearProblem::from_matrix(DMatrix::identity(2, 2)).unwrap();
//! let schedule = slingshot_bilinear(4, 1.0, 1.0, RootOrdering::Auto).unwrap();
//! let z0 = Point::from_slices(&[1.0, -2.0], &[0.5, 3.0]).unwrap();
//! let trace = run_gda(&p, &schedule, &z0, &RunOptions::default()).unwrap();
//! // m = M: a single slingshot pair lands exactly on the saddle
//! assert!(trace.final_iterate.norm() < 1e-12);
//! ```

pub mod certify;
pub mod chebyshev;
pub mod error;
pub mod harness;
mod linalg;
pub mod point;
pub mod problems;
pub mod rng;
pub mod schedules;
pub mod solvers;

pub use error::{MmxError, Result};
pub use point::Point;

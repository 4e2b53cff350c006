//! Periodic L-splines on the d-torus and their use as regularizers.
//!
//! The crate is organized bottom-up:
//!
//! - [`fourier`]: frequency lattice, truncated Fourier tables, FFT synthesis,
//!   pairings and Sobolev norms.
//! - [`operators`]: spline-admissible operators as Fourier symbols, their
//!   null frequencies, pseudoinverses and Green's functions.
//! - [`spline`]: periodic L-splines built from innovations (knots and
//!   weights) plus a null-space component.
//! - [`measurement`]: linear measurement functionals and admissibility
//!   analysis.
//! - [`solver`]: TV-regularized reconstruction on a knot grid, the Tikhonov
//!   closed form, and sparse spline extraction.
//! - [`io`]: text formats for splines, problems, solutions and profiles.
//!
//! ```
//! use torus_splines::fourier::{synthesize, Smoothing};
//! use torus_splines::operators::OperatorSpec;
//! use torus_splines::spline::{Innovations, Spline};
//!
//! // The periodic D²-spline with knots {0, π} and weights (1, -1) is a
//! // continuous piecewise-linear hat.
//! let op = OperatorSpec::parse("dpow:n=2", 1, 64).unwrap();
//! let innov = Innovations::new(1, vec![vec![0.0], vec![std::f64::consts::PI]], vec![1.0, -1.0]).unwrap();
//! let spline = Spline::new(op, innov, vec![]).unwrap();
//! let grid = synthesize(&spline.table(64).unwrap(), 256, Smoothing::None).unwrap();
//! assert!(grid.max() > 0.0);
//! ```

pub mod error;
pub mod fourier;
pub mod io;
pub mod measurement;
pub mod operators;
pub mod solver;
pub mod spline;

pub use error::{Error, Result};
pub use fourier::{FreqIndex, GridFunction, Smoothing, SymbolTable};
pub use measurement::{AdmissibilityVerdict, Functional, Verdict};
pub use operators::OperatorSpec;
pub use solver::{ReconProblem, Solution, SolverConfig};
pub use spline::{Innovations, Spline};

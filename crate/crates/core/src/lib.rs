//! Numerical laboratory for decay at null infinity in a modified harmonic gauge.
//!
//! The crate is organised by module:
//! - [`chart`]: compactified coordinates and the Schwarzschild background,
//! - [`tensors`]: the block splitting of symmetric 2-tensors and the endomorphisms `A`, `B`,
//! - [`gr_ops`]: pointwise geometry of analytic test metrics and the gauge-fixed operator,
//! - [`scri_solver`]: characteristic transport and damped-wave solvers, norms and fits,
//! - [`maxwell`]: the 1-form analogue with constraint damping,
//! - [`bondi`]: Picard iteration of the leading quasilinear model and Bondi mass loss,
//! - [`config`] and [`verify`]: run configuration and the invariant suite used by the CLI.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod bondi;
pub mod chart;
pub mod config;
pub mod error;
pub mod gr_ops;
pub mod jet;
pub mod maxwell;
pub mod scri_solver;
pub mod tensors;
pub mod verify;

pub use error::{Error, Result};

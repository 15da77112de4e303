//! Pointwise general-relativity operators on analytic test metrics.

pub mod gauge;
pub mod geometry;
pub mod ledger;
pub mod linearize;
pub mod profile;

pub use gauge::{gauge_oneform, mod_divergence, mod_sym_gradient, nonlinear_p, rescaled_p};
pub use geometry::{christoffel, curvature, ChristoffelMode, ChristoffelSet, Geometry};
pub use linearize::{extract_ab, linearize_p};
pub use profile::{PerturbationProfile, Term, TermProfile};

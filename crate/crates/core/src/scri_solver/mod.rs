//! Solvers on the logarithmic characteristic lattice near null infinity.

pub mod energy;
pub mod fit;
pub mod grid;
pub mod norms;
pub mod runs;
pub mod spectral;
pub mod transport;
pub mod wave;

pub use energy::{energy_diagnostic, q_coefficients, EnergyReport, Multiplier};
pub use fit::{decay_fit, DecayFit};
pub use grid::CharGrid;
pub use norms::{weighted_norm, NormSpec};
pub use transport::{transport_solve, TransportCoefficients, TransportData, TransportSolution};
pub use wave::{damped_wave_solve, Damping, ScalarData, WaveProblem, WaveSolution};

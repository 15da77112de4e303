//! Energy-multiplier diagnostics for the scalar operator near null infinity.
//!
//! The multiplier `w² V` with `w = ρ₀^{−α₀} ρ_I^{−α_I}`, `V = −(1 + c)ρ_I∂_{ρ_I} + ρ₀∂_{ρ₀}` produces
//! a commutator whose principal part at null infinity has three coefficients, in front of
//! `(ρ₀D_{ρ₀} − ρ_I D_{ρ_I})²`, `(ρ_I D_{ρ_I})²` and `x_I² Δ̸`.

use super::grid::CharGrid;
use super::norms::{weighted_norm, NormSpec};
use super::wave::WaveSolution;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Multiplier {
    pub alpha0: f64,
    pub alpha_i: f64,
    pub c: f64,
}

impl Multiplier {
    pub fn new(alpha0: f64, alpha_i: f64, c: f64) -> Result<Self> {
        if !(alpha_i < alpha0.min(0.0)) {
            return Err(Error::Param(format!("need alpha_I < min(alpha0, 0), got alpha0 = {alpha0}, alpha_I = {alpha_i}")));
        }
        if !(c > 0.0) {
            return Err(Error::Param(format!("multiplier constant c = {c} must be positive")));
        }
        Ok(Multiplier { alpha0, alpha_i, c })
    }

    /// Weights `(α₀, 2α_I)` of the norms in which the estimate is stated.
    pub fn weights(&self) -> (f64, f64) {
        (self.alpha0, 2.0 * self.alpha_i)
    }
}

/// The three principal coefficients, evaluated directly.
pub fn q_coefficients(m: &Multiplier) -> [f64; 3] {
    let (a0, ai, c) = (m.alpha0, m.alpha_i, m.c);
    [-4.0 * ai, 4.0 * c * (a0 - ai), 1.0 + 2.0 * (a0 - ai) + c * (1.0 - 2.0 * ai)]
}

/// Quantities whose strict positivity follows from admissibility.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Atom {
    /// `−α_I`
    MinusAlphaI,
    /// `α₀ − α_I`
    Gap,
    /// `c`
    C,
}

impl Atom {
    fn eval(self, m: &Multiplier) -> f64 {
        match self {
            Atom::MinusAlphaI => -m.alpha_i,
            Atom::Gap => m.alpha0 - m.alpha_i,
            Atom::C => m.c,
        }
    }
}

/// A coefficient written as `Σ coef · Π atoms`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignedPolynomial {
    pub terms: Vec<(f64, Vec<Atom>)>,
}

impl SignedPolynomial {
    pub fn eval(&self, m: &Multiplier) -> f64 {
        self.terms.iter().map(|(k, atoms)| k * atoms.iter().map(|a| a.eval(m)).product::<f64>()).sum()
    }

    /// Positive for every admissible multiplier: a nonempty sum of positive multiples of
    /// products of positive atoms.
    pub fn manifestly_positive(&self) -> bool {
        !self.terms.is_empty() && self.terms.iter().all(|(k, _)| *k > 0.0)
    }
}

/// The three coefficients expanded in the atoms.
pub fn q_polynomials() -> [SignedPolynomial; 3] {
    use Atom::*;
    [
        SignedPolynomial { terms: vec![(4.0, vec![MinusAlphaI])] },
        SignedPolynomial { terms: vec![(4.0, vec![C, Gap])] },
        SignedPolynomial { terms: vec![(1.0, vec![]), (2.0, vec![Gap]), (1.0, vec![C]), (2.0, vec![C, MinusAlphaI])] },
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyReport {
    /// Weighted eb-energy of `u` on each slice.
    pub slice_energy: Vec<f64>,
    pub u_norm: f64,
    pub f_norm: f64,
    /// `‖u‖/‖f‖`, defined as 0 when `f = 0`.
    pub ratio: f64,
    pub q: [f64; 3],
    pub q_positive: bool,
}

/// Norms of a forward solution and its source in the spaces of the energy estimate.
pub fn energy_diagnostic(sol: &WaveSolution, source: &[f64], mult: &Multiplier) -> Result<EnergyReport> {
    let grid: &CharGrid = &sol.grid;
    if source.len() != grid.nodes() {
        return Err(Error::Dimension("source does not match the grid".into()));
    }
    let (a0, a1) = mult.weights();
    let u_norm = weighted_norm(grid, &sol.u, NormSpec::eb_b(a0, a1, 0))?.value;
    let f_norm = weighted_norm(grid, source, NormSpec::b(a0, a1, 0))?.value;
    let ratio = if f_norm == 0.0 {
        if u_norm != 0.0 {
            return Err(Error::Domain(format!("nonzero solution (norm {u_norm:e}) for zero source")));
        }
        0.0
    } else {
        u_norm / f_norm
    };
    let (na, h) = (grid.n_a, grid.delta);
    let slice_energy = (0..grid.n_b)
        .map(|n| {
            let row = &sol.u[n * na..(n + 1) * na];
            let vrow = &sol.v[n * na..(n + 1) * na];
            let wb = (-a1 * grid.b(n)).exp();
            (0..na)
                .map(|i| {
                    let w = wb * (-2.0 * a0 * grid.a(i)).exp();
                    let da = if i == 0 { (row[1] - row[0]) / h } else { (row[i] - row[i - 1]) / h };
                    let db = da - vrow[i];
                    w * (row[i].powi(2) * (1.0 + grid.lambda * grid.rho_i(n)) + da * da + 4.0 * db * db)
                })
                .sum::<f64>()
                * h
        })
        .collect();
    let q = q_coefficients(mult);
    let q_positive = q.iter().all(|x| *x > 0.0) && q_polynomials().iter().all(|p| p.manifestly_positive());
    Ok(EnergyReport { slice_energy, u_norm, f_norm, ratio, q, q_positive })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_triple() {
        let m = Multiplier::new(0.0, -1.0, 1.0).unwrap();
        assert_eq!(q_coefficients(&m), [4.0, 4.0, 6.0]);
    }

    #[test]
    fn polynomials_agree_with_formulas() {
        for (a0, ai, c) in [(0.0, -1.0, 1.0), (0.3, -0.2, 2.5), (-0.5, -0.7, 0.1)] {
            let m = Multiplier::new(a0, ai, c).unwrap();
            let direct = q_coefficients(&m);
            for (p, d) in q_polynomials().iter().zip(direct) {
                assert!((p.eval(&m) - d).abs() < 1e-14);
                assert!(p.manifestly_positive());
            }
        }
    }

    #[test]
    fn validation() {
        assert!(Multiplier::new(0.0, 0.0, 1.0).is_err());
        assert!(Multiplier::new(-1.0, -0.5, 1.0).is_err());
        assert!(Multiplier::new(0.0, -1.0, 0.0).is_err());
    }
}

//! The logarithmic characteristic lattice `a = log ρ₀`, `b = log ρ_I`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Largest admissible value of `ρ_I^{ℓ_I}` on the deepest slice.
pub const DEPTH_TOLERANCE: f64 = 1e-3;

/// Uniform lattice with equal steps in `a` and `b`.
///
/// Columns are indexed by `i` with `a_i = a_min + iΔ`; slices by `n` with
/// `b_n = b_max − nΔ`, so that marching in `n` moves toward null infinity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharGrid {
    pub a_min: f64,
    pub b_max: f64,
    pub delta: f64,
    pub n_a: usize,
    pub n_b: usize,
    /// Spherical eigenvalue `λ_ℓ ≥ 0`, entering through `x_I² Δ̸ ↦ ρ_I λ_ℓ`.
    pub lambda: f64,
}

impl CharGrid {
    /// Build from coordinate ranges, checking the unit step ratio and the depth at `b_min`.
    pub fn new(
        a_range: (f64, f64),
        b_range: (f64, f64),
        n_a: usize,
        n_b: usize,
        lambda: f64,
        ell_i: f64,
    ) -> Result<Self> {
        if n_a < 2 || n_b < 2 {
            return Err(Error::Param(format!("grid needs at least 2x2 nodes, got {n_a}x{n_b}")));
        }
        let (a_min, a_max) = a_range;
        let (b_min, b_max) = b_range;
        if !(a_max > a_min && b_max > b_min) || ![a_min, a_max, b_min, b_max].iter().all(|v| v.is_finite()) {
            return Err(Error::Param(format!("empty or non-finite ranges a={a_range:?}, b={b_range:?}")));
        }
        if b_max >= 0.0 {
            return Err(Error::Param(format!("b_max = {b_max} must be negative (ρ_I < 1)")));
        }
        let da = (a_max - a_min) / (n_a - 1) as f64;
        let db = (b_max - b_min) / (n_b - 1) as f64;
        if ((da - db) / db).abs() > 1e-9 {
            return Err(Error::Param(format!("step ratio must be 1:1, got Δa = {da}, Δb = {db}")));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::Param(format!("mode eigenvalue {lambda} must be nonnegative")));
        }
        let grid = CharGrid { a_min, b_max, delta: db, n_a, n_b, lambda };
        grid.check_depth(ell_i)?;
        Ok(grid)
    }

    /// Lattice with `n_b` slices spanning `b_range` and `n_a` columns starting at `a_min`.
    pub fn with_columns(
        a_min: f64,
        n_a: usize,
        b_range: (f64, f64),
        n_b: usize,
        lambda: f64,
        ell_i: f64,
    ) -> Result<Self> {
        if n_b < 2 {
            return Err(Error::Param("need at least two slices".into()));
        }
        let delta = (b_range.1 - b_range.0) / (n_b - 1) as f64;
        Self::new((a_min, a_min + delta * (n_a.max(2) - 1) as f64), b_range, n_a, n_b, lambda, ell_i)
    }

    /// Same ranges with the step halved.
    pub fn refined(&self) -> Self {
        CharGrid { delta: self.delta / 2.0, n_a: 2 * self.n_a - 1, n_b: 2 * self.n_b - 1, ..self.clone() }
    }

    pub fn check_depth(&self, ell_i: f64) -> Result<()> {
        if !(ell_i > 0.0) {
            return Err(Error::Param(format!("ell_I = {ell_i} must be positive")));
        }
        let depth = (ell_i * self.b_min()).exp();
        if depth >= DEPTH_TOLERANCE {
            return Err(Error::Param(format!(
                "b_min = {:.3} too shallow: rho_I^ell_I = {depth:.3e} must be below {DEPTH_TOLERANCE:e}",
                self.b_min()
            )));
        }
        Ok(())
    }

    pub fn a(&self, i: usize) -> f64 {
        self.a_min + i as f64 * self.delta
    }

    pub fn b(&self, n: usize) -> f64 {
        self.b_max - n as f64 * self.delta
    }

    pub fn a_max(&self) -> f64 {
        self.a(self.n_a - 1)
    }

    pub fn b_min(&self) -> f64 {
        self.b(self.n_b - 1)
    }

    pub fn rho0(&self, i: usize) -> f64 {
        self.a(i).exp()
    }

    pub fn rho_i(&self, n: usize) -> f64 {
        self.b(n).exp()
    }

    /// Column whose `a` is closest to the requested value.
    pub fn column_near(&self, a: f64) -> usize {
        (((a - self.a_min) / self.delta).round().max(0.0) as usize).min(self.n_a - 1)
    }

    /// All `ρ_I` values in slice order.
    pub fn rho_i_values(&self) -> Vec<f64> {
        (0..self.n_b).map(|n| self.rho_i(n)).collect()
    }

    pub fn nodes(&self) -> usize {
        self.n_a * self.n_b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_and_depth_are_enforced() {
        let ln = f64::ln;
        assert!(CharGrid::new((0.0, 1.0), (ln(1e-20), ln(0.5)), 11, 11, 0.0, 0.2).is_err());
        let b = (ln(1e-20), ln(0.5));
        let n_b = 401;
        let d = (b.1 - b.0) / 400.0;
        let g = CharGrid::new((-2.0, -2.0 + 40.0 * d), b, 41, n_b, 0.0, 0.2).unwrap();
        assert!((g.a_max() - (-2.0 + 40.0 * d)).abs() < 1e-12);
        assert!((g.b_min() - b.0).abs() < 1e-12);
        assert!(CharGrid::new((-2.0, -2.0 + 40.0 * d), (ln(1e-5), ln(0.5)), 41, n_b, 0.0, 0.2).is_err());
        let r = g.refined();
        assert_eq!((r.n_a, r.n_b), (81, 801));
        assert!((r.b_min() - g.b_min()).abs() < 1e-12);
    }
}

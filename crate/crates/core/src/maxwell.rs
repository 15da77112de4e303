//! The 1-form analogue: Maxwell's equations with constraint damping and gauge change.
//!
//! A 1-form `A = r⁻¹ω` is split as `ω = ω₀ dx⁰ + ω₁ dx¹ + r ω̸` with two amplitudes for `ω̸` in
//! the orthonormal sphere coframe. The leading system at null infinity is the transport system
//! with endomorphism `S`; its gauge function at leading order is `(∂_a − ∂_b)ω₀`.

use crate::error::Result;
use crate::scri_solver::fit::DecayFit;
use crate::scri_solver::grid::CharGrid;
use crate::scri_solver::runs::{fit_groups, generic_profile, group_predictions};
use crate::scri_solver::transport::{
    homogeneous_solution, transport_solve, ConstantCoefficients, SolveOptions, TransportData, TransportSolution,
};
use crate::tensors::ModPair;
use nalgebra::{Matrix3, Matrix4, SVector, Vector4};
use serde::Serialize;

pub const ONEFORM_BLOCKS: [&str; 3] = ["w0", "w1", "wslash"];
pub const ONEFORM_AMPS: [&[usize]; 3] = [&[0], &[1], &[2, 3]];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SplitOneForm {
    pub omega0: f64,
    pub omega1: f64,
    pub slashed: [f64; 2],
}

impl SplitOneForm {
    pub fn to_vector(&self) -> Vector4<f64> {
        Vector4::new(self.omega0, self.omega1, self.slashed[0], self.slashed[1])
    }

    pub fn from_vector(v: &Vector4<f64>) -> Self {
        SplitOneForm { omega0: v[0], omega1: v[1], slashed: [v[2], v[3]] }
    }
}

/// `S_{E^C,E^Υ}` on the blocks `(ω₀, ω₁, ω̸)`.
pub fn maxwell_s(pair: ModPair) -> Matrix3<f64> {
    let (c, u) = (pair.gamma_c, pair.gamma_u);
    Matrix3::new(c, 0.0, 0.0, c - u, -u, 0.0, 0.0, 0.0, 0.0)
}

/// `S` acting on the four amplitudes.
pub fn maxwell_s_amps(pair: ModPair) -> Matrix4<f64> {
    let s = maxwell_s(pair);
    let mut m = Matrix4::zeros();
    for i in 0..2 {
        for k in 0..2 {
            m[(i, k)] = s[(i, k)];
        }
    }
    m[(2, 2)] = s[(2, 2)];
    m[(3, 3)] = s[(2, 2)];
    m
}

/// The Minkowski pairing of split 1-forms, `g⁻¹ = −2(∂₀⊗∂₁ + ∂₁⊗∂₀) + g̸⁻¹`.
pub fn oneform_pairing() -> Matrix3<f64> {
    Matrix3::new(0.0, -2.0, 0.0, -2.0, 0.0, 0.0, 0.0, 0.0, 1.0)
}

/// Max-abs entry of `S*_{E^C,E^Υ} + S_{E^Υ,E^C}` with `S*` the adjoint under the pairing.
pub fn maxwell_duality_residual(pair: ModPair) -> f64 {
    let m = oneform_pairing();
    let minv = m.try_inverse().expect("pairing is nondegenerate");
    let adj = minv * maxwell_s(pair).transpose() * m;
    (adj + maxwell_s(pair.swapped())).abs().max()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxwellData {
    /// Generic exact solution of the leading system.
    Generic,
    /// Exact solution with vanishing gauge function, `ω₀ = C ρ^{γ^C}`.
    GaugeSatisfying,
    Zero,
}

#[derive(Clone, Debug, Serialize)]
pub struct MaxwellBlockFit {
    pub block: &'static str,
    pub predicted: f64,
    pub fit: DecayFit,
}

#[derive(Clone, Debug, Serialize)]
pub struct MaxwellReport {
    pub data: MaxwellData,
    pub fit_a: f64,
    pub blocks: Vec<MaxwellBlockFit>,
    /// Fit of `|ω₀ + ω₁|` along the same column.
    pub combined: Option<DecayFit>,
    /// Max over each slice of the discrete gauge function.
    #[serde(skip)]
    pub gauge_residual: Vec<f64>,
    /// `max |gauge| / max |ω|` over the run.
    pub gauge_relative: f64,
    pub sup_norm: f64,
}

/// Discrete `(∂_a − ∂_b)ω₀` along the diagonal, the same stencil that advances `ω₀`.
pub fn gauge_residual(sol: &TransportSolution<4>) -> Vec<f64> {
    let g = &sol.grid;
    let mut out = vec![0.0; g.n_b];
    for (n, slot) in out.iter_mut().enumerate().skip(1) {
        *slot = (1..g.n_a)
            .map(|i| ((sol.u_at(i, n)[0] - sol.u_at(i - 1, n - 1)[0]) / g.delta).abs())
            .fold(0.0, f64::max);
    }
    out
}

pub fn maxwell_data(grid: &CharGrid, pair: ModPair, kind: MaxwellData) -> TransportData<4> {
    let s = maxwell_s_amps(pair);
    let gc = pair.gamma_c;
    match kind {
        MaxwellData::Zero => TransportData::zero(grid),
        MaxwellData::Generic | MaxwellData::GaugeSatisfying => {
            let exact = homogeneous_solution(s, grid.b_max, move |a| {
                let mut w = SVector::<f64, 4>::zeros();
                let mut dw = SVector::<f64, 4>::zeros();
                for k in 0..4 {
                    (w[k], dw[k]) = generic_profile(k, a);
                }
                if kind == MaxwellData::GaugeSatisfying {
                    w[0] = 0.7 * (gc * a).exp();
                    dw[0] = gc * w[0];
                }
                (w, dw)
            });
            TransportData::from_fn(grid, exact)
        }
    }
}

/// Evolve the leading Maxwell system and report decay and gauge propagation.
pub fn maxwell_evolve(
    grid: &CharGrid,
    pair: ModPair,
    kind: MaxwellData,
    fit_a: f64,
    window: (f64, f64),
    opts: SolveOptions,
) -> Result<(TransportSolution<4>, MaxwellReport)> {
    let s = maxwell_s_amps(pair);
    let data = maxwell_data(grid, pair, kind);
    let sol = transport_solve(grid, &ConstantCoefficients::new(s), &data, opts)?;
    let col = grid.column_near(fit_a);
    let sup_norm = sol.sup_norm();
    let (blocks, combined) = if kind == MaxwellData::Zero {
        (Vec::new(), None)
    } else {
        let fits = fit_groups(&sol, col, &ONEFORM_AMPS, window)?;
        let predicted = group_predictions(&s, &ONEFORM_AMPS);
        let blocks = (0..3)
            .map(|b| MaxwellBlockFit { block: ONEFORM_BLOCKS[b], predicted: predicted[b], fit: fits[b] })
            .collect();
        let sum: Vec<f64> = (0..grid.n_b).map(|n| sol.u_at(col, n)[0] + sol.u_at(col, n)[1]).collect();
        let combined = crate::scri_solver::fit::decay_fit(&grid.rho_i_values(), &sum, window).ok();
        (blocks, combined)
    };
    let gauge = gauge_residual(&sol);
    let gmax = gauge.iter().cloned().fold(0.0, f64::max);
    let gauge_relative = if sup_norm > 0.0 { gmax / sup_norm } else { 0.0 };
    let report = MaxwellReport {
        data: kind,
        fit_a: grid.a(col),
        blocks,
        combined,
        gauge_residual: gauge,
        gauge_relative,
        sup_norm,
    };
    Ok((sol, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensors::{spectrum_eigensolver, sorted_real};
    use nalgebra::DMatrix;

    #[test]
    fn closed_form_matrix() {
        let s = maxwell_s(ModPair::new(0.5, -0.25).unwrap());
        assert_eq!((s[(0, 0)], s[(1, 1)], s[(2, 2)]), (0.5, 0.25, 0.0));
        assert_eq!(s[(1, 0)], 0.75);
        assert_eq!(maxwell_s(ModPair::unchecked(0.0, 0.0)), Matrix3::zeros());
        let d = DMatrix::from_column_slice(3, 3, s.as_slice());
        assert!(sorted_real(&spectrum_eigensolver(&d)).iter().zip([0.5, 0.25, 0.0]).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn duality() {
        assert!(maxwell_duality_residual(ModPair::new(0.6, -0.3).unwrap()) < 1e-15);
    }
}

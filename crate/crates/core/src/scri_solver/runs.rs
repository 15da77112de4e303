//! Parameterised decay runs shared by the CLI and the acceptance checks.

use super::fit::{decay_fit, DecayFit};
use super::grid::CharGrid;
use super::transport::{
    coupled_exponents, homogeneous_solution, transport_solve, ConstantCoefficients, SolveOptions, TransportData,
    TransportSolution,
};
use super::wave::{damped_wave_solve, Damping, ScalarData, WaveProblem, WaveSolution};
use crate::error::Result;
use crate::tensors::{a_blocks, expand_blocks, ModPair, BLOCK_AMPS, BLOCK_NAMES, NAMP, NBLOCK};
use nalgebra::{SMatrix, SVector};
use serde::Serialize;

/// Default fit window in `ρ_I`.
pub const DEFAULT_WINDOW: (f64, f64) = (1e-4, 1e-2);

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SliceRecord {
    pub rho_i: f64,
    pub sup: f64,
    pub energy: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WaveRunSpec {
    pub grid: CharGrid,
    pub mass: f64,
    pub damping: Damping,
    /// Centre and width (in `a`) of the Gaussian data on the initial slice.
    pub bump: (f64, f64),
    /// Column used for the fit, given by its `a` value.
    pub fit_a: f64,
    pub window: (f64, f64),
}

#[derive(Clone, Debug, Serialize)]
pub struct WaveRunReport {
    pub damping: Damping,
    pub mass: f64,
    pub predicted: f64,
    pub fit: DecayFit,
    pub fit_a: f64,
    #[serde(skip)]
    pub series: Vec<SliceRecord>,
}

/// Gaussian `u` with `∂_b u = 0` on the initial slice; zero on the inflow edge.
pub fn bump_data(grid: &CharGrid, centre: f64, width: f64) -> ScalarData {
    let g = |a: f64| (-((a - centre) / width).powi(2)).exp();
    let dg = |a: f64| -2.0 * (a - centre) / width.powi(2) * g(a);
    let mut data = ScalarData::zero(grid);
    for i in 0..grid.n_a {
        data.slice_u[i] = g(grid.a(i));
        data.slice_v[i] = dg(grid.a(i));
    }
    data.edge_u[0] = data.slice_u[0];
    data.edge_v[0] = data.slice_v[0];
    data
}

pub fn wave_decay_run(spec: &WaveRunSpec) -> Result<(WaveSolution, WaveRunReport)> {
    let data = bump_data(&spec.grid, spec.bump.0, spec.bump.1);
    let problem = WaveProblem { mass: spec.mass, damping: spec.damping, source: None };
    let sol = damped_wave_solve(&spec.grid, &problem, &data)?;
    let col = spec.grid.column_near(spec.fit_a);
    let fit = decay_fit(&spec.grid.rho_i_values(), &sol.u_column(col), spec.window)?;
    let series = (0..spec.grid.n_b)
        .map(|n| SliceRecord { rho_i: spec.grid.rho_i(n), sup: sol.slice_sup(n), energy: sol.energy[n] })
        .collect();
    let report = WaveRunReport {
        damping: spec.damping,
        mass: spec.mass,
        predicted: spec.damping.coefficient(),
        fit,
        fit_a: spec.grid.a(col),
        series,
    };
    Ok((sol, report))
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockFit {
    pub block: &'static str,
    pub predicted: f64,
    pub fit: DecayFit,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransportRunReport {
    pub gamma_c: f64,
    pub gamma_u: f64,
    pub fit_a: f64,
    pub blocks: Vec<BlockFit>,
    /// Per slice: `ρ_I` and the sup over the slice of each block norm.
    #[serde(skip)]
    pub series: Vec<(f64, [f64; NBLOCK])>,
}

/// Smooth generic profile for component `k`, with its `a`-derivative.
pub fn generic_profile(k: usize, a: f64) -> (f64, f64) {
    let (p, s) = (1.3 + 0.1 * k as f64, 0.3 + 0.05 * k as f64);
    (1.0 + s * (p * a + k as f64).sin(), s * p * (p * a + k as f64).cos())
}

/// Exact homogeneous solution `e^{(b − b_max)A} w(a)` with generic `w`.
pub fn generic_transport_data<const D: usize>(grid: &CharGrid, a_mat: SMatrix<f64, D, D>) -> TransportData<D> {
    let exact = homogeneous_solution(a_mat, grid.b_max, |a| {
        let mut w = SVector::<f64, D>::zeros();
        let mut dw = SVector::<f64, D>::zeros();
        for k in 0..D {
            (w[k], dw[k]) = generic_profile(k, a);
        }
        (w, dw)
    });
    TransportData::from_fn(grid, exact)
}

/// Predicted exponent for each group of components: the slowest rate coupled into the group.
pub fn group_predictions<const D: usize>(a_mat: &SMatrix<f64, D, D>, groups: &[&[usize]]) -> Vec<f64> {
    let per = coupled_exponents(a_mat);
    groups.iter().map(|g| g.iter().map(|&k| per[k]).fold(f64::INFINITY, f64::min)).collect()
}

/// Fit each group of components of a transport solution along one column.
pub fn fit_groups<const D: usize>(
    sol: &TransportSolution<D>,
    col: usize,
    groups: &[&[usize]],
    window: (f64, f64),
) -> Result<Vec<DecayFit>> {
    let x = sol.grid.rho_i_values();
    groups.iter().map(|g| decay_fit(&x, &sol.block_column(col, g), window)).collect()
}

/// Full `A` (with `h = 0`) on ten amplitudes, generic data, blockwise fits.
pub fn transport_decay_run(
    pair: ModPair,
    grid: &CharGrid,
    fit_a: f64,
    window: (f64, f64),
    opts: SolveOptions,
) -> Result<(TransportSolution<NAMP>, TransportRunReport)> {
    let a_mat = expand_blocks(&a_blocks(pair));
    let data = generic_transport_data(grid, a_mat);
    let sol = transport_solve(grid, &ConstantCoefficients::new(a_mat), &data, opts)?;
    let col = grid.column_near(fit_a);
    let fits = fit_groups(&sol, col, &BLOCK_AMPS, window)?;
    let predicted = group_predictions(&a_mat, &BLOCK_AMPS);
    let blocks = (0..NBLOCK).map(|b| BlockFit { block: BLOCK_NAMES[b], predicted: predicted[b], fit: fits[b] }).collect();
    let series = (0..grid.n_b)
        .map(|n| {
            let mut s = [0.0; NBLOCK];
            for (b, amps) in BLOCK_AMPS.iter().enumerate() {
                s[b] = sol.block_sup(n, amps);
            }
            (grid.rho_i(n), s)
        })
        .collect();
    let report = TransportRunReport {
        gamma_c: pair.gamma_c,
        gamma_u: pair.gamma_u,
        fit_a: grid.a(col),
        blocks,
        series,
    };
    Ok((sol, report))
}

/// Exponent agreement: relative tolerance, absolute `abs_floor` for vanishing predictions.
pub fn exponent_matches(predicted: f64, fitted: f64, rel: f64, abs_floor: f64) -> bool {
    if predicted == 0.0 {
        fitted.abs() <= abs_floor
    } else {
        ((fitted - predicted) / predicted).abs() <= rel
    }
}

//! Leading-order quasilinear model at null infinity: Picard iteration with the quadratic
//! couplings of `A_g`, extraction of scri limits, and the Bondi mass.
//!
//! With `∂₁h ≈ ρ₀ v` at leading order, the `h`-dependent entries of `A_g` produce the sources
//! `f₁₁ = ½ρ₀|v_tf|²` and `f_tf = −2ρ₀ v_tf v₀₀` of `L⁰ h = f`, the factor `½` coming from
//! integrating the linearization along `g_m + s r⁻¹h`.

use crate::error::{Error, Result};
use crate::scri_solver::fit::{decay_fit, DecayFit};
use crate::scri_solver::grid::CharGrid;
use crate::scri_solver::transport::{
    homogeneous_solution, transport_solve, ConstantCoefficients, ForcedCoefficients, SolveOptions, TransportData,
    TransportSolution,
};
use crate::scri_solver::runs::generic_profile;
use crate::tensors::{a_blocks, expand_blocks, Amp, Mat10, ModPair, CU_ORDER, NAMP};
use serde::{Deserialize, Serialize};

const H00: usize = 0;
const H11: usize = 4;
const TF: [usize; 2] = [8, 9];

/// Sources of the quadratic model evaluated on a solution.
pub fn quadratic_source(sol: &TransportSolution<NAMP>) -> Vec<Amp> {
    let g = &sol.grid;
    let mut out = vec![Amp::zeros(); g.nodes()];
    for n in 0..g.n_b {
        for i in 0..g.n_a {
            let v = sol.v_at(i, n);
            let rho0 = g.rho0(i);
            let f = &mut out[n * g.n_a + i];
            f[H11] = 0.5 * rho0 * (v[TF[0]].powi(2) + v[TF[1]].powi(2));
            for k in TF {
                f[k] = -2.0 * rho0 * v[k] * v[H00];
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct PicardSpec {
    pub grid: CharGrid,
    pub pair: ModPair,
    pub data: TransportData<NAMP>,
    pub iterations: usize,
    pub quadratic: bool,
    /// Stop once the update norm falls below `tol` times the solution norm.
    pub tol: f64,
}

#[derive(Clone, Debug)]
pub struct PicardResult {
    pub solution: TransportSolution<NAMP>,
    pub update_norms: Vec<f64>,
    /// Geometric mean of successive update ratios, when at least two updates are nonzero.
    pub contraction: Option<f64>,
    /// Relative residual of the discrete `(dx¹)²` relation at the final iterate.
    pub fixed_point_residual: f64,
}

fn max_diff(a: &[Amp], b: &[Amp]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs().max()).fold(0.0, f64::max)
}

/// `h⁽ⁿ⁺¹⁾` solves the linear transport system with the sources of `h⁽ⁿ⁾`; the linear part of
/// `A`, including `−2γ^Υ` on the `(1,1)` block, stays on the left.
pub fn picard_iterate(spec: &PicardSpec, opts: SolveOptions) -> Result<PicardResult> {
    if spec.iterations == 0 || spec.iterations > 20 {
        return Err(Error::Param(format!("iterations = {} must lie in 1..=20", spec.iterations)));
    }
    let a_mat = expand_blocks(&a_blocks(spec.pair));
    let base = ConstantCoefficients::new(a_mat);
    let mut sol = transport_solve(&spec.grid, &base, &spec.data, opts)?;
    let mut updates = Vec::new();
    if spec.quadratic {
        for _ in 1..spec.iterations {
            let f = quadratic_source(&sol);
            let coeffs = ForcedCoefficients { base: base.clone(), forcing: &f, n_a: spec.grid.n_a };
            let next = transport_solve(&spec.grid, &coeffs, &spec.data, opts)?;
            let upd = max_diff(&next.u, &sol.u);
            updates.push(upd);
            sol = next;
            let k = updates.len();
            if k >= 4 && (0..3).all(|j| updates[k - 1 - j] > updates[k - 2 - j]) {
                return Err(Error::Divergence(format!("update norms grew three times in a row: {:?}", &updates[k - 4..])));
            }
            if !upd.is_finite() {
                return Err(Error::NonFinite("Picard update".into()));
            }
            if upd <= spec.tol * sol.sup_norm().max(f64::MIN_POSITIVE) {
                break;
            }
        }
    }
    let nonzero: Vec<f64> = updates.iter().cloned().filter(|u| *u > 0.0).collect();
    let contraction = (nonzero.len() >= 2).then(|| {
        let k = nonzero.len() - 1;
        (nonzero[k] / nonzero[0]).powf(1.0 / k as f64)
    });
    let fixed_point_residual = if spec.quadratic { h11_relation_residual(&sol, &a_mat) } else { 0.0 };
    Ok(PicardResult { solution: sol, update_norms: updates, contraction, fixed_point_residual })
}

/// Residual of the trapezoidal `(1,1)` update with the source evaluated on `sol` itself,
/// relative to the largest `|v₁₁|`.
pub fn h11_relation_residual(sol: &TransportSolution<NAMP>, a_mat: &Mat10) -> f64 {
    let g = &sol.grid;
    let f = quadratic_source(sol);
    let rate = |i: usize, n: usize| {
        let v = sol.v_at(i, n);
        -(a_mat * v)[H11] - 0.5 * g.rho_i(n) * g.lambda * sol.u_at(i, n)[H11] + 0.5 * f[n * g.n_a + i][H11]
    };
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for n in 0..g.n_b - 1 {
        for i in 1..g.n_a {
            let r = sol.v_at(i, n + 1)[H11] - sol.v_at(i, n)[H11] - 0.5 * g.delta * (rate(i, n) + rate(i, n + 1));
            worst = worst.max(r.abs());
            scale = scale.max(sol.v_at(i, n)[H11].abs());
        }
    }
    if scale > 0.0 {
        worst / scale
    } else {
        worst
    }
}

/// Smooth small data: the exact linear solution with profiles scaled by `eps`, the tracefree
/// block carrying `news(a)`.
pub fn bondi_data(grid: &CharGrid, pair: ModPair, eps: f64, news: impl Fn(f64) -> (f64, f64)) -> TransportData<NAMP> {
    let a_mat = expand_blocks(&a_blocks(pair));
    let exact = homogeneous_solution(a_mat, grid.b_max, |a| {
        let mut w = Amp::zeros();
        let mut dw = Amp::zeros();
        for k in 0..NAMP {
            let (p, dp) = generic_profile(k, a);
            (w[k], dw[k]) = (eps * p, eps * dp);
        }
        let (s, ds) = news(a);
        for (j, k) in TF.into_iter().enumerate() {
            let amp = if j == 0 { 1.0 } else { 0.5 };
            (w[k], dw[k]) = (eps * amp * s, eps * amp * ds);
        }
        (w, dw)
    });
    TransportData::from_fn(grid, exact)
}

/// Gaussian `exp(−((a − c)/w)²)` with its derivative.
pub fn gaussian(c: f64, w: f64) -> impl Fn(f64) -> (f64, f64) + Copy {
    move |a| {
        let g = (-((a - c) / w).powi(2)).exp();
        (g, -2.0 * (a - c) / (w * w) * g)
    }
}

/// Three-point Aitken extrapolation of `x₁, x₂, x₃` sampled at geometrically spaced `ρ_I`.
/// Returns `None` when the differences do not contract.
pub fn aitken(x1: f64, x2: f64, x3: f64) -> Option<f64> {
    let (d1, d2) = (x2 - x1, x3 - x2);
    let denom = d2 - d1;
    let scale = x1.abs().max(x2.abs()).max(x3.abs());
    if d2 == 0.0 {
        return Some(x3);
    }
    if denom == 0.0 || (d2 / d1).abs() >= 1.0 || !(d2 / d1).is_finite() {
        return if d2.abs() <= 1e-15 * scale { Some(x3) } else { None };
    }
    Some(x3 - d2 * d2 / denom)
}

#[derive(Clone, Debug, Serialize)]
pub struct ScriLimits {
    pub rho0: Vec<f64>,
    pub h11_leading: Vec<f64>,
    pub slashed_leading: Vec<[f64; 2]>,
    /// Largest extracted `|limit|` over the `π^{CΥ}` amplitudes.
    pub cu_limit: f64,
    /// Decay fits of `|ρ_I∂_{ρ_I}|` of each group along the fit column.
    pub h11_remainder: DecayFit,
    pub slashed_remainder: DecayFit,
    pub cu_remainder: DecayFit,
    /// Columns where the extrapolation did not converge.
    pub non_convergent: Vec<usize>,
}

/// Slices used for the extrapolation: the deepest one and two more at spacing `stride`.
fn extrapolation_slices(grid: &CharGrid) -> [usize; 3] {
    let last = grid.n_b - 1;
    let stride = (grid.n_b / 16).max(1);
    [last - 2 * stride, last - stride, last]
}

/// Fit of `|∂_b|` of a column series (one-sided differences toward scri).
pub fn remainder_fit(grid: &CharGrid, series: &[f64], window: (f64, f64)) -> Result<DecayFit> {
    let x: Vec<f64> = (0..grid.n_b - 1).map(|n| (0.5 * (grid.b(n) + grid.b(n + 1))).exp()).collect();
    let d: Vec<f64> = series.windows(2).map(|w| (w[0] - w[1]) / grid.delta).collect();
    decay_fit(&x, &d, window)
}

/// Fit windows in `ρ_I` for the three remainder groups.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemainderWindows {
    pub h11: (f64, f64),
    pub slashed: (f64, f64),
    pub cu: (f64, f64),
}

impl Default for RemainderWindows {
    fn default() -> Self {
        RemainderWindows { h11: (1e-28, 1e-20), slashed: (1e-14, 1e-6), cu: (1e-28, 1e-20) }
    }
}

pub fn extract_leading(sol: &TransportSolution<NAMP>, fit_a: f64, windows: RemainderWindows) -> Result<ScriLimits> {
    let g = &sol.grid;
    let [n1, n2, n3] = extrapolation_slices(g);
    let mut non_convergent = Vec::new();
    let mut limit = |i: usize, k: usize| -> f64 {
        let x = |n: usize| sol.u_at(i, n)[k];
        aitken(x(n1), x(n2), x(n3)).unwrap_or_else(|| {
            non_convergent.push(i);
            x(n3)
        })
    };
    let mut h11_leading = Vec::with_capacity(g.n_a);
    let mut slashed_leading = Vec::with_capacity(g.n_a);
    let mut cu_limit = 0.0f64;
    for i in 0..g.n_a {
        h11_leading.push(limit(i, H11));
        slashed_leading.push([limit(i, TF[0]), limit(i, TF[1])]);
        for &k in &CU_ORDER {
            cu_limit = cu_limit.max(limit(i, k).abs());
        }
    }
    non_convergent.sort_unstable();
    non_convergent.dedup();
    let col = g.column_near(fit_a);
    let norm = |ks: &[usize]| -> Vec<f64> {
        (0..g.n_b).map(|n| ks.iter().map(|&k| sol.u_at(col, n)[k].powi(2)).sum::<f64>().sqrt()).collect()
    };
    let h11: Vec<f64> = sol.u_column(col, H11);
    let tf0 = sol.u_column(col, TF[0]);
    Ok(ScriLimits {
        rho0: (0..g.n_a).map(|i| g.rho0(i)).collect(),
        h11_leading,
        slashed_leading,
        cu_limit,
        h11_remainder: remainder_fit(g, &h11, windows.h11)?,
        slashed_remainder: remainder_fit(g, &tf0, windows.slashed)?,
        cu_remainder: decay_fit(&g.rho_i_values(), &norm(&CU_ORDER), windows.cu)?,
        non_convergent,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MassRecord {
    pub u: f64,
    pub mass: f64,
    pub news_flux: f64,
    /// `|dM_B/du + news_flux|`.
    pub residual: f64,
}

/// Bondi mass `M_B = m + γ^Υ h₁₁⁽⁰⁾` (the sphere average of the ℓ = 0 amplitude) and the flux
/// `(1/32π)∫|∂_u h̸⁽⁰⁾|² = ⅛|∂_u h̸⁽⁰⁾|²`, with `u = −1/ρ₀` and `∂_u = ρ₀∂_a`.
pub fn bondi_mass(limits: &ScriLimits, grid: &CharGrid, mass: f64, gamma_u: f64) -> Result<Vec<MassRecord>> {
    let n = limits.h11_leading.len();
    if n < 3 {
        return Err(Error::Domain("need at least three retarded times for the mass derivative".into()));
    }
    let h = grid.delta;
    let d = |f: &dyn Fn(usize) -> f64, i: usize| -> f64 {
        if i == 0 {
            (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h)
        } else if i == n - 1 {
            (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3)) / (2.0 * h)
        } else {
            (f(i + 1) - f(i - 1)) / (2.0 * h)
        }
    };
    let m_of = |i: usize| mass + gamma_u * limits.h11_leading[i];
    let s0 = |i: usize| limits.slashed_leading[i][0];
    let s1 = |i: usize| limits.slashed_leading[i][1];
    Ok((0..n)
        .map(|i| {
            let rho0 = limits.rho0[i];
            let news = [rho0 * d(&s0, i), rho0 * d(&s1, i)];
            let flux = 0.125 * (news[0].powi(2) + news[1].powi(2));
            let dm_du = rho0 * d(&m_of, i);
            MassRecord { u: -1.0 / rho0, mass: m_of(i), news_flux: flux, residual: (dm_du + flux).abs() }
        })
        .collect())
}

/// Total mass change and radiated energy `∫ flux du` (trapezoidal in `u`).
pub fn mass_balance(records: &[MassRecord]) -> (f64, f64) {
    let dm = records.last().map_or(0.0, |r| r.mass) - records.first().map_or(0.0, |r| r.mass);
    let radiated = records.windows(2).map(|w| 0.5 * (w[0].news_flux + w[1].news_flux) * (w[1].u - w[0].u)).sum();
    (dm, radiated)
}

/// Whether `M_B` never increases by more than `tol` between consecutive retarded times.
pub fn mass_nonincreasing(records: &[MassRecord], tol: f64) -> bool {
    records.windows(2).all(|w| w[1].mass - w[0].mass <= tol)
}

#[derive(Clone, Debug)]
pub struct BondiRunSpec {
    pub grid: CharGrid,
    pub pair: ModPair,
    pub mass: f64,
    pub amplitude: f64,
    pub news: (f64, f64),
    pub iterations: usize,
    pub tol: f64,
    pub fit_a: f64,
    pub windows: RemainderWindows,
}

#[derive(Clone, Debug, Serialize)]
pub struct BondiRun {
    pub gamma_u: f64,
    pub delta: f64,
    pub update_norms: Vec<f64>,
    pub contraction: Option<f64>,
    pub fixed_point_residual: f64,
    pub limits: ScriLimits,
    #[serde(skip)]
    pub records: Vec<MassRecord>,
    pub mass_change: f64,
    pub radiated: f64,
    pub max_residual: f64,
}

/// Picard iteration from Gaussian news data, extraction at scri and the mass series.
pub fn bondi_run(spec: &BondiRunSpec, opts: SolveOptions) -> Result<BondiRun> {
    let data = bondi_data(&spec.grid, spec.pair, spec.amplitude, gaussian(spec.news.0, spec.news.1));
    let picard = PicardSpec {
        grid: spec.grid.clone(),
        pair: spec.pair,
        data,
        iterations: spec.iterations,
        quadratic: true,
        tol: spec.tol,
    };
    let it = picard_iterate(&picard, opts)?;
    let limits = extract_leading(&it.solution, spec.fit_a, spec.windows)?;
    let records = bondi_mass(&limits, &spec.grid, spec.mass, spec.pair.gamma_u)?;
    let (mass_change, radiated) = mass_balance(&records);
    let max_residual = records.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(BondiRun {
        gamma_u: spec.pair.gamma_u,
        delta: spec.grid.delta,
        update_norms: it.update_norms,
        contraction: it.contraction,
        fixed_point_residual: it.fixed_point_residual,
        limits,
        records,
        mass_change,
        radiated,
        max_residual,
    })
}

/// One Richardson step for a second-order quantity: `(4X_{Δ/2} − X_Δ)/3`.
pub fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aitken_is_exact_on_single_power() {
        let (c0, c1, p) = (0.7, -0.3, 0.4);
        let x = |r: f64| c0 + c1 * r.powf(p);
        let l = aitken(x(1e-4), x(1e-6), x(1e-8)).unwrap();
        assert!((l - c0).abs() < 1e-14);
        assert!(aitken(1.0, 2.0, 3.0).is_none());
        assert_eq!(aitken(2.0, 2.0, 2.0), Some(2.0));
    }
}

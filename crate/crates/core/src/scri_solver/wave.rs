//! Damped scalar waves `(□_g + 2γ r⁻¹ ∂_t) φ = f` on Schwarzschild for the rescaled `u = rφ`.
//!
//! In `(a, b)` the equation is exact in the form
//!
//! ```text
//! ∂_b W = γ v + S u − ½ f,   W = (1 − ε) v + ε ∂_a u,   v = (∂_a − ∂_b) u,
//! ε = ½ ρ_I (1 − 2mρ),       S = ½ ρ_I (λ + 2mρ),      ρ = ρ₀ρ_I,
//! ```
//!
//! whose leading part at null infinity is the scalar transport operator with `A = γ`.
//! `W` is advanced along `∂_b` and `u` along the diagonal with the trapezoidal rule; the
//! `∂_a u` inside `W` uses the already computed nodes of the new slice (second-order one-sided).

use super::grid::CharGrid;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Which modification of `□_g` is modelled.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "strength", rename_all = "snake_case")]
pub enum Damping {
    None,
    /// `□_g + 2γ^C r⁻¹ ∂_t`.
    Constraint(f64),
    /// `□_g − 2γ^Υ r⁻¹ ∂_t` with `γ^Υ < 0`.
    GaugeChange(f64),
}

impl Damping {
    /// Coefficient `γ` of `2γ r⁻¹ ∂_t`, which is also the indicial exponent at null infinity.
    pub fn coefficient(self) -> f64 {
        match self {
            Damping::None => 0.0,
            Damping::Constraint(g) => g,
            Damping::GaugeChange(g) => -g,
        }
    }
}

/// Scalar data on the initial slice (by column) and on the inflow edge (by slice).
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarData {
    pub slice_u: Vec<f64>,
    pub slice_v: Vec<f64>,
    pub edge_u: Vec<f64>,
    pub edge_v: Vec<f64>,
}

impl ScalarData {
    pub fn from_fn(grid: &CharGrid, field: impl Fn(f64, f64) -> (f64, f64)) -> Self {
        let (slice_u, slice_v) = (0..grid.n_a).map(|i| field(grid.a(i), grid.b(0))).unzip();
        let (edge_u, edge_v) = (0..grid.n_b).map(|n| field(grid.a(0), grid.b(n))).unzip();
        ScalarData { slice_u, slice_v, edge_u, edge_v }
    }

    pub fn zero(grid: &CharGrid) -> Self {
        Self::from_fn(grid, |_, _| (0.0, 0.0))
    }

    /// Outgoing data `u = F(a)`, `v = F′(a)` (exact for `m = 0`, `γ = 0`, `λ = 0`).
    pub fn outgoing(grid: &CharGrid, f: impl Fn(f64) -> (f64, f64)) -> Self {
        Self::from_fn(grid, |a, _| f(a))
    }
}

pub struct WaveProblem<'s> {
    pub mass: f64,
    pub damping: Damping,
    pub source: Option<&'s (dyn Fn(f64, f64) -> f64 + Sync)>,
}

#[derive(Clone, Debug)]
pub struct WaveSolution {
    pub grid: CharGrid,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// `Σ_i (u² + v²) Δ` per slice.
    pub energy: Vec<f64>,
}

impl WaveSolution {
    pub fn u_at(&self, i: usize, n: usize) -> f64 {
        self.u[n * self.grid.n_a + i]
    }

    pub fn v_at(&self, i: usize, n: usize) -> f64 {
        self.v[n * self.grid.n_a + i]
    }

    pub fn u_column(&self, i: usize) -> Vec<f64> {
        (0..self.grid.n_b).map(|n| self.u_at(i, n)).collect()
    }

    pub fn slice_sup(&self, n: usize) -> f64 {
        let na = self.grid.n_a;
        self.u[n * na..(n + 1) * na].iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn source_grid(&self, source: &dyn Fn(f64, f64) -> f64) -> Vec<f64> {
        let g = &self.grid;
        (0..g.n_b).flat_map(|n| (0..g.n_a).map(move |i| (i, n))).map(|(i, n)| source(g.a(i), g.b(n))).collect()
    }
}

/// Energy growth factor between consecutive unforced slices that aborts the run.
pub const INSTABILITY_FACTOR: f64 = 10.0;

pub fn damped_wave_solve(grid: &CharGrid, problem: &WaveProblem, data: &ScalarData) -> Result<WaveSolution> {
    let (na, nb, h) = (grid.n_a, grid.n_b, grid.delta);
    if data.slice_u.len() != na || data.slice_v.len() != na || data.edge_u.len() != nb || data.edge_v.len() != nb {
        return Err(Error::Dimension("wave data do not match the grid".into()));
    }
    if !(problem.mass >= 0.0) {
        return Err(Error::Param(format!("mass {} must be nonnegative", problem.mass)));
    }
    let gamma = problem.damping.coefficient();
    let (m, lambda) = (problem.mass, grid.lambda);
    let eps = |i: usize, n: usize| 0.5 * grid.rho_i(n) * (1.0 - 2.0 * m * grid.rho0(i) * grid.rho_i(n));
    let pot = |i: usize, n: usize| 0.5 * grid.rho_i(n) * (lambda + 2.0 * m * grid.rho0(i) * grid.rho_i(n));
    let src = |i: usize, n: usize| problem.source.map_or(0.0, |f| f(grid.a(i), grid.b(n)));
    for i in 0..na {
        let r = 1.0 / (grid.rho0(i) * grid.rho_i(0));
        if r <= 2.0 * m {
            return Err(Error::Range(format!("column {i} starts inside the horizon (r = {r:.3})")));
        }
    }
    // ∂_a u at column i from the already known values of that slice: weight on u_i plus the rest.
    let da_split = |row: &[f64], i: usize| -> (f64, f64) {
        match i {
            0 => (0.0, 0.0),
            1 => (1.0 / h, -row[0] / h),
            _ => (1.5 / h, (-4.0 * row[i - 1] + row[i - 2]) / (2.0 * h)),
        }
    };
    let energy_of = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(a, b)| a * a + b * b).sum::<f64>() * h;
    let forcing_of = |n: usize| (0..na).map(|i| src(i, n).abs()).fold(0.0, f64::max);

    let mut u = vec![0.0; grid.nodes()];
    let mut v = vec![0.0; grid.nodes()];
    u[..na].copy_from_slice(&data.slice_u);
    v[..na].copy_from_slice(&data.slice_v);
    let mut energy = vec![energy_of(&u[..na], &v[..na])];
    let mut forced_prev = forcing_of(0) > 0.0;

    for n in 0..nb - 1 {
        let (old, new) = u.split_at_mut((n + 1) * na);
        let (vold, vnew) = v.split_at_mut((n + 1) * na);
        let (uo, vo) = (&old[n * na..], &vold[n * na..]);
        let (un, vn) = (&mut new[..na], &mut vnew[..na]);
        un[0] = data.edge_u[n + 1];
        vn[0] = data.edge_v[n + 1];
        for i in 1..na {
            let (e0, e1) = (eps(i, n), eps(i, n + 1));
            let (s0, s1) = (pot(i, n), pot(i, n + 1));
            let (c_old, rest_old) = da_split(uo, i);
            let w_old = (1.0 - e0) * vo[i] + e0 * (c_old * uo[i] + rest_old);
            let r_old = gamma * vo[i] + s0 * uo[i] - 0.5 * src(i, n);
            let u_prev = uo[i - 1] + 0.5 * h * vo[i - 1];
            let (c_new, rest_new) = da_split(un, i);
            let lhs = (1.0 - e1) + e1 * c_new * 0.5 * h + 0.5 * h * gamma + 0.25 * h * h * s1;
            let rhs = w_old - 0.5 * h * r_old - e1 * (c_new * u_prev + rest_new) - 0.5 * h * (s1 * u_prev - 0.5 * src(i, n + 1));
            let vi = rhs / lhs;
            let ui = u_prev + 0.5 * h * vi;
            if !(ui.is_finite() && vi.is_finite()) {
                return Err(Error::NonFinite(format!(
                    "wave node (i={i}, n={}), a={:.4}, b={:.4}",
                    n + 1,
                    grid.a(i),
                    grid.b(n + 1)
                )));
            }
            un[i] = ui;
            vn[i] = vi;
        }
        let e = energy_of(un, vn);
        let forced = forcing_of(n + 1) > 0.0;
        let e_prev = *energy.last().expect("initial energy recorded");
        if !forced && !forced_prev && e_prev > 0.0 && e > INSTABILITY_FACTOR * e_prev {
            return Err(Error::Unstable(format!(
                "energy grew from {e_prev:.3e} to {e:.3e} between slices {n} and {}",
                n + 1
            )));
        }
        forced_prev = forced;
        energy.push(e);
    }
    Ok(WaveSolution { grid: grid.clone(), u, v, energy })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n_b: usize) -> CharGrid {
        let b = ((1e-16f64).ln(), 0.5f64.ln());
        CharGrid::with_columns(-6.0, n_b / 4, b, n_b, 0.0, 0.2).unwrap()
    }

    #[test]
    fn radiation_field_is_transported_unchanged() {
        let g = grid(801);
        let f = |a: f64| ((-(a + 4.0).powi(2)).exp(), -2.0 * (a + 4.0) * (-(a + 4.0).powi(2)).exp());
        let data = ScalarData::outgoing(&g, f);
        let p = WaveProblem { mass: 0.0, damping: Damping::None, source: None };
        let s = damped_wave_solve(&g, &p, &data).unwrap();
        let mut worst = 0.0f64;
        for n in 0..g.n_b {
            for i in 0..g.n_a {
                worst = worst.max((s.u_at(i, n) - f(g.a(i)).0).abs());
            }
        }
        assert!(worst < 1e-3, "deviation {worst}");
    }

    #[test]
    fn zero_data_zero_solution() {
        let g = grid(201);
        let p = WaveProblem { mass: 0.01, damping: Damping::Constraint(0.5), source: None };
        let s = damped_wave_solve(&g, &p, &ScalarData::zero(&g)).unwrap();
        assert!(s.u.iter().all(|x| *x == 0.0));
    }
}

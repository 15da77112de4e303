//! Discrete weighted b- and eb-Sobolev norms on the characteristic lattice.
//!
//! The b-density `|dρ₀/ρ₀ · dρ_I/ρ_I|` is the uniform measure `da db`. Weights are written for the
//! boundary defining functions `ρ₀` and `x_I = ρ_I^{1/2}`, so `(α₀, α₁)` means `ρ₀^{α₀} x_I^{α₁}`.
//! b-derivatives are `ρ₀∂_{ρ₀} = ∂_a`, `x_I∂_{x_I} = 2∂_b` and the mode factor `√λ`; the eb layer
//! replaces the mode factor by `x_I √λ`.

use super::grid::CharGrid;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub alpha0: f64,
    pub alpha1: f64,
    /// Number of b-derivatives.
    pub k: usize,
    /// Number of eb-derivatives applied on top (0 or 1).
    pub eb_order: usize,
}

impl NormSpec {
    /// `H_b^{k,(α₀,α₁)}`.
    pub fn b(alpha0: f64, alpha1: f64, k: usize) -> Self {
        NormSpec { alpha0, alpha1, k, eb_order: 0 }
    }

    /// `H_{e,b;b}^{(1;k),(α₀,α₁)}`.
    pub fn eb_b(alpha0: f64, alpha1: f64, k: usize) -> Self {
        NormSpec { alpha0, alpha1, k, eb_order: 1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormValue {
    pub value: f64,
    /// Set when a direction has too few nodes for second-order stencils.
    pub order_warning: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Op {
    Da,
    Db,
    Mode,
    ModeEb,
}

/// Centered differences inside, second-order one-sided at the ends; first order on 2-point lines.
fn diff_line(x: &[f64], h: f64, out: &mut [f64]) -> bool {
    let n = x.len();
    if n < 3 {
        let d = (x[1] - x[0]) / h;
        out[0] = d;
        out[1] = d;
        return true;
    }
    out[0] = (-3.0 * x[0] + 4.0 * x[1] - x[2]) / (2.0 * h);
    out[n - 1] = (3.0 * x[n - 1] - 4.0 * x[n - 2] + x[n - 3]) / (2.0 * h);
    for i in 1..n - 1 {
        out[i] = (x[i + 1] - x[i - 1]) / (2.0 * h);
    }
    false
}

fn apply(grid: &CharGrid, f: &[f64], op: Op, warn: &mut bool) -> Vec<f64> {
    let (na, nb, h) = (grid.n_a, grid.n_b, grid.delta);
    let mut out = vec![0.0; f.len()];
    match op {
        Op::Da => {
            for n in 0..nb {
                *warn |= diff_line(&f[n * na..(n + 1) * na], h, &mut out[n * na..(n + 1) * na]);
            }
        }
        Op::Db => {
            // slices run toward decreasing b, hence the sign; x_I∂_{x_I} = 2∂_b
            let mut col = vec![0.0; nb];
            let mut d = vec![0.0; nb];
            for i in 0..na {
                for n in 0..nb {
                    col[n] = f[n * na + i];
                }
                *warn |= diff_line(&col, h, &mut d);
                for n in 0..nb {
                    out[n * na + i] = -2.0 * d[n];
                }
            }
        }
        Op::Mode => {
            let s = grid.lambda.sqrt();
            out.iter_mut().zip(f).for_each(|(o, x)| *o = s * x);
        }
        Op::ModeEb => {
            for n in 0..nb {
                let s = (grid.lambda * grid.rho_i(n)).sqrt();
                for i in 0..na {
                    out[n * na + i] = s * f[n * na + i];
                }
            }
        }
    }
    out
}

/// Trapezoidal `∫∫ w² |f|² da db` with `w = ρ₀^{−α₀} x_I^{−α₁}`.
fn weighted_l2_sq(grid: &CharGrid, f: &[f64], alpha0: f64, alpha1: f64) -> f64 {
    let (na, nb, h) = (grid.n_a, grid.n_b, grid.delta);
    let wt = |k: usize, len: usize| if k == 0 || k + 1 == len { 0.5 } else { 1.0 };
    let mut s = 0.0;
    for n in 0..nb {
        let wb = wt(n, nb) * (-alpha1 * grid.b(n)).exp();
        for i in 0..na {
            let w = wb * wt(i, na) * (-2.0 * alpha0 * grid.a(i)).exp();
            s += w * f[n * na + i].powi(2);
        }
    }
    s * h * h
}

fn words(ops: &[Op], len: usize) -> Vec<Vec<Op>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out.into_iter().flat_map(|w| ops.iter().map(move |o| [w.clone(), vec![*o]].concat())).collect();
    }
    out
}

/// Norm of a scalar grid function (slice-major) in the space described by `spec`.
pub fn weighted_norm(grid: &CharGrid, field: &[f64], spec: NormSpec) -> Result<NormValue> {
    if field.len() != grid.nodes() {
        return Err(Error::Dimension(format!("{} values for {} nodes", field.len(), grid.nodes())));
    }
    if spec.eb_order > 1 {
        return Err(Error::Param("only one eb layer is supported".into()));
    }
    if field.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("field passed to weighted_norm".into()));
    }
    let mut b_ops = vec![Op::Da, Op::Db];
    let mut eb_ops = vec![Op::Da, Op::Db];
    if grid.lambda > 0.0 {
        b_ops.push(Op::Mode);
        eb_ops.push(Op::ModeEb);
    }
    let mut warn = false;
    let mut total = 0.0;
    let mut b_derivs: Vec<Vec<f64>> = Vec::new();
    for j in 0..=spec.k {
        for w in words(&b_ops, j) {
            let g = w.iter().fold(field.to_vec(), |acc, &op| apply(grid, &acc, op, &mut warn));
            b_derivs.push(g);
        }
    }
    for g in &b_derivs {
        total += weighted_l2_sq(grid, g, spec.alpha0, spec.alpha1);
        if spec.eb_order == 1 {
            for &op in &eb_ops {
                total += weighted_l2_sq(grid, &apply(grid, g, op, &mut warn), spec.alpha0, spec.alpha1);
            }
        }
    }
    Ok(NormValue { value: total.sqrt(), order_warning: warn })
}

/// Sample a function of `(ρ₀, ρ_I)` on the lattice.
pub fn sample(grid: &CharGrid, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    (0..grid.n_b).flat_map(|n| (0..grid.n_a).map(move |i| (i, n))).map(|(i, n)| f(grid.rho0(i), grid.rho_i(n))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(b_min: f64, delta: f64) -> CharGrid {
        let n_b = ((-0.5 - b_min) / delta).round() as usize + 1;
        CharGrid::with_columns(-3.0, 101, (b_min, -0.5), n_b, 0.0, 0.2).unwrap()
    }

    #[test]
    fn separable_power_matches_closed_form() {
        let g = grid(-40.0, 0.02);
        let f = sample(&g, |r0, ri| r0.powf(0.3) * ri.powf(0.7));
        let v = weighted_norm(&g, &f, NormSpec::b(0.0, 0.0, 0)).unwrap().value;
        let ia = ((0.6 * g.a_max()).exp() - (0.6 * g.a_min).exp()) / 0.6;
        let ib = ((1.4 * g.b_max).exp() - (1.4 * g.b_min()).exp()) / 1.4;
        let exact = (ia * ib).sqrt();
        assert!(((v - exact) / exact).abs() < 5e-3, "{v} vs {exact}");
    }

    #[test]
    fn weight_threshold() {
        let spec_ok = NormSpec::b(0.0, 2.0 * 0.4, 0);
        let spec_bad = NormSpec::b(0.0, 2.0 * 0.6, 0);
        let mut ok = Vec::new();
        let mut bad = Vec::new();
        for b_min in [-40.0, -80.0, -160.0] {
            let g = CharGrid::with_columns(-3.0, 11, (b_min, -0.5), ((-0.5 - b_min) / 0.1) as usize + 1, 0.0, 0.2).unwrap();
            let f = sample(&g, |_, ri| ri.sqrt());
            ok.push(weighted_norm(&g, &f, spec_ok).unwrap().value);
            bad.push(weighted_norm(&g, &f, spec_bad).unwrap().value);
        }
        assert!((ok[2] - ok[0]).abs() / ok[0] < 1e-2);
        assert!(bad[1] > 10.0 * bad[0] && bad[2] > 10.0 * bad[1]);
    }

    #[test]
    fn constant_has_no_derivative_part() {
        let g = grid(-40.0, 0.1);
        let f = vec![3.0; g.nodes()];
        let n0 = weighted_norm(&g, &f, NormSpec::b(0.0, 0.0, 0)).unwrap().value;
        let n1 = weighted_norm(&g, &f, NormSpec::b(0.0, 0.0, 1)).unwrap().value;
        assert!((n0 - n1).abs() < 1e-12 * n0);
    }
}

//! Second-order characteristic integration of the regular-singular transport system
//!
//! ```text
//! (∂_a − ∂_b) u = v,     (∂_b − A) v = B u + ½ ρ_I λ u − ½ f,
//! ```
//!
//! which is `L⁰ u = f` for `L⁰ = −2(∂_b − A)(∂_a − ∂_b) + ρ_I λ + 2B`. The scheme marches from
//! the slice `b = b_max` toward null infinity: `u` is advanced along the diagonal by the
//! trapezoidal rule, `v` along `∂_b` by the trapezoidal rule, and the coupled implicit step is
//! solved exactly per node.

use super::grid::CharGrid;
use crate::error::{Error, Result};
use nalgebra::{SMatrix, SVector};
use rayon::prelude::*;

/// A lattice node with its coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Node {
    pub i: usize,
    pub n: usize,
    pub rho0: f64,
    pub rho_i: f64,
}

/// Coefficients of the transport system at lattice nodes.
pub trait TransportCoefficients<const D: usize>: Sync {
    fn a(&self, node: Node) -> SMatrix<f64, D, D>;

    fn b(&self, _node: Node) -> SMatrix<f64, D, D> {
        SMatrix::zeros()
    }

    fn forcing(&self, _node: Node) -> SVector<f64, D> {
        SVector::zeros()
    }

    /// Whether `A` or `B` vary along a slice; if not, the implicit matrix is factored once per slice.
    fn varies_along_slice(&self) -> bool {
        true
    }
}

/// `A`, `B` constant over the lattice, no forcing.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantCoefficients<const D: usize> {
    pub a: SMatrix<f64, D, D>,
    pub b: SMatrix<f64, D, D>,
}

impl<const D: usize> ConstantCoefficients<D> {
    pub fn new(a: SMatrix<f64, D, D>) -> Self {
        ConstantCoefficients { a, b: SMatrix::zeros() }
    }
}

impl<const D: usize> TransportCoefficients<D> for ConstantCoefficients<D> {
    fn a(&self, _node: Node) -> SMatrix<f64, D, D> {
        self.a
    }

    fn b(&self, _node: Node) -> SMatrix<f64, D, D> {
        self.b
    }

    fn varies_along_slice(&self) -> bool {
        false
    }
}

/// Constant `A`, `B` plus a forcing sampled at nodes, stored slice-major.
pub struct ForcedCoefficients<'f, const D: usize> {
    pub base: ConstantCoefficients<D>,
    pub forcing: &'f [SVector<f64, D>],
    pub n_a: usize,
}

impl<const D: usize> TransportCoefficients<D> for ForcedCoefficients<'_, D> {
    fn a(&self, _node: Node) -> SMatrix<f64, D, D> {
        self.base.a
    }

    fn b(&self, _node: Node) -> SMatrix<f64, D, D> {
        self.base.b
    }

    fn forcing(&self, node: Node) -> SVector<f64, D> {
        self.forcing[node.n * self.n_a + node.i]
    }

    fn varies_along_slice(&self) -> bool {
        false
    }
}

/// `(u, v)` on the slice `b = b_max` (indexed by column) and on the edge `a = a_min` (indexed by slice).
#[derive(Clone, Debug, PartialEq)]
pub struct TransportData<const D: usize> {
    pub slice_u: Vec<SVector<f64, D>>,
    pub slice_v: Vec<SVector<f64, D>>,
    pub edge_u: Vec<SVector<f64, D>>,
    pub edge_v: Vec<SVector<f64, D>>,
}

type Pair<const D: usize> = (SVector<f64, D>, SVector<f64, D>);

impl<const D: usize> TransportData<D> {
    /// Sample data from a field `(a, b) ↦ (u, v)`.
    pub fn from_fn(grid: &CharGrid, field: impl Fn(f64, f64) -> Pair<D>) -> Self {
        let (slice_u, slice_v) = (0..grid.n_a).map(|i| field(grid.a(i), grid.b(0))).unzip();
        let (edge_u, edge_v) = (0..grid.n_b).map(|n| field(grid.a(0), grid.b(n))).unzip();
        TransportData { slice_u, slice_v, edge_u, edge_v }
    }

    pub fn zero(grid: &CharGrid) -> Self {
        Self::from_fn(grid, |_, _| (SVector::zeros(), SVector::zeros()))
    }

    fn check(&self, grid: &CharGrid) -> Result<()> {
        let ok = self.slice_u.len() == grid.n_a
            && self.slice_v.len() == grid.n_a
            && self.edge_u.len() == grid.n_b
            && self.edge_v.len() == grid.n_b;
        if !ok {
            return Err(Error::Dimension(format!(
                "data sizes ({}, {}, {}, {}) do not fit a {}x{} grid",
                self.slice_u.len(),
                self.slice_v.len(),
                self.edge_u.len(),
                self.edge_v.len(),
                grid.n_a,
                grid.n_b
            )));
        }
        let corner = (self.slice_u[0] - self.edge_u[0]).abs().max() + (self.slice_v[0] - self.edge_v[0]).abs().max();
        if corner > 1e-12 * (1.0 + self.slice_u[0].abs().max() + self.slice_v[0].abs().max()) {
            return Err(Error::Param(format!("corner data disagree by {corner:e}")));
        }
        Ok(())
    }
}

/// Full history of `u` and `v` on the lattice, slice-major.
#[derive(Clone, Debug)]
pub struct TransportSolution<const D: usize> {
    pub grid: CharGrid,
    pub u: Vec<SVector<f64, D>>,
    pub v: Vec<SVector<f64, D>>,
}

impl<const D: usize> TransportSolution<D> {
    pub fn u_at(&self, i: usize, n: usize) -> SVector<f64, D> {
        self.u[n * self.grid.n_a + i]
    }

    pub fn v_at(&self, i: usize, n: usize) -> SVector<f64, D> {
        self.v[n * self.grid.n_a + i]
    }

    /// Component `k` of `u` along column `i`, in slice order.
    pub fn u_column(&self, i: usize, k: usize) -> Vec<f64> {
        (0..self.grid.n_b).map(|n| self.u_at(i, n)[k]).collect()
    }

    /// Euclidean norm of the components `ks` of `u` along column `i`.
    pub fn block_column(&self, i: usize, ks: &[usize]) -> Vec<f64> {
        (0..self.grid.n_b).map(|n| ks.iter().map(|&k| self.u_at(i, n)[k].powi(2)).sum::<f64>().sqrt()).collect()
    }

    /// Sup over a slice of the Euclidean norm of components `ks`.
    pub fn block_sup(&self, n: usize, ks: &[usize]) -> f64 {
        (0..self.grid.n_a)
            .map(|i| ks.iter().map(|&k| self.u_at(i, n)[k].powi(2)).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// `Σ_i (|u|² + |v|²) Δ` over slice `n`.
    pub fn slice_energy(&self, n: usize) -> f64 {
        let na = self.grid.n_a;
        let (u, v) = (&self.u[n * na..(n + 1) * na], &self.v[n * na..(n + 1) * na]);
        u.iter().zip(v).map(|(a, b)| a.norm_squared() + b.norm_squared()).sum::<f64>() * self.grid.delta
    }

    /// Largest `|u|` over the whole history.
    pub fn sup_norm(&self) -> f64 {
        self.u.iter().map(|x| x.abs().max()).fold(0.0, f64::max)
    }

    /// Max over interior nodes of `|(∂_a − ∂_b)u − v|` using centered differences in `a` and `b`.
    pub fn consistency_defect(&self) -> f64 {
        let g = &self.grid;
        let mut worst = 0.0f64;
        for n in 1..g.n_b.saturating_sub(1) {
            for i in 1..g.n_a - 1 {
                let da = (self.u_at(i + 1, n) - self.u_at(i - 1, n)) / (2.0 * g.delta);
                let db = (self.u_at(i, n - 1) - self.u_at(i, n + 1)) / (2.0 * g.delta);
                worst = worst.max((da - db - self.v_at(i, n)).abs().max());
            }
        }
        worst
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    /// Update the nodes of a slice in parallel. Each node depends only on the previous slice,
    /// so the result is bitwise identical to the serial sweep.
    pub parallel: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { parallel: true }
    }
}

/// Integrate the transport system over the grid.
pub fn transport_solve<const D: usize>(
    grid: &CharGrid,
    coeffs: &dyn TransportCoefficients<D>,
    data: &TransportData<D>,
    opts: SolveOptions,
) -> Result<TransportSolution<D>> {
    data.check(grid)?;
    let (na, nb, h) = (grid.n_a, grid.n_b, grid.delta);
    let mut u = Vec::with_capacity(grid.nodes());
    let mut v = Vec::with_capacity(grid.nodes());
    u.extend_from_slice(&data.slice_u);
    v.extend_from_slice(&data.slice_v);
    let node = |i: usize, n: usize| Node { i, n, rho0: grid.rho0(i), rho_i: grid.rho_i(n) };
    let k_matrix = |nd: Node| coeffs.b(nd) + SMatrix::<f64, D, D>::identity() * (0.5 * nd.rho_i * grid.lambda);
    let g_rate = |nd: Node, uu: &SVector<f64, D>, vv: &SVector<f64, D>| {
        -coeffs.a(nd) * vv - k_matrix(nd) * uu + coeffs.forcing(nd) * 0.5
    };
    let implicit = |nd: Node| -> Result<SMatrix<f64, D, D>> {
        let m = SMatrix::<f64, D, D>::identity() + coeffs.a(nd) * (0.5 * h) + k_matrix(nd) * (0.25 * h * h);
        m.try_inverse().ok_or_else(|| Error::Degenerate(format!("implicit step singular at slice {}", nd.n)))
    };

    for n in 0..nb - 1 {
        let prev = n * na;
        let (u_old, v_old) = (&u[prev..prev + na], &v[prev..prev + na]);
        let shared = if coeffs.varies_along_slice() { None } else { Some(implicit(node(0, n + 1))?) };
        let step = |i: usize| -> Result<Pair<D>> {
            let new = node(i, n + 1);
            let u_prev = u_old[i - 1] + v_old[i - 1] * (0.5 * h);
            let rhs = v_old[i] + g_rate(node(i, n), &u_old[i], &v_old[i]) * (0.5 * h)
                + (-k_matrix(new) * u_prev + coeffs.forcing(new) * 0.5) * (0.5 * h);
            let minv = match &shared {
                Some(m) => *m,
                None => implicit(new)?,
            };
            let vn = minv * rhs;
            let un = u_prev + vn * (0.5 * h);
            if !(un.iter().all(|x| x.is_finite()) && vn.iter().all(|x| x.is_finite())) {
                return Err(Error::NonFinite(format!(
                    "transport node (i={i}, n={}), a={:.4}, b={:.4}",
                    n + 1,
                    grid.a(i),
                    grid.b(n + 1)
                )));
            }
            Ok((un, vn))
        };
        let row: Vec<Pair<D>> = if opts.parallel {
            (1..na).into_par_iter().map(step).collect::<Result<_>>()?
        } else {
            (1..na).map(step).collect::<Result<_>>()?
        };
        u.push(data.edge_u[n + 1]);
        v.push(data.edge_v[n + 1]);
        for (un, vn) in row {
            u.push(un);
            v.push(vn);
        }
    }
    Ok(TransportSolution { grid: grid.clone(), u, v })
}

/// Exact solution `u = e^{(b − b_ref)A} w(a)`, `v = e^{(b − b_ref)A} (w′(a) − A w(a))` of the
/// homogeneous system with constant `A` and `B = 0`, `λ = 0`. `w` returns `(w, w′)`.
pub fn homogeneous_solution<const D: usize>(
    a_mat: SMatrix<f64, D, D>,
    b_ref: f64,
    w: impl Fn(f64) -> Pair<D>,
) -> impl Fn(f64, f64) -> Pair<D> {
    move |a, b| {
        let e = expm(&(a_mat * (b - b_ref)));
        let (w0, w1) = w(a);
        (e * w0, e * (w1 - a_mat * w0))
    }
}

/// Matrix exponential by Taylor series on a scaled step followed by repeated squaring.
///
/// Only products and sums of `m` enter, so entries that vanish structurally in every power of
/// `m` (for instance rows of a permuted triangular matrix that do not couple) stay exactly
/// zero, and rapidly decaying components are not polluted by rounding in the slow ones.
pub fn expm<const D: usize>(m: &SMatrix<f64, D, D>) -> SMatrix<f64, D, D> {
    let norm = m.abs().row_sum().max();
    let squarings = if norm > 0.25 { (norm / 0.25).log2().ceil() as u32 } else { 0 };
    let x = m / 2f64.powi(squarings as i32);
    let mut term = SMatrix::<f64, D, D>::identity();
    let mut sum = term;
    for k in 1..=24 {
        term = term * x / k as f64;
        sum += term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// Slowest exponent reaching each component of `u` for generic data when `A` is triangular up
/// to a permutation: the minimum diagonal entry over all components that feed into it.
pub fn coupled_exponents<const D: usize>(a_mat: &SMatrix<f64, D, D>) -> [f64; D] {
    let mut reach = [[false; D]; D];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for _ in 0..D {
        for i in 0..D {
            for j in 0..D {
                if a_mat[(i, j)] != 0.0 {
                    for k in 0..D {
                        if reach[j][k] {
                            reach[i][k] = true;
                        }
                    }
                }
            }
        }
    }
    let mut out = [0.0; D];
    for i in 0..D {
        out[i] = (0..D).filter(|&k| reach[i][k]).map(|k| a_mat[(k, k)]).fold(f64::INFINITY, f64::min);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Matrix1, Vector1};

    fn grid(delta: f64) -> CharGrid {
        let b = (-36.0, -1.0);
        let n_b = ((b.1 - b.0) / delta).round() as usize + 1;
        let n_a = (3.2 / delta).round() as usize + 1;
        CharGrid::with_columns(-1.0, n_a, b, n_b, 0.0, 0.2).unwrap()
    }

    #[test]
    fn constant_data_stays_constant() {
        let g = grid(0.1);
        let c = ConstantCoefficients::new(Matrix1::zeros());
        let data = TransportData::from_fn(&g, |_, _| (Vector1::new(2.5), Vector1::zeros()));
        let s = transport_solve(&g, &c, &data, SolveOptions::default()).unwrap();
        assert!(s.u.iter().all(|x| (x[0] - 2.5).abs() < 1e-12));
    }

    #[test]
    fn scalar_eigen_solution_converges_at_second_order() {
        let a0 = 0.4;
        let am = Matrix1::new(a0);
        let mut errs = Vec::new();
        for delta in [0.2, 0.1, 0.05] {
            let g = grid(delta);
            let exact = homogeneous_solution(am, g.b_max, |a: f64| (Vector1::new(1.0 + 0.5 * a.sin()), Vector1::new(0.5 * a.cos())));
            let data = TransportData::from_fn(&g, &exact);
            let s = transport_solve(&g, &ConstantCoefficients::new(am), &data, SolveOptions::default()).unwrap();
            let mut e = 0.0f64;
            for n in 0..g.n_b {
                for i in 0..g.n_a {
                    let (ue, _) = exact(g.a(i), g.b(n));
                    e = e.max(((s.u_at(i, n) - ue)[0] / ue[0]).abs());
                }
            }
            errs.push(e);
        }
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}, errors {errs:?}");
        }
    }

    #[test]
    fn serial_and_parallel_agree_bitwise() {
        let g = grid(0.1);
        let am = Matrix1::new(0.3);
        let exact = homogeneous_solution(am, g.b_max, |a: f64| (Vector1::new(a.cos()), Vector1::new(-a.sin())));
        let data = TransportData::from_fn(&g, &exact);
        let c = ConstantCoefficients::new(am);
        let p = transport_solve(&g, &c, &data, SolveOptions { parallel: true }).unwrap();
        let s = transport_solve(&g, &c, &data, SolveOptions { parallel: false }).unwrap();
        assert!(p.u.iter().zip(&s.u).all(|(x, y)| x[0].to_bits() == y[0].to_bits()));
    }

    #[test]
    fn expm_matches_closed_form() {
        let mut m = SMatrix::<f64, 2, 2>::zeros();
        m[(0, 0)] = -3.0;
        m[(1, 0)] = 2.0;
        m[(1, 1)] = -1.0;
        let e = expm(&m);
        let x = |t: f64| t.exp();
        assert!((e[(0, 0)] - x(-3.0)).abs() < 1e-15 && e[(0, 1)] == 0.0);
        assert!((e[(1, 0)] - (x(-1.0) - x(-3.0))).abs() < 1e-15);
        let deep = expm(&(m * 40.0));
        assert!(((deep[(0, 0)] - x(-120.0)) / x(-120.0)).abs() < 1e-12);
    }

    #[test]
    fn reachability_exponents() {
        let mut m = SMatrix::<f64, 3, 3>::zeros();
        m[(0, 0)] = 1.0;
        m[(1, 0)] = 0.3;
        m[(1, 1)] = 0.25;
        m[(2, 2)] = 0.0;
        assert_eq!(coupled_exponents(&m), [1.0, 0.25, 0.0]);
    }
}

//! Block splitting of symmetric 2-tensors in the rescaled frame and the closed-form
//! endomorphisms that govern decay at null infinity.
//!
//! Amplitudes are stored in a fixed order of ten components:
//! `00, 01, 0θ̂, 0φ̂, 11, 1θ̂, 1φ̂, tr, tf_p, tf_q`. The seven blocks are
//! `00, 01, 0ā, 11, 1ā, tr, tf`; mixed blocks use the orthonormal sphere coframe
//! `r dθ, r sinθ dφ`, the trace block is the coefficient of `r² g̸`, and the
//! tracefree block uses the orthonormal basis `(θ̂θ̂ − φ̂φ̂)/√2`, `√2 θ̂φ̂`.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, SMatrix, SVector};
use serde::Serialize;

pub const NAMP: usize = 10;
pub const NBLOCK: usize = 7;

pub type Amp = SVector<f64, NAMP>;
pub type Mat10 = SMatrix<f64, NAMP, NAMP>;
pub type Mat7 = SMatrix<f64, NBLOCK, NBLOCK>;

pub const AMP_NAMES: [&str; NAMP] =
    ["00", "01", "0th", "0ph", "11", "1th", "1ph", "tr", "tf_p", "tf_q"];
pub const BLOCK_NAMES: [&str; NBLOCK] = ["00", "01", "0a", "11", "1a", "tr", "tf"];

/// Amplitude indices belonging to each block.
pub const BLOCK_AMPS: [&[usize]; NBLOCK] = [&[0], &[1], &[2, 3], &[4], &[5, 6], &[7], &[8, 9]];

/// Block of each amplitude.
pub const AMP_BLOCK: [usize; NAMP] = [0, 1, 2, 2, 3, 4, 4, 5, 6, 6];

/// Amplitude order of the `π^{CΥ}` range used for the lower-triangular presentation.
pub const CU_ORDER: [usize; 7] = [0, 2, 3, 7, 1, 5, 6];
/// Block order of the `π^{CΥ}` range: `00, 0ā, tr, 01, 1ā`.
pub const CU_BLOCK_ORDER: [usize; 5] = [0, 2, 5, 1, 4];

/// Symmetric 2-tensor in the ten-amplitude splitting.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SplitSymTensor {
    pub amp: [f64; NAMP],
}

impl SplitSymTensor {
    pub const ZERO: SplitSymTensor = SplitSymTensor { amp: [0.0; NAMP] };

    pub fn new(amp: [f64; NAMP]) -> Self {
        SplitSymTensor { amp }
    }

    pub fn unit(k: usize) -> Self {
        let mut amp = [0.0; NAMP];
        amp[k] = 1.0;
        SplitSymTensor { amp }
    }

    pub fn to_vector(&self) -> Amp {
        Amp::from_column_slice(&self.amp)
    }

    pub fn from_vector(v: &Amp) -> Self {
        let mut amp = [0.0; NAMP];
        amp.copy_from_slice(v.as_slice());
        SplitSymTensor { amp }
    }

    pub fn block(&self, b: usize) -> Vec<f64> {
        BLOCK_AMPS[b].iter().map(|&i| self.amp[i]).collect()
    }

    /// Components in the frame `(dx0, dx1, r dθ, r sinθ dφ)`.
    pub fn to_frame(&self) -> [[f64; 4]; 4] {
        let a = &self.amp;
        let s2 = std::f64::consts::SQRT_2;
        let mut t = [[0.0; 4]; 4];
        t[0][0] = a[0];
        t[0][1] = a[1];
        t[0][2] = a[2];
        t[0][3] = a[3];
        t[1][1] = a[4];
        t[1][2] = a[5];
        t[1][3] = a[6];
        t[2][2] = a[7] + a[8] / s2;
        t[3][3] = a[7] - a[8] / s2;
        t[2][3] = a[9] / s2;
        for i in 0..4 {
            for k in 0..i {
                t[i][k] = t[k][i];
            }
        }
        t
    }

    /// Inverse of [`Self::to_frame`] (the input is symmetrised).
    pub fn from_frame(t: &[[f64; 4]; 4]) -> Self {
        let s2 = std::f64::consts::SQRT_2;
        let sym = |i: usize, k: usize| 0.5 * (t[i][k] + t[k][i]);
        SplitSymTensor {
            amp: [
                t[0][0],
                sym(0, 1),
                sym(0, 2),
                sym(0, 3),
                t[1][1],
                sym(1, 2),
                sym(1, 3),
                0.5 * (t[2][2] + t[3][3]),
                (t[2][2] - t[3][3]) / s2,
                s2 * sym(2, 3),
            ],
        }
    }
}

/// Constraint damping and gauge change strengths; both use the covector `r⁻¹ dt`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModPair {
    pub gamma_c: f64,
    pub gamma_u: f64,
}

impl ModPair {
    /// Admissible pair: `γ^C ∈ (0,1)`, `γ^Υ ∈ (−1,0)`, `−γ^Υ < γ^C`.
    pub fn new(gamma_c: f64, gamma_u: f64) -> Result<Self> {
        if !(gamma_c > 0.0 && gamma_c < 1.0) {
            return Err(Error::Param(format!("gammaC = {gamma_c} must lie in (0, 1)")));
        }
        if !(gamma_u > -1.0 && gamma_u < 0.0) {
            return Err(Error::Param(format!("gammaU = {gamma_u} must lie in (-1, 0)")));
        }
        if !(-gamma_u < gamma_c) {
            return Err(Error::Param(format!("need -gammaU < gammaC, got {gamma_u}, {gamma_c}")));
        }
        Ok(ModPair { gamma_c, gamma_u })
    }

    /// A pair without admissibility checks, for switching individual terms off.
    pub fn unchecked(gamma_c: f64, gamma_u: f64) -> Self {
        ModPair { gamma_c, gamma_u }
    }

    /// Exchange the roles of damping and gauge change.
    pub fn swapped(self) -> Self {
        ModPair { gamma_c: self.gamma_u, gamma_u: self.gamma_c }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Projection {
    C,
    Upsilon,
    CUpsilon,
    Slashed0,
    OneOne,
}

impl Projection {
    pub fn blocks(self) -> &'static [usize] {
        match self {
            Projection::C => &[0, 2, 5],
            Projection::Upsilon => &[1, 4],
            Projection::CUpsilon => &[0, 1, 2, 4, 5],
            Projection::Slashed0 => &[6],
            Projection::OneOne => &[3],
        }
    }

    pub fn amps(self) -> Vec<usize> {
        self.blocks().iter().flat_map(|&b| BLOCK_AMPS[b].iter().copied()).collect()
    }

    pub fn matrix(self) -> Mat10 {
        let mut m = Mat10::zeros();
        for i in self.amps() {
            m[(i, i)] = 1.0;
        }
        m
    }
}

pub fn project(which: Projection, u: &SplitSymTensor) -> SplitSymTensor {
    let mut out = SplitSymTensor::ZERO;
    for i in which.amps() {
        out.amp[i] = u.amp[i];
    }
    out
}

/// `G_g u = u − ½ g tr_g u`, with `g` given in the frame `(dx0, dx1, r dθ, r sinθ dφ)`.
pub fn trace_reversal(g: &[[f64; 4]; 4], u: &SplitSymTensor) -> Result<SplitSymTensor> {
    let ginv = crate::chart::dual_metric(g)?;
    let t = u.to_frame();
    let mut tr = 0.0;
    for i in 0..4 {
        for k in 0..4 {
            tr += ginv[i][k] * t[i][k];
        }
    }
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            out[i][k] = t[i][k] - 0.5 * g[i][k] * tr;
        }
    }
    Ok(SplitSymTensor::from_frame(&out))
}

/// Minkowski metric `−dx0 dx1 + r² g̸` in the orthonormal-sphere frame.
pub fn minkowski_frame_metric() -> [[f64; 4]; 4] {
    let mut g = [[0.0; 4]; 4];
    g[0][1] = -0.5;
    g[1][0] = -0.5;
    g[2][2] = 1.0;
    g[3][3] = 1.0;
    g
}

/// Trace reversal at Minkowski as a block matrix.
pub fn trace_reversal_matrix() -> Mat7 {
    let mut g = Mat7::identity();
    g[(1, 1)] = 0.0;
    g[(5, 5)] = 0.0;
    g[(1, 5)] = 0.5;
    g[(5, 1)] = 2.0;
    g
}

/// Fiber pairing of the blocks induced by the Minkowski metric (tracefree amplitudes orthonormal).
pub fn minkowski_pairing() -> Mat7 {
    let mut m = Mat7::zeros();
    m[(0, 3)] = 4.0;
    m[(3, 0)] = 4.0;
    m[(1, 1)] = 8.0;
    m[(2, 4)] = -4.0;
    m[(4, 2)] = -4.0;
    m[(5, 5)] = 2.0;
    m[(6, 6)] = 1.0;
    m
}

/// The endomorphism `A_{E^C,E^Υ}` on the seven blocks (Minkowski background).
pub fn a_blocks(pair: ModPair) -> Mat7 {
    let (c, u) = (pair.gamma_c, pair.gamma_u);
    #[rustfmt::skip]
    let rows = [
        2.0 * c, 0.0,       0.0,   0.0,       0.0, 0.0, 0.0,
        -u,      -u,        0.0,   0.0,       0.0, 0.0, 0.0,
        0.0,     0.0,       c,     0.0,       0.0, 0.0, 0.0,
        0.0,     -2.0 * u,  0.0,   -2.0 * u,  0.0, c,   0.0,
        0.0,     0.0,       c - u, 0.0,       -u,  0.0, 0.0,
        2.0 * c, 0.0,       0.0,   0.0,       0.0, c,   0.0,
        0.0,     0.0,       0.0,   0.0,       0.0, 0.0, 0.0,
    ];
    Mat7::from_row_slice(&rows)
}

/// Expand a block matrix whose spherical sub-blocks are scalar multiples of the identity.
pub fn expand_blocks(m: &Mat7) -> Mat10 {
    let mut out = Mat10::zeros();
    for bi in 0..NBLOCK {
        for bk in 0..NBLOCK {
            let v = m[(bi, bk)];
            if v == 0.0 {
                continue;
            }
            let (ri, ck) = (BLOCK_AMPS[bi], BLOCK_AMPS[bk]);
            if ri.len() == ck.len() {
                for (&i, &k) in ri.iter().zip(ck) {
                    out[(i, k)] = v;
                }
            } else {
                // only the scalar-to-scalar and equal-size couplings occur in the closed forms
                debug_assert!(false, "incompatible block sizes {bi},{bk}");
            }
        }
    }
    out
}

/// `A_{g,E^C,E^Υ}` with the couplings generated by `∂₁h` (amplitudes of `∂₁h` in `dh1`).
pub fn a_matrix(pair: ModPair, dh1: &[f64; NAMP]) -> Mat10 {
    let mut a = expand_blocks(&a_blocks(pair));
    a[(4, 8)] = -0.5 * dh1[8];
    a[(4, 9)] = -0.5 * dh1[9];
    a[(8, 0)] = 2.0 * dh1[8];
    a[(9, 0)] = 2.0 * dh1[9];
    a
}

/// `B_g` from the amplitudes of `∂₁²h` at a point with given `rho0`.
pub fn b_matrix(rho0: f64, ddh1: &[f64; NAMP]) -> Mat10 {
    let mut b = Mat10::zeros();
    b[(4, 0)] = 2.0 / rho0 * ddh1[4];
    b[(8, 0)] = 2.0 / rho0 * ddh1[8];
    b[(9, 0)] = 2.0 / rho0 * ddh1[9];
    b
}

/// `A_g` for a perturbation profile at a point.
pub fn build_a(
    pair: ModPair,
    h: Option<&dyn crate::gr_ops::profile::PerturbationProfile>,
    p: &crate::chart::CompactPoint,
) -> Result<Mat10> {
    let dh1 = match h {
        Some(h) => {
            let jets = crate::gr_ops::profile::evaluate(h, p)?;
            let mut d = [0.0; NAMP];
            for (k, j) in jets.iter().enumerate() {
                d[k] = j.d[1];
            }
            d
        }
        None => [0.0; NAMP],
    };
    Ok(a_matrix(pair, &dh1))
}

/// `B_g` for a perturbation profile at a point.
pub fn build_b(
    h: Option<&dyn crate::gr_ops::profile::PerturbationProfile>,
    p: &crate::chart::CompactPoint,
) -> Result<Mat10> {
    let Some(h) = h else { return Ok(Mat10::zeros()) };
    let jets = crate::gr_ops::profile::evaluate(h, p)?;
    let mut dd = [0.0; NAMP];
    for (k, j) in jets.iter().enumerate() {
        dd[k] = j.h[1][1];
    }
    Ok(b_matrix(p.rho0, &dd))
}

/// Restriction of a block matrix to a set of block indices (in the given order).
pub fn sub_blocks(m: &Mat7, blocks: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(blocks.len(), blocks.len(), |i, k| m[(blocks[i], blocks[k])])
}

/// Eigenvalue of a real matrix; complex pairs keep their imaginary part.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

/// Eigenvalues in the order the Schur form produces them.
pub fn spectrum(m: &DMatrix<f64>) -> Vec<Eigenvalue> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    if is_lower_triangular(m) || is_lower_triangular(&m.transpose()) {
        return (0..m.nrows()).map(|i| Eigenvalue { re: m[(i, i)], im: 0.0 }).collect();
    }
    m.clone()
        .complex_eigenvalues()
        .iter()
        .map(|z| Eigenvalue { re: z.re, im: z.im })
        .collect()
}

/// Eigenvalues from the general eigensolver, bypassing the triangular shortcut.
pub fn spectrum_eigensolver(m: &DMatrix<f64>) -> Vec<Eigenvalue> {
    m.clone()
        .complex_eigenvalues()
        .iter()
        .map(|z| Eigenvalue { re: z.re, im: z.im })
        .collect()
}

fn is_lower_triangular(m: &DMatrix<f64>) -> bool {
    (0..m.nrows()).all(|i| (i + 1..m.ncols()).all(|k| m[(i, k)] == 0.0))
}

/// Real parts of a spectrum, sorted descending.
pub fn sorted_real(eigs: &[Eigenvalue]) -> Vec<f64> {
    let mut v: Vec<f64> = eigs.iter().map(|e| e.re).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// The `π^C` and complement sub-blocks of `A` with their spectra.
#[derive(Clone, Debug, Serialize)]
pub struct BlockSpectra {
    pub c_block: Vec<f64>,
    pub complement: Vec<f64>,
    pub cu_block: Vec<f64>,
}

pub fn block_spectra(pair: ModPair) -> BlockSpectra {
    let a = a_blocks(pair);
    let re = |v: Vec<Eigenvalue>| v.into_iter().map(|e| e.re).collect::<Vec<_>>();
    BlockSpectra {
        c_block: re(spectrum(&sub_blocks(&a, Projection::C.blocks()))),
        complement: re(spectrum(&sub_blocks(&a, &[1, 3, 4, 6]))),
        cu_block: re(spectrum(&sub_blocks(&a, &CU_BLOCK_ORDER))),
    }
}

/// Adjoint with respect to the Minkowski pairing of the blocks.
pub fn minkowski_adjoint(a: &Mat7) -> Mat7 {
    let m = minkowski_pairing();
    let minv = m.try_inverse().expect("pairing is nondegenerate");
    minv * a.transpose() * m
}

/// Max-abs entry of `G A*_{E^C,E^Υ} G + A_{E^Υ,E^C}`.
pub fn duality_check(pair: ModPair) -> f64 {
    let g = trace_reversal_matrix();
    let lhs = g * minkowski_adjoint(&a_blocks(pair)) * g + a_blocks(pair.swapped());
    lhs.abs().max()
}

/// Both sides of `[L, X₁⋯X_N] = Σ_q (−1)^{q−1} Σ_{i₁<…<i_q} ad-terms · remaining product`.
pub fn comm_expand(l: &DMatrix<f64>, xs: &[DMatrix<f64>]) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = l.nrows();
    if l.ncols() != n || xs.iter().any(|x| x.nrows() != n || x.ncols() != n) {
        return Err(Error::Dimension("all matrices must be square of one size".into()));
    }
    if xs.is_empty() || xs.len() > 6 {
        return Err(Error::Dimension(format!("need 1..=6 factors, got {}", xs.len())));
    }
    let comm = |a: &DMatrix<f64>, b: &DMatrix<f64>| a * b - b * a;
    let id = DMatrix::<f64>::identity(n, n);
    let product = xs.iter().fold(id.clone(), |acc, x| acc * x);
    let lhs = comm(l, &product);

    let nx = xs.len();
    let mut rhs = DMatrix::<f64>::zeros(n, n);
    for mask in 1u32..(1 << nx) {
        let chosen: Vec<usize> = (0..nx).filter(|i| mask & (1 << i) != 0).collect();
        let mut nested = l.clone();
        for &i in chosen.iter().rev() {
            nested = comm(&nested, &xs[i]);
        }
        let rest = (0..nx)
            .filter(|i| mask & (1 << i) == 0)
            .fold(id.clone(), |acc, j| acc * &xs[j]);
        let sign = if chosen.len() % 2 == 1 { 1.0 } else { -1.0 };
        rhs += sign * nested * rest;
    }
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_round_trip() {
        let u = SplitSymTensor::new([1.0, -2.0, 0.5, 0.25, 3.0, -1.0, 0.7, 0.3, -0.2, 0.9]);
        let back = SplitSymTensor::from_frame(&u.to_frame());
        for k in 0..NAMP {
            assert!((back.amp[k] - u.amp[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn minkowski_trace_reversal_matches_block_matrix() {
        let g = minkowski_frame_metric();
        let gm = expand_blocks(&trace_reversal_matrix());
        for k in 0..NAMP {
            let e = SplitSymTensor::unit(k);
            let col = trace_reversal(&g, &e).unwrap().to_vector();
            let expect = gm.column(k);
            assert!((col - expect).abs().max() < 1e-15, "column {k}");
        }
    }

    #[test]
    fn closed_form_spectra() {
        let s = block_spectra(ModPair::new(0.5, -0.25).unwrap());
        assert_eq!(s.c_block, vec![1.0, 0.5, 0.5]);
        assert_eq!(s.complement, vec![0.25, 0.5, 0.25, 0.0]);
        assert_eq!(s.cu_block, vec![1.0, 0.5, 0.5, 0.25, 0.25]);
    }

    #[test]
    fn admissibility() {
        assert!(ModPair::new(0.5, -0.25).is_ok());
        assert!(ModPair::new(0.2, -0.25).is_err());
        assert!(ModPair::new(1.2, -0.25).is_err());
        assert!(ModPair::new(0.5, 0.1).is_err());
    }
}

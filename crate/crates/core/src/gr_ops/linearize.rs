//! Finite-difference linearization of the gauge-fixed operator and extraction of
//! the endomorphisms `A` and `B` of its leading transport part.

use super::gauge::nonlinear_p;
use super::profile::{PerturbationProfile, Shifted, UnitDirection};
use crate::chart::CompactPoint;
use crate::error::{Error, Result};
use crate::tensors::{Mat10, ModPair, SplitSymTensor, NAMP};
use serde::Serialize;

/// Amplitudes of the central-difference sweep.
pub const EPS_SWEEP: [f64; 3] = [1e-3, 5e-4, 2.5e-4];
/// Maximal difference of successive Richardson estimates.
pub const RICHARDSON_TOL: f64 = 1e-6;

/// `L(u) = 2ρ_Iρ⁻³ P'(ρu)` at `g = g_m + r⁻¹h`, by central differences in the amplitude.
pub fn linearize_p(
    p: &CompactPoint,
    m: f64,
    h: Option<&dyn PerturbationProfile>,
    pair: ModPair,
    direction: &dyn PerturbationProfile,
) -> Result<SplitSymTensor> {
    let scale = 2.0 * p.rho_i() * p.r.powi(3);
    let central = |eps: f64| -> Result<[f64; NAMP]> {
        let plus = nonlinear_p(p, m, Some(&Shifted { base: h, direction, s: eps }), pair)?;
        let minus = nonlinear_p(p, m, Some(&Shifted { base: h, direction, s: -eps }), pair)?;
        let mut d = [0.0; NAMP];
        for k in 0..NAMP {
            d[k] = scale * (plus.amp[k] - minus.amp[k]) / (2.0 * eps);
        }
        Ok(d)
    };
    let d: Vec<[f64; NAMP]> = EPS_SWEEP.iter().map(|&e| central(e)).collect::<Result<_>>()?;
    let rich = |a: &[f64; NAMP], b: &[f64; NAMP]| {
        let mut out = [0.0; NAMP];
        for k in 0..NAMP {
            out[k] = (4.0 * b[k] - a[k]) / 3.0;
        }
        out
    };
    let r1 = rich(&d[0], &d[1]);
    let r2 = rich(&d[1], &d[2]);
    let mag = r2.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let gap = (0..NAMP).map(|k| (r1[k] - r2[k]).abs()).fold(0.0, f64::max);
    if gap > RICHARDSON_TOL * mag {
        return Err(Error::Extrapolation(format!(
            "amplitude sweep inconsistent: successive estimates differ by {gap:.3e}"
        )));
    }
    Ok(SplitSymTensor::new(r2))
}

/// Extracted endomorphisms at one point.
#[derive(Clone, Debug, Serialize)]
pub struct Extraction {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
}

fn to_rows(m: &Mat10) -> Vec<Vec<f64>> {
    (0..NAMP).map(|i| (0..NAMP).map(|k| m[(i, k)]).collect()).collect()
}

/// Columns `A e_k = (L(ρ0 e_k) − ρ0 L(e_k)) / (2ρ0)` and `B e_k = L(e_k)/2` at one point.
pub fn extract_ab_raw(
    p: &CompactPoint,
    m: f64,
    h: Option<&dyn PerturbationProfile>,
    pair: ModPair,
) -> Result<(Mat10, Mat10)> {
    let mut a = Mat10::zeros();
    let mut b = Mat10::zeros();
    for k in 0..NAMP {
        let flat = linearize_p(p, m, h, pair, &UnitDirection { amp: k, rho0_pow: 0.0 })?;
        let tilted = linearize_p(p, m, h, pair, &UnitDirection { amp: k, rho0_pow: 1.0 })?;
        for i in 0..NAMP {
            a[(i, k)] = (tilted.amp[i] - p.rho0 * flat.amp[i]) / (2.0 * p.rho0);
            b[(i, k)] = 0.5 * flat.amp[i];
        }
    }
    Ok((a, b))
}

/// `A`, `B` extracted at `ρ_I` and extrapolated to `ρ_I → 0` from `ρ_I, ρ_I/2, ρ_I/4`,
/// cancelling the error terms of orders `ρ_I` and `ρ_I²`.
pub fn extract_ab(
    rho0: f64,
    rho_i: f64,
    m: f64,
    h: Option<&dyn PerturbationProfile>,
    pair: ModPair,
) -> Result<(Mat10, Mat10)> {
    let at = |ri: f64| -> Result<(Mat10, Mat10)> {
        let p = CompactPoint::from_rho(rho0, ri, m)?;
        extract_ab_raw(&p, m, h, pair)
    };
    let (a1, b1) = at(rho_i)?;
    let (a2, b2) = at(rho_i / 2.0)?;
    let (a4, b4) = at(rho_i / 4.0)?;
    let ex = |f1: Mat10, f2: Mat10, f4: Mat10| (f4 * 8.0 - f2 * 6.0 + f1) / 3.0;
    Ok((ex(a1, a2, a4), ex(b1, b2, b4)))
}

pub fn extraction_report(a: &Mat10, b: &Mat10) -> Extraction {
    Extraction { a: to_rows(a), b: to_rows(b) }
}

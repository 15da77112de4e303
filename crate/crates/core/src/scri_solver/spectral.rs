//! Spectral differentiation on periodic grids and the Gagliardo–Nirenberg type interpolation
//! inequality `‖D^b u‖ ≤ C ‖D^a u‖^{(c−b)/(c−a)} ‖D^c u‖^{(b−a)/(c−a)}`.

use crate::error::{Error, Result};
use rand::Rng;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// `d^order u / dx^order` for samples of a function with the given period.
pub fn spectral_derivative(u: &[f64], order: u32, period: f64) -> Result<Vec<f64>> {
    let n = u.len();
    if n < 2 {
        return Err(Error::Dimension("need at least two samples".into()));
    }
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut buf: Vec<Complex<f64>> = u.iter().map(|x| Complex::new(*x, 0.0)).collect();
    fwd.process(&mut buf);
    let scale = 2.0 * PI / period;
    for (k, c) in buf.iter_mut().enumerate() {
        let kk = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
        if n.is_multiple_of(2) && k == n / 2 && !order.is_multiple_of(2) {
            *c = Complex::new(0.0, 0.0);
            continue;
        }
        *c *= Complex::new(0.0, kk * scale).powu(order);
    }
    inv.process(&mut buf);
    Ok(buf.iter().map(|c| c.re / n as f64).collect())
}

/// Discrete `L²` norm with the uniform quadrature of the periodic grid.
pub fn l2(u: &[f64], period: f64) -> f64 {
    (u.iter().map(|x| x * x).sum::<f64>() * period / u.len() as f64).sqrt()
}

/// Smallest `C` for which the inequality holds for `u` with integer orders `a < b < c`.
pub fn interpolation_constant(u: &[f64], a: u32, b: u32, c: u32, period: f64) -> Result<f64> {
    if !(a < b && b < c) {
        return Err(Error::Param(format!("need a < b < c, got {a}, {b}, {c}")));
    }
    let norm = |k: u32| -> Result<f64> { Ok(l2(&spectral_derivative(u, k, period)?, period)) };
    let (na, nb, nc) = (norm(a)?, norm(b)?, norm(c)?);
    if na == 0.0 || nc == 0.0 {
        return Err(Error::Domain("function is annihilated by one of the derivatives".into()));
    }
    let theta = (c - b) as f64 / (c - a) as f64;
    Ok(nb / (na.powf(theta) * nc.powf(1.0 - theta)))
}

/// `cos(kx + φ)` sampled on `n` points of `[0, 2π)`.
pub fn fourier_mode(n: usize, k: i64, phase: f64) -> Vec<f64> {
    (0..n).map(|j| (k as f64 * 2.0 * PI * j as f64 / n as f64 + phase).cos()).collect()
}

/// Random trigonometric polynomial with modes `1..=band` on `n` points of `[0, 2π)`.
pub fn band_limited(n: usize, band: usize, rng: &mut impl Rng) -> Vec<f64> {
    let coeffs: Vec<(f64, f64)> = (0..band).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    (0..n)
        .map(|j| {
            let x = 2.0 * PI * j as f64 / n as f64;
            coeffs.iter().enumerate().map(|(m, (p, q))| {
                let k = (m + 1) as f64;
                p * (k * x).cos() + q * (k * x).sin()
            }).sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn derivative_of_sine() {
        let n = 64;
        let u: Vec<f64> = (0..n).map(|j| (3.0 * 2.0 * PI * j as f64 / n as f64).sin()).collect();
        let d = spectral_derivative(&u, 1, 2.0 * PI).unwrap();
        for j in 0..n {
            let x = 2.0 * PI * j as f64 / n as f64;
            assert!((d[j] - 3.0 * (3.0 * x).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_modes_saturate() {
        for k in 1..10 {
            let u = fourier_mode(128, k, 0.3);
            let c = interpolation_constant(&u, 0, 1, 3, 2.0 * PI).unwrap();
            assert!((c - 1.0).abs() < 1e-9, "k={k}: {c}");
        }
    }

    #[test]
    fn random_band_limited_bounded() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let u = band_limited(128, 12, &mut rng);
            let c = interpolation_constant(&u, 0, 1, 2, 2.0 * PI).unwrap();
            assert!(c.is_finite() && c <= 1.0 + 1e-9);
        }
    }
}

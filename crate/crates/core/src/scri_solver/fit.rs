//! Power-law decay fits by least squares in log-log coordinates.

use crate::error::{Error, Result};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

pub const MIN_POINTS: usize = 10;
pub const MAX_RMS: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub window: (f64, f64),
    pub rms_residual: f64,
    /// Half-width of the 95% confidence interval of the exponent.
    pub half_width: f64,
    pub points: usize,
    pub sign_change: bool,
    /// Set when the rms residual exceeds [`MAX_RMS`].
    pub rejected: bool,
    /// Set for identically zero data, where the exponent is reported as `+∞`.
    pub vanishing: bool,
}

impl DecayFit {
    pub fn usable(&self) -> bool {
        !self.rejected && !self.vanishing && self.exponent.is_finite()
    }
}

/// Fit `|y| ≈ C x^p` over samples with `x` inside `window` (both ends inclusive).
pub fn decay_fit(x: &[f64], y: &[f64], window: (f64, f64)) -> Result<DecayFit> {
    if x.len() != y.len() {
        return Err(Error::Dimension(format!("{} abscissae for {} values", x.len(), y.len())));
    }
    let (lo, hi) = (window.0.min(window.1), window.0.max(window.1));
    let inside: Vec<(f64, f64)> =
        x.iter().zip(y).filter(|(xv, _)| **xv >= lo && **xv <= hi && **xv > 0.0).map(|(a, b)| (*a, *b)).collect();
    if inside.len() < MIN_POINTS {
        return Err(Error::Fit(format!(
            "{} samples in window [{lo:e}, {hi:e}], need at least {MIN_POINTS}",
            inside.len()
        )));
    }
    if inside.iter().any(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite("non-finite value inside the fit window".into()));
    }
    let mut sign_change = false;
    let mut last_sign = 0.0;
    for &(_, v) in &inside {
        if v == 0.0 {
            sign_change = true;
            continue;
        }
        let s = v.signum();
        if last_sign != 0.0 && s != last_sign {
            sign_change = true;
        }
        last_sign = s;
    }
    let pts: Vec<(f64, f64)> =
        inside.iter().filter(|(_, v)| *v != 0.0).map(|(a, b)| (a.ln(), b.abs().ln())).collect();
    if pts.is_empty() {
        return Ok(DecayFit {
            exponent: f64::INFINITY,
            prefactor: 0.0,
            window: (lo, hi),
            rms_residual: 0.0,
            half_width: 0.0,
            points: inside.len(),
            sign_change: false,
            rejected: false,
            vanishing: true,
        });
    }
    if pts.len() < MIN_POINTS {
        return Err(Error::Fit(format!("only {} nonzero samples in the window", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Fit("window collapses to a single abscissa".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let rms = (ssr / n).sqrt();
    let dof = n - 2.0;
    let se = (ssr / dof / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, dof)
        .map_err(|e| Error::Fit(format!("t distribution: {e}")))?
        .inverse_cdf(0.975);
    Ok(DecayFit {
        exponent: slope,
        prefactor: intercept.exp(),
        window: (lo, hi),
        rms_residual: rms,
        half_width: t * se,
        points: pts.len(),
        sign_change,
        rejected: rms > MAX_RMS,
        vanishing: false,
    })
}

/// Logarithmically spaced samples `lo ≤ x ≤ hi`.
pub fn log_samples(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_power_laws() {
        let x = log_samples(1e-6, 1e-2, 40);
        let y: Vec<f64> = x.iter().map(|v| v.powf(0.5)).collect();
        let f = decay_fit(&x, &y, (1e-6, 1e-2)).unwrap();
        assert!((f.exponent - 0.5).abs() < 1e-12 && f.usable());
        let y: Vec<f64> = x.iter().map(|v| v.powf(0.25) * (1.0 + 0.1 * v)).collect();
        let f = decay_fit(&x, &y, (1e-6, 1e-2)).unwrap();
        assert!((f.exponent - 0.25).abs() < 0.02);
    }

    #[test]
    fn degenerate_inputs() {
        let x = log_samples(1e-4, 1e-2, 20);
        let zero = vec![0.0; 20];
        assert!(decay_fit(&x, &zero, (1e-4, 1e-2)).unwrap().vanishing);
        assert!(decay_fit(&x[..5], &zero[..5], (1e-4, 1e-2)).is_err());
        let alt: Vec<f64> = x.iter().enumerate().map(|(i, v)| if i % 2 == 0 { *v } else { -v }).collect();
        assert!(decay_fit(&x, &alt, (1e-4, 1e-2)).unwrap().sign_change);
    }
}

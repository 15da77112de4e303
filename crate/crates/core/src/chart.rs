//! Compactified exterior coordinates near spacelike and null infinity.
//!
//! Points are labelled by `rho0 = 1/(r_* - t)` and `x_i = sqrt(rho_i)`, where
//! `rho_i = (r_* - t)/r`, so that `rho0 * rho_i = 1/r`. Tensor components are
//! expressed in the rescaled frame `dx0, dx1, r dtheta, r dphi`: every
//! spherical lower index carries a factor `1/r`.

use crate::error::{Error, Result};
use crate::gr_ops::profile::PerturbationProfile;
use serde::Serialize;

/// Upper bound of `x_i` on the chart.
pub fn chart_bound_xi(m: f64) -> f64 {
    let base = 1.5f64.sqrt();
    if m > 0.0 {
        base.min(1.0 / (8.0 * m).sqrt())
    } else {
        base
    }
}

/// Tortoise coordinate `r + 2m log(r - 2m)`.
pub fn tortoise(r: f64, m: f64) -> Result<f64> {
    if !(r > 2.0 * m) || !(r > 0.0) {
        return Err(Error::Domain(format!("radius {r} not outside r = max(2m, 0) for m = {m}")));
    }
    if m == 0.0 {
        return Ok(r);
    }
    Ok(r + 2.0 * m * (r - 2.0 * m).ln())
}

/// Inverse of [`tortoise`] by bracketed Newton iteration (relative tolerance 1e-13).
pub fn invert_tortoise(rstar: f64, m: f64) -> Result<f64> {
    if !rstar.is_finite() {
        return Err(Error::Domain(format!("tortoise value {rstar} is not finite")));
    }
    if m == 0.0 {
        if rstar <= 0.0 {
            return Err(Error::Domain(format!("r_* = {rstar} must be positive for m = 0")));
        }
        return Ok(rstar);
    }
    let floor = (2.0 * m).max(0.0);
    let resid = |r: f64| r + 2.0 * m * (r - 2.0 * m).ln() - rstar;
    let slope = |r: f64| r / (r - 2.0 * m);

    let mut lo = floor + f64::EPSILON * (1.0 + floor) * 16.0;
    if resid(lo) > 0.0 {
        return Err(Error::Domain(format!("r_* = {rstar} lies below the horizon limit for m = {m}")));
    }
    let mut hi = (rstar + 4.0 * m.abs()).max(lo + 1.0);
    while resid(hi) < 0.0 {
        hi = floor + 2.0 * (hi - floor);
    }
    let mut r = if rstar > 8.0 * m { rstar.clamp(lo, hi) } else { 0.5 * (lo + hi) };
    for _ in 0..200 {
        let f = resid(r);
        if f < 0.0 {
            lo = r;
        } else {
            hi = r;
        }
        let mut next = r - f / slope(r);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - r).abs();
        r = next;
        if step <= 1e-13 * r.abs() {
            // one polishing step at full precision
            let polished = r - resid(r) / slope(r);
            if polished > floor {
                r = polished;
            }
            return Ok(r);
        }
    }
    Err(Error::Domain(format!("tortoise inversion did not converge for r_* = {rstar}")))
}

/// A spacetime point in compactified coordinates with derived quantities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CompactPoint {
    pub rho0: f64,
    pub x_i: f64,
    pub theta: f64,
    pub phi: f64,
    pub mass: f64,
    pub r: f64,
    pub rstar: f64,
    pub t: f64,
    pub x0: f64,
    pub x1: f64,
}

impl CompactPoint {
    /// Point at the equator-adjacent default angles `(theta, phi) = (1.1, 0.3)`.
    pub fn new(rho0: f64, x_i: f64, m: f64) -> Result<Self> {
        Self::with_angles(rho0, x_i, 1.1, 0.3, m)
    }

    pub fn with_angles(rho0: f64, x_i: f64, theta: f64, phi: f64, m: f64) -> Result<Self> {
        check_chart(rho0, x_i, m)?;
        let rho_i = x_i * x_i;
        let r = 1.0 / (rho0 * rho_i);
        let rstar = tortoise(r, m)?;
        let x1 = -1.0 / rho0;
        let t = x1 + rstar;
        Ok(CompactPoint { rho0, x_i, theta, phi, mass: m, r, rstar, t, x0: t + rstar, x1 })
    }

    pub fn from_rho(rho0: f64, rho_i: f64, m: f64) -> Result<Self> {
        Self::new(rho0, rho_i.sqrt(), m)
    }

    pub fn rho_i(&self) -> f64 {
        self.x_i * self.x_i
    }

    /// `rho = rho0 * rho_i = 1/r`.
    pub fn rho(&self) -> f64 {
        self.rho0 * self.rho_i()
    }

    /// Inverse of [`compactify`].
    pub fn decompactify(&self) -> (f64, f64) {
        (self.t, self.rstar)
    }
}

fn check_chart(rho0: f64, x_i: f64, m: f64) -> Result<()> {
    let bound = chart_bound_xi(m);
    if !(rho0 > 0.0 && rho0 < 2.0) {
        return Err(Error::Range(format!("rho0 = {rho0} outside (0, 2)")));
    }
    if !(x_i > 0.0 && x_i < bound) {
        return Err(Error::Range(format!("x_I = {x_i} outside (0, {bound})")));
    }
    Ok(())
}

/// Compactified coordinates of the point with Schwarzschild time `t` and tortoise radius `rstar`.
pub fn compactify(t: f64, rstar: f64, m: f64) -> Result<CompactPoint> {
    let s = rstar - t;
    if !(s > 0.0) {
        return Err(Error::Domain(format!("r_* - t = {s} must be positive")));
    }
    let r = invert_tortoise(rstar, m)?;
    let rho0 = 1.0 / s;
    let x_i = (s / r).sqrt();
    check_chart(rho0, x_i, m)?;
    let x1 = t - rstar;
    Ok(CompactPoint {
        rho0,
        x_i,
        theta: 1.1,
        phi: 0.3,
        mass: m,
        r,
        rstar,
        t,
        x0: t + rstar,
        x1,
    })
}

/// Geometric parameters of the background and of the perturbation space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Background {
    pub mass: f64,
    /// Upper bound of `x_i` on the domain.
    pub c: f64,
    pub ell0: f64,
    pub ell_i: f64,
}

impl Background {
    pub fn new(mass: f64, c: f64, ell0: f64, ell_i: f64, gamma_u: f64) -> Result<Self> {
        let bound = chart_bound_xi(mass);
        if !(c > 0.0 && c < bound) {
            return Err(Error::Param(format!("domain bound c = {c} must lie in (0, {bound})")));
        }
        let cap = (-gamma_u).min(ell0).min(0.5);
        if !(ell_i < cap) {
            return Err(Error::Param(format!(
                "ellI = {ell_i} must be below min(-gammaU, ell0, 1/2) = {cap}"
            )));
        }
        Ok(Background { mass, c, ell0, ell_i })
    }

    /// Membership in `{x_i < c, rho0 < 1 + rho_i^ell_i / 2}`.
    pub fn contains(&self, p: &CompactPoint) -> bool {
        p.x_i < self.c && p.rho0 < 1.0 + 0.5 * p.rho_i().powf(self.ell_i)
    }
}

/// Symmetric products of the rescaled frame covectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FrameBlock {
    Dx0Dx0,
    Dx0Dx1,
    Dx0Sphere,
    Dx1Dx1,
    Dx1Sphere,
    SphereSphere,
}

impl FrameBlock {
    pub const ALL: [FrameBlock; 6] = [
        FrameBlock::Dx0Dx0,
        FrameBlock::Dx0Dx1,
        FrameBlock::Dx0Sphere,
        FrameBlock::Dx1Dx1,
        FrameBlock::Dx1Sphere,
        FrameBlock::SphereSphere,
    ];

    pub fn parse(tag: &str) -> Result<Self> {
        Ok(match tag {
            "dx0dx0" => FrameBlock::Dx0Dx0,
            "dx0dx1" => FrameBlock::Dx0Dx1,
            "dx0sph" => FrameBlock::Dx0Sphere,
            "dx1dx1" => FrameBlock::Dx1Dx1,
            "dx1sph" => FrameBlock::Dx1Sphere,
            "sphsph" => FrameBlock::SphereSphere,
            other => return Err(Error::Param(format!("unknown frame block '{other}'"))),
        })
    }
}

/// Exponents `(a, b)` in `rho0^-a x_i^-b` relating a rescaled-frame basis tensor to smooth eb-frame sections.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FrameWeight {
    pub pow_rho0: i32,
    pub pow_xi: i32,
}

pub fn frame_weight(block: FrameBlock) -> FrameWeight {
    // dx0 ~ rho0^-1 x_i^-2, dx1 ~ rho0^-1, r dtheta ~ rho0^-1 x_i^-1
    let pow_xi = match block {
        FrameBlock::Dx0Dx0 => 4,
        FrameBlock::Dx0Dx1 => 2,
        FrameBlock::Dx0Sphere => 3,
        FrameBlock::Dx1Dx1 => 0,
        FrameBlock::Dx1Sphere => 1,
        FrameBlock::SphereSphere => 2,
    };
    FrameWeight { pow_rho0: 2, pow_xi }
}

/// Metric components in the rescaled frame (sphere coordinate basis, spherical indices weighted by `1/r`).
pub fn metric(p: &CompactPoint, m: f64, h: Option<&dyn PerturbationProfile>) -> Result<[[f64; 4]; 4]> {
    let jets = crate::gr_ops::geometry::metric_jets(p, m, h)?;
    let mut g = [[0.0; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            let w = crate::gr_ops::geometry::spherical_count(&[i, k]) as i32;
            g[i][k] = jets[i][k].v * p.r.powi(-w);
        }
    }
    check_lorentzian(&g)?;
    Ok(g)
}

/// Inverse of a rescaled-frame metric.
pub fn dual_metric(g: &[[f64; 4]; 4]) -> Result<[[f64; 4]; 4]> {
    let m = nalgebra::Matrix4::from_fn(|i, k| g[i][k]);
    let inv = m
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("metric matrix is singular".into()))?;
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            out[i][k] = inv[(i, k)];
        }
    }
    Ok(out)
}

pub(crate) fn check_lorentzian(g: &[[f64; 4]; 4]) -> Result<()> {
    let m = nalgebra::Matrix4::from_fn(|i, k| g[i][k]);
    let det = m.determinant();
    if !(det < 0.0) || !det.is_finite() {
        return Err(Error::Degenerate(format!("metric determinant {det} is not negative")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CausalType {
    Timelike,
    Null,
    Spacelike,
}

/// Classify a covector by the sign of `ginv(omega, omega)`; returns the scalar as well.
pub fn causal_class(ginv: &[[f64; 4]; 4], omega: [f64; 4]) -> (CausalType, f64) {
    let mut q = 0.0;
    for i in 0..4 {
        for k in 0..4 {
            q += ginv[i][k] * omega[i] * omega[k];
        }
    }
    let norm2: f64 = omega.iter().map(|w| w * w).sum();
    let tol = 1e-12 * norm2;
    let kind = if q < -tol {
        CausalType::Timelike
    } else if q > tol {
        CausalType::Spacelike
    } else {
        CausalType::Null
    };
    (kind, q)
}

/// The covector `r d(rho_i)` in the rescaled frame.
pub fn r_drho_i(p: &CompactPoint) -> [f64; 4] {
    let a0 = p.x1 / (2.0 * p.r) * (1.0 - 2.0 * p.mass / p.r);
    [a0, -(1.0 + a0), 0.0, 0.0]
}

/// Defining covector `2 rho_i^(1-l) r d(rho0 - rho_i^l / 2)` of the final hypersurface.
pub fn final_surface_covector(p: &CompactPoint, ell_i: f64) -> [f64; 4] {
    let a0 = p.x1 / (2.0 * p.r) * (1.0 - 2.0 * p.mass / p.r);
    let a1 = 1.0 + a0;
    [-ell_i * a0, 2.0 * p.rho0 * p.rho_i().powf(-ell_i) + ell_i * a1, 0.0, 0.0]
}

/// `dt = (dx0 + dx1)/2`.
pub fn dt_covector() -> [f64; 4] {
    [0.5, 0.5, 0.0, 0.0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tortoise_values() {
        assert_eq!(tortoise(5.0, 0.0).unwrap(), 5.0);
        assert!((tortoise(4.0, 1.0).unwrap() - (4.0 + 2.0 * 2f64.ln())).abs() < 1e-15);
        assert!(tortoise(2.0, 1.0).is_err());
        for r in [3.0, 10.0, 100.0] {
            let back = invert_tortoise(tortoise(r, 1.0).unwrap(), 1.0).unwrap();
            assert!((back - r).abs() < 1e-12 * r);
        }
    }

    #[test]
    fn inversion_near_horizon_and_negative_mass() {
        for (r, m) in [(2.0001, 1.0), (2.5, 1.0), (0.3, -0.5), (50.0, -0.5)] {
            let back = invert_tortoise(tortoise(r, m).unwrap(), m).unwrap();
            assert!((back - r).abs() < 1e-12 * r, "{r} {m} {back}");
        }
    }

    #[test]
    fn compactify_examples() {
        let p = compactify(0.0, 2.0, 0.0).unwrap();
        assert!((p.rho0 - 0.5).abs() < 1e-15 && (p.rho_i() - 1.0).abs() < 1e-15);
        let q = compactify(9.0, 10.0, 0.0).unwrap();
        assert!((q.rho0 - 1.0).abs() < 1e-15 && (q.rho_i() - 0.1).abs() < 1e-15);
        assert!(compactify(3.0, 2.0, 0.0).is_err());
        assert!(matches!(compactify(0.0, 0.4, 0.0), Err(Error::Range(_))));
    }

    #[test]
    fn frame_weights() {
        let w = |b| {
            let f = frame_weight(b);
            (f.pow_rho0, f.pow_xi)
        };
        assert_eq!(w(FrameBlock::Dx0Dx0), (2, 4));
        assert_eq!(w(FrameBlock::Dx0Dx1), (2, 2));
        assert_eq!(w(FrameBlock::Dx0Sphere), (2, 3));
        assert_eq!(w(FrameBlock::Dx1Dx1), (2, 0));
        assert_eq!(w(FrameBlock::Dx1Sphere), (2, 1));
        assert_eq!(w(FrameBlock::SphereSphere), (2, 2));
        assert!(FrameBlock::parse("dx2dx2").is_err());
    }
}

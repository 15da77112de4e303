//! Pointwise metric geometry: Christoffel symbols, their derivatives, and curvature.
//!
//! All arrays use coordinate components in `(x0, x1, θ, φ)`. Weighted (barred)
//! components multiply by `r^{-s}` per lower spherical index and `r^{+s}` per
//! upper one, see [`weighted_first_kind`] and [`weighted_second_kind`].

use super::profile::{evaluate, PerturbationProfile};
use crate::chart::{invert_tortoise, CompactPoint};
use crate::error::{Error, Result};
use crate::jet::Jet;
use nalgebra::Matrix4;

pub type T2 = [[f64; 4]; 4];
pub type T3 = [[[f64; 4]; 4]; 4];
pub type T4 = [[[[f64; 4]; 4]; 4]; 4];

/// Number of spherical indices (`θ`, `φ`) in an index list.
pub fn spherical_count(idx: &[usize]) -> usize {
    idx.iter().filter(|&&i| i >= 2).count()
}

/// Background Schwarzschild metric components as jets.
pub fn background_jets(p: &CompactPoint, m: f64) -> [[Jet; 4]; 4] {
    let c = super::profile::CoordJets::at(p);
    let f = Jet::constant(1.0) - c.r.recip() * (2.0 * m);
    let mut g = [[Jet::ZERO; 4]; 4];
    g[0][1] = f * -0.5;
    g[1][0] = g[0][1];
    let st = c.theta.sin();
    g[2][2] = c.r * c.r;
    g[3][3] = c.r * c.r * st * st;
    g
}

/// Coordinate components of `r⁻¹ h` as jets.
pub fn perturbation_jets(p: &CompactPoint, h: &dyn PerturbationProfile) -> Result<[[Jet; 4]; 4]> {
    let a = evaluate(h, p)?;
    let c = super::profile::CoordJets::at(p);
    let rinv = c.r.recip();
    let st = c.theta.sin();
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let hthth = a[7] + a[8] * s2;
    let hphph = a[7] - a[8] * s2;
    let hthph = a[9] * s2;
    let mut k = [[Jet::ZERO; 4]; 4];
    k[0][0] = a[0] * rinv;
    k[0][1] = a[1] * rinv;
    k[0][2] = a[2];
    k[0][3] = a[3] * st;
    k[1][1] = a[4] * rinv;
    k[1][2] = a[5];
    k[1][3] = a[6] * st;
    k[2][2] = hthth * c.r;
    k[2][3] = hthph * c.r * st;
    k[3][3] = hphph * c.r * st * st;
    for i in 0..4 {
        for j in 0..i {
            k[i][j] = k[j][i];
        }
    }
    Ok(k)
}

/// Full metric `g_m + r⁻¹ h` as jets.
pub fn metric_jets(p: &CompactPoint, m: f64, h: Option<&dyn PerturbationProfile>) -> Result<[[Jet; 4]; 4]> {
    let mut g = background_jets(p, m);
    if let Some(h) = h {
        let k = perturbation_jets(p, h)?;
        for i in 0..4 {
            for j in 0..4 {
                g[i][j] = g[i][j] + k[i][j];
            }
        }
    }
    Ok(g)
}

pub fn invert4(g: &T2) -> Result<T2> {
    let m = Matrix4::from_fn(|i, k| g[i][k]);
    let inv = m.try_inverse().ok_or_else(|| Error::Degenerate("singular metric".into()))?;
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            out[i][k] = inv[(i, k)];
        }
    }
    Ok(out)
}

/// Metric with first and second derivatives and the derived connection data.
#[derive(Clone, Debug)]
pub struct Geometry {
    pub point: CompactPoint,
    pub g: T2,
    /// `dg[l][m][n] = ∂_l g_{mn}`
    pub dg: T3,
    /// `ddg[a][b][m][n] = ∂_a ∂_b g_{mn}`
    pub ddg: T4,
    pub ginv: T2,
    /// `dginv[l][m][n] = ∂_l g^{mn}`
    pub dginv: T3,
    /// `gamma1[k][m][n] = Γ_{kmn}`
    pub gamma1: T3,
    /// `gamma2[k][m][n] = Γ^k_{mn}`
    pub gamma2: T3,
    /// `dgamma1[l][k][m][n] = ∂_l Γ_{kmn}`
    pub dgamma1: T4,
    /// `dgamma2[l][k][m][n] = ∂_l Γ^k_{mn}`
    pub dgamma2: T4,
}

impl Geometry {
    pub fn from_jets(point: CompactPoint, jets: &[[Jet; 4]; 4]) -> Result<Self> {
        let mut g = [[0.0; 4]; 4];
        let mut dg = [[[0.0; 4]; 4]; 4];
        let mut ddg = [[[[0.0; 4]; 4]; 4]; 4];
        for m in 0..4 {
            for n in 0..4 {
                let j = &jets[m][n];
                if !j.is_finite() {
                    return Err(Error::NonFinite(format!("metric component {m}{n} not finite")));
                }
                g[m][n] = j.v;
                for l in 0..4 {
                    dg[l][m][n] = j.d[l];
                    for a in 0..4 {
                        ddg[l][a][m][n] = j.h[l][a];
                    }
                }
            }
        }
        let ginv = invert4(&g)?;
        if !(Matrix4::from_fn(|i, k| g[i][k]).determinant() < 0.0) {
            return Err(Error::Degenerate("metric is not Lorentzian".into()));
        }
        let mut dginv = [[[0.0; 4]; 4]; 4];
        for l in 0..4 {
            for m in 0..4 {
                for n in 0..4 {
                    let mut s = 0.0;
                    for a in 0..4 {
                        for b in 0..4 {
                            s -= ginv[m][a] * dg[l][a][b] * ginv[b][n];
                        }
                    }
                    dginv[l][m][n] = s;
                }
            }
        }
        let mut gamma1 = [[[0.0; 4]; 4]; 4];
        let mut dgamma1 = [[[[0.0; 4]; 4]; 4]; 4];
        for k in 0..4 {
            for m in 0..4 {
                for n in 0..4 {
                    gamma1[k][m][n] = 0.5 * (dg[m][n][k] + dg[n][m][k] - dg[k][m][n]);
                    for l in 0..4 {
                        dgamma1[l][k][m][n] = 0.5 * (ddg[l][m][n][k] + ddg[l][n][m][k] - ddg[l][k][m][n]);
                    }
                }
            }
        }
        let (gamma2, dgamma2) = raise(&ginv, &dginv, &gamma1, &dgamma1);
        Ok(Geometry { point, g, dg, ddg, ginv, dginv, gamma1, gamma2, dgamma1, dgamma2 })
    }

    pub fn new(p: &CompactPoint, m: f64, h: Option<&dyn PerturbationProfile>) -> Result<Self> {
        let mut point = *p;
        point.mass = m;
        if m != p.mass {
            point = CompactPoint::with_angles(p.rho0, p.x_i, p.theta, p.phi, m)?;
        }
        Geometry::from_jets(point, &metric_jets(&point, m, h)?)
    }

    /// `R^k_{lmn}`.
    pub fn riemann(&self) -> T4 {
        let (g2, dg2) = (&self.gamma2, &self.dgamma2);
        let mut r = [[[[0.0; 4]; 4]; 4]; 4];
        for k in 0..4 {
            for l in 0..4 {
                for m in 0..4 {
                    for n in 0..4 {
                        let mut s = dg2[m][k][l][n] - dg2[n][k][l][m];
                        for q in 0..4 {
                            s += g2[k][m][q] * g2[q][l][n] - g2[k][n][q] * g2[q][l][m];
                        }
                        r[k][l][m][n] = s;
                    }
                }
            }
        }
        r
    }

    /// `Ric_{ln} = R^k_{lkn}`.
    pub fn ricci(&self) -> T2 {
        let r = self.riemann();
        let mut ric = [[0.0; 4]; 4];
        for l in 0..4 {
            for n in 0..4 {
                ric[l][n] = (0..4).map(|k| r[k][l][k][n]).sum();
            }
        }
        ric
    }

    /// Frame scale factors `(1, 1, r, r sinθ)` relating coordinate and orthonormal-sphere components.
    pub fn frame_scale(&self) -> [f64; 4] {
        let r = self.point.r;
        [1.0, 1.0, r, r * self.point.theta.sin()]
    }
}

fn raise(ginv: &T2, dginv: &T3, gamma1: &T3, dgamma1: &T4) -> (T3, T4) {
    let mut gamma2 = [[[0.0; 4]; 4]; 4];
    let mut dgamma2 = [[[[0.0; 4]; 4]; 4]; 4];
    for k in 0..4 {
        for m in 0..4 {
            for n in 0..4 {
                gamma2[k][m][n] = (0..4).map(|a| ginv[k][a] * gamma1[a][m][n]).sum();
                for l in 0..4 {
                    dgamma2[l][k][m][n] = (0..4)
                        .map(|a| dginv[l][k][a] * gamma1[a][m][n] + ginv[k][a] * dgamma1[l][a][m][n])
                        .sum();
                }
            }
        }
    }
    (gamma2, dgamma2)
}

/// Christoffel symbols with both kinds, and how they were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChristoffelMode {
    Analytic,
    FiniteDifference,
}

#[derive(Clone, Debug)]
pub struct ChristoffelSet {
    pub first: T3,
    pub second: T3,
    pub r: f64,
}

pub fn weighted_first_kind(c: &ChristoffelSet) -> T3 {
    let mut out = c.first;
    for k in 0..4 {
        for m in 0..4 {
            for n in 0..4 {
                out[k][m][n] *= c.r.powi(-(spherical_count(&[k, m, n]) as i32));
            }
        }
    }
    out
}

pub fn weighted_second_kind(c: &ChristoffelSet) -> T3 {
    let mut out = c.second;
    for k in 0..4 {
        for m in 0..4 {
            for n in 0..4 {
                let s = spherical_count(&[k]) as i32 - spherical_count(&[m, n]) as i32;
                out[k][m][n] *= c.r.powi(s);
            }
        }
    }
    out
}

/// Point with the given coordinates `(x0, x1, θ, φ)`.
pub fn point_from_coords(y: [f64; 4], m: f64) -> Result<CompactPoint> {
    let rstar = 0.5 * (y[0] - y[1]);
    let r = invert_tortoise(rstar, m)?;
    let rho0 = -1.0 / y[1];
    let rho_i = -y[1] / r;
    if !(rho0 > 0.0) || !(rho_i > 0.0) {
        return Err(Error::Range(format!("coordinates {y:?} leave the chart")));
    }
    let mut p = CompactPoint::with_angles(rho0, rho_i.sqrt(), y[2], y[3], m)?;
    // keep the exact r of the shifted coordinates
    p.r = r;
    p.rstar = rstar;
    p.x0 = y[0];
    p.x1 = y[1];
    p.t = 0.5 * (y[0] + y[1]);
    Ok(p)
}

/// Coordinate steps for finite differences: proportional to `r` for `x0`, to `|x1|` for `x1`.
pub fn fd_steps(p: &CompactPoint, s: f64) -> [f64; 4] {
    [s * p.r, s / p.rho0, s, s]
}

fn metric_values(y: [f64; 4], m: f64, h: Option<&dyn PerturbationProfile>) -> Result<T2> {
    let p = point_from_coords(y, m)?;
    let jets = metric_jets(&p, m, h)?;
    let mut g = [[0.0; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            g[i][k] = jets[i][k].v;
        }
    }
    Ok(g)
}

/// First-kind symbols from central differences of metric values with the given steps.
pub fn fd_first_kind(p: &CompactPoint, m: f64, h: Option<&dyn PerturbationProfile>, steps: [f64; 4]) -> Result<T3> {
    let y = [p.x0, p.x1, p.theta, p.phi];
    let mut dg = [[[0.0; 4]; 4]; 4];
    for l in 0..4 {
        let step = steps[l];
        if !(step > 1e-14 * y[l].abs().max(1.0)) {
            return Err(Error::Domain(format!("finite-difference step {step} underflows")));
        }
        let mut yp = y;
        let mut ym = y;
        yp[l] += step;
        ym[l] -= step;
        let gp = metric_values(yp, m, h)?;
        let gm = metric_values(ym, m, h)?;
        for a in 0..4 {
            for b in 0..4 {
                dg[l][a][b] = (gp[a][b] - gm[a][b]) / (2.0 * step);
            }
        }
    }
    let mut gamma1 = [[[0.0; 4]; 4]; 4];
    for k in 0..4 {
        for a in 0..4 {
            for b in 0..4 {
                gamma1[k][a][b] = 0.5 * (dg[a][b][k] + dg[b][a][k] - dg[k][a][b]);
            }
        }
    }
    Ok(gamma1)
}

pub fn christoffel(
    p: &CompactPoint,
    m: f64,
    h: Option<&dyn PerturbationProfile>,
    mode: ChristoffelMode,
) -> Result<ChristoffelSet> {
    let geo = Geometry::new(p, m, h)?;
    let first = match mode {
        ChristoffelMode::Analytic => geo.gamma1,
        ChristoffelMode::FiniteDifference => {
            let coarse = fd_first_kind(&geo.point, m, h, fd_steps(&geo.point, 1e-2))?;
            let fine = fd_first_kind(&geo.point, m, h, fd_steps(&geo.point, 5e-3))?;
            let mut out = [[[0.0; 4]; 4]; 4];
            for k in 0..4 {
                for a in 0..4 {
                    for b in 0..4 {
                        out[k][a][b] = (4.0 * fine[k][a][b] - coarse[k][a][b]) / 3.0;
                    }
                }
            }
            out
        }
    };
    let mut second = [[[0.0; 4]; 4]; 4];
    for k in 0..4 {
        for a in 0..4 {
            for b in 0..4 {
                second[k][a][b] = (0..4).map(|l| geo.ginv[k][l] * first[l][a][b]).sum();
            }
        }
    }
    Ok(ChristoffelSet { first, second, r: geo.point.r })
}

/// Weighted Riemann components `R^{κ̄}_{λ̄μ̄ν̄}`.
pub fn weighted_riemann(geo: &Geometry) -> T4 {
    let mut r = geo.riemann();
    let rad = geo.point.r;
    for k in 0..4 {
        for l in 0..4 {
            for m in 0..4 {
                for n in 0..4 {
                    let s = spherical_count(&[k]) as i32 - spherical_count(&[l, m, n]) as i32;
                    r[k][l][m][n] *= rad.powi(s);
                }
            }
        }
    }
    r
}

/// Curvature at a point: weighted Riemann and Ricci components.
pub struct Curvature {
    pub riemann: T4,
    pub ricci: T2,
}

pub fn curvature(p: &CompactPoint, m: f64, h: Option<&dyn PerturbationProfile>) -> Result<Curvature> {
    let geo = Geometry::new(p, m, h)?;
    let riemann = weighted_riemann(&geo);
    let mut ricci = geo.ricci();
    for l in 0..4 {
        for n in 0..4 {
            ricci[l][n] *= geo.point.r.powi(-(spherical_count(&[l, n]) as i32));
        }
    }
    Ok(Curvature { riemann, ricci })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_space_is_flat() {
        let p = CompactPoint::new(0.8, 0.4, 0.0).unwrap();
        let c = curvature(&p, 0.0, None).unwrap();
        let max = c.riemann.iter().flatten().flatten().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(max < 1e-12, "{max}");
    }

    #[test]
    fn schwarzschild_is_ricci_flat() {
        let p = CompactPoint::new(0.6, 0.3, 0.2).unwrap();
        let c = curvature(&p, 0.2, None).unwrap();
        let max = c.ricci.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(max < 1e-12, "{max}");
    }

    #[test]
    fn first_kind_symmetry_and_raising() {
        let h = super::super::profile::TermProfile::conforming(0.05, 0.5, 0.2);
        let p = CompactPoint::new(0.7, 0.25, 0.1).unwrap();
        let c = christoffel(&p, 0.1, Some(&h), ChristoffelMode::Analytic).unwrap();
        for k in 0..4 {
            for a in 0..4 {
                for b in 0..4 {
                    assert_eq!(c.first[k][a][b], c.first[k][b][a]);
                }
            }
        }
    }
}

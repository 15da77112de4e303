//! Gauge 1-form, modified symmetric gradient and divergence, and the gauge-fixed
//! Einstein operator `P(g) = Ric(g) − δ*_{g_m,E^C} Υ_{E^Υ}(g; g_m)`.

use super::geometry::{perturbation_jets, Geometry, T2, T3};
use super::profile::{CoordJets, PerturbationProfile};
use crate::chart::CompactPoint;
use crate::error::Result;
use crate::jet::Jet;
use crate::tensors::{ModPair, SplitSymTensor};

/// A covector field known to first order at a point: values and `d[l][k] = ∂_l ω_k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CovectorJet {
    pub v: [f64; 4],
    pub d: [[f64; 4]; 4],
}

/// The damping covector `c = r⁻¹ dt` and its `g_m`-dual, with derivatives.
pub struct DampingCovector {
    pub c: [Jet; 4],
    pub sharp: [Jet; 4],
}

impl DampingCovector {
    pub fn at(p: &CompactPoint) -> Self {
        let cj = CoordJets::at(p);
        let half_rinv = cj.r.recip() * 0.5;
        // g_m^{01} = -2/f, so c♯^0 = c♯^1 = -1/(r - 2m)
        let sharp = -(cj.r - 2.0 * p.mass).recip();
        DampingCovector {
            c: [half_rinv, half_rinv, Jet::ZERO, Jet::ZERO],
            sharp: [sharp, sharp, Jet::ZERO, Jet::ZERO],
        }
    }
}

/// `Υ(g; g_m)^κ = g^{μν}(Γ(g)^κ_{μν} − Γ(g_m)^κ_{μν})` and its first derivatives.
pub fn upsilon_upper(geo: &Geometry, bg: &Geometry) -> ([f64; 4], [[f64; 4]; 4]) {
    let mut v = [0.0; 4];
    let mut d = [[0.0; 4]; 4];
    for k in 0..4 {
        for m in 0..4 {
            for n in 0..4 {
                let diff = geo.gamma2[k][m][n] - bg.gamma2[k][m][n];
                v[k] += geo.ginv[m][n] * diff;
                for l in 0..4 {
                    d[l][k] += geo.dginv[l][m][n] * diff
                        + geo.ginv[m][n] * (geo.dgamma2[l][k][m][n] - bg.dgamma2[l][k][m][n]);
                }
            }
        }
    }
    (v, d)
}

/// `Υ(g; g_m)` lowered with `g`, in the Christoffel-difference form.
pub fn upsilon_christoffel(geo: &Geometry, bg: &Geometry) -> CovectorJet {
    let (up, dup) = upsilon_upper(geo, bg);
    let mut out = CovectorJet { v: [0.0; 4], d: [[0.0; 4]; 4] };
    for k in 0..4 {
        for a in 0..4 {
            out.v[k] += geo.g[k][a] * up[a];
            for l in 0..4 {
                out.d[l][k] += geo.dg[l][k][a] * up[a] + geo.g[k][a] * dup[l][a];
            }
        }
    }
    out
}

/// `Υ(g; g_m) = g g_m⁻¹ δ_g G_g g_m` with `(δ_g T)_μ = −g^{νλ}∇_λ T_{μν}` (values only).
pub fn upsilon_divergence(geo: &Geometry, bg: &Geometry) -> [f64; 4] {
    let (g, ginv) = (&geo.g, &geo.ginv);
    let gm = &bg.g;
    // T = g_m − ½ g tr_g g_m and ∂T
    let mut tr = 0.0;
    let mut dtr = [0.0; 4];
    for a in 0..4 {
        for b in 0..4 {
            tr += ginv[a][b] * gm[a][b];
            for l in 0..4 {
                dtr[l] += geo.dginv[l][a][b] * gm[a][b] + ginv[a][b] * bg.dg[l][a][b];
            }
        }
    }
    let mut t = [[0.0; 4]; 4];
    let mut dt = [[[0.0; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            t[a][b] = gm[a][b] - 0.5 * g[a][b] * tr;
            for l in 0..4 {
                dt[l][a][b] = bg.dg[l][a][b] - 0.5 * (geo.dg[l][a][b] * tr + g[a][b] * dtr[l]);
            }
        }
    }
    let mut div = [0.0; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            for la in 0..4 {
                let mut cov = dt[la][mu][nu];
                for a in 0..4 {
                    cov -= geo.gamma2[a][la][mu] * t[a][nu] + geo.gamma2[a][la][nu] * t[mu][a];
                }
                div[mu] -= ginv[nu][la] * cov;
            }
        }
    }
    let mut out = [0.0; 4];
    for al in 0..4 {
        for be in 0..4 {
            for mu in 0..4 {
                out[al] += g[al][be] * bg.ginv[be][mu] * div[mu];
            }
        }
    }
    out
}

/// Symmetric gradient `δ*_g ω = ½(∇ω + ∇ωᵀ)` plus the damping modification
/// `γ(2 c ⊗_s ω − g ι_{c♯}ω)` with `c ⊗_s ω = ½(c⊗ω + ω⊗c)`.
pub fn mod_sym_gradient(geo: &Geometry, gamma: f64, omega: &CovectorJet) -> T2 {
    let dc = DampingCovector::at(&geo.point);
    let cw: f64 = (0..4).map(|a| dc.sharp[a].v * omega.v[a]).sum();
    let mut out = [[0.0; 4]; 4];
    for m in 0..4 {
        for n in 0..4 {
            let mut s = 0.5 * (omega.d[m][n] + omega.d[n][m]);
            for a in 0..4 {
                s -= geo.gamma2[a][m][n] * omega.v[a];
            }
            s += gamma * (dc.c[m].v * omega.v[n] + dc.c[n].v * omega.v[m] - geo.g[m][n] * cw);
            out[m][n] = s;
        }
    }
    out
}

/// Divergence `δ_g u = −g^{νλ}∇_λ u_{μν}` plus the gauge-change modification
/// `γ(2 u(c♯, ·) − tr_g u · c)`, the formal adjoint of the modified gradient.
pub fn mod_divergence(geo: &Geometry, gamma: f64, u: &T2, du: &T3) -> [f64; 4] {
    let dc = DampingCovector::at(&geo.point);
    let ginv = &geo.ginv;
    let mut tr = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            tr += ginv[a][b] * u[a][b];
        }
    }
    let mut out = [0.0; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            for la in 0..4 {
                let mut cov = du[la][mu][nu];
                for a in 0..4 {
                    cov -= geo.gamma2[a][la][mu] * u[a][nu] + geo.gamma2[a][la][nu] * u[mu][a];
                }
                out[mu] -= ginv[nu][la] * cov;
            }
        }
        let mut contract = 0.0;
        for a in 0..4 {
            contract += u[mu][a] * dc.sharp[a].v;
        }
        out[mu] += gamma * (2.0 * contract - tr * dc.c[mu].v);
    }
    out
}

/// `Υ_{E^Υ}(g; g_m) = Υ(g; g_m) − 2γ^Υ ι_{c♯}(g − g_m)` with derivatives.
pub fn gauge_oneform_jet(
    geo: &Geometry,
    bg: &Geometry,
    h: Option<&dyn PerturbationProfile>,
    gamma_u: f64,
) -> Result<CovectorJet> {
    let mut ups = upsilon_christoffel(geo, bg);
    if let (Some(h), true) = (h, gamma_u != 0.0) {
        let k = perturbation_jets(&geo.point, h)?;
        let dc = DampingCovector::at(&geo.point);
        for kap in 0..4 {
            let mut s = Jet::ZERO;
            for mu in 0..2 {
                s = s + k[kap][mu] * dc.sharp[mu];
            }
            ups.v[kap] -= 2.0 * gamma_u * s.v;
            for l in 0..4 {
                ups.d[l][kap] -= 2.0 * gamma_u * s.d[l];
            }
        }
    }
    Ok(ups)
}

/// Gauge 1-form in the rescaled frame `(dx0, dx1, r dθ, r sinθ dφ)`.
pub fn gauge_oneform(
    p: &CompactPoint,
    m: f64,
    h: Option<&dyn PerturbationProfile>,
    pair: ModPair,
) -> Result<[f64; 4]> {
    let geo = Geometry::new(p, m, h)?;
    let bg = Geometry::new(p, m, None)?;
    let ups = gauge_oneform_jet(&geo, &bg, h, pair.gamma_u)?;
    let e = geo.frame_scale();
    Ok([ups.v[0], ups.v[1], ups.v[2] / e[2], ups.v[3] / e[3]])
}

/// Both gauge 1-form formulas (Christoffel and divergence form) as coordinate covectors.
pub fn gauge_oneform_pair(p: &CompactPoint, m: f64, h: Option<&dyn PerturbationProfile>) -> Result<([f64; 4], [f64; 4])> {
    let geo = Geometry::new(p, m, h)?;
    let bg = Geometry::new(p, m, None)?;
    Ok((upsilon_christoffel(&geo, &bg).v, upsilon_divergence(&geo, &bg)))
}

/// Coordinate components of `P_{E^C,E^Υ}(g_m + r⁻¹h)`.
pub fn nonlinear_p_coords(
    p: &CompactPoint,
    m: f64,
    h: Option<&dyn PerturbationProfile>,
    pair: ModPair,
) -> Result<T2> {
    let geo = Geometry::new(p, m, h)?;
    let bg = Geometry::new(p, m, None)?;
    let ric = geo.ricci();
    let ups = gauge_oneform_jet(&geo, &bg, h, pair.gamma_u)?;
    let grad = mod_sym_gradient(&bg, pair.gamma_c, &ups);
    let mut out = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            out[a][b] = ric[a][b] - grad[a][b];
        }
    }
    Ok(out)
}

/// Coordinate 2-tensor converted to the ten-amplitude splitting.
pub fn coords_to_split(p: &CompactPoint, t: &T2) -> SplitSymTensor {
    let e = [1.0, 1.0, p.r, p.r * p.theta.sin()];
    let mut f = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            f[a][b] = t[a][b] / (e[a] * e[b]);
        }
    }
    SplitSymTensor::from_frame(&f)
}

/// `P_{E^C,E^Υ}(g)` in the splitting.
pub fn nonlinear_p(
    p: &CompactPoint,
    m: f64,
    h: Option<&dyn PerturbationProfile>,
    pair: ModPair,
) -> Result<SplitSymTensor> {
    Ok(coords_to_split(p, &nonlinear_p_coords(p, m, h, pair)?))
}

/// `2 ρ_I ρ⁻³ P(g)`, the rescaling under which the leading `(dx¹)²` source is order one.
pub fn rescaled_p(
    p: &CompactPoint,
    m: f64,
    h: Option<&dyn PerturbationProfile>,
    pair: ModPair,
) -> Result<SplitSymTensor> {
    let scale = 2.0 * p.rho_i() * p.r.powi(3);
    let mut out = nonlinear_p(p, m, h, pair)?;
    for a in out.amp.iter_mut() {
        *a *= scale;
    }
    Ok(out)
}

/// Leading `(dx¹)²` term `ρ0⁻¹(−4γ^Υ ∂₁h11 − ½|∂₁ π̸0 h|²)`.
pub fn nonlinear_source_prediction(p: &CompactPoint, h: &dyn PerturbationProfile, gamma_u: f64) -> Result<f64> {
    let a = super::profile::evaluate(h, p)?;
    let news2 = a[8].d[1].powi(2) + a[9].d[1].powi(2);
    Ok((-4.0 * gamma_u * a[4].d[1] - 0.5 * news2) / p.rho0)
}

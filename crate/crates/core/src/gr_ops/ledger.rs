//! Leading terms of connection and curvature coefficients near null infinity, and
//! decay fits of the remainders along `ρ_I → 0` at fixed `ρ0`.

use super::geometry::{christoffel, perturbation_jets, weighted_riemann, ChristoffelMode, Geometry};
use super::profile::{CoordJets, PerturbationProfile};
use crate::chart::CompactPoint;
use crate::error::Result;
use crate::jet::Jet;
use crate::scri_solver::fit::{decay_fit, log_samples, DecayFit};
use serde::Serialize;

/// Index slot pattern: `0`, `1`, or a spherical letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    Zero,
    One,
    Sph(u8),
}

fn parse(pattern: &str) -> [Slot; 3] {
    let mut out = [Slot::Zero; 3];
    for (i, ch) in pattern.chars().enumerate() {
        out[i] = match ch {
            '0' => Slot::Zero,
            '1' => Slot::One,
            c => Slot::Sph(c as u8),
        };
    }
    out
}

fn expand(pattern: &str) -> Vec<[usize; 3]> {
    let slots = parse(pattern);
    let mut letters: Vec<u8> = slots
        .iter()
        .filter_map(|s| if let Slot::Sph(c) = s { Some(*c) } else { None })
        .collect();
    letters.sort();
    letters.dedup();
    let mut out = Vec::new();
    let combos = 1usize << letters.len();
    for mask in 0..combos {
        let val = |c: u8| {
            let j = letters.iter().position(|&l| l == c).unwrap();
            2 + ((mask >> j) & 1)
        };
        let mut idx = [0usize; 3];
        for (i, s) in slots.iter().enumerate() {
            idx[i] = match s {
                Slot::Zero => 0,
                Slot::One => 1,
                Slot::Sph(c) => val(*c),
            };
        }
        out.push(idx);
    }
    out
}

/// Quantities available to leading-term formulas at a point.
struct Local {
    r: f64,
    m: f64,
    theta: f64,
    /// `h_{āb̄}` (coordinate sphere components weighted by `r⁻²`) as jets
    hbar: [[Jet; 4]; 4],
}

impl Local {
    fn new(p: &CompactPoint, h: Option<&dyn PerturbationProfile>) -> Result<Self> {
        let mut hbar = [[Jet::ZERO; 4]; 4];
        if let Some(h) = h {
            let k = perturbation_jets(p, h)?;
            let c = CoordJets::at(p);
            let rinv = c.r.recip();
            for a in 0..4 {
                for b in 0..4 {
                    // r⁻¹h = k, so h = r k, weighted by r^{-s}
                    let s = super::geometry::spherical_count(&[a, b]) as i32;
                    let mut w = k[a][b] * c.r;
                    for _ in 0..s {
                        w = w * rinv;
                    }
                    hbar[a][b] = w;
                }
            }
        }
        Ok(Local { r: p.r, m: p.mass, theta: p.theta, hbar })
    }

    fn round(&self, a: usize, b: usize) -> f64 {
        match (a, b) {
            (2, 2) => 1.0,
            (3, 3) => self.theta.sin().powi(2),
            _ => 0.0,
        }
    }

    fn round_inv(&self, a: usize, b: usize) -> f64 {
        match (a, b) {
            (2, 2) => 1.0,
            (3, 3) => self.theta.sin().powi(-2),
            _ => 0.0,
        }
    }

    /// First-kind symbols of the round sphere.
    fn round_first(&self, c: usize, a: usize, b: usize) -> f64 {
        let sc = self.theta.sin() * self.theta.cos();
        match (c, a, b) {
            (2, 3, 3) => -sc,
            (3, 2, 3) | (3, 3, 2) => sc,
            _ => 0.0,
        }
    }

    fn round_second(&self, c: usize, a: usize, b: usize) -> f64 {
        (2..4).map(|d| self.round_inv(c, d) * self.round_first(d, a, b)).sum()
    }

    fn d1_hbar(&self, a: usize, b: usize) -> f64 {
        self.hbar[a][b].d[1]
    }

    fn d11_hbar(&self, a: usize, b: usize) -> f64 {
        self.hbar[a][b].h[1][1]
    }

    /// `∂₁ h_{b̄}{}^{c̄}` raised with the round metric.
    fn d1_hbar_mixed(&self, b: usize, c: usize) -> f64 {
        (2..4).map(|d| self.round_inv(c, d) * self.d1_hbar(b, d)).sum()
    }

    fn d11_hbar_mixed(&self, b: usize, c: usize) -> f64 {
        (2..4).map(|d| self.round_inv(c, d) * self.d11_hbar(b, d)).sum()
    }
}

type Leading = fn(&Local, [usize; 3]) -> f64;

/// First-kind table: pattern `κμν`, leading term, and the stated `ρ_I` order of the remainder
/// as an offset added to `ℓ_I`.
fn first_kind_table() -> Vec<(&'static str, Leading, f64)> {
    let zero: Leading = |_, _| 0.0;
    vec![
        ("000", zero, 1.0),
        ("001", zero, 1.0),
        ("100", |l, _| -0.5 * l.m / (l.r * l.r), 1.0),
        ("101", zero, 1.0),
        ("c00", zero, 0.0),
        ("c01", zero, 0.0),
        ("00b", zero, 0.0),
        ("011", |l, _| 0.5 * l.m / (l.r * l.r), 1.0),
        ("10b", zero, 0.0),
        ("111", |l, _| 0.5 / l.r * l.hbar[1][1].d[1], 1.0),
        ("c0b", |l, i| 0.5 * (l.r - 2.0 * l.m) * l.round(i[2], i[0]), -1.0),
        ("c11", zero, 0.0),
        ("01b", zero, 0.0),
        ("0ab", |l, i| -0.5 * (l.r - 2.0 * l.m) * l.round(i[1], i[2]), -1.0),
        ("11b", zero, 0.0),
        ("1ab", |l, i| 0.5 * (l.r - 2.0 * l.m) * l.round(i[1], i[2]) - 0.5 * l.r * l.d1_hbar(i[1], i[2]), -1.0),
        ("c1b", |l, i| -0.5 * (l.r - 2.0 * l.m) * l.round(i[2], i[0]) + 0.5 * l.r * l.d1_hbar(i[2], i[0]), -1.0),
        ("cab", |l, i| l.r * l.r * l.round_first(i[0], i[1], i[2]), -2.0),
    ]
}

fn second_kind_table() -> Vec<(&'static str, Leading, f64)> {
    let zero: Leading = |_, _| 0.0;
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let _ = delta;
    vec![
        ("000", |l, _| l.m / (l.r * l.r), 1.0),
        ("001", zero, 1.0),
        ("100", zero, 1.0),
        ("101", zero, 1.0),
        ("c00", zero, 2.0),
        ("c01", zero, 2.0),
        ("00b", zero, 0.0),
        ("011", |l, _| -l.hbar[1][1].d[1] / l.r, 1.0),
        ("10b", zero, 0.0),
        ("111", |l, _| -l.m / (l.r * l.r), 1.0),
        ("c0b", |l, i| if i[0] == i[2] { 0.5 / l.r * (1.0 - 2.0 * l.m / l.r) } else { 0.0 }, 1.0),
        ("c11", zero, 2.0),
        ("01b", zero, 0.0),
        ("0ab", |l, i| -l.r * l.round(i[1], i[2]) + l.r * l.d1_hbar(i[1], i[2]), -1.0),
        ("11b", zero, 0.0),
        ("1ab", |l, i| l.r * l.round(i[1], i[2]), -1.0),
        (
            "c1b",
            |l, i| {
                let d = if i[0] == i[2] { 1.0 } else { 0.0 };
                -0.5 / l.r * (1.0 - 2.0 * l.m / l.r) * d + 0.5 / l.r * l.d1_hbar_mixed(i[2], i[0])
            },
            1.0,
        ),
        ("cab", |l, i| l.round_second(i[0], i[1], i[2]), 0.0),
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct LedgerRow {
    pub kind: &'static str,
    pub pattern: &'static str,
    pub indices: [usize; 3],
    pub stated_order: f64,
    pub fit: DecayFit,
    pub pass: bool,
}

/// Sampling setup for the remainder fits.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LedgerSetup {
    pub rho0: f64,
    pub rho_i_min: f64,
    pub rho_i_max: f64,
    pub samples: usize,
    pub mass: f64,
    pub ell_i: f64,
    pub slope_slack: f64,
}

impl Default for LedgerSetup {
    fn default() -> Self {
        LedgerSetup {
            rho0: 0.8,
            rho_i_min: 1e-6,
            rho_i_max: 1e-3,
            samples: 24,
            mass: 0.1,
            ell_i: 0.2,
            slope_slack: 0.1,
        }
    }
}

/// Remainder decay fits for every first- and second-kind coefficient with a stated order.
pub fn christoffel_ledger(setup: &LedgerSetup, h: &dyn PerturbationProfile) -> Result<Vec<LedgerRow>> {
    let xs = log_samples(setup.rho_i_min, setup.rho_i_max, setup.samples);
    let mut sets = Vec::with_capacity(xs.len());
    for &ri in &xs {
        let p = CompactPoint::from_rho(setup.rho0, ri, setup.mass)?;
        let c = christoffel(&p, setup.mass, Some(h), ChristoffelMode::Analytic)?;
        sets.push((Local::new(&p, Some(h))?, c));
    }
    let mut rows = Vec::new();
    for (kind, table) in [("first", first_kind_table()), ("second", second_kind_table())] {
        for (pattern, leading, offset) in table {
            for idx in expand(pattern) {
                let rem: Vec<f64> = sets
                    .iter()
                    .map(|(loc, c)| {
                        let val = if kind == "first" { c.first } else { c.second }[idx[0]][idx[1]][idx[2]];
                        val - leading(loc, idx)
                    })
                    .collect();
                let fit = decay_fit(&xs, &rem, (setup.rho_i_min, setup.rho_i_max))?;
                let stated = setup.ell_i + offset;
                let pass = fit.vanishing || fit.exponent > stated - setup.slope_slack;
                rows.push(LedgerRow { kind, pattern, indices: idx, stated_order: stated, fit, pass });
            }
        }
    }
    Ok(rows)
}

/// Relative deviation of curvature components from their leading terms along `ρ_I → 0`.
#[derive(Clone, Debug, Serialize)]
pub struct CurvatureRow {
    pub component: String,
    pub rho_i: Vec<f64>,
    pub relative_error: Vec<f64>,
}

pub fn curvature_leading(setup: &LedgerSetup, h: &dyn PerturbationProfile, rho_is: &[f64]) -> Result<Vec<CurvatureRow>> {
    let mut r0 = Vec::new();
    let mut ra = Vec::new();
    let pairs: [(usize, usize); 3] = [(2, 2), (2, 3), (3, 3)];
    for &ri in rho_is {
        let p = CompactPoint::from_rho(setup.rho0, ri, setup.mass)?;
        let geo = Geometry::new(&p, setup.mass, Some(h))?;
        let riem = weighted_riemann(&geo);
        let loc = Local::new(&p, Some(h))?;
        // weighted upper spherical index in the round-sphere frame
        let e0: Vec<f64> = pairs
            .iter()
            .map(|&(b, d)| {
                let lead = loc.d11_hbar(b, d) / p.r;
                ((riem[0][b][1][d] - lead) / lead).abs()
            })
            .collect();
        let ea: Vec<f64> = pairs
            .iter()
            .map(|&(a, d)| {
                let lead = 0.5 / p.r * loc.d11_hbar_mixed(d, a);
                ((riem[a][1][1][d] - lead) / lead).abs()
            })
            .collect();
        r0.push(e0);
        ra.push(ea);
    }
    let mut rows = Vec::new();
    for (j, &(b, d)) in pairs.iter().enumerate() {
        rows.push(CurvatureRow {
            component: format!("R^0_{b}1{d}"),
            rho_i: rho_is.to_vec(),
            relative_error: r0.iter().map(|v| v[j]).collect(),
        });
        rows.push(CurvatureRow {
            component: format!("R^{b}_11{d}"),
            rho_i: rho_is.to_vec(),
            relative_error: ra.iter().map(|v| v[j]).collect(),
        });
    }
    Ok(rows)
}

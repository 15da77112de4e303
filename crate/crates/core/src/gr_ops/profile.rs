//! Closed-form metric perturbation profiles with exact derivatives.
//!
//! A profile returns the ten amplitudes of `h` (see [`crate::tensors`]) as jets in
//! `(x0, x1, θ, φ)`. Profiles are built from products of powers of `ρ0` and `ρ_I`,
//! bumps in `ρ0`, and trigonometric factors in `x1`, so their derivatives are exact.

use crate::chart::CompactPoint;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::tensors::NAMP;
use serde::{Deserialize, Serialize};

/// Coordinate functions at a point, each as a jet in `(x0, x1, θ, φ)`.
#[derive(Clone, Copy, Debug)]
pub struct CoordJets {
    pub x0: Jet,
    pub x1: Jet,
    pub theta: Jet,
    pub phi: Jet,
    pub r: Jet,
    pub rho0: Jet,
    pub rho_i: Jet,
    pub mass: f64,
}

impl CoordJets {
    pub fn at(p: &CompactPoint) -> Self {
        let x0 = Jet::var(0, p.x0);
        let x1 = Jet::var(1, p.x1);
        let theta = Jet::var(2, p.theta);
        let phi = Jet::var(3, p.phi);
        let m = p.mass;
        let f = 1.0 - 2.0 * m / p.r;
        // r as a function of r_* = (x0 - x1)/2
        let rstar = (x0 - x1) * 0.5;
        let r = rstar.chain(p.r, f, 2.0 * m / (p.r * p.r) * f);
        let rho0 = -x1.recip();
        let rho_i = -x1 / r;
        CoordJets { x0, x1, theta, phi, r, rho0, rho_i, mass: m }
    }
}

pub trait PerturbationProfile: Send + Sync {
    /// Amplitudes of `h` in the ten-component order.
    fn amplitudes(&self, c: &CoordJets) -> [Jet; NAMP];

    /// Decay orders `(ℓ0, ℓ_I)` the profile is built to satisfy.
    fn orders(&self) -> (f64, f64) {
        (0.0, 0.0)
    }

    /// Scri-leading terms `(h11⁽⁰⁾, tf_p⁽⁰⁾, tf_q⁽⁰⁾)` at the given `ρ0`.
    fn leading(&self, _rho0: f64) -> [f64; 3] {
        [0.0; 3]
    }
}

pub fn evaluate(h: &dyn PerturbationProfile, p: &CompactPoint) -> Result<[Jet; NAMP]> {
    let jets = h.amplitudes(&CoordJets::at(p));
    if jets.iter().any(|j| !j.is_finite()) {
        return Err(Error::NonFinite(format!("profile not finite at rho0={}, x_I={}", p.rho0, p.x_i)));
    }
    Ok(jets)
}

/// x1-dependence of a term.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Wave {
    Flat,
    Sin { k: f64, phase: f64 },
}

/// `coef · ρ0^a · ρ_I^b · bump(ρ0) · wave(x1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coef: f64,
    pub rho0_pow: f64,
    pub rho_i_pow: f64,
    /// Gaussian `exp(−((ρ0 − c)/w)²)`.
    pub bump: Option<(f64, f64)>,
    pub wave: Wave,
}

impl Term {
    pub fn power(coef: f64, rho0_pow: f64, rho_i_pow: f64) -> Self {
        Term { coef, rho0_pow, rho_i_pow, bump: None, wave: Wave::Flat }
    }

    pub fn with_wave(mut self, k: f64, phase: f64) -> Self {
        self.wave = Wave::Sin { k, phase };
        self
    }

    pub fn with_bump(mut self, center: f64, width: f64) -> Self {
        self.bump = Some((center, width));
        self
    }

    pub fn eval(&self, c: &CoordJets) -> Jet {
        let mut j = Jet::constant(self.coef);
        if self.rho0_pow != 0.0 {
            j = j * c.rho0.powf(self.rho0_pow);
        }
        if self.rho_i_pow != 0.0 {
            j = j * c.rho_i.powf(self.rho_i_pow);
        }
        if let Some((center, width)) = self.bump {
            let z = (c.rho0 - center) * (1.0 / width);
            j = j * (-(z * z)).exp();
        }
        if let Wave::Sin { k, phase } = self.wave {
            j = j * (c.x1 * k + phase).sin();
        }
        j
    }

    /// Value on scri (terms with positive `ρ_I` power vanish there).
    fn leading(&self, rho0: f64) -> f64 {
        if self.rho_i_pow > 0.0 {
            return 0.0;
        }
        let mut v = self.coef * rho0.powf(self.rho0_pow);
        if let Some((c, w)) = self.bump {
            let z = (rho0 - c) / w;
            v *= (-z * z).exp();
        }
        if let Wave::Sin { k, phase } = self.wave {
            v *= (-k / rho0 + phase).sin();
        }
        v
    }
}

/// Sum-of-terms profile with an overall smallness parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermProfile {
    pub name: String,
    pub eps: f64,
    pub ell0: f64,
    pub ell_i: f64,
    pub terms: Vec<Vec<Term>>,
}

impl TermProfile {
    pub fn zero(name: &str) -> Self {
        TermProfile { name: name.into(), eps: 1.0, ell0: 0.0, ell_i: 0.0, terms: vec![Vec::new(); NAMP] }
    }

    pub fn with(mut self, amp: usize, t: Term) -> Self {
        self.terms[amp].push(t);
        self
    }

    pub fn scaled(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    /// Profile `h11 = sin(x1)`, all other amplitudes zero.
    pub fn h11_sin() -> Self {
        TermProfile::zero("h11_sin").with(4, Term::power(1.0, 0.0, 0.0).with_wave(1.0, 0.0))
    }

    /// A profile conforming to weights `(ℓ0, ℓ_I)`: `π^{CΥ}` and remainder parts carry
    /// `ρ0^{ℓ0} ρ_I^{ℓ_I}`; `h11` and the tracefree part have radiating leading terms.
    pub fn conforming(eps: f64, ell0: f64, ell_i: f64) -> Self {
        Self::conforming_with_remainder(eps, ell0, ell_i, ell_i)
    }

    /// As [`Self::conforming`], with all decaying parts carrying `ρ_I^rem` for some `rem ≥ ℓ_I`.
    pub fn conforming_with_remainder(eps: f64, ell0: f64, ell_i: f64, rem: f64) -> Self {
        let mut p = TermProfile::zero("conforming");
        p.eps = eps;
        p.ell0 = ell0;
        p.ell_i = ell_i;
        let decaying = |c: f64, k: f64, ph: f64| Term::power(c, 1.0 + ell0, rem).with_wave(k, ph);
        for (amp, c, k, ph) in [
            (0, 0.8, 1.3, 0.2),
            (1, -0.6, 0.7, 1.0),
            (2, 0.5, 1.1, -0.4),
            (3, -0.3, 0.9, 0.8),
            (5, 0.4, 1.7, 0.1),
            (6, 0.7, 0.5, -1.2),
            (7, -0.5, 1.2, 0.6),
        ] {
            p.terms[amp].push(decaying(c, k, ph));
        }
        // leading terms on scri plus decaying remainders
        p.terms[4].push(Term::power(0.9, 1.0 + ell0, 0.0).with_wave(1.4, 0.3));
        p.terms[4].push(Term::power(0.3, 1.0 + ell0, rem).with_wave(0.6, 0.0));
        p.terms[8].push(Term::power(1.0, 1.0 + ell0, 0.0).with_wave(1.1, 0.5));
        p.terms[8].push(Term::power(-0.4, 1.0 + ell0, rem).with_wave(0.8, 1.1));
        p.terms[9].push(Term::power(0.6, 1.0 + ell0, 0.0).with_wave(0.9, -0.7));
        p.terms[9].push(Term::power(0.2, 1.0 + ell0, rem).with_wave(1.3, 0.4));
        p
    }
}

impl PerturbationProfile for TermProfile {
    fn amplitudes(&self, c: &CoordJets) -> [Jet; NAMP] {
        let mut out = [Jet::ZERO; NAMP];
        for (k, terms) in self.terms.iter().enumerate() {
            let mut acc = Jet::ZERO;
            for t in terms {
                acc = acc + t.eval(c);
            }
            out[k] = acc.scale(self.eps);
        }
        out
    }

    fn orders(&self) -> (f64, f64) {
        (self.ell0, self.ell_i)
    }

    fn leading(&self, rho0: f64) -> [f64; 3] {
        let lead = |amp: usize| self.eps * self.terms[amp].iter().map(|t| t.leading(rho0)).sum::<f64>();
        [lead(4), lead(8), lead(9)]
    }
}

/// `base + s · direction`, used for directional derivatives of the gauge-fixed operator.
pub struct Shifted<'a> {
    pub base: Option<&'a dyn PerturbationProfile>,
    pub direction: &'a dyn PerturbationProfile,
    pub s: f64,
}

impl PerturbationProfile for Shifted<'_> {
    fn amplitudes(&self, c: &CoordJets) -> [Jet; NAMP] {
        let mut out = match self.base {
            Some(b) => b.amplitudes(c),
            None => [Jet::ZERO; NAMP],
        };
        let d = self.direction.amplitudes(c);
        for k in 0..NAMP {
            out[k] = out[k] + d[k].scale(self.s);
        }
        out
    }
}

/// Constant-amplitude direction `ρ0^p e_k`.
pub struct UnitDirection {
    pub amp: usize,
    pub rho0_pow: f64,
}

impl PerturbationProfile for UnitDirection {
    fn amplitudes(&self, c: &CoordJets) -> [Jet; NAMP] {
        let mut out = [Jet::ZERO; NAMP];
        out[self.amp] = if self.rho0_pow == 0.0 { Jet::constant(1.0) } else { c.rho0.powf(self.rho0_pow) };
        out
    }
}

/// Named profiles available from configuration files.
pub fn named_profile(id: &str, ell0: f64, ell_i: f64) -> Result<TermProfile> {
    match id {
        "zero" => Ok(TermProfile::zero("zero")),
        "h11_sin" => Ok(TermProfile::h11_sin()),
        "conforming" => Ok(TermProfile::conforming(0.05, ell0, ell_i)),
        "conforming_fast" => Ok(TermProfile {
            name: "conforming_fast".into(),
            ..TermProfile::conforming_with_remainder(0.05, ell0, ell_i, 1.0)
        }),
        other => Err(Error::Param(format!("unknown profile '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinate_jets_are_consistent() {
        let p = CompactPoint::new(0.7, 0.3, 0.1).unwrap();
        let c = CoordJets::at(&p);
        assert!((c.rho0.v - p.rho0).abs() < 1e-15);
        assert!((c.rho_i.v - p.rho_i()).abs() < 1e-12 * p.rho_i());
        let f = 1.0 - 2.0 * p.mass / p.r;
        assert!((c.r.d[0] - 0.5 * f).abs() < 1e-14 && (c.r.d[1] + 0.5 * f).abs() < 1e-14);
    }

    #[test]
    fn h11_sin_second_derivative() {
        let p = CompactPoint::new(0.9, 0.2, 0.0).unwrap();
        let j = evaluate(&TermProfile::h11_sin(), &p).unwrap();
        assert!((j[4].h[1][1] + p.x1.sin()).abs() < 1e-14);
        assert!((j[4].d[1] - p.x1.cos()).abs() < 1e-14);
    }
}

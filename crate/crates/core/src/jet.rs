//! Second-order jets in the four spacetime coordinates `(x0, x1, theta, phi)`.
//!
//! A [`Jet`] stores a value together with its gradient and Hessian, so that
//! closed-form test profiles built from elementary functions carry exact first
//! and second derivatives through products and compositions.

use std::ops::{Add, Div, Mul, Neg, Sub};

pub const DIM: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d: [f64; DIM],
    pub h: [[f64; DIM]; DIM],
}

impl Jet {
    pub const ZERO: Jet = Jet::constant(0.0);

    pub const fn constant(v: f64) -> Self {
        Jet { v, d: [0.0; DIM], h: [[0.0; DIM]; DIM] }
    }

    /// The coordinate function `y^i` evaluated at `v`.
    pub fn var(i: usize, v: f64) -> Self {
        let mut j = Jet::constant(v);
        j.d[i] = 1.0;
        j
    }

    /// Composition `f(self)` given `f`, `f'`, `f''` at `self.v`.
    pub fn chain(self, f0: f64, f1: f64, f2: f64) -> Self {
        let mut out = Jet::constant(f0);
        for i in 0..DIM {
            out.d[i] = f1 * self.d[i];
            for k in 0..DIM {
                out.h[i][k] = f1 * self.h[i][k] + f2 * self.d[i] * self.d[k];
            }
        }
        out
    }

    pub fn recip(self) -> Self {
        let x = self.v;
        self.chain(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))
    }

    pub fn powf(self, p: f64) -> Self {
        let x = self.v;
        if p == 0.0 {
            return Jet::constant(1.0);
        }
        self.chain(x.powf(p), p * x.powf(p - 1.0), p * (p - 1.0) * x.powf(p - 2.0))
    }

    pub fn sqrt(self) -> Self {
        self.powf(0.5)
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Self {
        let x = self.v;
        self.chain(x.ln(), 1.0 / x, -1.0 / (x * x))
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn scale(self, a: f64) -> Self {
        let mut out = self;
        out.v *= a;
        for i in 0..DIM {
            out.d[i] *= a;
            for k in 0..DIM {
                out.h[i][k] *= a;
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite()
            && self.d.iter().all(|x| x.is_finite())
            && self.h.iter().flatten().all(|x| x.is_finite())
    }
}

impl Default for Jet {
    fn default() -> Self {
        Jet::ZERO
    }
}

impl From<f64> for Jet {
    fn from(v: f64) -> Self {
        Jet::constant(v)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut out = self;
        out.v += o.v;
        for i in 0..DIM {
            out.d[i] += o.d[i];
            for k in 0..DIM {
                out.h[i][k] += o.h[i][k];
            }
        }
        out
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut out = Jet::constant(self.v * o.v);
        for i in 0..DIM {
            out.d[i] = self.d[i] * o.v + self.v * o.d[i];
            for k in 0..DIM {
                out.h[i][k] = self.h[i][k] * o.v
                    + self.d[i] * o.d[k]
                    + self.d[k] * o.d[i]
                    + self.v * o.h[i][k];
            }
        }
        out
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, c: f64) -> Jet {
        let mut out = self;
        out.v += c;
        out
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, c: f64) -> Jet {
        self + (-c)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, c: f64) -> Jet {
        self.scale(c)
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, c: f64) -> Jet {
        self.scale(1.0 / c)
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, j: Jet) -> Jet {
        j + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, j: Jet) -> Jet {
        (-j) + self
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, j: Jet) -> Jet {
        j.scale(self)
    }
}

impl Div<Jet> for f64 {
    type Output = Jet;
    fn div(self, j: Jet) -> Jet {
        j.recip().scale(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_quotient_rules() {
        // f = x^2 y / (1 + y) at (x, y) = (1.5, 0.7)
        let x = Jet::var(0, 1.5);
        let y = Jet::var(1, 0.7);
        let f = x * x * y / (1.0 + y);
        let (xv, yv) = (1.5f64, 0.7f64);
        let q = yv / (1.0 + yv);
        assert!((f.v - xv * xv * q).abs() < 1e-14);
        assert!((f.d[0] - 2.0 * xv * q).abs() < 1e-14);
        let dq = 1.0 / (1.0 + yv).powi(2);
        assert!((f.d[1] - xv * xv * dq).abs() < 1e-14);
        assert!((f.h[0][1] - 2.0 * xv * dq).abs() < 1e-14);
        assert!((f.h[1][1] + 2.0 * xv * xv / (1.0 + yv).powi(3)).abs() < 1e-13);
    }

    #[test]
    fn elementary_functions() {
        let t = Jet::var(2, 0.4);
        let s = t.sin() * t.sin() + t.cos() * t.cos();
        assert!((s.v - 1.0).abs() < 1e-15);
        assert!(s.d[2].abs() < 1e-15 && s.h[2][2].abs() < 1e-14);
        let e = t.exp().ln();
        assert!((e.v - 0.4).abs() < 1e-15 && (e.d[2] - 1.0).abs() < 1e-15);
        assert!(e.h[2][2].abs() < 1e-14);
        let p = t.powf(1.5);
        assert!((p.h[2][2] - 0.75 / 0.4f64.sqrt()).abs() < 1e-13);
    }
}

//! Second-order jets in two base variables.
//!
//! A [`Jet2`] carries a value together with its first and second partial
//! derivatives with respect to the two surface parameters. Arithmetic
//! propagates all slots through the truncated Taylor rules, so any scalar
//! pipeline evaluated over jets produces exact partials of its result.
//!
//! Order two is enough for everything downstream: the deepest derivative
//! demand is a bracket of a bracket, which consumes second partials of the
//! embedding and produces a plain value.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar arithmetic abstracted over plain reals and jets.
///
/// Domain checks (log of a non-positive number, division by zero, ...) are
/// performed by callers on [`Scalar::value`] before applying the operation;
/// the jet rules themselves assume a valid domain.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(c: f64) -> Self;
    /// The underlying point value (the zeroth-order slot).
    fn value(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn tan(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn tanh(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn powi(self, n: i32) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
}

impl Scalar for f64 {
    fn from_f64(c: f64) -> Self {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn tan(self) -> Self {
        f64::tan(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

/// Truncated second-order Taylor scalar in (u1, u2).
///
/// The mixed partial is stored once; all inputs are C^2 so d12 = d21.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub val: f64,
    pub d1: f64,
    pub d2: f64,
    pub d11: f64,
    pub d12: f64,
    pub d22: f64,
}

impl Jet2 {
    pub const fn constant(c: f64) -> Self {
        Jet2 {
            val: c,
            d1: 0.0,
            d2: 0.0,
            d11: 0.0,
            d12: 0.0,
            d22: 0.0,
        }
    }

    /// Coordinate jet for u1 at value `v`.
    pub const fn seed_u1(v: f64) -> Self {
        Jet2 {
            val: v,
            d1: 1.0,
            d2: 0.0,
            d11: 0.0,
            d12: 0.0,
            d22: 0.0,
        }
    }

    /// Coordinate jet for u2 at value `v`.
    pub const fn seed_u2(v: f64) -> Self {
        Jet2 {
            val: v,
            d1: 0.0,
            d2: 1.0,
            d11: 0.0,
            d12: 0.0,
            d22: 0.0,
        }
    }

    /// Chain rule: `f` composed with this jet, given f, f' and f'' at `val`.
    fn compose(self, f: f64, df: f64, ddf: f64) -> Jet2 {
        Jet2 {
            val: f,
            d1: df * self.d1,
            d2: df * self.d2,
            d11: ddf * self.d1 * self.d1 + df * self.d11,
            d12: ddf * self.d1 * self.d2 + df * self.d12,
            d22: ddf * self.d2 * self.d2 + df * self.d22,
        }
    }

    /// Multiplicative inverse (val must be non-zero).
    pub fn recip(self) -> Jet2 {
        let v = self.val;
        self.compose(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        Jet2 {
            val: self.val + o.val,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
            d11: self.d11 + o.d11,
            d12: self.d12 + o.d12,
            d22: self.d22 + o.d22,
        }
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        Jet2 {
            val: self.val - o.val,
            d1: self.d1 - o.d1,
            d2: self.d2 - o.d2,
            d11: self.d11 - o.d11,
            d12: self.d12 - o.d12,
            d22: self.d22 - o.d22,
        }
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        Jet2 {
            val: self.val * o.val,
            d1: self.d1 * o.val + self.val * o.d1,
            d2: self.d2 * o.val + self.val * o.d2,
            d11: self.d11 * o.val + 2.0 * self.d1 * o.d1 + self.val * o.d11,
            d12: self.d12 * o.val + self.d1 * o.d2 + self.d2 * o.d1 + self.val * o.d12,
            d22: self.d22 * o.val + 2.0 * self.d2 * o.d2 + self.val * o.d22,
        }
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    fn div(self, o: Jet2) -> Jet2 {
        self * o.recip()
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        Jet2 {
            val: -self.val,
            d1: -self.d1,
            d2: -self.d2,
            d11: -self.d11,
            d12: -self.d12,
            d22: -self.d22,
        }
    }
}

impl Scalar for Jet2 {
    fn from_f64(c: f64) -> Self {
        Jet2::constant(c)
    }
    fn value(&self) -> f64 {
        self.val
    }
    fn sin(self) -> Self {
        let (s, c) = self.val.sin_cos();
        self.compose(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.val.sin_cos();
        self.compose(c, -s, -c)
    }
    fn tan(self) -> Self {
        let t = self.val.tan();
        let sec2 = 1.0 + t * t;
        self.compose(t, sec2, 2.0 * t * sec2)
    }
    fn sinh(self) -> Self {
        let (s, c) = (self.val.sinh(), self.val.cosh());
        self.compose(s, c, s)
    }
    fn cosh(self) -> Self {
        let (s, c) = (self.val.sinh(), self.val.cosh());
        self.compose(c, s, c)
    }
    fn tanh(self) -> Self {
        let t = self.val.tanh();
        let sech2 = 1.0 - t * t;
        self.compose(t, sech2, -2.0 * t * sech2)
    }
    fn exp(self) -> Self {
        let e = self.val.exp();
        self.compose(e, e, e)
    }
    fn ln(self) -> Self {
        let v = self.val;
        self.compose(v.ln(), 1.0 / v, -1.0 / (v * v))
    }
    fn sqrt(self) -> Self {
        let r = self.val.sqrt();
        self.compose(r, 0.5 / r, -0.25 / (r * r * r))
    }
    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Jet2::constant(1.0);
        }
        let (mut base, mut e) = if n < 0 {
            (self.recip(), n.unsigned_abs())
        } else {
            (self, n as u32)
        };
        let mut acc = Jet2::constant(1.0);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

/// Evaluate an expression as a jet at the surface point `u`, with u1 and u2
/// bound to coordinate jets and any further names resolved through `extra`.
pub fn eval_jet(
    e: &crate::expr::Expr,
    u: [f64; 2],
    extra: &std::collections::HashMap<String, Jet2>,
) -> Result<Jet2, crate::expr::EvalError> {
    e.eval(&|name: &str| match name {
        "u1" => Some(Jet2::seed_u1(u[0])),
        "u2" => Some(Jet2::seed_u2(u[1])),
        _ => extra.get(name).copied(),
    })
}

//! Truncated Taylor series ("jets") carrying derivatives up to order four.
//!
//! A jet stores normalized Taylor coefficients `c[k] = g^{(k)}(x) / k!` of a
//! function `g` around a fixed point. Arithmetic and the elementary functions
//! below propagate those coefficients exactly (up to rounding), which gives
//! closed-form-quality derivatives of every catalog Bernstein function without
//! hand-written derivative formulas per family.

use std::ops::{Add, Mul, Sub};

pub const ORDER: usize = 4;
const LEN: usize = ORDER + 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    c: [f64; LEN],
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = v;
        Jet { c }
    }

    /// The identity function expanded around `x`.
    pub fn variable(x: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = x;
        c[1] = 1.0;
        Jet { c }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// `k`-th derivative, `k ≤ ORDER`.
    pub fn derivative(&self, k: usize) -> f64 {
        let mut fact = 1.0;
        for i in 2..=k {
            fact *= i as f64;
        }
        self.c[k] * fact
    }

    pub fn scale(self, s: f64) -> Self {
        let mut c = self.c;
        c.iter_mut().for_each(|v| *v *= s);
        Jet { c }
    }

    pub fn exp(self) -> Self {
        let mut b = [0.0; LEN];
        b[0] = self.c[0].exp();
        exp_tail(&self.c, &mut b);
        Jet { c: b }
    }

    /// `e^g − 1`, accurate when `g(x)` is small.
    pub fn exp_m1(self) -> Self {
        let mut b = [0.0; LEN];
        // Recurrence runs on e^g; only the constant term differs.
        b[0] = self.c[0].exp();
        exp_tail(&self.c, &mut b);
        b[0] = self.c[0].exp_m1();
        Jet { c: b }
    }

    pub fn ln(self) -> Self {
        let mut b = [0.0; LEN];
        b[0] = self.c[0].ln();
        ln_tail(&self.c, self.c[0], &mut b);
        Jet { c: b }
    }

    /// `ln(1 + g)`.
    pub fn ln_1p(self) -> Self {
        let mut b = [0.0; LEN];
        b[0] = self.c[0].ln_1p();
        ln_tail(&self.c, 1.0 + self.c[0], &mut b);
        Jet { c: b }
    }

    /// `g^p` for `g(x) > 0`.
    pub fn powf(self, p: f64) -> Self {
        let a = &self.c;
        let mut b = [0.0; LEN];
        b[0] = a[0].powf(p);
        for k in 1..LEN {
            let mut s = 0.0;
            for j in 1..=k {
                s += ((p + 1.0) * j as f64 - k as f64) * a[j] * b[k - j];
            }
            b[k] = s / (k as f64 * a[0]);
        }
        Jet { c: b }
    }
}

fn exp_tail(a: &[f64; LEN], b: &mut [f64; LEN]) {
    for k in 1..LEN {
        let mut s = 0.0;
        for j in 1..=k {
            s += j as f64 * a[j] * b[k - j];
        }
        b[k] = s / k as f64;
    }
}

// Coefficients of ln(u) where u has coefficients `a` except the constant term
// is replaced by `u0`.
fn ln_tail(a: &[f64; LEN], u0: f64, b: &mut [f64; LEN]) {
    for k in 1..LEN {
        let mut s = 0.0;
        for j in 1..k {
            s += j as f64 * b[j] * a[k - j];
        }
        b[k] = (a[k] - s / k as f64) / u0;
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let mut c = self.c;
        for (x, y) in c.iter_mut().zip(rhs.c) {
            *x += y;
        }
        Jet { c }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        let mut c = self.c;
        for (x, y) in c.iter_mut().zip(rhs.c) {
            *x -= y;
        }
        Jet { c }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut c = [0.0; LEN];
        for (k, ck) in c.iter_mut().enumerate() {
            *ck = (0..=k).map(|j| self.c[j] * rhs.c[k - j]).sum();
        }
        Jet { c }
    }
}

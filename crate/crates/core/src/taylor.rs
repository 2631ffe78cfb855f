//! Truncated Taylor series ("jets") with complex coefficients.
//!
//! A [`Taylor`] of order `N` about `x0` stores `c[n] = f^(n)(x0) / n!` for
//! `n = 0..=N`. Binary operations truncate to the smaller order. Every
//! derivative used by the crate flows through this type, so no finite
//! differences appear on the main path.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

/// Minimal arithmetic surface shared by plain complex numbers and jets, so
/// closed-form expressions can be written once and evaluated either way.
pub trait Field:
    Clone
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// A constant with the same shape as `self`.
    fn constant_like(&self, c: C64) -> Self;
    /// Leading value (the function value for a jet).
    fn lead(&self) -> C64;
    fn scale(&self, c: C64) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;

    fn powc(&self, p: C64) -> Self {
        self.ln().scale(p).exp()
    }

    fn powf(&self, p: f64) -> Self {
        self.powc(C64::new(p, 0.0))
    }

    fn sqrt(&self) -> Self {
        self.powf(0.5)
    }

    fn add_c(&self, c: C64) -> Self {
        self.clone() + self.constant_like(c)
    }

    fn add_f(&self, c: f64) -> Self {
        self.add_c(C64::new(c, 0.0))
    }

    fn scale_f(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    fn powi(&self, n: u32) -> Self {
        let mut acc = self.constant_like(C64::new(1.0, 0.0));
        for _ in 0..n {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Field for C64 {
    fn constant_like(&self, c: C64) -> Self {
        c
    }
    fn lead(&self) -> C64 {
        *self
    }
    fn scale(&self, c: C64) -> Self {
        self * c
    }
    fn exp(&self) -> Self {
        C64::exp(*self)
    }
    fn ln(&self) -> Self {
        C64::ln(*self)
    }
    fn powc(&self, p: C64) -> Self {
        if *self == C64::new(0.0, 0.0) {
            return if p.re > 0.0 { C64::new(0.0, 0.0) } else { C64::new(f64::INFINITY, 0.0) };
        }
        C64::powc(*self, p)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Taylor {
    c: Vec<C64>,
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

impl Taylor {
    pub fn from_coeffs(c: Vec<C64>) -> Self {
        assert!(!c.is_empty(), "a jet needs at least one coefficient");
        Self { c }
    }

    pub fn zeros(order: usize) -> Self {
        Self { c: vec![C64::new(0.0, 0.0); order + 1] }
    }

    pub fn constant(v: C64, order: usize) -> Self {
        let mut t = Self::zeros(order);
        t.c[0] = v;
        t
    }

    /// The identity map `x0 + h`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut t = Self::constant(C64::new(x0, 0.0), order);
        if order >= 1 {
            t.c[1] = C64::new(1.0, 0.0);
        }
        t
    }

    /// Build from derivative values `f, f', f'', ...`.
    pub fn from_derivatives(d: &[C64]) -> Self {
        Self::from_coeffs(d.iter().enumerate().map(|(n, v)| v / factorial(n)).collect())
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.c
    }

    pub fn coeff(&self, n: usize) -> C64 {
        self.c[n]
    }

    pub fn value(&self) -> C64 {
        self.c[0]
    }

    /// `f^(n)(x0)`.
    pub fn derivative(&self, n: usize) -> C64 {
        self.c[n] * factorial(n)
    }

    pub fn derivatives(&self) -> Vec<C64> {
        (0..=self.order()).map(|n| self.derivative(n)).collect()
    }

    /// Series of `f'`; order drops by one.
    pub fn d(&self) -> Taylor {
        if self.order() == 0 {
            return Taylor::zeros(0);
        }
        Taylor::from_coeffs((1..=self.order()).map(|n| self.c[n] * n as f64).collect())
    }

    pub fn truncate(&self, order: usize) -> Taylor {
        assert!(order <= self.order(), "cannot extend a jet by truncation");
        Taylor::from_coeffs(self.c[..=order].to_vec())
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Largest coefficient magnitude.
    pub fn norm_inf(&self) -> f64 {
        self.c.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `self(inner(h))` as a jet in h, where `self` is expanded about the
    /// value of `inner`; the order is that of `inner`.
    pub fn compose(&self, inner: &Taylor) -> Taylor {
        let order = inner.order();
        let shift = inner.clone() + (-inner.value());
        let top = self.order().min(order);
        let mut acc = Taylor::constant(self.c[top], order);
        for n in (0..top).rev() {
            acc = &acc * &shift + self.c[n];
        }
        acc
    }

    pub fn recip(&self) -> Taylor {
        Taylor::constant(C64::new(1.0, 0.0), self.order()) / self.clone()
    }

    fn mul_ref(&self, o: &Taylor) -> Taylor {
        let n = self.order().min(o.order());
        let mut out = vec![C64::new(0.0, 0.0); n + 1];
        for (i, a) in self.c.iter().take(n + 1).enumerate() {
            for (j, b) in o.c.iter().take(n + 1 - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        Taylor::from_coeffs(out)
    }

    fn div_ref(&self, o: &Taylor) -> Taylor {
        let n = self.order().min(o.order());
        let b0 = o.c[0];
        let mut q = vec![C64::new(0.0, 0.0); n + 1];
        for k in 0..=n {
            let mut acc = self.c[k];
            for j in 1..=k {
                acc -= o.c[j] * q[k - j];
            }
            q[k] = acc / b0;
        }
        Taylor::from_coeffs(q)
    }
}

impl Field for Taylor {
    fn constant_like(&self, c: C64) -> Self {
        Taylor::constant(c, self.order())
    }
    fn lead(&self) -> C64 {
        self.c[0]
    }
    fn scale(&self, s: C64) -> Self {
        Taylor::from_coeffs(self.c.iter().map(|v| v * s).collect())
    }
    fn exp(&self) -> Self {
        let n = self.order();
        let mut e = vec![C64::new(0.0, 0.0); n + 1];
        e[0] = self.c[0].exp();
        for k in 1..=n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 1..=k {
                acc += self.c[j] * e[k - j] * j as f64;
            }
            e[k] = acc / k as f64;
        }
        Taylor::from_coeffs(e)
    }
    fn ln(&self) -> Self {
        let n = self.order();
        let a0 = self.c[0];
        let mut l = vec![C64::new(0.0, 0.0); n + 1];
        l[0] = a0.ln();
        for k in 1..=n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 1..k {
                acc += l[j] * self.c[k - j] * j as f64;
            }
            l[k] = (self.c[k] - acc / k as f64) / a0;
        }
        Taylor::from_coeffs(l)
    }
}

/// A jet written as `v^power * reduced` in its expansion variable v, so that
/// a power-law factor with a large exponent is carried exactly instead of
/// inside the coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Gauged {
    pub power: f64,
    pub reduced: Taylor,
}

impl Gauged {
    pub fn plain(t: Taylor) -> Self {
        Self { power: 0.0, reduced: t }
    }

    /// The same function with the power factor lowered to `power`; the
    /// difference moves into the jet.
    pub fn regauge(&self, x0: f64, power: f64) -> Taylor {
        let shift = self.power - power;
        if shift == 0.0 {
            return self.reduced.clone();
        }
        Taylor::variable(x0, self.reduced.order()).powf(shift) * self.reduced.clone()
    }

    pub fn to_taylor(&self, x0: f64) -> Taylor {
        self.regauge(x0, 0.0)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<Taylor> for Taylor {
            type Output = Taylor;
            fn $m(self, o: Taylor) -> Taylor {
                let f: fn(&Taylor, &Taylor) -> Taylor = $body;
                f(&self, &o)
            }
        }
        impl<'a> $tr<&'a Taylor> for &'a Taylor {
            type Output = Taylor;
            fn $m(self, o: &'a Taylor) -> Taylor {
                let f: fn(&Taylor, &Taylor) -> Taylor = $body;
                f(self, o)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| {
    let n = a.order().min(b.order());
    Taylor::from_coeffs((0..=n).map(|i| a.c[i] + b.c[i]).collect())
});
forward_binop!(Sub, sub, |a, b| {
    let n = a.order().min(b.order());
    Taylor::from_coeffs((0..=n).map(|i| a.c[i] - b.c[i]).collect())
});
forward_binop!(Mul, mul, |a, b| a.mul_ref(b));
forward_binop!(Div, div, |a, b| a.div_ref(b));

impl Neg for Taylor {
    type Output = Taylor;
    fn neg(self) -> Taylor {
        Taylor::from_coeffs(self.c.into_iter().map(|v| -v).collect())
    }
}

impl Mul<C64> for Taylor {
    type Output = Taylor;
    fn mul(self, s: C64) -> Taylor {
        self.scale(s)
    }
}

impl Mul<f64> for Taylor {
    type Output = Taylor;
    fn mul(self, s: f64) -> Taylor {
        Taylor::from_coeffs(self.c.into_iter().map(|v| v * s).collect())
    }
}

impl Add<C64> for Taylor {
    type Output = Taylor;
    fn add(mut self, s: C64) -> Taylor {
        self.c[0] += s;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn exp_of_variable_matches_shifted_exponential() {
        let x0 = 0.7;
        let e = Taylor::variable(x0, 8).exp();
        for n in 0..=8 {
            assert!((e.derivative(n) - c(x0.exp())).norm() < 1e-13 * x0.exp());
        }
    }

    #[test]
    fn ln_inverts_exp() {
        let t = Taylor::from_coeffs(vec![C64::new(0.3, 0.2), c(1.1), c(-0.4), C64::new(0.05, 1.0)]);
        let back = t.exp().ln();
        for (a, b) in t.coeffs().iter().zip(back.coeffs()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn division_undoes_multiplication() {
        let a = Taylor::from_coeffs(vec![c(1.0), c(2.0), C64::new(0.0, 3.0), c(-1.0)]);
        let b = Taylor::from_coeffs(vec![c(2.0), c(-1.0), c(0.5), c(0.25)]);
        let q = (&a * &b) / b.clone();
        for (x, y) in a.coeffs().iter().zip(q.coeffs()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn power_of_variable_gives_binomial_derivatives() {
        let x0: f64 = 2.0;
        let p = Taylor::variable(x0, 3).powf(1.5);
        assert!((p.derivative(0).re - x0.powf(1.5)).abs() < 1e-14);
        assert!((p.derivative(1).re - 1.5 * x0.powf(0.5)).abs() < 1e-14);
        assert!((p.derivative(2).re - 0.75 * x0.powf(-0.5)).abs() < 1e-14);
        assert!((p.derivative(3).re + 0.375 * x0.powf(-1.5)).abs() < 1e-14);
    }

    #[test]
    fn derivative_series_shifts_coefficients() {
        let t = Taylor::from_derivatives(&[c(1.0), c(2.0), c(6.0), c(24.0)]);
        let d = t.d();
        assert_eq!(d.order(), 2);
        assert!((d.derivative(0) - c(2.0)).norm() < 1e-15);
        assert!((d.derivative(2) - c(24.0)).norm() < 1e-13);
    }

    #[test]
    fn composing_with_a_square_matches_the_direct_jet() {
        let (t0, x0) = (1.69, 1.3);
        let outer = Taylor::variable(t0, 5).exp();
        let x = Taylor::variable(x0, 5);
        let got = outer.compose(&(&x * &x));
        let want = (&x * &x).exp();
        for n in 0..=5 {
            assert!((got.coeff(n) - want.coeff(n)).norm() < 1e-12 * want.coeff(0).norm(), "n={n}");
        }
    }

    #[test]
    fn regauging_moves_the_power_into_the_jet() {
        let x0 = 0.7;
        let r = Taylor::variable(x0, 4).exp();
        let g = Gauged { power: -2.5, reduced: r.clone() };
        let plain = g.to_taylor(x0);
        let want = &Taylor::variable(x0, 4).powf(-2.5) * &r;
        let shifted = Gauged { power: -3.0, reduced: g.regauge(x0, -3.0) }.to_taylor(x0);
        for n in 0..=4 {
            assert!((plain.coeff(n) - want.coeff(n)).norm() < 1e-12 * want.coeff(n).norm().max(1.0));
            assert!((shifted.coeff(n) - want.coeff(n)).norm() < 1e-12 * want.coeff(n).norm().max(1.0));
        }
    }
}

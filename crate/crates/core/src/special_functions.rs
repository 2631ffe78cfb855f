//! Complex special functions: Kummer's 1F1, log-gamma, Hermite and Laguerre
//! polynomials, and the modified Bessel function I_mu.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::taylor::Field;

pub type ComplexValue = C64;

/// Hard cap on series terms.
pub const TERM_CAP: usize = 500;
const SERIES_EPS: f64 = 1e-16;

/// Neumaier compensated summation on both components.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: C64,
    comp: C64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: C64) {
        let (s_re, c_re) = two_sum(self.sum.re, v.re);
        let (s_im, c_im) = two_sum(self.sum.im, v.im);
        self.sum = C64::new(s_re, s_im);
        self.comp += C64::new(c_re, c_im);
    }

    pub fn value(&self) -> C64 {
        self.sum + self.comp
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = if a.abs() >= b.abs() { (a - s) + b } else { (b - s) + a };
    (s, err)
}

fn as_nonpositive_integer(z: C64) -> Option<i64> {
    if z.im != 0.0 {
        return None;
    }
    let r = z.re.round();
    if r <= 0.0 && (z.re - r).abs() <= 1e-14 * r.abs().max(1.0) {
        Some(r as i64)
    } else {
        None
    }
}

/// Kummer's confluent hypergeometric function 1F1(a; b; x).
///
/// For `Re x < 0` the Kummer transformation `e^x 1F1(b-a; b; -x)` is used
/// unless `a` is a non-positive integer, in which case the terminating sum
/// is evaluated directly.
pub fn kummer_1f1(a: C64, b: C64, x: C64) -> Result<C64> {
    let a_poly = as_nonpositive_integer(a);
    if let Some(bm) = as_nonpositive_integer(b) {
        match a_poly {
            Some(an) if an.abs() < bm.abs() => {}
            _ => return Err(Error::ParameterPole { b: format!("{b}") }),
        }
    }
    if x == C64::new(0.0, 0.0) {
        return Ok(C64::new(1.0, 0.0));
    }
    if a_poly.is_none() && x.re < 0.0 {
        return Ok(x.exp() * series_1f1(b - a, b, -x)?);
    }
    series_1f1(a, b, x)
}

fn series_1f1(a: C64, b: C64, x: C64) -> Result<C64> {
    let mut sum = CompensatedSum::new();
    let mut term = C64::new(1.0, 0.0);
    sum.add(term);
    let mut small = 0;
    for n in 0..TERM_CAP {
        let an = a + n as f64;
        if an == C64::new(0.0, 0.0) {
            return Ok(sum.value());
        }
        term *= an / (b + n as f64) * x / (n as f64 + 1.0);
        sum.add(term);
        let ratio = term.norm() / sum.value().norm().max(f64::MIN_POSITIVE);
        // keep going while terms still grow; stop after two tiny terms in a row
        if ratio < SERIES_EPS && (an.norm() * x.norm()) < (b + n as f64).norm() * (n as f64 + 1.0) {
            small += 1;
            if small >= 2 {
                return Ok(sum.value());
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NoConvergence { terms: TERM_CAP })
}

/// d/dx 1F1(a; b; x) = (a/b) 1F1(a+1; b+1; x).
pub fn kummer_1f1_dx(a: C64, b: C64, x: C64) -> Result<C64> {
    if a == C64::new(0.0, 0.0) {
        return Ok(C64::new(0.0, 0.0));
    }
    if let Some(bm) = as_nonpositive_integer(b) {
        // b+1 may leave the forbidden set while b itself is a legal polynomial case
        match as_nonpositive_integer(a) {
            Some(an) if an.abs() < bm.abs() => {}
            _ => return Err(Error::ParameterPole { b: format!("{b}") }),
        }
    }
    Ok(a / b * kummer_1f1(a + 1.0, b + 1.0, x)?)
}

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
// B_{2k} / (2k (2k-1)) for k = 1..=10
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

/// ln Gamma(z) continued analytically from the positive real axis (the
/// branch that agrees with the sum of principal logs in the recurrence).
pub fn log_gamma(z: C64) -> Result<C64> {
    if as_nonpositive_integer(z).is_some() {
        return Err(Error::GammaPole { z: format!("{z}") });
    }
    if z.re < 0.5 {
        // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        let pi = std::f64::consts::PI;
        let s = (z * pi).sin();
        return Ok(C64::new(pi.ln(), 0.0) - s.ln() - log_gamma(C64::new(1.0, 0.0) - z)?);
    }
    // one log of the product instead of a sum of logs; the imaginary part is
    // moved onto the branch given by the summed arguments
    let mut w = z;
    let mut prod = C64::new(1.0, 0.0);
    let mut arg_sum = 0.0;
    while w.norm() < 16.0 || w.re < 8.0 {
        prod *= w;
        arg_sum += w.arg();
        w += 1.0;
    }
    let mut shift = prod.ln();
    let turns = ((arg_sum - shift.im) / std::f64::consts::TAU).round();
    shift.im += turns * std::f64::consts::TAU;
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = C64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        series += p * c;
        p *= inv2;
    }
    Ok((w - 0.5) * w.ln() - w + LN_SQRT_2PI + series - shift)
}

pub fn gamma(z: C64) -> Result<C64> {
    Ok(log_gamma(z)?.exp())
}

/// 1/Gamma(z), zero at the poles of Gamma.
pub fn rgamma(z: C64) -> C64 {
    match log_gamma(z) {
        Ok(l) => (-l).exp(),
        Err(_) => C64::new(0.0, 0.0),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolyKind {
    Hermite,
    Laguerre,
}

/// Physicists' Hermite H_n(x) or associated Laguerre L_n^alpha(x) by
/// three-term recurrence. `alpha` is ignored for Hermite.
pub fn classical_polys(kind: PolyKind, n: usize, alpha: f64, x: C64) -> C64 {
    match kind {
        PolyKind::Hermite => hermite(n, &x),
        PolyKind::Laguerre => laguerre(n, alpha, &x),
    }
}

pub fn hermite<F: Field>(n: usize, x: &F) -> F {
    let one = x.constant_like(C64::new(1.0, 0.0));
    if n == 0 {
        return one;
    }
    let mut prev = one;
    let mut cur = x.scale_f(2.0);
    for m in 1..n {
        let next = x.clone() * cur.clone().scale_f(2.0) - prev.scale_f(2.0 * m as f64);
        prev = cur;
        cur = next;
    }
    cur
}

pub fn laguerre<F: Field>(n: usize, alpha: f64, x: &F) -> F {
    let one = x.constant_like(C64::new(1.0, 0.0));
    if n == 0 {
        return one;
    }
    let mut prev = one;
    let mut cur = -x.clone() + x.constant_like(C64::new(1.0 + alpha, 0.0));
    for m in 1..n {
        let mf = m as f64;
        let lin = -x.clone() + x.constant_like(C64::new(2.0 * mf + 1.0 + alpha, 0.0));
        let next = (lin * cur.clone() - prev.scale_f(mf + alpha)).scale_f(1.0 / (mf + 1.0));
        prev = cur;
        cur = next;
    }
    cur
}

/// Modified Bessel function of the first kind, ascending series.
pub fn bessel_i(mu: f64, x: C64) -> Result<C64> {
    if x.norm() > 60.0 {
        return Err(Error::Domain(format!("|x| = {} outside the series regime", x.norm())));
    }
    bessel_i_generic(mu, &x)
}

/// I_mu evaluated on any [`Field`] (plain values or jets).
pub fn bessel_i_generic<F: Field>(mu: f64, x: &F) -> Result<F> {
    // I_{-n} = I_n for integer order
    let mu = if mu < 0.0 && mu == mu.round() { -mu } else { mu };
    let x0 = x.lead();
    if x0 == C64::new(0.0, 0.0) {
        let v = if mu == 0.0 { 1.0 } else if mu > 0.0 { 0.0 } else { f64::INFINITY };
        return Ok(x.constant_like(C64::new(v, 0.0)));
    }
    let q0 = x0 * x0 / 4.0;
    // coefficients c_k = 1 / (k! Gamma(mu + k + 1)), truncated where the
    // leading-value terms become negligible
    let mut coeffs = Vec::new();
    let mut c = rgamma(C64::new(mu + 1.0, 0.0));
    let mut sum = CompensatedSum::new();
    let mut pw = C64::new(1.0, 0.0);
    let mut converged = false;
    for k in 0..TERM_CAP {
        coeffs.push(c);
        let t = c * pw;
        sum.add(t);
        if k > 2 && t.norm() < SERIES_EPS * sum.value().norm() && (k as f64) > q0.norm().sqrt() {
            converged = true;
            break;
        }
        pw *= q0;
        c /= (k as f64 + 1.0) * (mu + k as f64 + 1.0);
    }
    if !converged {
        return Err(Error::NoConvergence { terms: TERM_CAP });
    }
    let q = x.clone() * x.clone() * x.constant_like(C64::new(0.25, 0.0));
    let mut acc = x.constant_like(C64::new(0.0, 0.0));
    for c in coeffs.iter().rev() {
        acc = acc * q.clone() + x.constant_like(*c);
    }
    let pre = if mu == 0.0 {
        x.constant_like(C64::new(1.0, 0.0))
    } else {
        x.scale_f(0.5).powf(mu)
    };
    Ok(pre * acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn kummer_trivial_cases() {
        assert_eq!(kummer_1f1(c(0.3), c(1.7), c(0.0)).unwrap(), c(1.0));
        let x = c(2.5);
        assert!(rel(kummer_1f1(c(1.0), c(1.0), x).unwrap(), x.exp()) < 1e-12);
        for xv in [0.3, -2.0, 7.5] {
            let got = kummer_1f1(c(-1.0), c(1.5), c(xv)).unwrap();
            assert!(rel(got, c(1.0 - 2.0 * xv / 3.0)) < 1e-14);
        }
    }

    #[test]
    fn kummer_parameter_pole() {
        assert!(matches!(kummer_1f1(c(0.5), c(-2.0), c(1.0)), Err(Error::ParameterPole { .. })));
        // terminating numerator of smaller degree is allowed
        let v = kummer_1f1(c(-1.0), c(-2.0), c(3.0)).unwrap();
        assert!(rel(v, c(1.0 - 3.0 / -2.0)) < 1e-14);
    }

    #[test]
    fn kummer_derivative_at_origin_is_a_over_b() {
        let (a, b) = (C64::new(0.3, -0.2), C64::new(1.7, 0.4));
        let d = kummer_1f1_dx(a, b, c(0.0)).unwrap();
        assert!(rel(d, a / b) < 1e-15);
        let e = kummer_1f1_dx(c(1.0), c(1.0), c(1.2)).unwrap();
        assert!(rel(e, c(1.2f64.exp())) < 1e-13);
    }

    #[test]
    fn kummer_derivative_matches_fourth_order_differences() {
        let (a, b) = (C64::new(-0.7, 0.3), c(1.5));
        let x = 1.3;
        let exact = kummer_1f1_dx(a, b, c(x)).unwrap();
        let f = |t: f64| kummer_1f1(a, b, c(t)).unwrap();
        for h in [1e-1, 3e-2, 1e-2] {
            let fd = (f(x - 2.0 * h) - f(x + 2.0 * h) + (f(x + h) - f(x - h)) * 8.0) / (12.0 * h);
            assert!(rel(fd, exact) < 1e-8 * (h / 1e-2).powi(4).max(1.0), "h={h}");
        }
    }

    #[test]
    fn log_gamma_known_values() {
        let half = log_gamma(c(0.5)).unwrap();
        let err = (half - c(std::f64::consts::PI.sqrt().ln())).norm();
        assert!(err < 1e-15, "err={err:e}");
        let five = log_gamma(c(5.0)).unwrap();
        assert!(rel(five, c(24f64.ln())) < 1e-14);
        assert!(matches!(log_gamma(c(-3.0)), Err(Error::GammaPole { .. })));
        assert_eq!(rgamma(c(-2.0)), c(0.0));
    }

    #[test]
    fn gamma_recurrence_in_the_complex_plane() {
        for z in [C64::new(0.3, 2.0), C64::new(-2.7, 0.4), C64::new(5.5, -7.0)] {
            let lhs = gamma(z + 1.0).unwrap();
            let rhs = z * gamma(z).unwrap();
            assert!(rel(lhs, rhs) < 1e-13, "z={z}");
        }
    }

    #[test]
    fn polynomial_bases() {
        assert_eq!(classical_polys(PolyKind::Hermite, 0, 0.0, c(3.3)), c(1.0));
        let x = C64::new(0.4, 0.1);
        let l1 = classical_polys(PolyKind::Laguerre, 1, 0.7, x);
        assert!(rel(l1, c(1.7) - x) < 1e-15);
        let h3 = classical_polys(PolyKind::Hermite, 3, 0.0, c(1.5));
        assert!(rel(h3, c(8.0 * 3.375 - 12.0 * 1.5)) < 1e-15);
    }

    #[test]
    fn bessel_origin() {
        assert_eq!(bessel_i(0.0, c(0.0)).unwrap(), c(1.0));
        assert_eq!(bessel_i(1.0, c(0.0)).unwrap(), c(0.0));
    }

    #[test]
    fn bessel_wronskian_like_recurrence() {
        // I_{mu-1} - I_{mu+1} = (2 mu / x) I_mu
        let x = C64::new(2.2, 0.7);
        for mu in [0.5, 1.0, 2.3] {
            let lhs = bessel_i(mu - 1.0, x).unwrap() - bessel_i(mu + 1.0, x).unwrap();
            let rhs = bessel_i(mu, x).unwrap() * 2.0 * mu / x;
            assert!(rel(lhs, rhs) < 1e-12, "mu={mu}");
        }
    }
}

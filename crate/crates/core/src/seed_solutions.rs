//! Solutions of the radial-oscillator Schrodinger equation
//! `-u''/2 + V0 u = eps u`, `V0 = x^2/8 + l(l+1)/(2x^2)`.
//!
//! Every solution only has to provide `(u, u')` at a point; higher
//! derivatives come from the ODE itself (see [`closure_taylor`]).

use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special_functions::{kummer_1f1, kummer_1f1_dx, laguerre, log_gamma, rgamma};
use crate::taylor::{Field, Gauged, Taylor};

/// Default x-scan grid: geometric on [1e-2, 8], 400 points.
pub const X_SCAN: (f64, f64, usize) = (1e-2, 8.0, 400);

/// Sample points used by identically-zero tests.
pub const ZERO_PROBES: [f64; 8] = [0.6, 0.9, 1.3, 1.8, 2.4, 3.0, 3.7, 4.4];
const ZERO_TOL: f64 = 1e-10;

pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let r = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(|i| if i == n - 1 { hi } else { lo * (r * i as f64).exp() }).collect()
}

pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(hi > lo && n >= 2);
    let h = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| if i == n - 1 { hi } else { lo + h * i as f64 }).collect()
}

/// Ground-state energy E0 = l/2 + 3/4.
pub fn e0(ell: f64) -> f64 {
    ell / 2.0 + 0.75
}

pub fn v0(ell: f64, x: f64) -> f64 {
    x * x / 8.0 + ell * (ell + 1.0) / (2.0 * x * x)
}

/// Taylor coefficients of V0 about `x0`, exact term by term.
pub fn v0_taylor(ell: f64, x0: f64, order: usize) -> Vec<f64> {
    v0_taylor_centrifugal(ell * (ell + 1.0), x0, order)
}

/// As [`v0_taylor`] with the centrifugal constant `big_l = l(l+1)` given.
pub fn v0_taylor_centrifugal(big_l: f64, x0: f64, order: usize) -> Vec<f64> {
    let cent = big_l / 2.0;
    (0..=order)
        .map(|j| {
            let harmonic = match j {
                0 => x0 * x0 / 8.0,
                1 => x0 / 4.0,
                2 => 1.0 / 8.0,
                _ => 0.0,
            };
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            harmonic + cent * sign * (j as f64 + 1.0) / x0.powi(j as i32 + 2)
        })
        .collect()
}

/// Taylor series of a solution at `x0` from `(u, u')` and the ODE.
pub fn closure_taylor(ell: f64, eps: C64, x0: f64, u: C64, du: C64, order: usize) -> Taylor {
    gauged_closure_taylor(ell, eps, 0.0, x0, u, du, order)
}

/// Taylor series of `R = x^{-p} u` at `x0` from `(R, R')`, using
/// `R'' = -2p R'/x + (x^2/4 - 2 eps + (l(l+1) - p(p-1))/x^2) R`.
pub fn gauged_closure_taylor(ell: f64, eps: C64, p: f64, x0: f64, r: C64, dr: C64, order: usize) -> Taylor {
    let cent = ell * (ell + 1.0) - p * (p - 1.0);
    let sign = |j: usize| if j % 2 == 0 { 1.0 } else { -1.0 };
    let a: Vec<f64> = (0..=order).map(|j| -2.0 * p * sign(j) / x0.powi(j as i32 + 1)).collect();
    let q: Vec<C64> = (0..=order)
        .map(|j| {
            let harmonic = match j {
                0 => x0 * x0 / 4.0,
                1 => x0 / 2.0,
                2 => 0.25,
                _ => 0.0,
            };
            let inv2 = if cent == 0.0 { 0.0 } else { cent * sign(j) * (j as f64 + 1.0) / x0.powi(j as i32 + 2) };
            let shift = if j == 0 { eps * 2.0 } else { C64::new(0.0, 0.0) };
            C64::new(harmonic + inv2, 0.0) - shift
        })
        .collect();
    let mut c = vec![C64::new(0.0, 0.0); order + 1];
    c[0] = r;
    if order >= 1 {
        c[1] = dr;
    }
    for n in 0..order.saturating_sub(1) {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..=n {
            acc += c[n - j + 1] * (a[j] * (n - j + 1) as f64) + c[n - j] * q[j];
        }
        c[n + 2] = acc / ((n + 2) as f64 * (n + 1) as f64);
    }
    Taylor::from_coeffs(c)
}

/// Apply `b+` (`raise`) or `b-` to a jet of a function at `x0`; the result
/// has order two less than the input.
///
/// `b± = (d^2 ∓ x d + x^2/4 - l(l+1)/x^2 ∓ 1/2) / 2`.
pub fn apply_b_taylor(raise: bool, ell: f64, f: &Taylor, x0: f64) -> Taylor {
    apply_b_gauged(raise, ell, 0.0, f, x0)
}

/// `x^{-p} b± (x^p R)` from a jet of R.
pub fn apply_b_gauged(raise: bool, ell: f64, p: f64, f: &Taylor, x0: f64) -> Taylor {
    let order = f.order() - 2;
    let s = if raise { 1.0 } else { -1.0 };
    let x = Taylor::variable(x0, order);
    let inv = x.recip();
    let c = |v: f64| Taylor::constant(C64::new(v, 0.0), order);
    let q = &(&x * &x) * &c(0.25) + &(&inv * &inv) * &c(p * (p - 1.0) - ell * (ell + 1.0))
        + C64::new(-s * (0.5 + p), 0.0);
    let d1 = f.d();
    let d2 = d1.d();
    let drift = &(&inv * &c(2.0 * p)) - &(&x * &c(s));
    let out = d2 + &drift * &d1.truncate(order) + &q * &f.truncate(order);
    out * 0.5
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    RealPhysical,
    ComplexOverReal,
    FullyComplex,
}

/// Mixing parameter of the second branch (scaled by a Gamma ratio).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Nu {
    Finite(f64),
    Infinite,
}

impl FromStr for Nu {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(Nu::Infinite);
        }
        t.parse::<f64>()
            .map(Nu::Finite)
            .map_err(|_| Error::InvalidSpec(format!("cannot parse nu from {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub ell: f64,
    pub eps1: C64,
    /// Coefficients of the two 1F1 branches.
    pub mixture: (C64, C64),
    pub k: usize,
    pub mode: Mode,
}

pub fn is_half_odd(ell: f64) -> bool {
    let t = ell - 0.5;
    (t - t.round()).abs() < 1e-12
}

impl SeedSpec {
    /// Real seed parametrised by nu; validated in real-physical mode.
    pub fn real(ell: f64, eps1: f64, nu: Nu, k: usize) -> Result<Self> {
        let eps = C64::new(eps1, 0.0);
        let spec = Self { ell, eps1: eps, mixture: nu_to_mixture(nu, ell, eps)?, k, mode: Mode::RealPhysical };
        spec.validate()?;
        Ok(spec)
    }

    /// Arbitrary complex mixture `(1, lambda + i kappa)` style input; the mode
    /// follows from whether `eps1` is real.
    pub fn with_mixture(ell: f64, eps1: C64, mixture: (C64, C64), k: usize) -> Result<Self> {
        let mode = if eps1.im == 0.0 { Mode::ComplexOverReal } else { Mode::FullyComplex };
        let spec = Self { ell, eps1, mixture, k, mode };
        spec.validate()?;
        Ok(spec)
    }

    /// Same as [`SeedSpec::real`] without the physical-mode restrictions.
    pub fn unchecked_nu(ell: f64, eps1: C64, nu: Nu, k: usize) -> Result<Self> {
        let mixture = nu_to_mixture(nu, ell, eps1)?;
        Self::with_mixture(ell, eps1, mixture, k)
    }

    pub fn e0(&self) -> f64 {
        e0(self.ell)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidSpec("k must be at least 1".into()));
        }
        if self.ell < -0.5 {
            return Err(Error::InvalidSpec(format!("l = {} below -1/2", self.ell)));
        }
        let (m1, m2) = self.mixture;
        if m1 == C64::new(0.0, 0.0) && m2 == C64::new(0.0, 0.0) {
            return Err(Error::InvalidSpec("both mixture coefficients vanish".into()));
        }
        if is_half_odd(self.ell) && m1 != C64::new(0.0, 0.0) && m2 != C64::new(0.0, 0.0) {
            return Err(Error::BranchDegeneracy { ell: self.ell });
        }
        if self.mode != Mode::RealPhysical {
            return Ok(());
        }
        if self.eps1.im != 0.0 || m1.im != 0.0 || m2.im != 0.0 {
            return Err(Error::InvalidSpec("real-physical mode needs real energy and mixture".into()));
        }
        let eps = self.eps1.re;
        if eps >= self.e0() {
            return Err(Error::InvalidSpec(format!("eps1 = {eps} is not below E0 = {}", self.e0())));
        }
        if m1.re != 0.0 {
            let ratio = gamma_ratio(self.ell, self.eps1)?;
            let nu = (m2 / m1 / ratio).re;
            let bound = nu_lower_bound(self.ell, eps)?;
            if nu < bound {
                return Err(Error::InvalidSpec(format!("nu = {nu} below the nodeless bound {bound}")));
            }
        }
        Ok(())
    }

    /// Chain energies eps_i = eps1 - (i-1).
    pub fn chain_energies(&self) -> Vec<C64> {
        (0..self.k).map(|i| self.eps1 - i as f64).collect()
    }
}

/// Gamma((3+2l-4eps)/4) / Gamma((3+2l)/2).
fn gamma_ratio(ell: f64, eps: C64) -> Result<C64> {
    let a = (C64::new(3.0 + 2.0 * ell, 0.0) - eps * 4.0) / 4.0;
    let b = C64::new((3.0 + 2.0 * ell) / 2.0, 0.0);
    Ok((log_gamma(a)? - log_gamma(b)?).exp())
}

pub fn nu_to_mixture(nu: Nu, ell: f64, eps: C64) -> Result<(C64, C64)> {
    match nu {
        Nu::Infinite => Ok((C64::new(0.0, 0.0), C64::new(1.0, 0.0))),
        Nu::Finite(v) if v == 0.0 => Ok((C64::new(1.0, 0.0), C64::new(0.0, 0.0))),
        Nu::Finite(v) => Ok((C64::new(1.0, 0.0), gamma_ratio(ell, eps)? * v)),
    }
}

/// Lower bound on nu for a nodeless real seed:
/// `-Gamma((1-2l)/2) / Gamma((1-2l-4eps)/4)`.
pub fn nu_lower_bound(ell: f64, eps: f64) -> Result<f64> {
    let num = C64::new((1.0 - 2.0 * ell) / 2.0, 0.0);
    let den = C64::new((1.0 - 2.0 * ell - 4.0 * eps) / 4.0, 0.0);
    let r = rgamma(den);
    if r == C64::new(0.0, 0.0) {
        return Ok(0.0);
    }
    Ok(-(log_gamma(num)?.exp() * r).re)
}

#[derive(Debug)]
enum Kind {
    Kummer { mu1: C64, mu2: C64 },
    Physical { family: u8, n: usize },
    Ladder { inner: SchrodingerSolution, raise: bool },
    Combination(Vec<(C64, SchrodingerSolution)>),
}

/// A solution of `H_l u = E u` on x > 0.
#[derive(Clone, Debug)]
pub struct SchrodingerSolution {
    ell: f64,
    energy: C64,
    kind: Arc<Kind>,
}

/// Value and derivatives `u, u', ..., u^(N)` at `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeJet {
    pub x: f64,
    pub values: Vec<C64>,
    pub eps: C64,
    pub ell: f64,
}

impl DerivativeJet {
    /// |u'' - 2(V0 - eps) u| relative to max(|u|, |u''|).
    pub fn closure_error(&self) -> f64 {
        let (u, u2) = (self.values[0], self.values[2]);
        let want = (C64::new(v0(self.ell, self.x), 0.0) - self.eps) * u * 2.0;
        (u2 - want).norm() / u.norm().max(u2.norm()).max(f64::MIN_POSITIVE)
    }
}

impl SchrodingerSolution {
    pub fn energy(&self) -> C64 {
        self.energy
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    /// `(u, u', scale)`: scale is the magnitude of the terms that were added
    /// to produce the value, so cancellation to zero can be recognised.
    fn eval(&self, x: f64) -> Result<(C64, C64, f64)> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("x = {x} must be positive")));
        }
        match &*self.kind {
            Kind::Kummer { mu1, mu2 } => kummer_eval(self.ell, self.energy, *mu1, *mu2, x),
            Kind::Physical { family, n } => Ok(physical_eval(*family, *n, self.ell, x)),
            Kind::Ladder { inner, raise } => {
                let t = inner.taylor(x, 3)?;
                let out = apply_b_taylor(*raise, self.ell, &t, x);
                let scale = t.coeffs().iter().map(|c| c.norm()).sum::<f64>() * (1.0 + x * x + 1.0 / (x * x));
                Ok((out.value(), out.coeff(1), scale))
            }
            Kind::Combination(parts) => {
                let mut v = C64::new(0.0, 0.0);
                let mut d = C64::new(0.0, 0.0);
                let mut s = 0.0;
                for (c, p) in parts {
                    let (pv, pd, ps) = p.eval(x)?;
                    v += c * pv;
                    d += c * pd;
                    s += c.norm() * ps;
                }
                Ok((v, d, s))
            }
        }
    }

    pub fn value_deriv(&self, x: f64) -> Result<(C64, C64)> {
        let (v, d, _) = self.eval(x)?;
        Ok((v, d))
    }

    /// Taylor coefficients to `order` at `x`.
    pub fn taylor(&self, x: f64, order: usize) -> Result<Taylor> {
        Ok(self.gauged(x, order)?.to_taylor(x))
    }

    /// Jet with the dominant small-x power split off: `x^{-l}` when the
    /// first branch is present, `x^{l+1}` otherwise. Closed-form members are
    /// built in `t = x^2` (see [`Self::t_gauged`]), so no `l/x` terms appear.
    pub fn gauged(&self, x: f64, order: usize) -> Result<Gauged> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("x = {x} must be positive")));
        }
        if let Some(g) = self.t_gauged(x * x, order) {
            let g = g?;
            let square = &Taylor::variable(x, order) * &Taylor::variable(x, order);
            return Ok(Gauged { power: 2.0 * g.power, reduced: g.reduced.compose(&square) });
        }
        match &*self.kind {
            Kind::Ladder { inner, raise } => {
                let g = inner.gauged(x, order + 2)?;
                Ok(Gauged { power: g.power, reduced: apply_b_gauged(*raise, self.ell, g.power, &g.reduced, x) })
            }
            Kind::Combination(parts) => {
                let jets: Vec<(C64, Gauged)> =
                    parts.iter().map(|(c, q)| q.gauged(x, order).map(|g| (*c, g))).collect::<Result<_>>()?;
                Ok(combine_gauged(&jets, x, order))
            }
            Kind::Kummer { .. } | Kind::Physical { .. } => unreachable!("closed forms have t jets"),
        }
    }

    /// Gauged jet in `t = x^2` about `t0`, `u = t^p R(t)`, for members with a
    /// closed form in t; `None` for ladder images of other kinds.
    pub fn t_gauged(&self, t0: f64, order: usize) -> Option<Result<Gauged>> {
        match &*self.kind {
            Kind::Kummer { mu1, mu2 } => Some(kummer_t_gauged(self.ell, self.energy, *mu1, *mu2, t0, order)),
            Kind::Physical { family, n } => Some(Ok(physical_t_gauged(*family, *n, self.ell, t0, order))),
            Kind::Ladder { .. } => None,
            Kind::Combination(parts) => {
                let mut jets = Vec::with_capacity(parts.len());
                for (c, q) in parts {
                    match q.t_gauged(t0, order)? {
                        Ok(g) => jets.push((*c, g)),
                        Err(e) => return Some(Err(e)),
                    }
                }
                Some(Ok(combine_gauged(&jets, t0, order)))
            }
        }
    }

    pub fn jet(&self, x: f64, order: usize) -> Result<DerivativeJet> {
        let t = self.taylor(x, order.max(2))?;
        let mut values = t.derivatives();
        values.truncate(order + 1);
        Ok(DerivativeJet { x, values, eps: self.energy, ell: self.ell })
    }

    /// Schrodinger residual with u'' from a difference of the evaluated u',
    /// independent of the ODE closure.
    pub fn residual(&self, x: f64) -> Result<f64> {
        let h = 1e-3 * x.min(1.0);
        // u'' from a centred difference of the analytic first derivative
        let (_, dp) = self.value_deriv(x + h)?;
        let (_, dm) = self.value_deriv(x - h)?;
        let (_, dp2) = self.value_deriv(x + 2.0 * h)?;
        let (_, dm2) = self.value_deriv(x - 2.0 * h)?;
        let u2 = (dm2 - dp2 + (dp - dm) * 8.0) / (12.0 * h);
        let (u, du) = self.value_deriv(x)?;
        let lhs = -u2 * 0.5 + u * (C64::new(v0(self.ell, x), 0.0) - self.energy);
        // |u'| keeps the measure meaningful at nodes
        Ok(lhs.norm() / u.norm().max(u2.norm()).max(du.norm()).max(f64::MIN_POSITIVE))
    }

    /// True if the function vanishes (relative to its own construction
    /// scale) at every probe point.
    pub fn is_zero_function(&self) -> bool {
        ZERO_PROBES.iter().all(|&x| match self.eval(x) {
            Ok((v, d, s)) => v.norm() + d.norm() <= ZERO_TOL * s.max(f64::MIN_POSITIVE),
            Err(_) => false,
        })
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self { ell: self.ell, energy: self.energy, kind: Arc::new(Kind::Combination(vec![(c, self.clone())])) }
    }

    /// `a*self + b*other`; both must share l and energy.
    pub fn combine(&self, a: C64, other: &Self, b: C64) -> Result<Self> {
        if (self.ell - other.ell).abs() > 1e-14 || (self.energy - other.energy).norm() > 1e-12 {
            return Err(Error::InvalidSpec("combining solutions of different equations".into()));
        }
        Ok(Self {
            ell: self.ell,
            energy: self.energy,
            kind: Arc::new(Kind::Combination(vec![(a, self.clone()), (b, other.clone())])),
        })
    }
}

fn kummer_eval(ell: f64, eps: C64, mu1: C64, mu2: C64, x: f64) -> Result<(C64, C64, f64)> {
    let t = C64::new(x * x / 2.0, 0.0);
    let gauss = (-x * x / 4.0).exp();
    let mut v = C64::new(0.0, 0.0);
    let mut d = C64::new(0.0, 0.0);
    let mut s = 0.0;
    if mu1 != C64::new(0.0, 0.0) {
        let a = (C64::new(1.0 - 2.0 * ell, 0.0) - eps * 4.0) / 4.0;
        let b = C64::new((1.0 - 2.0 * ell) / 2.0, 0.0);
        let pre = x.powf(-ell) * gauss;
        let f = kummer_1f1(a, b, t)?;
        let df = kummer_1f1_dx(a, b, t)?;
        let val = f * pre;
        let der = val * (-ell / x - x / 2.0) + df * pre * x;
        v += mu1 * val;
        d += mu1 * der;
        s += mu1.norm() * (val.norm() + der.norm());
    }
    if mu2 != C64::new(0.0, 0.0) {
        let a = (C64::new(3.0 + 2.0 * ell, 0.0) - eps * 4.0) / 4.0;
        let b = C64::new((3.0 + 2.0 * ell) / 2.0, 0.0);
        let pre = 2f64.powf(-(ell + 0.5)) * x.powf(ell + 1.0) * gauss;
        let f = kummer_1f1(a, b, t)?;
        let df = kummer_1f1_dx(a, b, t)?;
        let val = f * pre;
        let der = val * ((ell + 1.0) / x - x / 2.0) + df * pre * x;
        v += mu2 * val;
        d += mu2 * der;
        s += mu2.norm() * (val.norm() + der.norm());
    }
    Ok((v, d, s))
}

/// Linear combination of gauged jets about `at`, in the gauge of the most
/// singular part that carries a nonzero coefficient.
fn combine_gauged(jets: &[(C64, Gauged)], at: f64, order: usize) -> Gauged {
    let p = jets
        .iter()
        .filter(|(c, _)| *c != C64::new(0.0, 0.0))
        .map(|(_, g)| g.power)
        .fold(f64::INFINITY, f64::min);
    let p = if p.is_finite() { p } else { jets[0].1.power };
    let mut r = Taylor::zeros(order);
    for (c, g) in jets {
        r = r + g.regauge(at, p) * *c;
    }
    Gauged { power: p, reduced: r }
}

/// Jet in t of `M(a, b, t/2)` from `M^(n) = (a)_n / (b)_n M(a+n, b+n, .)`.
fn kummer_t_jet(a: C64, b: C64, t0: f64, order: usize) -> Result<Taylor> {
    let arg = C64::new(t0 / 2.0, 0.0);
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut coef = C64::new(1.0, 0.0);
    for n in 0..=order {
        if n > 0 {
            coef *= (a + (n - 1) as f64) / ((b + (n - 1) as f64) * (2 * n) as f64);
        }
        coeffs.push(if coef == C64::new(0.0, 0.0) { coef } else { coef * kummer_1f1(a + n as f64, b + n as f64, arg)? });
    }
    Ok(Taylor::from_coeffs(coeffs))
}

fn kummer_t_gauged(ell: f64, eps: C64, mu1: C64, mu2: C64, t0: f64, order: usize) -> Result<Gauged> {
    let zero = C64::new(0.0, 0.0);
    let p = if mu1 != zero || mu2 == zero { -ell } else { ell + 1.0 };
    let var = Taylor::variable(t0, order);
    let gauss = (var.clone() * -0.25).exp();
    let [(a1, b1), (a2, b2)] = branch_params(ell, eps);
    let mut r = Taylor::zeros(order);
    if mu1 != zero {
        r = r + kummer_t_jet(a1, b1, t0, order)? * mu1;
    }
    if mu2 != zero {
        let q = ell + 1.0 - p;
        let mut f = kummer_t_jet(a2, b2, t0, order)? * (mu2 * 2f64.powf(-(ell + 0.5)));
        if q != 0.0 {
            f = &f * &var.powf(q / 2.0);
        }
        r = r + f;
    }
    Ok(Gauged { power: p / 2.0, reduced: &r * &gauss })
}

fn physical_t_gauged(family: u8, n: usize, ell: f64, t0: f64, order: usize) -> Gauged {
    let (p, s, sigma, alpha, _) = family_data(family, n, ell);
    let var = Taylor::variable(t0, order);
    let l = laguerre(n, alpha, &(var.clone() * (sigma / 2.0)));
    Gauged { power: p / 2.0, reduced: &l * &(var * (s / 4.0)).exp() }
}

/// (power, gaussian sign, laguerre argument sign, alpha, energy) per family.
fn family_data(family: u8, n: usize, ell: f64) -> (f64, f64, f64, f64, f64) {
    let nf = n as f64;
    let e = e0(ell);
    match family {
        1 => (ell + 1.0, -1.0, 1.0, ell + 0.5, e + nf),
        2 => (-ell, -1.0, 1.0, -ell - 0.5, 1.0 - e + nf),
        // x -> i x images of families 1 and 2, energies reversed in sign
        3 => (ell + 1.0, 1.0, -1.0, ell + 0.5, -e - nf),
        4 => (-ell, 1.0, -1.0, -ell - 0.5, e - 1.0 - nf),
        _ => unreachable!("family validated by caller"),
    }
}

fn physical_eval(family: u8, n: usize, ell: f64, x: f64) -> (C64, C64, f64) {
    let (p, s, sigma, alpha, _) = family_data(family, n, ell);
    let arg = C64::new(sigma * x * x / 2.0, 0.0);
    let pre = x.powf(p) * (s * x * x / 4.0).exp();
    let l = laguerre(n, alpha, &arg);
    let dl = if n == 0 { C64::new(0.0, 0.0) } else { -laguerre(n - 1, alpha + 1.0, &arg) };
    let v = l * pre;
    let d = v * (p / x + s * x / 2.0) + dl * pre * sigma * x;
    (v, d, v.norm() + d.norm())
}

pub fn kummer_solution(ell: f64, eps: C64, mu1: C64, mu2: C64) -> Result<SchrodingerSolution> {
    if is_half_odd(ell) && mu1 != C64::new(0.0, 0.0) && mu2 != C64::new(0.0, 0.0) {
        return Err(Error::BranchDegeneracy { ell });
    }
    Ok(SchrodingerSolution { ell, energy: eps, kind: Arc::new(Kind::Kummer { mu1, mu2 }) })
}

/// u = mu1 * branch1 + mu2 * branch2 at the spec's eps1.
pub fn make_seed(spec: &SeedSpec) -> Result<SchrodingerSolution> {
    kummer_solution(spec.ell, spec.eps1, spec.mixture.0, spec.mixture.1)
}

/// Kummer parameters `(a, b)` of the two branches at energy `eps`.
fn branch_params(ell: f64, eps: C64) -> [(C64, C64); 2] {
    [
        ((C64::new(1.0 - 2.0 * ell, 0.0) - eps * 4.0) / 4.0, C64::new((1.0 - 2.0 * ell) / 2.0, 0.0)),
        ((C64::new(3.0 + 2.0 * ell, 0.0) - eps * 4.0) / 4.0, C64::new((3.0 + 2.0 * ell) / 2.0, 0.0)),
    ]
}

/// b- and b+ keep each Kummer branch and rescale it: b- by a, b+ by a - b.
/// Applied in closed form the x^{-l} leading terms never have to cancel
/// numerically.
fn ladder(sol: &SchrodingerSolution, raise: bool) -> SchrodingerSolution {
    let energy = sol.energy + if raise { 1.0 } else { -1.0 };
    let kind = match &*sol.kind {
        Kind::Kummer { mu1, mu2 } => {
            let [(a1, b1), (a2, b2)] = branch_params(sol.ell, sol.energy);
            let (f1, f2) = if raise { (a1 - b1, a2 - b2) } else { (a1, a2) };
            Kind::Kummer { mu1: mu1 * f1, mu2: mu2 * f2 }
        }
        _ => Kind::Ladder { inner: sol.clone(), raise },
    };
    SchrodingerSolution { ell: sol.ell, energy, kind: Arc::new(kind) }
}

pub fn apply_b_minus(sol: &SchrodingerSolution) -> SchrodingerSolution {
    ladder(sol, false)
}

pub fn apply_b_plus(sol: &SchrodingerSolution) -> SchrodingerSolution {
    ladder(sol, true)
}

/// `[u1, b- u1, (b-)^2 u1, ...]` of length k.
pub fn seed_chain(spec: &SeedSpec) -> Result<Vec<SchrodingerSolution>> {
    spec.validate()?;
    let mut chain = vec![make_seed(spec)?];
    for i in 1..spec.k {
        let next = apply_b_minus(&chain[i - 1]);
        if next.is_zero_function() {
            return Err(Error::ChainAnnihilation { index: i + 1 });
        }
        chain.push(next);
    }
    Ok(chain)
}

/// Closed-form formal eigenfunctions built on Laguerre polynomials.
///
/// Families 1 and 2 use `e^{-x^2/4}`; families 3 and 4 are their `x -> ix`
/// images with `e^{+x^2/4}`, so their energies are `-E0 - n` and
/// `E0 - 1 - n` respectively.
pub fn physical_eigenfunction(family: u8, n: usize, ell: f64) -> Result<SchrodingerSolution> {
    if !(1..=4).contains(&family) {
        return Err(Error::InvalidSpec(format!("family {family} not in 1..=4")));
    }
    let energy = family_data(family, n, ell).4;
    Ok(SchrodingerSolution { ell, energy: C64::new(energy, 0.0), kind: Arc::new(Kind::Physical { family, n }) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn first_branch_collapses_to_power_times_gaussian() {
        let ell = 1.3;
        let eps = -ell / 2.0 + 0.25;
        let u = kummer_solution(ell, c(eps), c(1.0), c(0.0)).unwrap();
        for x in [0.4, 1.0, 2.7] {
            let (v, _) = u.value_deriv(x).unwrap();
            let want = x.powf(-ell) * (-x * x / 4.0).exp();
            assert!((v - c(want)).norm() < 1e-14 * want);
        }
    }

    #[test]
    fn second_branch_at_ground_energy_is_the_ground_state() {
        let ell = 2.0;
        let u = kummer_solution(ell, c(e0(ell)), c(0.0), c(1.0)).unwrap();
        let (v1, _) = u.value_deriv(1.0).unwrap();
        for x in [0.5, 2.0, 3.5] {
            let (v, _) = u.value_deriv(x).unwrap();
            let want = x.powf(ell + 1.0) * (-x * x / 4.0).exp() / (-0.25f64).exp();
            assert!((v / v1 - c(want)).norm() < 1e-13 * want);
        }
    }

    #[test]
    fn generic_seed_solves_the_equation() {
        let u = kummer_solution(1.0, c(0.3), c(1.0), c(0.7)).unwrap();
        for x in [0.5, 1.0, 2.0, 5.0] {
            assert!(u.residual(x).unwrap() < 1e-10, "x={x}");
            assert!(u.jet(x, 6).unwrap().closure_error() < 1e-13);
        }
    }

    #[test]
    fn nu_mixture_map() {
        assert_eq!(nu_to_mixture(Nu::Finite(0.0), 2.0, c(0.5)).unwrap(), (c(1.0), c(0.0)));
        assert_eq!(nu_to_mixture(Nu::Infinite, 2.0, c(0.5)).unwrap(), (c(0.0), c(1.0)));
        let (_, m2) = nu_to_mixture(Nu::Finite(1.0), 2.0, c(0.5)).unwrap();
        // Gamma(5/4) / Gamma(7/2)
        let want = 0.906_402_477_055_477 / 3.323_350_970_447_843;
        assert!((m2 - c(want)).norm() < 1e-14);
    }

    #[test]
    fn nu_bound_vanishes_on_reciprocal_gamma_zero() {
        // (1 - 2l - 4eps)/4 = -1
        let ell = 1.0;
        let eps = (1.0 - 2.0 * ell + 4.0) / 4.0;
        assert_eq!(nu_lower_bound(ell, eps).unwrap(), 0.0);
    }

    #[test]
    fn violating_the_bound_puts_a_node_on_the_axis() {
        let (ell, eps) = (2.0, 0.5);
        let bound = nu_lower_bound(ell, eps).unwrap();
        let grid = geometric_grid(X_SCAN.0, X_SCAN.1, X_SCAN.2);
        let sign_changes = |nu: f64| {
            let (m1, m2) = nu_to_mixture(Nu::Finite(nu), ell, c(eps)).unwrap();
            let u = kummer_solution(ell, c(eps), m1, m2).unwrap();
            let vals: Vec<f64> = grid.iter().map(|&x| u.value_deriv(x).unwrap().0.re).collect();
            vals.windows(2).filter(|w| w[0].signum() != w[1].signum()).count()
        };
        assert!(sign_changes(bound - 0.1) >= 1);
        assert_eq!(sign_changes(bound + 0.1), 0);
        assert!(SeedSpec::real(ell, eps, Nu::Finite(bound - 0.1), 1).is_err());
        assert!(SeedSpec::real(ell, eps, Nu::Finite(bound + 0.1), 1).is_ok());
    }

    #[test]
    fn b_minus_annihilates_ground_state() {
        let gs = physical_eigenfunction(1, 0, 1.5).unwrap();
        assert!(apply_b_minus(&gs).is_zero_function());
        let u = kummer_solution(1.0, c(0.3), c(1.0), c(0.7)).unwrap();
        assert!(!apply_b_minus(&u).is_zero_function());
    }

    #[test]
    fn ladder_images_solve_shifted_equations() {
        let u = kummer_solution(1.0, c(-0.4), c(1.0), c(0.9)).unwrap();
        let down = apply_b_minus(&u);
        let up = apply_b_plus(&u);
        assert_eq!(down.energy(), c(-1.4));
        assert_eq!(up.energy(), c(0.6));
        for x in [0.5, 1.1, 2.3, 3.9] {
            assert!(down.residual(x).unwrap() < 1e-9);
            assert!(up.residual(x).unwrap() < 1e-9);
        }
    }

    #[test]
    fn closed_form_ladder_matches_the_operator() {
        for (ell, eps, mu) in [(1.0, -0.4, (1.0, 0.9)), (0.0, 0.3, (0.0, 1.0)), (2.7, -1.3, (1.0, 0.0)), (5.0, 2.2, (1.0, 3.0))] {
            let u = kummer_solution(ell, c(eps), c(mu.0), c(mu.1)).unwrap();
            for raise in [false, true] {
                let closed = ladder(&u, raise);
                let operator = SchrodingerSolution {
                    ell,
                    energy: closed.energy(),
                    kind: Arc::new(Kind::Ladder { inner: u.clone(), raise }),
                };
                for x in [0.8, 1.7, 3.1] {
                    let (a, da) = closed.value_deriv(x).unwrap();
                    let (b, db) = operator.value_deriv(x).unwrap();
                    let scale = b.norm().max(db.norm());
                    assert!((a - b).norm() + (da - db).norm() < 1e-11 * scale, "l={ell} eps={eps} raise={raise} x={x}");
                }
            }
        }
    }

    #[test]
    fn b_plus_b_minus_on_first_excited_state() {
        // eigenvalue n(n + 2E0 - 1) = 3/2 for n = 1, l = 0
        let psi = physical_eigenfunction(1, 1, 0.0).unwrap();
        let bb = apply_b_plus(&apply_b_minus(&psi));
        for x in [0.7, 1.5, 2.2] {
            let (a, _) = bb.value_deriv(x).unwrap();
            let (b, _) = psi.value_deriv(x).unwrap();
            assert!((a - b * 1.5).norm() < 1e-9 * b.norm().max(1.0));
        }
    }

    #[test]
    fn chain_energies_and_annihilation() {
        let spec = SeedSpec::real(1.0, -0.2, Nu::Finite(0.5), 3).unwrap();
        let chain = seed_chain(&spec).unwrap();
        let energies: Vec<C64> = chain.iter().map(|u| u.energy()).collect();
        assert_eq!(energies, vec![c(-0.2), c(-1.2), c(-2.2)]);
        for u in &chain {
            for x in [0.6, 1.4, 3.1] {
                assert!(u.residual(x).unwrap() < 1e-9);
            }
        }
        let gs = SeedSpec::with_mixture(1.0, c(e0(1.0)), (c(0.0), c(1.0)), 2).unwrap();
        assert!(matches!(seed_chain(&gs), Err(Error::ChainAnnihilation { index: 2 })));
    }

    #[test]
    fn physical_families_carry_their_energies() {
        let ell = 1.0;
        for family in 1..=4u8 {
            for n in 0..3 {
                let psi = physical_eigenfunction(family, n, ell).unwrap();
                for x in [0.5, 1.0, 1.7, 2.5, 3.3] {
                    assert!(psi.residual(x).unwrap() < 1e-10, "family {family} n {n} x {x}");
                }
            }
        }
        let (v, _) = physical_eigenfunction(1, 0, ell).unwrap().value_deriv(1.2).unwrap();
        assert!((v - c(1.2f64.powi(2) * (-0.36f64).exp())).norm() < 1e-15);
    }

    #[test]
    fn mixture_is_linear() {
        let ell = 1.0;
        let eps = c(0.2);
        let a = kummer_solution(ell, eps, c(0.3), c(0.5)).unwrap();
        let b = kummer_solution(ell, eps, c(0.9), c(0.0)).unwrap();
        let ab = kummer_solution(ell, eps, c(1.2), c(0.5)).unwrap();
        for x in [0.3, 1.0, 2.9] {
            let sum = a.value_deriv(x).unwrap().0 + b.value_deriv(x).unwrap().0;
            let direct = ab.value_deriv(x).unwrap().0;
            assert!((sum - direct).norm() <= 1e-12 * direct.norm());
        }
    }

    #[test]
    fn half_odd_mixing_is_rejected() {
        assert!(matches!(
            kummer_solution(0.5, c(0.1), c(1.0), c(1.0)),
            Err(Error::BranchDegeneracy { .. })
        ));
    }

    fn gauged_cases() -> Vec<SchrodingerSolution> {
        let k = kummer_solution(2.0, c(-0.4), c(1.0), c(0.7)).unwrap();
        let regular = kummer_solution(1.5, c(0.3), c(0.0), c(1.0)).unwrap();
        let ex = physical_eigenfunction(1, 2, 1.0).unwrap();
        let growing = physical_eigenfunction(4, 1, 0.5).unwrap();
        let mixed = kummer_solution(1.0, ex.energy(), c(1.0), c(0.0)).unwrap().combine(c(0.5), &ex, c(2.0)).unwrap();
        let raised = apply_b_plus(&physical_eigenfunction(2, 1, 1.0).unwrap());
        vec![k, regular, ex, growing, mixed, raised]
    }

    #[test]
    fn gauged_jets_reassemble_to_the_closure_series() {
        for sol in gauged_cases() {
            for x in [0.3, 1.1, 2.6] {
                let g = sol.gauged(x, 6).unwrap();
                let (u, du) = sol.value_deriv(x).unwrap();
                let want = closure_taylor(sol.ell(), sol.energy(), x, u, du, 6);
                let got = g.to_taylor(x);
                let scale = want.coeffs().iter().map(|v| v.norm()).fold(0.0, f64::max);
                for n in 0..=6 {
                    assert!((got.coeff(n) - want.coeff(n)).norm() < 1e-11 * scale, "{sol:?} x={x} n={n}");
                }
            }
        }
    }

    #[test]
    fn gauge_follows_the_dominant_branch() {
        let both = kummer_solution(2.0, c(0.1), c(1.0), c(3.0)).unwrap();
        let regular = kummer_solution(2.0, c(0.1), c(0.0), c(3.0)).unwrap();
        assert_eq!(both.gauged(0.5, 2).unwrap().power, -2.0);
        assert_eq!(regular.gauged(0.5, 2).unwrap().power, 3.0);
        assert_eq!(both.t_gauged(0.25, 2).unwrap().unwrap().power, -1.0);
        assert!(apply_b_plus(&physical_eigenfunction(1, 0, 1.0).unwrap()).t_gauged(0.25, 2).is_none());
    }
}

//! Painleve V endpoint: g(x) from two extremal states, w(z) = 1 + x/g(x)
//! with x = sqrt(z), the parameters (a, b, c, d), and the residual check
//!
//! w'' = (1/(2w) + 1/(w-1)) w'^2 - w'/z + (w-1)^2/z^2 (a w + b/w)
//!       + c w/z + d w (w+1)/(w-1).

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num_complex::{Complex, Complex64 as C64};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed_solutions::{geometric_grid, physical_eigenfunction, SeedSpec, ZERO_PROBES};
use crate::susy_engine::{
    extremal_quartet, gauged_log_derivative, member, wronskian_gauged, wronskian_stack_jet, Evaluator, ExtremalQuartet, Member, WronskianRatio,
};
use crate::taylor::Taylor;

/// Default z grid: 200 geometric points on [0.1, 20].
pub const Z_GRID: (f64, f64, usize) = (0.1, 20.0, 200);
pub const RESIDUAL_TOL: f64 = 1e-8;
const G_POLE: f64 = 1e-10;
const W_SINGULAR: f64 = 1e-10;
const CONSTANT_TOL: f64 = 1e-12;
const ANNIHILATED_PAIR: f64 = 1e-10;

pub fn default_z_grid() -> Vec<f64> {
    geometric_grid(Z_GRID.0, Z_GRID.1, Z_GRID.2)
}

/// Field operations plus exact small rationals, so the parameter formulas
/// run unchanged on doubles and on exact rationals.
pub trait Scalar:
    Clone + PartialEq + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn ratio(n: i64, d: i64) -> Self;
}

impl Scalar for C64 {
    fn ratio(n: i64, d: i64) -> Self {
        C64::new(n as f64 / d as f64, 0.0)
    }
}

impl Scalar for f64 {
    fn ratio(n: i64, d: i64) -> Self {
        n as f64 / d as f64
    }
}

impl Scalar for Ratio<i64> {
    fn ratio(n: i64, d: i64) -> Self {
        Ratio::new(n, d)
    }
}

impl Scalar for Complex<Ratio<i64>> {
    fn ratio(n: i64, d: i64) -> Self {
        Complex::new(Ratio::new(n, d), Ratio::from_integer(0))
    }
}

/// `[a, b, c, d]` and `[alpha_1..alpha_4]` from four extremal energies.
///
/// c is formed as ((e1 + e2) - (e3 + e4) - 1)/2, which equals
/// (alpha_2 - alpha_4)/2 and is invariant bit for bit under 1<->2, 3<->4.
pub fn params_from_energies<T: Scalar>(e: &[T; 4]) -> ([T; 4], [T; 4]) {
    let one = T::ratio(1, 1);
    let half = T::ratio(1, 2);
    let a1 = e[0].clone() - e[1].clone();
    let a2 = e[1].clone() - e[2].clone();
    let a3 = e[2].clone() - e[3].clone();
    let a4 = e[3].clone() - e[0].clone() + one.clone();
    let a = a1.clone() * a1.clone() * half.clone();
    let b = -(a3.clone() * a3.clone() * half.clone());
    let c = ((e[0].clone() + e[1].clone()) - (e[2].clone() + e[3].clone()) - one) * half;
    ([a, b, c, T::ratio(-1, 8)], [a1, a2, a3, a4])
}

/// Canonical quartet energies (eps1 + 1, 1 - E0, eps1 - k + 1, E0).
pub fn quartet_energies<T: Scalar>(ell: T, eps1: T, k: i64) -> [T; 4] {
    let e0 = ell * T::ratio(1, 2) + T::ratio(3, 4);
    [
        eps1.clone() + T::ratio(1, 1),
        T::ratio(1, 1) - e0.clone(),
        eps1 - T::ratio(k - 1, 1),
        e0,
    ]
}

/// Closed form for the canonical ordering:
/// a = (4eps+2l+3)^2/32, b = -(4eps-4k-2l+1)^2/32, c = (2k-2l-3)/4.
pub fn canonical_params<T: Scalar>(ell: T, eps1: T, k: i64) -> [T; 4] {
    let four = T::ratio(4, 1);
    let two = T::ratio(2, 1);
    let p = four.clone() * eps1.clone() + two.clone() * ell.clone() + T::ratio(3, 1);
    let q = four * eps1 - T::ratio(4 * k, 1) - two.clone() * ell.clone() + T::ratio(1, 1);
    let a = p.clone() * p * T::ratio(1, 32);
    let b = -(q.clone() * q * T::ratio(1, 32));
    let c = (T::ratio(2 * k - 3, 1) - two * ell) * T::ratio(1, 4);
    [a, b, c, T::ratio(-1, 8)]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PVParams {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
    pub alphas: [C64; 4],
}

impl PVParams {
    pub fn from_energies(e: &[C64; 4]) -> Self {
        let ([a, b, c, d], alphas) = params_from_energies(e);
        Self { a, b, c, d, alphas }
    }
}

/// Position-to-state assignment, e.g. "1423": state 1 first, state 4
/// second, then states 2 and 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ordering(pub [u8; 4]);

pub const CANONICAL_ORDERINGS: [&str; 6] = ["1234", "1324", "1423", "2314", "2413", "3412"];

impl Ordering {
    pub const IDENTITY: Ordering = Ordering([1, 2, 3, 4]);

    /// Sort within the exchangeable pairs (1,2) and (3,4).
    pub fn normalized(self) -> Self {
        let [a, b, c, d] = self.0;
        Ordering([a.min(b), a.max(b), c.min(d), c.max(d)])
    }

    pub fn all() -> Vec<Ordering> {
        CANONICAL_ORDERINGS.iter().map(|s| s.parse().expect("canonical labels parse")).collect()
    }

    /// Index into the quartet (0-based) for position `pos` (0-based).
    pub fn state(self, pos: usize) -> usize {
        self.0[pos] as usize - 1
    }
}

impl FromStr for Ordering {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let digits: Vec<u8> = s.trim().bytes().map(|b| b.wrapping_sub(b'0')).collect();
        let mut seen = [false; 4];
        if digits.len() != 4 {
            return Err(Error::InvalidLabel(s.into()));
        }
        for &d in &digits {
            if !(1..=4).contains(&d) || seen[d as usize - 1] {
                return Err(Error::InvalidLabel(s.into()));
            }
            seen[d as usize - 1] = true;
        }
        Ok(Ordering([digits[0], digits[1], digits[2], digits[3]]))
    }
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Reorder a quartet by a label, normalised into the canonical set.
pub fn permute_quartet(q: &ExtremalQuartet, label: Ordering) -> ExtremalQuartet {
    let label = label.normalized();
    let mut out = q.clone();
    for pos in 0..4 {
        let i = label.state(pos);
        out.states[pos] = q.states[i].clone();
        out.energies[pos] = q.energies[i];
        out.annihilated[pos] = q.annihilated[i];
        out.seeds[pos] = q.seeds[i].clone();
    }
    out
}

/// Jet of g = -x - (ln W(psi3, psi4))' to order 2 at x.
pub fn g_from_pair(psi3: &dyn Evaluator, psi4: &dyn Evaluator, x: f64) -> Result<Taylor> {
    let cols = [psi3.gauged(x, 4)?, psi4.gauged(x, 4)?];
    Ok(-(Taylor::variable(x, 2) + gauged_log_derivative(&cols, x)?))
}

/// g for positions 3 and 4 of `label`.
pub fn g_from_quartet(q: &ExtremalQuartet, label: Ordering, x: f64) -> Result<Taylor> {
    let h = q.pair_log_derivative(label.state(2), label.state(3), x)?;
    Ok(-(Taylor::variable(x, 2) + h))
}

/// Canonical-ordering g from the chain directly:
/// g = -x + 2(E0 - eps1 + k - 1) N1 N2 / W(N1, N2),
/// N1 = W(u_1..u_{k-1}), N2 = W(u_1..u_k, x^{l+1} e^{-x^2/4}).
pub fn g_route_b(q: &ExtremalQuartet, x: f64) -> Result<C64> {
    let spec = q.spec.as_ref().ok_or_else(|| Error::InvalidSpec("quartet has no seed spec".into()))?;
    let k = spec.k;
    let zero = C64::new(0.0, 0.0);
    let n1: Member = Arc::new(WronskianRatio::new(q.chain[..k - 1].to_vec(), Vec::new(), spec.ell, zero));
    let mut with_gs = q.chain.clone();
    with_gs.push(member(physical_eigenfunction(1, 0, spec.ell)?));
    let n2: Member = Arc::new(WronskianRatio::new(with_gs, Vec::new(), spec.ell, zero));
    let pair = wronskian_stack_jet(&[n1.clone(), n2.clone()], x, 0)?;
    if pair.singular {
        return Err(Error::SingularEvaluation { x });
    }
    let v1 = n1.taylor(x, 0)?.value();
    let v2 = n2.taylor(x, 0)?.value();
    let factor = (C64::new(spec.e0() + k as f64 - 1.0, 0.0) - spec.eps1) * 2.0;
    Ok(C64::new(-x, 0.0) + factor * v1 * v2 / pair.taylor.value())
}

/// (w, dw/dz, d2w/dz2) from a g jet at x = sqrt(z).
pub fn w_from_g(g: &Taylor, x: f64) -> (C64, C64, C64) {
    let y = Taylor::variable(x, 2) / g.truncate(2);
    let (y0, y1, y2) = (y.derivative(0), y.derivative(1), y.derivative(2));
    let w = y0 + 1.0;
    let w1 = y1 / (2.0 * x);
    let w2 = (y2 - y1 / x) / (4.0 * x * x);
    (w, w1, w2)
}

fn pv_rhs(w: C64, w1: C64, z: f64, p: &PVParams) -> C64 {
    let one = C64::new(1.0, 0.0);
    let wm1 = w - one;
    (one / (w * 2.0) + one / wm1) * w1 * w1 - w1 / z + wm1 * wm1 / (z * z) * (p.a * w + p.b / w) + p.c * w / z
        + p.d * w * (w + one) / wm1
}

/// |w'' - RHS| / max(|w''|, |RHS|, 1).
pub fn pv_residual(w: C64, w1: C64, w2: C64, z: f64, p: &PVParams) -> Result<f64> {
    if w.norm() < W_SINGULAR || (w - 1.0).norm() < W_SINGULAR {
        return Err(Error::EquationSingularity { w: format!("{w}") });
    }
    let rhs = pv_rhs(w, w1, z, p);
    Ok((w2 - rhs).norm() / w2.norm().max(rhs.norm()).max(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleFlag {
    Ok,
    Pole,
    Degenerate,
}

impl fmt::Display for SampleFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SampleFlag::Ok => "ok",
            SampleFlag::Pole => "pole",
            SampleFlag::Degenerate => "degenerate",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSample {
    pub z: f64,
    pub w: Option<C64>,
    pub residual: Option<f64>,
    pub flag: SampleFlag,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Degeneracy {
    Generic,
    /// w identically 1 (a state vanishes or W(psi3, psi4) = 0).
    One,
    /// g identically 0.
    Infinite,
    /// g = -x, so w identically 0.
    ZeroShift,
}

impl fmt::Display for Degeneracy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Degeneracy::Generic => "generic",
            Degeneracy::One => "w=1",
            Degeneracy::Infinite => "w=inf",
            Degeneracy::ZeroShift => "w=0",
        })
    }
}

/// Constancy tests on g at the probe points.
pub fn classify_degenerate(q: &ExtremalQuartet, label: Ordering) -> Degeneracy {
    let (i3, i4) = (label.state(2), label.state(3));
    if q.annihilated[i3] || q.annihilated[i4] {
        return Degeneracy::One;
    }
    let pair_vanishes = ZERO_PROBES.iter().all(|&x| {
        let cols = (q.states[i3].gauged(x, 1), q.states[i4].gauged(x, 1));
        match cols {
            (Ok(a), Ok(b)) => wronskian_gauged(&[a, b], x, 0).map(|(_, w)| w.relative < ANNIHILATED_PAIR).unwrap_or(false),
            _ => false,
        }
    });
    if pair_vanishes {
        return Degeneracy::One;
    }
    let gs: Vec<(f64, C64)> = ZERO_PROBES
        .iter()
        .filter_map(|&x| g_from_quartet(q, label, x).ok().map(|g| (x, g.value())))
        .collect();
    if gs.len() < ZERO_PROBES.len() {
        return Degeneracy::Generic;
    }
    if gs.iter().all(|(x, g)| g.norm() < G_POLE * (1.0 + x)) {
        return Degeneracy::Infinite;
    }
    let scale = gs.iter().map(|(x, g)| g.norm().max(*x)).fold(0.0, f64::max);
    if gs.iter().all(|(x, g)| (g + x).norm() < CONSTANT_TOL * scale.max(1.0) * 1e3) {
        return Degeneracy::ZeroShift;
    }
    Degeneracy::Generic
}

/// A w(z) produced by one ordering of an extremal quartet.
#[derive(Clone, Debug)]
pub struct PVSolution {
    pub params: PVParams,
    pub label: Ordering,
    pub quartet: ExtremalQuartet,
    pub degeneracy: Degeneracy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub max_residual: f64,
    pub ok: usize,
    pub poles: usize,
    pub samples: Vec<GridSample>,
}

impl Certificate {
    pub fn passes(&self, tol: f64) -> bool {
        self.ok > 0 && self.max_residual <= tol
    }
}

impl PVSolution {
    pub fn g(&self, x: f64) -> Result<Taylor> {
        g_from_quartet(&self.quartet, self.label, x)
    }

    /// w and its z-derivatives at z > 0.
    pub fn w_jet(&self, z: f64) -> Result<(C64, C64, C64)> {
        if !(z > 0.0) {
            return Err(Error::Domain(format!("z = {z} must be positive")));
        }
        let x = z.sqrt();
        let g = self.g(x)?;
        if g.value().norm() < G_POLE * (1.0 + x) {
            return Err(Error::SingularEvaluation { x });
        }
        Ok(w_from_g(&g, x))
    }

    pub fn sample(&self, z: f64) -> GridSample {
        if self.degeneracy != Degeneracy::Generic {
            return GridSample { z, w: None, residual: None, flag: SampleFlag::Degenerate };
        }
        let pole = GridSample { z, w: None, residual: None, flag: SampleFlag::Pole };
        let Ok((w, w1, w2)) = self.w_jet(z) else { return pole };
        if !(w.re.is_finite() && w.im.is_finite() && w1.norm().is_finite() && w2.norm().is_finite()) {
            return pole;
        }
        match pv_residual(w, w1, w2, z, &self.params) {
            Ok(r) => GridSample { z, w: Some(w), residual: Some(r), flag: SampleFlag::Ok },
            Err(_) => GridSample { z, w: Some(w), residual: None, flag: SampleFlag::Pole },
        }
    }

    pub fn certify(&self, grid: &[f64]) -> Certificate {
        let samples: Vec<GridSample> = grid.iter().map(|&z| self.sample(z)).collect();
        let ok = samples.iter().filter(|s| s.flag == SampleFlag::Ok).count();
        let poles = samples.iter().filter(|s| s.flag == SampleFlag::Pole).count();
        let max_residual = samples.iter().filter_map(|s| s.residual).fold(0.0, f64::max);
        Certificate { max_residual, ok, poles, samples }
    }
}

/// PV solution from an ordering of any quartet; degenerate outputs are
/// returned with their classification.
pub fn from_quartet(q: &ExtremalQuartet, label: Ordering) -> PVSolution {
    let label = label.normalized();
    let reordered = permute_quartet(q, label);
    PVSolution {
        params: PVParams::from_energies(&reordered.energies),
        label,
        degeneracy: classify_degenerate(q, label),
        quartet: q.clone(),
    }
}

/// Full pipeline; fails with "degenerate output" for w = 1, 0 or infinity.
pub fn solve(spec: &SeedSpec, label: Ordering) -> Result<PVSolution> {
    let sol = solve_allow_degenerate(spec, label)?;
    if sol.degeneracy != Degeneracy::Generic {
        return Err(Error::DegenerateOutput(format!("ordering {} gives {}", sol.label, sol.degeneracy)));
    }
    Ok(sol)
}

pub fn solve_allow_degenerate(spec: &SeedSpec, label: Ordering) -> Result<PVSolution> {
    let q = extremal_quartet(spec)?;
    Ok(from_quartet(&q, label))
}

//! Special-function hierarchies of first-order solutions: detection of the
//! parameter regimes, the printed closed forms, and a cross-check of those
//! forms against the general construction.

use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::painleve::{from_quartet, pv_residual, Degeneracy, Ordering, PVParams};
use crate::seed_solutions::{geometric_grid, SeedSpec};
use crate::special_functions::{bessel_i_generic, hermite, laguerre};
use crate::susy_engine::extremal_quartet;
use crate::taylor::{Field, Taylor};

const MATCH_TOL_INT: f64 = 1e-12;
pub const CROSSCHECK_TOL: f64 = 1e-9;
pub const CLOSED_FORM_RESIDUAL_TOL: f64 = 1e-8;
/// Comparison window; Bessel forms need I_mu(z^2/4) within range.
pub const CROSSCHECK_Z: (f64, f64, usize) = (0.5, 10.0, 50);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Laguerre,
    Hermite,
    Weber,
    Bessel,
    Exponential,
    Polynomial,
    Transcendent,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = family_name(*self);
        f.write_str(s)
    }
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::Laguerre => "laguerre",
        Family::Hermite => "hermite",
        Family::Weber => "weber",
        Family::Bessel => "bessel",
        Family::Exponential => "exponential",
        Family::Polynomial => "polynomial",
        Family::Transcendent => "transcendent",
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HierarchyTag {
    pub family: Family,
    /// 1-based index of the condition that fired.
    pub condition: usize,
    pub n: Option<usize>,
    pub mu: Option<f64>,
}

impl HierarchyTag {
    fn transcendent() -> Self {
        Self { family: Family::Transcendent, condition: 0, n: None, mu: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Branch {
    NuZero,
    NuInfinite,
}

fn branch(spec: &SeedSpec) -> Option<Branch> {
    let zero = C64::new(0.0, 0.0);
    match spec.mixture {
        (m1, m2) if m1 != zero && m2 == zero => Some(Branch::NuZero),
        (m1, m2) if m1 == zero && m2 != zero => Some(Branch::NuInfinite),
        _ => None,
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= MATCH_TOL_INT * (1.0 + a.abs().max(b.abs()))
}

fn as_index(v: f64) -> Option<usize> {
    let r = v.round();
    (r >= 0.0 && close(v, r)).then_some(r as usize)
}

/// Bessel orders for eps1 = 0, one per condition that applies.
pub fn bessel_orders(ell: f64, nu_infinite: bool) -> Vec<(usize, f64)> {
    if nu_infinite {
        vec![(3, (2.0 * ell + 1.0) / 4.0), (4, (2.0 * ell - 1.0) / 4.0)]
    } else {
        vec![(1, -(2.0 * ell + 1.0) / 4.0), (2, -(2.0 * ell + 3.0) / 4.0)]
    }
}

/// First matching hierarchy, tried in the order exponential, hermite,
/// polynomial, laguerre, bessel, weber. Only k = 1 with a single Kummer
/// branch (nu = 0 or nu = inf) and real eps1 qualifies.
pub fn detect(spec: &SeedSpec) -> HierarchyTag {
    let Some(br) = branch(spec) else { return HierarchyTag::transcendent() };
    if spec.k != 1 || spec.eps1.im != 0.0 {
        return HierarchyTag::transcendent();
    }
    let (ell, eps) = (spec.ell, spec.eps1.re);
    let inf = br == Branch::NuInfinite;
    let tag = |family, condition, n, mu| HierarchyTag { family, condition, n, mu };

    if close(ell, 0.5) && close(eps, 0.0) && inf {
        return tag(Family::Exponential, 1, None, None);
    }
    if close(ell, 0.0) {
        let (cond, shift) = if inf { (2, 0.75) } else { (1, 0.25) };
        if let Some(n) = as_index(eps - shift) {
            return tag(Family::Hermite, cond, Some(n), None);
        }
    }
    if !inf && close(eps, ell / 2.0 - 0.25) {
        return tag(Family::Polynomial, 1, None, None);
    }
    if inf && close(eps, -ell / 2.0 - 0.75) {
        return tag(Family::Polynomial, 2, None, None);
    }
    let (cond, lag_n) = if inf { (2, eps - ell / 2.0 - 0.75) } else { (1, eps + ell / 2.0 - 0.25) };
    if let Some(n) = as_index(lag_n) {
        return tag(Family::Laguerre, cond, Some(n), None);
    }
    if close(eps, 0.0) {
        let (cond, mu) = bessel_orders(ell, inf)[0];
        return tag(Family::Bessel, cond, None, Some(mu));
    }
    if close(ell, 0.0) && !inf {
        return tag(Family::Weber, 1, None, Some(2.0 * eps - 0.5));
    }
    HierarchyTag::transcendent()
}

/// A printed closed form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Form {
    /// 1 - z^{-1/2}
    Laguerre1,
    /// 1 - z^{3/2} L_1^a(z^2/2) / (2 L_1^a(z^2/2) - 2a - 1), a = -(2l+1)/2
    Laguerre2 { ell: f64 },
    /// 1 - z^{3/2} H_2n / ((z^2+1) H_2n - 4nz H_{2n-1})
    Hermite1 { n: usize },
    /// 1 + z^{1/2} H_2n / (4n H_{2n-1} - z H_2n)
    Hermite2 { n: usize },
    /// 1 - 2z^{3/2} I_mu / ((z^2 - 8mu) I_mu - z^2 I_{mu+1}), argument z^2/4
    Bessel1 { mu: f64 },
    /// 1 + 2 I_mu / (z^{1/2} (I_{mu+1} - I_mu)), argument z^2/4
    Bessel2 { mu: f64 },
    /// 1 + (exp(z^2/2) - 1) / z^{1/2}
    Exponential1,
    /// 1 - z^{3/2}/2 + z^{7/2} / (2z^2 + 4 - 4 exp(z^2/2))
    Exponential2,
    /// 1 - z^{3/2} / (2l+1)
    Polynomial1 { ell: f64 },
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Form::Laguerre1 => write!(f, "laguerre-1"),
            Form::Laguerre2 { .. } => write!(f, "laguerre-2"),
            Form::Hermite1 { n } => write!(f, "hermite-1(n={n})"),
            Form::Hermite2 { n } => write!(f, "hermite-2(n={n})"),
            Form::Bessel1 { mu } => write!(f, "bessel-1(mu={mu})"),
            Form::Bessel2 { mu } => write!(f, "bessel-2(mu={mu})"),
            Form::Exponential1 => write!(f, "exponential-1"),
            Form::Exponential2 => write!(f, "exponential-2"),
            Form::Polynomial1 { ell } => write!(f, "polynomial-1(l={ell})"),
        }
    }
}

/// Closed forms printed for a tag (none for weber and transcendent).
pub fn forms(tag: &HierarchyTag, ell: f64) -> Vec<Form> {
    match tag.family {
        Family::Laguerre => vec![Form::Laguerre1, Form::Laguerre2 { ell }],
        Family::Hermite => {
            let n = tag.n.unwrap_or(0);
            vec![Form::Hermite1 { n }, Form::Hermite2 { n }]
        }
        Family::Bessel => {
            let mu = tag.mu.unwrap_or(0.0);
            vec![Form::Bessel1 { mu }, Form::Bessel2 { mu }]
        }
        Family::Exponential => vec![Form::Exponential1, Form::Exponential2],
        // The nu = inf condition is the nu = 0 one under l -> -l-1.
        Family::Polynomial if tag.condition == 2 => vec![Form::Polynomial1 { ell: -ell - 1.0 }],
        Family::Polynomial => vec![Form::Polynomial1 { ell }],
        Family::Weber | Family::Transcendent => Vec::new(),
    }
}

fn hermite_pair<F: Field>(n: usize, z: &F) -> (F, F) {
    let h2n = hermite(2 * n, z);
    let h2n1 = if n == 0 { z.constant_like(C64::new(0.0, 0.0)) } else { hermite(2 * n - 1, z) };
    (h2n, h2n1)
}

/// The printed expression evaluated literally at `z` (a number or a jet).
pub fn printed<F: Field>(form: Form, z: &F) -> Result<F> {
    let one = z.constant_like(C64::new(1.0, 0.0));
    let z2 = z.clone() * z.clone();
    let z32 = z.powf(1.5);
    Ok(match form {
        Form::Laguerre1 => one - z.powf(-0.5),
        Form::Laguerre2 { ell } => {
            let alpha = -(2.0 * ell + 1.0) / 2.0;
            let l1 = laguerre(1, alpha, &z2.scale_f(0.5));
            let den = l1.scale_f(2.0).add_f(-2.0 * alpha - 1.0);
            one - z32 * l1 / den
        }
        Form::Hermite1 { n } => {
            let (h, hm) = hermite_pair(n, z);
            let den = z2.add_f(1.0) * h.clone() - z.scale_f(4.0 * n as f64) * hm;
            one - z32 * h / den
        }
        Form::Hermite2 { n } => {
            let (h, hm) = hermite_pair(n, z);
            let den = hm.scale_f(4.0 * n as f64) - z.clone() * h.clone();
            one + z.sqrt() * h / den
        }
        Form::Bessel1 { mu } => {
            let arg = z2.scale_f(0.25);
            let i0 = bessel_i_generic(mu, &arg)?;
            let i1 = bessel_i_generic(mu + 1.0, &arg)?;
            let den = z2.add_f(-8.0 * mu) * i0.clone() - z2 * i1;
            one - z32.scale_f(2.0) * i0 / den
        }
        Form::Bessel2 { mu } => {
            let arg = z2.scale_f(0.25);
            let i0 = bessel_i_generic(mu, &arg)?;
            let i1 = bessel_i_generic(mu + 1.0, &arg)?;
            one + i0.scale_f(2.0) / (z.sqrt() * (i1 - i0))
        }
        Form::Exponential1 => {
            let e = z2.scale_f(0.5).exp();
            one + e.add_f(-1.0) / z.sqrt()
        }
        Form::Exponential2 => {
            let e = z2.scale_f(0.5).exp();
            let den = z2.scale_f(2.0).add_f(4.0) - e.scale_f(4.0);
            one - z32.scale_f(0.5) + z.powf(3.5) / den
        }
        Form::Polynomial1 { ell } => one - z32.scale_f(1.0 / (2.0 * ell + 1.0)),
    })
}

/// How the printed variable relates to the construction's z.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Convention {
    /// Printed formula read literally as a function of z.
    Literal,
    /// Printed formula written in x = sqrt(z): w(z) = 1 + z^{1/4} (P(sqrt z) - 1).
    SqrtArgument,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Literal => "argument z",
            Convention::SqrtArgument => "argument sqrt(z)",
        })
    }
}

/// Closed-form w under a convention, for a number or a jet in z.
pub fn closed_form_w<F: Field>(form: Form, convention: Convention, z: &F) -> Result<F> {
    match convention {
        Convention::Literal => printed(form, z),
        Convention::SqrtArgument => {
            let p = printed(form, &z.sqrt())?;
            Ok(z.powf(0.25) * p.add_f(-1.0) + z.constant_like(C64::new(1.0, 0.0)))
        }
    }
}

/// Value of the closed form for a tag at z under the literal convention.
pub fn closed_form_value(tag: &HierarchyTag, ell: f64, which: usize, z: f64) -> Result<C64> {
    if matches!(tag.family, Family::Weber | Family::Transcendent) {
        return Err(Error::NotAvailable(tag.family.to_string()));
    }
    let all = forms(tag, ell);
    let form = *all.get(which).ok_or_else(|| Error::NotAvailable(format!("{} form {}", tag.family, which + 1)))?;
    printed(form, &C64::new(z, 0.0))
}

/// Max PV residual of a closed form on a grid (points where the form or the
/// equation is singular are skipped).
pub fn closed_form_residual(form: Form, convention: Convention, params: &PVParams, grid: &[f64]) -> Option<f64> {
    let mut worst: Option<f64> = None;
    for &z in grid {
        let Ok(w) = closed_form_w(form, convention, &Taylor::variable(z, 2)) else { continue };
        if !w.is_finite() {
            continue;
        }
        if let Ok(r) = pv_residual(w.derivative(0), w.derivative(1), w.derivative(2), z, params) {
            worst = Some(worst.map_or(r, |m: f64| m.max(r)));
        }
    }
    worst
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormCheck {
    pub form: String,
    pub convention: Convention,
    pub ordering: String,
    /// Max |w_form - w_machinery| / max(1, |w_machinery|) over the window.
    pub deviation: f64,
    /// Max PV residual of the printed form under that ordering's params.
    pub residual: Option<f64>,
    pub matched: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub tag: HierarchyTag,
    /// Best (ordering, convention) per printed form.
    pub forms: Vec<FormCheck>,
    /// Max machinery residual over non-degenerate orderings (default grid).
    pub machinery_residual: f64,
}

impl CrosscheckReport {
    pub fn any_match(&self) -> bool {
        self.forms.iter().any(|f| f.matched)
    }
}

/// Compare every printed form of the detected family with every ordering of
/// the general construction under both conventions.
pub fn crosscheck(spec: &SeedSpec) -> Result<CrosscheckReport> {
    let tag = detect(spec);
    crosscheck_forms(spec, tag, &forms(&tag, spec.ell))
}

pub fn crosscheck_forms(spec: &SeedSpec, tag: HierarchyTag, candidates: &[Form]) -> Result<CrosscheckReport> {
    let q = extremal_quartet(spec)?;
    let grid = geometric_grid(CROSSCHECK_Z.0, CROSSCHECK_Z.1, CROSSCHECK_Z.2);
    let sols: Vec<_> = Ordering::all()
        .into_iter()
        .map(|o| from_quartet(&q, o))
        .filter(|s| s.degeneracy == Degeneracy::Generic)
        .collect();
    let machinery_residual = sols
        .iter()
        .map(|s| s.certify(&crate::painleve::default_z_grid()).max_residual)
        .fold(0.0, f64::max);
    let machine: Vec<Vec<Option<C64>>> =
        sols.iter().map(|s| grid.iter().map(|&z| s.w_jet(z).ok().map(|w| w.0)).collect()).collect();

    let mut out = Vec::new();
    for &form in candidates {
        let mut best: Option<FormCheck> = None;
        for convention in [Convention::Literal, Convention::SqrtArgument] {
            let closed: Vec<Option<C64>> = grid
                .iter()
                .map(|&z| closed_form_w(form, convention, &C64::new(z, 0.0)).ok().filter(|w| w.norm().is_finite()))
                .collect();
            for (sol, mach) in sols.iter().zip(&machine) {
                let mut dev: f64 = 0.0;
                let mut compared = 0;
                for (c, m) in closed.iter().zip(mach) {
                    if let (Some(c), Some(m)) = (c, m) {
                        dev = dev.max((c - m).norm() / m.norm().max(1.0));
                        compared += 1;
                    }
                }
                if compared < grid.len() / 2 {
                    dev = f64::INFINITY;
                }
                if best.as_ref().is_none_or(|b| dev < b.deviation) {
                    best = Some(FormCheck {
                        form: form.to_string(),
                        convention,
                        ordering: sol.label.to_string(),
                        deviation: dev,
                        residual: closed_form_residual(form, convention, &sol.params, &grid),
                        matched: dev <= CROSSCHECK_TOL,
                    });
                }
            }
        }
        if let Some(b) = best {
            out.push(b);
        } else {
            out.push(FormCheck {
                form: form.to_string(),
                convention: Convention::Literal,
                ordering: "-".into(),
                deviation: f64::INFINITY,
                residual: None,
                matched: false,
            });
        }
    }
    Ok(CrosscheckReport { tag, forms: out, machinery_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed_solutions::Nu;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn spec(ell: f64, eps: f64, nu: Nu) -> SeedSpec {
        SeedSpec::unchecked_nu(ell, c(eps), nu, 1).unwrap()
    }

    #[test]
    fn detection_examples() {
        let t = detect(&spec(0.0, 1.25, Nu::Finite(0.0)));
        assert_eq!((t.family, t.n), (Family::Hermite, Some(1)));
        assert_eq!(detect(&spec(0.5, 0.0, Nu::Infinite)).family, Family::Exponential);
        assert_eq!(detect(&spec(1.0, 0.37, Nu::Finite(1.0))).family, Family::Transcendent);
        assert_eq!(detect(&spec(2.0, 0.75, Nu::Finite(0.0))).family, Family::Polynomial);
        assert_eq!(detect(&spec(2.0, -1.75, Nu::Infinite)).family, Family::Polynomial);
        let lag = detect(&spec(1.0, 1.75, Nu::Finite(0.0)));
        assert_eq!((lag.family, lag.n), (Family::Laguerre, Some(2)));
        let bes = detect(&spec(3.5, 0.0, Nu::Infinite));
        assert_eq!((bes.family, bes.mu), (Family::Bessel, Some(2.0)));
        assert_eq!(detect(&spec(0.0, 0.6, Nu::Finite(0.0))).family, Family::Weber);
    }

    #[test]
    fn detection_is_stable_under_the_nu_mapping() {
        let by_nu = spec(0.0, 1.25, Nu::Finite(0.0));
        let by_mix = SeedSpec::with_mixture(0.0, c(1.25), (c(1.0), c(0.0)), 1).unwrap();
        assert_eq!(detect(&by_nu), detect(&by_mix));
    }

    #[test]
    fn printed_values() {
        let w = printed(Form::Polynomial1 { ell: 2.0 }, &c(4.0)).unwrap();
        assert!((w - c(1.0 - 8.0 / 5.0)).norm() < 1e-15);
        let w = printed(Form::Exponential1, &c(1.0)).unwrap();
        assert!((w - c(0.5f64.exp())).norm() < 1e-15);
        let z: f64 = 1.7;
        let w = printed(Form::Hermite1 { n: 0 }, &c(z)).unwrap();
        assert!((w - c(1.0 - z.powf(1.5) / (z * z + 1.0))).norm() < 1e-15);
        assert!(matches!(
            closed_form_value(&HierarchyTag::transcendent(), 1.0, 0, 1.0),
            Err(Error::NotAvailable(_))
        ));
    }

    #[test]
    fn conventions_agree_on_jets_and_numbers() {
        for form in [Form::Hermite2 { n: 1 }, Form::Bessel1 { mu: 1.0 }, Form::Laguerre2 { ell: 1.0 }] {
            for conv in [Convention::Literal, Convention::SqrtArgument] {
                let z = 2.3;
                let jet = closed_form_w(form, conv, &Taylor::variable(z, 2)).unwrap();
                let num = closed_form_w(form, conv, &c(z)).unwrap();
                assert!((jet.value() - num).norm() < 1e-13 * num.norm().max(1.0));
            }
        }
    }

    #[test]
    fn polynomial_hierarchy_matches_the_construction() {
        let s = spec(2.0, 0.75, Nu::Finite(0.0));
        let r = crosscheck(&s).unwrap();
        assert!(r.any_match(), "{r:?}");
    }
}

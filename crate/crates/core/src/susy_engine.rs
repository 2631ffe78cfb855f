//! Wronskians, k-th order SUSY partners, transformed states and the
//! extremal quartets that feed the Painleve V construction.

use std::fmt::Debug;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::seed_solutions::{
    apply_b_plus, e0, kummer_solution, physical_eigenfunction, seed_chain, v0, SchrodingerSolution, SeedSpec,
    ZERO_PROBES,
};
use crate::taylor::{Field, Gauged, Taylor};

/// Relative threshold below which a Wronskian value counts as zero.
pub const W_ZERO: f64 = 1e-13;
const ANNIHILATION_TOL: f64 = 1e-10;

/// Anything that can produce a Taylor jet at x > 0.
pub trait Evaluator: Debug + Send + Sync {
    fn ell(&self) -> f64;
    fn energy(&self) -> C64;
    fn taylor(&self, x: f64, order: usize) -> Result<Taylor>;

    /// Jet as `x^p * R`; Wronskians are taken of the R parts.
    fn gauged(&self, x: f64, order: usize) -> Result<Gauged> {
        self.taylor(x, order).map(Gauged::plain)
    }

    /// Gauged jet in `t = x^2` about `t0`, where a closed form in t exists.
    fn t_gauged(&self, _t0: f64, _order: usize) -> Option<Result<Gauged>> {
        None
    }

    /// True if the function is identically zero.
    fn is_zero_function(&self) -> bool;
}

impl Evaluator for SchrodingerSolution {
    fn ell(&self) -> f64 {
        SchrodingerSolution::ell(self)
    }
    fn energy(&self) -> C64 {
        SchrodingerSolution::energy(self)
    }
    fn taylor(&self, x: f64, order: usize) -> Result<Taylor> {
        SchrodingerSolution::taylor(self, x, order)
    }
    fn gauged(&self, x: f64, order: usize) -> Result<Gauged> {
        SchrodingerSolution::gauged(self, x, order)
    }
    fn t_gauged(&self, t0: f64, order: usize) -> Option<Result<Gauged>> {
        SchrodingerSolution::t_gauged(self, t0, order)
    }
    fn is_zero_function(&self) -> bool {
        SchrodingerSolution::is_zero_function(self)
    }
}

pub type Member = Arc<dyn Evaluator>;

pub fn member(sol: SchrodingerSolution) -> Member {
    Arc::new(sol)
}

/// Taylor jet of a Wronskian about x together with its zero test.
#[derive(Clone, Debug)]
pub struct WronskianJet {
    pub taylor: Taylor,
    /// |W| < 1e-13 * (product of row norms).
    pub singular: bool,
    /// |W| / (product of row norms).
    pub relative: f64,
}

fn det_lu(mut a: Vec<Vec<C64>>) -> C64 {
    let m = a.len();
    let mut det = C64::new(1.0, 0.0);
    for col in 0..m {
        let p = (col..m)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .expect("non-empty range");
        if a[p][col] == C64::new(0.0, 0.0) {
            return C64::new(0.0, 0.0);
        }
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let piv = a[col][col];
        det *= piv;
        for r in col + 1..m {
            let f = a[r][col] / piv;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for c in col..m {
                let t = a[col][c];
                a[r][c] -= f * t;
            }
        }
    }
    det
}

fn compositions(total: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() + 1 == parts {
        cur.push(total);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    for first in 0..=total {
        cur.push(first);
        compositions(total - first, parts, cur, out);
        cur.pop();
    }
}

/// Jet to `order` of W(f_1, ..., f_m) from jets of the columns.
///
/// The h^d coefficient of W(x+h) is the sum over row shifts delta with
/// |delta| = d of det[f_c^(i + delta_i) / delta_i!]. Shifts that repeat a
/// derivative order give duplicate rows and are skipped.
pub fn wronskian_jet(cols: &[Taylor], order: usize) -> Result<WronskianJet> {
    let m = cols.len();
    if m == 0 {
        return Ok(WronskianJet { taylor: Taylor::constant(C64::new(1.0, 0.0), order), singular: false, relative: 1.0 });
    }
    let need = m - 1 + order;
    let have = cols.iter().map(Taylor::order).min().unwrap_or(0);
    if have < need {
        return Err(Error::JetOrderExceeded { needed: need, available: have });
    }
    let derivs: Vec<Vec<C64>> = cols.iter().map(|t| t.derivatives()).collect();
    let mut inv_fact = vec![1.0; order + 1];
    for d in 1..=order {
        inv_fact[d] = inv_fact[d - 1] / d as f64;
    }
    let mut coeffs = Vec::with_capacity(order + 1);
    for d in 0..=order {
        let mut shifts = Vec::new();
        compositions(d, m, &mut Vec::with_capacity(m), &mut shifts);
        let mut acc = C64::new(0.0, 0.0);
        for delta in shifts {
            let rows: Vec<usize> = delta.iter().enumerate().map(|(i, s)| i + s).collect();
            let mut sorted = rows.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                continue;
            }
            let mat: Vec<Vec<C64>> = rows
                .iter()
                .zip(&delta)
                .map(|(&r, &s)| derivs.iter().map(|col| col[r] * inv_fact[s]).collect())
                .collect();
            acc += det_lu(mat);
        }
        coeffs.push(acc);
    }
    let row_norms: f64 = (0..m)
        .map(|r| derivs.iter().map(|col| col[r].norm_sqr()).sum::<f64>().sqrt())
        .product();
    let relative = if row_norms > 0.0 { coeffs[0].norm() / row_norms } else { 0.0 };
    Ok(WronskianJet { taylor: Taylor::from_coeffs(coeffs), singular: relative < W_ZERO, relative })
}

/// Determinant of a matrix of jets by elimination, pivoting on values.
fn det_jets(mut a: Vec<Vec<Taylor>>, order: usize) -> Taylor {
    let m = a.len();
    let mut det = Taylor::constant(C64::new(1.0, 0.0), order);
    for col in 0..m {
        let p = (col..m)
            .max_by(|&i, &j| a[i][col].value().norm().total_cmp(&a[j][col].value().norm()))
            .expect("non-empty range");
        if a[p][col].value() == C64::new(0.0, 0.0) {
            return Taylor::zeros(order);
        }
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let piv = a[col][col].clone();
        det = &det * &piv;
        for r in col + 1..m {
            let f = &a[r][col] / &piv;
            for c in col..m {
                let t = &f * &a[col][c];
                a[r][c] = &a[r][c] - &t;
            }
        }
    }
    det
}

/// Wronskian of gauged columns `x^{p_i} R_i`, returned as `(q, D)` with
/// `W = x^q D`.
///
/// With equal powers this is `x^{mp} W(R_i)`. Otherwise the entries are
/// `x^{-p_i} (x^{p_i} R_i)^(j)`, shifted by the smallest power, and
/// `q = sum p_i`, so columns of different small-x behaviour never meet
/// through a large power of x.
pub fn wronskian_gauged(cols: &[Gauged], x: f64, order: usize) -> Result<(f64, WronskianJet)> {
    let m = cols.len();
    let p = cols.iter().map(|g| g.power).fold(f64::INFINITY, f64::min);
    if cols.iter().all(|g| g.power == p) {
        let reduced: Vec<Taylor> = cols.iter().map(|g| g.reduced.clone()).collect();
        let q = if m == 0 { 0.0 } else { p * m as f64 };
        return Ok((q, wronskian_jet(&reduced, order)?));
    }
    let need = m - 1 + order;
    let have = cols.iter().map(|g| g.reduced.order()).min().unwrap_or(0);
    if have < need {
        return Err(Error::JetOrderExceeded { needed: need, available: have });
    }
    let inv = Taylor::variable(x, need).recip();
    let entries: Vec<Vec<Taylor>> = cols
        .iter()
        .map(|g| {
            let delta = g.power - p;
            let mut col = vec![g.reduced.truncate(need)];
            for j in 1..m {
                let prev = &col[j - 1];
                let next = prev.d() + (&inv * prev) * delta;
                col.push(next);
            }
            col.into_iter().map(|t| t.truncate(order)).collect()
        })
        .collect();
    let rows: Vec<Vec<Taylor>> = (0..m).map(|j| entries.iter().map(|col| col[j].clone()).collect()).collect();
    let row_norms: f64 = rows.iter().map(|r| r.iter().map(|t| t.value().norm_sqr()).sum::<f64>().sqrt()).product();
    let det = det_jets(rows, order);
    let relative = if row_norms > 0.0 { det.value().norm() / row_norms } else { 0.0 };
    let q = cols.iter().map(|g| g.power).sum::<f64>();
    Ok((q, WronskianJet { taylor: det, singular: relative < W_ZERO, relative }))
}

/// Gauged Wronskian of a stack of members, `W = x^power * jet`.
pub fn wronskian_stack_gauged(stack: &[Member], x: f64, order: usize) -> Result<(f64, WronskianJet)> {
    let need = stack.len().saturating_sub(1) + order;
    let cols: Vec<Gauged> = stack.iter().map(|f| f.gauged(x, need)).collect::<Result<_>>()?;
    wronskian_gauged(&cols, x, order)
}

/// Jet of W(stack) to `order` at x.
pub fn wronskian_stack_jet(stack: &[Member], x: f64, order: usize) -> Result<WronskianJet> {
    let (power, mut w) = wronskian_stack_gauged(stack, x, order)?;
    w.taylor = Gauged { power, reduced: w.taylor }.to_taylor(x);
    Ok(w)
}

/// Jet to order 2 of `(ln W)'` for gauged columns, the power entering as
/// an exact `q/x`.
pub fn gauged_log_derivative(cols: &[Gauged], x: f64) -> Result<Taylor> {
    let (q, w) = wronskian_gauged(cols, x, 3)?;
    if w.singular {
        return Err(Error::SingularEvaluation { x });
    }
    Ok(Taylor::variable(x, 2).recip() * q + w.taylor.ln().d())
}

/// `W(t^{p_i} R_i) = t^{mp} W(t^{p_i - p} R_i)`, p the smallest power. In
/// t the power gaps are small, and the shifted columns stay smooth jets.
fn wronskian_regauged(cols: &[Gauged], t0: f64, order: usize) -> Result<(f64, WronskianJet)> {
    let p = cols.iter().map(|g| g.power).fold(f64::INFINITY, f64::min);
    if !p.is_finite() {
        return Ok((0.0, wronskian_jet(&[], order)?));
    }
    let shifted: Vec<Taylor> = cols.iter().map(|g| g.regauge(t0, p)).collect();
    Ok((p * cols.len() as f64, wronskian_jet(&shifted, order)?))
}

/// `(ln W(stack))' = P/x + J` at x, with the power P exact and J the jet
/// (order 2) of the remainder.
///
/// When every member has a closed form in `t = x^2` the determinant is
/// taken in t, using `W_x = (2x)^{m(m-1)/2} W_t`: for members that are
/// smooth in t this takes out the power of x by which such a Wronskian
/// vanishes, instead of leaving it to cancellation.
pub fn stack_log_parts(stack: &[Member], x: f64) -> Result<(f64, Taylor)> {
    let m = stack.len();
    let need = m.saturating_sub(1) + 3;
    let t0 = x * x;
    let cols: Option<Result<Vec<Gauged>>> = stack.iter().map(|f| f.t_gauged(t0, need)).collect();
    let in_t = cols.map(|c| c.and_then(|c| wronskian_regauged(&c, t0, 3)));
    if let Some(w) = in_t {
        let (q, w) = w?;
        if w.singular {
            return Err(Error::SingularEvaluation { x });
        }
        let var = Taylor::variable(x, 2);
        let square = &var * &var;
        let remainder = &(var * 2.0) * &w.taylor.ln().d().compose(&square);
        return Ok(((m * m.saturating_sub(1)) as f64 / 2.0 + 2.0 * q, remainder));
    }
    let cols: Vec<Gauged> = stack.iter().map(|f| f.gauged(x, need)).collect::<Result<_>>()?;
    let (q, w) = wronskian_gauged(&cols, x, 3)?;
    if w.singular {
        return Err(Error::SingularEvaluation { x });
    }
    Ok((q, w.taylor.ln().d()))
}

/// W, W' or W'' of the stack at x.
pub fn wronskian(stack: &[Member], x: f64, deriv_order: usize) -> Result<C64> {
    if deriv_order > 2 {
        return Err(Error::Domain(format!("deriv_order {deriv_order} not in 0..=2")));
    }
    Ok(wronskian_stack_jet(stack, x, deriv_order)?.taylor.derivative(deriv_order))
}

/// V_k = V0 - (ln W(u_1..u_k))''.
///
/// With W = x^q D the centrifugal part is l(l+1)/2 + q over x^2, combined
/// before it meets the rest.
pub fn partner_potential(ell: f64, chain: &[Member], x: f64) -> Result<C64> {
    if chain.is_empty() {
        return Ok(C64::new(v0(ell, x), 0.0));
    }
    let (q, w) = wronskian_stack_gauged(chain, x, 2)?;
    if w.singular {
        return Err(Error::SingularEvaluation { x });
    }
    let cent = ell * (ell + 1.0) / 2.0 + q;
    Ok(C64::new(x * x / 8.0 + cent / (x * x), 0.0) - w.taylor.ln().derivative(2))
}

/// `W(num) / W(den)` as a function of x.
#[derive(Debug, Clone)]
pub struct WronskianRatio {
    pub num: Vec<Member>,
    pub den: Vec<Member>,
    ell: f64,
    energy: C64,
}

impl WronskianRatio {
    pub fn new(num: Vec<Member>, den: Vec<Member>, ell: f64, energy: C64) -> Self {
        Self { num, den, ell, energy }
    }
}

impl Evaluator for WronskianRatio {
    fn ell(&self) -> f64 {
        self.ell
    }
    fn energy(&self) -> C64 {
        self.energy
    }
    fn taylor(&self, x: f64, order: usize) -> Result<Taylor> {
        Ok(self.gauged(x, order)?.to_taylor(x))
    }
    fn gauged(&self, x: f64, order: usize) -> Result<Gauged> {
        let (pd, d) = wronskian_stack_gauged(&self.den, x, order)?;
        if d.singular {
            return Err(Error::SingularEvaluation { x });
        }
        let (pn, n) = wronskian_stack_gauged(&self.num, x, order)?;
        Ok(Gauged { power: pn - pd, reduced: n.taylor / d.taylor })
    }
    fn is_zero_function(&self) -> bool {
        ZERO_PROBES.iter().all(|&x| {
            wronskian_stack_jet(&self.num, x, 0).map(|w| w.relative < ANNIHILATION_TOL).unwrap_or(false)
        })
    }
}

/// B_k^+ target, realised as W(chain, target) / W(chain).
pub fn transformed_state(chain: &[Member], target: Member) -> WronskianRatio {
    let ell = target.ell();
    let energy = target.energy();
    let mut num = chain.to_vec();
    num.push(target);
    WronskianRatio::new(num, chain.to_vec(), ell, energy)
}

/// |-psi''/2 + (V_k - E) psi| relative to max(|psi|, |psi'|, |psi''|).
pub fn schrodinger_residual(chain: &[Member], state: &dyn Evaluator, x: f64) -> Result<f64> {
    let t = state.taylor(x, 2)?;
    let (p, dp, d2p) = (t.derivative(0), t.derivative(1), t.derivative(2));
    let v = partner_potential(state.ell(), chain, x)?;
    let r = -d2p * 0.5 + (v - state.energy()) * p;
    Ok(r.norm() / p.norm().max(dp.norm()).max(d2p.norm()).max(f64::MIN_POSITIVE))
}

/// The four extremal states of a partner Hamiltonian with their energies,
/// stored in canonical order "1234".
#[derive(Debug, Clone)]
pub struct ExtremalQuartet {
    pub ell: f64,
    pub states: [Member; 4],
    pub energies: [C64; 4],
    pub annihilated: [bool; 4],
    /// Transformation chain; empty for the bare oscillator.
    pub chain: Vec<Member>,
    /// The function each state was transformed from, `None` for the state
    /// annihilated by the chain and for the bare oscillator.
    pub seeds: [Option<Member>; 4],
    pub spec: Option<SeedSpec>,
}

impl ExtremalQuartet {
    fn assemble(
        ell: f64,
        states: [Member; 4],
        chain: Vec<Member>,
        seeds: [Option<Member>; 4],
        spec: Option<SeedSpec>,
    ) -> Self {
        let energies = [0, 1, 2, 3].map(|i| states[i].energy());
        let annihilated = [0, 1, 2, 3].map(|i| states[i].is_zero_function());
        Self { ell, states, energies, annihilated, chain, seeds, spec }
    }

    /// Jet to order 2 of `(ln W(psi_i, psi_j))'`.
    ///
    /// For transformed states the pair Wronskian is rewritten with
    /// `W(W(U,f)/W(U), W(U,g)/W(U)) = W(U,f,g)/W(U)` and
    /// `W(W(U')/W(U), W(U,f)/W(U)) = 2(eps_k - E_f) W(U',f)/W(U)`,
    /// U' the chain without its last member, so the states themselves never
    /// enter a determinant.
    pub fn pair_log_derivative(&self, i: usize, j: usize, x: f64) -> Result<Taylor> {
        let inv = Taylor::variable(x, 2).recip();
        if self.chain.is_empty() {
            let (p, j) = stack_log_parts(&[self.states[i].clone(), self.states[j].clone()], x)?;
            return Ok(inv * p + j);
        }
        let k = self.chain.len();
        let num: Vec<Member> = match (&self.seeds[i], &self.seeds[j]) {
            (Some(f), Some(g)) => self.chain.iter().cloned().chain([f.clone(), g.clone()]).collect(),
            (Some(f), None) | (None, Some(f)) => self.chain[..k - 1].iter().cloned().chain([f.clone()]).collect(),
            (None, None) => return Err(Error::InvalidSpec("pair without a transformed state".into())),
        };
        let (pn, jn) = stack_log_parts(&num, x)?;
        let (pd, jd) = stack_log_parts(&self.chain, x)?;
        Ok(inv * (pn - pd) + (jn - jd))
    }

    /// Schrodinger residual of state `i` (0-based) in the partner potential.
    pub fn state_residual(&self, i: usize, x: f64) -> Result<f64> {
        schrodinger_residual(&self.chain, self.states[i].as_ref(), x)
    }
}

/// Extremal states of the k-th order partner generated by `spec`:
/// energies (eps1 + 1, 1 - E0, eps_k, E0).
pub fn extremal_quartet(spec: &SeedSpec) -> Result<ExtremalQuartet> {
    let chain_sol = seed_chain(spec)?;
    let chain: Vec<Member> = chain_sol.iter().cloned().map(member).collect();
    let ell = spec.ell;
    let k = spec.k;
    let f1 = member(apply_b_plus(&chain_sol[0]));
    let f2 = member(physical_eigenfunction(2, 0, ell)?);
    let f4 = member(physical_eigenfunction(1, 0, ell)?);
    let s1 = transformed_state(&chain, f1.clone());
    let s2 = transformed_state(&chain, f2.clone());
    let s3 = WronskianRatio::new(chain[..k - 1].to_vec(), chain.clone(), ell, chain_sol[k - 1].energy());
    let s4 = transformed_state(&chain, f4.clone());
    let states: [Member; 4] = [Arc::new(s1), Arc::new(s2), Arc::new(s3), Arc::new(s4)];
    let seeds = [Some(f1), Some(f2), None, Some(f4)];
    Ok(ExtremalQuartet::assemble(ell, states, chain, seeds, Some(spec.clone())))
}

/// Second solution at E1 with W(psi_1, psi_perp) = 1, plus `admixture * psi_1`.
///
/// Uses the x^{-l} Kummer branch at E1 rather than quadrature of 1/psi_1^2,
/// since psi_1 has a node on the positive axis.
pub fn perpendicular_state(ell: f64, admixture: C64) -> Result<SchrodingerSolution> {
    let psi1 = physical_eigenfunction(1, 1, ell)?;
    let e1 = psi1.energy();
    let branch = kummer_solution(ell, e1, C64::new(1.0, 0.0), C64::new(0.0, 0.0))?;
    let (p, dp) = psi1.value_deriv(1.0)?;
    let (q, dq) = branch.value_deriv(1.0)?;
    let w = p * dq - dp * q;
    branch.scaled(w.inv()).combine(C64::new(1.0, 0.0), &psi1, admixture)
}

/// Extremal states of the bare radial oscillator:
/// (x^{l+1}e^{-x^2/4}, x^{-l}e^{-x^2/4}, psi_1, psi_1_perp).
pub fn radial_oscillator_quartet(ell: f64, perp_admixture: C64) -> Result<ExtremalQuartet> {
    if ell < -0.5 {
        return Err(Error::InvalidSpec(format!("l = {ell} below -1/2")));
    }
    let states: [Member; 4] = [
        member(physical_eigenfunction(1, 0, ell)?),
        member(physical_eigenfunction(2, 0, ell)?),
        member(physical_eigenfunction(1, 1, ell)?),
        member(perpendicular_state(ell, perp_admixture)?),
    ];
    Ok(ExtremalQuartet::assemble(ell, states, Vec::new(), [None, None, None, None], None))
}

/// Quartet energy set predicted for a spec: (eps1 + 1, 1 - E0, eps_k, E0).
pub fn predicted_energies(spec: &SeedSpec) -> [C64; 4] {
    let e = e0(spec.ell);
    [spec.eps1 + 1.0, C64::new(1.0 - e, 0.0), spec.eps1 - (spec.k as f64 - 1.0), C64::new(e, 0.0)]
}

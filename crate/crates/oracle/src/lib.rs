//! Reference evaluations in 256-bit floating point.
//!
//! These are deliberately naive: direct series with many terms and a wide
//! Stirling shift. They exist only to check the double-precision routines.

use astro_float::{BigFloat, Consts, RoundingMode};

const P: usize = 256;
const RM: RoundingMode = RoundingMode::ToEven;

#[derive(Clone, Debug)]
struct Cx {
    re: BigFloat,
    im: BigFloat,
}

struct Ctx {
    cc: Consts,
}

impl Ctx {
    fn new() -> Self {
        Self { cc: Consts::new().expect("constant cache") }
    }

    fn f(&self, v: f64) -> BigFloat {
        BigFloat::from_f64(v, P)
    }

    fn c(&self, re: f64, im: f64) -> Cx {
        Cx { re: self.f(re), im: self.f(im) }
    }

    fn add(&self, a: &Cx, b: &Cx) -> Cx {
        Cx { re: a.re.add(&b.re, P, RM), im: a.im.add(&b.im, P, RM) }
    }

    fn sub(&self, a: &Cx, b: &Cx) -> Cx {
        Cx { re: a.re.sub(&b.re, P, RM), im: a.im.sub(&b.im, P, RM) }
    }

    fn mul(&self, a: &Cx, b: &Cx) -> Cx {
        let re = a.re.mul(&b.re, P, RM).sub(&a.im.mul(&b.im, P, RM), P, RM);
        let im = a.re.mul(&b.im, P, RM).add(&a.im.mul(&b.re, P, RM), P, RM);
        Cx { re, im }
    }

    fn scale(&self, a: &Cx, s: &BigFloat) -> Cx {
        Cx { re: a.re.mul(s, P, RM), im: a.im.mul(s, P, RM) }
    }

    fn norm2(&self, a: &Cx) -> BigFloat {
        a.re.mul(&a.re, P, RM).add(&a.im.mul(&a.im, P, RM), P, RM)
    }

    fn div(&self, a: &Cx, b: &Cx) -> Cx {
        let d = self.norm2(b);
        let conj = Cx { re: b.re.clone(), im: b.im.neg() };
        let n = self.mul(a, &conj);
        Cx { re: n.re.div(&d, P, RM), im: n.im.div(&d, P, RM) }
    }

    fn atan2(&mut self, y: &BigFloat, x: &BigFloat) -> BigFloat {
        let pi = self.cc.pi(P, RM);
        if x.is_zero() {
            let half = pi.div(&self.f(2.0), P, RM);
            return if y.is_negative() { half.neg() } else { half };
        }
        let t = y.div(x, P, RM).atan(P, RM, &mut self.cc);
        if x.is_positive() {
            t
        } else if y.is_negative() {
            t.sub(&pi, P, RM)
        } else {
            t.add(&pi, P, RM)
        }
    }

    fn ln(&mut self, a: &Cx) -> Cx {
        let r2 = self.norm2(a);
        let re = r2.ln(P, RM, &mut self.cc).div(&self.f(2.0), P, RM);
        let im = self.atan2(&a.im, &a.re);
        Cx { re, im }
    }

    fn exp(&mut self, a: &Cx) -> Cx {
        let m = a.re.exp(P, RM, &mut self.cc);
        let c = a.im.cos(P, RM, &mut self.cc);
        let s = a.im.sin(P, RM, &mut self.cc);
        Cx { re: m.mul(&c, P, RM), im: m.mul(&s, P, RM) }
    }

    fn to_f64(&mut self, a: &Cx) -> (f64, f64) {
        (self.big_to_f64(&a.re), self.big_to_f64(&a.im))
    }

    fn big_to_f64(&mut self, v: &BigFloat) -> f64 {
        if v.is_zero() {
            return 0.0;
        }
        let s = v
            .format(astro_float::Radix::Dec, RM, &mut self.cc)
            .expect("decimal formatting");
        s.parse::<f64>().expect("parsable decimal")
    }

    fn small(&self, term: &Cx, sum: &Cx, bits: i32) -> bool {
        let t = self.norm2(term);
        let s = self.norm2(sum);
        if t.is_zero() {
            return true;
        }
        if s.is_zero() {
            return false;
        }
        let te = t.exponent().unwrap_or(i32::MIN / 2);
        let se = s.exponent().unwrap_or(i32::MIN / 2);
        te < se - 2 * bits
    }
}

/// 1F1(a; b; x) by direct summation at 256 bits (no transformations).
pub fn hyp1f1(a: (f64, f64), b: (f64, f64), x: (f64, f64)) -> (f64, f64) {
    let mut ctx = Ctx::new();
    let (a, b, x) = (ctx.c(a.0, a.1), ctx.c(b.0, b.1), ctx.c(x.0, x.1));
    let one = ctx.c(1.0, 0.0);
    let mut term = one.clone();
    let mut sum = one;
    let mut quiet = 0;
    for n in 0..20_000 {
        let nf = ctx.c(n as f64, 0.0);
        let n1 = ctx.c(n as f64 + 1.0, 0.0);
        let num = ctx.mul(&ctx.add(&a, &nf), &x);
        let den = ctx.mul(&ctx.add(&b, &nf), &n1);
        term = ctx.mul(&term, &ctx.div(&num, &den));
        sum = ctx.add(&sum, &term);
        if n > 10 && ctx.small(&term, &sum, 200) {
            quiet += 1;
            if quiet > 3 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    ctx.to_f64(&sum)
}

// B_{2k} for k = 1..=15 as (numerator, denominator)
const BERNOULLI: [(f64, f64); 15] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
    (-23749461029.0, 870.0),
    (8615841276005.0, 14322.0),
];

fn log_gamma_cx(ctx: &mut Ctx, z: &Cx) -> Cx {
    // shift by 60, then Stirling with 15 Bernoulli terms
    let mut shift = ctx.c(0.0, 0.0);
    let mut w = z.clone();
    let one = ctx.c(1.0, 0.0);
    for _ in 0..60 {
        let l = ctx.ln(&w);
        shift = ctx.add(&shift, &l);
        w = ctx.add(&w, &one);
    }
    let half = ctx.c(0.5, 0.0);
    let lw = ctx.ln(&w);
    let mut acc = ctx.sub(&ctx.mul(&ctx.sub(&w, &half), &lw), &w);
    let two_pi = ctx.cc.pi(P, RM).mul(&ctx.f(2.0), P, RM);
    let ln_sqrt_2pi = two_pi.ln(P, RM, &mut ctx.cc).div(&ctx.f(2.0), P, RM);
    acc.re = acc.re.add(&ln_sqrt_2pi, P, RM);
    let inv = ctx.div(&one, &w);
    let inv2 = ctx.mul(&inv, &inv);
    let mut pw = inv;
    for (k, (num, den)) in BERNOULLI.iter().enumerate() {
        let m = 2.0 * (k as f64 + 1.0);
        let coef = ctx.f(*num).div(&ctx.f(den * m * (m - 1.0)), P, RM);
        acc = ctx.add(&acc, &ctx.scale(&pw, &coef));
        pw = ctx.mul(&pw, &inv2);
    }
    ctx.sub(&acc, &shift)
}

/// ln Gamma(z) for Re z > 0, branch continuous from the positive axis.
pub fn log_gamma(z: (f64, f64)) -> (f64, f64) {
    assert!(z.0 > 0.0, "oracle covers the right half-plane only");
    let mut ctx = Ctx::new();
    let zc = ctx.c(z.0, z.1);
    let r = log_gamma_cx(&mut ctx, &zc);
    ctx.to_f64(&r)
}

/// Modified Bessel I_mu(x) by the ascending series at 256 bits, mu > -1.
pub fn bessel_i(mu: f64, x: (f64, f64)) -> (f64, f64) {
    assert!(mu > -1.0, "oracle covers mu > -1");
    let mut ctx = Ctx::new();
    let xc = ctx.c(x.0, x.1);
    let half = ctx.c(0.5, 0.0);
    let hx = ctx.mul(&xc, &half);
    let l = ctx.ln(&hx);
    let mu_c = ctx.c(mu, 0.0);
    let mu1 = ctx.c(mu + 1.0, 0.0);
    let lg = log_gamma_cx(&mut ctx, &mu1);
    let pre_log = ctx.sub(&ctx.mul(&l, &mu_c), &lg);
    let mut term = ctx.exp(&pre_log);
    let q = ctx.mul(&hx, &hx);
    let mut sum = term.clone();
    let mut quiet = 0;
    for k in 0..20_000 {
        let den = ctx.f((k as f64 + 1.0) * (mu + k as f64 + 1.0));
        term = ctx.mul(&term, &q);
        term = Cx { re: term.re.div(&den, P, RM), im: term.im.div(&den, P, RM) };
        sum = ctx.add(&sum, &term);
        if k > 10 && ctx.small(&term, &sum, 200) {
            quiet += 1;
            if quiet > 3 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    ctx.to_f64(&sum)
}

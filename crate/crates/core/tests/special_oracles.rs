//! Double-precision special functions against 256-bit reference series.

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use pvsusy::special_functions::{bessel_i, classical_polys, gamma, kummer_1f1, laguerre, log_gamma, PolyKind};
use pvsusy_oracle as oracle;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pair(z: C64) -> (f64, f64) {
    (z.re, z.im)
}

fn cx(p: (f64, f64)) -> C64 {
    C64::new(p.0, p.1)
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn random_point(rng: &mut ChaCha8Rng) -> (C64, C64, C64) {
    let a = C64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-2.0..2.0));
    let b = C64::new(rng.gen_range(0.3..4.0), rng.gen_range(-2.0..2.0));
    let r = rng.gen_range(0.0..10.0);
    let t = rng.gen_range(0.0..std::f64::consts::TAU);
    (a, b, C64::from_polar(r, t))
}

#[test]
fn kummer_matches_reference_at_random_complex_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let (a, b, x) = random_point(&mut rng);
        let got = kummer_1f1(a, b, x).unwrap();
        let want = cx(oracle::hyp1f1(pair(a), pair(b), pair(x)));
        assert!(rel(got, want) <= 1e-12, "1F1({a}, {b}, {x}) = {got}, reference {want}");
    }
}

#[test]
fn kummer_matches_reference_on_seed_parameters() {
    // The parameters the oscillator seeds actually use, x = X^2/2 up to 32.
    for &(ell, eps) in &[(0.0, -0.3), (2.0, 1.0), (5.0, -4.25), (1.0, 0.37)] {
        let a = C64::new((1.0 - 2.0 * ell - 4.0 * eps) / 4.0, 0.0);
        let b = C64::new((1.0 - 2.0 * ell) / 2.0, 0.0);
        let a2 = C64::new((3.0 + 2.0 * ell - 4.0 * eps) / 4.0, 0.0);
        let b2 = C64::new((3.0 + 2.0 * ell) / 2.0, 0.0);
        for &x in &[0.05, 1.0, 4.5, 12.0, 32.0] {
            let x = C64::new(x, 0.0);
            for (a, b) in [(a, b), (a2, b2)] {
                let got = kummer_1f1(a, b, x).unwrap();
                let want = cx(oracle::hyp1f1(pair(a), pair(b), pair(x)));
                assert!(rel(got, want) <= 1e-12, "1F1({a}, {b}, {x})");
            }
        }
    }
}

#[test]
fn log_gamma_matches_reference() {
    let z = C64::new(2.0, 3.0);
    assert!(rel(log_gamma(z).unwrap(), cx(oracle::log_gamma((2.0, 3.0)))) <= 1e-13);
    for &(re, im) in &[(0.5, 0.0), (1.25, -11.0), (7.5, 0.4), (0.1, 30.0), (30.0, -2.0)] {
        let got = log_gamma(C64::new(re, im)).unwrap();
        let want = cx(oracle::log_gamma((re, im)));
        assert!((got - want).norm() <= 1e-13 * want.norm().max(1.0), "lnGamma({re}+{im}i)");
    }
    let g = gamma(C64::new(0.5, 0.0)).unwrap();
    assert!((g.re - std::f64::consts::PI.sqrt()).abs() < 1e-15);
}

#[test]
fn bessel_matches_reference() {
    let got = bessel_i(2.0, C64::new(3.7, 0.0)).unwrap();
    assert!(rel(got, cx(oracle::bessel_i(2.0, (3.7, 0.0)))) <= 1e-11);
    for &mu in &[-0.75, -0.25, 0.0, 0.5, 1.25, 3.0] {
        for &x in &[0.01, 0.8, 6.0, 25.0] {
            let got = bessel_i(mu, C64::new(x, 0.0)).unwrap();
            let want = cx(oracle::bessel_i(mu, (x, 0.0)));
            assert!(rel(got, want) <= 1e-11, "I_{mu}({x})");
        }
    }
}

#[test]
fn kummer_transformation_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let (a, b, x) = random_point(&mut rng);
        let lhs = kummer_1f1(a, b, x).unwrap();
        let rhs = x.exp() * kummer_1f1(b - a, b, -x).unwrap();
        assert!(rel(rhs, lhs) <= 1e-11, "transformation at a={a}, b={b}, x={x}");
    }
}

#[test]
fn laguerre_is_a_terminating_kummer_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for n in 0..=8usize {
        for _ in 0..6 {
            let alpha: f64 = rng.gen_range(-0.9..4.0);
            let x: f64 = rng.gen_range(-6.0..12.0);
            let mut poch = 1.0;
            let mut fact = 1.0;
            for j in 0..n {
                poch *= alpha + 1.0 + j as f64;
                fact *= (j + 1) as f64;
            }
            let via_1f1 = kummer_1f1(C64::new(-(n as f64), 0.0), C64::new(alpha + 1.0, 0.0), C64::new(x, 0.0)).unwrap()
                * (poch / fact);
            let direct = laguerre(n, alpha, &C64::new(x, 0.0));
            assert!((direct - via_1f1).norm() <= 1e-11 * via_1f1.norm().max(1.0), "L_{n}^{alpha}({x})");
            let tabulated = classical_polys(PolyKind::Laguerre, n, alpha, C64::new(x, 0.0));
            assert!((tabulated - direct).norm() <= 1e-12 * direct.norm().max(1.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kummer_transformation_holds(ar in -3.0f64..3.0, br in 0.3f64..4.0, r in 0.0f64..10.0, t in 0.0f64..6.283) {
        let (a, b, x) = (C64::new(ar, 0.0), C64::new(br, 0.0), C64::from_polar(r, t));
        let lhs = kummer_1f1(a, b, x).unwrap();
        let rhs = x.exp() * kummer_1f1(b - a, b, -x).unwrap();
        prop_assert!(rel(rhs, lhs) <= 1e-11);
    }

    #[test]
    fn gamma_recurrence(re in 0.2f64..8.0, im in -6.0f64..6.0) {
        let z = C64::new(re, im);
        let lhs = gamma(z + 1.0).unwrap();
        let rhs = z * gamma(z).unwrap();
        prop_assert!(rel(lhs, rhs) <= 1e-12);
    }
}

mod common;

use ris_secrecy::specfun::*;
use std::f64::consts::PI;

#[test]
fn random_points_match_oracles() {
    for rep in common::oracle_suite(60, 11) {
        assert!(rep.ok(), "{}: worst {:e} > {:e} at {}", rep.name, rep.worst, rep.tol, rep.at);
    }
}

#[test]
fn incomplete_gamma_points() {
    assert!((lower_incomplete_gamma(1.0, 1.0).unwrap() - (1.0 - (-1f64).exp())).abs() < 1e-14);
    assert_eq!(lower_incomplete_gamma(3.3, 0.0).unwrap(), 0.0);
    let want = common::lower_gamma(2.5, 3.7);
    let got = lower_incomplete_gamma(2.5, 3.7).unwrap();
    assert!(((got - want) / want).abs() <= 1e-12, "{got} vs {want}");
}

#[test]
fn marcum_points() {
    assert!((marcum_q1(0.0, 1.0).unwrap() - (-0.5f64).exp()).abs() < 1e-15);
    assert_eq!(marcum_q1(3.0, 0.0).unwrap(), 1.0);
    let want = common::marcum_q1(1.5, 2.0);
    assert!((marcum_q1(1.5, 2.0).unwrap() - want).abs() <= 1e-9);
}

#[test]
fn marcum_approx_points() {
    for w in [0.0, 0.7, 3.0] {
        assert_eq!(marcum_q1_exp_approx(w, 0.0).unwrap(), 1.0);
    }
    assert_eq!(approx_v(0.0), -0.840);
    assert_eq!(approx_mu(0.0), 2.174);
    let v1 = approx_v(1.0);
    assert!((v1 - -1.174).abs() < 1e-12);
    let want = (-(v1.exp())).exp();
    assert!((marcum_q1_exp_approx(1.0, 1.0).unwrap() - want).abs() < 1e-14);
}

#[test]
fn laguerre_points() {
    assert_eq!(laguerre_half(0.0).unwrap(), 1.0);
    let v = laguerre_half(2.0).unwrap();
    let want = common::laguerre_half_rice(2.0);
    assert!(((v - want) / want).abs() < 1e-10);
    let e = 1e6;
    let l = laguerre_half(e).unwrap();
    assert!((l * l / (e + 1.0) - 4.0 / PI).abs() < 1e-3);
}

#[test]
fn meijer_points() {
    let p = MeijerG0mParams::new(vec![0.0], 1.0).unwrap();
    assert!((meijer_g_m0_0m(&p).unwrap() - (-1f64).exp()).abs() < 1e-15);
    let orders = vec![0.0, 1.0, 1.5];
    let want = common::meijer_g0m_contour(&orders, 0.3);
    let got = meijer_g_m0_0m(&MeijerG0mParams::new(orders, 0.3).unwrap()).unwrap();
    assert!(((got - want) / want).abs() <= 1e-8, "{got} vs {want}");
}

#[test]
fn bessel_points() {
    assert!((bessel_k(0.5, 1.0).unwrap() - (PI / 2.0).sqrt() * (-1f64).exp()).abs() < 1e-15);
    assert_eq!(bessel_i(0, 0.0).unwrap(), 1.0);
    assert_eq!(bessel_i(1, 0.0).unwrap(), 0.0);
    let want = common::bessel_k_scaled(2.3, 0.7) * (-0.7f64).exp();
    let got = bessel_k(2.3, 0.7).unwrap();
    assert!(((got - want) / want).abs() <= 1e-10);
}

#[test]
fn shi_chi_limits() {
    for x in [1e-3, 0.01, 0.05, 0.1] {
        let (shi, chi) = shi_chi(x).unwrap();
        assert!((shi - x).abs() <= x * x * x);
        // next series term is x⁴/96
        assert!((chi - (EULER_GAMMA + x.ln())).abs() <= x * x / 4.0 + x.powi(4) / 48.0);
    }
    // e^c(Shi − Chi) = e^c E₁(c); the raw difference cancels to nothing at c = 50
    let v = exp_e1(50.0).unwrap();
    assert!(v.abs() <= 0.03, "{v}");
    assert!((v - common::exp_e1(50.0)).abs() < 1e-15);
    for x in [0.2, 1.0, 3.0, 8.0] {
        let (shi, chi) = shi_chi(x).unwrap();
        assert!((x.exp() * (shi - chi) - exp_e1(x).unwrap()).abs() < 1e-15 * x.exp() * (shi + chi.abs()));
    }
}

#[test]
fn marcum_is_monotone_in_b() {
    let mut r = common::rng(5);
    for _ in 0..500 {
        let a = common::uniform(&mut r, 0.0, 15.0);
        let b = common::uniform(&mut r, 0.1, 15.0);
        let d = common::uniform(&mut r, 1e-3, 0.1);
        let q = marcum_q1(a, b).unwrap();
        assert!((0.0..=1.0).contains(&q));
        assert!(marcum_q1(a, b + d).unwrap() <= q && q <= marcum_q1(a, b - d.min(b)).unwrap());
    }
}

#[test]
fn residue_terms_with_a_second_hump() {
    // Large k puts poles of the term ratio far out, so terms shrink and then grow again.
    let k = 929.4951404598964;
    for ln_x in [5.0, 20.0, 34.6, 35.8] {
        let (p, _) = MeijerG0mParams::outage_vector(4, 1, k, f64::exp(ln_x)).unwrap();
        let got = ln_meijer_g_m0_0m(&p).unwrap();
        let want = common::ln_meijer_g0m_contour(&p.orders, p.x);
        assert!((got - want).abs() < 1e-8 * want.abs().max(1.0), "ln x = {ln_x}: {got} vs {want}");
    }
}

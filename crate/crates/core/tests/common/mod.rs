//! Independent reference implementations used by the integration tests.
//! Everything here is plain quadrature of an integral representation;
//! nothing calls the library's special functions.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ris_secrecy::quad::integrate;
use ris_secrecy::sysmodel::SystemConfig;
use std::f64::consts::PI;

pub const EULER: f64 = 0.577_215_664_901_532_860_6;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * r.random::<f64>()
}

fn quad(f: impl FnMut(f64) -> f64, a: f64, b: f64, rel: f64) -> f64 {
    quad_abs(f, a, b, 0.0, rel)
}

fn quad_abs(f: impl FnMut(f64) -> f64, a: f64, b: f64, abs: f64, rel: f64) -> f64 {
    integrate(f, a, b, abs, rel).expect("oracle quadrature").value
}

/// Sum of quadratures over consecutive breakpoints.
fn quad_pieces(mut f: impl FnMut(f64) -> f64, pts: &[f64], rel: f64) -> f64 {
    pts.windows(2).map(|w| quad(&mut f, w[0], w[1], rel)).sum()
}

/// γ(k, x) = ∫₀^x t^{k−1} e^{−t} dt, written as (1/k)∫₀^{x^k} exp(−s^{1/k}) ds to remove the endpoint singularity.
pub fn lower_gamma(k: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if k >= 1.0 {
        let mode = (k - 1.0).min(x);
        let mut pts = vec![0.0];
        if mode > 0.0 && mode < x {
            pts.push(mode);
        }
        pts.push(x);
        return quad_pieces(|t| if t == 0.0 { if k == 1.0 { 1.0 } else { 0.0 } } else { ((k - 1.0) * t.ln() - t).exp() }, &pts, 1e-14);
    }
    let top = x.powf(k);
    quad(|s| (-s.powf(1.0 / k)).exp(), 0.0, top, 1e-14) / k
}

/// I_n(x)·e^{−x} = (1/π)∫₀^π e^{x(cos t − 1)} cos(nt) dt.
pub fn bessel_i_scaled(n: u32, x: f64) -> f64 {
    quad(|t| (x * (t.cos() - 1.0)).exp() * (n as f64 * t).cos(), 0.0, PI, 1e-14) / PI
}

/// K_ν(x)·e^{x} = ∫₀^∞ e^{−x(cosh t − 1)} cosh(νt) dt.
pub fn bessel_k_scaled(nu: f64, x: f64) -> f64 {
    let f = |t: f64| (-x * (t.cosh() - 1.0) + nu * t).exp() * 0.5 * (1.0 + (-2.0 * nu * t).exp());
    // exponent −x(cosh t − 1) + νt peaks near asinh(ν/x)
    let peak = (nu / x).asinh();
    let mut hi = peak + 1.0;
    while -x * (hi.cosh() - 1.0) + nu * hi > -60.0 + (-x * (peak.cosh() - 1.0) + nu * peak) {
        hi += 0.5;
    }
    let mut pts = vec![0.0];
    if peak > 0.0 {
        pts.push(peak);
    }
    pts.push(hi);
    quad_pieces(f, &pts, 1e-14)
}

/// Q₁(a, b) = ∫_b^∞ t exp(−(t²+a²)/2) I₀(at) dt, with I₀ from its own integral.
pub fn marcum_q1(a: f64, b: f64) -> f64 {
    let f = |t: f64| t * (-0.5 * (t - a) * (t - a)).exp() * bessel_i_scaled(0, a * t);
    let hi = a.max(b) + 40.0;
    let mut pts = vec![b];
    if a > b {
        pts.push(a);
    }
    pts.push(hi);
    quad_pieces(f, &pts, 1e-13)
}

/// (Shi, Chi) from Shi = ∫₀^x sinh t/t dt and Chi = γ + ln x + ∫₀^x (cosh t − 1)/t dt.
pub fn shi_chi(x: f64) -> (f64, f64) {
    let shi = quad(|t| if t == 0.0 { 1.0 } else { t.sinh() / t }, 0.0, x, 1e-14);
    let c = quad(|t| if t == 0.0 { 0.0 } else { 2.0 * (0.5 * t).sinh().powi(2) / t }, 0.0, x, 1e-14);
    (shi, EULER + x.ln() + c)
}

/// e^x E₁(x) = ∫₀^∞ e^{−u}/(x+u) du.
pub fn exp_e1(x: f64) -> f64 {
    quad_pieces(|u| (-u).exp() / (x + u), &[0.0, x.max(1.0), 50.0, 800.0], 1e-14)
}

/// L_{1/2}(−ε) from the mean of |h| with h = √(ε/(ε+1)) + CN(0, 1/(ε+1)).
pub fn laguerre_half_rice(eps: f64) -> f64 {
    let nu = (eps / (eps + 1.0)).sqrt();
    let s2 = 0.5 / (eps + 1.0);
    let s = s2.sqrt();
    // Rice density with the Bessel factor scaled: r/s² exp(−(r−ν)²/2s²) I₀e(rν/s²)
    let f = |r: f64| r * r / s2 * (-(r - nu) * (r - nu) / (2.0 * s2)).exp() * bessel_i_scaled(0, r * nu / s2);
    let hi = nu + 40.0 * s;
    let mean = quad_pieces(f, &[0.0, nu.max(s), hi], 1e-14);
    mean * (4.0 * (eps + 1.0) / PI).sqrt()
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Complex ln Γ by Lanczos, shifted up with the recurrence for small real parts.
pub fn ln_gamma_c(z: Complex64) -> Complex64 {
    if z.re < 1.5 {
        return ln_gamma_c(z + 1.0) - z.ln();
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

fn digamma_real(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let x2 = 1.0 / (x * x);
    acc + x.ln() - 0.5 / x - x2 * (1.0 / 12.0 - x2 * (1.0 / 120.0 - x2 / 252.0))
}

/// G^{m,0}_{0,m}(x | —; Δ) = (1/2π) ∫ Re[Π Γ(Δ_j + c + iy) x^{−c−iy}] dy, on the line through
/// the real saddle point of the integrand.
pub fn meijer_g0m_contour(orders: &[f64], x: f64) -> f64 {
    ln_meijer_g0m_contour(orders, x).exp()
}

/// Log of the contour integral, with the integrand held relative to its value at the saddle.
pub fn ln_meijer_g0m_contour(orders: &[f64], x: f64) -> f64 {
    let m = orders.len() as f64;
    let lo = -orders.iter().cloned().fold(f64::INFINITY, f64::min);
    let slope = |c: f64| orders.iter().map(|d| digamma_real(d + c)).sum::<f64>() - x.ln();
    let (mut a, mut b) = (lo + 1e-9, lo + 1.0);
    while slope(b) < 0.0 {
        b += 1.0 + (b - lo);
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if slope(mid) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let c = 0.5 * (a + b);
    let ln_x = x.ln();
    let ln_at = |y: f64| {
        let s = Complex64::new(c, y);
        orders.iter().map(|&d| ln_gamma_c(s + d)).sum::<Complex64>() - s * ln_x
    };
    let ref_ln = ln_at(0.0).re;
    let mut f = |y: f64| (ln_at(y) - ref_ln).exp().re;
    // |integrand| decays like exp(−mπ|y|/2) once |y| exceeds the orders
    let spread = orders.iter().map(|d| (d + c).abs()).fold(0.0, f64::max);
    let y_hi = 2.0 * 45.0 / (m * PI) + 10.0 + 4.0 * spread;
    let total: f64 = (0..40)
        .map(|i| quad_abs(&mut f, y_hi * i as f64 / 40.0, y_hi * (i + 1) as f64 / 40.0, 1e-16, 1e-12))
        .sum();
    ref_ln + (total / PI).ln()
}

pub fn fig2() -> SystemConfig {
    SystemConfig { N: 36, K: 16, rho_d_dB: 30.0, rho_e_dB: 30.0, ..Default::default() }
}

pub fn fig3(n: u32, rho_d_db: f64) -> SystemConfig {
    SystemConfig { N: n, K: 16, rho_d_dB: rho_d_db, rho_e_dB: 30.0, ..Default::default() }
}

pub fn fig8(rho_d_db: f64) -> SystemConfig {
    SystemConfig { N: 16, K: 16, rho_d_dB: rho_d_db, rho_e_dB: 50.0, ..Default::default() }
}

/// Worst error of one library function against its oracle over a random sample.
pub struct OracleReport {
    pub name: &'static str,
    pub worst: f64,
    pub tol: f64,
    pub at: String,
}

impl OracleReport {
    pub fn ok(&self) -> bool {
        self.worst <= self.tol
    }
}

fn track(report: &mut OracleReport, err: f64, at: impl FnOnce() -> String) {
    if !(err <= report.worst) {
        report.worst = err;
        report.at = at();
    }
}

fn rel(got: f64, want: f64) -> f64 {
    if got == want {
        0.0
    } else {
        ((got - want) / want).abs()
    }
}

/// Runs every special function against its oracle on `n` random points.
pub fn oracle_suite(n: usize, seed: u64) -> Vec<OracleReport> {
    use ris_secrecy::specfun as sf;
    let mut r = rng(seed);
    let new = |name, tol| OracleReport { name, worst: 0.0, tol, at: String::new() };
    let mut lig = new("lower_incomplete_gamma (rel)", 1e-12);
    let mut pq = new("lower + upper = Γ(k) (rel)", 1e-12);
    let mut mq = new("marcum_q1 (abs)", 1e-9);
    let mut bk = new("bessel_k (rel)", 1e-10);
    let mut bi = new("bessel_i (rel)", 1e-12);
    let mut sc = new("shi_chi (rel, abs near zero)", 1e-12);
    let mut e1 = new("exp_e1 (rel)", 1e-12);
    let mut lh = new("laguerre_half (rel)", 1e-10);
    let mut mg = new("meijer_g_m0_0m (rel)", 1e-8);
    let mut m1 = new("meijer G^{1,0}_{0,1} = exp(-x) (rel)", 1e-12);

    for i in 0..n {
        let k = uniform(&mut r, 0.05, 30.0);
        let x = uniform(&mut r, 0.0, 60.0);
        let got = sf::lower_incomplete_gamma(k, x).unwrap();
        track(&mut lig, rel(got, lower_gamma(k, x)), || format!("k={k} x={x}"));
        let up = sf::upper_incomplete_gamma(k, x).unwrap();
        track(&mut pq, rel(got + up, sf::gamma(k).unwrap()), || format!("k={k} x={x}"));

        let a = uniform(&mut r, 0.0, 12.0);
        let b = uniform(&mut r, 0.0, 12.0);
        let got = sf::marcum_q1(a, b).unwrap();
        track(&mut mq, (got - marcum_q1(a, b)).abs(), || format!("a={a} b={b}"));

        let nu = uniform(&mut r, 0.0, 10.0);
        let x = uniform(&mut r, 0.05, 40.0);
        let got = sf::bessel_k(nu, x).unwrap() * x.exp();
        track(&mut bk, rel(got, bessel_k_scaled(nu, x)), || format!("nu={nu} x={x}"));

        let order = (i % 2) as u32;
        let x = uniform(&mut r, 0.0, 60.0);
        let got = sf::bessel_i_exp_scaled(order, x).unwrap();
        let want = bessel_i_scaled(order, x);
        let err = if order == 1 && x == 0.0 { got.abs() } else { rel(got, want) };
        track(&mut bi, err, || format!("n={order} x={x}"));

        let x = uniform(&mut r, 1e-3, 30.0);
        let (shi, chi) = sf::shi_chi(x).unwrap();
        let (s0, c0) = shi_chi(x);
        let err = rel(shi, s0).max((chi - c0).abs() / c0.abs().max(1.0));
        track(&mut sc, err, || format!("x={x}"));

        let x = uniform(&mut r, 1e-3, 50.0);
        track(&mut e1, rel(sf::exp_e1(x).unwrap(), exp_e1(x)), || format!("x={x}"));

        let eps = uniform(&mut r, 0.0, 50.0);
        track(&mut lh, rel(sf::laguerre_half(eps).unwrap(), laguerre_half_rice(eps)), || format!("eps={eps}"));

        // orders shaped like the outage vectors: p grid plus a k/4q group
        let p = [1u32, 2, 4][i % 3];
        let kk = uniform(&mut r, 0.3, 8.0);
        let x = uniform(&mut r, 0.01, 20.0);
        let (params, _) = sf::MeijerG0mParams::outage_vector(p, 1, kk, x).unwrap();
        let got = sf::meijer_g_m0_0m(&params).unwrap();
        track(&mut mg, rel(got, meijer_g0m_contour(&params.orders, x)), || format!("p={p} k={kk} x={x}"));

        let x = 30.0 * (i as f64 + 1.0) / n as f64;
        let params = sf::MeijerG0mParams::new(vec![0.0], x).unwrap();
        track(&mut m1, rel(sf::meijer_g_m0_0m(&params).unwrap(), (-x).exp()), || format!("x={x}"));
    }
    vec![lig, pq, mq, bk, bi, sc, e1, lh, mg, m1]
}

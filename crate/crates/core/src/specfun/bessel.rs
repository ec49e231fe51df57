//! Modified Bessel functions I₀, I₁ (with exponential scaling) and K_ν of real order.

use std::f64::consts::PI;

use super::gamma::recip_gamma_1p;
use super::{SpecialError, SpecialResult};

const SERIES_LIMIT: f64 = 30.0;
const EPS: f64 = 1e-16;

/// e^{-x} I_n(x) for n ∈ {0, 1}, x ≥ 0.
fn bessel_i_scaled(order: u32, x: f64) -> f64 {
    if x <= SERIES_LIMIT {
        // Σ (x/2)^{2k+n} / (k! (k+n)!)
        let half = 0.5 * x;
        let q = half * half;
        let mut term = if order == 0 { 1.0 } else { half };
        let mut sum = term;
        let n = order as f64;
        let mut k = 1.0;
        loop {
            term *= q / (k * (k + n));
            sum += term;
            if term < sum * EPS {
                break;
            }
            k += 1.0;
        }
        sum * (-x).exp()
    } else {
        // Hankel asymptotic expansion, truncated at its smallest term.
        let mu = 4.0 * (order as f64).powi(2);
        let mut term: f64 = 1.0;
        let mut sum: f64 = 1.0;
        let mut k = 1.0;
        loop {
            let odd = 2.0 * k - 1.0;
            let next = -term * (mu - odd * odd) / (k * 8.0 * x);
            if next.abs() >= term.abs() || next.abs() < EPS * sum.abs() {
                if next.abs() < term.abs() {
                    sum += next;
                }
                break;
            }
            term = next;
            sum += term;
            k += 1.0;
        }
        sum / (2.0 * PI * x).sqrt()
    }
}

/// Modified Bessel function of the first kind, order 0 or 1.
pub fn bessel_i(order: u32, x: f64) -> SpecialResult<f64> {
    check_i_args(order, x)?;
    if x == 0.0 {
        return Ok(if order == 0 { 1.0 } else { 0.0 });
    }
    if x > 709.0 {
        return Err(SpecialError::Overflow(format!("bessel_i({order}, {x})")));
    }
    Ok(bessel_i_scaled(order, x) * x.exp())
}

/// e^{-x} I_n(x), order 0 or 1; finite for all x ≥ 0.
pub fn bessel_i_exp_scaled(order: u32, x: f64) -> SpecialResult<f64> {
    check_i_args(order, x)?;
    if x == 0.0 {
        return Ok(if order == 0 { 1.0 } else { 0.0 });
    }
    Ok(bessel_i_scaled(order, x))
}

fn check_i_args(order: u32, x: f64) -> SpecialResult<()> {
    if order > 1 {
        return Err(SpecialError::Domain(format!("bessel_i: order {order} not supported")));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(SpecialError::Domain(format!("bessel_i: argument {x} must be finite and >= 0")));
    }
    Ok(())
}

/// ln K_ν(x) for real ν and x > 0.
///
/// Temme's series (x ≤ 2) or Steed's continued fraction (x > 2) give K_μ and
/// K_{μ+1} with |μ| ≤ 1/2; the forward recurrence then climbs to ν. The
/// recurrence runs with a separate log scale so large orders do not overflow.
pub fn ln_bessel_k(order: f64, x: f64) -> SpecialResult<f64> {
    if !order.is_finite() {
        return Err(SpecialError::Domain(format!("bessel_k: order {order} must be finite")));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecialError::Domain(format!("bessel_k: argument {x} must be finite and > 0")));
    }
    let nu = order.abs();
    let steps = (nu + 0.5).floor();
    let mu = nu - steps;
    let (k_mu, k_mu1) = if x <= 2.0 { temme_k(mu, x)? } else { steed_k(mu, x)? };
    // Both values carry the factor e^{x} (scaled).
    let mut scale = -x;
    let (mut km, mut kp) = (k_mu, k_mu1);
    let mut m = mu;
    let n = steps as usize;
    for _ in 0..n {
        let next = 2.0 * (m + 1.0) / x * kp + km;
        km = kp;
        kp = next;
        m += 1.0;
        if kp > 1e250 {
            km /= 1e250;
            kp /= 1e250;
            scale += 1e250f64.ln();
        }
    }
    Ok(km.ln() + scale)
}

/// K_ν(x); errors when the value overflows f64.
pub fn bessel_k(order: f64, x: f64) -> SpecialResult<f64> {
    let ln = ln_bessel_k(order, x)?;
    if ln > 709.0 {
        return Err(SpecialError::Overflow(format!("bessel_k({order}, {x})")));
    }
    Ok(ln.exp())
}

/// Scaled (e^{x} K_μ(x), e^{x} K_{μ+1}(x)) by Temme's series, |μ| ≤ 1/2, x ≤ 2.
fn temme_k(mu: f64, x: f64) -> SpecialResult<(f64, f64)> {
    let x2 = 0.5 * x;
    let pimu = PI * mu;
    let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
    let d = -x2.ln();
    let e = mu * d;
    let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
    let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
    let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
    let mut sum = ff;
    let ee = e.exp();
    let mut p = 0.5 * ee / gampl;
    let mut q = 0.5 / (ee * gammi);
    let mut c = 1.0;
    let dd = x2 * x2;
    let mut sum1 = p;
    let mu2 = mu * mu;
    let mut i = 1.0;
    loop {
        ff = (i * ff + p + q) / (i * i - mu2);
        c *= dd / i;
        p /= i - mu;
        q /= i + mu;
        let del = c * ff;
        sum += del;
        let del1 = c * (p - i * ff);
        sum1 += del1;
        if del.abs() < sum.abs() * EPS {
            break;
        }
        i += 1.0;
        if i > 10_000.0 {
            return Err(SpecialError::Convergence {
                what: "bessel_k Temme series",
                partial: sum,
                bound: del.abs(),
            });
        }
    }
    let scale = x.exp();
    Ok((sum * scale, sum1 * 2.0 / x * scale))
}

/// (Γ₁, Γ₂, 1/Γ(1+μ), 1/Γ(1-μ)) as used by Temme's method.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let gampl = recip_gamma_1p(mu);
    let gammi = recip_gamma_1p(-mu);
    // Γ₁ = (1/Γ(1-μ) - 1/Γ(1+μ)) / (2μ) = -Σ c_{2j+1} μ^{2j}
    // Γ₂ = (1/Γ(1-μ) + 1/Γ(1+μ)) / 2 =  Σ c_{2j} μ^{2j}
    let coeffs = &super::gamma::RECIP_GAMMA_1P;
    let mu2 = mu * mu;
    let mut g1 = 0.0;
    let mut g2 = 0.0;
    let mut pow = 1.0;
    for j in 0..coeffs.len() / 2 {
        g2 += coeffs[2 * j] * pow;
        g1 -= coeffs[2 * j + 1] * pow;
        pow *= mu2;
    }
    (g1, g2, gampl, gammi)
}

/// Scaled (e^{x} K_μ(x), e^{x} K_{μ+1}(x)) by Steed's continued fraction, x > 2.
fn steed_k(mu: f64, x: f64) -> SpecialResult<(f64, f64)> {
    let mu2 = mu * mu;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25 - mu2;
    let mut c = a1;
    let mut q = c;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    let mut converged = false;
    for i in 2..100_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(SpecialError::Convergence {
            what: "bessel_k Steed continued fraction",
            partial: s,
            bound: f64::NAN,
        });
    }
    let h = a1 * h;
    let k_mu = (PI / (2.0 * x)).sqrt() / s;
    let k_mu1 = k_mu * (mu + x + 0.5 - h) / x;
    Ok((k_mu, k_mu1))
}

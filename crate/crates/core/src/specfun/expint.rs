//! Hyperbolic sine/cosine integrals and the scaled exponential integral.

use super::{SpecialError, SpecialResult, EULER_GAMMA};

const EPS: f64 = 1e-16;

/// (Shi(x), Chi(x)) for x > 0.
///
/// Both power series have positive terms, so they are summed directly up to
/// the overflow limit of cosh.
pub fn shi_chi(x: f64) -> SpecialResult<(f64, f64)> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecialError::Domain(format!("shi_chi: argument {x} must be finite and > 0")));
    }
    if x > 700.0 {
        return Err(SpecialError::Overflow(format!("shi_chi({x})")));
    }
    // Shi = Σ x^{2k+1} / ((2k+1)(2k+1)!),  Chi - γ - ln x = Σ_{k≥1} x^{2k} / (2k (2k)!)
    let mut fact_odd = x; // x^{2k+1}/(2k+1)!
    let mut shi = x;
    let mut chi = 0.0;
    let mut k = 1.0;
    loop {
        let fact_even = fact_odd * x / (2.0 * k);
        fact_odd = fact_even * x / (2.0 * k + 1.0);
        let te = fact_even / (2.0 * k);
        let to = fact_odd / (2.0 * k + 1.0);
        chi += te;
        shi += to;
        if te < EPS * chi && to < EPS * shi {
            break;
        }
        k += 1.0;
    }
    Ok((shi, chi + EULER_GAMMA + x.ln()))
}

/// e^{x} E₁(x) for x > 0; equals e^{x}(Shi(x) − Chi(x)) with no cancellation.
pub fn exp_e1(x: f64) -> SpecialResult<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecialError::Domain(format!("exp_e1: argument {x} must be finite and > 0")));
    }
    if x <= 1.0 {
        // E₁(x) = -γ - ln x - Σ_{k≥1} (-x)^k / (k k!)
        let mut term = 1.0;
        let mut sum = 0.0;
        let mut k = 1.0;
        loop {
            term *= -x / k;
            let t = term / k;
            sum += t;
            if t.abs() < EPS * sum.abs().max(1e-300) {
                break;
            }
            k += 1.0;
        }
        Ok(x.exp() * (-EULER_GAMMA - x.ln() - sum))
    } else {
        // Continued fraction e^{x}E₁(x) = 1/(x+1- 1/(x+3- 4/(x+5- …))), modified Lentz.
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < EPS {
                return Ok(h);
            }
        }
        Err(SpecialError::Convergence { what: "exp_e1 continued fraction", partial: h, bound: f64::NAN })
    }
}

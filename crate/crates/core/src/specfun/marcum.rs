//! First-order Marcum Q-function and its exponential approximation.

use super::bessel::bessel_i_exp_scaled;
use super::gamma::{ln_gamma, regularized_gamma_pq};
use super::{SpecialError, SpecialResult};
use crate::quad;

/// Products a·b below this use the Poisson-mixture (Bessel) series.
const SERIES_AB_LIMIT: f64 = 30.0;

/// Q₁(a, b) = ∫_b^∞ t exp(-(t² + a²)/2) I₀(a t) dt.
pub fn marcum_q1(a: f64, b: f64) -> SpecialResult<f64> {
    if !a.is_finite() || !b.is_finite() {
        return Err(SpecialError::Domain(format!("marcum_q1: non-finite input ({a}, {b})")));
    }
    if a < 0.0 || b < 0.0 {
        return Err(SpecialError::Domain(format!("marcum_q1: arguments ({a}, {b}) must be >= 0")));
    }
    if b == 0.0 {
        return Ok(1.0);
    }
    if a == 0.0 {
        return Ok((-0.5 * b * b).exp());
    }
    if a * b < SERIES_AB_LIMIT {
        series(a, b)
    } else {
        by_quadrature(a, b)
    }
}

/// Q₁(a,b) = Pr(J ≤ M) with J ~ Poisson(b²/2), M ~ Poisson(a²/2) independent.
///
/// Expanding I₀ in its power series gives Q₁ = Σ_m w_m(a²/2) Q(m+1, b²/2),
/// where w is the Poisson pmf and Q the regularized upper incomplete gamma.
/// For b < a the complement Σ_m w_m P(m+1, b²/2) is summed instead so the
/// small quantity is always accumulated directly.
fn series(a: f64, b: f64) -> SpecialResult<f64> {
    let lam = 0.5 * a * a;
    let y = 0.5 * b * b;
    let spread = 12.0 * lam.sqrt() + 30.0;
    let lo = (lam - spread).floor().max(0.0) as u64;
    let hi = (lam + spread).ceil() as u64;
    let ln_w = |m: u64| -> f64 {
        let mf = m as f64;
        mf * lam.ln() - lam - ln_gamma(mf + 1.0)
    };
    let ln_pmf_j = |j: u64| -> f64 {
        let jf = j as f64;
        jf * y.ln() - y - ln_gamma(jf + 1.0)
    };
    if b >= a {
        // Forward: Q(m+1, y) = Q(m, y) + pmf_J(m).
        let (_, mut q) = regularized_gamma_pq(lo as f64 + 1.0, y)?;
        let mut sum = 0.0;
        for m in lo..=hi {
            if m > lo {
                q += ln_pmf_j(m).exp();
            }
            sum += ln_w(m).exp() * q;
        }
        Ok(sum.clamp(0.0, 1.0))
    } else {
        // Backward: P(m+1, y) = P(m+2, y) + pmf_J(m+1).
        let (mut p, _) = regularized_gamma_pq(hi as f64 + 1.0, y)?;
        let mut sum = 0.0;
        let mut m = hi;
        loop {
            sum += ln_w(m).exp() * p;
            if m == lo {
                break;
            }
            p += ln_pmf_j(m).exp();
            m -= 1;
        }
        Ok((1.0 - sum).clamp(0.0, 1.0))
    }
}

/// Adaptive quadrature of the defining integral with an exponentially scaled
/// I₀ so the integrand stays finite; the complement is integrated when b < a.
fn by_quadrature(a: f64, b: f64) -> SpecialResult<f64> {
    let integrand = |t: f64| -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        let d = t - a;
        t * (-0.5 * d * d).exp() * bessel_i_exp_scaled(0, a * t).unwrap_or(0.0)
    };
    // Integrand is ≈ Gaussian around t ≈ a with unit width.
    let upper = a + 40.0;
    let run = |lo: f64, hi: f64| -> SpecialResult<f64> {
        if hi <= lo {
            return Ok(0.0);
        }
        let mut pts = vec![lo];
        let (c_lo, c_hi) = ((a - 8.0).max(lo), (a + 8.0).min(hi));
        if c_lo > lo && c_lo < hi {
            pts.push(c_lo);
        }
        if c_hi > *pts.last().unwrap() && c_hi < hi {
            pts.push(c_hi);
        }
        pts.push(hi);
        quad::integrate_pieces(integrand, &pts, 1e-17, 1e-13)
            .map(|r| r.value)
            .map_err(|e| SpecialError::Convergence {
                what: "marcum_q1 quadrature",
                partial: f64::NAN,
                bound: match e {
                    quad::QuadError::NoConvergence { error, .. } => error,
                    _ => f64::NAN,
                },
            })
    };
    if b >= a {
        Ok(run(b, upper.max(b))?.clamp(0.0, 1.0))
    } else {
        let lower_lo = (a - 40.0).max(0.0);
        Ok((1.0 - run(lower_lo.min(b), b)?).clamp(0.0, 1.0))
    }
}

/// Polynomial exponent v(ϖ) of the Marcum-Q exponential approximation.
pub fn approx_v(varpi: f64) -> f64 {
    let w = varpi;
    -0.840 + w * (0.327 + w * (-0.740 + w * (0.083 - 0.004 * w)))
}

/// Polynomial power μ(ϖ) of the Marcum-Q exponential approximation.
pub fn approx_mu(varpi: f64) -> f64 {
    let w = varpi;
    2.174 + w * (-0.592 + w * (0.593 + w * (-0.092 + 0.005 * w)))
}

/// Q₁(ϖ, z) ≈ exp(-e^{v(ϖ)} z^{μ(ϖ)}).
pub fn marcum_q1_exp_approx(varpi: f64, z: f64) -> SpecialResult<f64> {
    if !varpi.is_finite() || !z.is_finite() {
        return Err(SpecialError::Domain(format!(
            "marcum_q1_exp_approx: non-finite input ({varpi}, {z})"
        )));
    }
    if varpi < 0.0 || z < 0.0 {
        return Err(SpecialError::Domain(format!(
            "marcum_q1_exp_approx: arguments ({varpi}, {z}) must be >= 0"
        )));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    Ok((-(approx_v(varpi).exp()) * z.powf(approx_mu(varpi))).exp())
}

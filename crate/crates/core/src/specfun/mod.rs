//! Special functions: gamma family, Bessel I/K, Marcum Q₁, Meijer G,
//! hyperbolic integrals and the half-order Laguerre function.

mod bessel;
mod expint;
mod gamma;
mod marcum;
mod meijer;

use thiserror::Error;

pub use bessel::{bessel_i, bessel_i_exp_scaled, bessel_k, ln_bessel_k};
pub use expint::{exp_e1, shi_chi};
pub use gamma::{
    digamma, gamma, ln_gamma, ln_gamma_complex, ln_gamma_signed, lower_incomplete_gamma,
    regularized_gamma_pq, trigamma, upper_incomplete_gamma,
};
pub use marcum::{approx_mu, approx_v, marcum_q1, marcum_q1_exp_approx};
pub use meijer::{
    ln_meijer_g_m0_0m, meijer_g_m0_0m, meijer_g_m0_0m_parts, residue_series_m0_0m, MeijerG,
    MeijerG0mParams, MeijerMethod, MeijerParts, COLLISION_TOL, SERIES_MAX_TERMS, SERIES_TOL,
};

/// Euler–Mascheroni constant γ.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("{what} did not converge (partial value {partial}, bound {bound})")]
    Convergence {
        what: &'static str,
        partial: f64,
        bound: f64,
    },
}

pub type SpecialResult<T> = Result<T, SpecialError>;

/// L_{1/2}(−ε) = e^{−ε/2}[(1+ε) I₀(ε/2) + ε I₁(ε/2)], taking ε ≥ 0.
pub fn laguerre_half(eps: f64) -> SpecialResult<f64> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(SpecialError::Domain(format!("laguerre_half: epsilon {eps} must be finite and >= 0")));
    }
    let h = 0.5 * eps;
    // e^{−ε/2} I_n(ε/2) is exactly the scaled Bessel value.
    let i0 = bessel_i_exp_scaled(0, h)?;
    let i1 = bessel_i_exp_scaled(1, h)?;
    Ok((1.0 + eps) * i0 + eps * i1)
}

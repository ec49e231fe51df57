//! Secrecy outage probability and ergodic secrecy capacity.

use std::f64::consts::{LN_10, LN_2, PI};

use crate::analytic_dist::{
    gamma_fit, kappa, ln_xi2_theta2_rho_d, pdf_from_params, varpi_xi, EveTailParams, GammaFit,
};
use crate::error::{Error, Result};
use crate::quad;
use crate::specfun::{
    exp_e1, laguerre_half, ln_bessel_k, ln_gamma, meijer_g_m0_0m_parts, regularized_gamma_pq,
    MeijerG, MeijerG0mParams, MeijerParts, SpecialError, EULER_GAMMA,
};
use crate::sysmodel::SystemConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quadrature,
    ClosedForm,
    SpecialCaseA2_2,
    SpecialCaseA2_4,
    Asymptotic,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Quadrature => "quadrature",
            Method::ClosedForm => "closed_form",
            Method::SpecialCaseA2_2 => "special_case_a2_2",
            Method::SpecialCaseA2_4 => "special_case_a2_4",
            Method::Asymptotic => "asymptotic",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    /// Series terms summed by the G-function evaluation (0 when not applicable).
    pub series_terms: usize,
    /// Absolute quadrature error estimate.
    pub quad_error: f64,
    /// Set when the outage shape k was nudged off a pole collision.
    pub perturbed: bool,
    /// Ergodic rates (bits/s/Hz) of the user and the strongest eavesdropper, for ESC results.
    pub rate_d: Option<f64>,
    pub rate_e: Option<f64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecrecyResult {
    pub value: f64,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

impl SecrecyResult {
    fn new(value: f64, method: Method) -> Self {
        Self { value, method, diagnostics: Diagnostics::default() }
    }
}

/// Best rational p/q to `x` with q ≤ `max_den`, accepted when within `tol`.
pub fn rationalize(x: f64, max_den: u32, tol: f64) -> Option<(u32, u32)> {
    if !(x > 0.0) || !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let a_int = a as u64;
        let h2 = a_int.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a_int.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den as u64 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Some((u32::try_from(h1).ok()?, k1 as u32));
        }
        let frac = r - a;
        if frac < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

fn rational_alpha(cfg: &SystemConfig) -> Result<(u32, u32)> {
    rationalize(cfg.alpha2, 16, 1e-9).ok_or_else(|| {
        Error::Unavailable(format!(
            "alpha2 = {} is not a ratio p/q with q <= 16; use the quadrature method",
            cfg.alpha2
        ))
    })
}

/// ln(t₀Γ(t₁) φ^{t₄} (ρ_d θ²)^{−t₄}), the scale of the outage exponent after averaging over γ_D.
fn ln_outage_scale(cfg: &SystemConfig, p: &EveTailParams) -> Result<f64> {
    let a2 = cfg.alpha2;
    let ln_s_free = (2.0 * PI * cfg.lambda_e).ln() - (0.5 * a2 * p.mu).ln() - 4.0 * p.v / (a2 * p.mu)
        + ln_gamma(p.t1);
    Ok(ln_s_free + p.t4 * cfg.C_th - p.t4 * ln_xi2_theta2_rho_d(cfg)?)
}

/// y with Q(k, y) below 1e-18.
fn gamma_upper_quantile(k: f64) -> Result<f64> {
    let mut hi = k + 10.0 * k.sqrt() + 50.0;
    while regularized_gamma_pq(k, hi)?.1 > 1e-18 {
        hi *= 1.5;
    }
    Ok(hi)
}

/// SOP = F_{γD}(φ−1)·F_{γE}(0⁺) + ∫₀^∞ F_{γD}((1+x)φ−1) f_{γE}(x) dx, with the finite-disk eavesdropper law.
pub fn sop_quadrature(cfg: &SystemConfig) -> Result<SecrecyResult> {
    cfg.validate()?;
    let g = gamma_fit(cfg)?;
    let p = varpi_xi(cfg)?;
    let phi = cfg.phi();
    let rho_d = cfg.rho_d();
    let f_d = |y: f64| -> Result<f64> {
        if y <= 0.0 {
            return Ok(0.0);
        }
        Ok(regularized_gamma_pq(g.k, (y / rho_d).sqrt() / g.theta)?.0)
    };
    let no_eve = (-cfg.mean_eavesdroppers()).exp();
    let point = f_d(phi - 1.0)? * no_eve;

    // Above x_hi the user CDF is 1 to working precision, leaving 1 − F_E(x_hi).
    let y_hi = gamma_upper_quantile(g.k)?;
    let x_hi = ((rho_d * (g.theta * y_hi).powi(2) + 1.0) / phi).max(1.0);
    let x_lo = (1e-17 / p.t2).powf(1.0 / p.t3).min(x_hi * 1e-30);
    let x_mid = (p.ln_s / p.t4).exp();
    let x_med = rho_d * (g.theta * g.k).powi(2) / phi;

    let mut err = None;
    let integrand = |u: f64| -> f64 {
        let x = u.exp();
        let r = f_d((1.0 + x) * phi - 1.0).and_then(|fd| Ok(fd * pdf_from_params(x, &p)? * x));
        r.unwrap_or_else(|e| {
            err = Some(e);
            0.0
        })
    };
    let (u_lo, u_hi) = (x_lo.ln(), x_hi.ln());
    let mut pts = vec![u_lo];
    let mut marks: Vec<f64> = [x_mid, x_med]
        .iter()
        .flat_map(|&c| [c / 100.0, c / 10.0, c, c * 10.0, c * 100.0])
        .map(f64::ln)
        .filter(|&u| u > u_lo && u < u_hi)
        .collect();
    marks.sort_by(f64::total_cmp);
    marks.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
    pts.extend(marks);
    pts.push(u_hi);
    let r = quad::integrate_pieces(integrand, &pts, 1e-13, 1e-11)?;
    if let Some(e) = err {
        return Err(e);
    }
    let tail = -(-p.exponent(x_hi)?).exp_m1();
    let value = (point + r.value + tail).clamp(0.0, 1.0);
    let mut out = SecrecyResult::new(value, Method::Quadrature);
    out.diagnostics.quad_error = r.error;
    Ok(out)
}

fn large_disk_warning(cfg: &SystemConfig, p: &EveTailParams) -> Option<String> {
    // At the bulk of the eavesdropper law, γ(t₁, z) ≈ Γ(t₁) needs z well above t₁.
    let x_mid = (p.ln_s / p.t4).exp();
    let z = p.t2 * x_mid.powf(p.t3);
    (z < 10.0 * p.t1 + 20.0).then(|| {
        format!("r_e = {} may be too small for the large-disk closed form (t2*x^t3 = {z:.3} at the eavesdropper median)", cfg.r_e)
    })
}

/// 1 − c·G from scaled G parts. Near c·G = 1 the leading residue (which equals 1/c·x^{Δ₀}
/// with Δ₀ = 0) is subtracted analytically; elsewhere the plain complement is already accurate.
fn outage_complement(ln_c: f64, parts: &MeijerParts) -> f64 {
    let cg = (ln_c + parts.ln_scale).exp() * parts.total;
    let value = if cg < 0.5 { 1.0 - cg } else { -(ln_c + parts.ln_scale).exp() * parts.without_leading };
    value.clamp(0.0, 1.0)
}

/// SOP ≈ 1 − c·G^{p+4q,0}_{0,p+4q}(arg | —; Δ) for α₂ = p/q.
pub fn sop_closed_form(cfg: &SystemConfig) -> Result<SecrecyResult> {
    cfg.validate()?;
    let (p_int, q_int) = rational_alpha(cfg)?;
    let g = gamma_fit(cfg)?;
    let tail = varpi_xi(cfg)?;
    let (p, q) = (p_int as f64, q_int as f64);
    let ln_arg = p * ln_outage_scale(cfg, &tail)? - p * p.ln() - 4.0 * q * (4.0 * q).ln();
    if !(ln_arg > f64::MIN_POSITIVE.ln() && ln_arg < f64::MAX.ln()) {
        return Err(Error::Special(SpecialError::Overflow(format!(
            "outage G-function argument e^{ln_arg:.1} is outside the f64 range"
        ))));
    }
    let (params, perturbed) = MeijerG0mParams::outage_vector(p_int, q_int, g.k, ln_arg.exp())?;
    let parts = meijer_g_m0_0m_parts(&params)?;
    // c is the reciprocal of the leading residue Π_{j≥1} Γ(Δ_j − Δ₀), so c·G → 1 as arg → 0.
    let d0 = params.orders[0];
    let ln_c: f64 = -params.orders[1..].iter().map(|&d| ln_gamma(d - d0)).sum::<f64>();
    let value = outage_complement(ln_c, &parts);
    let mut out = SecrecyResult::new(value, Method::ClosedForm);
    out.diagnostics.series_terms = parts.terms;
    out.diagnostics.perturbed = perturbed;
    out.diagnostics.warnings.extend(large_disk_warning(cfg, &tail));
    Ok(out)
}

fn require_alpha(cfg: &SystemConfig, alpha: f64, what: &str) -> Result<()> {
    if (cfg.alpha2 - alpha).abs() > 1e-12 {
        return Err(Error::Unavailable(format!("{what} requires alpha2 = {alpha} (got {})", cfg.alpha2)));
    }
    Ok(())
}

/// α₂ = 2: 1 − 2^{k−1}/(√π Γ(k)) · G^{3,0}_{0,3}(c/4 | 0, k/2, (k+1)/2), c = t₀Γ(t₁)φ/(ρ_d θ²).
pub fn sop_corollary_a2_2(cfg: &SystemConfig) -> Result<SecrecyResult> {
    cfg.validate()?;
    require_alpha(cfg, 2.0, "sop_corollary_a2_2")?;
    let g = gamma_fit(cfg)?;
    let tail = varpi_xi(cfg)?;
    let ln_c = ln_outage_scale(cfg, &tail)?;
    let params = MeijerG0mParams::new(vec![0.0, 0.5 * g.k, 0.5 * (g.k + 1.0)], (ln_c - 4f64.ln()).exp())?;
    let parts = meijer_g_m0_0m_parts(&params)?;
    let ln_coef = (g.k - 1.0) * LN_2 - 0.5 * PI.ln() - ln_gamma(g.k);
    let value = outage_complement(ln_coef, &parts);
    let mut out = SecrecyResult::new(value, Method::SpecialCaseA2_2);
    out.diagnostics.series_terms = parts.terms;
    Ok(out)
}

/// α₂ = 4: 1 − (2/Γ(k)) c^{k/2} K_k(2√c), c = t₀Γ(t₁)√φ/(√ρ_d θ).
pub fn sop_bessel_a2_4(cfg: &SystemConfig) -> Result<SecrecyResult> {
    cfg.validate()?;
    require_alpha(cfg, 4.0, "sop_bessel_a2_4")?;
    let g = gamma_fit(cfg)?;
    let tail = varpi_xi(cfg)?;
    let ln_c = ln_outage_scale(cfg, &tail)?;
    let c = ln_c.exp();
    let ln_term = LN_2 - ln_gamma(g.k) + 0.5 * g.k * ln_c + ln_bessel_k(g.k, 2.0 * c.sqrt())?;
    let value = (-ln_term.exp_m1()).clamp(0.0, 1.0);
    Ok(SecrecyResult::new(value, Method::SpecialCaseA2_4))
}

/// High-ρ_d SOP: t₀Γ(t₁)φ^{2/α₂}Γ(k−4/α₂)/(θ^{4/α₂}Γ(k)) ρ_d^{−2/α₂}.
pub fn sop_asymptotic(cfg: &SystemConfig) -> Result<SecrecyResult> {
    cfg.validate()?;
    let g = gamma_fit(cfg)?;
    let tail = varpi_xi(cfg)?;
    let shift = g.k - 4.0 / cfg.alpha2;
    if shift <= 0.0 {
        return Err(Error::Special(SpecialError::Domain(format!(
            "asymptotic SOP needs k > 4/alpha2 (k = {}, 4/alpha2 = {})",
            g.k,
            4.0 / cfg.alpha2
        ))));
    }
    let ln_v = ln_outage_scale(cfg, &tail)? + ln_gamma(shift) - ln_gamma(g.k);
    Ok(SecrecyResult::new(ln_v.exp(), Method::Asymptotic))
}

/// Secrecy diversity order 2/α₂.
pub fn secrecy_diversity_order(cfg: &SystemConfig) -> f64 {
    2.0 / cfg.alpha2
}

/// −Δlog₁₀ SOP / Δlog₁₀ ρ_d of the closed form between two ρ_d values (dB).
pub fn fitted_diversity_order(cfg: &SystemConfig, lo_db: f64, hi_db: f64) -> Result<f64> {
    let at = |db: f64| -> Result<f64> {
        let c = SystemConfig { rho_d_dB: db, ..cfg.clone() };
        Ok(sop_closed_form(&c)?.value)
    };
    let (lo, hi) = (at(lo_db)?, at(hi_db)?);
    if !(lo > 0.0 && hi > 0.0) {
        return Err(Error::Special(SpecialError::Domain("SOP underflowed while fitting the slope".into())));
    }
    Ok(-(hi.log10() - lo.log10()) / ((hi_db - lo_db) / 10.0))
}

/// R_D via (1/ln2)·2^{k−1}/(√πΓ(k)) G^{4,1}_{2,4}(1/(4ρ_dθ²) | 0, 1; 0, 0, k/2, (k+1)/2).
pub fn rate_d_closed(cfg: &SystemConfig) -> Result<f64> {
    let g = gamma_fit(cfg)?;
    let z = 1.0 / (4.0 * cfg.rho_d() * g.theta * g.theta);
    let spec = MeijerG::new(vec![0.0], vec![1.0], vec![0.0, 0.0, 0.5 * g.k, 0.5 * (g.k + 1.0)], vec![]);
    let (ln_g, sign) = spec.ln_eval(z)?;
    let ln_coef = (g.k - 1.0) * LN_2 - 0.5 * PI.ln() - ln_gamma(g.k);
    Ok(sign * (ln_coef + ln_g).exp() / LN_2)
}

/// R_D = (1/ln2) ∫₀^∞ Q(k, y) · 2cy/(1+cy²) dy with c = ρ_dθ² (integration by parts of E[ln(1+γ_D)]).
pub fn rate_d_quadrature(cfg: &SystemConfig) -> Result<(f64, f64)> {
    let GammaFit { k, theta } = gamma_fit(cfg)?;
    let c = cfg.rho_d() * theta * theta;
    let y_hi = gamma_upper_quantile(k)?;
    let mut err = None;
    let f = |y: f64| -> f64 {
        match regularized_gamma_pq(k, y) {
            Ok((_, q)) => q * 2.0 * c * y / (1.0 + c * y * y),
            Err(e) => {
                err = Some(e);
                0.0
            }
        }
    };
    let s = k.sqrt();
    let mut pts = vec![0.0];
    let knee = 1.0 / c.sqrt();
    for x in [knee / 10.0, knee, knee * 10.0, k - 4.0 * s, k - s, k, k + s, k + 4.0 * s] {
        if x > *pts.last().unwrap() && x < y_hi {
            pts.push(x);
        }
    }
    pts.push(y_hi);
    let r = quad::integrate_pieces(f, &pts, 1e-14, 1e-12)?;
    if let Some(e) = err {
        return Err(e.into());
    }
    Ok((r.value / LN_2, r.error / LN_2))
}

/// R_E = (1/ln2) ∫₀^∞ (1 − F_{γE}(x))/(1+x) dx with the finite-disk closed-form CDF.
pub fn rate_e_quadrature(cfg: &SystemConfig) -> Result<(f64, f64)> {
    let p = varpi_xi(cfg)?;
    let survival = |x: f64| -> Result<f64> { Ok(-(-p.exponent(x)?).exp_m1()) };
    // Below x_lo the eavesdropper CDF equals its x → 0 limit to ~1e-15.
    let x_lo = (1e-15 / p.t2).powf(1.0 / p.t3).min(1e-12);
    let head = -(-cfg.mean_eavesdroppers()).exp_m1() * x_lo.ln_1p();
    // Above x_hi, 1 − F_E = t₀Γ(t₁)x^{−t₄}(1 + O(1e-10)) and 1/(1+x) = 1/x (1 + O(1e-10)).
    let ln_x_tail = (p.ln_s - (1e-10f64).ln()) / p.t4;
    let u_hi = ln_x_tail.max(10.0 * LN_10);
    let tail = (p.ln_s - p.t4 * u_hi).exp() / p.t4;
    let mut err = None;
    let f = |u: f64| -> f64 {
        let x = u.exp();
        match survival(x) {
            Ok(s) => s * x / (1.0 + x),
            Err(e) => {
                err = Some(e);
                0.0
            }
        }
    };
    let u_lo = x_lo.ln();
    let u_mid = p.ln_s / p.t4;
    let mut pts = vec![u_lo];
    for u in [u_mid - 10.0, u_mid - 3.0, u_mid, u_mid + 3.0, u_mid + 10.0, 0.0] {
        pts.push(u.clamp(u_lo, u_hi));
    }
    pts.push(u_hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let r = quad::integrate_pieces(f, &pts, 1e-13, 1e-12)?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(((head + r.value + tail) / LN_2, r.error / LN_2))
}

/// ESC = [R_D − R_E]⁺ with R_D cross-checked between the G-function and quadrature paths.
pub fn esc(cfg: &SystemConfig) -> Result<SecrecyResult> {
    cfg.validate()?;
    let (rd_q, rd_err) = rate_d_quadrature(cfg)?;
    let rd_c = rate_d_closed(cfg)?;
    if (rd_c - rd_q).abs() > 1e-6 * rd_q.abs().max(1e-300) {
        return Err(Error::Special(SpecialError::Convergence {
            what: "R_D closed form and quadrature disagree",
            partial: rd_c,
            bound: rd_q,
        }));
    }
    let (re, re_err) = rate_e_quadrature(cfg)?;
    let mut out = SecrecyResult::new((rd_c - re).max(0.0), Method::Quadrature);
    out.diagnostics.quad_error = rd_err + re_err;
    out.diagnostics.rate_d = Some(rd_c);
    out.diagnostics.rate_e = Some(re);
    Ok(out)
}

/// R_{E,1} = (1/ln2)(γ + ln S + e^S E₁(S)), S = t₀Γ(t₁), for α₂ = 2.
pub fn rate_e_a2_2(cfg: &SystemConfig) -> Result<f64> {
    require_alpha(cfg, 2.0, "rate_e_a2_2")?;
    let p = varpi_xi(cfg)?;
    let s = p.ln_s.exp();
    if s < 1e-8 {
        // γ + ln S + e^S E₁(S) = S(1 − ln S − γ) + O(S² ln S); direct evaluation cancels.
        return Ok(s * (1.0 - p.ln_s - EULER_GAMMA) / LN_2);
    }
    Ok((EULER_GAMMA + p.ln_s + exp_e1(s)?) / LN_2)
}

/// R_{E,2} = (1/ln2)(1/√π) G^{3,2}_{2,4}(S²/4 | 1, 1; 1/2, 1, 1, 0), S = t₀Γ(t₁), for α₂ = 4.
pub fn rate_e_a2_4(cfg: &SystemConfig) -> Result<f64> {
    require_alpha(cfg, 4.0, "rate_e_a2_4")?;
    let p = varpi_xi(cfg)?;
    let spec = MeijerG::new(vec![1.0, 1.0], vec![], vec![0.5, 1.0, 1.0], vec![0.0]);
    let (ln_g, sign) = spec.ln_eval((2.0 * p.ln_s - 4f64.ln()).exp())?;
    Ok(sign * (ln_g - 0.5 * PI.ln()).exp() / LN_2)
}

fn esc_special(cfg: &SystemConfig, re: f64, method: Method) -> Result<SecrecyResult> {
    let rd = rate_d_closed(cfg)?;
    let mut out = SecrecyResult::new((rd - re).max(0.0), method);
    out.diagnostics.rate_d = Some(rd);
    out.diagnostics.rate_e = Some(re);
    Ok(out)
}

pub fn esc_a2_2(cfg: &SystemConfig) -> Result<SecrecyResult> {
    cfg.validate()?;
    esc_special(cfg, rate_e_a2_2(cfg)?, Method::SpecialCaseA2_2)
}

pub fn esc_a2_4(cfg: &SystemConfig) -> Result<SecrecyResult> {
    cfg.validate()?;
    esc_special(cfg, rate_e_a2_4(cfg)?, Method::SpecialCaseA2_4)
}

/// Jensen bound log₂(1 + ρ_d K N ν μ_D (1 + (π/4)(N−1)L²/(ε+1))) on R_D.
pub fn rd_upper_bound(cfg: &SystemConfig) -> Result<f64> {
    let l = laguerre_half(cfg.epsilon)?;
    let n = cfg.N as f64;
    let gain = 1.0 + 0.25 * PI * (n - 1.0) * l * l / (cfg.epsilon + 1.0);
    Ok((cfg.rho_d() * cfg.K as f64 * n * cfg.nu() * cfg.mu_d() * gain).ln_1p() / LN_2)
}

/// High-SNR ESC for α₂ = 2, assembled from dB differences so that it depends on ρ_d/ρ_e only.
pub fn esc_asymptotic(cfg: &SystemConfig) -> Result<SecrecyResult> {
    cfg.validate()?;
    require_alpha(cfg, 2.0, "esc_asymptotic")?;
    let eps = cfg.epsilon;
    let l = laguerre_half(eps)?;
    let n = cfg.N as f64;
    let p = varpi_xi(cfg)?;
    let kap = kappa(eps)?;
    let log2 = |x: f64| x.log2();
    let snr_term = (cfg.rho_d_dB - cfg.rho_e_dB) / 10.0 * 10f64.log2();
    let geometry = log2(cfg.d_RD.powf(-cfg.alpha2) / (PI * cfg.lambda_e));
    let array = log2((1.0 + (n - 1.0) * 0.25 * PI * l * l / (eps + 1.0)) / (1.0 - kap));
    let shape = log2(p.mu * (2.0 * p.v / p.mu).exp()) - ln_gamma(2.0 / p.mu) / LN_2;
    let value = snr_term + geometry + array - EULER_GAMMA / LN_2 + shape;
    Ok(SecrecyResult::new(value.max(0.0), Method::Asymptotic))
}

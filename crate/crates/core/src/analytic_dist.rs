//! Closed-form SNR distributions of the legitimate user and of the strongest
//! PPP eavesdropper.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad;
use crate::specfun::{
    approx_mu, approx_v, laguerre_half, ln_gamma, marcum_q1, regularized_gamma_pq,
};
use crate::sysmodel::{path_loss, SystemConfig};

/// κ = ε² / ((π/4)(ε+1) L²), the LoS share of the eavesdropper variance.
pub fn kappa(eps: f64) -> Result<f64> {
    let l = laguerre_half(eps)?;
    Ok(eps * eps / (0.25 * PI * (eps + 1.0) * l * l))
}

/// (1+ε−(π/4)L²) / ((√π/2) L).
fn scale_factor(eps: f64) -> Result<f64> {
    let l = laguerre_half(eps)?;
    Ok((1.0 + eps - 0.25 * PI * l * l) / (0.5 * PI.sqrt() * l))
}

/// Gamma approximation of |A| = √(Kν) Σ|h_RD(n)|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaFit {
    pub k: f64,
    pub theta: f64,
}

pub fn gamma_fit(cfg: &SystemConfig) -> Result<GammaFit> {
    let eps = cfg.epsilon;
    if !(eps >= 0.0) {
        return Err(Error::Config("epsilon must be >= 0".into()));
    }
    let l = laguerre_half(eps)?;
    let q = 0.25 * PI * l * l;
    let k = cfg.N as f64 * q / (1.0 + eps - q);
    let theta = (cfg.K as f64).sqrt() * (cfg.mu_d() * cfg.nu() / (eps + 1.0)).sqrt() * scale_factor(eps)?;
    Ok(GammaFit { k, theta })
}

/// F_{γD}(x) = γ(k, √(x/ρ_d)/θ) / Γ(k).
pub fn cdf_gamma_d(x: f64, cfg: &SystemConfig) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Config(format!("cdf_gamma_d: x = {x} must be >= 0")));
    }
    let g = gamma_fit(cfg)?;
    let y = (x / cfg.rho_d()).sqrt() / g.theta;
    Ok(regularized_gamma_pq(g.k, y)?.0)
}

/// f_{γD}(x) = e^{-y} y^k / (2Γ(k) x), y = √(x/ρ_d)/θ.
pub fn pdf_gamma_d(x: f64, cfg: &SystemConfig) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Config(format!("pdf_gamma_d: x = {x} must be >= 0")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let g = gamma_fit(cfg)?;
    let y = (x / cfg.rho_d()).sqrt() / g.theta;
    Ok((-y + g.k * y.ln() - ln_gamma(g.k) - (2.0 * x).ln()).exp())
}

/// E{γ_D} = (π L²/(4(ε+1))) ρ_d μ_D ν K N².
pub fn mean_gamma_d(cfg: &SystemConfig) -> Result<f64> {
    let eps = cfg.epsilon;
    let l = laguerre_half(eps)?;
    let n = cfg.N as f64;
    Ok(PI * l * l / (4.0 * (eps + 1.0)) * cfg.rho_d() * cfg.mu_d() * cfg.nu() * cfg.K as f64 * n * n)
}

/// (δ₁, δ₂) between the user direction and an eavesdropper direction.
pub fn deltas(user: (f64, f64), eve: (f64, f64)) -> (f64, f64) {
    let (ua, ue) = user;
    let (ea, ee) = eve;
    (ua.sin() * ue.sin() - ea.sin() * ee.sin(), ue.cos() - ee.cos())
}

/// One sinc-ratio factor sin(π s √N δ)/sin(π s δ), with the limit ±√N at the zeros of the denominator.
fn sinc_ratio(side: f64, spacing: f64, delta: f64) -> f64 {
    let den = (PI * spacing * delta).sin();
    if den.abs() < 1e-8 {
        // sin(Mx)/sin(x) → M·cos(Mπj)/cos(πj) at x = πj
        let j = (spacing * delta).round();
        let sign = if ((side - 1.0) * j).rem_euclid(2.0) < 0.5 { 1.0 } else { -1.0 };
        return sign * side;
    }
    (PI * spacing * side * delta).sin() / den
}

/// Product of the two sinc-ratio factors of the planar array.
pub fn array_factor(n: u32, spacing: f64, d1: f64, d2: f64) -> f64 {
    let side = (n as f64).sqrt();
    sinc_ratio(side, spacing, d1) * sinc_ratio(side, spacing, d2)
}

/// Complex Gaussian fit (M, V) of Z_{E_m} for an eavesdropper at `radius` seen under `eve_angles`.
pub fn eve_gauss_fit(cfg: &SystemConfig, radius: f64, eve_angles: (f64, f64)) -> Result<(Complex64, f64)> {
    let eps = cfg.epsilon;
    let kap = kappa(eps)?;
    let mu_e = path_loss(cfg.beta0, radius, cfg.alpha2);
    let user = (cfg.angles.rd_azimuth, cfg.angles.rd_elevation);
    let (d1, d2) = deltas(user, eve_angles);
    let s = cfg.element_spacing_ratio;
    let af = array_factor(cfg.N, s, d1, d2);
    let side = (cfg.N as f64).sqrt();
    let mag = (mu_e * kap).sqrt() * af;
    let m = Complex64::from_polar(1.0, PI * s * (side - 1.0) * (d1 + d2)) * mag;
    let v = cfg.N as f64 * mu_e * (1.0 - kap);
    assert!(v > 0.0 || eps == 0.0 && mu_e == 0.0, "eve_gauss_fit: non-positive variance");
    Ok((m, v))
}

/// Per-eavesdropper CDF 1 − Q₁(s/σ, √x/σ) at a fixed radius.
pub fn cdf_gamma_e_single(x: f64, cfg: &SystemConfig, radius: f64, eve_angles: (f64, f64)) -> Result<f64> {
    if !(x >= 0.0) || !(radius > 0.0) {
        return Err(Error::Config("cdf_gamma_e_single: need x >= 0 and radius > 0".into()));
    }
    let (m, v) = eve_gauss_fit(cfg, radius, eve_angles)?;
    let scale = cfg.rho_e() * cfg.K as f64 * cfg.nu();
    let s = (scale).sqrt() * m.norm();
    let sigma = (0.5 * scale * v).sqrt();
    Ok(1.0 - marcum_q1(s / sigma, x.sqrt() / sigma)?)
}

/// Constants of the aggregate eavesdropper CDF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EveTailParams {
    pub varpi: f64,
    pub xi: f64,
    pub v: f64,
    pub mu: f64,
    pub t0: f64,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub t4: f64,
    /// ln(t₀ Γ(t₁)), assembled without forming Ξ (free of K and ν).
    pub ln_s: f64,
}

impl EveTailParams {
    /// Non-central χ² parameters (s, σ²) of one eavesdropper at `radius`.
    pub fn s_sigma2(&self, cfg: &SystemConfig, radius: f64) -> (f64, f64) {
        let sigma = 1.0 / (self.xi * radius.powf(0.5 * cfg.alpha2));
        (self.varpi * sigma, sigma * sigma)
    }

    /// t₀ γ(t₁, t₂x^{t₃}) x^{−t₄}, the exponent of the closed-form CDF.
    pub fn exponent(&self, x: f64) -> Result<f64> {
        let z = self.t2 * x.powf(self.t3);
        let (p, _) = regularized_gamma_pq(self.t1, z)?;
        Ok((self.ln_s - self.t4 * x.ln()).exp() * p)
    }
}

/// ϖ, Ξ and t₀…t₄ for an explicit reference direction.
pub fn varpi_xi_at(cfg: &SystemConfig, eve_angles: (f64, f64)) -> Result<EveTailParams> {
    let eps = cfg.epsilon;
    let kap = kappa(eps)?;
    let n = cfg.N as f64;
    let user = (cfg.angles.rd_azimuth, cfg.angles.rd_elevation);
    let (d1, d2) = deltas(user, eve_angles);
    let af = array_factor(cfg.N, cfg.element_spacing_ratio, d1, d2);
    let varpi = if kap > 0.0 { 2f64.sqrt() * af.abs() / (n * (1.0 / kap - 1.0)).sqrt() } else { 0.0 };
    let xi2 = 2.0 / (n * cfg.K as f64 * cfg.nu() * cfg.beta0 * cfg.rho_e() * (1.0 - kap));
    let xi = xi2.sqrt();
    let a2 = cfg.alpha2;
    let v = approx_v(varpi);
    let mu = approx_mu(varpi);
    let t1 = 2.0 / (0.5 * a2 * mu);
    let t3 = 0.5 * mu;
    let t4 = 2.0 / a2;
    let t2 = (v + mu * xi.ln() + 0.5 * a2 * mu * cfg.r_e.ln()).exp();
    let ln_t0 = (2.0 * PI * cfg.lambda_e).ln() - (0.5 * a2 * mu).ln() - 4.0 * v / (a2 * mu) - t4 * xi2.ln();
    let t0 = ln_t0.exp();
    Ok(EveTailParams { varpi, xi, v, mu, t0, t1, t2, t3, t4, ln_s: ln_t0 + ln_gamma(t1) })
}

/// ϖ, Ξ and t₀…t₄ for the configured reference eavesdropper direction.
pub fn varpi_xi(cfg: &SystemConfig) -> Result<EveTailParams> {
    varpi_xi_at(cfg, (cfg.angles.eve_azimuth, cfg.angles.eve_elevation))
}

/// ln(Ξ²θ²ρ_d), formed so that K, ν and the absolute SNR level drop out exactly.
pub fn ln_xi2_theta2_rho_d(cfg: &SystemConfig) -> Result<f64> {
    let eps = cfg.epsilon;
    let kap = kappa(eps)?;
    let b = scale_factor(eps)?;
    let core = 2.0 * cfg.mu_d() * b * b / (cfg.N as f64 * cfg.beta0 * (1.0 - kap) * (eps + 1.0));
    Ok(core.ln() + cfg.ln_rho_ratio())
}

/// Marcum-Q kernel inside the PGFL integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarcumKernel {
    Exact,
    Approx,
}

/// F_{γE}(x) = exp[−2πλ_e ∫₀^{r_e} Q₁(ϖ, Ξ√x r^{α₂/2}) r dr] by adaptive quadrature.
pub fn cdf_gamma_e(x: f64, cfg: &SystemConfig, kernel: MarcumKernel) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Config(format!("cdf_gamma_e: x = {x} must be > 0")));
    }
    let p = varpi_xi(cfg)?;
    let c = p.xi * x.sqrt();
    let half_a = 0.5 * cfg.alpha2;
    // Beyond this radius the kernel is below e^{-300}.
    let z_cut = match kernel {
        MarcumKernel::Exact => p.varpi + 40.0,
        MarcumKernel::Approx => (300.0 / p.v.exp()).powf(1.0 / p.mu),
    };
    let r_cut = (z_cut / c).powf(1.0 / half_a).min(cfg.r_e);
    let mut err = None;
    let integrand = |r: f64| -> f64 {
        let z = c * r.powf(half_a);
        let q = match kernel {
            MarcumKernel::Exact => marcum_q1(p.varpi, z),
            MarcumKernel::Approx => Ok((-(p.v.exp()) * z.powf(p.mu)).exp()),
        };
        match q {
            Ok(q) => q * r,
            Err(e) => {
                err = Some(e);
                0.0
            }
        }
    };
    let z_knee = (p.varpi + 1.0).max(1.0);
    let r_knee = (z_knee / c).powf(1.0 / half_a);
    let mut pts = vec![0.0];
    for f in [0.25, 0.5, 1.0, 1.5, 2.0] {
        let r = f * r_knee;
        if r < r_cut {
            pts.push(r);
        }
    }
    pts.push(r_cut);
    let scale = r_cut * r_cut;
    let r = quad::integrate_pieces(integrand, &pts, 1e-13 * scale, 1e-11)?;
    if let Some(e) = err {
        return Err(e.into());
    }
    Ok((-2.0 * PI * cfg.lambda_e * r.value).exp())
}

/// Closed-form F_{γE}(x) = exp[−t₀(Γ(t₁) − Γ(t₁, t₂x^{t₃}))/x^{t₄}].
pub fn cdf_gamma_e_closed(x: f64, cfg: &SystemConfig) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Config(format!("cdf_gamma_e_closed: x = {x} must be > 0")));
    }
    let p = varpi_xi(cfg)?;
    Ok((-p.exponent(x)?).exp())
}

/// Derivative of [`cdf_gamma_e_closed`].
pub fn pdf_gamma_e_closed(x: f64, cfg: &SystemConfig) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Config(format!("pdf_gamma_e_closed: x = {x} must be > 0")));
    }
    let p = varpi_xi(cfg)?;
    pdf_from_params(x, &p)
}

pub(crate) fn pdf_from_params(x: f64, p: &EveTailParams) -> Result<f64> {
    let z = p.t2 * x.powf(p.t3);
    let (pl, _) = regularized_gamma_pq(p.t1, z)?;
    let ln_g1 = ln_gamma(p.t1);
    let lower = pl * ln_g1.exp();
    let e = (p.ln_s - p.t4 * x.ln()).exp() * pl;
    // t₀ x^{−t₄−1} (t₄ γ(t₁,z) − t₃ z^{t₁} e^{−z}) e^{−E}
    let tail = if z > 0.0 { (p.t1 * z.ln() - z).exp() } else { 0.0 };
    let bracket = p.t4 * lower - p.t3 * tail;
    let pre = (p.ln_s - ln_g1 - (p.t4 + 1.0) * x.ln()).exp();
    Ok((pre * bracket * (-e).exp()).max(0.0))
}

/// Large-r_e limit exp[−t₀Γ(t₁) x^{−t₄}].
pub fn cdf_gamma_e_asymptotic(x: f64, cfg: &SystemConfig) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Config(format!("cdf_gamma_e_asymptotic: x = {x} must be > 0")));
    }
    let p = varpi_xi(cfg)?;
    Ok((-(p.ln_s - p.t4 * x.ln()).exp()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2() -> SystemConfig {
        SystemConfig { K: 16, N: 36, rho_d_dB: 30.0, rho_e_dB: 30.0, ..Default::default() }
    }

    #[test]
    fn gamma_fit_at_zero_epsilon() {
        let cfg = SystemConfig { epsilon: 0.0, N: 16, ..Default::default() };
        let g = gamma_fit(&cfg).unwrap();
        let q = PI / 4.0;
        assert!((g.k - 16.0 * q / (1.0 - q)).abs() < 1e-12);
        assert!((g.k / 16.0 - 3.659_792_366_325_487).abs() < 1e-13);
    }

    #[test]
    fn mean_matches_gamma_moments() {
        for &n in &[36u32, 64] {
            let cfg = SystemConfig { N: n, ..fig2() };
            let g = gamma_fit(&cfg).unwrap();
            let m = cfg.rho_d() * g.k * (1.0 + g.k) * g.theta * g.theta;
            let c = mean_gamma_d(&cfg).unwrap();
            assert!((m / c - 1.0).abs() < 0.02);
        }
        let cfg = fig2();
        let doubled = SystemConfig { K: 64, ..fig2() };
        let r = mean_gamma_d(&doubled).unwrap() / mean_gamma_d(&cfg).unwrap();
        assert!((r - 4.0).abs() < 1e-12);
    }

    #[test]
    fn aligned_eavesdropper_mean() {
        let cfg = fig2();
        let user = (cfg.angles.rd_azimuth, cfg.angles.rd_elevation);
        let (m, v) = eve_gauss_fit(&cfg, 50.0, user).unwrap();
        let mu_e = path_loss(cfg.beta0, 50.0, cfg.alpha2);
        let kap = kappa(cfg.epsilon).unwrap();
        assert!((m.norm() - 36.0 * (mu_e * kap).sqrt()).abs() < 1e-12 * m.norm());
        assert!((v - 36.0 * mu_e * (1.0 - kap)).abs() < 1e-15);
        let cfg0 = SystemConfig { epsilon: 0.0, ..fig2() };
        let (m0, v0) = eve_gauss_fit(&cfg0, 50.0, (0.3, 0.4)).unwrap();
        assert_eq!(m0.norm(), 0.0);
        assert!((v0 - 36.0 * mu_e).abs() < 1e-15);
    }

    #[test]
    fn xi_identity_and_t4() {
        let cfg = fig2();
        let p = varpi_xi(&cfg).unwrap();
        let kap = kappa(cfg.epsilon).unwrap();
        let lhs = p.xi * p.xi * (36.0 * 16.0 * cfg.nu() * cfg.beta0 * cfg.rho_e() * (1.0 - kap));
        assert!((lhs - 2.0).abs() < 1e-12);
        assert_eq!(p.t4, 2.0 / cfg.alpha2);
    }

    #[test]
    fn closed_pdf_matches_finite_difference() {
        let cfg = fig2();
        for &x in &[0.3, 1.0, 3.0, 10.0, 40.0, 200.0] {
            let h = x * 1e-5;
            let fd = (cdf_gamma_e_closed(x + h, &cfg).unwrap() - cdf_gamma_e_closed(x - h, &cfg).unwrap()) / (2.0 * h);
            let pdf = pdf_gamma_e_closed(x, &cfg).unwrap();
            assert!((fd - pdf).abs() <= 1e-6 * pdf.max(1e-12), "x = {x}: {fd} vs {pdf}");
        }
    }

    #[test]
    fn gamma_d_pdf_matches_finite_difference() {
        let cfg = fig2();
        let mean = mean_gamma_d(&cfg).unwrap();
        for &f in &[0.85, 0.95, 1.0, 1.05, 1.15] {
            let x = f * mean;
            let h = x * 1e-5;
            let fd = (cdf_gamma_d(x + h, &cfg).unwrap() - cdf_gamma_d(x - h, &cfg).unwrap()) / (2.0 * h);
            let pdf = pdf_gamma_d(x, &cfg).unwrap();
            assert!((fd - pdf).abs() <= 1e-6 * pdf, "x = {x}: {fd} vs {pdf}");
        }
        assert_eq!(cdf_gamma_d(0.0, &cfg).unwrap(), 0.0);
        assert!(cdf_gamma_d(-1.0, &cfg).is_err());
    }

    #[test]
    fn approx_kernel_quadrature_matches_closed_form() {
        for cfg in [fig2(), SystemConfig { N: 16, alpha2: 4.0, ..fig2() }, SystemConfig { epsilon: 0.0, ..fig2() }] {
            for &x in &[0.05, 0.5, 5.0, 50.0] {
                let q = cdf_gamma_e(x, &cfg, MarcumKernel::Approx).unwrap();
                let c = cdf_gamma_e_closed(x, &cfg).unwrap();
                assert!((q - c).abs() < 1e-9, "x = {x}: {q} vs {c}");
            }
        }
    }

    #[test]
    fn exact_kernel_matches_single_eavesdropper_integral() {
        let cfg = fig2();
        let eve = (cfg.angles.eve_azimuth, cfg.angles.eve_elevation);
        for &x in &[0.1, 1.0, 10.0] {
            let inner = quad::integrate(
                |r: f64| if r == 0.0 { 0.0 } else { (1.0 - cdf_gamma_e_single(x, &cfg, r, eve).unwrap()) * r },
                0.0,
                cfg.r_e,
                1e-12,
                1e-12,
            )
            .unwrap();
            let want = (-2.0 * PI * cfg.lambda_e * inner.value).exp();
            let got = cdf_gamma_e(x, &cfg, MarcumKernel::Exact).unwrap();
            assert!((got - want).abs() < 1e-8, "x = {x}: {got} vs {want}");
        }
    }

    #[test]
    fn closed_form_limits() {
        let cfg = fig2();
        let f0 = cdf_gamma_e_closed(1e-12, &cfg).unwrap();
        let want = (-cfg.lambda_e * PI * cfg.r_e * cfg.r_e).exp();
        assert!((f0 / want - 1.0).abs() < 1e-6, "{f0} vs {want}");
        assert!(cdf_gamma_e_closed(1e9, &cfg).unwrap() > 1.0 - 1e-6);
        let far = SystemConfig { r_e: 1e5, ..fig2() };
        for &x in &[0.1, 1.0, 10.0] {
            let a = cdf_gamma_e_asymptotic(x, &far).unwrap();
            let c = cdf_gamma_e_closed(x, &far).unwrap();
            assert!((a - c).abs() < 1e-12);
        }
    }
}

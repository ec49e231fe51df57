//! Scenario configuration, geometry, path loss, array responses and channel sampling.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rng::{complex_normal, open_unit, trial_rng};

/// How the departure direction from the RIS to each sampled eavesdropper is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EveDirection {
    /// Every eavesdropper sees the configured reference direction.
    #[default]
    Reference,
    /// Azimuth from the sampled position, elevation atan2(h_ris, r).
    Geometric,
}

/// Azimuth/elevation pairs (radians) of the array responses in the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Angles {
    /// Arrival at the RIS from the source.
    pub sr_azimuth: f64,
    pub sr_elevation: f64,
    /// Departure from the source antenna array.
    pub source_azimuth: f64,
    pub source_elevation: f64,
    /// Departure from the RIS towards the legitimate user.
    pub rd_azimuth: f64,
    pub rd_elevation: f64,
    /// Reference departure direction towards the eavesdroppers.
    pub eve_azimuth: f64,
    pub eve_elevation: f64,
}

impl Default for Angles {
    fn default() -> Self {
        Self {
            sr_azimuth: FRAC_PI_3,
            sr_elevation: FRAC_PI_4,
            source_azimuth: FRAC_PI_6,
            source_elevation: FRAC_PI_3,
            rd_azimuth: FRAC_PI_4,
            rd_elevation: FRAC_PI_3,
            eve_azimuth: FRAC_PI_4 + FRAC_PI_6,
            eve_elevation: FRAC_PI_3 + PI / 12.0,
        }
    }
}

/// All physical and geometric parameters of one scenario.
///
/// SNRs are given in dB (value = 10·log10 of the ratio); the target secrecy
/// rate `C_th` is in nats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
#[allow(non_snake_case)]
pub struct SystemConfig {
    pub K: u32,
    pub N: u32,
    /// Rician factor of the RIS-to-ground links.
    pub epsilon: f64,
    /// Rician factor of the source-to-RIS link; `None` keeps it pure LoS.
    pub epsilon1: Option<f64>,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta0: f64,
    pub d_SR: f64,
    pub d_RD: f64,
    pub r_e: f64,
    pub lambda_e: f64,
    pub rho_d_dB: f64,
    pub rho_e_dB: f64,
    pub C_th: f64,
    pub element_spacing_ratio: f64,
    pub h_ris: f64,
    pub eve_direction: EveDirection,
    pub angles: Angles,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            K: 16,
            N: 36,
            epsilon: 2.0,
            epsilon1: None,
            alpha1: 2.0,
            alpha2: 2.0,
            beta0: 1.0,
            d_SR: 30.0,
            d_RD: 40.0,
            r_e: 200.0,
            lambda_e: 1e-3,
            rho_d_dB: 20.0,
            rho_e_dB: 30.0,
            C_th: 0.05,
            element_spacing_ratio: 0.5,
            h_ris: 10.0,
            eve_direction: EveDirection::Reference,
            angles: Angles::default(),
        }
    }
}

fn integer_sqrt(z: u32) -> Option<u32> {
    let r = (z as f64).sqrt().round() as u32;
    (r * r == z).then_some(r)
}

impl SystemConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SystemConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Normalized JSON with every default written out.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Hex SHA-256 of the normalized JSON.
    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.K == 0 || integer_sqrt(self.K).is_none() {
            return fail(format!("K must be a positive perfect square (got {})", self.K));
        }
        if self.N == 0 || integer_sqrt(self.N).is_none() {
            return fail(format!("N must be a positive perfect square (got {})", self.N));
        }
        let positive = [
            ("beta0", self.beta0),
            ("d_SR", self.d_SR),
            ("d_RD", self.d_RD),
            ("r_e", self.r_e),
            ("lambda_e", self.lambda_e),
            ("element_spacing_ratio", self.element_spacing_ratio),
            ("h_ris", self.h_ris),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return fail(format!("{name} must be > 0"));
            }
        }
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return fail("epsilon must be >= 0".into());
        }
        if let Some(e1) = self.epsilon1 {
            if !(e1 >= 0.0) || !e1.is_finite() {
                return fail("epsilon1 must be >= 0".into());
            }
        }
        for (name, v) in [("alpha1", self.alpha1), ("alpha2", self.alpha2)] {
            if !(v >= 2.0) || !v.is_finite() {
                return fail(format!("{name} must be >= 2"));
            }
        }
        for (name, v) in [("rho_d_dB", self.rho_d_dB), ("rho_e_dB", self.rho_e_dB)] {
            if !v.is_finite() {
                return fail(format!("{name} must be finite"));
            }
        }
        if !(self.C_th >= 0.0) || !self.C_th.is_finite() {
            return fail("C_th must be >= 0".into());
        }
        let a = &self.angles;
        for v in [
            a.sr_azimuth,
            a.sr_elevation,
            a.source_azimuth,
            a.source_elevation,
            a.rd_azimuth,
            a.rd_elevation,
            a.eve_azimuth,
            a.eve_elevation,
        ] {
            if !v.is_finite() {
                return fail("angles must be finite".into());
            }
        }
        Ok(())
    }

    /// ν = β₀ d_SR^{-α₁}.
    pub fn nu(&self) -> f64 {
        path_loss(self.beta0, self.d_SR, self.alpha1)
    }

    /// μ_D = β₀ d_RD^{-α₂}.
    pub fn mu_d(&self) -> f64 {
        path_loss(self.beta0, self.d_RD, self.alpha2)
    }

    pub fn rho_d(&self) -> f64 {
        db_to_ratio(self.rho_d_dB)
    }

    pub fn rho_e(&self) -> f64 {
        db_to_ratio(self.rho_e_dB)
    }

    /// ln(ρ_d/ρ_e), formed from the dB difference.
    pub fn ln_rho_ratio(&self) -> f64 {
        (self.rho_d_dB - self.rho_e_dB) * std::f64::consts::LN_10 / 10.0
    }

    /// φ = e^{C_th}.
    pub fn phi(&self) -> f64 {
        self.C_th.exp()
    }

    /// Mean number of eavesdroppers in the disk, λ_e π r_e².
    pub fn mean_eavesdroppers(&self) -> f64 {
        self.lambda_e * PI * self.r_e * self.r_e
    }

    pub fn sqrt_n(&self) -> u32 {
        integer_sqrt(self.N).unwrap_or(0)
    }

    pub fn is_los(&self) -> bool {
        self.epsilon1.is_none()
    }
}

pub fn db_to_ratio(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// β₀ d^{-α}.
pub fn path_loss(beta0: f64, d: f64, alpha: f64) -> f64 {
    assert!(d > 0.0, "path_loss: distance must be > 0");
    beta0 * d.powf(-alpha)
}

/// Checked variant of [`path_loss`].
pub fn try_path_loss(beta0: f64, d: f64, alpha: f64) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::Config(format!("distance {d} must be > 0")));
    }
    Ok(beta0 * d.powf(-alpha))
}

/// USPA response of Z elements: entry n = x·√Z + y is
/// exp(j2π(d/λ)(x sinθᵃ sinθᵉ + y cosθᵉ)).
pub fn array_response(z: u32, azimuth: f64, elevation: f64, spacing_ratio: f64) -> Result<Vec<Complex64>> {
    let side = integer_sqrt(z).ok_or_else(|| Error::Config(format!("array size {z} is not a perfect square")))?;
    Ok(array_response_side(side, azimuth, elevation, spacing_ratio))
}

fn array_response_side(side: u32, azimuth: f64, elevation: f64, spacing_ratio: f64) -> Vec<Complex64> {
    let kx = 2.0 * PI * spacing_ratio * azimuth.sin() * elevation.sin();
    let ky = 2.0 * PI * spacing_ratio * elevation.cos();
    let mut out = Vec::with_capacity((side * side) as usize);
    for x in 0..side {
        for y in 0..side {
            out.push(Complex64::from_polar(1.0, kx * x as f64 + ky * y as f64));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eavesdropper {
    pub r: f64,
    /// Polar angle of the position in the disk.
    pub angle: f64,
    pub azimuth: f64,
    pub elevation: f64,
    pub h_re: Vec<Complex64>,
}

/// One Monte-Carlo draw of every channel in the scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// N×K, row-major (`h_sr[n * K + k]`).
    pub h_sr: Vec<Complex64>,
    pub h_rd: Vec<Complex64>,
    pub eaves: Vec<Eavesdropper>,
    pub seed: u64,
    pub trial: u64,
}

/// Channel sampler with the deterministic array responses precomputed.
#[derive(Debug, Clone)]
pub struct Sampler {
    cfg: SystemConfig,
    side: u32,
    a_n_sr: Vec<Complex64>,
    a_k: Vec<Complex64>,
    a_rd: Vec<Complex64>,
    a_eve_ref: Vec<Complex64>,
    poisson: Option<Poisson<f64>>,
}

impl Sampler {
    pub fn new(cfg: &SystemConfig) -> Result<Self> {
        cfg.validate()?;
        let a = &cfg.angles;
        let s = cfg.element_spacing_ratio;
        let mean = cfg.mean_eavesdroppers();
        let poisson = if mean > 0.0 {
            Some(Poisson::new(mean).map_err(|e| Error::Config(format!("lambda_e: {e}")))?)
        } else {
            None
        };
        Ok(Self {
            side: cfg.sqrt_n(),
            a_n_sr: array_response(cfg.N, a.sr_azimuth, a.sr_elevation, s)?,
            a_k: array_response(cfg.K, a.source_azimuth, a.source_elevation, s)?,
            a_rd: array_response(cfg.N, a.rd_azimuth, a.rd_elevation, s)?,
            a_eve_ref: array_response(cfg.N, a.eve_azimuth, a.eve_elevation, s)?,
            poisson,
            cfg: cfg.clone(),
        })
    }

    pub fn config(&self) -> &SystemConfig {
        &self.cfg
    }

    /// RIS arrival response a_{N,SR} of the source link.
    pub fn a_n_sr(&self) -> &[Complex64] {
        &self.a_n_sr
    }

    pub fn a_rd(&self) -> &[Complex64] {
        &self.a_rd
    }

    /// Draws one realization from the stream of (`seed`, `trial`).
    ///
    /// Draw order: h̃_RD, the eavesdropper count, per eavesdropper radius,
    /// angle and h̃_RE, and last H̃_SR (dual-Rician only), so LoS and
    /// dual-Rician runs with the same seed share every other draw.
    pub fn sample(&self, seed: u64, trial: u64) -> ChannelRealization {
        let cfg = &self.cfg;
        let mut rng = trial_rng(seed, trial);
        let n = cfg.N as usize;
        let k = cfg.K as usize;
        let eps = cfg.epsilon;
        let (los_w, nlos_w) = rician_weights(eps);

        let sqrt_mu_d = cfg.mu_d().sqrt();
        let h_rd: Vec<Complex64> = self
            .a_rd
            .iter()
            .map(|&a| sqrt_mu_d * (los_w * a + nlos_w * complex_normal(&mut rng)))
            .collect();

        let count = match &self.poisson {
            Some(p) => p.sample(&mut rng) as usize,
            None => 0,
        };
        let mut eaves = Vec::with_capacity(count);
        for _ in 0..count {
            let r = cfg.r_e * open_unit(&mut rng).sqrt();
            let angle = 2.0 * PI * rng.random::<f64>();
            let (azimuth, elevation, geo);
            match cfg.eve_direction {
                EveDirection::Reference => {
                    azimuth = cfg.angles.eve_azimuth;
                    elevation = cfg.angles.eve_elevation;
                    geo = None;
                }
                EveDirection::Geometric => {
                    azimuth = angle;
                    elevation = cfg.h_ris.atan2(r);
                    geo = Some(array_response_side(self.side, azimuth, elevation, cfg.element_spacing_ratio));
                }
            }
            let a_e = geo.as_deref().unwrap_or(&self.a_eve_ref);
            let sqrt_mu = path_loss(cfg.beta0, r, cfg.alpha2).sqrt();
            let h_re = a_e
                .iter()
                .map(|&a| sqrt_mu * (los_w * a + nlos_w * complex_normal(&mut rng)))
                .collect();
            eaves.push(Eavesdropper { r, angle, azimuth, elevation, h_re });
        }
        let sqrt_nu = cfg.nu().sqrt();
        let mut h_sr = Vec::with_capacity(n * k);
        match cfg.epsilon1 {
            None => {
                for an in &self.a_n_sr {
                    for ak in &self.a_k {
                        h_sr.push(sqrt_nu * an * ak.conj());
                    }
                }
            }
            Some(e1) => {
                let (lw, nw) = rician_weights(e1);
                for an in &self.a_n_sr {
                    for ak in &self.a_k {
                        h_sr.push(sqrt_nu * (lw * an * ak.conj() + nw * complex_normal(&mut rng)));
                    }
                }
            }
        }

        ChannelRealization { h_sr, h_rd, eaves, seed, trial }
    }
}

/// (√(ε/(ε+1)), √(1/(ε+1))).
pub fn rician_weights(eps: f64) -> (f64, f64) {
    ((eps / (eps + 1.0)).sqrt(), (1.0 / (eps + 1.0)).sqrt())
}

/// Convenience wrapper building a [`Sampler`] for a single draw.
pub fn sample_channels(cfg: &SystemConfig, seed: u64, trial: u64) -> Result<ChannelRealization> {
    Ok(Sampler::new(cfg)?.sample(seed, trial))
}

//! RIS phase configuration, MRT transmit beamforming and per-node SNRs.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sysmodel::ChannelRealization;

/// Argument of z in (-π, π], with the phase of 0 taken as 0.
fn phase(z: Complex64) -> f64 {
    if z.re == 0.0 && z.im == 0.0 {
        0.0
    } else {
        z.arg()
    }
}

/// θ_n = −∠(h*_RD(n) a_NSR(n)), wrapped to [0, 2π).
pub fn optimal_phases(h_rd: &[Complex64], a_nsr: &[Complex64]) -> Vec<f64> {
    assert_eq!(h_rd.len(), a_nsr.len(), "optimal_phases: length mismatch");
    h_rd.iter()
        .zip(a_nsr)
        .map(|(h, a)| (-phase(h.conj() * a)).rem_euclid(TAU) + 0.0)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamformingState {
    pub theta: Vec<f64>,
    /// Unit-norm transmit beamformer.
    pub f: Vec<Complex64>,
    /// g_D^H = h_RD^H Θ H_SR (length K).
    pub cascaded_d: Vec<Complex64>,
    /// Θ H_SR f (length N), shared by every receiver's effective channel.
    pub reflected: Vec<Complex64>,
}

/// Builds the state for arbitrary RIS phases with MRT at the source.
pub fn with_phases(real: &ChannelRealization, theta: Vec<f64>) -> BeamformingState {
    let n = real.h_rd.len();
    let k = real.h_sr.len() / n.max(1);
    let rot: Vec<Complex64> = theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
    let mut g = vec![Complex64::new(0.0, 0.0); k];
    for i in 0..n {
        let w = real.h_rd[i].conj() * rot[i];
        let row = &real.h_sr[i * k..(i + 1) * k];
        for (gk, h) in g.iter_mut().zip(row) {
            *gk += w * h;
        }
    }
    let norm = g.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let f: Vec<Complex64> = if norm > 0.0 {
        g.iter().map(|z| z.conj() / norm).collect()
    } else {
        let mut e = vec![Complex64::new(0.0, 0.0); k];
        if k > 0 {
            e[0] = Complex64::new(1.0, 0.0);
        }
        e
    };
    let reflected = (0..n)
        .map(|i| {
            let row = &real.h_sr[i * k..(i + 1) * k];
            rot[i] * row.iter().zip(&f).map(|(h, fk)| h * fk).sum::<Complex64>()
        })
        .collect();
    BeamformingState { theta, f, cascaded_d: g, reflected }
}

/// Co-phasing RIS configuration with MRT, using the RIS arrival response of the source link.
pub fn optimal_state(real: &ChannelRealization, a_nsr: &[Complex64]) -> BeamformingState {
    with_phases(real, optimal_phases(&real.h_rd, a_nsr))
}

/// γ_D = ρ_d |g_D^H f|².
pub fn snr_legitimate(state: &BeamformingState, rho_d: f64) -> f64 {
    let a: Complex64 = state.cascaded_d.iter().zip(&state.f).map(|(g, f)| g * f).sum();
    rho_d * a.norm_sqr()
}

/// An eavesdropper SNR by the direct product and by the reduced LoS form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EveSnr {
    pub direct: f64,
    pub reduced: f64,
}

/// γ_{E_m} = ρ_e |h_RE^H Θ H_SR f|², together with ρ_e K ν |Σ h*_RE(n) e^{−j∠h*_RD(n)}|²
/// (the two coincide for a LoS source link).
pub fn snr_eavesdropper(
    real: &ChannelRealization,
    state: &BeamformingState,
    rho_e: f64,
    k_nu: f64,
    which: usize,
) -> Result<EveSnr> {
    let eve = real.eaves.get(which).ok_or_else(|| {
        Error::Config(format!("eavesdropper index {which} out of range ({} present)", real.eaves.len()))
    })?;
    let direct = rho_e * eve_gain(&eve.h_re, &state.reflected);
    let z: Complex64 = eve
        .h_re
        .iter()
        .zip(&real.h_rd)
        .map(|(he, hd)| he.conj() * Complex64::from_polar(1.0, -phase(hd.conj())))
        .sum();
    Ok(EveSnr { direct, reduced: rho_e * k_nu * z.norm_sqr() })
}

/// |h^H v|².
#[inline]
pub fn eve_gain(h_re: &[Complex64], reflected: &[Complex64]) -> f64 {
    h_re.iter().zip(reflected).map(|(h, v)| h.conj() * v).sum::<Complex64>().norm_sqr()
}

/// Largest eavesdropper SNR in the realization; 0 when there are none.
pub fn max_eavesdropper_snr(real: &ChannelRealization, state: &BeamformingState, rho_e: f64) -> f64 {
    real.eaves
        .iter()
        .map(|e| rho_e * eve_gain(&e.h_re, &state.reflected))
        .fold(0.0, f64::max)
}

//! Monte-Carlo trial engine: empirical SNR laws, SOP and ESC from simulated channels.

use std::f64::consts::LN_2;

use rayon::prelude::*;

use crate::beamform::{max_eavesdropper_snr, optimal_state, snr_legitimate};
use crate::error::{Error, Result};
use crate::sysmodel::{Sampler, SystemConfig};

/// SNRs of one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub gamma_d: f64,
    pub gamma_e: f64,
    /// ln(1+γ_D) − ln(1+γ_E).
    pub secrecy_rate_nats: f64,
    pub eavesdroppers: usize,
}

/// Per-trial channel gains at unit SNR; γ_D = ρ_d·g_d and γ_E = ρ_e·g_e.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitGains {
    pub g_d: f64,
    pub g_e: f64,
    pub eavesdroppers: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSummary {
    pub sop: f64,
    /// Binomial standard error √(p(1−p)/n).
    pub sop_se: f64,
    /// Mean of the per-trial clamped rate difference, bits/s/Hz.
    pub esc_bits: f64,
    pub esc_se: f64,
    /// [E log₂(1+γ_D) − E log₂(1+γ_E)]⁺, the estimator matching the analytic ESC.
    pub esc_diff_clamp: f64,
    pub esc_diff_se: f64,
    /// Sorted γ_D and γ_E samples.
    pub ecdf_d: Vec<f64>,
    pub ecdf_e: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
}

fn outcome_gains(sampler: &Sampler, seed: u64, trial: u64) -> UnitGains {
    let real = sampler.sample(seed, trial);
    let state = optimal_state(&real, sampler.a_n_sr());
    UnitGains {
        g_d: snr_legitimate(&state, 1.0),
        g_e: max_eavesdropper_snr(&real, &state, 1.0),
        eavesdroppers: real.eaves.len(),
    }
}

/// Unit-SNR gains of trials 0..`trials`, in trial order, on the global rayon pool.
pub fn simulate_gains(cfg: &SystemConfig, seed: u64, trials: usize) -> Result<Vec<UnitGains>> {
    if trials == 0 {
        return Err(Error::Config("trials must be > 0".into()));
    }
    let sampler = Sampler::new(cfg)?;
    Ok((0..trials as u64).into_par_iter().map(|t| outcome_gains(&sampler, seed, t)).collect())
}

/// As [`simulate_gains`] on a dedicated pool of `workers` threads.
pub fn simulate_gains_with_workers(
    cfg: &SystemConfig,
    seed: u64,
    trials: usize,
    workers: usize,
) -> Result<Vec<UnitGains>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| simulate_gains(cfg, seed, trials))
}

/// Outcomes of individual trials at the configured SNRs.
pub fn outcomes(cfg: &SystemConfig, gains: &[UnitGains]) -> Vec<TrialOutcome> {
    let (rd, re) = (cfg.rho_d(), cfg.rho_e());
    gains
        .iter()
        .map(|g| {
            let (gamma_d, gamma_e) = (rd * g.g_d, re * g.g_e);
            TrialOutcome {
                gamma_d,
                gamma_e,
                secrecy_rate_nats: gamma_d.ln_1p() - gamma_e.ln_1p(),
                eavesdroppers: g.eavesdroppers,
            }
        })
        .collect()
}

/// Pairwise summation; the result depends only on the order of `xs`.
fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&dev) / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Applies the SNRs and threshold of `cfg` to precomputed gains.
pub fn summarize(cfg: &SystemConfig, gains: &[UnitGains], seed: u64) -> EmpiricalSummary {
    let outs = outcomes(cfg, gains);
    let n = outs.len();
    let outages = outs.iter().filter(|o| o.secrecy_rate_nats < cfg.C_th).count();
    let sop = outages as f64 / n as f64;
    let clamped: Vec<f64> = outs.iter().map(|o| o.secrecy_rate_nats.max(0.0) / LN_2).collect();
    let diff: Vec<f64> = outs.iter().map(|o| o.secrecy_rate_nats / LN_2).collect();
    let (esc_bits, esc_se) = mean_se(&clamped);
    let (diff_mean, esc_diff_se) = mean_se(&diff);
    let mut ecdf_d: Vec<f64> = outs.iter().map(|o| o.gamma_d).collect();
    let mut ecdf_e: Vec<f64> = outs.iter().map(|o| o.gamma_e).collect();
    ecdf_d.sort_by(f64::total_cmp);
    ecdf_e.sort_by(f64::total_cmp);
    EmpiricalSummary {
        sop,
        sop_se: (sop * (1.0 - sop) / n as f64).sqrt(),
        esc_bits,
        esc_se,
        esc_diff_clamp: diff_mean.max(0.0),
        esc_diff_se,
        ecdf_d,
        ecdf_e,
        trials: n,
        seed,
    }
}

pub fn run_trials(cfg: &SystemConfig, seed: u64, trials: usize) -> Result<EmpiricalSummary> {
    Ok(summarize(cfg, &simulate_gains(cfg, seed, trials)?, seed))
}

pub fn run_trials_with_workers(
    cfg: &SystemConfig,
    seed: u64,
    trials: usize,
    workers: usize,
) -> Result<EmpiricalSummary> {
    Ok(summarize(cfg, &simulate_gains_with_workers(cfg, seed, trials, workers)?, seed))
}

/// Axes accepted by [`set_axis`] and [`sweep`].
pub const AXES: &[&str] = &[
    "rho_d_dB", "rho_e_dB", "rho_dB", "N", "K", "epsilon", "epsilon1", "alpha2", "d_SR", "d_RD", "r_e",
    "lambda_e", "log2_lambda_e", "C_th",
];

/// Copy of `cfg` with one parameter replaced; "rho_dB" moves ρ_d and ρ_e together,
/// keeping their difference, and "log2_lambda_e" sets λ_e = 2^value.
pub fn set_axis(cfg: &SystemConfig, axis: &str, value: f64) -> Result<SystemConfig> {
    let mut c = cfg.clone();
    let as_count = |v: f64| -> Result<u32> {
        if v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
            Ok(v as u32)
        } else {
            Err(Error::Config(format!("{axis} must be a positive integer, got {v}")))
        }
    };
    match axis {
        "rho_d_dB" => c.rho_d_dB = value,
        "rho_e_dB" => c.rho_e_dB = value,
        "rho_dB" => {
            let gap = cfg.rho_d_dB - cfg.rho_e_dB;
            c.rho_e_dB = value;
            c.rho_d_dB = value + gap;
        }
        "N" => c.N = as_count(value)?,
        "K" => c.K = as_count(value)?,
        "epsilon" => c.epsilon = value,
        "epsilon1" => c.epsilon1 = Some(value),
        "alpha2" => c.alpha2 = value,
        "d_SR" => c.d_SR = value,
        "d_RD" => c.d_RD = value,
        "r_e" => c.r_e = value,
        "lambda_e" => c.lambda_e = value,
        "log2_lambda_e" => c.lambda_e = value.exp2(),
        "C_th" => c.C_th = value,
        _ => {
            return Err(Error::Config(format!("unknown sweep axis '{axis}' (known: {})", AXES.join(", "))));
        }
    }
    c.validate()?;
    Ok(c)
}

/// Whether an axis changes only SNRs or the threshold, so one set of draws serves every point.
fn reuses_draws(axis: &str) -> bool {
    matches!(axis, "rho_d_dB" | "rho_e_dB" | "rho_dB" | "C_th")
}

/// Empirical summaries along an axis. Every point uses the same seed (common random numbers);
/// SNR and threshold axes share a single set of draws.
pub fn sweep(
    cfg: &SystemConfig,
    axis: &str,
    values: &[f64],
    seed: u64,
    trials: usize,
) -> Result<Vec<(f64, EmpiricalSummary)>> {
    let cfgs = values.iter().map(|&v| set_axis(cfg, axis, v)).collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Ok(Vec::new());
    }
    if reuses_draws(axis) {
        let gains = simulate_gains(cfg, seed, trials)?;
        return Ok(values.iter().zip(&cfgs).map(|(&v, c)| (v, summarize(c, &gains, seed))).collect());
    }
    values.iter().zip(&cfgs).map(|(&v, c)| Ok((v, run_trials(c, seed, trials)?))).collect()
}

/// Fraction of sorted samples ≤ x.
pub fn ecdf_at(sorted: &[f64], x: f64) -> f64 {
    sorted.partition_point(|&s| s <= x) as f64 / sorted.len() as f64
}

/// sup_x |F̂(x) − F(x)| over a sorted sample, checked on both sides of every jump.
pub fn ks_distance<F: FnMut(f64) -> Result<f64>>(sorted: &[f64], mut cdf: F) -> Result<f64> {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x)?;
        d = d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    Ok(d)
}

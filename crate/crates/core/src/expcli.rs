//! Experiment presets, CSV output and the command-line front end.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::analytic_dist::{cdf_gamma_d, cdf_gamma_e, cdf_gamma_e_asymptotic, cdf_gamma_e_closed, MarcumKernel};
use crate::error::{Error, Result};
use crate::montecarlo::{ecdf_at, run_trials, set_axis, summarize, simulate_gains, EmpiricalSummary};
use crate::secrecy_metrics as sm;
use crate::sysmodel::SystemConfig;

pub const CSV_HEADER: &str = "preset,axis,axis_value,metric,method,value,stderr,trials,seed,config_sha256";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Sop,
    Esc,
    Cdf,
}

impl Metric {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "sop" => Ok(Metric::Sop),
            "esc" => Ok(Metric::Esc),
            "cdf" => Ok(Metric::Cdf),
            _ => Err(Error::Config(format!("unknown metric '{s}' (sop, esc, cdf)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    Analytic,
    Quadrature,
    Special,
    Asymptotic,
    MonteCarlo,
}

impl MethodKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "analytic" => Ok(MethodKind::Analytic),
            "quadrature" => Ok(MethodKind::Quadrature),
            "special" => Ok(MethodKind::Special),
            "asymptotic" => Ok(MethodKind::Asymptotic),
            "monte_carlo" | "mc" => Ok(MethodKind::MonteCarlo),
            other => Err(Error::Config(format!(
                "unknown method '{other}' (analytic, quadrature, special, asymptotic, monte_carlo)"
            ))),
        }
    }

    pub fn parse_list(s: &str) -> Result<Vec<Self>> {
        s.split(',').filter(|t| !t.trim().is_empty()).map(Self::parse).collect()
    }
}

/// One output row.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub preset: String,
    pub axis: String,
    pub axis_value: Option<f64>,
    pub metric: String,
    pub method: String,
    pub value: f64,
    pub stderr: Option<f64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub config_sha256: String,
}

fn num(x: Option<f64>) -> String {
    x.map(|v| format!("{v}")).unwrap_or_default()
}

/// Writes the header and one line per row; floats use the shortest round-trip decimal form.
pub fn emit_csv(rows: &[Row]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.preset,
            r.axis,
            num(r.axis_value),
            r.metric,
            r.method,
            r.value,
            num(r.stderr),
            r.trials.map(|t| t.to_string()).unwrap_or_default(),
            r.seed.map(|s| s.to_string()).unwrap_or_default(),
            r.config_sha256
        );
    }
    out
}

/// A figure preset: a base configuration, labelled variants of it and a sweep grid.
#[derive(Debug, Clone)]
pub struct ExperimentPreset {
    pub id: &'static str,
    pub metric: Metric,
    pub axis: &'static str,
    pub grid: Vec<f64>,
    pub variants: Vec<(String, SystemConfig)>,
    pub methods: Vec<MethodKind>,
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| lo + step * i as f64).collect()
}

fn variants<T: Copy + std::fmt::Display>(
    base: &SystemConfig,
    name: &str,
    values: &[T],
    apply: impl Fn(&mut SystemConfig, T),
) -> Vec<(String, SystemConfig)> {
    values
        .iter()
        .map(|&v| {
            let mut c = base.clone();
            apply(&mut c, v);
            (format!("{name}={v}"), c)
        })
        .collect()
}

pub const PRESET_IDS: &[&str] =
    &["fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11", "fig12", "fig13"];

/// Preset for `id` ("fig3" or "3").
pub fn preset(id: &str) -> Result<ExperimentPreset> {
    use MethodKind::*;
    let key = if id.starts_with("fig") { id.to_string() } else { format!("fig{id}") };
    let base = SystemConfig { K: 16, N: 16, epsilon: 2.0, alpha1: 2.0, alpha2: 2.0, ..Default::default() };
    let p = match key.as_str() {
        "fig2" => {
            let c = SystemConfig { N: 36, rho_d_dB: 30.0, rho_e_dB: 30.0, ..base };
            ExperimentPreset {
                id: "fig2",
                metric: Metric::Cdf,
                axis: "x_dB",
                grid: grid(-20.0, 30.0, 2.0),
                variants: vec![("N=36".into(), c)],
                methods: vec![Analytic, Quadrature, Asymptotic, MonteCarlo],
            }
        }
        "fig3" => ExperimentPreset {
            id: "fig3",
            metric: Metric::Sop,
            axis: "rho_d_dB",
            grid: grid(0.0, 50.0, 5.0),
            variants: variants(&SystemConfig { rho_e_dB: 30.0, ..base.clone() }, "N", &[16u32, 36, 64], |c, v| c.N = v),
            methods: vec![Analytic, Quadrature, Asymptotic, MonteCarlo],
        },
        "fig4" => ExperimentPreset {
            id: "fig4",
            metric: Metric::Sop,
            axis: "rho_d_dB",
            grid: grid(0.0, 50.0, 5.0),
            variants: variants(&SystemConfig { rho_e_dB: 30.0, ..base.clone() }, "K", &[4u32, 16, 64], |c, v| c.K = v),
            methods: vec![Analytic, Asymptotic, MonteCarlo],
        },
        "fig5" => ExperimentPreset {
            id: "fig5",
            metric: Metric::Sop,
            axis: "epsilon",
            grid: grid(0.0, 10.0, 1.0),
            variants: variants(
                &SystemConfig { N: 36, rho_d_dB: 20.0, rho_e_dB: 30.0, ..base.clone() },
                "lambda_e",
                &[1e-4, 1e-3, 1e-2],
                |c, v| c.lambda_e = v,
            ),
            methods: vec![Analytic, MonteCarlo],
        },
        "fig6" => ExperimentPreset {
            id: "fig6",
            metric: Metric::Sop,
            axis: "rho_d_dB",
            grid: grid(0.0, 60.0, 5.0),
            variants: variants(&base, "rho_e_dB", &[20.0, 30.0, 40.0], |c, v| c.rho_e_dB = v),
            methods: vec![Analytic, MonteCarlo],
        },
        "fig7" => ExperimentPreset {
            id: "fig7",
            metric: Metric::Sop,
            axis: "rho_d_dB",
            grid: grid(40.0, 120.0, 10.0),
            variants: variants(&SystemConfig { rho_e_dB: 60.0, ..base.clone() }, "alpha2", &[2.0, 3.0, 4.0], |c, v| {
                c.alpha2 = v
            }),
            methods: vec![Analytic, Asymptotic, MonteCarlo],
        },
        "fig8" => {
            let b = SystemConfig { rho_e_dB: 50.0, ..base.clone() };
            let v = [(16u32, 16u32), (64, 16), (16, 64)]
                .iter()
                .map(|&(n, k)| (format!("N={n};K={k}"), SystemConfig { N: n, K: k, ..b.clone() }))
                .collect();
            ExperimentPreset {
                id: "fig8",
                metric: Metric::Esc,
                axis: "rho_d_dB",
                grid: grid(20.0, 80.0, 5.0),
                variants: v,
                methods: vec![Analytic, Asymptotic, MonteCarlo],
            }
        }
        "fig9" => ExperimentPreset {
            id: "fig9",
            metric: Metric::Esc,
            axis: "rho_d_dB",
            grid: grid(20.0, 80.0, 5.0),
            variants: variants(&base, "rho_e_dB", &[40.0, 50.0, 60.0], |c, v| c.rho_e_dB = v),
            methods: vec![Analytic, Asymptotic, MonteCarlo],
        },
        "fig10" => ExperimentPreset {
            id: "fig10",
            metric: Metric::Esc,
            axis: "d_SR",
            grid: grid(10.0, 100.0, 10.0),
            variants: variants(&SystemConfig { rho_d_dB: 50.0, rho_e_dB: 50.0, ..base.clone() }, "d_RD", &[20.0, 40.0, 60.0], |c, v| {
                c.d_RD = v
            }),
            methods: vec![Analytic, Asymptotic, MonteCarlo],
        },
        "fig11" => ExperimentPreset {
            id: "fig11",
            metric: Metric::Esc,
            axis: "log2_lambda_e",
            grid: grid(-14.0, -4.0, 1.0),
            variants: variants(&SystemConfig { rho_d_dB: 50.0, rho_e_dB: 50.0, ..base.clone() }, "epsilon", &[0.0, 2.0, 8.0], |c, v| {
                c.epsilon = v
            }),
            methods: vec![Analytic, Asymptotic, MonteCarlo],
        },
        "fig12" => ExperimentPreset {
            id: "fig12",
            metric: Metric::Sop,
            axis: "rho_d_dB",
            grid: grid(0.0, 50.0, 5.0),
            variants: variants(
                &SystemConfig { r_e: 50.0, lambda_e: 1e-2, epsilon1: Some(2.0), rho_e_dB: 30.0, ..base.clone() },
                "N",
                &[16u32, 36, 64],
                |c, v| c.N = v,
            ),
            methods: vec![Analytic, MonteCarlo],
        },
        "fig13" => ExperimentPreset {
            id: "fig13",
            metric: Metric::Esc,
            axis: "rho_d_dB",
            grid: grid(20.0, 80.0, 5.0),
            variants: variants(
                &SystemConfig { r_e: 50.0, lambda_e: 1e-2, epsilon1: Some(2.0), rho_e_dB: 50.0, ..base },
                "N",
                &[16u32, 36, 64],
                |c, v| c.N = v,
            ),
            methods: vec![Analytic, MonteCarlo],
        },
        _ => {
            return Err(Error::Config(format!("unknown preset '{id}' (known: {})", PRESET_IDS.join(", "))));
        }
    };
    Ok(p)
}

/// Analytic (non-Monte-Carlo) value of `metric` for one configuration.
pub fn analytic_value(cfg: &SystemConfig, metric: Metric, method: MethodKind) -> Result<(String, f64)> {
    let r = match (metric, method) {
        (Metric::Sop, MethodKind::Analytic) => sm::sop_closed_form(cfg)?,
        (Metric::Sop, MethodKind::Quadrature) => sm::sop_quadrature(cfg)?,
        (Metric::Sop, MethodKind::Asymptotic) => sm::sop_asymptotic(cfg)?,
        (Metric::Sop, MethodKind::Special) => match cfg.alpha2 {
            2.0 => sm::sop_corollary_a2_2(cfg)?,
            4.0 => sm::sop_bessel_a2_4(cfg)?,
            a => return Err(Error::Unavailable(format!("no special-case SOP for alpha2 = {a}"))),
        },
        (Metric::Esc, MethodKind::Analytic) | (Metric::Esc, MethodKind::Quadrature) => sm::esc(cfg)?,
        (Metric::Esc, MethodKind::Asymptotic) => sm::esc_asymptotic(cfg)?,
        (Metric::Esc, MethodKind::Special) => match cfg.alpha2 {
            2.0 => sm::esc_a2_2(cfg)?,
            4.0 => sm::esc_a2_4(cfg)?,
            a => return Err(Error::Unavailable(format!("no special-case ESC for alpha2 = {a}"))),
        },
        (_, MethodKind::MonteCarlo) | (Metric::Cdf, _) => {
            return Err(Error::Config("analytic_value: not an analytic SOP/ESC method".into()));
        }
    };
    Ok((r.method.as_str().to_string(), r.value))
}

struct RowCtx<'a> {
    preset: &'a str,
    axis: &'a str,
    seed: u64,
}

impl RowCtx<'_> {
    fn analytic(&self, x: Option<f64>, metric: &str, method: &str, value: f64, cfg: &SystemConfig) -> Row {
        Row {
            preset: self.preset.to_string(),
            axis: self.axis.to_string(),
            axis_value: x,
            metric: metric.to_string(),
            method: method.to_string(),
            value,
            stderr: None,
            trials: None,
            seed: None,
            config_sha256: cfg.fingerprint(),
        }
    }

    fn mc(&self, x: Option<f64>, metric: &str, method: &str, value: f64, se: f64, s: &EmpiricalSummary, cfg: &SystemConfig) -> Row {
        Row { stderr: Some(se), trials: Some(s.trials), seed: Some(self.seed), ..self.analytic(x, metric, method, value, cfg) }
    }
}

fn metric_name(m: Metric) -> &'static str {
    match m {
        Metric::Sop => "sop",
        Metric::Esc => "esc",
        Metric::Cdf => "cdf",
    }
}

fn mc_rows(ctx: &RowCtx, x: Option<f64>, metric: Metric, s: &EmpiricalSummary, cfg: &SystemConfig) -> Vec<Row> {
    match metric {
        Metric::Sop => vec![ctx.mc(x, "sop", "monte_carlo", s.sop, s.sop_se, s, cfg)],
        Metric::Esc => vec![
            ctx.mc(x, "esc", "monte_carlo", s.esc_bits, s.esc_se, s, cfg),
            ctx.mc(x, "esc", "monte_carlo_diff_clamp", s.esc_diff_clamp, s.esc_diff_se, s, cfg),
        ],
        Metric::Cdf => Vec::new(),
    }
}

/// Rows of an SOP or ESC sweep of `axis` over `values` for one labelled configuration.
pub fn sweep_rows(
    label: &str,
    cfg: &SystemConfig,
    metric: Metric,
    axis: &str,
    values: &[f64],
    methods: &[MethodKind],
    seed: u64,
    trials: usize,
) -> Result<Vec<Row>> {
    if metric == Metric::Cdf {
        return Err(Error::Config("sweeps support the sop and esc metrics".into()));
    }
    let ctx = RowCtx { preset: label, axis, seed };
    let points = values.iter().map(|&v| set_axis(cfg, axis, v)).collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let snr_axis = matches!(axis, "rho_d_dB" | "rho_e_dB" | "rho_dB" | "C_th");
    let shared = if methods.contains(&MethodKind::MonteCarlo) && snr_axis && !values.is_empty() {
        Some(simulate_gains(cfg, seed, trials)?)
    } else {
        None
    };
    for (&v, c) in values.iter().zip(&points) {
        for &m in methods {
            if m == MethodKind::MonteCarlo {
                let s = match &shared {
                    Some(g) => summarize(c, g, seed),
                    None => run_trials(c, seed, trials)?,
                };
                rows.extend(mc_rows(&ctx, Some(v), metric, &s, c));
            } else {
                let (name, value) = analytic_value(c, metric, m)?;
                rows.push(ctx.analytic(Some(v), metric_name(metric), &name, value, c));
            }
        }
    }
    Ok(rows)
}

/// CDF rows of γ_D and γ_E at SNR thresholds `x_db` (dB).
pub fn cdf_rows(label: &str, cfg: &SystemConfig, x_db: &[f64], methods: &[MethodKind], seed: u64, trials: usize) -> Result<Vec<Row>> {
    let ctx = RowCtx { preset: label, axis: "x_dB", seed };
    let summary = if methods.contains(&MethodKind::MonteCarlo) { Some(run_trials(cfg, seed, trials)?) } else { None };
    let mut rows = Vec::new();
    for &xd in x_db {
        let x = 10f64.powf(xd / 10.0);
        for &m in methods {
            match m {
                MethodKind::Analytic => {
                    rows.push(ctx.analytic(Some(xd), "cdf_d", "closed_form", cdf_gamma_d(x, cfg)?, cfg));
                    rows.push(ctx.analytic(Some(xd), "cdf_e", "closed_form", cdf_gamma_e_closed(x, cfg)?, cfg));
                }
                MethodKind::Quadrature => {
                    rows.push(ctx.analytic(Some(xd), "cdf_e", "quadrature", cdf_gamma_e(x, cfg, MarcumKernel::Exact)?, cfg));
                }
                MethodKind::Asymptotic => {
                    rows.push(ctx.analytic(Some(xd), "cdf_e", "asymptotic", cdf_gamma_e_asymptotic(x, cfg)?, cfg));
                }
                MethodKind::Special => {
                    return Err(Error::Unavailable("no special-case method for CDFs".into()));
                }
                MethodKind::MonteCarlo => {
                    let s = summary.as_ref().expect("summary computed above");
                    let n = s.trials as f64;
                    for (name, sample) in [("cdf_d", &s.ecdf_d), ("cdf_e", &s.ecdf_e)] {
                        let f = ecdf_at(sample, x);
                        rows.push(ctx.mc(Some(xd), name, "monte_carlo", f, (f * (1.0 - f) / n).sqrt(), s, cfg));
                    }
                }
            }
        }
    }
    Ok(rows)
}

/// All rows of a preset.
pub fn run_preset(p: &ExperimentPreset, methods: Option<&[MethodKind]>, seed: u64, trials: usize) -> Result<Vec<Row>> {
    let methods = methods.unwrap_or(&p.methods);
    let mut rows = Vec::new();
    for (label, cfg) in &p.variants {
        let tag = format!("{}[{label}]", p.id);
        match p.metric {
            Metric::Cdf => rows.extend(cdf_rows(&tag, cfg, &p.grid, methods, seed, trials)?),
            m => rows.extend(sweep_rows(&tag, cfg, m, p.axis, &p.grid, methods, seed, trials)?),
        }
    }
    Ok(rows)
}

#[derive(Parser, Debug)]
#[command(name = "ris-secrecy", about = "Secrecy outage and ergodic secrecy capacity of RIS-assisted links with random eavesdroppers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON configuration file (fields of SystemConfig; missing fields take defaults)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 100_000)]
    pub trials: usize,
    /// CSV output path (default: stdout)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Comma-separated subset of analytic, quadrature, special, asymptotic, monte_carlo
    #[arg(long, global = true)]
    pub methods: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a figure preset (fig2 ... fig13)
    Fig { id: String },
    /// Secrecy outage probability at one configuration
    Sop,
    /// Ergodic secrecy capacity at one configuration
    Esc,
    /// SNR CDFs at the given thresholds
    Cdf {
        /// Comma-separated SNR thresholds in dB
        #[arg(long, default_value = "0,10,20")]
        x_db: String,
    },
    /// Sweep one configuration field
    Sweep {
        #[arg(long)]
        axis: String,
        /// Comma-separated axis values
        #[arg(long)]
        values: String,
        #[arg(long, default_value = "sop")]
        metric: String,
    },
    /// Check a configuration and print it in normalized form
    Validate,
    /// Run the built-in oracle checks
    Selftest,
}

fn parse_values(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Config(format!("bad number '{t}': {e}"))))
        .collect()
}

/// Re-applies a variant label such as "N=16;K=64" on top of `base`.
fn apply_label(base: &SystemConfig, label: &str) -> Result<SystemConfig> {
    let mut c = base.clone();
    for part in label.split(';') {
        let (field, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("bad variant label '{label}'")))?;
        let v = value.parse::<f64>().map_err(|e| Error::Config(format!("bad variant label '{label}': {e}")))?;
        c = set_axis(&c, field, v)?;
    }
    Ok(c)
}

fn load_config(path: &Option<PathBuf>) -> Result<SystemConfig> {
    let cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            SystemConfig::from_json(&text)?
        }
        None => SystemConfig::default(),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn single_rows(cfg: &SystemConfig, metric: Metric, methods: &[MethodKind], seed: u64, trials: usize) -> Result<Vec<Row>> {
    let ctx = RowCtx { preset: "config", axis: "", seed };
    let mut rows = Vec::new();
    for &m in methods {
        if m == MethodKind::MonteCarlo {
            let s = run_trials(cfg, seed, trials)?;
            rows.extend(mc_rows(&ctx, None, metric, &s, cfg));
        } else {
            let (name, v) = analytic_value(cfg, metric, m)?;
            rows.push(ctx.analytic(None, metric_name(metric), &name, v, cfg));
        }
    }
    Ok(rows)
}

/// Outcome of one built-in check.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Cross-checks between independent evaluation routes at desk-scale cost.
pub fn selftest() -> Result<Vec<Check>> {
    use crate::specfun::{meijer_g_m0_0m, MeijerG0mParams};
    let mut out = Vec::new();
    let mut check = |name: &'static str, err: f64, tol: f64| {
        out.push(Check { name, passed: err <= tol, detail: format!("error {err:.3e} (tolerance {tol:.0e})") });
    };
    let g = meijer_g_m0_0m(&MeijerG0mParams::new(vec![0.0], 0.7)?)?;
    check("meijer G(1,0;0,1) = exp(-x)", (g - (-0.7f64).exp()).abs(), 1e-12);
    let c = SystemConfig { N: 16, rho_d_dB: 40.0, rho_e_dB: 30.0, ..Default::default() };
    let a = sm::sop_closed_form(&c)?.value;
    check("closed-form SOP vs alpha2 = 2 special case", (a - sm::sop_corollary_a2_2(&c)?.value).abs(), 1e-10);
    let c4 = SystemConfig { alpha2: 4.0, rho_d_dB: 60.0, rho_e_dB: 60.0, ..c.clone() };
    check("closed-form SOP vs alpha2 = 4 Bessel form", (sm::sop_closed_form(&c4)?.value - sm::sop_bessel_a2_4(&c4)?.value).abs(), 1e-8);
    let rq = sm::rate_d_quadrature(&c)?.0;
    check("R_D G-function vs quadrature (relative)", (sm::rate_d_closed(&c)? / rq - 1.0).abs(), 1e-6);
    check("R_E alpha2 = 2 closed form vs quadrature", (sm::rate_e_a2_2(&c)? - sm::rate_e_quadrature(&c)?.0).abs(), 1e-4);
    check("SOP closed form vs quadrature at high SNR", (a - sm::sop_quadrature(&c)?.value).abs(), 1e-3);
    Ok(out)
}

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Config(format!("{}: {e}", p.display()))),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes()).map_err(|e| Error::Config(format!("stdout: {e}")))
        }
    }
}

fn execute(cli: &Cli) -> Result<()> {
    let methods = cli.methods.as_deref().map(MethodKind::parse_list).transpose()?;
    if cli.trials == 0 {
        return Err(Error::Config("--trials must be > 0".into()));
    }
    let default_methods = [MethodKind::Analytic];
    match &cli.command {
        Command::Fig { id } => {
            let mut p = preset(id)?;
            if cli.config.is_some() {
                let base = load_config(&cli.config)?;
                for (label, c) in p.variants.iter_mut() {
                    *c = apply_label(&base, label)?;
                }
            }
            let rows = run_preset(&p, methods.as_deref(), cli.seed, cli.trials)?;
            write_output(&cli.out, &emit_csv(&rows))
        }
        Command::Sop | Command::Esc => {
            let cfg = load_config(&cli.config)?;
            let metric = if matches!(cli.command, Command::Sop) { Metric::Sop } else { Metric::Esc };
            let rows = single_rows(&cfg, metric, methods.as_deref().unwrap_or(&default_methods), cli.seed, cli.trials)?;
            write_output(&cli.out, &emit_csv(&rows))
        }
        Command::Cdf { x_db } => {
            let cfg = load_config(&cli.config)?;
            let rows = cdf_rows("config", &cfg, &parse_values(x_db)?, methods.as_deref().unwrap_or(&default_methods), cli.seed, cli.trials)?;
            write_output(&cli.out, &emit_csv(&rows))
        }
        Command::Sweep { axis, values, metric } => {
            let cfg = load_config(&cli.config)?;
            let rows = sweep_rows(
                "config",
                &cfg,
                Metric::parse(metric)?,
                axis,
                &parse_values(values)?,
                methods.as_deref().unwrap_or(&default_methods),
                cli.seed,
                cli.trials,
            )?;
            write_output(&cli.out, &emit_csv(&rows))
        }
        Command::Validate => {
            let cfg = load_config(&cli.config)?;
            write_output(&cli.out, &(cfg.to_json() + "\n"))
        }
        Command::Selftest => {
            let checks = selftest()?;
            let mut text = String::new();
            for c in &checks {
                let _ = writeln!(text, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            write_output(&cli.out, &text)?;
            let failed = checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                return Err(Error::Special(crate::specfun::SpecialError::Convergence {
                    what: "selftest",
                    partial: failed as f64,
                    bound: 0.0,
                }));
            }
            Ok(())
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            eprintln!("E2: {}", e.to_string().trim_end());
            return 2;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            let code = e.exit_code();
            eprintln!("E{code}: {e}");
            code
        }
    }
}

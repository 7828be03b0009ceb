//! Command-line front end for the `srcnoise-core` key-rate models: T sweeps
//! to CSV/SVG, single points, and the verification suite.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod format;
pub mod svg;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use srcnoise_core::keyrate::{key_rate, sweep};
use srcnoise_core::verify::{eb_pm_equivalence_check, lemma_suite_with, w_monotonicity_check, LemmaTolerances, Report};
use srcnoise_core::ChannelParams;
use thiserror::Error;

pub use config::{OutputFormat, Preset, RunConfig, Settings};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Channel transmittances at which the W-monotonicity check runs.
const W_CHECK_T: [f64; 4] = [0.25, 0.5, 0.75, 1.0];
const W_SAMPLES: usize = 99;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] srcnoise_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Parser)]
#[command(name = "srcnoise", version, about = "CV-QKD key-rate bounds under Gaussian source noise")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Key rate over a grid of channel transmittances.
    Sweep(CommonArgs),
    /// Key rate at a single transmittance (`--T`).
    Point(CommonArgs),
    /// Run the lemma, EB/PM and W-monotonicity checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Alice's EPR variance.
    #[arg(long = "V", allow_negative_numbers = true)]
    pub v: Option<f64>,
    /// Channel excess noise.
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    /// Source excess noise.
    #[arg(long = "epsA", allow_negative_numbers = true)]
    pub eps_a: Option<f64>,
    /// Source transmittance.
    #[arg(long = "TA", allow_negative_numbers = true)]
    pub t_a: Option<f64>,
    /// Comma-separated models: neutral-party, beam-splitter, untrusted, all.
    #[arg(long)]
    pub model: Option<String>,
    /// reverse | direct
    #[arg(long)]
    pub recon: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub t_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t_max: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t_step: Option<f64>,
    /// Channel transmittance for `point`.
    #[arg(long = "T", allow_negative_numbers = true)]
    pub t: Option<f64>,
    /// Reconciliation efficiency.
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Report max(K, 0).
    #[arg(long)]
    pub clamp_zero: bool,
    /// fig2a | fig2b | fig3a | fig3b
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv | svg | both
    #[arg(long)]
    pub format: Option<String>,
    /// TOML file of the same keys (`V = 20`, `t-min = 0.05`, ...); flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, hide = true, allow_negative_numbers = true)]
    pub lemma_tolerance: Option<f64>,
}

impl CommonArgs {
    fn settings(&self) -> Settings {
        Settings {
            v: self.v,
            eps: self.eps,
            eps_a: self.eps_a,
            t_a: self.t_a,
            model: self.model.clone(),
            recon: self.recon.clone(),
            t_min: self.t_min,
            t_max: self.t_max,
            t_step: self.t_step,
            t: self.t,
            beta: self.beta,
            clamp_zero: self.clamp_zero.then_some(true),
            preset: self.preset.clone(),
            out: self.out.clone(),
            format: self.format.clone(),
        }
    }

    pub fn resolve(&self, default_models: &str) -> Result<RunConfig, CliError> {
        let file = self.config.as_deref().map(Settings::from_file).transpose()?;
        RunConfig::resolve(file, self.settings(), default_models)
    }
}

/// Parses `args` (program name first) and runs the command; returns the exit
/// status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return e.exit_code();
        }
    };
    let result = match &cli.command {
        Command::Sweep(args) => args.resolve("all").and_then(|cfg| cmd_sweep(&cfg, stdout, stderr)),
        Command::Point(args) => args.resolve("neutral-party").and_then(|cfg| cmd_point(&cfg, stdout)),
        Command::Verify(args) => {
            let tol = LemmaTolerances {
                reverse_equality: args.lemma_tolerance.unwrap_or(LemmaTolerances::default().reverse_equality),
                ..LemmaTolerances::default()
            };
            args.common.resolve("all").and_then(|cfg| cmd_verify(&cfg, tol, stdout, stderr))
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn write_target(path: Option<&Path>, body: &[u8], stdout: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, body)?,
        None => stdout.write_all(body)?,
    }
    Ok(())
}

pub fn cmd_sweep(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let src = cfg.source()?;
    if let Some(msg) = src.amplifier_noise_floor() {
        writeln!(stderr, "warning: infeasible source, {msg}")?;
    }
    let rows = sweep(&cfg.models, cfg.recon, &src, cfg.eps, &cfg.t_grid(), cfg.beta);
    let infeasible = rows.iter().filter(|r| !r.is_feasible()).count();
    if infeasible > 0 {
        let first = rows.iter().find_map(|r| r.outcome.as_ref().err()).unwrap();
        writeln!(stderr, "warning: {infeasible} of {} points infeasible (first: {first})", rows.len())?;
    }

    let csv_body = || -> Result<Vec<u8>, CliError> {
        let mut buf = Vec::new();
        format::write_csv(&mut buf, &rows, cfg.recon, cfg.clamp_zero)?;
        Ok(buf)
    };
    let svg_body = || svg::render(&rows, cfg.recon, (cfg.t_min, cfg.t_max), cfg.clamp_zero).into_bytes();
    match cfg.format {
        OutputFormat::Csv => write_target(cfg.out.as_deref(), &csv_body()?, stdout)?,
        OutputFormat::Svg => write_target(cfg.out.as_deref(), &svg_body(), stdout)?,
        OutputFormat::Both => {
            let out = cfg.out.as_deref().ok_or_else(|| CliError::Usage("--format both needs --out".into()))?;
            fs::write(out.with_extension("csv"), csv_body()?)?;
            fs::write(out.with_extension("svg"), svg_body())?;
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_point(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let t = cfg.t.ok_or_else(|| CliError::Usage("point needs --T".into()))?;
    let src = cfg.source()?;
    let ch = ChannelParams::from_excess_noise(t, cfg.eps)?;
    let mut lines = String::new();
    for &kind in &cfg.models {
        let p = key_rate(kind, cfg.recon, &src, &ch, cfg.beta)?;
        let k = if cfg.clamp_zero { p.key_rate.max(0.0) } else { p.key_rate };
        lines.push_str(&format!(
            "model={} recon={} T={} i_ab={} holevo={} key_rate={} beta={}\n",
            kind.name(),
            cfg.recon.name(),
            format::fmt_num(t),
            format::fmt_num(p.i_ab),
            format::fmt_num(p.holevo),
            format::fmt_num(k),
            format::fmt_num(p.beta)
        ));
    }
    stdout.write_all(lines.as_bytes())?;
    Ok(EXIT_OK)
}

pub fn verification_report(cfg: &RunConfig, tol: LemmaTolerances) -> Result<Report, CliError> {
    let src = cfg.source()?;
    let mut report = lemma_suite_with(&src, cfg.eps, &cfg.t_grid(), tol)?;
    report.extend(eb_pm_equivalence_check(&src)?);
    for t in W_CHECK_T {
        let ch = ChannelParams::from_excess_noise(t, cfg.eps)?;
        report.extend(w_monotonicity_check(&src, &ch, W_SAMPLES)?);
    }
    Ok(report)
}

pub fn cmd_verify(
    cfg: &RunConfig,
    tol: LemmaTolerances,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    let mut report = verification_report(cfg, tol)?;
    for w in report.warnings.drain(..) {
        writeln!(stderr, "warning: {w}")?;
    }
    write_target(cfg.out.as_deref(), report.to_string().as_bytes(), stdout)?;
    Ok(if report.passed() { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

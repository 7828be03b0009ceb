use std::path::{Path, PathBuf};

use serde::Deserialize;
use srcnoise_core::{ModelKind, Reconciliation, SourceParams};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Svg,
    Both,
}

impl OutputFormat {
    pub fn from_name(name: &str) -> Option<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "csv" => Some(Self::Csv),
            "svg" => Some(Self::Svg),
            "both" => Some(Self::Both),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
}

impl Preset {
    pub fn from_name(name: &str) -> Option<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "fig2a" => Some(Self::Fig2a),
            "fig2b" => Some(Self::Fig2b),
            "fig3a" => Some(Self::Fig3a),
            "fig3b" => Some(Self::Fig3b),
            _ => None,
        }
    }

    /// `fig2*` use reverse reconciliation and `fig3*` direct; `*a` is the
    /// attenuating source, `*b` the amplifying one.
    pub fn settings(self) -> Settings {
        let (recon, t_a) = match self {
            Preset::Fig2a => ("reverse", 0.9),
            Preset::Fig2b => ("reverse", 1.1),
            Preset::Fig3a => ("direct", 0.9),
            Preset::Fig3b => ("direct", 1.1),
        };
        Settings {
            v: Some(20.0),
            eps: Some(0.04),
            eps_a: Some(0.1),
            t_a: Some(t_a),
            model: Some("all".into()),
            recon: Some(recon.into()),
            t_min: Some(0.01),
            t_max: Some(1.0),
            t_step: Some(0.01),
            beta: Some(1.0),
            ..Settings::default()
        }
    }
}

/// A partial configuration; layers are merged field by field.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Settings {
    #[serde(rename = "V")]
    pub v: Option<f64>,
    pub eps: Option<f64>,
    #[serde(rename = "epsA")]
    pub eps_a: Option<f64>,
    #[serde(rename = "TA")]
    pub t_a: Option<f64>,
    pub model: Option<String>,
    pub recon: Option<String>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub t_step: Option<f64>,
    #[serde(rename = "T")]
    pub t: Option<f64>,
    pub beta: Option<f64>,
    pub clamp_zero: Option<bool>,
    pub preset: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    /// Fields set in `over` win.
    pub fn overlay(self, over: Settings) -> Settings {
        Settings {
            v: over.v.or(self.v),
            eps: over.eps.or(self.eps),
            eps_a: over.eps_a.or(self.eps_a),
            t_a: over.t_a.or(self.t_a),
            model: over.model.or(self.model),
            recon: over.recon.or(self.recon),
            t_min: over.t_min.or(self.t_min),
            t_max: over.t_max.or(self.t_max),
            t_step: over.t_step.or(self.t_step),
            t: over.t.or(self.t),
            beta: over.beta.or(self.beta),
            clamp_zero: over.clamp_zero.or(self.clamp_zero),
            preset: over.preset.or(self.preset),
            out: over.out.or(self.out),
            format: over.format.or(self.format),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub v: f64,
    pub eps: f64,
    pub eps_a: f64,
    pub t_a: f64,
    pub models: Vec<ModelKind>,
    pub recon: Reconciliation,
    pub t_min: f64,
    pub t_max: f64,
    pub t_step: f64,
    pub t: Option<f64>,
    pub beta: f64,
    pub clamp_zero: bool,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

pub fn parse_models(list: &str) -> Result<Vec<ModelKind>, CliError> {
    let mut models = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if name.eq_ignore_ascii_case("all") {
            models.extend(ModelKind::ALL);
        } else {
            models.push(
                ModelKind::from_name(name).ok_or_else(|| CliError::Usage(format!("unknown model '{name}'")))?,
            );
        }
    }
    if models.is_empty() {
        return Err(CliError::Usage("model list is empty".into()));
    }
    models.sort();
    models.dedup();
    Ok(models)
}

impl RunConfig {
    /// Resolves preset < config file < flags, falling back to the built-in
    /// defaults. `default_models` applies when no layer names any.
    pub fn resolve(file: Option<Settings>, flags: Settings, default_models: &str) -> Result<Self, CliError> {
        let file = file.unwrap_or_default();
        let preset_name = flags.preset.clone().or_else(|| file.preset.clone());
        let mut merged = Settings::default();
        if let Some(name) = preset_name {
            let preset = Preset::from_name(&name).ok_or_else(|| CliError::Usage(format!("unknown preset '{name}'")))?;
            merged = preset.settings();
        }
        let s = merged.overlay(file).overlay(flags);

        let recon_name = s.recon.as_deref().unwrap_or("reverse");
        let format_name = s.format.as_deref().unwrap_or("csv");
        let cfg = RunConfig {
            v: s.v.unwrap_or(20.0),
            eps: s.eps.unwrap_or(0.04),
            eps_a: s.eps_a.unwrap_or(0.1),
            t_a: s.t_a.unwrap_or(0.9),
            models: parse_models(s.model.as_deref().unwrap_or(default_models))?,
            recon: Reconciliation::from_name(recon_name)
                .ok_or_else(|| CliError::Usage(format!("unknown reconciliation '{recon_name}'")))?,
            t_min: s.t_min.unwrap_or(0.01),
            t_max: s.t_max.unwrap_or(1.0),
            t_step: s.t_step.unwrap_or(0.01),
            t: s.t,
            beta: s.beta.unwrap_or(1.0),
            clamp_zero: s.clamp_zero.unwrap_or(false),
            out: s.out,
            format: OutputFormat::from_name(format_name)
                .ok_or_else(|| CliError::Usage(format!("unknown format '{format_name}'")))?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let fail = |msg: String| Err(CliError::Usage(msg));
        if !(self.t_min > 0.0) {
            return fail(format!("t-min > 0 (got {})", self.t_min));
        }
        if !(self.t_max <= 1.0) {
            return fail(format!("t-max <= 1 (got {})", self.t_max));
        }
        if self.t_min > self.t_max {
            return fail(format!("t-min <= t-max (got {} > {})", self.t_min, self.t_max));
        }
        if !(self.t_step > 0.0) {
            return fail(format!("t-step > 0 (got {})", self.t_step));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return fail(format!("0 < beta <= 1 (got {})", self.beta));
        }
        if !self.eps.is_finite() || self.eps < 0.0 {
            return fail(format!("eps >= 0 (got {})", self.eps));
        }
        Ok(())
    }

    pub fn source(&self) -> Result<SourceParams, CliError> {
        Ok(SourceParams::from_excess_noise(self.v, self.t_a, self.eps_a)?)
    }

    /// `t_min, t_min + t_step, ...` up to `t_max`, each point rounded to 12
    /// decimals so accumulated steps print cleanly.
    pub fn t_grid(&self) -> Vec<f64> {
        let n = ((self.t_max - self.t_min) / self.t_step + 1e-9).floor() as usize;
        (0..=n)
            .map(|k| ((self.t_min + k as f64 * self.t_step) * 1e12).round() / 1e12)
            .filter(|t| *t <= self.t_max)
            .collect()
    }
}

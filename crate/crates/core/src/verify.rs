//! Executable checks of the model's structural claims: equivalence of the
//! entanglement-based and prepare-and-measure descriptions of the source,
//! equality of the reverse-reconciliation bounds of the neutral-party and
//! beam-splitter models, the direction of the direct-reconciliation bound,
//! and the minimum of the conditional entropy over the `W` parameter.
//!
//! Every check produces a [`Report`] that renders as one `key=value` line per
//! check followed by a summary line.

use std::fmt;

use nalgebra::{DVector, Matrix2};

use crate::error::{Error, Result};
use crate::gaussian::{
    condition_on_heterodyne, heterodyne_conditional_mean, von_neumann_entropy, CovarianceMatrix,
    DisplacementVector, ModePartition,
};
use crate::keyrate::{holevo_bound, Reconciliation};
use crate::models::{build_gamma_ab, BsRegime, ChannelParams, ModelKind, SourceParams};

pub const EB_PM_TOL: f64 = 1e-10;
pub const W_TOL: f64 = 1e-10;

/// Tolerances of [`lemma_suite_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaTolerances {
    /// Allowed `|holevo_np - holevo_bs|` in reverse reconciliation.
    pub reverse_equality: f64,
    /// Allowed amount by which the direct-reconciliation neutral-party bound
    /// may fall below the beam-splitter one.
    pub direct_order: f64,
}

impl Default for LemmaTolerances {
    fn default() -> Self {
        Self { reverse_equality: 1e-8, direct_order: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// The check could not be evaluated, e.g. a model is undefined there.
    Skipped,
}

impl Status {
    fn name(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub check: String,
    pub subject: String,
    pub status: Status,
    /// Signed so that values above `tolerance` fail.
    pub deviation: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckResult {
    fn judged(check: &str, subject: String, deviation: f64, tolerance: f64, detail: String) -> Self {
        let status = if deviation <= tolerance { Status::Pass } else { Status::Fail };
        Self { check: check.into(), subject, status, deviation, tolerance, detail }
    }

    fn skipped(check: &str, subject: String, tolerance: f64, detail: String) -> Self {
        Self { check: check.into(), subject, status: Status::Skipped, deviation: f64::NAN, tolerance, detail }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<CheckResult>,
    pub warnings: Vec<String>,
}

impl Report {
    /// No check failed. Skipped checks do not count as failures.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    /// Largest deviation among the evaluated results of `check`.
    pub fn max_deviation(&self, check: &str) -> Option<f64> {
        self.checks
            .iter()
            .filter(|c| c.check == check && c.status != Status::Skipped)
            .map(|c| c.deviation)
            .reduce(f64::max)
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
        for w in other.warnings {
            if !self.warnings.contains(&w) {
                self.warnings.push(w);
            }
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in &self.warnings {
            writeln!(f, "warning {w}")?;
        }
        for c in &self.checks {
            write!(
                f,
                "check={} subject={} status={} deviation={:e} tol={:e}",
                c.check,
                c.subject,
                c.status.name(),
                c.deviation,
                c.tolerance
            )?;
            if !c.detail.is_empty() {
                write!(f, " detail=\"{}\"", c.detail.replace('"', "'"))?;
            }
            writeln!(f)?;
        }
        writeln!(
            f,
            "summary checks={} passed={} failed={} skipped={} result={}",
            self.checks.len(),
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skipped),
            if self.passed() { "pass" } else { "fail" }
        )
    }
}

fn source_subject(src: &SourceParams) -> String {
    format!("V={},T_A={},chi_A={}", src.v(), src.t_a(), src.chi_a())
}

/// Heterodyning Alice's half of the noisy EPR source leaves Bob's mode in a
/// displaced thermal state of covariance `T_A (chi_A + 1) I`, displaced by
/// `sqrt(2 T_A (V - 1) / (V + 1)) (X_A, -P_A)`: the same state as a coherent
/// state passed through the source noise.
pub fn eb_pm_equivalence_check(src: &SourceParams) -> Result<Report> {
    let subject = source_subject(src);
    let gamma = build_gamma_ab(src, &ChannelParams::new(1.0, 0.0)?)?;
    let partition = ModePartition::new(vec![1], vec![0])?;

    let cond = condition_on_heterodyne(&gamma, &partition)?;
    let expected = src.t_a() * (src.chi_a() + 1.0);
    let mut worst = 0.0_f64;
    let mut mismatched = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            let want = if i == j { expected } else { 0.0 };
            let dev = (cond[(i, j)] - want).abs();
            worst = worst.max(dev);
            if dev > EB_PM_TOL {
                mismatched.push(format!("({i},{j})={} want {want}", cond[(i, j)]));
            }
        }
    }
    let mut report = Report::default();
    report.checks.push(CheckResult::judged(
        "eb-pm-covariance",
        subject.clone(),
        worst,
        EB_PM_TOL,
        mismatched.join("; "),
    ));

    // Bob's mean for unit records X_A = 1 and P_A = 1; columns of the gain.
    let coefficient = (2.0 * src.t_a() * (src.v() - 1.0) / (src.v() + 1.0)).sqrt();
    let want = Matrix2::new(coefficient, 0.0, 0.0, -coefficient);
    let mut gain = Matrix2::zeros();
    for k in 0..2 {
        let mut record = DVector::zeros(2);
        record[k] = std::f64::consts::SQRT_2;
        let mean = heterodyne_conditional_mean(&gamma, &partition, &DisplacementVector::new(record)?)?;
        gain[(0, k)] = mean.as_vector()[0];
        gain[(1, k)] = mean.as_vector()[1];
    }
    let mut worst = 0.0_f64;
    let mut mismatched = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            let dev = (gain[(i, j)] - want[(i, j)]).abs();
            worst = worst.max(dev);
            if dev > EB_PM_TOL {
                mismatched.push(format!("gain({i},{j})={} want {}", gain[(i, j)], want[(i, j)]));
            }
        }
    }
    report.checks.push(CheckResult::judged(
        "eb-pm-mean",
        subject.clone(),
        worst,
        EB_PM_TOL,
        mismatched.join("; "),
    ));
    // The p quadrature of the mean is anti-correlated with Alice's record.
    let flipped = coefficient == 0.0 || gain[(1, 1)] < 0.0;
    report.checks.push(CheckResult {
        check: "eb-pm-mean-sign".into(),
        subject,
        status: if flipped { Status::Pass } else { Status::Fail },
        deviation: if flipped { 0.0 } else { gain[(1, 1)] },
        tolerance: 0.0,
        detail: if flipped { String::new() } else { "p mean not sign-flipped".into() },
    });
    Ok(report)
}

/// Bob's conditional state after Alice and the neutral party measure, for a
/// neutral-party unitary summarized by `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct WPoint {
    pub w: f64,
    pub gamma_b_af: CovarianceMatrix,
}

impl WPoint {
    pub fn new(src: &SourceParams, ch: &ChannelParams, w: f64) -> Result<Self> {
        Ok(Self { w, gamma_b_af: gamma_b_af_of_w(src, ch, w)? })
    }

    /// `sqrt(x p)` for the diagonal conditional matrix.
    pub fn symplectic_eigenvalue(&self) -> f64 {
        (self.gamma_b_af[(0, 0)] * self.gamma_b_af[(1, 1)]).sqrt()
    }
}

/// `diag(T V'' - T (V'^2 - 1) / (V' - 1 + 1/w), T V'' - T (V'^2 - 1) / (V' - 1 + 1/(1 - w)))`
/// with `V' = T_A (V + chi_A)` and `V'' = V' + chi`.
pub fn gamma_b_af_of_w(src: &SourceParams, ch: &ChannelParams, w: f64) -> Result<CovarianceMatrix> {
    if !(w > 0.0 && w < 1.0) {
        return Err(Error::Domain(format!("0 < W < 1 (got W = {w})")));
    }
    let vp = src.signal_variance();
    let t = ch.t();
    let base = t * (vp + ch.chi());
    let pulled = t * (vp * vp - 1.0);
    let x = base - pulled / (vp - 1.0 + 1.0 / w);
    let p = base - pulled / (vp - 1.0 + 1.0 / (1.0 - w));
    CovarianceMatrix::new(nalgebra::DMatrix::from_row_slice(2, 2, &[x, 0.0, 0.0, p]))
}

/// The `w` values examined by [`w_monotonicity_check`].
pub fn w_grid(samples: usize) -> Result<Vec<f64>> {
    if samples == 0 {
        return Err(Error::Domain("at least one W sample".into()));
    }
    if samples == 1 {
        return Ok(vec![0.5]);
    }
    let mut grid: Vec<f64> = (1..=samples).map(|i| i as f64 / (samples + 1) as f64).collect();
    grid.extend([1e-3, 0.5, 1.0 - 1e-3]);
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    Ok(grid)
}

/// Entropy of Bob's conditional state is smallest at `W = 1/2`, falling on
/// `(0, 1/2]` and rising on `[1/2, 1)`.
pub fn w_monotonicity_check(src: &SourceParams, ch: &ChannelParams, samples: usize) -> Result<Report> {
    let grid = w_grid(samples)?;
    let subject = format!("{},T={},chi={}", source_subject(src), ch.t(), ch.chi());
    let at_half = von_neumann_entropy(&gamma_b_af_of_w(src, ch, 0.5)?)?;
    let entropies = grid
        .iter()
        .map(|&w| Ok((w, von_neumann_entropy(&gamma_b_af_of_w(src, ch, w)?)?)))
        .collect::<Result<Vec<(f64, f64)>>>()?;

    let mut report = Report::default();

    let mut worst = f64::NEG_INFINITY;
    let mut first_bad = None;
    for &(w, s) in &entropies {
        let dev = at_half - s;
        worst = worst.max(dev);
        if dev > W_TOL && first_bad.is_none() {
            first_bad = Some(w);
        }
    }
    report.checks.push(CheckResult::judged(
        "w-minimum",
        subject.clone(),
        worst,
        W_TOL,
        first_bad.map(|w| format!("first violation at W={w}")).unwrap_or_default(),
    ));

    let left: Vec<&(f64, f64)> = entropies.iter().filter(|(w, _)| *w <= 0.5).collect();
    let right: Vec<&(f64, f64)> = entropies.iter().filter(|(w, _)| *w >= 0.5).collect();
    for (name, side, falling) in [("w-falling-left", left, true), ("w-rising-right", right, false)] {
        let mut worst = 0.0_f64;
        let mut first_bad = None;
        for pair in side.windows(2) {
            let (w, s0) = *pair[0];
            let (_, s1) = *pair[1];
            let dev = if falling { s1 - s0 } else { s0 - s1 };
            worst = worst.max(dev);
            if dev > W_TOL && first_bad.is_none() {
                first_bad = Some(w);
            }
        }
        report.checks.push(CheckResult::judged(
            name,
            subject.clone(),
            worst,
            W_TOL,
            first_bad.map(|w| format!("first violation after W={w}")).unwrap_or_default(),
        ));
    }
    Ok(report)
}

pub fn lemma_suite(src: &SourceParams, eps: f64, t_grid: &[f64]) -> Result<Report> {
    lemma_suite_with(src, eps, t_grid, LemmaTolerances::default())
}

/// Over a grid of channel transmittances at excess noise `eps`:
/// reverse-reconciliation Holevo bounds of the neutral-party and
/// beam-splitter models coincide, and the neutral-party direct-reconciliation
/// bound is at least the beam-splitter one. Points where a model is
/// undefined are reported as skipped, with a warning.
pub fn lemma_suite_with(
    src: &SourceParams,
    eps: f64,
    t_grid: &[f64],
    tol: LemmaTolerances,
) -> Result<Report> {
    BsRegime::of(src)?;
    let mut report = Report::default();
    if let Some(msg) = src.amplifier_noise_floor() {
        report.warnings.push(format!("infeasible-source {msg}"));
    }
    let mut grid = t_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    // Skip reasons in first-seen order, with the T values they cover.
    let mut skips: Vec<(String, Vec<f64>)> = Vec::new();
    for t in grid {
        let subject = format!("{},eps={eps},T={t}", source_subject(src));
        let pair = |recon| -> Result<(f64, f64)> {
            let ch = ChannelParams::from_excess_noise(t, eps)?;
            Ok((
                holevo_bound(ModelKind::NeutralParty, recon, src, &ch)?,
                holevo_bound(ModelKind::BeamSplitter, recon, src, &ch)?,
            ))
        };
        match pair(Reconciliation::Reverse) {
            Ok((np, bs)) => report.checks.push(CheckResult::judged(
                "rr-holevo-equality",
                subject.clone(),
                (np - bs).abs(),
                tol.reverse_equality,
                format!("np={np:e} bs={bs:e}"),
            )),
            Err(e) => {
                let reason = e.to_string();
                match skips.iter_mut().find(|(r, _)| *r == reason) {
                    Some((_, ts)) => ts.push(t),
                    None => skips.push((reason, vec![t])),
                }
                report.checks.push(CheckResult::skipped(
                    "rr-holevo-equality",
                    subject.clone(),
                    tol.reverse_equality,
                    e.to_string(),
                ));
            }
        }
        match pair(Reconciliation::Direct) {
            Ok((np, bs)) => report.checks.push(CheckResult::judged(
                "dr-holevo-order",
                subject,
                bs - np,
                tol.direct_order,
                format!("np={np:e} bs={bs:e}"),
            )),
            Err(e) => report.checks.push(CheckResult::skipped(
                "dr-holevo-order",
                subject,
                tol.direct_order,
                e.to_string(),
            )),
        }
    }
    for (reason, ts) in skips {
        let span = match ts.as_slice() {
            [t] => format!("T={t}"),
            [first, .., last] => format!("{} points, T={first}..{last}", ts.len()),
            [] => unreachable!(),
        };
        report.warnings.push(format!("skipped {span}: {reason}"));
    }
    Ok(report)
}

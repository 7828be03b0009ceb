//! Mutual information, Holevo bounds and secret key rates for the
//! no-switching protocol (coherent states, heterodyne detection at both ends).

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gaussian::{condition_on_heterodyne, von_neumann_entropy, CovarianceMatrix, ModePartition};
use crate::models::{build_gamma_ab, build_model_state, ChannelParams, ModelKind, ModelState, SourceParams};

const FORM_TOL: f64 = 1e-9;
const HOLEVO_FLOOR: f64 = -1e-9;

/// Whose measurement the key is distilled from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reconciliation {
    /// Bob's data is the reference.
    Reverse,
    /// Alice's data is the reference.
    Direct,
}

impl Reconciliation {
    pub fn name(&self) -> &'static str {
        match self {
            Reconciliation::Reverse => "reverse",
            Reconciliation::Direct => "direct",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "reverse" | "rr" | "RR" => Some(Reconciliation::Reverse),
            "direct" | "dr" | "DR" => Some(Reconciliation::Direct),
            _ => None,
        }
    }
}

impl fmt::Display for Reconciliation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One evaluated key rate. All information quantities are in bits per
/// channel use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRatePoint {
    pub t: f64,
    pub model: ModelKind,
    pub recon: Reconciliation,
    pub i_ab: f64,
    pub holevo: f64,
    /// `beta * i_ab - holevo`; negative values are kept.
    pub key_rate: f64,
    pub beta: f64,
}

/// Alice-Bob mutual information when both heterodyne a state with
/// covariance `[[a I, c Z], [c Z, b I]]`:
/// `log2((b + 1) / (b + 1 - c^2 / (a + 1)))`, i.e. half a log-ratio of
/// variances per quadrature, summed over both quadratures.
pub fn mutual_information_no_switching(gamma_ab: &CovarianceMatrix) -> Result<f64> {
    if gamma_ab.n_modes() != 2 {
        return Err(Error::ProtocolMismatch(format!(
            "expected a two-mode matrix, got {} modes",
            gamma_ab.n_modes()
        )));
    }
    let a = gamma_ab[(0, 0)];
    let b = gamma_ab[(2, 2)];
    let c = gamma_ab[(0, 2)];
    let scale = a.abs().max(b.abs()).max(1.0);
    let expected = [
        ((1, 1), a),
        ((0, 1), 0.0),
        ((3, 3), b),
        ((2, 3), 0.0),
        ((1, 3), -c),
        ((0, 3), 0.0),
        ((1, 2), 0.0),
    ];
    for ((i, j), want) in expected {
        let got = gamma_ab[(i, j)];
        if !((got - want).abs() <= FORM_TOL * scale) {
            return Err(Error::ProtocolMismatch(format!(
                "entry ({i}, {j}) = {got}, expected {want}"
            )));
        }
    }
    let conditional = b + 1.0 - c * c / (a + 1.0);
    if !(conditional > 0.0) {
        return Err(Error::Internal(format!("conditional heterodyne variance {conditional} <= 0")));
    }
    Ok(((b + 1.0) / conditional).log2())
}

/// `S(E) - S(E | m)` for an already built model state, where `m` is Bob's
/// (reverse) or Alice's (direct) heterodyne outcome. Eve purifies every mode
/// of the state, so `S(E)` is the entropy of the whole matrix and `S(E | m)`
/// that of the remaining modes conditioned on `m`.
pub fn holevo_from_state(state: &ModelState, recon: Reconciliation) -> Result<f64> {
    let measured = match recon {
        Reconciliation::Reverse => state.roles.b,
        Reconciliation::Direct => state.roles.a,
    };
    let partition = ModePartition::measuring(state.gamma.n_modes(), &[measured])?;
    let s_e = von_neumann_entropy(&state.gamma)?;
    let s_e_given_m = von_neumann_entropy(&condition_on_heterodyne(&state.gamma, &partition)?)?;
    let holevo = s_e - s_e_given_m;
    if holevo < HOLEVO_FLOOR {
        return Err(Error::Internal(format!("negative Holevo quantity {holevo}")));
    }
    Ok(holevo)
}

/// Upper bound on Eve's information about the reference data.
///
/// For the neutral-party model this is exact in reverse reconciliation and
/// an overestimate in direct reconciliation.
pub fn holevo_bound(
    kind: ModelKind,
    recon: Reconciliation,
    src: &SourceParams,
    ch: &ChannelParams,
) -> Result<f64> {
    holevo_from_state(&build_model_state(kind, src, ch)?, recon)
}

pub fn key_rate(
    kind: ModelKind,
    recon: Reconciliation,
    src: &SourceParams,
    ch: &ChannelParams,
    beta: f64,
) -> Result<KeyRatePoint> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Parameter(format!("0 < beta <= 1 (got beta = {beta})")));
    }
    let i_ab = mutual_information_no_switching(&build_gamma_ab(src, ch)?)?;
    let holevo = holevo_bound(kind, recon, src, ch)?;
    Ok(KeyRatePoint { t: ch.t(), model: kind, recon, i_ab, holevo, key_rate: beta * i_ab - holevo, beta })
}

/// One grid point of a sweep; parameter errors are kept in the row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub model: ModelKind,
    pub t: f64,
    pub outcome: Result<KeyRatePoint>,
}

impl SweepRow {
    pub fn is_feasible(&self) -> bool {
        self.outcome.is_ok()
    }
}

/// Evaluates every `(model, T)` pair, with the channel noise recomputed from
/// `eps` at each `T`. Rows come back ordered by model then ascending `T`,
/// whatever order the inputs are in.
pub fn sweep(
    kinds: &[ModelKind],
    recon: Reconciliation,
    src: &SourceParams,
    eps: f64,
    t_grid: &[f64],
    beta: f64,
) -> Vec<SweepRow> {
    let mut kinds = kinds.to_vec();
    kinds.sort();
    kinds.dedup();
    let mut grid = t_grid.to_vec();
    grid.sort_by(f64::total_cmp);

    let jobs: Vec<(ModelKind, f64)> =
        kinds.iter().flat_map(|&k| grid.iter().map(move |&t| (k, t))).collect();
    jobs.par_iter()
        .map(|&(model, t)| SweepRow {
            model,
            t,
            outcome: ChannelParams::from_excess_noise(t, eps)
                .and_then(|ch| key_rate(model, recon, src, &ch, beta)),
        })
        .collect()
}

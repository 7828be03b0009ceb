//! Covariance matrices of the three source-noise models.
//!
//! Source noise is parameterized by a transmittance/gain `T_A` and an added
//! noise `chi_A` referred to the input, so that the signal leaving the source
//! has variance `T_A (V + chi_A)`. The channel is parameterized the same way
//! by `T` and `chi`. Experiments are usually quoted in excess noise,
//! `eps = T chi - 1 + T`, which is what the `from_excess_noise` constructors
//! take.

use std::fmt;

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::gaussian::{sigma_z, CovarianceMatrix};

const PARAM_TOL: f64 = 1e-12;

/// `chi = (eps + 1 - T) / T`, the added noise referred to the input that
/// yields excess noise `eps` at transmittance (or gain) `T`.
pub fn params_from_excess_noise(transmittance: f64, epsilon: f64) -> Result<f64> {
    if !(transmittance > 0.0) {
        return Err(Error::Parameter(format!("T > 0 (got T = {transmittance})")));
    }
    if !(epsilon >= 0.0) {
        return Err(Error::Parameter(format!("eps >= 0 (got eps = {epsilon})")));
    }
    let chi = (epsilon + 1.0 - transmittance) / transmittance;
    if chi < -PARAM_TOL {
        return Err(Error::Parameter(format!(
            "chi = (eps + 1 - T) / T >= 0, i.e. T <= 1 + eps (got T = {transmittance}, eps = {epsilon})"
        )));
    }
    Ok(chi.max(0.0))
}

/// Source variance and noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceParams {
    v: f64,
    t_a: f64,
    chi_a: f64,
}

impl SourceParams {
    /// Accepts any source whose noise is not below vacuum (`eps_A >= 0`).
    ///
    /// An amplifying source (`T_A > 1`) also needs `chi_A >= (T_A - 1) / T_A`
    /// to be realisable; that is reported by [`SourceParams::amplifier_noise_floor`]
    /// rather than rejected here, so that published parameter sets violating it
    /// can still be evaluated with whichever models remain defined. Use
    /// [`SourceParams::strict`] to reject them.
    pub fn new(v: f64, t_a: f64, chi_a: f64) -> Result<Self> {
        if !(v >= 1.0) {
            return Err(Error::Parameter(format!("V >= 1 (got V = {v})")));
        }
        if !(t_a > 0.0) || !t_a.is_finite() {
            return Err(Error::Parameter(format!("T_A > 0 (got T_A = {t_a})")));
        }
        if !(chi_a >= 0.0) || !chi_a.is_finite() {
            return Err(Error::Parameter(format!("chi_A >= 0 (got chi_A = {chi_a})")));
        }
        let params = Self { v, t_a, chi_a };
        if params.eps_a() < -PARAM_TOL {
            return Err(Error::Parameter(format!(
                "eps_A = T_A chi_A - 1 + T_A >= 0 (got eps_A = {})",
                params.eps_a()
            )));
        }
        Ok(params)
    }

    pub fn from_excess_noise(v: f64, t_a: f64, eps_a: f64) -> Result<Self> {
        Self::new(v, t_a, params_from_excess_noise(t_a, eps_a)?)
    }

    /// Like [`SourceParams::new`] but also enforces the amplifier noise floor.
    pub fn strict(v: f64, t_a: f64, chi_a: f64) -> Result<Self> {
        let params = Self::new(v, t_a, chi_a)?;
        match params.amplifier_noise_floor() {
            Some(msg) => Err(Error::Parameter(msg)),
            None => Ok(params),
        }
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn t_a(&self) -> f64 {
        self.t_a
    }

    pub fn chi_a(&self) -> f64 {
        self.chi_a
    }

    pub fn eps_a(&self) -> f64 {
        self.t_a * self.chi_a - 1.0 + self.t_a
    }

    /// Variance `T_A (V + chi_A)` of the signal mode leaving the source.
    pub fn signal_variance(&self) -> f64 {
        self.t_a * (self.v + self.chi_a)
    }

    /// Violation of `chi_A >= (T_A - 1) / T_A` for an amplifying source, if any.
    pub fn amplifier_noise_floor(&self) -> Option<String> {
        if self.t_a <= 1.0 {
            return None;
        }
        let floor = (self.t_a - 1.0) / self.t_a;
        (self.chi_a < floor - PARAM_TOL).then(|| {
            format!(
                "chi_A >= (T_A - 1) / T_A for T_A > 1 (got chi_A = {}, floor = {floor}; \
                 equivalently eps_A >= 2 (T_A - 1) = {})",
                self.chi_a,
                2.0 * (self.t_a - 1.0)
            )
        })
    }
}

/// Gaussian channel transmittance and noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    t: f64,
    chi: f64,
}

impl ChannelParams {
    pub fn new(t: f64, chi: f64) -> Result<Self> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::Parameter(format!("0 < T <= 1 (got T = {t})")));
        }
        let floor = (1.0 - t) / t;
        if !(chi >= floor - PARAM_TOL) || !chi.is_finite() {
            return Err(Error::Parameter(format!(
                "chi >= (1 - T) / T = {floor}, i.e. eps >= 0 (got chi = {chi})"
            )));
        }
        Ok(Self { t, chi })
    }

    pub fn from_excess_noise(t: f64, eps: f64) -> Result<Self> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::Parameter(format!("0 < T <= 1 (got T = {t})")));
        }
        Self::new(t, params_from_excess_noise(t, eps)?)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn eps(&self) -> f64 {
        self.t * self.chi - 1.0 + self.t
    }
}

/// Source-noise model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelKind {
    /// Noise injected by a neutral party through an unknown Gaussian unitary.
    NeutralParty,
    /// Noise from an ancillary EPR pair mixed in on a beam splitter.
    BeamSplitter,
    /// Source noise attributed to the eavesdropper.
    UntrustedSource,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] =
        [ModelKind::NeutralParty, ModelKind::BeamSplitter, ModelKind::UntrustedSource];

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::NeutralParty => "neutral-party",
            ModelKind::BeamSplitter => "beam-splitter",
            ModelKind::UntrustedSource => "untrusted",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "neutral-party" | "neutral" | "np" => Some(ModelKind::NeutralParty),
            "beam-splitter" | "bs" => Some(ModelKind::BeamSplitter),
            "untrusted" | "untrusted-source" | "un" => Some(ModelKind::UntrustedSource),
            _ => None,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Beam-splitter regime, fixed by whether the source attenuates or amplifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsRegime {
    Attenuation,
    Amplification,
}

impl BsRegime {
    pub fn of(src: &SourceParams) -> Result<Self> {
        if src.t_a < 1.0 {
            Ok(BsRegime::Attenuation)
        } else if src.t_a > 1.0 {
            Ok(BsRegime::Amplification)
        } else {
            Err(Error::Regime(
                "beam-splitter model needs T_A != 1 (ancilla variance has 1 - T_A in the denominator)"
                    .into(),
            ))
        }
    }
}

/// Ancilla parameters of the beam-splitter model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BsDerivedParams {
    Attenuation {
        /// Ancilla EPR variance `N = T_A chi_A / (1 - T_A)`.
        n: f64,
    },
    Amplification {
        v_b: f64,
        t_b: f64,
        chi_b: f64,
        n_b: f64,
    },
}

impl BsDerivedParams {
    /// Evaluates the derived parameters without checking that they describe a
    /// physical ancilla.
    pub fn compute(src: &SourceParams) -> Result<Self> {
        let (v, t_a, chi_a) = (src.v, src.t_a, src.chi_a);
        Ok(match BsRegime::of(src)? {
            BsRegime::Attenuation => BsDerivedParams::Attenuation { n: t_a * chi_a / (1.0 - t_a) },
            BsRegime::Amplification => {
                let v_b = src.signal_variance();
                let t_b = t_a * (v * v - 1.0) / (v_b * v_b - 1.0);
                let chi_b = (t_a * t_a * (v + chi_a) * (v * chi_a + 1.0) - v) / (t_a * (v * v - 1.0));
                let n_b = t_b * chi_b / (1.0 - t_b);
                BsDerivedParams::Amplification { v_b, t_b, chi_b, n_b }
            }
        })
    }

    /// Checks `N >= 1`, or `T_B < 1` and `chi_B >= (1 - T_B) / T_B`.
    pub fn validate(&self) -> Result<()> {
        match *self {
            BsDerivedParams::Attenuation { n } => {
                if !(n >= 1.0 - PARAM_TOL) {
                    return Err(Error::Parameter(format!(
                        "ancilla variance N = T_A chi_A / (1 - T_A) >= 1 (got N = {n})"
                    )));
                }
            }
            BsDerivedParams::Amplification { t_b, chi_b, n_b, .. } => {
                if !(t_b < 1.0) {
                    return Err(Error::Parameter(format!("T_B < 1 (got T_B = {t_b})")));
                }
                let floor = (1.0 - t_b) / t_b;
                if !(chi_b >= floor - PARAM_TOL) {
                    return Err(Error::Parameter(format!(
                        "chi_B >= (1 - T_B) / T_B = {floor} (got chi_B = {chi_b}, \
                         ancilla variance N_B = {n_b} < 1)"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `[[V I, sqrt(T T_A (V^2 - 1)) Z], [.., T (T_A (V + chi_A) + chi) I]]`,
/// modes (A, B).
pub fn build_gamma_ab(src: &SourceParams, ch: &ChannelParams) -> Result<CovarianceMatrix> {
    let v = src.v;
    let corr = (ch.t * src.t_a * (v * v - 1.0)).sqrt();
    let b = ch.t * (src.signal_variance() + ch.chi);
    two_mode(v, corr, b)
}

fn two_mode(a: f64, corr: f64, b: f64) -> Result<CovarianceMatrix> {
    CovarianceMatrix::from_mode_blocks(2, |i, j| match (i, j) {
        (0, 0) => Matrix2::identity() * a,
        (1, 1) => Matrix2::identity() * b,
        _ => sigma_z() * corr,
    })
}

/// Neutral-party bound state, modes (F, A, B): a vacuum F and an EPR pair of
/// variance `V' = T_A (V + chi_A)` whose B half crossed the channel.
pub fn build_gamma_prime_fab(src: &SourceParams, ch: &ChannelParams) -> Result<CovarianceMatrix> {
    let vp = src.signal_variance();
    if !(vp >= 1.0 - PARAM_TOL) {
        return Err(Error::Parameter(format!("V' = T_A (V + chi_A) >= 1 (got V' = {vp})")));
    }
    let corr = (ch.t * (vp * vp - 1.0).max(0.0)).sqrt();
    let b = ch.t * (vp + ch.chi);
    CovarianceMatrix::from_mode_blocks(3, |i, j| match (i, j) {
        (0, 0) => Matrix2::identity(),
        (1, 1) => Matrix2::identity() * vp,
        (2, 2) => Matrix2::identity() * b,
        (1, 2) | (2, 1) => sigma_z() * corr,
        _ => Matrix2::zeros(),
    })
}

fn symmetric_blocks(n_modes: usize, upper: &[((usize, usize), Matrix2<f64>)]) -> Result<CovarianceMatrix> {
    CovarianceMatrix::from_mode_blocks(n_modes, |i, j| {
        let (key, transpose) = if i <= j { ((i, j), false) } else { ((j, i), true) };
        upper
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, m)| if transpose { m.transpose() } else { *m })
            .unwrap_or_else(Matrix2::zeros)
    })
}

/// Beam-splitter model with an attenuating source, modes (F, G, A, B).
pub fn build_bs_attenuation(
    src: &SourceParams,
    ch: &ChannelParams,
) -> Result<(CovarianceMatrix, BsDerivedParams)> {
    if BsRegime::of(src)? != BsRegime::Attenuation {
        return Err(Error::Regime(format!(
            "attenuation model needs T_A < 1 (got T_A = {})",
            src.t_a
        )));
    }
    let derived = BsDerivedParams::compute(src)?;
    derived.validate()?;
    let BsDerivedParams::Attenuation { n } = derived else {
        unreachable!("regime checked above");
    };
    let (v, t_a, t) = (src.v, src.t_a, ch.t);
    let n2 = (n * n - 1.0).max(0.0);
    let id = Matrix2::identity();
    let z = sigma_z();
    let gamma = symmetric_blocks(
        4,
        &[
            ((0, 0), id * n),
            ((0, 1), z * (t_a * n2).sqrt()),
            ((0, 3), z * -(t * (1.0 - t_a) * n2).sqrt()),
            ((1, 1), id * (t_a * n + (1.0 - t_a) * v)),
            ((1, 2), z * ((1.0 - t_a) * (v * v - 1.0)).sqrt()),
            ((1, 3), id * ((t * t_a * (1.0 - t_a)).sqrt() * (v - n))),
            ((2, 2), id * v),
            ((2, 3), z * (t * t_a * (v * v - 1.0)).sqrt()),
            ((3, 3), id * (t * (src.signal_variance() + ch.chi))),
        ],
    )?;
    Ok((gamma, derived))
}

/// Beam-splitter model with an amplifying source, modes (F, G, A, B). The
/// ancilla couples to Alice's mode; the EPR variance and coupling are
/// replaced by `V_B`, `T_B`, `chi_B`, `N_B` so that the (A, B) block is
/// unchanged.
pub fn build_bs_amplification(
    src: &SourceParams,
    ch: &ChannelParams,
) -> Result<(CovarianceMatrix, BsDerivedParams)> {
    if BsRegime::of(src)? != BsRegime::Amplification {
        return Err(Error::Regime(format!(
            "amplification model needs T_A > 1 (got T_A = {})",
            src.t_a
        )));
    }
    let derived = BsDerivedParams::compute(src)?;
    derived.validate()?;
    let BsDerivedParams::Amplification { v_b, t_b, chi_b, n_b } = derived else {
        unreachable!("regime checked above");
    };
    let t = ch.t;
    let n2 = (n_b * n_b - 1.0).max(0.0);
    let vb2 = v_b * v_b - 1.0;
    let id = Matrix2::identity();
    let z = sigma_z();
    let gamma = symmetric_blocks(
        4,
        &[
            ((0, 0), id * n_b),
            ((0, 1), z * (t_b * n2).sqrt()),
            ((0, 2), z * -((1.0 - t_b) * n2).sqrt()),
            ((1, 1), id * (t_b * n_b + (1.0 - t_b) * v_b)),
            ((1, 2), id * ((t_b * (1.0 - t_b)).sqrt() * (v_b - n_b))),
            ((1, 3), z * (t * (1.0 - t_b) * vb2).sqrt()),
            ((2, 2), id * (t_b * (v_b + chi_b))),
            ((2, 3), z * (t * t_b * vb2).sqrt()),
            ((3, 3), id * (t * (v_b + ch.chi))),
        ],
    )?;
    Ok((gamma, derived))
}

/// Value of `chi_A^2 + (V - 1) chi_A - (T_A V - 1)(T_A - 1) / T_A^2`, which
/// must be nonnegative for the amplification ancilla to be physical.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplificationFeasibility {
    pub value: f64,
    pub feasible: bool,
    pub diagnostic: String,
}

pub fn check_amplification_feasibility(src: &SourceParams) -> AmplificationFeasibility {
    let (v, t_a, chi_a) = (src.v, src.t_a, src.chi_a);
    let value = chi_a * chi_a + (v - 1.0) * chi_a - (t_a * v - 1.0) * (t_a - 1.0) / (t_a * t_a);
    let feasible = value >= -PARAM_TOL;
    let diagnostic = if feasible {
        format!("amplification ancilla physical: polynomial = {value:.6e} >= 0")
    } else {
        format!(
            "amplification ancilla unphysical: chi_A^2 + (V - 1) chi_A - (T_A V - 1)(T_A - 1) / T_A^2 \
             = {value:.6e} < 0 at V = {v}, T_A = {t_a}, chi_A = {chi_a}; needs chi_A >= {}",
            (t_a - 1.0) / t_a
        )
    };
    AmplificationFeasibility { value, feasible, diagnostic }
}

/// Indices of the modes playing each role in a model state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeRoles {
    pub f: Option<usize>,
    pub g: Option<usize>,
    pub a: usize,
    pub b: usize,
}

/// A model's covariance matrix together with its mode layout.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelState {
    pub kind: ModelKind,
    pub gamma: CovarianceMatrix,
    pub roles: ModeRoles,
    pub bs: Option<BsDerivedParams>,
}

pub fn build_model_state(kind: ModelKind, src: &SourceParams, ch: &ChannelParams) -> Result<ModelState> {
    match kind {
        ModelKind::NeutralParty => Ok(ModelState {
            kind,
            gamma: build_gamma_prime_fab(src, ch)?,
            roles: ModeRoles { f: Some(0), g: None, a: 1, b: 2 },
            bs: None,
        }),
        ModelKind::BeamSplitter => {
            let (gamma, derived) = match BsRegime::of(src)? {
                BsRegime::Attenuation => build_bs_attenuation(src, ch)?,
                BsRegime::Amplification => build_bs_amplification(src, ch)?,
            };
            Ok(ModelState {
                kind,
                gamma,
                roles: ModeRoles { f: Some(0), g: Some(1), a: 2, b: 3 },
                bs: Some(derived),
            })
        }
        ModelKind::UntrustedSource => Ok(ModelState {
            kind,
            gamma: build_gamma_ab(src, ch)?,
            roles: ModeRoles { f: None, g: None, a: 0, b: 1 },
            bs: None,
        }),
    }
}

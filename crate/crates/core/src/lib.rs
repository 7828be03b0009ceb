//! Secret-key-rate bounds for continuous-variable QKD with trusted Gaussian
//! source noise.
//!
//! Three descriptions of a noisy coherent-state source are supported: a
//! neutral party applying an unknown Gaussian unitary ([`ModelKind::NeutralParty`]),
//! an explicit beam-splitter coupling to an ancillary EPR pair
//! ([`ModelKind::BeamSplitter`]), and the worst case where the source noise is
//! handed to the eavesdropper ([`ModelKind::UntrustedSource`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gaussian;

pub use error::{Error, Result};
pub use gaussian::{CovarianceMatrix, DisplacementVector, ModePartition, Quadrature};
pub mod models;
pub use models::{BsDerivedParams, ChannelParams, ModelKind, SourceParams};
pub mod keyrate;
pub use keyrate::{key_rate, sweep, KeyRatePoint, Reconciliation, SweepRow};
pub mod verify;

//! Signal conditioning: zero-phase IIR filters, common average reference,
//! FastICA ocular correction and the chain that combines them.

pub mod chain;
pub mod ica;
pub mod iir;
pub mod reference;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use chain::{preprocess, preprocess_channels, preprocess_owned, IcaConfig, PreprocessConfig, Provenance, StageRecord, StageStatus};
pub use ica::{fastica, fastica_decimated, fit_epoch, remove_ocular_components, IcaDecomposition, OcularRemoval};
pub use iir::{design_butterworth, design_notch, filtfilt, filtfilt_rows, Biquad, FilterKind, FilterSpec, Sos};
pub use reference::common_average_reference;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Notch,
    HighPass,
    OcularIca,
    CommonAverageReference,
    BandPass,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Notch => "notch",
            Stage::HighPass => "high-pass",
            Stage::OcularIca => "ocular ICA",
            Stage::CommonAverageReference => "common average reference",
            Stage::BandPass => "band-pass",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum DspError {
    #[error("cutoff {cutoff} Hz is not inside (0, {}) Hz", sample_rate / 2.0)]
    InvalidCutoff { cutoff: f64, sample_rate: f64 },
    #[error("filter order must be at least 1, got {0}")]
    InvalidOrder(usize),
    #[error("notch quality factor must be positive, got {0}")]
    InvalidQuality(f64),
    #[error("signal of {len} samples is too short, need at least {needed}")]
    SignalTooShort { len: usize, needed: usize },
    #[error("need at least {needed} EEG channels, found {found}")]
    TooFewChannels { needed: usize, found: usize },
    #[error("cannot extract {requested} components from {channels} channels")]
    InvalidComponents { requested: usize, channels: usize },
    #[error("covariance is rank deficient (eigenvalue ratio {rank_ratio:e})")]
    RankDeficient { rank_ratio: f64 },
    #[error("FastICA did not converge after {iterations} iterations")]
    NotConverged { iterations: usize },
    #[error("invalid epoch: {0}")]
    InvalidEpoch(String),
    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<DspError>,
    },
}

//! Welch PSD, θ/α/β band powers and region aggregation.

pub mod bands;
pub mod features;
pub mod regions;
pub mod welch;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use bands::{band_powers, normalize_bands, Band, BandDefinition, BandPowers};
pub use features::{
    extract_all, extract_channels, extract_features, ChannelPowers, FeatureRow, FeatureTable, Normalization,
    SpectralConfig, SpectralFeatures,
};
pub use regions::{region_lookup, RegionName, RegionSpec};
pub use welch::{welch_psd, Psd, Welch};

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("signal of {len} samples is too short, need at least {needed}")]
    SignalTooShort { len: usize, needed: usize },
    #[error("overlap must lie in [0, 1), got {0}")]
    InvalidOverlap(f64),
    #[error("band [{lo}, {hi}] Hz lies outside the frequency grid")]
    BandOutsideGrid { lo: f64, hi: f64 },
    #[error("total band power is zero")]
    ZeroPower,
    #[error("unknown region {0:?}")]
    UnknownRegion(String),
    #[error("epoch has no channel {0}")]
    MissingChannel(String),
    #[error("malformed feature table {}: {reason}", path.display())]
    MalformedTable { path: PathBuf, reason: String },
    #[error("csv error on {}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl SpectralError {
    pub(crate) fn io(path: &Path, source: csv::Error) -> Self {
        SpectralError::Csv {
            path: path.to_path_buf(),
            source,
        }
    }
}

//! Rank-based group comparisons and the familiarity / response-rate trend.

pub mod compare;
pub mod mann_whitney;
pub mod trend;

use thiserror::Error;

use crate::spectral::RegionName;

pub use compare::{
    compare_groups, standard_comparisons, write_significance_csv, Comparison, ComparisonRecord,
    Group, Variable, ALPHA,
};
pub use mann_whitney::{mann_whitney_u, mann_whitney_u_with, Alternative, Method, TestResult};
pub use trend::{bin_edges, median_trend, GroupSummary, TrendBin};

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("empty sample (n_a = {n_a}, n_b = {n_b})")]
    EmptySample { n_a: usize, n_b: usize },
    #[error("inputs have different lengths {lengths:?}")]
    LengthMismatch { lengths: Vec<usize> },
    #[error("need at least 2 bins, got {0}")]
    InvalidBins(usize),
    #[error("non-finite or out-of-range value")]
    NonFinite,
    #[error("exact p-values need tie-free samples")]
    TiesInExact,
    #[error("feature table lacks channels for region {0}")]
    MissingRegion(RegionName),
    #[error("csv error on {0}: {1}")]
    Csv(String, #[source] csv::Error),
}

//! Median response rate across familiarity bins, per preference group.

use serde::Serialize;

use super::mann_whitney::{mann_whitney_u, Alternative, TestResult};
use super::StatsError;
use crate::corpus::PreferenceLabel;
use crate::numeric::median;

/// Smallest group size whose median is reported.
pub const MIN_REPORTED: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSummary {
    pub n: usize,
    /// Median of whatever the bin holds; `None` when empty.
    pub median: Option<f64>,
}

impl GroupSummary {
    fn of(values: &[f64]) -> Self {
        GroupSummary {
            n: values.len(),
            median: (!values.is_empty()).then(|| median(values)),
        }
    }

    /// The median only when the group is large enough to report.
    pub fn reported(&self) -> Option<f64> {
        self.median.filter(|_| self.n >= MIN_REPORTED)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendBin {
    pub lo: f64,
    pub hi: f64,
    pub favored: GroupSummary,
    pub non_favored: GroupSummary,
    /// Favored vs non-favored response rates; only on the top bin.
    pub test: Option<TestResult>,
}

/// Edges of `n_bins` equal-width bins over [-1, 1].
pub fn bin_edges(n_bins: usize) -> Vec<f64> {
    (0..=n_bins)
        .map(|i| -1.0 + 2.0 * i as f64 / n_bins as f64)
        .collect()
}

/// Bin index of a familiarity value; the top bin is closed on the right.
fn bin_of(x: f64, n_bins: usize) -> usize {
    (((x + 1.0) / 2.0 * n_bins as f64).floor() as usize).min(n_bins - 1)
}

pub fn median_trend(
    familiarity: &[f64],
    response_rate: &[f64],
    labels: &[PreferenceLabel],
    n_bins: usize,
    alpha: f64,
) -> Result<Vec<TrendBin>, StatsError> {
    if familiarity.len() != response_rate.len() || familiarity.len() != labels.len() {
        return Err(StatsError::LengthMismatch {
            lengths: vec![familiarity.len(), response_rate.len(), labels.len()],
        });
    }
    if n_bins < 2 {
        return Err(StatsError::InvalidBins(n_bins));
    }
    if familiarity.iter().any(|f| !(-1.0..=1.0).contains(f)) {
        return Err(StatsError::NonFinite);
    }
    let mut fav = vec![Vec::new(); n_bins];
    let mut non = vec![Vec::new(); n_bins];
    for ((&f, &r), &l) in familiarity.iter().zip(response_rate).zip(labels) {
        let b = bin_of(f, n_bins);
        match l {
            PreferenceLabel::Favored => fav[b].push(r),
            PreferenceLabel::NonFavored => non[b].push(r),
            PreferenceLabel::Undecided => {}
        }
    }
    let edges = bin_edges(n_bins);
    let mut out = Vec::with_capacity(n_bins);
    for i in 0..n_bins {
        let test = if i == n_bins - 1 && !fav[i].is_empty() && !non[i].is_empty() {
            Some(mann_whitney_u(&fav[i], &non[i], Alternative::TwoSided, alpha)?)
        } else {
            None
        };
        out.push(TrendBin {
            lo: edges[i],
            hi: edges[i + 1],
            favored: GroupSummary::of(&fav[i]),
            non_favored: GroupSummary::of(&non[i]),
            test,
        });
    }
    Ok(out)
}

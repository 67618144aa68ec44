//! Labeled group comparisons over the per-trial feature table.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::mann_whitney::{mann_whitney_u, Alternative, TestResult};
use super::StatsError;
use crate::corpus::{MusicType, PreferenceLabel};
use crate::spectral::{Band, FeatureRow, FeatureTable, RegionName, RegionSpec};

/// Significance level used throughout.
pub const ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub label: PreferenceLabel,
    pub music_type: MusicType,
}

impl Group {
    pub fn new(label: PreferenceLabel, music_type: MusicType) -> Self {
        Group { label, music_type }
    }

    fn contains(&self, row: &FeatureRow) -> bool {
        row.label == self.label && row.key.music_type == self.music_type
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.label, self.music_type)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variable {
    Familiarity,
    ResponseRate,
    BandPower { region: RegionName, band: Band },
}

impl Variable {
    pub fn name(&self) -> &'static str {
        match self {
            Variable::Familiarity => "familiarity",
            Variable::ResponseRate => "response_rate",
            Variable::BandPower { .. } => "band_power",
        }
    }

    fn value(&self, table: &FeatureTable, row: &FeatureRow) -> Result<f64, StatsError> {
        match *self {
            Variable::Familiarity => Ok(row.familiarity),
            Variable::ResponseRate => Ok(row.response_rate),
            Variable::BandPower { region, band } => table
                .region_band(row, &RegionSpec::of(region), band)
                .ok_or(StatsError::MissingRegion(region)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub a: Group,
    pub b: Group,
    pub variable: Variable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRecord {
    pub comparison: Comparison,
    pub result: TestResult,
}

impl ComparisonRecord {
    pub fn label(&self) -> String {
        format!("{} vs {}", self.comparison.a, self.comparison.b)
    }
}

fn values(
    table: &FeatureTable,
    group: Group,
    variable: Variable,
) -> Result<Vec<f64>, StatsError> {
    table
        .rows
        .iter()
        .filter(|r| group.contains(r))
        .map(|r| variable.value(table, r))
        .collect()
}

/// Mann-Whitney comparison of one variable between two label × type groups.
/// Undecided rows only take part if a group explicitly asks for them.
pub fn compare_groups(
    table: &FeatureTable,
    comparison: Comparison,
    alpha: f64,
) -> Result<ComparisonRecord, StatsError> {
    let a = values(table, comparison.a, comparison.variable)?;
    let b = values(table, comparison.b, comparison.variable)?;
    let result = mann_whitney_u(&a, &b, Alternative::TwoSided, alpha)?;
    Ok(ComparisonRecord { comparison, result })
}

/// The behavioral pairwise comparisons (favored vs non-favored per type and
/// Melody vs Song per label, for familiarity and response rate) followed by
/// favored vs non-favored band-power comparisons for each hemisphere and
/// frontal region and each band.
pub fn standard_comparisons() -> Vec<Comparison> {
    use MusicType::*;
    use PreferenceLabel::*;
    let pairs = [
        (Group::new(Favored, Melody), Group::new(NonFavored, Melody)),
        (Group::new(Favored, Song), Group::new(NonFavored, Song)),
        (Group::new(Favored, Melody), Group::new(Favored, Song)),
        (Group::new(NonFavored, Melody), Group::new(NonFavored, Song)),
    ];
    let mut out = Vec::new();
    for variable in [Variable::Familiarity, Variable::ResponseRate] {
        for (a, b) in pairs {
            out.push(Comparison { a, b, variable });
        }
    }
    let regions = [
        RegionName::HemisphereLeft,
        RegionName::HemisphereRight,
        RegionName::FrontalLeft,
        RegionName::FrontalRight,
    ];
    for music_type in MusicType::ALL {
        for region in regions {
            for band in Band::ALL {
                out.push(Comparison {
                    a: Group::new(Favored, music_type),
                    b: Group::new(NonFavored, music_type),
                    variable: Variable::BandPower { region, band },
                });
            }
        }
    }
    out
}

pub const SIGNIFICANCE_HEADER: [&str; 11] = [
    "comparison",
    "variable",
    "region",
    "band",
    "n_a",
    "n_b",
    "median_a",
    "median_b",
    "U",
    "p",
    "significant",
];

pub fn write_significance_csv(path: &Path, records: &[ComparisonRecord]) -> Result<(), StatsError> {
    let io = |e: csv::Error| StatsError::Csv(path.display().to_string(), e);
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(SIGNIFICANCE_HEADER).map_err(io)?;
    for r in records {
        let (region, band) = match r.comparison.variable {
            Variable::BandPower { region, band } => (region.to_string(), band.to_string()),
            _ => (String::new(), String::new()),
        };
        let res = &r.result;
        w.write_record([
            r.label(),
            r.comparison.variable.name().to_string(),
            region,
            band,
            res.n_a.to_string(),
            res.n_b.to_string(),
            format!("{:.6e}", res.median_a),
            format!("{:.6e}", res.median_b),
            res.u_statistic.to_string(),
            format!("{:.6e}", res.p_value),
            res.significant.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| io(e.into()))
}

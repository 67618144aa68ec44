use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ModelSelError;
use crate::corpus::{MusicType, PreferenceLabel, TrialKey, TrialRecord};
use crate::learn::Dataset;
use crate::spectral::{Band, FeatureRow, FeatureTable, RegionName, RegionSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Behaviors {
    #[serde(rename = "none")]
    None,
    #[serde(rename = "fam")]
    Fam,
    #[serde(rename = "resr")]
    ResR,
    #[serde(rename = "fam+resr")]
    FamResR,
}

impl Behaviors {
    pub const ALL: [Behaviors; 4] = [Behaviors::None, Behaviors::Fam, Behaviors::ResR, Behaviors::FamResR];

    pub fn as_str(self) -> &'static str {
        match self {
            Behaviors::None => "none",
            Behaviors::Fam => "fam",
            Behaviors::ResR => "resr",
            Behaviors::FamResR => "fam+resr",
        }
    }

    pub fn familiarity(self) -> bool {
        matches!(self, Behaviors::Fam | Behaviors::FamResR)
    }

    pub fn response_rate(self) -> bool {
        matches!(self, Behaviors::ResR | Behaviors::FamResR)
    }

    pub fn count(self) -> usize {
        usize::from(self.familiarity()) + usize::from(self.response_rate())
    }
}

impl fmt::Display for Behaviors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Behaviors {
    type Err = ModelSelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase();
        Behaviors::ALL
            .into_iter()
            .find(|b| b.as_str() == t)
            .ok_or_else(|| ModelSelError::InvalidConfig(format!("unknown behavior set {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub region: RegionName,
    pub bands: Vec<Band>,
    pub behaviors: Behaviors,
    pub music_type: MusicType,
}

impl FeatureConfig {
    pub fn new(region: RegionName, behaviors: Behaviors, music_type: MusicType) -> Self {
        FeatureConfig {
            region,
            bands: Band::ALL.to_vec(),
            behaviors,
            music_type,
        }
    }

    pub fn dimension(&self) -> usize {
        RegionSpec::of(self.region).channels.len() * self.bands.len() + self.behaviors.count()
    }

    pub fn feature_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.dimension());
        for ch in RegionSpec::of(self.region).channels {
            for b in &self.bands {
                names.push(format!("{ch}_{b}"));
            }
        }
        if self.behaviors.familiarity() {
            names.push("Fam".into());
        }
        if self.behaviors.response_rate() {
            names.push("ResR".into());
        }
        names
    }
}

fn label_bit(label: PreferenceLabel) -> Option<u8> {
    match label {
        PreferenceLabel::Favored => Some(1),
        PreferenceLabel::NonFavored => Some(0),
        PreferenceLabel::Undecided => None,
    }
}

fn row_vector(cols: &[usize], row: &FeatureRow, cfg: &FeatureConfig) -> Vec<f64> {
    let mut v = Vec::with_capacity(cfg.dimension());
    for &c in cols {
        for &b in &cfg.bands {
            v.push(row.powers[c][b]);
        }
    }
    if cfg.behaviors.familiarity() {
        v.push(row.familiarity);
    }
    if cfg.behaviors.response_rate() {
        v.push(row.response_rate);
    }
    v
}

fn region_columns(table: &FeatureTable, cfg: &FeatureConfig) -> Result<Vec<usize>, ModelSelError> {
    let spec = RegionSpec::of(cfg.region);
    let missing: Vec<String> = spec
        .channels
        .iter()
        .filter(|c| table.channel_index(c).is_none())
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(ModelSelError::MissingFeatures(format!(
            "feature table lacks {} channel(s) of {}: {}",
            missing.len(),
            cfg.region,
            missing.join(",")
        )));
    }
    Ok(spec.channels.iter().map(|c| table.channel_index(c).unwrap()).collect())
}

/// Dataset over every labeled row of the table for the configured music type.
pub fn assemble_table(table: &FeatureTable, cfg: &FeatureConfig) -> Result<Dataset, ModelSelError> {
    let cols = region_columns(table, cfg)?;
    let mut x = Vec::new();
    let mut y = Vec::new();
    for row in table.rows_of(cfg.music_type) {
        if let Some(l) = label_bit(row.label) {
            x.push(row_vector(&cols, row, cfg));
            y.push(l);
        }
    }
    Ok(Dataset::new(x, y, cfg.feature_names())?)
}

/// Dataset over the given trials, in trial order; every labeled trial of the
/// configured music type must have a feature row.
pub fn assemble_features(
    trials: &[TrialRecord],
    table: &FeatureTable,
    cfg: &FeatureConfig,
) -> Result<Dataset, ModelSelError> {
    let cols = region_columns(table, cfg)?;
    let index: HashMap<&TrialKey, &FeatureRow> = table.rows.iter().map(|r| (&r.key, r)).collect();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for t in trials.iter().filter(|t| t.music_type == cfg.music_type) {
        let Some(l) = label_bit(t.label) else { continue };
        let key = t.key();
        let row = index.get(&key).ok_or_else(|| {
            ModelSelError::MissingFeatures(format!(
                "no features for trial {} {} {}",
                key.participant_id, key.music_id, key.music_type
            ))
        })?;
        x.push(row_vector(&cols, row, cfg));
        y.push(l);
    }
    Ok(Dataset::new(x, y, cfg.feature_names())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::BandPowers;

    #[test]
    fn dimensions() {
        let fr = FeatureConfig::new(RegionName::FrontalRight, Behaviors::None, MusicType::Melody);
        assert_eq!(fr.dimension(), 33);
        let hlr = FeatureConfig::new(RegionName::HemisphereLR, Behaviors::FamResR, MusicType::Song);
        assert_eq!(hlr.dimension(), 164);
        assert_eq!(hlr.feature_names().len(), 164);
        assert_eq!(hlr.feature_names()[0], "Fp1_theta");
        assert_eq!(hlr.feature_names()[163], "ResR");
    }

    #[test]
    fn missing_channel_is_reported() {
        let table = FeatureTable {
            channels: vec!["Fp2".into()],
            rows: vec![],
        };
        let cfg = FeatureConfig::new(RegionName::FrontalRight, Behaviors::None, MusicType::Melody);
        assert!(matches!(assemble_table(&table, &cfg), Err(ModelSelError::MissingFeatures(_))));
    }

    #[test]
    fn undecided_rows_dropped_and_order_kept() {
        let channels: Vec<String> = crate::spectral::regions::FRONTAL_RIGHT.iter().map(|s| s.to_string()).collect();
        let mk = |i: usize, label| FeatureRow {
            key: TrialKey {
                participant_id: "p".into(),
                music_id: format!("m{i}"),
                music_type: MusicType::Melody,
            },
            label,
            familiarity: i as f64,
            response_rate: 0.5,
            powers: (0..11).map(|c| BandPowers::new(c as f64, 0.0, i as f64)).collect(),
        };
        let table = FeatureTable {
            channels,
            rows: vec![
                mk(0, PreferenceLabel::Favored),
                mk(1, PreferenceLabel::Undecided),
                mk(2, PreferenceLabel::NonFavored),
            ],
        };
        let cfg = FeatureConfig::new(RegionName::FrontalRight, Behaviors::Fam, MusicType::Melody);
        let d = assemble_table(&table, &cfg).unwrap();
        assert_eq!(d.y, vec![1, 0]);
        assert_eq!(d.x[1][3], 1.0); // second channel, theta
        assert_eq!(d.x[1][2], 2.0); // first channel, beta
        assert_eq!(d.x[1][33], 2.0); // familiarity
    }
}

//! Electrode groupings used for region-level analysis.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SpectralError;

pub const HEMISPHERE_LEFT: [&str; 27] = [
    "Fp1", "AF3", "AF5", "AF7", "F1", "F3", "F5", "F7", "FT7", "FC1", "FC3", "FC5", "T7", "C1",
    "C3", "C5", "TP7", "CP1", "CP3", "CP5", "P1", "P3", "P5", "P7", "PO3", "PO7", "O1",
];

pub const HEMISPHERE_RIGHT: [&str; 27] = [
    "Fp2", "AF4", "AF6", "AF8", "F2", "F4", "F6", "F8", "FT8", "FC2", "FC4", "FC6", "T8", "C2",
    "C4", "C6", "TP8", "CP2", "CP4", "CP6", "P2", "P4", "P6", "P8", "PO4", "PO8", "O2",
];

pub const FRONTAL_LEFT: [&str; 11] = [
    "Fp1", "AF3", "AF7", "F1", "F3", "F5", "F7", "FT7", "FC1", "FC3", "FC5",
];

pub const FRONTAL_RIGHT: [&str; 11] = [
    "Fp2", "AF4", "AF8", "F2", "F4", "F6", "F8", "FT8", "FC2", "FC4", "FC6",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RegionName {
    #[serde(rename = "Hemisphere_Left")]
    HemisphereLeft,
    #[serde(rename = "Hemisphere_Right")]
    HemisphereRight,
    #[serde(rename = "Frontal_Left")]
    FrontalLeft,
    #[serde(rename = "Frontal_Right")]
    FrontalRight,
    #[serde(rename = "Frontal_LR")]
    FrontalLR,
    #[serde(rename = "Hemisphere_LR")]
    HemisphereLR,
}

impl RegionName {
    pub const ALL: [RegionName; 6] = [
        RegionName::FrontalLeft,
        RegionName::FrontalRight,
        RegionName::FrontalLR,
        RegionName::HemisphereLeft,
        RegionName::HemisphereRight,
        RegionName::HemisphereLR,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RegionName::HemisphereLeft => "Hemisphere_Left",
            RegionName::HemisphereRight => "Hemisphere_Right",
            RegionName::FrontalLeft => "Frontal_Left",
            RegionName::FrontalRight => "Frontal_Right",
            RegionName::FrontalLR => "Frontal_LR",
            RegionName::HemisphereLR => "Hemisphere_LR",
        }
    }

    /// Short tag used in result-table footnotes.
    pub fn code(self) -> &'static str {
        match self {
            RegionName::HemisphereLeft => "hl",
            RegionName::HemisphereRight => "hr",
            RegionName::FrontalLeft => "fl",
            RegionName::FrontalRight => "fr",
            RegionName::FrontalLR => "flr",
            RegionName::HemisphereLR => "hlr",
        }
    }

    /// The same region on the other side; unions map to themselves.
    pub fn contralateral(self) -> RegionName {
        match self {
            RegionName::HemisphereLeft => RegionName::HemisphereRight,
            RegionName::HemisphereRight => RegionName::HemisphereLeft,
            RegionName::FrontalLeft => RegionName::FrontalRight,
            RegionName::FrontalRight => RegionName::FrontalLeft,
            other => other,
        }
    }
}

impl fmt::Display for RegionName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RegionName {
    type Err = SpectralError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        RegionName::ALL
            .into_iter()
            .find(|r| r.as_str().eq_ignore_ascii_case(t) || r.code().eq_ignore_ascii_case(t))
            .ok_or_else(|| SpectralError::UnknownRegion(t.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub name: RegionName,
    pub channels: Vec<String>,
}

impl RegionSpec {
    pub fn of(name: RegionName) -> Self {
        let list = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let channels = match name {
            RegionName::HemisphereLeft => list(&HEMISPHERE_LEFT),
            RegionName::HemisphereRight => list(&HEMISPHERE_RIGHT),
            RegionName::FrontalLeft => list(&FRONTAL_LEFT),
            RegionName::FrontalRight => list(&FRONTAL_RIGHT),
            RegionName::FrontalLR => [list(&FRONTAL_LEFT), list(&FRONTAL_RIGHT)].concat(),
            RegionName::HemisphereLR => [list(&HEMISPHERE_LEFT), list(&HEMISPHERE_RIGHT)].concat(),
        };
        RegionSpec { name, channels }
    }
}

pub fn region_lookup(name: &str) -> Result<RegionSpec, SpectralError> {
    Ok(RegionSpec::of(name.parse()?))
}

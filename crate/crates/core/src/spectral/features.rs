//! Per-channel relative band powers for the music part of an epoch, their
//! region averages, and the per-trial feature table written between stages.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bands::{band_powers, integrate_checked, normalize_by, Band, BandPowers};
use super::regions::{RegionName, RegionSpec};
use super::welch::Welch;
use super::SpectralError;
use crate::corpus::{EegEpoch, MusicType, PreferenceLabel, TrialKey, TrialRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// θ + α + β of each channel sums to one.
    BandSum,
    /// Each band divided by the broadband (2–45 Hz) power.
    Broadband,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig {
    pub window_s: f64,
    pub overlap: f64,
    pub normalization: Normalization,
    pub broadband_hz: [f64; 2],
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            window_s: 4.0,
            overlap: 0.5,
            normalization: Normalization::BandSum,
            broadband_hz: [2.0, 45.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelPowers {
    pub channel: String,
    pub powers: BandPowers,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralFeatures {
    pub per_channel: Vec<ChannelPowers>,
    pub region_mean: BTreeMap<RegionName, BandPowers>,
    /// Start and end of the analysed span, seconds from epoch start.
    pub analysis_window: (f64, f64),
}

impl SpectralFeatures {
    pub fn channel(&self, name: &str) -> Option<&BandPowers> {
        self.per_channel
            .iter()
            .find(|c| c.channel == name)
            .map(|c| &c.powers)
    }

    /// Arithmetic mean of the region's channels, if all are present.
    pub fn region_average(&self, region: &RegionSpec) -> Option<BandPowers> {
        let mut acc = [0.0; 3];
        for ch in &region.channels {
            let p = self.channel(ch)?;
            for (a, v) in acc.iter_mut().zip(p.0) {
                *a += v;
            }
        }
        let n = region.channels.len() as f64;
        Some(BandPowers(acc.map(|v| v / n)))
    }
}

fn relative_powers(
    welch: &Welch,
    signal: &[f64],
    config: &SpectralConfig,
) -> Result<BandPowers, SpectralError> {
    let psd = welch.estimate(signal)?;
    let abs = band_powers(&psd)?;
    let total = match config.normalization {
        Normalization::BandSum => abs.sum(),
        Normalization::Broadband => {
            integrate_checked(&psd, config.broadband_hz[0], config.broadband_hz[1])?
        }
    };
    normalize_by(abs, total)
}

fn music_span(epoch: &EegEpoch, music_onset_s: f64, config: &SpectralConfig) -> Result<usize, SpectralError> {
    let start = (music_onset_s * epoch.sample_rate).round() as usize;
    let needed = start + (config.window_s * epoch.sample_rate).round() as usize;
    if epoch.n_samples() < needed {
        return Err(SpectralError::SignalTooShort {
            len: epoch.n_samples(),
            needed,
        });
    }
    Ok(start)
}

fn features_for(
    epoch: &EegEpoch,
    channels: &[String],
    music_onset_s: f64,
    config: &SpectralConfig,
) -> Result<Vec<ChannelPowers>, SpectralError> {
    let start = music_span(epoch, music_onset_s, config)?;
    let welch = Welch::new(epoch.sample_rate, config.window_s, config.overlap)?;
    let rows = channels
        .iter()
        .map(|c| {
            epoch
                .channel_index(c)
                .ok_or_else(|| SpectralError::MissingChannel(c.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    rows.par_iter()
        .zip(channels.par_iter())
        .map(|(&row, name)| {
            Ok(ChannelPowers {
                channel: name.clone(),
                powers: relative_powers(&welch, &epoch.data[row][start..], config)?,
            })
        })
        .collect()
}

/// Features for one region: per-channel powers restricted to the region and
/// the region mean. The baseline before `music_onset_s` is excluded.
pub fn extract_features(
    epoch: &EegEpoch,
    region: &RegionSpec,
    music_onset_s: f64,
    config: &SpectralConfig,
) -> Result<SpectralFeatures, SpectralError> {
    let per_channel = features_for(epoch, &region.channels, music_onset_s, config)?;
    let mut out = SpectralFeatures {
        per_channel,
        region_mean: BTreeMap::new(),
        analysis_window: (music_onset_s, epoch.duration_s()),
    };
    let mean = out.region_average(region).expect("all region channels computed");
    out.region_mean.insert(region.name, mean);
    Ok(out)
}

/// Features for every EEG channel, with means for every region whose
/// channels the epoch carries.
pub fn extract_all(
    epoch: &EegEpoch,
    music_onset_s: f64,
    config: &SpectralConfig,
) -> Result<SpectralFeatures, SpectralError> {
    let channels: Vec<String> = epoch
        .eeg_indices()
        .into_iter()
        .map(|i| epoch.channel_names[i].clone())
        .collect();
    extract_channels(epoch, &channels, music_onset_s, config)
}

/// Features for the named channels, with means for every region they cover.
pub fn extract_channels(
    epoch: &EegEpoch,
    channels: &[String],
    music_onset_s: f64,
    config: &SpectralConfig,
) -> Result<SpectralFeatures, SpectralError> {
    let per_channel = features_for(epoch, channels, music_onset_s, config)?;
    let mut out = SpectralFeatures {
        per_channel,
        region_mean: BTreeMap::new(),
        analysis_window: (music_onset_s, epoch.duration_s()),
    };
    for name in RegionName::ALL {
        if let Some(mean) = out.region_average(&RegionSpec::of(name)) {
            out.region_mean.insert(name, mean);
        }
    }
    Ok(out)
}

/// One trial's behaviors and per-channel relative powers.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub key: TrialKey,
    pub label: PreferenceLabel,
    pub familiarity: f64,
    pub response_rate: f64,
    pub powers: Vec<BandPowers>,
}

impl FeatureRow {
    pub fn from_trial(trial: &TrialRecord, features: &SpectralFeatures, channels: &[String]) -> Option<Self> {
        let powers = channels
            .iter()
            .map(|c| features.channel(c).copied())
            .collect::<Option<Vec<_>>>()?;
        Some(FeatureRow {
            key: trial.key(),
            label: trial.label,
            familiarity: trial.behavior.familiarity,
            response_rate: trial.behavior.response_rate,
            powers,
        })
    }
}

/// Trials × (channel, band) relative powers plus behaviors.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureTable {
    pub channels: Vec<String>,
    pub rows: Vec<FeatureRow>,
}

const META_COLUMNS: [&str; 6] = [
    "participant_id",
    "music_id",
    "music_type",
    "label",
    "familiarity",
    "response_rate",
];

impl FeatureTable {
    pub fn channel_index(&self, name: &str) -> Option<usize> {
        self.channels.iter().position(|c| c == name)
    }

    pub fn rows_of(&self, music_type: MusicType) -> impl Iterator<Item = &FeatureRow> {
        self.rows.iter().filter(move |r| r.key.music_type == music_type)
    }

    /// Region mean of one band for a row.
    pub fn region_band(&self, row: &FeatureRow, region: &RegionSpec, band: Band) -> Option<f64> {
        let mut acc = 0.0;
        for ch in &region.channels {
            acc += row.powers[self.channel_index(ch)?][band];
        }
        Some(acc / region.channels.len() as f64)
    }

    pub fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = META_COLUMNS.iter().map(|s| s.to_string()).collect();
        for ch in &self.channels {
            for b in Band::ALL {
                h.push(format!("{ch}_{b}"));
            }
        }
        h
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), SpectralError> {
        let mut w = csv::Writer::from_path(path).map_err(|e| SpectralError::io(path, e))?;
        w.write_record(self.header()).map_err(|e| SpectralError::io(path, e))?;
        for r in &self.rows {
            let mut rec = vec![
                r.key.participant_id.clone(),
                r.key.music_id.clone(),
                r.key.music_type.to_string(),
                r.label.to_string(),
                format!("{:e}", r.familiarity),
                format!("{:e}", r.response_rate),
            ];
            for p in &r.powers {
                rec.extend(p.0.iter().map(|v| format!("{v:e}")));
            }
            w.write_record(&rec).map_err(|e| SpectralError::io(path, e))?;
        }
        w.flush().map_err(|e| SpectralError::io(path, e.into()))
    }

    pub fn read_csv(path: &Path) -> Result<Self, SpectralError> {
        let mut r = csv::Reader::from_path(path).map_err(|e| SpectralError::io(path, e))?;
        let header = r.headers().map_err(|e| SpectralError::io(path, e))?.clone();
        let bad = |msg: String| SpectralError::MalformedTable {
            path: path.to_path_buf(),
            reason: msg,
        };
        if header.len() < META_COLUMNS.len() || (header.len() - META_COLUMNS.len()) % 3 != 0 {
            return Err(bad(format!("unexpected column count {}", header.len())));
        }
        for (got, want) in header.iter().zip(META_COLUMNS) {
            if got != want {
                return Err(bad(format!("expected column {want}, found {got}")));
            }
        }
        let mut channels = Vec::new();
        for (i, col) in header.iter().skip(META_COLUMNS.len()).enumerate() {
            let band = Band::ALL[i % 3];
            let ch = col
                .strip_suffix(&format!("_{band}"))
                .ok_or_else(|| bad(format!("column {col} is not <channel>_{band}")))?;
            if i % 3 == 0 {
                channels.push(ch.to_string());
            } else if channels.last().map(String::as_str) != Some(ch) {
                return Err(bad(format!("column {col} breaks channel-major order")));
            }
        }
        let mut rows = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| SpectralError::io(path, e))?;
            let num = |i: usize| -> Result<f64, SpectralError> {
                rec[i]
                    .parse()
                    .map_err(|_| bad(format!("line {}: column {i} not numeric", line + 2)))
            };
            let music_type: MusicType = rec[2].parse().map_err(bad)?;
            let label: PreferenceLabel = rec[3].parse().map_err(bad)?;
            let mut powers = Vec::with_capacity(channels.len());
            for c in 0..channels.len() {
                let base = META_COLUMNS.len() + 3 * c;
                powers.push(BandPowers([num(base)?, num(base + 1)?, num(base + 2)?]));
            }
            rows.push(FeatureRow {
                key: TrialKey {
                    participant_id: rec[0].to_string(),
                    music_id: rec[1].to_string(),
                    music_type,
                },
                label,
                familiarity: num(4)?,
                response_rate: num(5)?,
                powers,
            });
        }
        Ok(FeatureTable { channels, rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sine_epoch(freq: f64, channels: &[&str], seconds: f64) -> EegEpoch {
        let fs = 300.0;
        let n = (seconds * fs) as usize;
        let row: Vec<f64> = (0..n).map(|i| (2.0 * PI * freq * i as f64 / fs).sin()).collect();
        EegEpoch {
            channel_names: channels.iter().map(|s| s.to_string()).collect(),
            sample_rate: fs,
            data: vec![row; channels.len()],
            eog_indices: vec![],
        }
    }

    #[test]
    fn identical_alpha_channels_give_identical_region_means() {
        let names = crate::corpus::STANDARD_LAYOUT;
        let epoch = sine_epoch(10.0, &names, 20.0);
        let f = extract_all(&epoch, 5.0, &SpectralConfig::default()).unwrap();
        let first = f.region_mean[&RegionName::FrontalLeft];
        assert!(first[Band::Alpha] > 0.95);
        for mean in f.region_mean.values() {
            assert!((mean[Band::Alpha] - first[Band::Alpha]).abs() < 1e-12);
        }
        assert_eq!(f.region_mean.len(), 6);
        assert_eq!(f.analysis_window, (5.0, 20.0));
    }

    #[test]
    fn region_restricted_extraction() {
        let names = crate::corpus::STANDARD_LAYOUT;
        let epoch = sine_epoch(5.0, &names, 12.0);
        let region = RegionSpec::of(RegionName::FrontalRight);
        let f = extract_features(&epoch, &region, 5.0, &SpectralConfig::default()).unwrap();
        assert_eq!(f.per_channel.len(), 11);
        assert!(f.region_mean[&RegionName::FrontalRight][Band::Theta] > 0.95);
    }

    #[test]
    fn too_short_after_onset() {
        let epoch = sine_epoch(10.0, &["Fp2"], 8.0);
        let region = RegionSpec {
            name: RegionName::FrontalRight,
            channels: vec!["Fp2".into()],
        };
        assert!(matches!(
            extract_features(&epoch, &region, 5.0, &SpectralConfig::default()),
            Err(SpectralError::SignalTooShort { .. })
        ));
    }

    #[test]
    fn missing_region_channel() {
        let epoch = sine_epoch(10.0, &["Fp1"], 12.0);
        let region = RegionSpec::of(RegionName::FrontalRight);
        assert!(matches!(
            extract_features(&epoch, &region, 5.0, &SpectralConfig::default()),
            Err(SpectralError::MissingChannel(_))
        ));
    }

    #[test]
    fn broadband_normalization_does_not_sum_to_one() {
        let mut epoch = sine_epoch(10.0, &["A"], 12.0);
        // add 40 Hz content outside theta/alpha/beta
        for (i, v) in epoch.data[0].iter_mut().enumerate() {
            *v += (2.0 * PI * 40.0 * i as f64 / 300.0).sin();
        }
        let cfg = SpectralConfig {
            normalization: Normalization::Broadband,
            ..SpectralConfig::default()
        };
        let region = RegionSpec {
            name: RegionName::FrontalLeft,
            channels: vec!["A".into()],
        };
        let f = extract_features(&epoch, &region, 5.0, &cfg).unwrap();
        let s = f.per_channel[0].powers.sum();
        assert!(s > 0.4 && s < 0.6, "{s}");
    }
}

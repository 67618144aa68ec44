//! The full preprocessing chain:
//! notch → high-pass → ocular ICA correction → CAR → band-pass.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ica::{fit_epoch, remove_ocular_components};
use super::iir::{design_butterworth, design_notch, filtfilt_rows, FilterKind, Sos};
use super::reference::car_in_place;
use super::{DspError, Stage};
use crate::corpus::EegEpoch;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IcaConfig {
    pub enabled: bool,
    /// |r| with an EOG channel above which a component is removed.
    pub threshold: f64,
    pub seed: u64,
    /// Fit on data decimated towards this rate; `null` fits at full rate.
    pub decimate_hz: Option<f64>,
    /// Fits with seeds `seed, seed + 1, ...` until one converges.
    #[serde(default = "default_attempts")]
    pub attempts: u64,
}

fn default_attempts() -> u64 {
    3
}

impl Default for IcaConfig {
    fn default() -> Self {
        IcaConfig {
            enabled: true,
            threshold: 0.6,
            seed: 0,
            decimate_hz: Some(300.0),
            attempts: default_attempts(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreprocessConfig {
    pub notch_hz: f64,
    pub notch_q: f64,
    pub hp_hz: f64,
    pub hp_order: usize,
    pub bp_hz: [f64; 2],
    pub bp_order: usize,
    pub ica: IcaConfig,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            notch_hz: 50.0,
            notch_q: 30.0,
            hp_hz: 0.1,
            hp_order: 5,
            bp_hz: [2.0, 45.0],
            bp_order: 4,
            ica: IcaConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageStatus {
    Applied,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: Stage,
    pub status: StageStatus,
    pub detail: String,
}

/// What was done to an epoch, in order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub stages: Vec<StageRecord>,
    pub removed_components: Vec<usize>,
    pub ica_seed: Option<u64>,
    /// False when no attempt converged and the last iterate was used.
    #[serde(default)]
    pub ica_converged: Option<bool>,
}

fn at(stage: Stage) -> impl Fn(DspError) -> DspError {
    move |e| DspError::Stage {
        stage,
        source: Box::new(e),
    }
}

fn filter_all(epoch: &mut EegEpoch, sos: &Sos) -> Result<(), DspError> {
    epoch
        .data
        .par_chunks_mut(16)
        .try_for_each(|rows| filtfilt_rows(sos, rows))
}

/// Runs the chain on a copy of `epoch`. `seed` drives ICA initialization.
pub fn preprocess(
    epoch: &EegEpoch,
    config: &PreprocessConfig,
    seed: u64,
) -> Result<(EegEpoch, Provenance), DspError> {
    preprocess_owned(epoch.clone(), config, seed)
}

/// [`preprocess`] reusing the epoch's buffers.
pub fn preprocess_owned(
    mut out: EegEpoch,
    config: &PreprocessConfig,
    seed: u64,
) -> Result<(EegEpoch, Provenance), DspError> {
    out.validate().map_err(DspError::InvalidEpoch)?;
    let fs = out.sample_rate;
    let mut prov = Provenance::default();

    let notch = design_notch(config.notch_hz, config.notch_q, fs).map_err(at(Stage::Notch))?;
    filter_all(&mut out, &notch).map_err(at(Stage::Notch))?;
    prov.stages.push(StageRecord {
        stage: Stage::Notch,
        status: StageStatus::Applied,
        detail: format!("{} Hz, q = {}", config.notch_hz, config.notch_q),
    });

    let hp = design_butterworth(config.hp_order, FilterKind::HighPass, &[config.hp_hz], fs)
        .map_err(at(Stage::HighPass))?;
    filter_all(&mut out, &hp).map_err(at(Stage::HighPass))?;
    prov.stages.push(StageRecord {
        stage: Stage::HighPass,
        status: StageStatus::Applied,
        detail: format!("{} Hz, order {} zero-phase", config.hp_hz, config.hp_order),
    });

    let ica_record = if !config.ica.enabled {
        StageRecord {
            stage: Stage::OcularIca,
            status: StageStatus::Skipped,
            detail: "disabled".into(),
        }
    } else if out.eog_indices.is_empty() {
        StageRecord {
            stage: Stage::OcularIca,
            status: StageStatus::Skipped,
            detail: "no EOG channels".into(),
        }
    } else {
        let n_comp = out.eeg_indices().len();
        let mut fitted = None;
        for attempt in 0..config.ica.attempts.max(1) {
            let s = seed.wrapping_add(attempt);
            let ica = fit_epoch(&out, n_comp, s, config.ica.decimate_hz).map_err(at(Stage::OcularIca))?;
            let done = ica.converged;
            fitted = Some((ica, s));
            if done {
                break;
            }
        }
        let (ica, used_seed) = fitted.expect("at least one attempt");
        let (cleaned, report) = remove_ocular_components(&out, &ica, config.ica.threshold);
        out = cleaned;
        prov.ica_seed = Some(used_seed);
        prov.ica_converged = Some(ica.converged);
        prov.removed_components = report.removed.clone();
        StageRecord {
            stage: Stage::OcularIca,
            status: StageStatus::Applied,
            detail: format!(
                "{} of {} components removed at |r| > {} ({} iterations{}; ICA placed before CAR following the written order)",
                report.removed.len(),
                n_comp,
                config.ica.threshold,
                ica.iterations,
                if ica.converged { "" } else { ", not converged, last iterate used" }
            ),
        }
    };
    prov.stages.push(ica_record);

    car_in_place(&mut out).map_err(at(Stage::CommonAverageReference))?;
    prov.stages.push(StageRecord {
        stage: Stage::CommonAverageReference,
        status: StageStatus::Applied,
        detail: format!("{} EEG channels", out.eeg_indices().len()),
    });

    let bp = design_butterworth(config.bp_order, FilterKind::BandPass, &config.bp_hz, fs)
        .map_err(at(Stage::BandPass))?;
    filter_all(&mut out, &bp).map_err(at(Stage::BandPass))?;
    prov.stages.push(StageRecord {
        stage: Stage::BandPass,
        status: StageStatus::Applied,
        detail: format!(
            "{}-{} Hz, order {} zero-phase",
            config.bp_hz[0], config.bp_hz[1], config.bp_order
        ),
    });

    Ok((out, prov))
}

/// The chain restricted to the named channels.
///
/// Without ICA every stage is linear and identical across channels, so the
/// reference is taken over all EEG channels first and only `keep` is filtered.
/// The result matches [`preprocess`] followed by channel selection up to
/// rounding. With ICA enabled the full chain runs and the rows are selected
/// afterwards. Unknown names are skipped; EOG rows stay EOG in the output.
pub fn preprocess_channels(
    mut epoch: EegEpoch,
    config: &PreprocessConfig,
    seed: u64,
    keep: &[String],
) -> Result<(EegEpoch, Provenance), DspError> {
    if config.ica.enabled {
        let (full, prov) = preprocess_owned(epoch, config, seed)?;
        return Ok((select(full, keep), prov));
    }
    epoch.validate().map_err(DspError::InvalidEpoch)?;
    let fs = epoch.sample_rate;
    let notch = design_notch(config.notch_hz, config.notch_q, fs).map_err(at(Stage::Notch))?;
    let hp = design_butterworth(config.hp_order, FilterKind::HighPass, &[config.hp_hz], fs)
        .map_err(at(Stage::HighPass))?;
    let bp = design_butterworth(config.bp_order, FilterKind::BandPass, &config.bp_hz, fs)
        .map_err(at(Stage::BandPass))?;
    car_in_place(&mut epoch).map_err(at(Stage::CommonAverageReference))?;
    let n_eeg = epoch.eeg_indices().len();
    let mut out = select(epoch, keep);
    filter_all(&mut out, &notch).map_err(at(Stage::Notch))?;
    filter_all(&mut out, &hp).map_err(at(Stage::HighPass))?;
    filter_all(&mut out, &bp).map_err(at(Stage::BandPass))?;

    let applied = |stage, detail: String| StageRecord {
        stage,
        status: StageStatus::Applied,
        detail,
    };
    let prov = Provenance {
        stages: vec![
            applied(Stage::Notch, format!("{} Hz, q = {}", config.notch_hz, config.notch_q)),
            applied(
                Stage::HighPass,
                format!("{} Hz, order {} zero-phase", config.hp_hz, config.hp_order),
            ),
            StageRecord {
                stage: Stage::OcularIca,
                status: StageStatus::Skipped,
                detail: "disabled".into(),
            },
            applied(Stage::CommonAverageReference, format!("{n_eeg} EEG channels")),
            applied(
                Stage::BandPass,
                format!(
                    "{}-{} Hz, order {} zero-phase",
                    config.bp_hz[0], config.bp_hz[1], config.bp_order
                ),
            ),
        ],
        ..Provenance::default()
    };
    Ok((out, prov))
}

fn select(epoch: EegEpoch, keep: &[String]) -> EegEpoch {
    let EegEpoch {
        channel_names,
        sample_rate,
        data,
        eog_indices,
    } = epoch;
    let mut out = EegEpoch {
        channel_names: Vec::new(),
        sample_rate,
        data: Vec::new(),
        eog_indices: Vec::new(),
    };
    for (i, (name, row)) in channel_names.into_iter().zip(data).enumerate() {
        if keep.contains(&name) {
            if eog_indices.contains(&i) {
                out.eog_indices.push(out.data.len());
            }
            out.channel_names.push(name);
            out.data.push(row);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channel_subset_matches_full_chain() {
        let names = ["A", "B", "C", "D", "E"];
        let data: Vec<Vec<f64>> = (0..5)
            .map(|c| {
                (0..3000)
                    .map(|i| {
                        let t = i as f64 / 200.0;
                        (t * (7.0 + c as f64)).sin() * (c + 1) as f64 + (t * 50.0 * std::f64::consts::TAU).sin()
                            + ((i * 7919 + c * 104729) % 997) as f64 / 997.0
                    })
                    .collect()
            })
            .collect();
        let epoch = EegEpoch {
            channel_names: names.iter().map(|s| s.to_string()).collect(),
            sample_rate: 200.0,
            data,
            eog_indices: vec![4],
        };
        let mut cfg = PreprocessConfig::default();
        cfg.ica.enabled = false;
        let (full, prov_full) = preprocess(&epoch, &cfg, 0).unwrap();
        let keep: Vec<String> = vec!["D".into(), "B".into(), "E".into()];
        let (sub, prov) = preprocess_channels(epoch, &cfg, 0, &keep).unwrap();
        assert_eq!(sub.channel_names, vec!["B", "D", "E"]);
        assert_eq!(sub.eog_indices, vec![2]);
        assert_eq!(prov, prov_full);
        for (row, name) in sub.data.iter().zip(&sub.channel_names) {
            let k = full.channel_names.iter().position(|n| n == name).unwrap();
            let scale = full.data[k].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (a, b) in row.iter().zip(&full.data[k]) {
                assert!((a - b).abs() <= 1e-9 * scale, "{name}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn config_json_shape() {
        let json = r#"{"notch_hz":50,"notch_q":30,"hp_hz":0.1,"hp_order":5,"bp_hz":[2,45],"bp_order":4,"ica":{"enabled":true,"threshold":0.6,"seed":0,"decimate_hz":300}}"#;
        let cfg: PreprocessConfig = serde_json::from_str(json).unwrap();
        assert_eq!(cfg, PreprocessConfig::default());
        let back: PreprocessConfig =
            serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_keys_rejected() {
        let json = r#"{"notch_hz":50,"notch_q":30,"hp_hz":0.1,"hp_order":5,"bp_hz":[2,45],"bp_order":4,"ica":{"enabled":false,"threshold":0.6,"seed":0,"decimate_hz":null},"extra":1}"#;
        assert!(serde_json::from_str::<PreprocessConfig>(json).is_err());
    }

    #[test]
    fn bad_cutoff_names_stage() {
        let epoch = EegEpoch {
            channel_names: vec!["A".into(), "B".into()],
            sample_rate: 100.0,
            data: vec![vec![0.0; 1000], vec![1.0; 1000]],
            eog_indices: vec![],
        };
        let cfg = PreprocessConfig {
            bp_hz: [2.0, 60.0],
            ..PreprocessConfig::default()
        };
        let err = preprocess(&epoch, &cfg, 0).unwrap_err();
        match err {
            DspError::Stage { stage, .. } => assert_eq!(stage, Stage::Notch),
            other => panic!("{other}"),
        }
        let cfg = PreprocessConfig {
            notch_hz: 20.0,
            bp_hz: [2.0, 60.0],
            ..PreprocessConfig::default()
        };
        match preprocess(&epoch, &cfg, 0).unwrap_err() {
            DspError::Stage { stage, .. } => assert_eq!(stage, Stage::BandPass),
            other => panic!("{other}"),
        }
    }
}

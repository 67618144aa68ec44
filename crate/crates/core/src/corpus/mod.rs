//! Data model, on-disk corpus layout and label/behavior derivations.
//!
//! A corpus directory looks like
//!
//! ```text
//! manifest.json   dataset metadata, channel layout, units
//! trials.csv      one row per participant × music × type
//! eeg/            one binary epoch file per row (see [`epoch_file`])
//! ```
//!
//! The epoch for a row lives at `eeg/<participant>_<music>_<type>.eeg` where
//! `<type>` is `melody` or `song`.

pub mod epoch_file;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use epoch_file::{read_epoch, write_epoch, EpochHeader};

/// Exact header of `trials.csv`.
pub const TRIALS_HEADER: [&str; 10] = [
    "participant_id",
    "music_id",
    "music_type",
    "heart_melody",
    "heart_song",
    "familiarity",
    "assessment_time_s",
    "valence",
    "arousal",
    "star",
];

/// Minimum music duration an epoch must carry after the baseline.
pub const MIN_MUSIC_SECONDS: f64 = 4.0;

/// Silent baseline preceding each stimulus.
pub const DEFAULT_BASELINE_SECONDS: f64 = 5.0;

/// The 62 EEG electrodes of the recording montage, row by row from front to back.
pub const STANDARD_LAYOUT: [&str; 62] = [
    "Fp1", "Fp2", "AF7", "AF5", "AF3", "AFz", "AF4", "AF6", "AF8", "F7", "F5", "F3", "F1", "Fz",
    "F2", "F4", "F6", "F8", "FT7", "FC5", "FC3", "FC1", "FCz", "FC2", "FC4", "FC6", "FT8", "T7",
    "C5", "C3", "C1", "Cz", "C2", "C4", "C6", "T8", "TP7", "CP5", "CP3", "CP1", "CPz", "CP2",
    "CP4", "CP6", "TP8", "P7", "P5", "P3", "P1", "Pz", "P2", "P4", "P6", "P8", "PO7", "PO3",
    "POz", "PO4", "PO8", "O1", "Oz", "O2",
];

/// Vertical (below the eye) and horizontal (outer canthus) EOG electrodes.
pub const STANDARD_EOG: [&str; 2] = ["VEOG", "HEOG"];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("missing file {}{}", path.display(), trial.as_ref().map(|t| format!(" (trial {t})")).unwrap_or_default())]
    MissingFile { path: PathBuf, trial: Option<String> },
    #[error("channel mismatch in {trial}: {reason}")]
    ChannelMismatch { trial: String, reason: String },
    #[error("malformed manifest: {}", problems.join("; "))]
    MalformedManifest { problems: Vec<String> },
    #[error("bad epoch file {}: {reason}", path.display())]
    BadEpochFile { path: PathBuf, reason: String },
    #[error("non-finite sample in {} channel {channel}", path.display())]
    NonFinite { path: PathBuf, channel: String },
    #[error("assessment time must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("io error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CorpusError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CorpusError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn malformed(msg: impl Into<String>) -> Self {
        CorpusError::MalformedManifest {
            problems: vec![msg.into()],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MusicType {
    Melody,
    Song,
}

impl MusicType {
    pub const ALL: [MusicType; 2] = [MusicType::Melody, MusicType::Song];

    pub fn as_str(self) -> &'static str {
        match self {
            MusicType::Melody => "Melody",
            MusicType::Song => "Song",
        }
    }
}

impl fmt::Display for MusicType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MusicType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "melody" => Ok(MusicType::Melody),
            "song" => Ok(MusicType::Song),
            other => Err(format!("unknown music type {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PreferenceLabel {
    Favored,
    NonFavored,
    Undecided,
}

impl PreferenceLabel {
    pub const ALL: [PreferenceLabel; 3] = [
        PreferenceLabel::Favored,
        PreferenceLabel::NonFavored,
        PreferenceLabel::Undecided,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PreferenceLabel::Favored => "Favored",
            PreferenceLabel::NonFavored => "NonFavored",
            PreferenceLabel::Undecided => "Undecided",
        }
    }
}

impl fmt::Display for PreferenceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PreferenceLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "Favored" => Ok(PreferenceLabel::Favored),
            "NonFavored" => Ok(PreferenceLabel::NonFavored),
            "Undecided" => Ok(PreferenceLabel::Undecided),
            other => Err(format!("unknown label {other:?}")),
        }
    }
}

/// Preference from the heart-button reactions to both versions of a stimulus.
pub fn derive_label(heart_melody: bool, heart_song: bool) -> PreferenceLabel {
    match (heart_melody, heart_song) {
        (true, true) => PreferenceLabel::Favored,
        (false, false) => PreferenceLabel::NonFavored,
        _ => PreferenceLabel::Undecided,
    }
}

/// Response rate in Hz: the reciprocal of the self-assessment duration.
pub fn compute_response_rate(assessment_time_s: f64) -> Result<f64, CorpusError> {
    if assessment_time_s > 0.0 && assessment_time_s.is_finite() {
        Ok(1.0 / assessment_time_s)
    } else {
        Err(CorpusError::NonPositiveTime(assessment_time_s))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BehaviorRecord {
    /// Slider position in [-1, 1].
    pub familiarity: f64,
    /// Seconds spent on the self-assessment.
    pub assessment_time: f64,
    /// Hz, always `1 / assessment_time`.
    pub response_rate: f64,
    pub heart_melody: bool,
    pub heart_song: bool,
}

impl BehaviorRecord {
    pub fn new(
        familiarity: f64,
        assessment_time: f64,
        heart_melody: bool,
        heart_song: bool,
    ) -> Result<Self, CorpusError> {
        Ok(BehaviorRecord {
            familiarity,
            assessment_time,
            response_rate: compute_response_rate(assessment_time)?,
            heart_melody,
            heart_song,
        })
    }
}

/// Columns recorded by the experiment but not used by the analysis.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PassThrough {
    pub valence: String,
    pub arousal: String,
    pub star: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TrialKey {
    pub participant_id: String,
    pub music_id: String,
    pub music_type: MusicType,
}

impl fmt::Display for TrialKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{}/{}",
            self.participant_id, self.music_id, self.music_type
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub participant_id: String,
    pub music_id: String,
    pub music_type: MusicType,
    pub behavior: BehaviorRecord,
    pub label: PreferenceLabel,
    /// Relative to the corpus root.
    pub eeg_path: PathBuf,
    pub extra: PassThrough,
}

impl TrialRecord {
    pub fn key(&self) -> TrialKey {
        TrialKey {
            participant_id: self.participant_id.clone(),
            music_id: self.music_id.clone(),
            music_type: self.music_type,
        }
    }
}

/// Conventional location of a trial's epoch inside a corpus directory.
pub fn epoch_relpath(participant_id: &str, music_id: &str, music_type: MusicType) -> PathBuf {
    let kind = match music_type {
        MusicType::Melody => "melody",
        MusicType::Song => "song",
    };
    PathBuf::from("eeg").join(format!("{participant_id}_{music_id}_{kind}.eeg"))
}

/// Multichannel samples with channel names; rows are channels.
#[derive(Debug, Clone, PartialEq)]
pub struct EegEpoch {
    pub channel_names: Vec<String>,
    pub sample_rate: f64,
    pub data: Vec<Vec<f64>>,
    pub eog_indices: Vec<usize>,
}

impl EegEpoch {
    pub fn n_channels(&self) -> usize {
        self.data.len()
    }

    pub fn n_samples(&self) -> usize {
        self.data.first().map_or(0, Vec::len)
    }

    pub fn duration_s(&self) -> f64 {
        self.n_samples() as f64 / self.sample_rate
    }

    /// Indices of the non-EOG channels, in matrix order.
    pub fn eeg_indices(&self) -> Vec<usize> {
        (0..self.n_channels())
            .filter(|i| !self.eog_indices.contains(i))
            .collect()
    }

    pub fn channel_index(&self, name: &str) -> Option<usize> {
        self.channel_names.iter().position(|c| c == name)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.channel_names.len() != self.data.len() {
            return Err(format!(
                "{} names for {} rows",
                self.channel_names.len(),
                self.data.len()
            ));
        }
        let n = self.n_samples();
        if self.data.iter().any(|r| r.len() != n) {
            return Err("rows have unequal lengths".into());
        }
        if self.data.iter().flatten().any(|v| !v.is_finite()) {
            return Err("non-finite sample".into());
        }
        if self.eog_indices.iter().any(|&i| i >= self.data.len()) {
            return Err("EOG index out of range".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub dataset_name: String,
    pub sample_rate_hz: f64,
    pub units: String,
    pub channel_layout: Vec<String>,
    pub eog_channels: Vec<String>,
    /// Seconds of silence before music onset in every epoch.
    #[serde(default = "default_baseline")]
    pub baseline_s: f64,
}

fn default_baseline() -> f64 {
    DEFAULT_BASELINE_SECONDS
}

impl Manifest {
    pub fn standard(dataset_name: &str, sample_rate_hz: f64) -> Self {
        Manifest {
            dataset_name: dataset_name.to_string(),
            sample_rate_hz,
            units: "uV".into(),
            channel_layout: STANDARD_LAYOUT.iter().map(|s| s.to_string()).collect(),
            eog_channels: STANDARD_EOG.iter().map(|s| s.to_string()).collect(),
            baseline_s: DEFAULT_BASELINE_SECONDS,
        }
    }

    /// Channel order every epoch file must carry: EEG layout, then EOG.
    pub fn epoch_channels(&self) -> Vec<String> {
        self.channel_layout
            .iter()
            .chain(&self.eog_channels)
            .cloned()
            .collect()
    }

    pub fn read(path: &Path) -> Result<Self, CorpusError> {
        let text = std::fs::read_to_string(path).map_err(|_| CorpusError::MissingFile {
            path: path.to_path_buf(),
            trial: None,
        })?;
        let m: Manifest = serde_json::from_str(&text)
            .map_err(|e| CorpusError::malformed(format!("{}: {e}", path.display())))?;
        if !(m.sample_rate_hz > 0.0) {
            return Err(CorpusError::malformed("sample_rate_hz must be positive"));
        }
        if m.channel_layout.is_empty() {
            return Err(CorpusError::malformed("channel_layout is empty"));
        }
        Ok(m)
    }

    pub fn write(&self, path: &Path) -> Result<(), CorpusError> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, text + "\n").map_err(|e| CorpusError::io(path, e))
    }
}

/// An epoch rejected during import for being too short to analyse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub trial: TrialKey,
    pub reason: String,
}

/// Imported trials plus the metadata shared by all epochs. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub root: PathBuf,
    pub manifest: Manifest,
    pub trials: Vec<TrialRecord>,
    pub rejected: Vec<Rejection>,
}

impl Corpus {
    pub fn channel_layout(&self) -> &[String] {
        &self.manifest.channel_layout
    }

    pub fn epoch_path(&self, trial: &TrialRecord) -> PathBuf {
        self.root.join(&trial.eeg_path)
    }

    pub fn load_epoch(&self, trial: &TrialRecord) -> Result<EegEpoch, CorpusError> {
        let path = self.epoch_path(trial);
        read_epoch(&path, &self.manifest.eog_channels).map_err(|e| match e {
            CorpusError::MissingFile { path, .. } => CorpusError::MissingFile {
                path,
                trial: Some(trial.key().to_string()),
            },
            other => other,
        })
    }

    pub fn labeled(&self) -> impl Iterator<Item = &TrialRecord> {
        self.trials
            .iter()
            .filter(|t| t.label != PreferenceLabel::Undecided)
    }
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" => Ok(true),
        "0" | "false" | "no" => Ok(false),
        other => Err(format!("not a boolean: {other:?}")),
    }
}

fn format_bool(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

fn parse_row(rec: &csv::StringRecord) -> Result<TrialRecord, String> {
    if rec.len() != TRIALS_HEADER.len() {
        return Err(format!("expected {} fields, found {}", TRIALS_HEADER.len(), rec.len()));
    }
    let participant_id = rec[0].trim().to_string();
    let music_id = rec[1].trim().to_string();
    if participant_id.is_empty() || music_id.is_empty() {
        return Err("empty identifier".into());
    }
    let music_type: MusicType = rec[2].parse()?;
    let heart_melody = parse_bool(&rec[3])?;
    let heart_song = parse_bool(&rec[4])?;
    let familiarity: f64 = rec[5]
        .trim()
        .parse()
        .map_err(|_| format!("familiarity not numeric: {:?}", &rec[5]))?;
    if !(-1.0..=1.0).contains(&familiarity) {
        return Err(format!("familiarity {familiarity} outside [-1, 1]"));
    }
    let assessment_time: f64 = rec[6]
        .trim()
        .parse()
        .map_err(|_| format!("assessment_time_s not numeric: {:?}", &rec[6]))?;
    let behavior = BehaviorRecord::new(familiarity, assessment_time, heart_melody, heart_song)
        .map_err(|e| e.to_string())?;
    Ok(TrialRecord {
        eeg_path: epoch_relpath(&participant_id, &music_id, music_type),
        participant_id,
        music_id,
        music_type,
        label: derive_label(heart_melody, heart_song),
        behavior,
        extra: PassThrough {
            valence: rec[7].to_string(),
            arousal: rec[8].to_string(),
            star: rec[9].to_string(),
        },
    })
}

/// Parses `trials.csv`, collecting every malformed row before failing.
pub fn read_trials(path: &Path) -> Result<Vec<TrialRecord>, CorpusError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|_| CorpusError::MissingFile {
            path: path.to_path_buf(),
            trial: None,
        })?;
    let header = reader
        .headers()
        .map_err(|e| CorpusError::malformed(e.to_string()))?
        .clone();
    let got: Vec<&str> = header.iter().map(str::trim).collect();
    if got != TRIALS_HEADER {
        return Err(CorpusError::malformed(format!(
            "trials.csv header must be {:?}, found {:?}",
            TRIALS_HEADER.join(","),
            got.join(",")
        )));
    }
    let mut trials = Vec::new();
    let mut problems = Vec::new();
    let mut seen = HashSet::new();
    for (i, rec) in reader.records().enumerate() {
        // header is line 1
        let line = i + 2;
        match rec.map_err(|e| e.to_string()).and_then(|r| parse_row(&r)) {
            Ok(t) => {
                if !seen.insert(t.key()) {
                    problems.push(format!("line {line}: duplicate trial {}", t.key()));
                } else {
                    trials.push(t);
                }
            }
            Err(e) => problems.push(format!("line {line}: {e}")),
        }
    }
    if !problems.is_empty() {
        return Err(CorpusError::MalformedManifest { problems });
    }
    Ok(trials)
}

pub fn write_trials(path: &Path, trials: &[TrialRecord]) -> Result<(), CorpusError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CorpusError::io(path, e.into()))?;
    let io = |e: csv::Error| CorpusError::io(path, e.into());
    w.write_record(TRIALS_HEADER).map_err(io)?;
    for t in trials {
        w.write_record([
            t.participant_id.as_str(),
            t.music_id.as_str(),
            t.music_type.as_str(),
            format_bool(t.behavior.heart_melody),
            format_bool(t.behavior.heart_song),
            &t.behavior.familiarity.to_string(),
            &t.behavior.assessment_time.to_string(),
            &t.extra.valence,
            &t.extra.arousal,
            &t.extra.star,
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| CorpusError::io(path, e))
}

/// Loads a corpus laid out in the canonical format.
///
/// Every epoch header is checked against the manifest layout. Epochs with
/// less than [`MIN_MUSIC_SECONDS`] of music after the baseline are moved to
/// [`Corpus::rejected`].
pub fn import_corpus(root_dir: &Path, manifest: &Path) -> Result<Corpus, CorpusError> {
    let manifest = Manifest::read(manifest)?;
    let candidates = read_trials(&root_dir.join("trials.csv"))?;
    let expected = manifest.epoch_channels();
    let min_samples =
        ((manifest.baseline_s + MIN_MUSIC_SECONDS) * manifest.sample_rate_hz).ceil() as u64;

    let mut trials = Vec::with_capacity(candidates.len());
    let mut rejected = Vec::new();
    for t in candidates {
        let path = root_dir.join(&t.eeg_path);
        let header = epoch_file::read_header(&path).map_err(|e| match e {
            CorpusError::MissingFile { path, .. } => CorpusError::MissingFile {
                path,
                trial: Some(t.key().to_string()),
            },
            other => other,
        })?;
        if header.channel_names != expected {
            let missing: Vec<_> = expected
                .iter()
                .filter(|c| !header.channel_names.contains(c))
                .cloned()
                .collect();
            return Err(CorpusError::ChannelMismatch {
                trial: t.key().to_string(),
                reason: if missing.is_empty() {
                    format!("channel order differs from layout ({} channels)", header.channel_names.len())
                } else {
                    format!("missing {}", missing.join(", "))
                },
            });
        }
        if (header.sample_rate - manifest.sample_rate_hz).abs() > 1e-9 {
            return Err(CorpusError::ChannelMismatch {
                trial: t.key().to_string(),
                reason: format!(
                    "sample rate {} Hz differs from manifest {} Hz",
                    header.sample_rate, manifest.sample_rate_hz
                ),
            });
        }
        if header.n_samples < min_samples {
            rejected.push(Rejection {
                trial: t.key(),
                reason: format!(
                    "{} samples, need at least {min_samples} ({} s baseline + {MIN_MUSIC_SECONDS} s music)",
                    header.n_samples, manifest.baseline_s
                ),
            });
            continue;
        }
        trials.push(t);
    }
    Ok(Corpus {
        root: root_dir.to_path_buf(),
        manifest,
        trials,
        rejected,
    })
}

/// Writes the corpus tables and copies every epoch into `out_dir`.
pub fn export_corpus(corpus: &Corpus, out_dir: &Path) -> Result<(), CorpusError> {
    std::fs::create_dir_all(out_dir.join("eeg")).map_err(|e| CorpusError::io(out_dir, e))?;
    corpus.manifest.write(&out_dir.join("manifest.json"))?;
    write_trials(&out_dir.join("trials.csv"), &corpus.trials)?;
    for t in &corpus.trials {
        let epoch = corpus.load_epoch(t)?;
        write_epoch(&out_dir.join(&t.eeg_path), &epoch)?;
    }
    Ok(())
}

/// Trial and music-item counts by label.
///
/// Labels are defined jointly over both versions of a stimulus, so the
/// per-type trial counts and the distinct `(participant, music)` item counts
/// agree on a complete corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LabelCensus {
    pub trials: BTreeMap<(MusicType, PreferenceLabel), usize>,
    pub items: BTreeMap<PreferenceLabel, usize>,
}

impl LabelCensus {
    pub fn trials_of(&self, music_type: MusicType, label: PreferenceLabel) -> usize {
        self.trials.get(&(music_type, label)).copied().unwrap_or(0)
    }

    /// Trials with `label`, summed over music types.
    pub fn total_of(&self, label: PreferenceLabel) -> usize {
        MusicType::ALL.iter().map(|&m| self.trials_of(m, label)).sum()
    }

    pub fn items_of(&self, label: PreferenceLabel) -> usize {
        self.items.get(&label).copied().unwrap_or(0)
    }

    pub fn total_trials(&self) -> usize {
        self.trials.values().sum()
    }
}

pub fn label_census<'a>(trials: impl IntoIterator<Item = &'a TrialRecord>) -> LabelCensus {
    let mut census = LabelCensus::default();
    for m in MusicType::ALL {
        for l in PreferenceLabel::ALL {
            census.trials.insert((m, l), 0);
        }
    }
    for l in PreferenceLabel::ALL {
        census.items.insert(l, 0);
    }
    let mut items = BTreeMap::new();
    for t in trials {
        *census.trials.entry((t.music_type, t.label)).or_default() += 1;
        items
            .entry((t.participant_id.clone(), t.music_id.clone()))
            .or_insert(t.label);
    }
    for label in items.values() {
        *census.items.entry(*label).or_default() += 1;
    }
    census
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_rule_covers_all_heart_combinations() {
        assert_eq!(derive_label(true, true), PreferenceLabel::Favored);
        assert_eq!(derive_label(false, false), PreferenceLabel::NonFavored);
        assert_eq!(derive_label(true, false), PreferenceLabel::Undecided);
        assert_eq!(derive_label(false, true), PreferenceLabel::Undecided);
    }

    #[test]
    fn response_rate_is_reciprocal_time() {
        assert_eq!(compute_response_rate(2.0).unwrap(), 0.5);
        assert_eq!(compute_response_rate(1.0).unwrap(), 1.0);
        assert!(matches!(
            compute_response_rate(0.0),
            Err(CorpusError::NonPositiveTime(_))
        ));
        assert!(compute_response_rate(-3.0).is_err());
    }

    #[test]
    fn response_rate_strictly_decreasing() {
        let times = [0.1, 0.5, 1.0, 2.5, 10.0, 100.0];
        for w in times.windows(2) {
            assert!(compute_response_rate(w[0]).unwrap() > compute_response_rate(w[1]).unwrap());
        }
    }

    #[test]
    fn empty_census_is_all_zero() {
        let c = label_census(std::iter::empty());
        assert_eq!(c.total_trials(), 0);
        for l in PreferenceLabel::ALL {
            assert_eq!(c.items_of(l), 0);
            assert_eq!(c.total_of(l), 0);
        }
    }

    #[test]
    fn bool_parsing_accepts_common_spellings() {
        assert_eq!(parse_bool("1"), Ok(true));
        assert_eq!(parse_bool("TRUE"), Ok(true));
        assert_eq!(parse_bool("0"), Ok(false));
        assert!(parse_bool("maybe").is_err());
    }

    #[test]
    fn standard_layout_has_62_unique_channels() {
        let set: HashSet<_> = STANDARD_LAYOUT.iter().collect();
        assert_eq!(set.len(), 62);
    }
}

//! Stage-to-disk orchestration: each stage reads the previous stage's
//! directory, writes its own, and records a `run.json` entry.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::epoch_file::write_epoch;
use crate::corpus::{
    export_corpus, import_corpus, label_census, write_trials, Corpus, EegEpoch, MusicType,
    PreferenceLabel, TrialRecord,
};
use crate::dsp::{preprocess_channels, preprocess_owned, PreprocessConfig, Provenance};
use crate::modelsel::{run_study, StudyPlan, StudyTable};
use crate::numeric::derive_seed;
use crate::spectral::{extract_channels, FeatureRow, FeatureTable, RegionName, RegionSpec, SpectralConfig};
use crate::stats::{compare_groups, median_trend, standard_comparisons, write_significance_csv};
use crate::synth::{plan, write_corpus, EffectSpec, SynthPlan};

pub const RUN_FILE: &str = "run.json";
pub const FEATURES_FILE: &str = "features.csv";
pub const STUDY_JSON: &str = "study.json";
pub const STUDY_CSV: &str = "study.csv";
pub const TREND_BINS: usize = 4;

/// A failure inside a stage, naming the module that raised it.
#[derive(Debug)]
pub struct PipelineError {
    pub module: &'static str,
    pub stage: &'static str,
    pub message: String,
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} stage): {}", self.module, self.stage, self.message)
    }
}

impl std::error::Error for PipelineError {}

fn fail(module: &'static str, stage: &'static str) -> impl Fn(&dyn fmt::Display) -> PipelineError {
    move |e| PipelineError {
        module,
        stage,
        message: e.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config_hash: String,
    pub seed: Option<u64>,
    pub versions: BTreeMap<String, String>,
    /// Seconds per step.
    pub timings: BTreeMap<String, f64>,
    pub started_unix_s: u64,
    pub config: serde_json::Value,
}

/// Timing and identity of one stage run.
pub struct RunLog {
    stage: &'static str,
    started: Instant,
    started_unix_s: u64,
    step_start: Instant,
    timings: BTreeMap<String, f64>,
    config: serde_json::Value,
    seed: Option<u64>,
}

pub fn config_hash(config: &serde_json::Value) -> String {
    let digest = Sha256::digest(config.to_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

impl RunLog {
    pub fn start(stage: &'static str, config: &impl Serialize, seed: Option<u64>) -> Self {
        let now = Instant::now();
        RunLog {
            stage,
            started: now,
            started_unix_s: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            step_start: now,
            timings: BTreeMap::new(),
            config: serde_json::to_value(config).expect("config serializes"),
            seed,
        }
    }

    pub fn step(&mut self, name: &str) {
        let now = Instant::now();
        self.timings
            .insert(name.to_string(), (now - self.step_start).as_secs_f64());
        self.step_start = now;
    }

    /// Adds this stage's record to `dir/run.json`, keeping other stages'.
    pub fn finish(mut self, dir: &Path) -> Result<RunRecord, PipelineError> {
        self.timings
            .insert("total".into(), self.started.elapsed().as_secs_f64());
        let record = RunRecord {
            config_hash: config_hash(&self.config),
            seed: self.seed,
            versions: BTreeMap::from([
                ("musicpref".to_string(), env!("CARGO_PKG_VERSION").to_string()),
                ("run_format".to_string(), "1".to_string()),
            ]),
            timings: self.timings,
            started_unix_s: self.started_unix_s,
            config: self.config,
        };
        let path = dir.join(RUN_FILE);
        let err = fail("pipeline", self.stage);
        let mut all: BTreeMap<String, RunRecord> = match std::fs::read_to_string(&path) {
            Ok(text) => serde_json::from_str(&text).unwrap_or_default(),
            Err(_) => BTreeMap::new(),
        };
        all.insert(self.stage.to_string(), record.clone());
        let text = serde_json::to_string_pretty(&all).expect("run record serializes");
        std::fs::write(&path, text + "\n").map_err(|e| err(&format!("{}: {e}", path.display())))?;
        Ok(record)
    }
}

fn create_dir(dir: &Path, stage: &'static str) -> Result<(), PipelineError> {
    std::fs::create_dir_all(dir).map_err(|e| fail("pipeline", stage)(&format!("{}: {e}", dir.display())))
}

fn load_corpus(dir: &Path, stage: &'static str) -> Result<Corpus, PipelineError> {
    import_corpus(dir, &dir.join("manifest.json")).map_err(|e| fail("corpus", stage)(&e))
}

// ---- ingest ----

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IngestArgs {
    pub root: PathBuf,
    pub manifest: Option<PathBuf>,
    pub out: PathBuf,
}

#[derive(Debug, Clone, Serialize)]
pub struct IngestSummary {
    pub trials: usize,
    pub rejected: usize,
    pub census: BTreeMap<String, usize>,
}

pub fn ingest(args: &IngestArgs) -> Result<IngestSummary, PipelineError> {
    let mut log = RunLog::start("ingest", args, None);
    let manifest = args.manifest.clone().unwrap_or_else(|| args.root.join("manifest.json"));
    let corpus = import_corpus(&args.root, &manifest).map_err(|e| fail("corpus", "ingest")(&e))?;
    log.step("import");
    create_dir(&args.out, "ingest")?;
    export_corpus(&corpus, &args.out).map_err(|e| fail("corpus", "ingest")(&e))?;
    let rejected = serde_json::to_string_pretty(&corpus.rejected).expect("rejections serialize");
    std::fs::write(args.out.join("rejected.json"), rejected + "\n")
        .map_err(|e| fail("corpus", "ingest")(&e))?;
    log.step("export");
    let c = label_census(&corpus.trials);
    let mut census = BTreeMap::new();
    for ((m, l), n) in &c.trials {
        census.insert(format!("{m}/{l}"), *n);
    }
    std::fs::write(
        args.out.join("census.json"),
        serde_json::to_string_pretty(&census).expect("census serializes") + "\n",
    )
    .map_err(|e| fail("corpus", "ingest")(&e))?;
    log.finish(&args.out)?;
    Ok(IngestSummary {
        trials: corpus.trials.len(),
        rejected: corpus.rejected.len(),
        census,
    })
}

// ---- preprocess ----

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PreprocessArgs {
    pub corpus: PathBuf,
    pub config: PreprocessConfig,
    pub out: PathBuf,
}

/// ICA seed of the trial at `index` in trials.csv order.
pub fn trial_seed(config: &PreprocessConfig, index: usize) -> u64 {
    derive_seed(config.ica.seed, &[index as u64])
}

pub fn preprocess_stage(args: &PreprocessArgs) -> Result<usize, PipelineError> {
    let mut log = RunLog::start("preprocess", args, Some(args.config.ica.seed));
    let corpus = load_corpus(&args.corpus, "preprocess")?;
    create_dir(&args.out.join("eeg"), "preprocess")?;
    corpus
        .manifest
        .write(&args.out.join("manifest.json"))
        .map_err(|e| fail("corpus", "preprocess")(&e))?;
    write_trials(&args.out.join("trials.csv"), &corpus.trials).map_err(|e| fail("corpus", "preprocess")(&e))?;
    log.step("setup");
    corpus
        .trials
        .par_iter()
        .enumerate()
        .try_for_each(|(i, t)| -> Result<(), PipelineError> {
            let epoch = corpus.load_epoch(t).map_err(|e| fail("corpus", "preprocess")(&e))?;
            let (clean, prov) = preprocess_owned(epoch, &args.config, trial_seed(&args.config, i))
                .map_err(|e| fail("dsp", "preprocess")(&format!("{}: {e}", t.key())))?;
            let path = args.out.join(&t.eeg_path);
            write_epoch(&path, &clean).map_err(|e| fail("corpus", "preprocess")(&e))?;
            let sidecar = path.with_extension("prov.json");
            std::fs::write(&sidecar, serde_json::to_string_pretty(&prov).expect("provenance serializes") + "\n")
                .map_err(|e| fail("dsp", "preprocess")(&e))
        })?;
    log.step("filter");
    log.finish(&args.out)?;
    Ok(corpus.trials.len())
}

// ---- features ----

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeaturesArgs {
    pub preprocessed: PathBuf,
    pub regions: Vec<RegionName>,
    pub config: SpectralConfig,
    pub out: PathBuf,
}

/// Union of the regions' channels, in layout order.
pub fn region_channels(layout: &[String], regions: &[RegionName]) -> Vec<String> {
    let wanted: Vec<String> = regions.iter().flat_map(|&r| RegionSpec::of(r).channels).collect();
    layout.iter().filter(|c| wanted.contains(c)).cloned().collect()
}

/// Feature row of one preprocessed epoch.
pub fn feature_row(
    trial: &TrialRecord,
    epoch: &EegEpoch,
    onset_s: f64,
    channels: &[String],
    config: &SpectralConfig,
) -> Result<FeatureRow, PipelineError> {
    let feats = extract_channels(epoch, channels, onset_s, config)
        .map_err(|e| fail("spectral", "features")(&format!("{}: {e}", trial.key())))?;
    FeatureRow::from_trial(trial, &feats, channels)
        .ok_or_else(|| fail("spectral", "features")(&format!("{}: missing channels", trial.key())))
}

pub fn features_stage(args: &FeaturesArgs) -> Result<FeatureTable, PipelineError> {
    let mut log = RunLog::start("features", args, None);
    let corpus = load_corpus(&args.preprocessed, "features")?;
    let channels = region_channels(corpus.channel_layout(), &args.regions);
    let onset = corpus.manifest.baseline_s;
    let rows = corpus
        .trials
        .par_iter()
        .map(|t| {
            let epoch = corpus.load_epoch(t).map_err(|e| fail("corpus", "features")(&e))?;
            feature_row(t, &epoch, onset, &channels, &args.config)
        })
        .collect::<Result<Vec<_>, _>>()?;
    log.step("extract");
    let table = FeatureTable { channels, rows };
    create_dir(&args.out, "features")?;
    table
        .write_csv(&args.out.join(FEATURES_FILE))
        .map_err(|e| fail("spectral", "features")(&e))?;
    log.step("write");
    log.finish(&args.out)?;
    Ok(table)
}

fn read_features(dir: &Path, stage: &'static str) -> Result<FeatureTable, PipelineError> {
    FeatureTable::read_csv(&in_dir(dir, FEATURES_FILE)).map_err(|e| fail("spectral", stage)(&e))
}

/// A directory argument resolves to its conventional file; a file is used as is.
fn in_dir(path: &Path, file: &str) -> PathBuf {
    if path.is_dir() {
        path.join(file)
    } else {
        path.to_path_buf()
    }
}

// ---- stats ----

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatsArgs {
    pub features: PathBuf,
    pub out: PathBuf,
    pub alpha: f64,
}

/// Writes the significance table to `out` and the familiarity / response
/// rate trend next to it as `<stem>_trend.csv`.
pub fn stats_stage(args: &StatsArgs) -> Result<usize, PipelineError> {
    let mut log = RunLog::start("stats", args, None);
    let table = read_features(&args.features, "stats")?;
    let records = standard_comparisons()
        .into_iter()
        .map(|c| compare_groups(&table, c, args.alpha))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| fail("stats", "stats")(&e))?;
    log.step("compare");
    let dir = args.out.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    create_dir(dir, "stats")?;
    write_significance_csv(&args.out, &records).map_err(|e| fail("stats", "stats")(&e))?;

    let stem = args.out.file_stem().and_then(|s| s.to_str()).unwrap_or("stats");
    let trend_path = dir.join(format!("{stem}_trend.csv"));
    let mut w = csv::Writer::from_path(&trend_path).map_err(|e| fail("stats", "stats")(&e))?;
    let csv_err = |e: csv::Error| fail("stats", "stats")(&e);
    w.write_record([
        "music_type", "bin_lo", "bin_hi", "n_favored", "median_favored", "n_non_favored",
        "median_non_favored", "p",
    ])
    .map_err(csv_err)?;
    let fmt_opt = |v: Option<f64>| v.map(|x| format!("{x:.6e}")).unwrap_or_default();
    for m in MusicType::ALL {
        let rows: Vec<&FeatureRow> = table.rows_of(m).collect();
        let fam: Vec<f64> = rows.iter().map(|r| r.familiarity).collect();
        let rate: Vec<f64> = rows.iter().map(|r| r.response_rate).collect();
        let labels: Vec<PreferenceLabel> = rows.iter().map(|r| r.label).collect();
        let bins = median_trend(&fam, &rate, &labels, TREND_BINS, args.alpha).map_err(|e| fail("stats", "stats")(&e))?;
        for b in bins {
            w.write_record([
                m.to_string(),
                b.lo.to_string(),
                b.hi.to_string(),
                b.favored.n.to_string(),
                fmt_opt(b.favored.reported()),
                b.non_favored.n.to_string(),
                fmt_opt(b.non_favored.reported()),
                fmt_opt(b.test.map(|t| t.p_value)),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| fail("stats", "stats")(&e))?;
    log.step("write");
    log.finish(dir)?;
    Ok(records.len())
}

// ---- classify ----

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifyArgs {
    pub features: PathBuf,
    pub plan: StudyPlan,
    pub out: PathBuf,
}

pub fn classify_stage(args: &ClassifyArgs) -> Result<StudyTable, PipelineError> {
    let mut log = RunLog::start("classify", args, Some(args.plan.cv.seed));
    let table = read_features(&args.features, "classify")?;
    let study = run_study(&table, &args.plan);
    log.step("study");
    create_dir(&args.out, "classify")?;
    std::fs::write(args.out.join(STUDY_JSON), study.to_json() + "\n").map_err(|e| fail("modelsel", "classify")(&e))?;
    study
        .write_csv(&args.out.join(STUDY_CSV))
        .map_err(|e| fail("modelsel", "classify")(&e))?;
    log.step("write");
    log.finish(&args.out)?;
    Ok(study)
}

// ---- report ----

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
    Md,
}

pub fn render_report(study: &StudyTable, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => study.to_json() + "\n",
        ReportFormat::Md => study.to_markdown(),
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(crate::modelsel::STUDY_CSV_HEADER).expect("in-memory write");
            for rec in study.csv_records() {
                w.write_record(&rec).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
        }
    }
}

pub fn report_stage(reports: &Path, format: ReportFormat, out: Option<&Path>) -> Result<String, PipelineError> {
    let log = RunLog::start("report", &(reports, format, out), None);
    let path = in_dir(reports, STUDY_JSON);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| fail("modelsel", "report")(&format!("{}: {e}", path.display())))?;
    let study = StudyTable::from_json(&text).map_err(|e| fail("modelsel", "report")(&e))?;
    let rendered = render_report(&study, format);
    let dir = match out {
        Some(o) => {
            std::fs::write(o, &rendered).map_err(|e| fail("pipeline", "report")(&e))?;
            o.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new(".")).to_path_buf()
        }
        None => path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new(".")).to_path_buf(),
    };
    log.finish(&dir)?;
    Ok(rendered)
}

// ---- synth ----

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthArgs {
    pub effect: EffectSpec,
    pub participants: usize,
    pub music: usize,
    pub out: PathBuf,
}

pub fn synth_stage(args: &SynthArgs) -> Result<Corpus, PipelineError> {
    let mut log = RunLog::start("synth", args, Some(args.effect.seed));
    let p = plan(args.participants, args.music, &args.effect).map_err(|e| fail("synth", "synth")(&e))?;
    let corpus = write_corpus(&p, &args.out).map_err(|e| fail("synth", "synth")(&e))?;
    log.step("generate");
    log.finish(&args.out)?;
    Ok(corpus)
}

/// Generates, preprocesses and featurizes a synthetic session in memory,
/// keeping the trials `keep` accepts and the channels of `regions`.
pub fn synth_feature_table(
    plan: &SynthPlan,
    regions: &[RegionName],
    keep: impl Fn(&TrialRecord) -> bool + Sync,
    preprocess_config: &PreprocessConfig,
    spectral: &SpectralConfig,
) -> Result<FeatureTable, PipelineError> {
    let channels = region_channels(&plan.manifest.channel_layout, regions);
    let onset = plan.onset_s();
    let rows = plan
        .trials
        .par_iter()
        .enumerate()
        .filter(|(_, t)| keep(t))
        .map(|(i, t)| {
            let (clean, _): (EegEpoch, Provenance) =
                preprocess_channels(plan.epoch(i), preprocess_config, trial_seed(preprocess_config, i), &channels)
                    .map_err(|e| fail("dsp", "preprocess")(&e))?;
            feature_row(t, &clean, onset, &channels, spectral)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FeatureTable { channels, rows })
}

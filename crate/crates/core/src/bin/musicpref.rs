use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;

use musicpref::corpus::MusicType;
use musicpref::dsp::PreprocessConfig;
use musicpref::learn::{ModelFamily, Params};
use musicpref::modelsel::{Behaviors, CvConfig, F1Average, GridOptions, StudyPlan};
use musicpref::pipeline::{self, PipelineError, ReportFormat};
use musicpref::spectral::{RegionName, SpectralConfig};
use musicpref::stats::ALPHA;
use musicpref::synth::EffectSpec;

#[derive(Parser)]
#[command(name = "musicpref", version, about = "Music-preference EEG analysis pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
    Md,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a raw corpus and copy it into canonical form.
    Ingest {
        root: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Defaults to <root>/manifest.json.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Filter, ICA-correct and re-reference every epoch.
    Preprocess {
        corpus: PathBuf,
        #[arg(short, long)]
        config: Option<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Relative band powers per trial and channel.
    Features {
        preprocessed: PathBuf,
        /// Comma-separated region names or codes, or `all`.
        #[arg(long, default_value = "all")]
        regions: String,
        #[arg(short, long)]
        config: Option<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Mann-Whitney comparisons and the familiarity trend.
    Stats {
        features: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value_t = ALPHA)]
        alpha: f64,
    },
    /// Nested cross-validated classification study.
    Classify {
        features: PathBuf,
        #[arg(long, default_value = "svm,rf,knn")]
        models: String,
        #[arg(long, default_value = "none,fam,resr,fam+resr")]
        behaviors: String,
        #[arg(long, default_value = "all")]
        regions: String,
        #[arg(long, default_value = "melody,song")]
        music_types: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "binary")]
        f1_average: F1Average,
        /// Use gamma 0.1 in place of 0.11.
        #[arg(long)]
        gamma_fix: bool,
        /// Refit on training and validation folds after selection.
        #[arg(long)]
        retrain_with_validation: bool,
        /// JSON object mapping SVM / RF / kNN to parameter lists.
        #[arg(long)]
        grid: Option<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Render a classification study.
    Report {
        reports: PathBuf,
        #[arg(long, value_enum, default_value = "md")]
        format: Format,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic corpus from an effect description.
    Synth {
        effect: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value_t = 20)]
        participants: usize,
        #[arg(long, default_value_t = 22)]
        music: usize,
    },
}

fn usage(msg: String) -> PipelineError {
    PipelineError {
        module: "cli",
        stage: "arguments",
        message: msg,
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn list<T>(s: &str, all: &[T], parse: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, PipelineError>
where
    T: Copy,
{
    if s.trim() == "all" {
        return Ok(all.to_vec());
    }
    s.split(',').map(|p| parse(p.trim()).map_err(usage)).collect()
}

fn regions(s: &str) -> Result<Vec<RegionName>, PipelineError> {
    list(s, &RegionName::ALL, |p| p.parse().map_err(|e: musicpref::spectral::SpectralError| e.to_string()))
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    match cli.command {
        Command::Ingest { root, out, manifest } => {
            let s = pipeline::ingest(&pipeline::IngestArgs { root, manifest, out })?;
            println!("ingested {} trials ({} rejected)", s.trials, s.rejected);
        }
        Command::Preprocess { corpus, config, out } => {
            let config: PreprocessConfig = match config {
                Some(p) => read_json(&p)?,
                None => PreprocessConfig::default(),
            };
            let n = pipeline::preprocess_stage(&pipeline::PreprocessArgs { corpus, config, out })?;
            println!("preprocessed {n} epochs");
        }
        Command::Features {
            preprocessed,
            regions: r,
            config,
            out,
        } => {
            let config: SpectralConfig = match config {
                Some(p) => read_json(&p)?,
                None => SpectralConfig::default(),
            };
            let t = pipeline::features_stage(&pipeline::FeaturesArgs {
                preprocessed,
                regions: regions(&r)?,
                config,
                out,
            })?;
            println!("{} feature rows over {} channels", t.rows.len(), t.channels.len());
        }
        Command::Stats { features, out, alpha } => {
            let n = pipeline::stats_stage(&pipeline::StatsArgs { features, out, alpha })?;
            println!("{n} comparisons");
        }
        Command::Classify {
            features,
            models,
            behaviors,
            regions: r,
            music_types,
            seed,
            f1_average,
            gamma_fix,
            retrain_with_validation,
            grid,
            out,
        } => {
            let grids: BTreeMap<ModelFamily, Vec<Params>> = match grid {
                Some(p) => read_json(&p)?,
                None => BTreeMap::new(),
            };
            let plan = StudyPlan {
                models: list(&models, &ModelFamily::ALL, |p| p.parse().map_err(|e: musicpref::learn::LearnError| e.to_string()))?,
                regions: regions(&r)?,
                behaviors: list(&behaviors, &Behaviors::ALL, |p| p.parse().map_err(|e: musicpref::modelsel::ModelSelError| e.to_string()))?,
                music_types: list(&music_types, &MusicType::ALL, |p| p.parse())?,
                grid_options: GridOptions {
                    gamma_fix,
                    ..GridOptions::default()
                },
                grids,
                cv: CvConfig {
                    seed,
                    average: f1_average,
                    retrain_with_validation,
                    ..CvConfig::default()
                },
            };
            let study = pipeline::classify_stage(&pipeline::ClassifyArgs { features, plan, out })?;
            let failed = study.rows.iter().filter(|r| r.error.is_some()).count();
            println!("{} study rows ({failed} failed)", study.rows.len());
        }
        Command::Report { reports, format, out } => {
            let format = match format {
                Format::Csv => ReportFormat::Csv,
                Format::Json => ReportFormat::Json,
                Format::Md => ReportFormat::Md,
            };
            let text = pipeline::report_stage(&reports, format, out.as_deref())?;
            if out.is_none() {
                print!("{text}");
            }
        }
        Command::Synth {
            effect,
            out,
            participants,
            music,
        } => {
            let effect: EffectSpec = read_json(&effect)?;
            let c = pipeline::synth_stage(&pipeline::SynthArgs {
                effect,
                participants,
                music,
                out,
            })?;
            println!("wrote {} trials", c.trials.len());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.module == "cli" => {
            eprintln!("error: {}", e.message);
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

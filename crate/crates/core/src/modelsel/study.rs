use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::assemble::{assemble_table, Behaviors, FeatureConfig};
use super::cv::{nested_cv, CvConfig, CvReport};
use super::grid::{full_grid, GridOptions};
use super::metrics::{accuracy, f1_score};
use super::ModelSelError;
use crate::corpus::MusicType;
use crate::learn::{ModelFamily, Params};
use crate::spectral::{FeatureTable, RegionName};

pub const STUDY_CSV_HEADER: [&str; 10] = [
    "model",
    "music_type",
    "region",
    "behaviors",
    "mean_f1",
    "se_f1",
    "mean_acc",
    "se_acc",
    "params_json",
    "fold_scores",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyPlan {
    pub models: Vec<ModelFamily>,
    pub regions: Vec<RegionName>,
    pub behaviors: Vec<Behaviors>,
    pub music_types: Vec<MusicType>,
    pub grid_options: GridOptions,
    /// Replaces the canonical grid of a family when present.
    #[serde(default)]
    pub grids: BTreeMap<ModelFamily, Vec<Params>>,
    pub cv: CvConfig,
}

impl Default for StudyPlan {
    fn default() -> Self {
        StudyPlan {
            models: ModelFamily::ALL.to_vec(),
            regions: RegionName::ALL.to_vec(),
            behaviors: Behaviors::ALL.to_vec(),
            music_types: MusicType::ALL.to_vec(),
            grid_options: GridOptions::default(),
            grids: BTreeMap::new(),
            cv: CvConfig::default(),
        }
    }
}

impl StudyPlan {
    pub fn grid(&self, family: ModelFamily) -> Vec<Params> {
        self.grids
            .get(&family)
            .cloned()
            .unwrap_or_else(|| full_grid(family, &self.grid_options))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub model: ModelFamily,
    pub music_type: MusicType,
    pub region: RegionName,
    pub behaviors: Behaviors,
    pub report: Option<CvReport>,
    pub error: Option<String>,
    /// Highest mean F1 for this model and music type within its behavior
    /// group (EEG-only or fused).
    pub best: bool,
}

impl StudyRow {
    pub fn mean_f1(&self) -> Option<f64> {
        self.report.as_ref().map(|r| r.mean_f1)
    }
}

/// Majority-class predictor over all labeled trials of one music type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    pub music_type: MusicType,
    pub n: usize,
    pub majority_label: u8,
    pub f1: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyTable {
    pub rows: Vec<StudyRow>,
    pub baselines: Vec<Baseline>,
}

pub fn majority_baseline(music_type: MusicType, labels: &[u8], plan: &StudyPlan) -> Baseline {
    let pos = labels.iter().filter(|&&l| l == 1).count();
    let majority_label = u8::from(2 * pos > labels.len());
    let pred = vec![majority_label; labels.len()];
    Baseline {
        music_type,
        n: labels.len(),
        majority_label,
        f1: if labels.is_empty() { 0.0 } else { f1_score(&pred, labels, plan.cv.average) },
        accuracy: if labels.is_empty() { 0.0 } else { accuracy(&pred, labels) },
    }
}

fn mark_best(rows: &mut [StudyRow]) {
    let mut best: BTreeMap<(ModelFamily, MusicType, bool), (usize, f64)> = BTreeMap::new();
    for (i, r) in rows.iter().enumerate() {
        let Some(f) = r.mean_f1() else { continue };
        let key = (r.model, r.music_type, r.behaviors != Behaviors::None);
        match best.get(&key) {
            Some(&(_, b)) if b >= f => {}
            _ => {
                best.insert(key, (i, f));
            }
        }
    }
    for (i, _) in best.values() {
        rows[*i].best = true;
    }
}

/// Full factorial of the plan; rows ordered model, music type, region,
/// behaviors. Failed cells are recorded, not raised.
pub fn run_study(table: &FeatureTable, plan: &StudyPlan) -> StudyTable {
    let mut cells: BTreeMap<(ModelFamily, MusicType, RegionName, Behaviors), Result<CvReport, String>> =
        BTreeMap::new();
    let mut baselines = Vec::new();
    let grids: BTreeMap<ModelFamily, Vec<Params>> = plan.models.iter().map(|&m| (m, plan.grid(m))).collect();
    for &music_type in &plan.music_types {
        let mut labels = None;
        for &region in &plan.regions {
            for &behaviors in &plan.behaviors {
                let cfg = FeatureConfig::new(region, behaviors, music_type);
                let data = assemble_table(table, &cfg);
                if labels.is_none() {
                    if let Ok(d) = &data {
                        labels = Some(d.y.clone());
                    }
                }
                for &model in &plan.models {
                    let result = match &data {
                        Ok(d) => nested_cv(d, model, &grids[&model], &plan.cv)
                            .map(|mut r| {
                                r.config = Some(cfg.clone());
                                r
                            })
                            .map_err(|e| e.to_string()),
                        Err(e) => Err(e.to_string()),
                    };
                    cells.insert((model, music_type, region, behaviors), result);
                }
            }
        }
        baselines.push(majority_baseline(music_type, labels.as_deref().unwrap_or(&[]), plan));
    }
    let mut rows = Vec::with_capacity(cells.len());
    for &model in &plan.models {
        for &music_type in &plan.music_types {
            for &region in &plan.regions {
                for &behaviors in &plan.behaviors {
                    let r = cells.remove(&(model, music_type, region, behaviors)).unwrap();
                    let (report, error) = match r {
                        Ok(rep) => (Some(rep), None),
                        Err(e) => (None, Some(e)),
                    };
                    rows.push(StudyRow {
                        model,
                        music_type,
                        region,
                        behaviors,
                        report,
                        error,
                        best: false,
                    });
                }
            }
        }
    }
    mark_best(&mut rows);
    StudyTable { rows, baselines }
}

impl StudyTable {
    pub fn row(&self, model: ModelFamily, music_type: MusicType, region: RegionName, behaviors: Behaviors) -> Option<&StudyRow> {
        self.rows.iter().find(|r| {
            r.model == model && r.music_type == music_type && r.region == region && r.behaviors == behaviors
        })
    }

    pub fn best(&self, model: ModelFamily, music_type: MusicType, fused: bool) -> Option<&StudyRow> {
        self.rows.iter().find(|r| {
            r.best && r.model == model && r.music_type == music_type && (r.behaviors != Behaviors::None) == fused
        })
    }

    pub fn csv_records(&self) -> Vec<Vec<String>> {
        let mut out = Vec::new();
        for r in &self.rows {
            let mut rec = vec![
                r.model.to_string(),
                r.music_type.to_string(),
                r.region.to_string(),
                r.behaviors.to_string(),
            ];
            match &r.report {
                Some(rep) => {
                    let params: Vec<&Params> = rep.per_fold.iter().map(|f| &f.params).collect();
                    rec.extend([
                        rep.mean_f1.to_string(),
                        rep.se_f1.to_string(),
                        rep.mean_accuracy.to_string(),
                        rep.se_accuracy.to_string(),
                        serde_json::to_string(&params).expect("params serialize"),
                        serde_json::to_string(&rep.fold_f1()).expect("scores serialize"),
                    ]);
                }
                None => rec.extend(["NaN", "NaN", "NaN", "NaN", "[]", "[]"].map(String::from)),
            }
            out.push(rec);
        }
        for b in &self.baselines {
            out.push(vec![
                "baseline".into(),
                b.music_type.to_string(),
                String::new(),
                Behaviors::None.to_string(),
                b.f1.to_string(),
                "0".into(),
                b.accuracy.to_string(),
                "0".into(),
                format!("{{\"majority_label\":{}}}", b.majority_label),
                "[]".into(),
            ]);
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), ModelSelError> {
        let io = |e: csv::Error| ModelSelError::Io(path.display().to_string(), e.to_string());
        let mut w = csv::Writer::from_path(path).map_err(io)?;
        w.write_record(STUDY_CSV_HEADER).map_err(io)?;
        for rec in self.csv_records() {
            w.write_record(&rec).map_err(io)?;
        }
        w.flush().map_err(|e| ModelSelError::Io(path.display().to_string(), e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("study serializes")
    }

    pub fn from_json(s: &str) -> Result<StudyTable, ModelSelError> {
        serde_json::from_str(s).map_err(|e| ModelSelError::InvalidConfig(e.to_string()))
    }

    /// Best F1 per model and music type, as percentages with the winning
    /// region's code, one table without and one with behaviors.
    pub fn to_markdown(&self) -> String {
        let mut models: Vec<ModelFamily> = self.rows.iter().map(|r| r.model).collect();
        models.dedup();
        let mut types: Vec<MusicType> = self.rows.iter().map(|r| r.music_type).collect();
        types.sort();
        types.dedup();
        let mut s = String::new();
        for (fused, title) in [(false, "Without behaviors"), (true, "With behaviors")] {
            if !self.rows.iter().any(|r| (r.behaviors != Behaviors::None) == fused) {
                continue;
            }
            let _ = writeln!(s, "### {title}\n");
            let _ = writeln!(s, "| Model | {} |", types.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" | "));
            let _ = writeln!(s, "|---|{}", "---|".repeat(types.len()));
            for &m in &models {
                let cells: Vec<String> = types
                    .iter()
                    .map(|&t| match self.best(m, t, fused).and_then(|r| r.report.as_ref().map(|rep| (r, rep))) {
                        Some((r, rep)) => {
                            let tag = if fused {
                                format!("{}+{}", r.region.code(), r.behaviors)
                            } else {
                                r.region.code().to_string()
                            };
                            format!("{:.2} ± {:.2}^{}", 100.0 * rep.mean_f1, 100.0 * rep.se_f1, tag)
                        }
                        None => "n/a".into(),
                    })
                    .collect();
                let _ = writeln!(s, "| {m} | {} |", cells.join(" | "));
            }
            let base: Vec<String> = types
                .iter()
                .map(|&t| match self.baselines.iter().find(|b| b.music_type == t) {
                    Some(b) => format!("{:.2} (acc {:.2})", 100.0 * b.f1, 100.0 * b.accuracy),
                    None => "n/a".into(),
                })
                .collect();
            let _ = writeln!(s, "| Majority baseline | {} |\n", base.join(" | "));
        }
        s
    }
}

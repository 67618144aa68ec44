use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::assemble::FeatureConfig;
use super::folds::{fold_members, stratified_folds};
use super::metrics::{accuracy, f1_score, F1Average};
use super::ModelSelError;
use crate::learn::{
    gram_matrix, ranked_neighbors, svm_solve_gram, train, vote_ranked, Dataset, LearnError, Metric,
    ModelFamily, Params, Scaler, SvmParams,
};
use crate::numeric::{derive_seed, mean, standard_error};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub k: usize,
    pub seed: u64,
    pub average: F1Average,
    /// Refit on training plus validation folds after selection.
    pub retrain_with_validation: bool,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            k: 10,
            seed: 0,
            average: F1Average::Binary,
            retrain_with_validation: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub index: usize,
    pub params: Params,
    pub validation_f1: f64,
    /// Grid indices whose training failed.
    pub failed: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub validation_fold: usize,
    pub f1: f64,
    pub accuracy: f64,
    pub params: Params,
    pub validation_f1: f64,
    pub failed_points: usize,
    pub n_test: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub model: ModelFamily,
    pub config: Option<FeatureConfig>,
    pub per_fold: Vec<FoldResult>,
    pub mean_f1: f64,
    pub se_f1: f64,
    pub mean_accuracy: f64,
    pub se_accuracy: f64,
}

impl CvReport {
    fn from_folds(model: ModelFamily, per_fold: Vec<FoldResult>) -> Self {
        let f1: Vec<f64> = per_fold.iter().map(|f| f.f1).collect();
        let acc: Vec<f64> = per_fold.iter().map(|f| f.accuracy).collect();
        CvReport {
            model,
            config: None,
            mean_f1: mean(&f1),
            se_f1: standard_error(&f1),
            mean_accuracy: mean(&acc),
            se_accuracy: standard_error(&acc),
            per_fold,
        }
    }

    pub fn fold_f1(&self) -> Vec<f64> {
        self.per_fold.iter().map(|f| f.f1).collect()
    }
}

fn with_seed(p: &Params, seed: u64) -> Params {
    match p {
        Params::Forest(f) => Params::Forest(crate::learn::ForestParams { seed, ..*f }),
        other => *other,
    }
}

fn scaled(data: &Dataset, scaler: &Scaler) -> Dataset {
    Dataset {
        x: scaler.transform(&data.x),
        y: data.y.clone(),
        feature_names: data.feature_names.clone(),
    }
}

type GridPredictions = Vec<Result<Vec<u8>, LearnError>>;

fn svm_key(p: &SvmParams) -> (u8, u64, u32) {
    (p.kernel as u8, p.gamma.to_bits(), p.degree)
}

/// Validation predictions for every grid point, in grid order. Kernel
/// matrices and neighbor rankings are shared between points that allow it.
pub fn evaluate_grid(train_set: &Dataset, val_x: &[Vec<f64>], grid: &[Params], seed: u64) -> GridPredictions {
    let mut out: Vec<Option<Result<Vec<u8>, LearnError>>> = (0..grid.len()).map(|_| None).collect();

    let mut svm_groups: Vec<((u8, u64, u32), Vec<usize>)> = Vec::new();
    let mut knn_groups: Vec<(Metric, Vec<usize>)> = Vec::new();
    let mut others = Vec::new();
    for (i, p) in grid.iter().enumerate() {
        match p {
            Params::Svm(s) => match svm_groups.iter_mut().find(|(k, _)| *k == svm_key(s)) {
                Some((_, v)) => v.push(i),
                None => svm_groups.push((svm_key(s), vec![i])),
            },
            Params::Knn(k) => match knn_groups.iter_mut().find(|(m, _)| *m == k.metric) {
                Some((_, v)) => v.push(i),
                None => knn_groups.push((k.metric, vec![i])),
            },
            Params::Forest(_) => others.push(i),
        }
    }

    let svm_done: Vec<(usize, Result<Vec<u8>, LearnError>)> = svm_groups
        .par_iter()
        .flat_map_iter(|(_, members)| {
            let Params::Svm(first) = grid[members[0]] else { unreachable!() };
            let gram = gram_matrix(&train_set.x, &first);
            members
                .iter()
                .map(|&i| {
                    let Params::Svm(p) = grid[i] else { unreachable!() };
                    let r = svm_solve_gram(train_set, &p, &gram)
                        .map(|sol| val_x.iter().map(|x| sol.model.predict(x)).collect());
                    (i, r)
                })
                .collect::<Vec<_>>()
        })
        .collect();

    let knn_done: Vec<(usize, Result<Vec<u8>, LearnError>)> = knn_groups
        .par_iter()
        .flat_map_iter(|(metric, members)| {
            let ranked: Vec<Vec<(f64, usize)>> =
                val_x.iter().map(|q| ranked_neighbors(&train_set.x, *metric, q)).collect();
            members
                .iter()
                .map(|&i| {
                    let Params::Knn(p) = grid[i] else { unreachable!() };
                    let r = crate::learn::KnnModel::fit(train_set, &p).map(|_| {
                        ranked
                            .iter()
                            .map(|nb| vote_ranked(&train_set.y, nb, p.k, p.weights).label)
                            .collect()
                    });
                    (i, r)
                })
                .collect::<Vec<_>>()
        })
        .collect();

    let rest: Vec<(usize, Result<Vec<u8>, LearnError>)> = others
        .par_iter()
        .map(|&i| {
            let r = train(train_set, &with_seed(&grid[i], seed)).map(|m| m.predict_all(val_x));
            (i, r)
        })
        .collect();

    for (i, r) in svm_done.into_iter().chain(knn_done).chain(rest) {
        out[i] = Some(r);
    }
    out.into_iter().map(|r| r.expect("every grid point evaluated")).collect()
}

fn fold_seed(cfg: &CvConfig, test_fold: usize) -> u64 {
    derive_seed(cfg.seed, &[test_fold as u64])
}

/// Chooses parameters for one test fold using only its training and
/// validation folds.
pub fn select_params(
    data: &Dataset,
    folds: &[usize],
    test_fold: usize,
    grid: &[Params],
    cfg: &CvConfig,
) -> Result<Selection, ModelSelError> {
    if grid.is_empty() {
        return Err(ModelSelError::InvalidConfig("empty grid".into()));
    }
    let val_fold = (test_fold + 1) % cfg.k;
    let train_idx: Vec<usize> = (0..data.len())
        .filter(|&i| folds[i] != test_fold && folds[i] != val_fold)
        .collect();
    let val_idx = fold_members(folds, val_fold);
    let train_raw = data.subset(&train_idx);
    let scaler = Scaler::fit(&train_raw.x);
    let train_set = scaled(&train_raw, &scaler);
    let val = scaled(&data.subset(&val_idx), &scaler);

    let preds = evaluate_grid(&train_set, &val.x, grid, fold_seed(cfg, test_fold));
    let mut best: Option<(usize, f64)> = None;
    let mut failed = Vec::new();
    for (i, p) in preds.iter().enumerate() {
        match p {
            Ok(pred) => {
                let f = f1_score(pred, &val.y, cfg.average);
                if best.map_or(true, |(_, b)| f > b) {
                    best = Some((i, f));
                }
            }
            Err(_) => failed.push(i),
        }
    }
    let (index, validation_f1) = best.ok_or(ModelSelError::AllGridPointsFailed { fold: test_fold })?;
    Ok(Selection {
        index,
        params: with_seed(&grid[index], fold_seed(cfg, test_fold)),
        validation_f1,
        failed,
    })
}

fn run_fold(
    data: &Dataset,
    folds: &[usize],
    test_fold: usize,
    grid: &[Params],
    cfg: &CvConfig,
) -> Result<FoldResult, ModelSelError> {
    let sel = select_params(data, folds, test_fold, grid, cfg)?;
    let val_fold = (test_fold + 1) % cfg.k;
    let fit_idx: Vec<usize> = (0..data.len())
        .filter(|&i| folds[i] != test_fold && (cfg.retrain_with_validation || folds[i] != val_fold))
        .collect();
    let test_idx = fold_members(folds, test_fold);
    let fit_raw = data.subset(&fit_idx);
    let scaler = Scaler::fit(&fit_raw.x);
    let model = train(&scaled(&fit_raw, &scaler), &sel.params)?;
    let test = scaled(&data.subset(&test_idx), &scaler);
    let pred = model.predict_all(&test.x);
    Ok(FoldResult {
        fold: test_fold,
        validation_fold: val_fold,
        f1: f1_score(&pred, &test.y, cfg.average),
        accuracy: accuracy(&pred, &test.y),
        params: sel.params,
        validation_f1: sel.validation_f1,
        failed_points: sel.failed.len(),
        n_test: test_idx.len(),
    })
}

/// Nested cross-validation over precomputed folds (values in `0..cfg.k`).
pub fn nested_cv_with_folds(
    data: &Dataset,
    family: ModelFamily,
    grid: &[Params],
    folds: &[usize],
    cfg: &CvConfig,
) -> Result<CvReport, ModelSelError> {
    if folds.len() != data.len() || folds.iter().any(|&f| f >= cfg.k) {
        return Err(ModelSelError::InvalidConfig("fold assignment does not match data".into()));
    }
    if let Some(p) = grid.iter().find(|p| p.family() != family) {
        return Err(ModelSelError::InvalidConfig(format!("{} grid point in {family} grid", p.family())));
    }
    let per_fold = (0..cfg.k)
        .map(|f| run_fold(data, folds, f, grid, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CvReport::from_folds(family, per_fold))
}

pub fn nested_cv(
    data: &Dataset,
    family: ModelFamily,
    grid: &[Params],
    cfg: &CvConfig,
) -> Result<CvReport, ModelSelError> {
    let folds = stratified_folds(&data.y, cfg.k, cfg.seed)?;
    nested_cv_with_folds(data, family, grid, &folds, cfg)
}

//! Feature assembly, stratified nested cross-validation and the study table.

pub mod assemble;
pub mod cv;
pub mod folds;
pub mod grid;
pub mod metrics;
pub mod study;

use thiserror::Error;

use crate::learn::LearnError;

pub use assemble::{assemble_features, assemble_table, Behaviors, FeatureConfig};
pub use cv::{
    evaluate_grid, nested_cv, nested_cv_with_folds, select_params, CvConfig, CvReport,
    FoldResult, Selection,
};
pub use crate::numeric::derive_seed;
pub use folds::{fold_members, grouped_folds, stratified_folds};
pub use grid::{forest_grid, full_grid, knn_grid, svm_grid, GridOptions};
pub use metrics::{accuracy, f1_score, F1Average};
pub use study::{majority_baseline, run_study, Baseline, StudyPlan, StudyRow, StudyTable, STUDY_CSV_HEADER};

#[derive(Debug, Error)]
pub enum ModelSelError {
    #[error("missing features: {0}")]
    MissingFeatures(String),
    #[error("class {label} has {count} members, fewer than k = {k}")]
    ClassTooSmall { label: u8, count: usize, k: usize },
    #[error("every grid point failed for test fold {fold}")]
    AllGridPointsFailed { fold: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error("{0}: {1}")]
    Io(String, String),
}

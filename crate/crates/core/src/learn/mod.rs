//! Binary classifiers: SMO-trained SVM, random forest and kNN.

pub mod dataset;
pub mod forest;
pub mod knn;
pub mod scale;
pub mod svm;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dataset::Dataset;
pub use forest::{forest_train, ForestModel, ForestParams, Tree};
pub use knn::{knn_predict, ranked_neighbors, vote_ranked, KnnModel, KnnParams, KnnPrediction, Metric, Weights};
pub use scale::{standardize, Scaler};
pub use svm::{gram_matrix, svm_solve, svm_solve_gram, svm_train, Kernel, SvmModel, SvmParams, SvmSolution};

/// Version tag written into serialized models.
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("non-finite feature value")]
    NonFinite,
    #[error("training data needs both classes ({negatives} negative, {positives} positive)")]
    DegenerateData { negatives: usize, positives: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("k = {k} but only {n} training rows")]
    KTooLarge { k: usize, n: usize },
    #[error("model document: {0}")]
    Format(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ModelFamily {
    #[serde(rename = "SVM")]
    Svm,
    #[serde(rename = "RF")]
    Forest,
    #[serde(rename = "kNN")]
    Knn,
}

impl ModelFamily {
    pub const ALL: [ModelFamily; 3] = [ModelFamily::Svm, ModelFamily::Forest, ModelFamily::Knn];

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelFamily::Svm => "SVM",
            ModelFamily::Forest => "RF",
            ModelFamily::Knn => "kNN",
        }
    }
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelFamily {
    type Err = LearnError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "svm" => Ok(ModelFamily::Svm),
            "rf" | "forest" => Ok(ModelFamily::Forest),
            "knn" => Ok(ModelFamily::Knn),
            _ => Err(LearnError::InvalidParams(format!("unknown model family {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Params {
    Svm(SvmParams),
    Forest(ForestParams),
    Knn(KnnParams),
}

impl Params {
    pub fn family(&self) -> ModelFamily {
        match self {
            Params::Svm(_) => ModelFamily::Svm,
            Params::Forest(_) => ModelFamily::Forest,
            Params::Knn(_) => ModelFamily::Knn,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Model {
    Svm(SvmModel),
    Forest(ForestModel),
    Knn(KnnModel),
}

#[derive(Serialize, Deserialize)]
struct ModelDocument {
    format_version: u32,
    model: Model,
}

impl Model {
    pub fn predict(&self, x: &[f64]) -> u8 {
        match self {
            Model::Svm(m) => m.predict(x),
            Model::Forest(m) => m.predict(x),
            Model::Knn(m) => m.predict(x),
        }
    }

    pub fn predict_all(&self, x: &[Vec<f64>]) -> Vec<u8> {
        x.iter().map(|r| self.predict(r)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ModelDocument {
            format_version: MODEL_FORMAT_VERSION,
            model: self.clone(),
        })
        .expect("model serializes")
    }

    pub fn from_json(s: &str) -> Result<Model, LearnError> {
        let doc: ModelDocument =
            serde_json::from_str(s).map_err(|e| LearnError::Format(e.to_string()))?;
        if doc.format_version != MODEL_FORMAT_VERSION {
            return Err(LearnError::Format(format!(
                "unsupported format_version {}",
                doc.format_version
            )));
        }
        Ok(doc.model)
    }
}

pub fn train(data: &Dataset, params: &Params) -> Result<Model, LearnError> {
    match params {
        Params::Svm(p) => svm_train(data, p).map(Model::Svm),
        Params::Forest(p) => forest_train(data, p).map(Model::Forest),
        Params::Knn(p) => KnnModel::fit(data, p).map(Model::Knn),
    }
}

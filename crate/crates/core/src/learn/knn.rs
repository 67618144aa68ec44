use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use super::LearnError;

pub const DEFAULT_MINKOWSKI_P: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weights {
    Uniform,
    Distance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Euclidean,
    Manhattan,
    Minkowski(f64),
}

impl Metric {
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
        match *self {
            Metric::Euclidean => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            Metric::Manhattan => diffs.sum(),
            Metric::Minkowski(p) => diffs.map(|d| d.powf(p)).sum::<f64>().powf(1.0 / p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnnParams {
    pub k: usize,
    pub weights: Weights,
    pub metric: Metric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnnPrediction {
    pub label: u8,
    /// Vote mass per label.
    pub scores: [f64; 2],
}

/// A kNN "model" is its training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub params: KnnParams,
    pub train: Dataset,
}

impl KnnModel {
    pub fn fit(train: &Dataset, params: &KnnParams) -> Result<KnnModel, LearnError> {
        check(train, params)?;
        Ok(KnnModel {
            params: *params,
            train: train.clone(),
        })
    }

    pub fn predict(&self, x: &[f64]) -> u8 {
        vote(&self.train, &self.params, x).label
    }
}

fn check(train: &Dataset, params: &KnnParams) -> Result<(), LearnError> {
    if params.k == 0 || params.k > train.len() {
        return Err(LearnError::KTooLarge {
            k: params.k,
            n: train.len(),
        });
    }
    if let Metric::Minkowski(p) = params.metric {
        if !(p >= 1.0) {
            return Err(LearnError::InvalidParams(format!("minkowski p = {p}")));
        }
    }
    Ok(())
}

pub fn knn_predict(train: &Dataset, params: &KnnParams, query: &[f64]) -> Result<KnnPrediction, LearnError> {
    check(train, params)?;
    if query.len() != train.n_features() {
        return Err(LearnError::Shape(format!(
            "query has {} features, expected {}",
            query.len(),
            train.n_features()
        )));
    }
    Ok(vote(train, params, query))
}

/// All training rows ordered by (distance, index).
pub fn ranked_neighbors(train_x: &[Vec<f64>], metric: Metric, query: &[f64]) -> Vec<(f64, usize)> {
    let mut dist: Vec<(f64, usize)> = train_x
        .iter()
        .enumerate()
        .map(|(i, r)| (metric.distance(r, query), i))
        .collect();
    dist.sort_by(by_distance);
    dist
}

fn by_distance(a: &(f64, usize), b: &(f64, usize)) -> std::cmp::Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// Vote among the first `k` entries of a ranked neighbor list.
pub fn vote_ranked(labels: &[u8], ranked: &[(f64, usize)], k: usize, weights: Weights) -> KnnPrediction {
    let near = &ranked[..k];
    let mut scores = [0.0; 2];
    match weights {
        Weights::Uniform => {
            for &(_, i) in near {
                scores[labels[i] as usize] += 1.0;
            }
        }
        Weights::Distance if near[0].0 == 0.0 => {
            for &(_, i) in near.iter().take_while(|(d, _)| *d == 0.0) {
                scores[labels[i] as usize] += 1.0;
            }
        }
        Weights::Distance => {
            for &(d, i) in near {
                scores[labels[i] as usize] += 1.0 / d;
            }
        }
    }
    KnnPrediction {
        label: u8::from(scores[1] > scores[0]),
        scores,
    }
}

fn vote(train: &Dataset, params: &KnnParams, query: &[f64]) -> KnnPrediction {
    let mut dist: Vec<(f64, usize)> = train
        .x
        .iter()
        .enumerate()
        .map(|(i, r)| (params.metric.distance(r, query), i))
        .collect();
    let k = params.k;
    if k < dist.len() {
        dist.select_nth_unstable_by(k - 1, by_distance);
        dist.truncate(k);
    }
    dist.sort_by(by_distance);
    vote_ranked(&train.y, &dist, k, params.weights)
}

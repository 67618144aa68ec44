use serde::{Deserialize, Serialize};

use super::LearnError;

/// Feature matrix with binary labels (1 = favored, 0 = non-favored).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<u8>,
    pub feature_names: Vec<String>,
}

impl Dataset {
    pub fn new(x: Vec<Vec<f64>>, y: Vec<u8>, feature_names: Vec<String>) -> Result<Self, LearnError> {
        if x.len() != y.len() {
            return Err(LearnError::Shape(format!("{} rows but {} labels", x.len(), y.len())));
        }
        let d = feature_names.len();
        if let Some(bad) = x.iter().position(|r| r.len() != d) {
            return Err(LearnError::Shape(format!(
                "row {bad} has {} features, expected {d}",
                x[bad].len()
            )));
        }
        if x.iter().flatten().any(|v| !v.is_finite()) {
            return Err(LearnError::NonFinite);
        }
        if y.iter().any(|&l| l > 1) {
            return Err(LearnError::Shape("labels must be 0 or 1".into()));
        }
        Ok(Dataset { x, y, feature_names })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let pos = self.y.iter().filter(|&&l| l == 1).count();
        [self.y.len() - pos, pos]
    }

    pub(crate) fn require_both_classes(&self) -> Result<(), LearnError> {
        let [neg, pos] = self.class_counts();
        if neg == 0 || pos == 0 {
            Err(LearnError::DegenerateData { negatives: neg, positives: pos })
        } else {
            Ok(())
        }
    }

    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            x: idx.iter().map(|&i| self.x[i].clone()).collect(),
            y: idx.iter().map(|&i| self.y[i]).collect(),
            feature_names: self.feature_names.clone(),
        }
    }

    /// Same rows with columns reordered so that new column `j` is old `perm[j]`.
    pub fn permute_columns(&self, perm: &[usize]) -> Dataset {
        Dataset {
            x: self.x.iter().map(|r| perm.iter().map(|&j| r[j]).collect()).collect(),
            y: self.y.clone(),
            feature_names: perm.iter().map(|&j| self.feature_names[j].clone()).collect(),
        }
    }
}

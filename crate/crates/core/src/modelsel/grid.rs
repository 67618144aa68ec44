//! Canonical hyperparameter grids. Grid order is the selection tie-break.

use serde::{Deserialize, Serialize};

use crate::learn::{
    ForestParams, Kernel, KnnParams, Metric, ModelFamily, Params, SvmParams, Weights,
};

pub const SVM_C: [f64; 6] = [0.001, 0.01, 0.1, 1.0, 10.0, 100.0];
pub const SVM_GAMMA: [f64; 5] = [0.001, 0.01, 0.11, 1.0, 10.0];
/// Value substituted for the third gamma when `gamma_fix` is set.
pub const GAMMA_FIX: f64 = 0.1;
pub const SVM_DEGREE: [u32; 3] = [2, 3, 4];
pub const RF_ESTIMATORS: [usize; 3] = [100, 300, 500];
pub const RF_MAX_DEPTH: [usize; 5] = [5, 8, 11, 14, 17];
pub const RF_MIN_LEAF: [usize; 5] = [2, 5, 8, 11, 14];
pub const RF_MIN_SPLIT: [usize; 5] = [2, 5, 8, 11, 14];
pub const KNN_K: std::ops::RangeInclusive<usize> = 10..=49;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridOptions {
    pub gamma_fix: bool,
    pub minkowski_p: f64,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions {
            gamma_fix: false,
            minkowski_p: crate::learn::knn::DEFAULT_MINKOWSKI_P,
        }
    }
}

pub fn svm_gammas(opts: &GridOptions) -> Vec<f64> {
    SVM_GAMMA
        .iter()
        .map(|&g| if opts.gamma_fix && g == 0.11 { GAMMA_FIX } else { g })
        .collect()
}

/// Kernel, then C, then gamma, then degree. The linear kernel ignores gamma,
/// so it contributes one point per C.
pub fn svm_grid(opts: &GridOptions) -> Vec<Params> {
    let gammas = svm_gammas(opts);
    let mut g = Vec::new();
    for &c in &SVM_C {
        g.push(Params::Svm(SvmParams::new(Kernel::Linear, c, gammas[0], SVM_DEGREE[0])));
    }
    for &c in &SVM_C {
        for &gamma in &gammas {
            g.push(Params::Svm(SvmParams::new(Kernel::Rbf, c, gamma, SVM_DEGREE[0])));
        }
    }
    for &c in &SVM_C {
        for &gamma in &gammas {
            for &d in &SVM_DEGREE {
                g.push(Params::Svm(SvmParams::new(Kernel::Poly, c, gamma, d)));
            }
        }
    }
    g
}

/// Estimators, then depth, then leaf, then split. Seeds are filled in per task.
pub fn forest_grid() -> Vec<Params> {
    let mut g = Vec::new();
    for &n_estimators in &RF_ESTIMATORS {
        for &max_depth in &RF_MAX_DEPTH {
            for &min_samples_leaf in &RF_MIN_LEAF {
                for &min_samples_split in &RF_MIN_SPLIT {
                    g.push(Params::Forest(ForestParams {
                        n_estimators,
                        max_depth,
                        min_samples_leaf,
                        min_samples_split,
                        seed: 0,
                    }));
                }
            }
        }
    }
    g
}

/// k, then weights, then metric.
pub fn knn_grid(opts: &GridOptions) -> Vec<Params> {
    let metrics = [Metric::Euclidean, Metric::Manhattan, Metric::Minkowski(opts.minkowski_p)];
    let mut g = Vec::new();
    for k in KNN_K {
        for weights in [Weights::Uniform, Weights::Distance] {
            for metric in metrics {
                g.push(Params::Knn(KnnParams { k, weights, metric }));
            }
        }
    }
    g
}

pub fn full_grid(family: ModelFamily, opts: &GridOptions) -> Vec<Params> {
    match family {
        ModelFamily::Svm => svm_grid(opts),
        ModelFamily::Forest => forest_grid(),
        ModelFamily::Knn => knn_grid(opts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        let o = GridOptions::default();
        assert_eq!(svm_grid(&o).len(), 6 + 30 + 90);
        assert_eq!(forest_grid().len(), 375);
        assert_eq!(knn_grid(&o).len(), 40 * 2 * 3);
    }

    #[test]
    fn gamma_fix_replaces_printed_value() {
        let fixed = svm_gammas(&GridOptions {
            gamma_fix: true,
            ..GridOptions::default()
        });
        assert_eq!(fixed, vec![0.001, 0.01, 0.1, 1.0, 10.0]);
        assert_eq!(svm_gammas(&GridOptions::default())[2], 0.11);
    }
}

//! Stratified 10-fold nested cross-validation with grid search, on an
//! imbalanced fixture shaped like the favored / non-favored split.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use musicpref::learn::{Dataset, ModelFamily};
use musicpref::modelsel::{knn_grid, nested_cv, stratified_folds, svm_grid, CvConfig, GridOptions};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (n_pos, n_neg) = (81, 271);
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 0..n_pos + n_neg {
        let label = u8::from(i < n_pos);
        let shift = if label == 1 { 1.2 } else { 0.0 };
        x.push((0..4).map(|_| shift + rng.gen_range(-1.0..1.0)).collect());
        y.push(label);
    }
    let data = Dataset::new(x, y, (0..4).map(|i| format!("f{i}")).collect()).unwrap();

    let cfg = CvConfig::default();
    let folds = stratified_folds(&data.y, cfg.k, cfg.seed).unwrap();
    let sizes: Vec<usize> = (0..cfg.k).map(|f| folds.iter().filter(|&&g| g == f).count()).collect();
    println!("fold sizes {sizes:?}");

    let options = GridOptions::default();
    let svm: Vec<_> = svm_grid(&options).into_iter().filter(|p| matches!(p, musicpref::learn::Params::Svm(s) if s.c >= 0.1)).collect();
    for (family, grid) in [(ModelFamily::Svm, svm), (ModelFamily::Knn, knn_grid(&options))] {
        let report = nested_cv(&data, family, &grid, &cfg).unwrap();
        println!(
            "{family}: {} grid points, F1 {:.3} +- {:.3}, accuracy {:.3} +- {:.3}",
            grid.len(),
            report.mean_f1,
            report.se_f1,
            report.mean_accuracy,
            report.se_accuracy
        );
        if let Some(first) = report.per_fold.first() {
            println!("  fold 0 chose {:?}", first.params);
        }
    }
}

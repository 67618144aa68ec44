//! The three learners on small fixtures: SMO SVM, Gini random forest and
//! distance-weighted kNN.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use musicpref::learn::{
    forest_train, knn_predict, standardize, svm_train, train, Dataset, ForestParams, Kernel,
    KnnParams, Metric, Model, Params, SvmParams, Weights,
};

fn xor(rng: &mut ChaCha8Rng) -> Dataset {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 0..80 {
        let (a, b) = (if i % 2 == 0 { 1.0 } else { -1.0 }, if i % 4 < 2 { 1.0 } else { -1.0 });
        x.push(vec![a + rng.gen_range(-0.3..0.3), b + rng.gen_range(-0.3..0.3)]);
        y.push(u8::from(a * b > 0.0));
    }
    Dataset::new(x, y, vec!["x".into(), "y".into()]).unwrap()
}

fn accuracy(data: &Dataset, predict: impl Fn(&[f64]) -> u8) -> f64 {
    data.x.iter().zip(&data.y).filter(|(x, &y)| predict(x) == y).count() as f64 / data.len() as f64
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let data = xor(&mut rng);
    let (train_x, _, scaler) = standardize(&data.x, &[]);
    println!("scaler mean {:?}", scaler.mean);
    let data = Dataset { x: train_x, ..data };

    let svm = svm_train(&data, &SvmParams::new(Kernel::Rbf, 10.0, 1.0, 3)).unwrap();
    println!(
        "SVM rbf: {} support vectors, KKT violation {:.1e}, training accuracy {:.3}",
        svm.support_vectors.len(),
        svm.kkt_violation,
        accuracy(&data, |x| svm.predict(x))
    );
    let linear = svm_train(&data, &SvmParams::new(Kernel::Linear, 1.0, 1.0, 3)).unwrap();
    println!("SVM linear on XOR: training accuracy {:.3}", accuracy(&data, |x| linear.predict(x)));

    let forest = forest_train(
        &data,
        &ForestParams {
            n_estimators: 100,
            max_depth: 5,
            min_samples_leaf: 2,
            min_samples_split: 2,
            seed: 7,
        },
    )
    .unwrap();
    println!(
        "forest: training accuracy {:.3}, out-of-bag {:.3}",
        accuracy(&data, |x| forest.predict(x)),
        forest.oob_accuracy(&data).unwrap_or(f64::NAN)
    );

    // neighbours at distance 1, 2, 3 with labels 1, 0, 0
    let line = Dataset::new(vec![vec![1.0], vec![2.0], vec![3.0]], vec![1, 0, 0], vec!["d".into()]).unwrap();
    let p = knn_predict(&line, &KnnParams { k: 3, weights: Weights::Distance, metric: Metric::Euclidean }, &[0.0]).unwrap();
    println!("kNN distance vote: scores {:?} -> label {}", p.scores, p.label);

    // any family through the common interface, and back from JSON
    let model = train(&data, &Params::Knn(KnnParams { k: 7, weights: Weights::Uniform, metric: Metric::Manhattan })).unwrap();
    let restored = Model::from_json(&model.to_json()).unwrap();
    println!("kNN via Model: training accuracy {:.3}", accuracy(&data, |x| restored.predict(x)));
}

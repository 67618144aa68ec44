use proptest::prelude::*;

use musicpref::learn::{
    forest_train, knn_predict, svm_solve, svm_train, Dataset, ForestParams, Kernel, KnnParams,
    Metric, SvmParams, Weights,
};

fn dataset(rows: &[(Vec<f64>, bool)]) -> Dataset {
    let d = rows[0].0.len();
    Dataset::new(
        rows.iter().map(|(x, _)| x.clone()).collect(),
        rows.iter().map(|(_, y)| u8::from(*y)).collect(),
        (0..d).map(|i| format!("f{i}")).collect(),
    )
    .unwrap()
}

fn labeled_rows(d: usize) -> impl Strategy<Value = Vec<(Vec<f64>, bool)>> {
    prop::collection::vec((prop::collection::vec(-3.0f64..3.0, d), any::<bool>()), 12..30)
        .prop_filter("both classes", |rows| {
            rows.iter().any(|r| r.1) && rows.iter().any(|r| !r.1)
        })
}

fn permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut s = seed | 1;
    for i in (1..n).rev() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        p.swap(i, (s % (i as u64 + 1)) as usize);
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn svm_dual_is_feasible(rows in labeled_rows(3), c in 0.1f64..10.0) {
        let data = dataset(&rows);
        let sol = svm_solve(&data, &SvmParams::new(Kernel::Rbf, c, 0.5, 3)).unwrap();
        let balance: f64 = sol.alpha.iter().zip(&data.y).map(|(a, &y)| if y == 1 { *a } else { -*a }).sum();
        prop_assert!(balance.abs() < 1e-6);
        prop_assert!(sol.alpha.iter().all(|&a| (0.0..=c).contains(&a)));
    }

    #[test]
    fn svm_decisions_ignore_row_order(rows in labeled_rows(2), seed in any::<u64>()) {
        let data = dataset(&rows);
        let perm = permutation(rows.len(), seed);
        let shuffled = data.subset(&perm);
        let mut params = SvmParams::new(Kernel::Rbf, 1.0, 0.5, 3);
        params.tol = 1e-10;
        let a = svm_train(&data, &params).unwrap();
        let b = svm_train(&shuffled, &params).unwrap();
        for x in &data.x {
            prop_assert!((a.decision(x) - b.decision(x)).abs() < 1e-6);
        }
    }

    #[test]
    fn forest_and_knn_ignore_column_order(rows in labeled_rows(4), seed in any::<u64>(), q in prop::collection::vec(-3.0f64..3.0, 4)) {
        let data = dataset(&rows);
        let perm = permutation(4, seed);
        let permuted = data.permute_columns(&perm);
        let pq: Vec<f64> = perm.iter().map(|&j| q[j]).collect();
        let knn = KnnParams { k: 5, weights: Weights::Distance, metric: Metric::Manhattan };
        let (a, b) = (knn_predict(&data, &knn, &q).unwrap(), knn_predict(&permuted, &knn, &pq).unwrap());
        prop_assert_eq!(a.label, b.label);
        // distances sum in a different order
        for (sa, sb) in a.scores.iter().zip(&b.scores) {
            prop_assert!((sa - sb).abs() <= 1e-12 * sa.abs().max(1.0));
        }

        let fp = ForestParams { n_estimators: 15, max_depth: 4, min_samples_leaf: 1, min_samples_split: 2, seed };
        let f = forest_train(&data, &fp).unwrap();
        let g = forest_train(&permuted, &fp).unwrap();
        for x in &data.x {
            let px: Vec<f64> = perm.iter().map(|&j| x[j]).collect();
            prop_assert_eq!(f.predict(x), g.predict(&px));
        }
    }

    #[test]
    fn knn_with_all_points_votes_majority(rows in labeled_rows(2), q in prop::collection::vec(-10.0f64..10.0, 2)) {
        let data = dataset(&rows);
        let n = data.len();
        let pos = data.y.iter().filter(|&&y| y == 1).count();
        let params = KnnParams { k: n, weights: Weights::Uniform, metric: Metric::Euclidean };
        let want = u8::from(2 * pos > n);
        prop_assert_eq!(knn_predict(&data, &params, &q).unwrap().label, want);
    }

    #[test]
    fn learners_are_deterministic(rows in labeled_rows(3), seed in any::<u64>()) {
        let data = dataset(&rows);
        let fp = ForestParams { n_estimators: 10, max_depth: 3, min_samples_leaf: 2, min_samples_split: 2, seed };
        prop_assert_eq!(forest_train(&data, &fp).unwrap(), forest_train(&data, &fp).unwrap());
        let sp = SvmParams::new(Kernel::Poly, 1.0, 0.3, 2);
        prop_assert_eq!(svm_train(&data, &sp).unwrap(), svm_train(&data, &sp).unwrap());
    }
}

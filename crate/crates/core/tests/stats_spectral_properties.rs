use proptest::prelude::*;

use musicpref::corpus::{EegEpoch, PreferenceLabel};
use musicpref::spectral::{extract_all, RegionName, RegionSpec, SpectralConfig};
use musicpref::stats::{bin_edges, mann_whitney_u, median_trend, Alternative};

fn sample() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![(-50i32..50).prop_map(f64::from), -50.0f64..50.0], 1..25)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn u_statistics_are_dual(a in sample(), b in sample()) {
        let ab = mann_whitney_u(&a, &b, Alternative::TwoSided, 0.05).unwrap();
        let ba = mann_whitney_u(&b, &a, Alternative::TwoSided, 0.05).unwrap();
        prop_assert!((ab.u_statistic + ba.u_statistic - (a.len() * b.len()) as f64).abs() < 1e-9);
        prop_assert!((ab.p_value - ba.p_value).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&ab.p_value));
    }

    #[test]
    fn monotone_transform_leaves_test_unchanged(a in sample(), b in sample(), k in 0.1f64..3.0) {
        let f = |v: &f64| (k * v).atan() * 7.0 + 3.0;
        let ta: Vec<f64> = a.iter().map(f).collect();
        let tb: Vec<f64> = b.iter().map(f).collect();
        let before = mann_whitney_u(&a, &b, Alternative::TwoSided, 0.05).unwrap();
        let after = mann_whitney_u(&ta, &tb, Alternative::TwoSided, 0.05).unwrap();
        prop_assert_eq!(before.u_statistic, after.u_statistic);
        prop_assert!((before.p_value - after.p_value).abs() < 1e-12);
    }

    #[test]
    fn trend_bins_tile_the_familiarity_range(n_bins in 2usize..12, fam in prop::collection::vec(-1.0f64..=1.0, 4..40)) {
        let edges = bin_edges(n_bins);
        prop_assert_eq!(edges[0], -1.0);
        prop_assert!((edges[n_bins] - 1.0).abs() < 1e-12);
        let labels: Vec<PreferenceLabel> = (0..fam.len())
            .map(|i| if i % 2 == 0 { PreferenceLabel::Favored } else { PreferenceLabel::NonFavored })
            .collect();
        let rate: Vec<f64> = (0..fam.len()).map(|i| 0.1 + i as f64 * 0.01).collect();
        let bins = median_trend(&fam, &rate, &labels, n_bins, 0.05).unwrap();
        prop_assert_eq!(bins.len(), n_bins);
        for w in bins.windows(2) {
            prop_assert_eq!(w[0].hi, w[1].lo);
        }
        let counted: usize = bins.iter().map(|b| b.favored.n + b.non_favored.n).sum();
        prop_assert_eq!(counted, fam.len());
    }
}

fn frontal_right_epoch(seed: u64, order: &[usize]) -> EegEpoch {
    let spec = RegionSpec::of(RegionName::FrontalRight);
    let fs = 200.0;
    let data: Vec<Vec<f64>> = (0..spec.channels.len())
        .map(|c| {
            (0..2000)
                .map(|i| {
                    let t = i as f64 / fs;
                    (2.0 * std::f64::consts::PI * (5.0 + c as f64 * 2.0) * t).sin()
                        + ((i as u64 * 2654435761 + seed * 97 + c as u64 * 31) % 1000) as f64 / 500.0
                })
                .collect()
        })
        .collect();
    EegEpoch {
        channel_names: order.iter().map(|&i| spec.channels[i].clone()).collect(),
        sample_rate: fs,
        data: order.iter().map(|&i| data[i].clone()).collect(),
        eog_indices: vec![],
    }
}

#[test]
fn region_mean_ignores_channel_order() {
    let n = RegionSpec::of(RegionName::FrontalRight).channels.len();
    let forward: Vec<usize> = (0..n).collect();
    let backward: Vec<usize> = (0..n).rev().collect();
    let cfg = SpectralConfig::default();
    let a = extract_all(&frontal_right_epoch(1, &forward), 1.0, &cfg).unwrap();
    let b = extract_all(&frontal_right_epoch(1, &backward), 1.0, &cfg).unwrap();
    let (ma, mb) = (a.region_mean[&RegionName::FrontalRight], b.region_mean[&RegionName::FrontalRight]);
    for (x, y) in ma.0.iter().zip(&mb.0) {
        assert!((x - y).abs() < 1e-12);
    }
}

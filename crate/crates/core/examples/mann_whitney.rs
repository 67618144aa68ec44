//! Mann-Whitney U on small and large samples, and the familiarity trend.

use musicpref::corpus::PreferenceLabel;
use musicpref::stats::{mann_whitney_u, mann_whitney_u_with, median_trend, Alternative, Method};

fn main() {
    let r = mann_whitney_u(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], Alternative::TwoSided, 0.05).unwrap();
    println!("U = {}, p = {:.4} ({:?})", r.u_statistic, r.p_value, r.method);

    let a = [1.1, 2.4, 3.0, 4.2, 5.5, 6.1];
    let b = [3.3, 4.8, 6.6, 7.0, 8.2, 9.9];
    for method in [Method::Exact, Method::NormalApprox] {
        let r = mann_whitney_u_with(&a, &b, Alternative::TwoSided, 0.05, method).unwrap();
        println!("{method:?}: p = {:.4}", r.p_value);
    }

    // ties force the normal approximation
    let fav = [0.2, 0.2, 0.25, 0.3, 0.3, 0.31, 0.4, 0.2, 0.22, 0.3, 0.28, 0.26, 0.2];
    let non = [0.5, 0.45, 0.5, 0.6, 0.41, 0.52, 0.5, 0.47, 0.55, 0.6, 0.5, 0.49, 0.44];
    let r = mann_whitney_u(&fav, &non, Alternative::TwoSided, 0.05).unwrap();
    println!("response rates: U = {}, p = {:.2e}, significant {}", r.u_statistic, r.p_value, r.significant);

    let familiarity: Vec<f64> = (0..26).map(|i| -1.0 + 2.0 * i as f64 / 25.0).collect();
    let rate: Vec<f64> = fav.iter().chain(&non).copied().collect();
    let labels: Vec<PreferenceLabel> = (0..26)
        .map(|i| if i % 2 == 0 { PreferenceLabel::Favored } else { PreferenceLabel::NonFavored })
        .collect();
    for bin in median_trend(&familiarity, &rate, &labels, 4, 0.05).unwrap() {
        println!(
            "[{:+.1}, {:+.1}] favored {:?} non-favored {:?}{}",
            bin.lo,
            bin.hi,
            bin.favored.reported(),
            bin.non_favored.reported(),
            bin.test.map_or(String::new(), |t| format!(" p = {:.3}", t.p_value))
        );
    }
}

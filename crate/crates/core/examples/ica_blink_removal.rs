//! Separates a blink from background activity with FastICA and removes
//! the component that tracks the vertical EOG.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use musicpref::corpus::EegEpoch;
use musicpref::dsp::{fastica, remove_ocular_components};
use musicpref::numeric::{pearson, rms};

fn main() {
    let fs = 200.0;
    let n = 8000;
    let mut rng = ChaCha8Rng::seed_from_u64(3);

    let blink: Vec<f64> = (0..n)
        .map(|i| {
            let phase = (i % 600) as f64;
            if phase < 80.0 { 50.0 * (1.0 - (2.0 * PI * phase / 80.0).cos()) } else { 0.0 }
        })
        .collect();
    let sources: Vec<Vec<f64>> = [7.0, 10.5, 18.0, 23.0]
        .iter()
        .map(|&f| (0..n).map(|i| 10.0 * (2.0 * PI * f * i as f64 / fs).sin()).collect())
        .collect();

    let names = ["Fp1", "Fp2", "F3", "O1", "O2", "VEOG", "HEOG"];
    let weights = [1.0, 1.0, 0.5, 0.0, 0.0];
    let mut data: Vec<Vec<f64>> = weights
        .iter()
        .map(|&w| {
            let mix: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            (0..n)
                .map(|t| w * blink[t] + (0..4).map(|k| mix[k] * sources[k][t]).sum::<f64>())
                .collect()
        })
        .collect();
    data.push((0..n).map(|t| blink[t] + rng.gen_range(-2.0..2.0)).collect());
    data.push((0..n).map(|_| rng.gen_range(-5.0..5.0)).collect());

    let epoch = EegEpoch {
        channel_names: names.iter().map(|s| s.to_string()).collect(),
        sample_rate: fs,
        data,
        eog_indices: vec![5, 6],
    };
    let ica = fastica(&epoch, 5, 0).expect("FastICA converges on this mixture");
    println!("converged after {} iterations", ica.iterations);

    let (clean, report) = remove_ocular_components(&epoch, &ica, 0.6);
    println!("removed components {:?}", report.removed);
    for c in [0, 1, 3] {
        println!(
            "{:>4}: |r| with VEOG {:.3} -> {:.3}, rms {:.2} -> {:.2}",
            names[c],
            pearson(&epoch.data[c], &epoch.data[5]).abs(),
            pearson(&clean.data[c], &clean.data[5]).abs(),
            rms(&epoch.data[c]),
            rms(&clean.data[c]),
        );
    }
}

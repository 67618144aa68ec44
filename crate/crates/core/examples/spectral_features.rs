//! Welch PSD, band powers and relative band features for a region.

use std::f64::consts::PI;

use musicpref::corpus::EegEpoch;
use musicpref::spectral::{
    band_powers, extract_features, normalize_bands, welch_psd, Band, RegionName, RegionSpec,
    SpectralConfig,
};

fn main() {
    let fs = 300.0;
    let x: Vec<f64> = (0..(30.0 * fs) as usize)
        .map(|i| {
            let t = i as f64 / fs;
            2.0 * (2.0 * PI * 10.0 * t).sin() + (2.0 * PI * 5.5 * t).sin() + 0.5 * (2.0 * PI * 20.0 * t).sin()
        })
        .collect();
    let psd = welch_psd(&x, fs, 4.0, 0.5).unwrap();
    println!("{} bins at {:.2} Hz", psd.frequencies.len(), psd.resolution());
    let abs = band_powers(&psd).unwrap();
    let rel = normalize_bands(abs).unwrap();
    for band in Band::ALL {
        println!("{:>6}: absolute {:.3}, relative {:.3}", band.as_str(), abs.get(band), rel.get(band));
    }

    // Frontal_Right epoch: 5 s silent baseline, then alpha grows with channel index
    let region = RegionSpec::of(RegionName::FrontalRight);
    let data: Vec<Vec<f64>> = (0..region.channels.len())
        .map(|c| {
            (0..(25.0 * fs) as usize)
                .map(|i| {
                    let t = i as f64 / fs;
                    (1.0 + c as f64 * 0.2) * (2.0 * PI * 10.0 * t).sin() + (2.0 * PI * 21.0 * t).sin()
                })
                .collect()
        })
        .collect();
    let epoch = EegEpoch {
        channel_names: region.channels.clone(),
        sample_rate: fs,
        data,
        eog_indices: vec![],
    };
    let features = extract_features(&epoch, &region, 5.0, &SpectralConfig::default()).unwrap();
    for ch in features.per_channel.iter().take(3) {
        println!("{:>4}: {:?}", ch.channel, ch.powers.0);
    }
    println!("region mean {:?}", features.region_mean[&RegionName::FrontalRight].0);
}

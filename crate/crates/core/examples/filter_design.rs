//! Designs the preprocessing filters and shows their responses.
//!
//! Run with `cargo run --example filter_design`.

use std::f64::consts::PI;

use musicpref::dsp::{design_butterworth, design_notch, filtfilt, FilterKind};

fn main() {
    let fs = 1200.0;
    let hp = design_butterworth(5, FilterKind::HighPass, &[0.1], fs).unwrap();
    let bp = design_butterworth(4, FilterKind::BandPass, &[2.0, 45.0], fs).unwrap();
    let notch = design_notch(50.0, 30.0, fs).unwrap();
    println!("sections: high-pass {}, band-pass {}, notch {}", hp.sections.len(), bp.sections.len(), notch.sections.len());

    println!("{:>8} {:>10} {:>10} {:>10}", "Hz", "hp dB", "bp dB", "notch dB");
    for f in [0.01, 0.1, 1.0, 2.0, 10.0, 45.0, 49.0, 50.0, 51.0, 100.0] {
        println!(
            "{f:>8.2} {:>10.2} {:>10.2} {:>10.2}",
            hp.magnitude_db(f, fs),
            bp.magnitude_db(f, fs),
            notch.magnitude_db(f, fs)
        );
    }

    // 10 Hz tone riding on a DC offset and mains hum
    let n = 6000;
    let x: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / fs;
            100.0 + (2.0 * PI * 10.0 * t).sin() + 0.5 * (2.0 * PI * 50.0 * t).sin()
        })
        .collect();
    let y = filtfilt(&hp, &filtfilt(&notch, &x).unwrap()).unwrap();
    let y = filtfilt(&bp, &y).unwrap();
    let mid = &y[n / 10..n - n / 10];
    let peak = mid.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mean = mid.iter().sum::<f64>() / mid.len() as f64;
    println!("after the chain: 10 Hz peak {peak:.3}, mean {mean:.2e}");
}

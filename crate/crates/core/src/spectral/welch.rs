use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::SpectralError;

/// One-sided power spectral density.
#[derive(Debug, Clone, PartialEq)]
pub struct Psd {
    pub frequencies: Vec<f64>,
    /// Power per Hz.
    pub density: Vec<f64>,
}

impl Psd {
    pub fn resolution(&self) -> f64 {
        self.frequencies.get(1).copied().unwrap_or(0.0)
    }

    /// Trapezoidal integral of the density over `[lo, hi]`, interpolating
    /// linearly where the limits fall between grid points.
    pub fn integrate(&self, lo: f64, hi: f64) -> f64 {
        let f = &self.frequencies;
        let d = &self.density;
        let interp = |x: f64| -> f64 {
            let i = f.partition_point(|&v| v <= x).clamp(1, f.len() - 1);
            let (f0, f1) = (f[i - 1], f[i]);
            let t = (x - f0) / (f1 - f0);
            d[i - 1] + t * (d[i] - d[i - 1])
        };
        let mut xs = vec![lo];
        xs.extend(f.iter().copied().filter(|&v| v > lo && v < hi));
        xs.push(hi);
        xs.windows(2)
            .map(|w| 0.5 * (interp(w[0]) + interp(w[1])) * (w[1] - w[0]))
            .sum()
    }
}

/// Hann-windowed, mean-detrended, averaged periodogram with density scaling.
///
/// Holds the FFT plan so repeated calls at one segment length stay cheap.
pub struct Welch {
    sample_rate: f64,
    segment: usize,
    step: usize,
    window: Vec<f64>,
    scale: f64,
    fft: Arc<dyn Fft<f64>>,
}

impl Welch {
    pub fn new(sample_rate: f64, window_s: f64, overlap: f64) -> Result<Self, SpectralError> {
        if !(0.0..1.0).contains(&overlap) {
            return Err(SpectralError::InvalidOverlap(overlap));
        }
        let segment = (window_s * sample_rate).round() as usize;
        if segment < 2 {
            return Err(SpectralError::SignalTooShort {
                len: segment,
                needed: 2,
            });
        }
        let overlap_n = (overlap * segment as f64).floor() as usize;
        let step = (segment - overlap_n).max(1);
        // periodic Hann
        let window: Vec<f64> = (0..segment)
            .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / segment as f64).cos())
            .collect();
        let scale = 1.0 / (sample_rate * window.iter().map(|w| w * w).sum::<f64>());
        let fft = FftPlanner::new().plan_fft_forward(segment);
        Ok(Welch {
            sample_rate,
            segment,
            step,
            window,
            scale,
            fft,
        })
    }

    pub fn segment_len(&self) -> usize {
        self.segment
    }

    pub fn estimate(&self, signal: &[f64]) -> Result<Psd, SpectralError> {
        let n = self.segment;
        if signal.len() < n {
            return Err(SpectralError::SignalTooShort {
                len: signal.len(),
                needed: n,
            });
        }
        let bins = n / 2 + 1;
        let mut acc = vec![0.0; bins];
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.fft.get_inplace_scratch_len()];
        let mut count = 0usize;
        let mut start = 0;
        while start + n <= signal.len() {
            let seg = &signal[start..start + n];
            let m = seg.iter().sum::<f64>() / n as f64;
            for ((b, &x), &w) in buf.iter_mut().zip(seg).zip(&self.window) {
                *b = Complex64::new((x - m) * w, 0.0);
            }
            self.fft.process_with_scratch(&mut buf, &mut scratch);
            for (a, c) in acc.iter_mut().zip(&buf) {
                *a += c.norm_sqr();
            }
            count += 1;
            start += self.step;
        }
        let norm = self.scale / count as f64;
        let nyquist_bin = if n % 2 == 0 { Some(bins - 1) } else { None };
        let density = acc
            .iter()
            .enumerate()
            .map(|(k, &p)| {
                let one_sided = if k == 0 || Some(k) == nyquist_bin { 1.0 } else { 2.0 };
                p * norm * one_sided
            })
            .collect();
        let frequencies = (0..bins)
            .map(|k| k as f64 * self.sample_rate / n as f64)
            .collect();
        Ok(Psd {
            frequencies,
            density,
        })
    }
}

pub fn welch_psd(
    signal: &[f64],
    sample_rate: f64,
    window_s: f64,
    overlap: f64,
) -> Result<Psd, SpectralError> {
    Welch::new(sample_rate, window_s, overlap)?.estimate(signal)
}

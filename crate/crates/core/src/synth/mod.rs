//! Deterministic synthetic sessions with known effects, written in the
//! canonical corpus format.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson, StandardNormal};
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::epoch_file::write_epoch;
use crate::corpus::{
    epoch_relpath, import_corpus, write_trials, BehaviorRecord, Corpus, CorpusError, EegEpoch,
    Manifest, MusicType, PassThrough, PreferenceLabel, TrialRecord,
};
use crate::numeric::derive_seed;
use crate::spectral::{Band, RegionName, RegionSpec};

/// Label counts of a 20 × 22 session: favored, non-favored, undecided.
pub const REFERENCE_COUNTS: [usize; 3] = [81, 271, 88];
pub const STIMULUS_SECONDS: [f64; 2] = [19.0, 66.0];
pub const BLINK_SECONDS: f64 = 0.4;
pub const BLINK_UV: f64 = 100.0;
/// RMS of the 1/f background on EEG channels, µV.
pub const BACKGROUND_UV: f64 = 8.0;
/// Burst amplitudes for theta, alpha and beta, µV.
pub const BURST_UV: [f64; 3] = [5.0, 6.0, 2.5];

const FAMILIARITY_MEDIAN: f64 = -0.2;
const FAMILIARITY_SD: f64 = 0.35;
const ASSESSMENT_MEDIAN_S: f64 = 6.0;
const ASSESSMENT_LOG_SD: f64 = 0.35;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid effect: {0}")]
    InvalidEffect(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
}

fn default_rate() -> f64 {
    1200.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EffectSpec {
    pub region: RegionName,
    pub band: Band,
    /// Favored / non-favored band power in the target region.
    pub power_ratio: f64,
    /// Favored minus non-favored familiarity median.
    pub fam_shift: f64,
    /// Favored / non-favored response-rate median.
    pub resr_ratio: f64,
    /// Blinks per minute.
    pub blink_rate: f64,
    pub seed: u64,
    #[serde(default = "default_rate")]
    pub sample_rate_hz: f64,
}

impl EffectSpec {
    pub fn null(seed: u64) -> Self {
        EffectSpec {
            region: RegionName::FrontalRight,
            band: Band::Alpha,
            power_ratio: 1.0,
            fam_shift: 0.0,
            resr_ratio: 1.0,
            blink_rate: 0.0,
            seed,
            sample_rate_hz: default_rate(),
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: &str| Err(SynthError::InvalidEffect(m.into()));
        if !(self.power_ratio > 0.0) || !self.power_ratio.is_finite() {
            return bad("power_ratio must be positive");
        }
        if !(self.resr_ratio > 0.0) || !self.resr_ratio.is_finite() {
            return bad("resr_ratio must be positive");
        }
        if !(self.blink_rate >= 0.0) || !self.blink_rate.is_finite() {
            return bad("blink_rate must be non-negative");
        }
        if !self.fam_shift.is_finite() {
            return bad("fam_shift must be finite");
        }
        // bursts reach 29.5 Hz and the chain band-passes to 45 Hz
        if !(self.sample_rate_hz >= 100.0) {
            return bad("sample_rate_hz must be at least 100");
        }
        Ok(())
    }

    /// Multiplier on a label's power in the target region and band.
    fn power_gain(&self, label: PreferenceLabel) -> f64 {
        match label {
            PreferenceLabel::Favored => self.power_ratio,
            PreferenceLabel::Undecided => self.power_ratio.sqrt(),
            PreferenceLabel::NonFavored => 1.0,
        }
    }
}

/// Favored, non-favored and undecided item counts for `n_items`, scaled from
/// [`REFERENCE_COUNTS`].
pub fn label_counts(n_items: usize) -> [usize; 3] {
    let total: usize = REFERENCE_COUNTS.iter().sum();
    let f = (n_items * REFERENCE_COUNTS[0] + total / 2) / total;
    let u = (n_items * REFERENCE_COUNTS[2] + total / 2) / total;
    [f, n_items - f - u, u]
}

/// Trials, manifest and stimulus durations of a synthetic session. Epochs
/// are produced on demand by [`SynthPlan::epoch`].
#[derive(Debug, Clone)]
pub struct SynthPlan {
    pub effect: EffectSpec,
    pub manifest: Manifest,
    pub trials: Vec<TrialRecord>,
    /// Stimulus seconds per music id.
    pub durations: BTreeMap<String, f64>,
}

fn participant_id(p: usize) -> String {
    format!("P{:02}", p + 1)
}

fn music_id(m: usize) -> String {
    format!("M{:02}", m + 1)
}

pub fn plan(n_participants: usize, n_music: usize, effect: &EffectSpec) -> Result<SynthPlan, SynthError> {
    effect.validate()?;
    if n_participants == 0 || n_music == 0 {
        return Err(SynthError::InvalidEffect("sizes must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(effect.seed, &[0]));
    let durations: BTreeMap<String, f64> = (0..n_music)
        .map(|m| {
            let d = rng.gen_range(STIMULUS_SECONDS[0]..=STIMULUS_SECONDS[1]);
            // millisecond grid keeps the CSV and sample counts exact
            (music_id(m), (d * 1000.0).round() / 1000.0)
        })
        .collect();

    let n_items = n_participants * n_music;
    let [nf, _, nu] = label_counts(n_items);
    let mut items: Vec<usize> = (0..n_items).collect();
    items.shuffle(&mut rng);
    let mut labels = vec![PreferenceLabel::NonFavored; n_items];
    for (rank, &it) in items.iter().enumerate() {
        if rank < nf {
            labels[it] = PreferenceLabel::Favored;
        } else if rank < nf + nu {
            labels[it] = PreferenceLabel::Undecided;
        }
    }

    let fam_noise = Normal::new(0.0, FAMILIARITY_SD).unwrap();
    let mut trials = Vec::with_capacity(2 * n_items);
    for p in 0..n_participants {
        for m in 0..n_music {
            let item = p * n_music + m;
            let label = labels[item];
            let (hm, hs) = match label {
                PreferenceLabel::Favored => (true, true),
                PreferenceLabel::NonFavored => (false, false),
                PreferenceLabel::Undecided => {
                    let melody = rng.gen_bool(0.5);
                    (melody, !melody)
                }
            };
            let (fam_center, rate_gain) = match label {
                PreferenceLabel::Favored => (FAMILIARITY_MEDIAN + effect.fam_shift, effect.resr_ratio),
                PreferenceLabel::Undecided => (
                    FAMILIARITY_MEDIAN + effect.fam_shift / 2.0,
                    effect.resr_ratio.sqrt(),
                ),
                PreferenceLabel::NonFavored => (FAMILIARITY_MEDIAN, 1.0),
            };
            for music_type in MusicType::ALL {
                let fam = (fam_center + fam_noise.sample(&mut rng)).clamp(-1.0, 1.0);
                let fam = (fam * 1000.0).round() / 1000.0;
                let z: f64 = StandardNormal.sample(&mut rng);
                let time = (ASSESSMENT_MEDIAN_S / rate_gain * (ASSESSMENT_LOG_SD * z).exp()).max(0.5);
                let time = (time * 1000.0).round() / 1000.0;
                let (pid, mid) = (participant_id(p), music_id(m));
                trials.push(TrialRecord {
                    eeg_path: epoch_relpath(&pid, &mid, music_type),
                    participant_id: pid,
                    music_id: mid,
                    music_type,
                    behavior: BehaviorRecord::new(fam, time, hm, hs)?,
                    label,
                    extra: PassThrough {
                        valence: rng.gen_range(1..=9).to_string(),
                        arousal: rng.gen_range(1..=9).to_string(),
                        star: rng.gen_range(1..=5).to_string(),
                    },
                });
            }
        }
    }
    let mut manifest = Manifest::standard("synthetic", effect.sample_rate_hz);
    manifest.dataset_name = format!("synthetic-{}", effect.seed);
    Ok(SynthPlan {
        effect: effect.clone(),
        manifest,
        trials,
        durations,
    })
}

/// Smallest 2^a·3^b·5^c at or above `n`.
fn smooth_len(n: usize) -> usize {
    let mut best = n.next_power_of_two();
    let mut p5 = 1;
    while p5 < best {
        let mut p35 = p5;
        while p35 < best {
            let mut m = p35;
            while m < n {
                m *= 2;
            }
            best = best.min(m);
            p35 *= 3;
        }
        p5 *= 5;
    }
    best
}

/// Two independent 1/f-shaped noise signals (power ∝ 1/f) with the given
/// RMS, taken from the real and imaginary parts of one inverse FFT.
pub fn pink_noise_pair(
    rng: &mut impl Rng,
    n: usize,
    rms: f64,
    planner: &mut FftPlanner<f64>,
) -> [Vec<f64>; 2] {
    let len = smooth_len(n.max(2));
    let mut spec = vec![Complex::new(0.0, 0.0); len];
    for (k, c) in spec.iter_mut().enumerate().skip(1) {
        let a = 1.0 / (k.min(len - k) as f64).sqrt();
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        *c = Complex::new(a * re, a * im);
    }
    planner.plan_fft_inverse(len).process(&mut spec);
    let scale = |mut x: Vec<f64>| {
        let r = crate::numeric::rms(&x);
        if r > 0.0 {
            x.iter_mut().for_each(|v| *v *= rms / r);
        }
        x
    };
    [
        scale(spec[..n].iter().map(|c| c.re).collect()),
        scale(spec[..n].iter().map(|c| c.im).collect()),
    ]
}

/// Hann-windowed sinusoidal bursts with frequencies inside `band`, tiling the
/// signal with short gaps. Bursts starting at or after `gain_from` are scaled
/// by `gain` in amplitude. Returns the signal and its envelope (amplitude 1).
pub fn burst_train(
    rng: &mut impl Rng,
    n: usize,
    fs: f64,
    band: Band,
    amplitude: f64,
    gain_from: usize,
    gain: f64,
) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut env = vec![0.0; n];
    add_bursts(rng, &mut x, Some(&mut env), fs, band, amplitude, gain_from, gain);
    (x, env)
}

#[allow(clippy::too_many_arguments)]
fn add_bursts(
    rng: &mut impl Rng,
    x: &mut [f64],
    mut env: Option<&mut [f64]>,
    fs: f64,
    band: Band,
    amplitude: f64,
    gain_from: usize,
    gain: f64,
) {
    let n = x.len();
    let def = band.definition();
    let mut t = rng.gen_range(0..((0.5 * fs) as usize).max(1));
    while t < n {
        let len = ((rng.gen_range(0.5..1.5)) * fs) as usize;
        let gap = ((rng.gen_range(0.1..0.6)) * fs) as usize;
        let f = rng.gen_range(def.lo + 0.5..def.hi - 0.5);
        let phase = rng.gen_range(0.0..2.0 * PI);
        let a = if t >= gain_from { amplitude * gain } else { amplitude };
        let end = (t + len).min(n);
        // window and carrier as unit phasors, four interleaved so the
        // recurrences run independently
        let dw = 2.0 * PI / (len - 1) as f64;
        let dc = 2.0 * PI * f / fs;
        let mut win: [Complex<f64>; 4] = std::array::from_fn(|r| Complex::from_polar(1.0, dw * r as f64));
        let mut osc: [Complex<f64>; 4] =
            std::array::from_fn(|r| Complex::from_polar(1.0, phase + dc * r as f64));
        let win_step = Complex::from_polar(1.0, 4.0 * dw);
        let osc_step = Complex::from_polar(1.0, 4.0 * dc);
        let half = 0.5 * a;
        let mut chunks = x[t..end].chunks_exact_mut(4);
        for c in &mut chunks {
            for q in 0..4 {
                c[q] += half * (1.0 - win[q].re) * osc[q].im;
                win[q] *= win_step;
                osc[q] *= osc_step;
            }
        }
        for (q, v) in chunks.into_remainder().iter_mut().enumerate() {
            *v += half * (1.0 - win[q].re) * osc[q].im;
        }
        if let Some(e) = env.as_deref_mut() {
            for (k, v) in e[t..end].iter_mut().enumerate() {
                *v = 0.5 * (1.0 - (dw * k as f64).cos()) * a / amplitude;
            }
        }
        t = end + gap;
    }
}

/// Blink weight of a channel: EOG and the most anterior rows carry the most.
pub fn blink_weight(channel: &str) -> f64 {
    match channel {
        "VEOG" => 1.0,
        "HEOG" => 0.15,
        c if c.starts_with("Fp") => 0.5,
        c if c.starts_with("AF") => 0.3,
        c if c.starts_with("FT") || c.starts_with("FC") => 0.05,
        c if c.starts_with('F') => 0.15,
        _ => 0.0,
    }
}

/// Raised-cosine blink pulses at random times; `None` when the rate is 0.
pub fn blink_train(rng: &mut impl Rng, n: usize, fs: f64, per_minute: f64) -> Option<Vec<f64>> {
    let expected = per_minute * n as f64 / fs / 60.0;
    if expected <= 0.0 {
        return None;
    }
    let count = Poisson::new(expected).unwrap().sample(rng) as usize;
    let width = (BLINK_SECONDS * fs) as usize;
    let mut x = vec![0.0; n];
    for _ in 0..count {
        let start = rng.gen_range(0..n.saturating_sub(width).max(1));
        for j in 0..width.min(n - start) {
            x[start + j] += BLINK_UV * 0.5 * (1.0 - (2.0 * PI * j as f64 / width as f64).cos());
        }
    }
    Some(x)
}

impl SynthPlan {
    pub fn onset_s(&self) -> f64 {
        self.manifest.baseline_s
    }

    pub fn n_samples(&self, trial: &TrialRecord) -> usize {
        let d = self.durations[&trial.music_id] + self.manifest.baseline_s;
        (d * self.manifest.sample_rate_hz).round() as usize
    }

    /// The epoch of trial `index`, identical on every call.
    pub fn epoch(&self, index: usize) -> EegEpoch {
        let trial = &self.trials[index];
        let fs = self.manifest.sample_rate_hz;
        let n = self.n_samples(trial);
        let onset = (self.manifest.baseline_s * fs).round() as usize;
        let seed = derive_seed(self.effect.seed, &[1, index as u64]);
        let target: Vec<String> = RegionSpec::of(self.effect.region).channels;
        let gain = self.effect.power_gain(trial.label).sqrt();
        let channels = self.manifest.epoch_channels();
        let n_eeg = self.manifest.channel_layout.len();

        let blinks = blink_train(&mut ChaCha8Rng::seed_from_u64(derive_seed(seed, &[0])), n, fs, self.effect.blink_rate);
        let mut planner = FftPlanner::new();
        let background: Vec<Vec<f64>> = (0..channels.len().div_ceil(2))
            .flat_map(|pair| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[2, pair as u64]));
                pink_noise_pair(&mut rng, n, BACKGROUND_UV, &mut planner)
            })
            .collect();
        let data: Vec<Vec<f64>> = channels
            .iter()
            .zip(background)
            .enumerate()
            .map(|(c, (name, mut x))| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[3, c as u64]));
                if c >= n_eeg {
                    x.iter_mut().for_each(|v| *v *= 0.5);
                } else {
                    for (b, band) in Band::ALL.into_iter().enumerate() {
                        let g = if band == self.effect.band && target.contains(name) { gain } else { 1.0 };
                        add_bursts(&mut rng, &mut x, None, fs, band, BURST_UV[b], onset, g);
                    }
                }
                if let Some(bl) = &blinks {
                    let w = blink_weight(name);
                    if w > 0.0 {
                        x.iter_mut().zip(bl).for_each(|(v, s)| *v += w * s);
                    }
                }
                // the epoch format stores f32
                x.iter().map(|&v| v as f32 as f64).collect()
            })
            .collect();
        EegEpoch {
            channel_names: channels,
            sample_rate: fs,
            data,
            eog_indices: (n_eeg..n_eeg + self.manifest.eog_channels.len()).collect(),
        }
    }
}

/// Writes `manifest.json`, `trials.csv` and every epoch under `out_dir`, then
/// re-imports the result.
pub fn write_corpus(plan: &SynthPlan, out_dir: &Path) -> Result<Corpus, SynthError> {
    let eeg = out_dir.join("eeg");
    std::fs::create_dir_all(&eeg).map_err(|e| SynthError::Io(eeg.display().to_string(), e))?;
    plan.manifest.write(&out_dir.join("manifest.json"))?;
    write_trials(&out_dir.join("trials.csv"), &plan.trials)?;
    (0..plan.trials.len())
        .into_par_iter()
        .try_for_each(|i| write_epoch(&out_dir.join(&plan.trials[i].eeg_path), &plan.epoch(i)))?;
    Ok(import_corpus(out_dir, &out_dir.join("manifest.json"))?)
}

pub fn generate_corpus(
    n_participants: usize,
    n_music: usize,
    effect: &EffectSpec,
    out_dir: &Path,
) -> Result<Corpus, SynthError> {
    write_corpus(&plan(n_participants, n_music, effect)?, out_dir)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::label_census;
    use crate::numeric::pearson;
    use crate::spectral::welch_psd;

    #[test]
    fn reference_counts_exact() {
        assert_eq!(label_counts(440), [81, 271, 88]);
        let p = plan(20, 22, &EffectSpec::null(1)).unwrap();
        let c = label_census(&p.trials);
        assert_eq!(c.items_of(PreferenceLabel::Favored), 81);
        assert_eq!(c.items_of(PreferenceLabel::NonFavored), 271);
        assert_eq!(c.items_of(PreferenceLabel::Undecided), 88);
        assert_eq!(c.trials_of(MusicType::Song, PreferenceLabel::Favored), 81);
        assert!(p.durations.values().all(|d| (19.0..=66.0).contains(d)));
    }

    #[test]
    fn epochs_are_reproducible_and_valid() {
        let mut e = EffectSpec::null(3);
        e.sample_rate_hz = 200.0;
        e.blink_rate = 12.0;
        let p = plan(1, 2, &e).unwrap();
        let a = p.epoch(1);
        assert_eq!(a, plan(1, 2, &e).unwrap().epoch(1));
        a.validate().unwrap();
        assert_eq!(a.n_channels(), 64);
        assert_eq!(a.n_samples(), p.n_samples(&p.trials[1]));
    }

    #[test]
    fn alpha_burst_amplitude_recovered() {
        let fs = 300.0;
        let n = 60 * 300;
        let amp = 6.0;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (x, env) = burst_train(&mut rng, n, fs, Band::Alpha, amp, 0, 1.0);
        let psd = welch_psd(&x, fs, 4.0, 0.5).unwrap();
        let p_alpha = psd.integrate(8.0, 13.0);
        let env2 = env.iter().map(|w| w * w).sum::<f64>() / n as f64;
        let recovered = (2.0 * p_alpha / env2).sqrt();
        assert!((recovered / amp - 1.0).abs() < 0.1, "{recovered}");
    }

    #[test]
    fn pink_spectrum_slope() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let [x, y] = pink_noise_pair(&mut rng, 60_000, 1.0, &mut FftPlanner::new());
        for s in [&x, &y] {
            let psd = welch_psd(s, 256.0, 8.0, 0.5).unwrap();
            // equal-ratio bands carry equal power under 1/f
            let lo = psd.integrate(4.0, 8.0);
            let hi = psd.integrate(32.0, 64.0);
            assert!((lo / hi - 1.0).abs() < 0.15, "{lo} {hi}");
        }
        assert!(pearson(&x, &y).abs() < 0.05);
    }

    #[test]
    fn rejects_bad_effect() {
        let mut e = EffectSpec::null(0);
        e.power_ratio = 0.0;
        assert!(plan(2, 2, &e).is_err());
    }
}

//! Butterworth and notch design as second-order-section cascades, plus
//! zero-phase forward-backward filtering.

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::DspError;

/// One direct-form-II-transposed section, `a[0]` normalized to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 3],
}

impl Biquad {
    /// H(z) evaluated at `z`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let zi = z.inv();
        let zi2 = zi * zi;
        let num = self.b[0] + zi * self.b[1] + zi2 * self.b[2];
        let den = self.a[0] + zi * self.a[1] + zi2 * self.a[2];
        num / den
    }

    fn dc_gain(&self) -> f64 {
        (self.b[0] + self.b[1] + self.b[2]) / (self.a[0] + self.a[1] + self.a[2])
    }

    /// Internal state after an infinitely long unit step.
    fn step_state(&self) -> [f64; 2] {
        let g = self.dc_gain();
        let s2 = self.b[2] - self.a[2] * g;
        let s1 = self.b[1] - self.a[1] * g + s2;
        [s1, s2]
    }
}

/// Cascade of biquads applied in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sos {
    pub sections: Vec<Biquad>,
}

impl Sos {
    pub fn response(&self, freq_hz: f64, sample_rate: f64) -> Complex64 {
        let z = Complex64::from_polar(1.0, 2.0 * PI * freq_hz / sample_rate);
        self.sections
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, s| acc * s.eval(z))
    }

    pub fn magnitude_db(&self, freq_hz: f64, sample_rate: f64) -> f64 {
        20.0 * self.response(freq_hz, sample_rate).norm().log10()
    }

    /// Padding used by [`filtfilt`] on each side.
    pub fn pad_len(&self) -> usize {
        3 * self.sections.len() * 10
    }

    /// Steady-state initial conditions for a unit step, per section.
    fn step_states(&self) -> Vec<[f64; 2]> {
        let mut scale = 1.0;
        self.sections
            .iter()
            .map(|s| {
                let [a, b] = s.step_state();
                let zi = [a * scale, b * scale];
                scale *= s.dc_gain();
                zi
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FilterKind {
    Notch,
    HighPass,
    LowPass,
    BandPass,
}

/// Declarative filter description, realized with [`FilterSpec::design`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub kind: FilterKind,
    pub order: usize,
    /// One cutoff for high/low-pass, two for band-pass.
    pub cutoffs: Vec<f64>,
    pub notch_freq: f64,
    pub notch_q: f64,
}

impl FilterSpec {
    pub fn notch(freq: f64, q: f64) -> Self {
        FilterSpec {
            kind: FilterKind::Notch,
            order: 2,
            cutoffs: vec![],
            notch_freq: freq,
            notch_q: q,
        }
    }

    pub fn butterworth(kind: FilterKind, order: usize, cutoffs: &[f64]) -> Self {
        FilterSpec {
            kind,
            order,
            cutoffs: cutoffs.to_vec(),
            notch_freq: 0.0,
            notch_q: 0.0,
        }
    }

    pub fn design(&self, sample_rate: f64) -> Result<Sos, DspError> {
        match self.kind {
            FilterKind::Notch => design_notch(self.notch_freq, self.notch_q, sample_rate),
            kind => design_butterworth(self.order, kind, &self.cutoffs, sample_rate),
        }
    }
}

fn check_cutoff(f: f64, sample_rate: f64) -> Result<(), DspError> {
    if f.is_finite() && f > 0.0 && f < sample_rate / 2.0 {
        Ok(())
    } else {
        Err(DspError::InvalidCutoff {
            cutoff: f,
            sample_rate,
        })
    }
}

fn bilinear(s: Complex64, fs2: f64) -> Complex64 {
    (fs2 + s) / (fs2 - s)
}

/// Butterworth high-pass, low-pass or band-pass of the given order.
///
/// Analog prototype poles are transformed with a prewarped bilinear map and
/// grouped into conjugate-pair sections. Every section is scaled to unit
/// gain at the reference frequency (Nyquist, DC or the band center).
pub fn design_butterworth(
    order: usize,
    kind: FilterKind,
    cutoffs: &[f64],
    sample_rate: f64,
) -> Result<Sos, DspError> {
    if order == 0 {
        return Err(DspError::InvalidOrder(order));
    }
    let needed = match kind {
        FilterKind::BandPass => 2,
        FilterKind::HighPass | FilterKind::LowPass => 1,
        FilterKind::Notch => {
            return Err(DspError::InvalidCutoff {
                cutoff: f64::NAN,
                sample_rate,
            })
        }
    };
    if cutoffs.len() != needed {
        return Err(DspError::InvalidCutoff {
            cutoff: cutoffs.first().copied().unwrap_or(f64::NAN),
            sample_rate,
        });
    }
    for &c in cutoffs {
        check_cutoff(c, sample_rate)?;
    }
    if kind == FilterKind::BandPass && cutoffs[0] >= cutoffs[1] {
        return Err(DspError::InvalidCutoff {
            cutoff: cutoffs[1],
            sample_rate,
        });
    }

    let fs2 = 2.0 * sample_rate;
    let warp = |f: f64| fs2 * (PI * f / sample_rate).tan();
    let n = order as f64;
    let prototype: Vec<Complex64> = (0..order)
        .map(|k| Complex64::from_polar(1.0, PI * (2.0 * k as f64 + n + 1.0) / (2.0 * n)))
        .collect();

    let (analog, zero_at, reference) = match kind {
        FilterKind::HighPass => {
            let wc = warp(cutoffs[0]);
            let poles = prototype.iter().map(|&p| wc / p).collect::<Vec<_>>();
            (poles, vec![1.0], Complex64::new(-1.0, 0.0))
        }
        FilterKind::LowPass => {
            let wc = warp(cutoffs[0]);
            let poles = prototype.iter().map(|&p| wc * p).collect::<Vec<_>>();
            (poles, vec![-1.0], Complex64::new(1.0, 0.0))
        }
        FilterKind::BandPass => {
            let (w1, w2) = (warp(cutoffs[0]), warp(cutoffs[1]));
            let bw = w2 - w1;
            let w0 = (w1 * w2).sqrt();
            let mut poles = Vec::with_capacity(2 * order);
            for &p in &prototype {
                let lp = p * (bw / 2.0);
                let disc = (lp * lp - w0 * w0).sqrt();
                poles.push(lp + disc);
                poles.push(lp - disc);
            }
            let center = 2.0 * (w0 / fs2).atan();
            (poles, vec![1.0, -1.0], Complex64::from_polar(1.0, center))
        }
        FilterKind::Notch => unreachable!(),
    };

    let digital: Vec<Complex64> = analog.iter().map(|&p| bilinear(p, fs2)).collect();
    let sections = pair_sections(&digital, &zero_at)
        .into_iter()
        .map(|mut s| {
            let g = s.eval(reference).norm();
            for b in &mut s.b {
                *b /= g;
            }
            s
        })
        .collect();
    Ok(Sos { sections })
}

/// Groups digital poles into sections. Conjugate pairs share a section; real
/// poles are paired with each other, a leftover one forms a first-order
/// section. `zero_at` lists the zero locations cycled across each section.
fn pair_sections(poles: &[Complex64], zero_at: &[f64]) -> Vec<Biquad> {
    let eps = 1e-12;
    let mut upper: Vec<Complex64> = poles.iter().copied().filter(|p| p.im > eps).collect();
    let mut real: Vec<f64> = poles
        .iter()
        .filter(|p| p.im.abs() <= eps)
        .map(|p| p.re)
        .collect();
    // poles nearest the unit circle last
    upper.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
    real.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap());

    let two_zeros = |zs: &[f64]| -> [f64; 3] {
        let (z1, z2) = match zs {
            [z] => (*z, *z),
            [a, b, ..] => (*a, *b),
            [] => unreachable!(),
        };
        [1.0, -(z1 + z2), z1 * z2]
    };

    let mut out = Vec::new();
    for chunk in real.chunks(2) {
        match chunk {
            [p1, p2] => out.push(Biquad {
                b: two_zeros(zero_at),
                a: [1.0, -(p1 + p2), p1 * p2],
            }),
            [p] => {
                // first-order section: one zero, one pole
                let z = zero_at[0];
                out.push(Biquad {
                    b: [1.0, -z, 0.0],
                    a: [1.0, -p, 0.0],
                })
            }
            _ => unreachable!(),
        }
    }
    for p in upper {
        out.push(Biquad {
            b: two_zeros(zero_at),
            a: [1.0, -2.0 * p.re, p.norm_sqr()],
        });
    }
    out
}

/// Second-order IIR notch with zeros on the unit circle at `freq`.
pub fn design_notch(freq: f64, q: f64, sample_rate: f64) -> Result<Sos, DspError> {
    check_cutoff(freq, sample_rate)?;
    if !(q > 0.0) {
        return Err(DspError::InvalidQuality(q));
    }
    let w0 = 2.0 * PI * freq / sample_rate;
    let bw = w0 / q;
    let beta = (bw / 2.0).tan();
    let gain = 1.0 / (1.0 + beta);
    let c = w0.cos();
    Ok(Sos {
        sections: vec![Biquad {
            b: [gain, -2.0 * gain * c, gain],
            a: [1.0, -2.0 * gain * c, 2.0 * gain - 1.0],
        }],
    })
}

/// Runs the cascade over `x` in place, one section at a time.
/// `init` holds per-section states already scaled to the first input sample.
pub fn sosfilt_in_place(sos: &Sos, x: &mut [f64], init: Option<&[[f64; 2]]>) {
    for (i, s) in sos.sections.iter().enumerate() {
        let [b0, b1, b2] = s.b;
        let [_, a1, a2] = s.a;
        let [mut s1, mut s2] = init.map_or([0.0, 0.0], |z| z[i]);
        for v in x.iter_mut() {
            let input = *v;
            let y = b0 * input + s1;
            s1 = b1 * input - a1 * y + s2;
            s2 = b2 * input - a2 * y;
            *v = y;
        }
    }
}

/// Zero-phase filtering: forward pass, then backward pass over the result.
///
/// The signal is extended on both sides by odd reflection of
/// [`Sos::pad_len`] samples and each pass starts from the step steady state
/// scaled to its first sample.
pub fn filtfilt(sos: &Sos, x: &[f64]) -> Result<Vec<f64>, DspError> {
    let pad = sos.pad_len();
    let n = x.len();
    if n <= pad || n < 2 {
        return Err(DspError::SignalTooShort {
            len: n,
            needed: pad + 1,
        });
    }
    let mut ext: Vec<f64> = odd_extend(x, pad).collect();

    let unit = sos.step_states();
    let scaled = |v: f64| unit.iter().map(|z| [z[0] * v, z[1] * v]).collect::<Vec<_>>();

    let zi = scaled(ext[0]);
    sosfilt_in_place(sos, &mut ext, Some(&zi));
    ext.reverse();
    let zi = scaled(ext[0]);
    sosfilt_in_place(sos, &mut ext, Some(&zi));
    ext.reverse();
    Ok(ext[pad..pad + n].to_vec())
}

const LANES: usize = 8;

fn odd_extend(x: &[f64], pad: usize) -> impl Iterator<Item = f64> + '_ {
    let n = x.len();
    let (first, last) = (x[0], x[n - 1]);
    (1..=pad)
        .rev()
        .map(move |i| 2.0 * first - x[i])
        .chain(x.iter().copied())
        .chain((1..=pad).map(move |i| 2.0 * last - x[n - 1 - i]))
}

#[inline(always)]
fn section_lanes_body<'a>(
    s: &Biquad,
    z: [[f64; LANES]; 2],
    samples: impl Iterator<Item = &'a mut [f64; LANES]>,
) {
    let [b0, b1, b2] = s.b;
    let [_, a1, a2] = s.a;
    let [mut s1, mut s2] = z;
    for v in samples {
        for l in 0..LANES {
            let input = v[l];
            let y = b0 * input + s1[l];
            s1[l] = b1 * input - a1 * y + s2[l];
            s2[l] = b2 * input - a2 * y;
            v[l] = y;
        }
    }
}

// wider registers, same arithmetic (no fused multiply-add)
#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx")]
unsafe fn section_lanes_avx(s: &Biquad, z: [[f64; LANES]; 2], buf: &mut [[f64; LANES]], backward: bool) {
    if backward {
        section_lanes_body(s, z, buf.iter_mut().rev());
    } else {
        section_lanes_body(s, z, buf.iter_mut());
    }
}

fn section_lanes(s: &Biquad, z: [[f64; LANES]; 2], buf: &mut [[f64; LANES]], backward: bool) {
    #[cfg(target_arch = "x86_64")]
    if std::arch::is_x86_feature_detected!("avx") {
        // SAFETY: the CPU supports AVX
        return unsafe { section_lanes_avx(s, z, buf, backward) };
    }
    if backward {
        section_lanes_body(s, z, buf.iter_mut().rev());
    } else {
        section_lanes_body(s, z, buf.iter_mut());
    }
}

/// Filters every lane of `buf`, front to back or back to front.
fn sosfilt_lanes(sos: &Sos, buf: &mut [[f64; LANES]], unit: &[[f64; 2]], backward: bool) {
    let start = if backward { buf[buf.len() - 1] } else { buf[0] };
    for (s, z) in sos.sections.iter().zip(unit) {
        let z = [start.map(|v| z[0] * v), start.map(|v| z[1] * v)];
        section_lanes(s, z, buf, backward);
    }
}

/// [`filtfilt`] applied to every row in place. Equal-length rows are
/// filtered several at a time; the result matches filtering them one by one.
pub fn filtfilt_rows(sos: &Sos, rows: &mut [Vec<f64>]) -> Result<(), DspError> {
    let pad = sos.pad_len();
    let unit = sos.step_states();
    let mut buf: Vec<[f64; LANES]> = Vec::new();
    let mut groups = rows.chunks_exact_mut(LANES);
    for group in &mut groups {
        let n = group[0].len();
        if n <= pad || n < 2 || group.iter().any(|r| r.len() != n) {
            for r in group.iter_mut() {
                *r = filtfilt(sos, r)?;
            }
            continue;
        }
        let ext_at = |x: &[f64], j: usize| {
            if j < pad {
                2.0 * x[0] - x[pad - j]
            } else if j < pad + n {
                x[j - pad]
            } else {
                2.0 * x[n - 1] - x[n - 1 - (j + 1 - pad - n)]
            }
        };
        buf.clear();
        buf.extend((0..n + 2 * pad).map(|j| std::array::from_fn(|l| ext_at(&group[l], j))));
        sosfilt_lanes(sos, &mut buf, &unit, false);
        sosfilt_lanes(sos, &mut buf, &unit, true);
        for (l, r) in group.iter_mut().enumerate() {
            for (v, b) in r.iter_mut().zip(&buf[pad..pad + n]) {
                *v = b[l];
            }
        }
    }
    for r in groups.into_remainder() {
        *r = filtfilt(sos, r)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Squared magnitude of the analog Butterworth prototype mapped through
    /// the prewarped bilinear transform, evaluated in closed form.
    fn butter_hp_oracle_db(order: usize, fc: f64, f: f64, fs: f64) -> f64 {
        let wc = (PI * fc / fs).tan();
        let w = (PI * f / fs).tan();
        let mag2 = 1.0 / (1.0 + (wc / w).powi(2 * order as i32));
        10.0 * mag2.log10()
    }

    fn butter_bp_oracle_db(order: usize, lo: f64, hi: f64, f: f64, fs: f64) -> f64 {
        let w1 = (PI * lo / fs).tan();
        let w2 = (PI * hi / fs).tan();
        let w = (PI * f / fs).tan();
        let x = (w * w - w1 * w2) / (w * (w2 - w1));
        10.0 * (1.0 / (1.0 + x.powi(2 * order as i32))).log10()
    }

    /// Direct polynomial evaluation of a single biquad's transfer function.
    fn biquad_db(b: [f64; 3], a: [f64; 3], f: f64, fs: f64) -> f64 {
        let w = 2.0 * PI * f / fs;
        let re = |c: [f64; 3]| c[0] + c[1] * w.cos() + c[2] * (2.0 * w).cos();
        let im = |c: [f64; 3]| -(c[1] * w.sin() + c[2] * (2.0 * w).sin());
        let num = re(b).hypot(im(b));
        let den = re(a).hypot(im(a));
        20.0 * (num / den).log10()
    }

    #[test]
    fn row_batches_match_single_rows() {
        let sos = design_butterworth(4, FilterKind::BandPass, &[2.0, 45.0], 300.0).unwrap();
        let rows: Vec<Vec<f64>> = (0..6)
            .map(|c| (0..700).map(|i| ((i * (c + 3)) as f64 * 0.37).sin() + c as f64).collect())
            .collect();
        let mut batched = rows.clone();
        filtfilt_rows(&sos, &mut batched).unwrap();
        for (r, b) in rows.iter().zip(&batched) {
            assert_eq!(&filtfilt(&sos, r).unwrap(), b);
        }
    }

    #[test]
    fn highpass_cutoff_is_minus_three_db() {
        let sos = design_butterworth(5, FilterKind::HighPass, &[0.1], 1200.0).unwrap();
        assert_eq!(sos.sections.len(), 3);
        let at_cut = sos.magnitude_db(0.1, 1200.0);
        assert!((at_cut + 3.0103).abs() < 0.1, "{at_cut}");
        assert!(sos.magnitude_db(0.001, 1200.0) < -40.0);
        for f in [0.02, 0.05, 0.2, 1.0, 10.0, 100.0, 500.0] {
            let got = sos.magnitude_db(f, 1200.0);
            let want = butter_hp_oracle_db(5, 0.1, f, 1200.0);
            assert!((got - want).abs() < 0.01, "f={f}: {got} vs {want}");
        }
    }

    #[test]
    fn bandpass_center_gain_is_unity() {
        let sos = design_butterworth(4, FilterKind::BandPass, &[2.0, 45.0], 1200.0).unwrap();
        assert_eq!(sos.sections.len(), 4);
        let center = (2.0f64 * 45.0).sqrt();
        assert!(sos.magnitude_db(center, 1200.0).abs() < 0.1);
        assert!((sos.magnitude_db(2.0, 1200.0) + 3.0103).abs() < 0.1);
        assert!((sos.magnitude_db(45.0, 1200.0) + 3.0103).abs() < 0.1);
        for f in [0.5, 1.0, 3.0, 10.0, 30.0, 60.0, 200.0] {
            let got = sos.magnitude_db(f, 1200.0);
            let want = butter_bp_oracle_db(4, 2.0, 45.0, f, 1200.0);
            assert!((got - want).abs() < 0.01, "f={f}: {got} vs {want}");
        }
    }

    #[test]
    fn odd_order_lowpass_has_first_order_section() {
        let sos = design_butterworth(3, FilterKind::LowPass, &[40.0], 300.0).unwrap();
        assert_eq!(sos.sections.len(), 2);
        assert!(sos.magnitude_db(0.0001, 300.0).abs() < 1e-6);
        assert!((sos.magnitude_db(40.0, 300.0) + 3.0103).abs() < 0.1);
    }

    #[test]
    fn invalid_cutoffs_rejected() {
        assert!(matches!(
            design_butterworth(1, FilterKind::HighPass, &[700.0], 1200.0),
            Err(DspError::InvalidCutoff { .. })
        ));
        assert!(design_butterworth(4, FilterKind::BandPass, &[45.0, 2.0], 1200.0).is_err());
        assert!(design_butterworth(0, FilterKind::HighPass, &[1.0], 1200.0).is_err());
        assert!(matches!(
            design_notch(0.0, 30.0, 1200.0),
            Err(DspError::InvalidCutoff { .. })
        ));
    }

    #[test]
    fn notch_response() {
        let sos = design_notch(50.0, 30.0, 1200.0).unwrap();
        let s = sos.sections[0];
        assert!(biquad_db(s.b, s.a, 50.0, 1200.0) <= -30.0);
        assert!(biquad_db(s.b, s.a, 10.0, 1200.0) >= -0.5);
        assert!(biquad_db(s.b, s.a, 45.0, 1200.0) >= -3.0);
        assert!(biquad_db(s.b, s.a, 55.0, 1200.0) >= -3.0);
        assert!((sos.magnitude_db(10.0, 1200.0) - biquad_db(s.b, s.a, 10.0, 1200.0)).abs() < 1e-9);
    }

    #[test]
    fn highpass_removes_dc() {
        let sos = design_butterworth(5, FilterKind::HighPass, &[0.1], 1200.0).unwrap();
        let x = vec![100.0; 12_000];
        let y = filtfilt(&sos, &x).unwrap();
        assert_eq!(y.len(), x.len());
        let worst = y.iter().map(|v| v.abs()).fold(0.0, f64::max);
        assert!(worst < 1e-3 * 100.0, "{worst}");
    }

    #[test]
    fn too_short_signal_rejected() {
        let sos = design_notch(50.0, 30.0, 1200.0).unwrap();
        assert!(matches!(
            filtfilt(&sos, &[1.0; 30]),
            Err(DspError::SignalTooShort { .. })
        ));
        assert!(filtfilt(&sos, &[1.0; 31]).is_ok());
    }
}

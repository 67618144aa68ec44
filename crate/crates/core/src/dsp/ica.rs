//! Symmetric fixed-point FastICA (log-cosh contrast) and EOG-guided
//! component rejection.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::iir::{design_butterworth, filtfilt, FilterKind};
use super::DspError;
use crate::corpus::EegEpoch;
use crate::numeric::pearson;

pub const MAX_ITERATIONS: usize = 500;
pub const TOLERANCE: f64 = 1e-6;

/// Relative eigenvalue floor below which the covariance counts as singular.
const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct IcaDecomposition {
    /// components × channels; maps centered channel data to sources.
    pub unmixing: DMatrix<f64>,
    /// channels × components.
    pub mixing: DMatrix<f64>,
    /// components × time, for the data the model was fitted on.
    pub sources: DMatrix<f64>,
    /// components × channels.
    pub whitening: DMatrix<f64>,
    /// Per-channel mean removed before fitting.
    pub mean: Vec<f64>,
    /// Epoch rows the decomposition covers.
    pub channel_indices: Vec<usize>,
    pub iterations: usize,
    /// False when the iteration cap was hit; the last iterate is kept.
    pub converged: bool,
}

fn to_matrix(rows: &[&[f64]]) -> DMatrix<f64> {
    let n = rows.first().map_or(0, |r| r.len());
    DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j])
}

/// `(W Wᵀ)^{-1/2} W`
fn symmetric_decorrelation(w: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(w * w.transpose());
    let d = eig.eigenvalues.map(|v| 1.0 / v.max(f64::MIN_POSITIVE).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.transpose() * w
}

/// Fits FastICA to `rows` (channels × time).
pub fn fastica_matrix(
    rows: &[&[f64]],
    n_components: usize,
    seed: u64,
) -> Result<IcaDecomposition, DspError> {
    require_converged(fit(rows, n_components, seed)?)
}

fn require_converged(ica: IcaDecomposition) -> Result<IcaDecomposition, DspError> {
    if ica.converged {
        Ok(ica)
    } else {
        Err(DspError::NotConverged {
            iterations: ica.iterations,
        })
    }
}

fn fit(rows: &[&[f64]], n_components: usize, seed: u64) -> Result<IcaDecomposition, DspError> {
    let channels = rows.len();
    if n_components == 0 || n_components > channels {
        return Err(DspError::InvalidComponents {
            requested: n_components,
            channels,
        });
    }
    let mut x = to_matrix(rows);
    let t = x.ncols();
    if t < 2 {
        return Err(DspError::SignalTooShort { len: t, needed: 2 });
    }
    let mean: Vec<f64> = (0..channels).map(|i| x.row(i).mean()).collect();
    for (i, m) in mean.iter().enumerate() {
        x.row_mut(i).add_scalar_mut(-m);
    }

    let cov = &x * x.transpose() / t as f64;
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..channels).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let top = eig.eigenvalues[order[0]];
    let kth = eig.eigenvalues[order[n_components - 1]];
    if !(top > 0.0) || kth <= RANK_TOLERANCE * top {
        return Err(DspError::RankDeficient {
            rank_ratio: if top > 0.0 { kth / top } else { 0.0 },
        });
    }
    let basis = DMatrix::from_fn(channels, n_components, |r, c| eig.eigenvectors[(r, order[c])]);
    let scales: Vec<f64> = order[..n_components]
        .iter()
        .map(|&i| eig.eigenvalues[i].sqrt())
        .collect();
    // K = D^{-1/2} Eᵀ
    let mut whitening = basis.transpose();
    for (i, s) in scales.iter().enumerate() {
        whitening.row_mut(i).scale_mut(1.0 / s);
    }
    let z = &whitening * &x;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let init = DMatrix::from_fn(n_components, n_components, |_, _| {
        StandardNormal.sample(&mut rng)
    });
    let mut w = symmetric_decorrelation(&init);

    let inv_t = 1.0 / t as f64;
    let mut converged = None;
    for it in 1..=MAX_ITERATIONS {
        let mut g = &w * &z;
        let mut gp = vec![0.0; n_components];
        for (i, gp_i) in gp.iter_mut().enumerate() {
            let mut acc = 0.0;
            for v in g.row_mut(i).iter_mut() {
                let th = v.tanh();
                *v = th;
                acc += 1.0 - th * th;
            }
            *gp_i = acc * inv_t;
        }
        let mut w1 = g * z.transpose() * inv_t;
        for i in 0..n_components {
            let row = w.row(i) * gp[i];
            let mut target = w1.row_mut(i);
            target -= row;
        }
        let w1 = symmetric_decorrelation(&w1);
        let lim = (0..n_components)
            .map(|i| (w1.row(i).dot(&w.row(i)).abs() - 1.0).abs())
            .fold(0.0, f64::max);
        w = w1;
        if lim < TOLERANCE {
            converged = Some(it);
            break;
        }
    }
    let iterations = converged.unwrap_or(MAX_ITERATIONS);

    let unmixing = &w * &whitening;
    // A = E D^{1/2} Wᵀ, the pseudo-inverse of W K on the retained subspace
    let mut dewhiten = basis;
    for (j, s) in scales.iter().enumerate() {
        dewhiten.column_mut(j).scale_mut(*s);
    }
    let mixing = dewhiten * w.transpose();
    let sources = &w * z;
    Ok(IcaDecomposition {
        unmixing,
        mixing,
        sources,
        whitening,
        mean,
        channel_indices: (0..channels).collect(),
        iterations,
        converged: converged.is_some(),
    })
}

/// Fits FastICA to the EEG (non-EOG) channels of an epoch.
pub fn fastica(
    epoch: &EegEpoch,
    n_components: usize,
    seed: u64,
) -> Result<IcaDecomposition, DspError> {
    require_converged(fit_epoch(epoch, n_components, seed, None)?)
}

/// Like [`fastica`], but fits on a low-passed copy decimated by an integer
/// factor so the rate approaches `target_hz`. The returned unmixing applies
/// to full-rate data; `sources` are at the decimated rate.
pub fn fastica_decimated(
    epoch: &EegEpoch,
    n_components: usize,
    seed: u64,
    target_hz: f64,
) -> Result<IcaDecomposition, DspError> {
    require_converged(fit_epoch(epoch, n_components, seed, Some(target_hz))?)
}

/// Fits the EEG channels of `epoch` and returns the decomposition even
/// when the iteration cap is reached; check `converged`.
pub fn fit_epoch(
    epoch: &EegEpoch,
    n_components: usize,
    seed: u64,
    decimate_hz: Option<f64>,
) -> Result<IcaDecomposition, DspError> {
    let eeg = epoch.eeg_indices();
    let factor = decimate_hz.map_or(1, |hz| (epoch.sample_rate / hz).round() as usize);
    let mut ica = if factor < 2 {
        let rows: Vec<&[f64]> = eeg.iter().map(|&i| epoch.data[i].as_slice()).collect();
        fit(&rows, n_components, seed)?
    } else {
        let new_rate = epoch.sample_rate / factor as f64;
        let aa = design_butterworth(8, FilterKind::LowPass, &[0.4 * new_rate], epoch.sample_rate)?;
        let decimated = eeg
            .iter()
            .map(|&i| {
                filtfilt(&aa, &epoch.data[i])
                    .map(|y| y.into_iter().step_by(factor).collect::<Vec<_>>())
            })
            .collect::<Result<Vec<_>, _>>()?;
        let rows: Vec<&[f64]> = decimated.iter().map(Vec::as_slice).collect();
        fit(&rows, n_components, seed)?
    };
    ica.channel_indices = eeg;
    Ok(ica)
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct OcularRemoval {
    pub removed: Vec<usize>,
    /// Largest |r| against any EOG channel, per component.
    pub max_abs_correlation: Vec<f64>,
}

/// Zeroes components whose |Pearson r| with any EOG channel exceeds
/// `threshold` and rebuilds the covered channels from the rest.
pub fn remove_ocular_components(
    epoch: &EegEpoch,
    ica: &IcaDecomposition,
    threshold: f64,
) -> (EegEpoch, OcularRemoval) {
    let covered = &ica.channel_indices;
    let n = epoch.n_samples();
    let mut x = DMatrix::from_fn(covered.len(), n, |i, j| {
        epoch.data[covered[i]][j] - ica.mean[i]
    });
    let sources = &ica.unmixing * &x;

    let mut report = OcularRemoval::default();
    for k in 0..sources.nrows() {
        let s: Vec<f64> = sources.row(k).iter().copied().collect();
        let r = epoch
            .eog_indices
            .iter()
            .map(|&e| pearson(&s, &epoch.data[e]).abs())
            .fold(0.0, f64::max);
        report.max_abs_correlation.push(r);
        if r > threshold {
            report.removed.push(k);
        }
    }
    if report.removed.is_empty() {
        return (epoch.clone(), report);
    }

    let a = ica.mixing.select_columns(report.removed.iter());
    let s = sources.select_rows(report.removed.iter());
    x = a * s;
    let mut out = epoch.clone();
    for (i, &c) in covered.iter().enumerate() {
        for (v, d) in out.data[c].iter_mut().zip(x.row(i).iter()) {
            *v -= d;
        }
    }
    (out, report)
}

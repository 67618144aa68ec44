use super::DspError;
use crate::corpus::EegEpoch;

/// Subtracts the instantaneous mean of the EEG channels from every EEG
/// channel. EOG rows are left as they are.
pub fn common_average_reference(epoch: &EegEpoch) -> Result<EegEpoch, DspError> {
    let mut out = epoch.clone();
    car_in_place(&mut out)?;
    Ok(out)
}

pub(crate) fn car_in_place(epoch: &mut EegEpoch) -> Result<(), DspError> {
    let eeg = epoch.eeg_indices();
    if eeg.len() < 2 {
        return Err(DspError::TooFewChannels {
            needed: 2,
            found: eeg.len(),
        });
    }
    let n = epoch.n_samples();
    let mut avg = vec![0.0; n];
    for &c in &eeg {
        for (a, v) in avg.iter_mut().zip(&epoch.data[c]) {
            *a += v;
        }
    }
    let k = eeg.len() as f64;
    avg.iter_mut().for_each(|a| *a /= k);
    for &c in &eeg {
        for (v, a) in epoch.data[c].iter_mut().zip(&avg) {
            *v -= a;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn epoch(data: Vec<Vec<f64>>, eog: Vec<usize>) -> EegEpoch {
        EegEpoch {
            channel_names: (0..data.len()).map(|i| format!("C{i}")).collect(),
            sample_rate: 100.0,
            data,
            eog_indices: eog,
        }
    }

    #[test]
    fn antisymmetric_pair_unchanged() {
        let x: Vec<f64> = (0..50).map(|i| (i as f64 * 0.3).sin()).collect();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let e = epoch(vec![x.clone(), neg.clone()], vec![]);
        let r = common_average_reference(&e).unwrap();
        assert_eq!(r.data, vec![x, neg]);
    }

    #[test]
    fn identical_channels_vanish_eog_untouched() {
        let c: Vec<f64> = (0..40).map(|i| i as f64 * 0.1 + 3.0).collect();
        let eog: Vec<f64> = (0..40).map(|i| (i as f64).cos()).collect();
        let e = epoch(vec![c.clone(), c.clone(), c.clone(), eog.clone()], vec![3]);
        let r = common_average_reference(&e).unwrap();
        for row in &r.data[..3] {
            assert!(row.iter().all(|v| v.abs() < 1e-12));
        }
        assert_eq!(r.data[3], eog);
    }

    #[test]
    fn random_epoch_has_zero_column_means_and_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let data: Vec<Vec<f64>> = (0..62)
            .map(|_| (0..200).map(|_| rng.gen_range(-50.0..50.0)).collect())
            .collect();
        let e = epoch(data, vec![]);
        let once = common_average_reference(&e).unwrap();
        for t in 0..200 {
            let m: f64 = once.data.iter().map(|r| r[t]).sum::<f64>() / 62.0;
            assert!(m.abs() < 1e-9 * 50.0);
        }
        let twice = common_average_reference(&once).unwrap();
        for (a, b) in once.data.iter().flatten().zip(twice.data.iter().flatten()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn single_channel_rejected() {
        let e = epoch(vec![vec![1.0; 10], vec![0.0; 10]], vec![1]);
        assert!(matches!(
            common_average_reference(&e),
            Err(DspError::TooFewChannels { .. })
        ));
    }
}

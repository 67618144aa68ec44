use serde::{Deserialize, Serialize};

/// Per-feature z-scoring with population statistics of the fitting rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
}

impl Scaler {
    pub fn fit(x: &[Vec<f64>]) -> Scaler {
        assert!(!x.is_empty(), "cannot fit a scaler on zero rows");
        let d = x[0].len();
        let n = x.len() as f64;
        let mut mean = vec![0.0; d];
        for r in x {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut sd = vec![0.0; d];
        for r in x {
            for ((s, v), m) in sd.iter_mut().zip(r).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        sd.iter_mut().for_each(|s| *s = (*s / n).sqrt());
        Scaler { mean, sd }
    }

    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(&self.sd))
            .map(|(v, (m, s))| if *s > 0.0 { (v - m) / s } else { 0.0 })
            .collect()
    }

    pub fn transform(&self, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
        x.iter().map(|r| self.transform_row(r)).collect()
    }
}

/// Scales both sets with statistics of `train_x` only.
pub fn standardize(
    train_x: &[Vec<f64>],
    apply_x: &[Vec<f64>],
) -> (Vec<Vec<f64>>, Vec<Vec<f64>>, Scaler) {
    let scaler = Scaler::fit(train_x);
    (scaler.transform(train_x), scaler.transform(apply_x), scaler)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn population_z_scores() {
        let (tr, _, s) = standardize(&[vec![1.0], vec![2.0], vec![3.0]], &[]);
        assert_eq!(s.mean, vec![2.0]);
        assert!((s.sd[0] - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        let want = 1.224_744_871_391_589;
        assert!((tr[0][0] + want).abs() < 1e-12);
        assert_eq!(tr[1][0], 0.0);
        assert!((tr[2][0] - want).abs() < 1e-12);
    }

    #[test]
    fn constant_column_maps_to_zero() {
        let (tr, ap, _) = standardize(&[vec![5.0, 1.0], vec![5.0, 3.0]], &[vec![9.0, 2.0]]);
        assert!(tr.iter().all(|r| r[0] == 0.0));
        assert_eq!(ap[0][0], 0.0);
    }

    #[test]
    fn apply_set_uses_training_statistics() {
        let (_, ap, _) = standardize(&[vec![0.0], vec![2.0]], &[vec![100.0], vec![102.0]]);
        assert_eq!(ap, vec![vec![100.0 - 1.0], vec![101.0]]);
    }
}

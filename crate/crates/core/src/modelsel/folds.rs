use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ModelSelError;

/// Fold index per sample. Each class is shuffled and dealt round-robin, the
/// deal continuing where the previous class stopped so fold sizes stay level.
pub fn stratified_folds(labels: &[u8], k: usize, seed: u64) -> Result<Vec<usize>, ModelSelError> {
    if k < 2 {
        return Err(ModelSelError::InvalidConfig(format!("need k >= 2, got {k}")));
    }
    let mut by_class: BTreeMap<u8, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }
    for l in [0u8, 1] {
        let n = by_class.get(&l).map_or(0, Vec::len);
        if n < k {
            return Err(ModelSelError::ClassTooSmall { label: l, count: n, k });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold = vec![0; labels.len()];
    let mut next = 0;
    for members in by_class.values_mut() {
        members.shuffle(&mut rng);
        for &i in members.iter() {
            fold[i] = next;
            next = (next + 1) % k;
        }
    }
    Ok(fold)
}

/// Folds that keep every group (e.g. participant) whole. Groups are shuffled
/// and each goes to the fold currently holding the fewest samples.
pub fn grouped_folds<G: Ord + Clone>(groups: &[G], k: usize, seed: u64) -> Result<Vec<usize>, ModelSelError> {
    let mut members: BTreeMap<G, Vec<usize>> = BTreeMap::new();
    for (i, g) in groups.iter().enumerate() {
        members.entry(g.clone()).or_default().push(i);
    }
    if k < 2 || members.len() < k {
        return Err(ModelSelError::InvalidConfig(format!(
            "{} groups cannot fill {k} folds",
            members.len()
        )));
    }
    let mut lists: Vec<Vec<usize>> = members.into_values().collect();
    lists.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut sizes = vec![0usize; k];
    let mut fold = vec![0; groups.len()];
    for list in lists {
        let f = (0..k).min_by_key(|&f| (sizes[f], f)).unwrap();
        sizes[f] += list.len();
        for i in list {
            fold[i] = f;
        }
    }
    Ok(fold)
}

pub fn fold_members(folds: &[usize], f: usize) -> Vec<usize> {
    (0..folds.len()).filter(|&i| folds[i] == f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_counts_split() {
        let labels: Vec<u8> = (0..352).map(|i| u8::from(i < 81)).collect();
        let folds = stratified_folds(&labels, 10, 7).unwrap();
        for f in 0..10 {
            let m = fold_members(&folds, f);
            let pos = m.iter().filter(|&&i| labels[i] == 1).count();
            assert!(pos == 8 || pos == 9, "fold {f}: {pos} positives");
            let neg = m.len() - pos;
            assert!(neg == 27 || neg == 28, "fold {f}: {neg} negatives");
        }
    }

    #[test]
    fn single_class_too_small() {
        let labels = vec![1u8; 100];
        assert!(matches!(
            stratified_folds(&labels, 10, 0),
            Err(ModelSelError::ClassTooSmall { label: 0, count: 0, .. })
        ));
    }

    #[test]
    fn groups_stay_whole() {
        let groups: Vec<u32> = (0..200).map(|i| i / 10).collect();
        let folds = grouped_folds(&groups, 5, 3).unwrap();
        for g in 0..20 {
            let f = folds[g as usize * 10];
            assert!((0..10).all(|j| folds[g as usize * 10 + j] == f));
        }
        for f in 0..5 {
            assert_eq!(fold_members(&folds, f).len(), 40);
        }
    }
}

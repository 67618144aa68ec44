//! Random forest of Gini CART trees grown on bootstrap resamples.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use super::LearnError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_estimators: usize,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    pub min_samples_split: usize,
    pub seed: u64,
}

impl ForestParams {
    fn validate(&self) -> Result<(), LearnError> {
        if self.n_estimators == 0
            || self.max_depth == 0
            || self.min_samples_split < 2
            || self.min_samples_leaf == 0
        {
            return Err(LearnError::InvalidParams(format!("{self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        /// Fraction of the node's samples with label 1.
        positive: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    /// Root at index 0.
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn positive_fraction(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { positive } => return *positive,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn predict(&self, x: &[f64]) -> u8 {
        u8::from(self.positive_fraction(x) > 0.5)
    }

    /// Features used by split nodes, in node order.
    pub fn split_features(&self) -> Vec<usize> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Split { feature, .. } => Some(*feature),
                Node::Leaf { .. } => None,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub params: ForestParams,
    pub trees: Vec<Tree>,
    /// Bootstrap draw of each tree, as row indices.
    #[serde(skip)]
    pub bootstraps: Vec<Vec<usize>>,
}

impl ForestModel {
    /// Majority vote; an even split goes to label 0.
    pub fn predict(&self, x: &[f64]) -> u8 {
        let votes = self.trees.iter().filter(|t| t.predict(x) == 1).count();
        u8::from(2 * votes > self.trees.len())
    }

    /// Accuracy over rows that were out of bag for at least one tree, voting
    /// only with those trees. `None` if every row was drawn by every tree.
    pub fn oob_accuracy(&self, data: &Dataset) -> Option<f64> {
        let mut in_bag = vec![vec![false; data.len()]; self.trees.len()];
        for (t, draw) in self.bootstraps.iter().enumerate() {
            for &i in draw {
                in_bag[t][i] = true;
            }
        }
        let (mut correct, mut scored) = (0usize, 0usize);
        for i in 0..data.len() {
            let (mut votes, mut voters) = (0usize, 0usize);
            for (t, tree) in self.trees.iter().enumerate() {
                if !in_bag[t][i] {
                    voters += 1;
                    votes += tree.predict(&data.x[i]) as usize;
                }
            }
            if voters > 0 {
                scored += 1;
                correct += usize::from(u8::from(2 * votes > voters) == data.y[i]);
            }
        }
        (scored > 0).then(|| correct as f64 / scored as f64)
    }
}

/// Seed of tree `index` in a forest seeded with `master`.
pub fn tree_seed(master: u64, index: u64) -> u64 {
    crate::numeric::derive_seed(master, &[index])
}

fn gini(pos: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = pos as f64 / n as f64;
    2.0 * p * (1.0 - p)
}

struct Grower<'a> {
    data: &'a Dataset,
    params: &'a ForestParams,
    mtry: usize,
    /// Column indices in feature-name order.
    by_name: Vec<usize>,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

impl Grower<'_> {
    fn leaf(&mut self, rows: &[usize]) -> usize {
        let pos = rows.iter().filter(|&&i| self.data.y[i] == 1).count();
        self.nodes.push(Node::Leaf {
            positive: pos as f64 / rows.len() as f64,
        });
        self.nodes.len() - 1
    }

    /// Best (weighted child impurity, feature, threshold) over a random
    /// feature subset, honoring the leaf-size floor.
    fn best_split(&mut self, rows: &[usize]) -> Option<(f64, usize, f64)> {
        let d = self.data.n_features();
        let min_leaf = self.params.min_samples_leaf;
        let n = rows.len();
        let total_pos = rows.iter().filter(|&&i| self.data.y[i] == 1).count();
        let mut best: Option<(f64, usize, f64)> = None;
        let mut order: Vec<(f64, u8)> = Vec::with_capacity(n);
        for rank in sample(&mut self.rng, d, self.mtry.min(d)).into_iter() {
            let feature = self.by_name[rank];
            order.clear();
            order.extend(rows.iter().map(|&i| (self.data.x[i][feature], self.data.y[i])));
            order.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left_pos = 0usize;
            for k in 1..n {
                left_pos += order[k - 1].1 as usize;
                if order[k].0 == order[k - 1].0 || k < min_leaf || n - k < min_leaf {
                    continue;
                }
                let score = (k as f64 * gini(left_pos, k)
                    + (n - k) as f64 * gini(total_pos - left_pos, n - k))
                    / n as f64;
                if best.map_or(true, |b| score < b.0) {
                    best = Some((score, feature, 0.5 * (order[k - 1].0 + order[k].0)));
                }
            }
        }
        best
    }

    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let n = rows.len();
        let pos = rows.iter().filter(|&&i| self.data.y[i] == 1).count();
        if depth >= self.params.max_depth
            || n < self.params.min_samples_split
            || pos == 0
            || pos == n
        {
            return self.leaf(&rows);
        }
        let Some((score, feature, threshold)) = self.best_split(&rows) else {
            return self.leaf(&rows);
        };
        if score >= gini(pos, n) {
            return self.leaf(&rows);
        }
        let (l, r): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&i| self.data.x[i][feature] <= threshold);
        let at = self.nodes.len();
        self.nodes.push(Node::Leaf { positive: 0.0 });
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[at] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        at
    }
}

/// Grows one CART tree on the given rows (duplicates allowed).
pub fn grow_tree(data: &Dataset, rows: Vec<usize>, params: &ForestParams, seed: u64) -> Tree {
    let d = data.n_features();
    let mut by_name: Vec<usize> = (0..d).collect();
    by_name.sort_by(|&a, &b| data.feature_names[a].cmp(&data.feature_names[b]).then(a.cmp(&b)));
    let mut g = Grower {
        data,
        params,
        mtry: ((d as f64).sqrt().floor() as usize).max(1),
        by_name,
        rng: ChaCha8Rng::seed_from_u64(seed),
        nodes: Vec::new(),
    };
    g.grow(rows, 0);
    Tree { nodes: g.nodes }
}

pub fn forest_train(data: &Dataset, params: &ForestParams) -> Result<ForestModel, LearnError> {
    data.require_both_classes()?;
    params.validate()?;
    let n = data.len();
    let grown: Vec<(Tree, Vec<usize>)> = (0..params.n_estimators)
        .into_par_iter()
        .map(|t| {
            let seed = tree_seed(params.seed, t as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let draw: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            let tree = grow_tree(data, draw.clone(), params, rng.gen());
            (tree, draw)
        })
        .collect();
    let (trees, bootstraps) = grown.into_iter().unzip();
    Ok(ForestModel {
        params: *params,
        trees,
        bootstraps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, depth: usize) -> ForestParams {
        ForestParams {
            n_estimators: n,
            max_depth: depth,
            min_samples_leaf: 1,
            min_samples_split: 2,
            seed: 17,
        }
    }

    #[test]
    fn stumps_pick_the_separating_feature() {
        // only feature 0 separates the classes; feature 1 is constant
        let x: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64, 1.0]).collect();
        let y: Vec<u8> = (0..40).map(|i| u8::from(i >= 20)).collect();
        let d = Dataset::new(x, y, vec!["a".into(), "b".into()]).unwrap();
        let f = forest_train(&d, &params(25, 1)).unwrap();
        for t in &f.trees {
            assert!(t.split_features().iter().all(|&s| s == 0));
        }
        let acc = d.x.iter().zip(&d.y).filter(|(x, y)| f.predict(x) == **y).count();
        assert_eq!(acc, 40);
    }

    #[test]
    fn invalid_params_rejected() {
        let d = Dataset::new(vec![vec![0.0], vec![1.0]], vec![0, 1], vec!["a".into()]).unwrap();
        let mut p = params(1, 1);
        p.min_samples_split = 1;
        assert!(matches!(forest_train(&d, &p), Err(LearnError::InvalidParams(_))));
    }

    #[test]
    fn leaf_floor_respected() {
        let x: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64]).collect();
        let y: Vec<u8> = (0..30).map(|i| u8::from(i % 3 == 0)).collect();
        let d = Dataset::new(x, y, vec!["a".into()]).unwrap();
        let p = ForestParams {
            min_samples_leaf: 5,
            ..params(1, 10)
        };
        let t = grow_tree(&d, (0..30).collect(), &p, 1);
        // every leaf reached by at least 5 training rows
        let mut counts = vec![0usize; t.nodes.len()];
        for r in &d.x {
            let mut at = 0;
            while let Node::Split { feature, threshold, left, right } = &t.nodes[at] {
                at = if r[*feature] <= *threshold { *left } else { *right };
            }
            counts[at] += 1;
        }
        for (i, n) in t.nodes.iter().enumerate() {
            if matches!(n, Node::Leaf { .. }) {
                assert!(counts[i] >= 5);
            }
        }
    }

    #[test]
    fn tree_seeds_differ() {
        assert_ne!(tree_seed(1, 0), tree_seed(1, 1));
        assert_ne!(tree_seed(1, 0), tree_seed(2, 0));
    }
}

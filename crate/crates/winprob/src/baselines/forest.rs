//! Random forest classifier: CART trees on bootstrap samples with Gini
//! splits and uniform feature subsampling per split.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::features::{FrameMatrix, FrameState, Standardization, FEATURE_NAMES};
use crate::outcome::OutcomeProbs;

use super::home_rows;

const CLASSES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RfConfig {
    pub trees: usize,
    pub max_depth: usize,
    /// Candidate features per split; 0 means `ceil(sqrt(d))`.
    pub features_per_split: usize,
    pub min_samples_split: usize,
    pub seed: u64,
}

impl Default for RfConfig {
    fn default() -> Self {
        Self { trees: 200, max_depth: 12, features_per_split: 0, min_samples_split: 2, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Split { feature: usize, threshold: f64, left: usize, right: usize },
    Leaf { counts: [u32; CLASSES] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    /// Node arena; the root is node 0.
    pub nodes: Vec<TreeNode>,
}

impl DecisionTree {
    fn leaf_counts(&self, z: &[f64]) -> &[u32; CLASSES] {
        let mut node = 0usize;
        loop {
            match &self.nodes[node] {
                TreeNode::Split { feature, threshold, left, right } => {
                    node = if z[*feature] <= *threshold { *left } else { *right };
                }
                TreeNode::Leaf { counts } => return counts,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<DecisionTree>,
    pub trees_count: usize,
    pub max_depth: usize,
    pub features_per_split: usize,
}

impl ForestModel {
    /// Average the leaf class frequencies over all trees.
    pub fn predict_z(&self, z: &[f64]) -> OutcomeProbs {
        let mut acc = [0.0f64; CLASSES];
        for tree in &self.trees {
            let counts = tree.leaf_counts(z);
            let total: u32 = counts.iter().sum();
            if total > 0 {
                for c in 0..CLASSES {
                    acc[c] += counts[c] as f64 / total as f64;
                }
            }
        }
        let sum: f64 = acc.iter().sum();
        if sum <= 0.0 {
            return OutcomeProbs::uniform();
        }
        OutcomeProbs { win: acc[0] / sum, tie: acc[1] / sum, loss: acc[2] / sum }
    }
}

/// RF model with its training standardization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfModel {
    pub forest: ForestModel,
    pub standardization: Standardization,
}

fn gini(counts: &[u32; CLASSES], total: f64) -> f64 {
    if total <= 0.0 {
        return 0.0;
    }
    let mut sum_sq = 0.0;
    for &c in counts {
        let p = c as f64 / total;
        sum_sq += p * p;
    }
    1.0 - sum_sq
}

struct TreeBuilder<'a> {
    x: &'a [f64],
    y: &'a [u8],
    d: usize,
    max_depth: usize,
    min_samples_split: usize,
    features_per_split: usize,
    nodes: Vec<TreeNode>,
}

impl<'a> TreeBuilder<'a> {
    fn class_counts(&self, idx: &[usize]) -> [u32; CLASSES] {
        let mut counts = [0u32; CLASSES];
        for &i in idx {
            counts[self.y[i] as usize] += 1;
        }
        counts
    }

    fn build(&mut self, idx: &mut Vec<usize>, depth: usize, rng: &mut ChaCha12Rng) -> usize {
        let counts = self.class_counts(idx);
        let total = idx.len() as f64;
        let node_gini = gini(&counts, total);

        let make_leaf = depth >= self.max_depth
            || idx.len() < self.min_samples_split
            || node_gini <= 0.0;
        if !make_leaf {
            if let Some((feature, threshold)) = self.best_split(idx, node_gini, rng) {
                let (mut left, mut right): (Vec<usize>, Vec<usize>) =
                    idx.iter().partition(|&&i| self.x[i * self.d + feature] <= threshold);
                if !left.is_empty() && !right.is_empty() {
                    let slot = self.nodes.len();
                    self.nodes.push(TreeNode::Leaf { counts }); // placeholder
                    let left_id = self.build(&mut left, depth + 1, rng);
                    let right_id = self.build(&mut right, depth + 1, rng);
                    self.nodes[slot] =
                        TreeNode::Split { feature, threshold, left: left_id, right: right_id };
                    return slot;
                }
            }
        }
        self.nodes.push(TreeNode::Leaf { counts });
        self.nodes.len() - 1
    }

    /// Best Gini split over a random feature subset, or None when no split
    /// improves on the node impurity.
    fn best_split(
        &self,
        idx: &[usize],
        node_gini: f64,
        rng: &mut ChaCha12Rng,
    ) -> Option<(usize, f64)> {
        let n = idx.len();
        let k = self.features_per_split.min(self.d).max(1);
        let candidates = rand::seq::index::sample(rng, self.d, k);

        let mut best: Option<(usize, f64)> = None;
        let mut best_score = node_gini - 1e-12;

        let mut sorted: Vec<(f64, u8)> = Vec::with_capacity(n);
        for feature in candidates.iter() {
            sorted.clear();
            sorted.extend(idx.iter().map(|&i| (self.x[i * self.d + feature], self.y[i])));
            sorted.sort_by(|a, b| a.0.total_cmp(&b.0));

            let mut left = [0u32; CLASSES];
            let mut right = self.class_counts(idx);
            for split in 1..n {
                let (prev_v, prev_y) = sorted[split - 1];
                left[prev_y as usize] += 1;
                right[prev_y as usize] -= 1;
                let v = sorted[split].0;
                if v <= prev_v {
                    continue;
                }
                let nl = split as f64;
                let nr = (n - split) as f64;
                let score = (nl * gini(&left, nl) + nr * gini(&right, nr)) / n as f64;
                if score < best_score {
                    best_score = score;
                    best = Some((feature, prev_v + 0.5 * (v - prev_v)));
                }
            }
        }
        best
    }
}

/// Grow a forest on raw rows: `x` is row-major with `d` features per row.
pub fn fit_forest(x: &[f64], y: &[u8], d: usize, config: &RfConfig) -> ForestModel {
    let n = y.len();
    debug_assert_eq!(x.len(), n * d);
    let features_per_split = if config.features_per_split == 0 {
        (d as f64).sqrt().ceil() as usize
    } else {
        config.features_per_split
    };

    let trees: Vec<DecisionTree> = (0..config.trees)
        .into_par_iter()
        .map(|tree_idx| {
            let mut rng = ChaCha12Rng::seed_from_u64(
                config.seed ^ (tree_idx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ 0xA5A5,
            );
            let mut idx: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            let mut builder = TreeBuilder {
                x,
                y,
                d,
                max_depth: config.max_depth,
                min_samples_split: config.min_samples_split.max(2),
                features_per_split,
                nodes: Vec::new(),
            };
            builder.build(&mut idx, 0, &mut rng);
            DecisionTree { nodes: builder.nodes }
        })
        .collect();

    ForestModel {
        trees,
        trees_count: config.trees,
        max_depth: config.max_depth,
        features_per_split,
    }
}

/// Fit on all home-side frame states against the match outcome.
pub fn fit_rf(matrices: &[FrameMatrix], config: &RfConfig) -> Result<RfModel> {
    let (raw, y) = home_rows(matrices);
    let d = FEATURE_NAMES.len();
    let standardization = Standardization::fit(&FEATURE_NAMES, raw.chunks_exact(d));
    let mut x = raw;
    for row in x.chunks_exact_mut(d) {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (*v - standardization.means[j]) / standardization.sds[j];
        }
    }
    Ok(RfModel { forest: fit_forest(&x, &y, d, config), standardization })
}

/// Predict from a raw frame state.
pub fn predict_rf(model: &RfModel, state: &FrameState) -> OutcomeProbs {
    let z = model.standardization.apply_vec(&state.features());
    model.forest.predict_z(&z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn xor_data(n: usize, seed: u64) -> (Vec<f64>, Vec<u8>) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut x = Vec::with_capacity(n * 2);
        let mut y = Vec::with_capacity(n);
        for _ in 0..n {
            let a = rng.gen_bool(0.5);
            let b = rng.gen_bool(0.5);
            x.push(if a { 1.0 } else { 0.0 } + rng.gen_range(-0.05..0.05));
            x.push(if b { 1.0 } else { 0.0 } + rng.gen_range(-0.05..0.05));
            y.push(if a ^ b { 0u8 } else { 2u8 });
        }
        (x, y)
    }

    fn accuracy(probs: impl Fn(&[f64]) -> OutcomeProbs, x: &[f64], y: &[u8], d: usize) -> f64 {
        let n = y.len();
        let correct = (0..n)
            .filter(|&i| probs(&x[i * d..(i + 1) * d]).argmax().index() as u8 == y[i])
            .count();
        correct as f64 / n as f64
    }

    #[test]
    fn depth_zero_forest_predicts_the_prior() {
        // a pure dataset makes the bootstrap frequencies exact
        let x: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let y = vec![1u8; 50];
        let config = RfConfig { trees: 1, max_depth: 0, seed: 3, ..RfConfig::default() };
        let forest = fit_forest(&x, &y, 1, &config);
        let p = forest.predict_z(&[5.0]);
        assert_abs_diff_eq!(p.tie, 1.0, epsilon = 1e-15);

        // on mixed labels the single depth-0 tree matches its bootstrap
        // prior, which concentrates near the training frequencies
        let y: Vec<u8> = (0..400).map(|i| if i % 4 == 0 { 0 } else { 2 }).collect();
        let x: Vec<f64> = (0..400).map(|i| i as f64).collect();
        let forest = fit_forest(&x, &y, 1, &RfConfig { trees: 50, max_depth: 0, seed: 3, ..RfConfig::default() });
        let p = forest.predict_z(&[10.0]);
        assert_abs_diff_eq!(p.win, 0.25, epsilon = 0.05);
    }

    #[test]
    fn forest_solves_xor_where_linear_cannot() {
        let (x, y) = xor_data(400, 11);
        let config = RfConfig { trees: 50, max_depth: 6, seed: 1, ..RfConfig::default() };
        let forest = fit_forest(&x, &y, 2, &config);
        let rf_acc = accuracy(|z| forest.predict_z(z), &x, &y, 2);
        assert!(rf_acc > 0.9, "forest accuracy {rf_acc}");

        let lr = super::super::train_softmax(
            &x,
            &y,
            2,
            &["a", "b"],
            &super::super::LinearConfig::default(),
        )
        .unwrap();
        let lr_acc = accuracy(|z| lr.predict_z(z), &x, &y, 2);
        assert!(lr_acc <= 0.6, "linear accuracy {lr_acc} should stay near chance");
    }

    #[test]
    fn fixed_seed_reproduces_the_forest_bit_for_bit() {
        let (x, y) = xor_data(120, 5);
        let config = RfConfig { trees: 16, max_depth: 4, seed: 42, ..RfConfig::default() };
        let a = fit_forest(&x, &y, 2, &config);
        let b = fit_forest(&x, &y, 2, &config);
        assert_eq!(a, b);
    }

    #[test]
    fn prediction_is_invariant_to_tree_order() {
        let (x, y) = xor_data(120, 6);
        let config = RfConfig { trees: 9, max_depth: 4, seed: 2, ..RfConfig::default() };
        let forest = fit_forest(&x, &y, 2, &config);
        let mut reversed = forest.clone();
        reversed.trees.reverse();
        let z = [0.4, 0.9];
        assert_abs_diff_eq!(
            forest.predict_z(&z).win,
            reversed.predict_z(&z).win,
            epsilon = 1e-12
        );
    }

    #[test]
    fn leaves_are_nonempty() {
        let (x, y) = xor_data(200, 7);
        let forest = fit_forest(&x, &y, 2, &RfConfig { trees: 8, max_depth: 8, seed: 9, ..RfConfig::default() });
        for tree in &forest.trees {
            for node in &tree.nodes {
                if let TreeNode::Leaf { counts } = node {
                    assert!(counts.iter().sum::<u32>() > 0);
                }
            }
        }
    }
}

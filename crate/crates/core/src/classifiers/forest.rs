//! Random forest: bootstrap-sampled Gini trees over per-tree feature
//! subsets, predictions averaged across trees. A single-tree forest with
//! full features degenerates to the plain decision tree (no bootstrap, no
//! subsampling), and tree training parallelizes across the forest.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{self, TreeParams};
use crate::corpus::Label;
use crate::features::FeatureMatrix;

/// Trees inherit the decision-tree default leaf size.
const MIN_SAMPLES_LEAF: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(super) struct ForestParams {
    pub n_features: usize,
    pub trees: Vec<TreeParams>,
}

pub(super) fn fit(
    features: &FeatureMatrix,
    labels: &[Label],
    n_trees: usize,
    max_depth: usize,
    feature_fraction: Option<f64>,
    seed: u64,
) -> ForestParams {
    let v = features.n_cols;
    let fraction = feature_fraction.unwrap_or_else(|| {
        if v == 0 {
            1.0
        } else {
            (v as f64).sqrt() / v as f64
        }
    });
    let n_sub = ((v as f64 * fraction).ceil() as usize).clamp(1, v.max(1));

    if n_trees == 1 {
        let trees = vec![if n_sub == v {
            tree::fit(features, labels, max_depth, MIN_SAMPLES_LEAF)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mask = feature_mask(&mut rng, v, n_sub);
            let samples: Vec<usize> = (0..features.n_rows()).collect();
            tree::build(
                features,
                labels,
                samples,
                Some(&mask),
                max_depth,
                MIN_SAMPLES_LEAF,
            )
        }];
        return ForestParams {
            n_features: v,
            trees,
        };
    }

    // Per-tree seeds drawn sequentially so parallel training stays
    // deterministic regardless of scheduling.
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let tree_seeds: Vec<u64> = (0..n_trees).map(|_| master.gen()).collect();
    let n = features.n_rows();
    let trees: Vec<TreeParams> = tree_seeds
        .par_iter()
        .map(|&tree_seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(tree_seed);
            let samples: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            let mask = feature_mask(&mut rng, v, n_sub);
            tree::build(
                features,
                labels,
                samples,
                Some(&mask),
                max_depth,
                MIN_SAMPLES_LEAF,
            )
        })
        .collect();
    ForestParams {
        n_features: v,
        trees,
    }
}

/// Samples `n_sub` distinct feature indices into a boolean mask.
fn feature_mask(rng: &mut ChaCha8Rng, v: usize, n_sub: usize) -> Vec<bool> {
    let chosen = rand::seq::index::sample(rng, v, n_sub);
    let mut mask = vec![false; v];
    for idx in chosen {
        mask[idx] = true;
    }
    mask
}

pub(super) fn predict(params: &ForestParams, features: &FeatureMatrix) -> Vec<f64> {
    let n_trees = params.trees.len() as f64;
    features
        .rows
        .iter()
        .map(|row| {
            params
                .trees
                .iter()
                .map(|t| tree::predict_row(t, row))
                .sum::<f64>()
                / n_trees
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::test_support::separable_set;
    use super::*;

    #[test]
    fn forest_learns_separable_set() {
        let (features, labels) = separable_set(25);
        let params = fit(&features, &labels, 20, 10, None, 5);
        let probs = predict(&params, &features);
        let correct = probs
            .iter()
            .zip(&labels)
            .filter(|(&p, &l)| (p >= 0.5) == (l == Label::MultiAuthor))
            .count();
        assert!(correct as f64 / labels.len() as f64 >= 0.95);
    }

    #[test]
    fn refit_is_deterministic() {
        let (features, labels) = separable_set(10);
        let a = fit(&features, &labels, 8, 6, Some(0.5), 42);
        let b = fit(&features, &labels, 8, 6, Some(0.5), 42);
        assert_eq!(a, b);
    }
}

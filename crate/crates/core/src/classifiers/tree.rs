//! CART-style decision tree: Gini impurity, threshold splits at midpoints
//! between consecutive distinct feature values. Construction is fully
//! deterministic: features are scanned in index order, thresholds in
//! ascending order, and only strict impurity improvements replace the
//! incumbent split.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::features::{FeatureMatrix, SparseVec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(super) enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        p_multi: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(super) struct TreeParams {
    pub n_features: usize,
    /// Node arena; index 0 is the root.
    pub nodes: Vec<Node>,
}

pub(super) fn fit(
    features: &FeatureMatrix,
    labels: &[Label],
    max_depth: usize,
    min_samples_leaf: usize,
) -> TreeParams {
    let samples: Vec<usize> = (0..features.n_rows()).collect();
    build(features, labels, samples, None, max_depth, min_samples_leaf)
}

/// Builds a tree over the given samples; `allowed` restricts split features
/// when the forest subsamples them.
pub(super) fn build(
    features: &FeatureMatrix,
    labels: &[Label],
    samples: Vec<usize>,
    allowed: Option<&[bool]>,
    max_depth: usize,
    min_samples_leaf: usize,
) -> TreeParams {
    let mut nodes = Vec::new();
    grow(
        features,
        labels,
        samples,
        allowed,
        max_depth,
        min_samples_leaf,
        0,
        &mut nodes,
    );
    TreeParams {
        n_features: features.n_cols,
        nodes,
    }
}

#[allow(clippy::too_many_arguments)]
fn grow(
    features: &FeatureMatrix,
    labels: &[Label],
    samples: Vec<usize>,
    allowed: Option<&[bool]>,
    max_depth: usize,
    min_samples_leaf: usize,
    depth: usize,
    nodes: &mut Vec<Node>,
) -> usize {
    let n = samples.len();
    let multi = samples
        .iter()
        .filter(|&&i| labels[i] == Label::MultiAuthor)
        .count();
    let here = nodes.len();
    nodes.push(Node::Leaf {
        p_multi: multi as f64 / n as f64,
    });

    let pure = multi == 0 || multi == n;
    if pure || depth >= max_depth || n < 2 * min_samples_leaf {
        return here;
    }
    let Some((feature, threshold)) = best_split(features, labels, &samples, allowed, min_samples_leaf)
    else {
        return here;
    };

    let (left_samples, right_samples): (Vec<usize>, Vec<usize>) = samples
        .into_iter()
        .partition(|&i| features.rows[i].get(feature) <= threshold);
    let left = grow(
        features,
        labels,
        left_samples,
        allowed,
        max_depth,
        min_samples_leaf,
        depth + 1,
        nodes,
    );
    let right = grow(
        features,
        labels,
        right_samples,
        allowed,
        max_depth,
        min_samples_leaf,
        depth + 1,
        nodes,
    );
    nodes[here] = Node::Split {
        feature,
        threshold,
        left,
        right,
    };
    here
}

fn gini(multi: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let p = multi as f64 / total as f64;
    1.0 - p * p - (1.0 - p) * (1.0 - p)
}

fn best_split(
    features: &FeatureMatrix,
    labels: &[Label],
    samples: &[usize],
    allowed: Option<&[bool]>,
    min_samples_leaf: usize,
) -> Option<(usize, f64)> {
    let n = samples.len();
    let multi_total = samples
        .iter()
        .filter(|&&i| labels[i] == Label::MultiAuthor)
        .count();
    let parent_impurity = gini(multi_total, n);

    // Sparse rows: only features with at least one nonzero value among the
    // node's samples can produce a non-constant column.
    let mut postings_by_feature: HashMap<usize, Vec<(f64, usize)>> = HashMap::new();
    for &i in samples {
        for &(feature, value) in &features.rows[i].entries {
            if allowed.is_some_and(|mask| !mask[feature]) {
                continue;
            }
            postings_by_feature.entry(feature).or_default().push((value, i));
        }
    }
    let mut candidate_features: Vec<usize> = postings_by_feature.keys().copied().collect();
    candidate_features.sort_unstable();

    let mut best: Option<(f64, usize, f64)> = None;
    for feature in candidate_features {
        let postings = &postings_by_feature[&feature];
        // Column values for every node sample, zeros included.
        let mut column: Vec<(f64, bool)> = Vec::with_capacity(n);
        let zeros = n - postings.len();
        if zeros > 0 {
            let zero_multi = {
                let nonzero_multi = postings
                    .iter()
                    .filter(|&&(_, i)| labels[i] == Label::MultiAuthor)
                    .count();
                multi_total - nonzero_multi
            };
            // All zero-valued samples collapse into one block at 0.0.
            for j in 0..zeros {
                column.push((0.0, j < zero_multi));
            }
        }
        for &(value, i) in postings {
            column.push((value, labels[i] == Label::MultiAuthor));
        }
        column.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

        let mut left_n = 0usize;
        let mut left_multi = 0usize;
        for idx in 0..n - 1 {
            left_n += 1;
            if column[idx].1 {
                left_multi += 1;
            }
            let (value, next_value) = (column[idx].0, column[idx + 1].0);
            if value == next_value {
                continue;
            }
            if left_n < min_samples_leaf || n - left_n < min_samples_leaf {
                continue;
            }
            let threshold = 0.5 * (value + next_value);
            let right_n = n - left_n;
            let right_multi = multi_total - left_multi;
            let weighted = (left_n as f64 * gini(left_multi, left_n)
                + right_n as f64 * gini(right_multi, right_n))
                / n as f64;
            if weighted + 1e-12 < parent_impurity
                && best.is_none_or(|(incumbent, _, _)| weighted < incumbent)
            {
                best = Some((weighted, feature, threshold));
            }
        }
    }
    best.map(|(_, feature, threshold)| (feature, threshold))
}

pub(super) fn predict_row(params: &TreeParams, row: &SparseVec) -> f64 {
    let mut at = 0usize;
    loop {
        match &params.nodes[at] {
            Node::Leaf { p_multi } => return *p_multi,
            Node::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                at = if row.get(*feature) <= *threshold {
                    *left
                } else {
                    *right
                };
            }
        }
    }
}

pub(super) fn predict(params: &TreeParams, features: &FeatureMatrix) -> Vec<f64> {
    features
        .rows
        .iter()
        .map(|row| predict_row(params, row))
        .collect()
}

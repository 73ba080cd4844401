//! Multinomial Naive Bayes over TF-IDF weights treated as fractional
//! counts, with Laplace smoothing.

use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::features::FeatureMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(super) struct NaiveBayesParams {
    pub n_features: usize,
    /// log P(class), [single, multi].
    pub class_log_prior: [f64; 2],
    /// Per-feature log likelihoods, [single, multi].
    pub feature_log_prob: Vec<[f64; 2]>,
}

fn class_index(label: Label) -> usize {
    match label {
        Label::MultiAuthor => 1,
        _ => 0,
    }
}

pub(super) fn fit(features: &FeatureMatrix, labels: &[Label], alpha: f64) -> NaiveBayesParams {
    let v = features.n_cols;
    let mut totals = vec![[0.0f64; 2]; v];
    let mut class_counts = [0.0f64; 2];
    for (row, &label) in features.rows.iter().zip(labels) {
        let c = class_index(label);
        class_counts[c] += 1.0;
        for &(idx, value) in &row.entries {
            totals[idx][c] += value;
        }
    }
    let mass: [f64; 2] = [
        totals.iter().map(|t| t[0]).sum(),
        totals.iter().map(|t| t[1]).sum(),
    ];
    let n = labels.len() as f64;
    let class_log_prior = [
        (class_counts[0] / n).ln(),
        (class_counts[1] / n).ln(),
    ];
    let feature_log_prob = totals
        .iter()
        .map(|t| {
            [
                ((t[0] + alpha) / (mass[0] + alpha * v as f64)).ln(),
                ((t[1] + alpha) / (mass[1] + alpha * v as f64)).ln(),
            ]
        })
        .collect();
    NaiveBayesParams {
        n_features: v,
        class_log_prior,
        feature_log_prob,
    }
}

pub(super) fn predict(params: &NaiveBayesParams, features: &FeatureMatrix) -> Vec<f64> {
    features
        .rows
        .iter()
        .map(|row| {
            let mut joint = params.class_log_prior;
            for &(idx, value) in &row.entries {
                joint[0] += value * params.feature_log_prob[idx][0];
                joint[1] += value * params.feature_log_prob[idx][1];
            }
            softmax_pair(joint)
        })
        .collect()
}

/// Probability of class 1 from a pair of log scores, via log-sum-exp.
fn softmax_pair(joint: [f64; 2]) -> f64 {
    let max = joint[0].max(joint[1]);
    let e0 = (joint[0] - max).exp();
    let e1 = (joint[1] - max).exp();
    e1 / (e0 + e1)
}

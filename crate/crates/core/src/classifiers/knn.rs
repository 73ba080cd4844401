//! k-nearest-neighbor classification with cosine or Euclidean distance.
//! The probability of a class is its share of the k nearest training rows;
//! distance ties break toward the lower row index.

use serde::{Deserialize, Serialize};

use super::Metric;
use crate::corpus::Label;
use crate::features::{FeatureMatrix, SparseVec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(super) struct KnnParams {
    pub n_features: usize,
    pub k: usize,
    pub metric: Metric,
    pub rows: Vec<SparseVec>,
    pub norms: Vec<f64>,
    pub labels: Vec<Label>,
}

pub(super) fn fit(features: &FeatureMatrix, labels: &[Label], k: usize, metric: Metric) -> KnnParams {
    KnnParams {
        n_features: features.n_cols,
        k,
        metric,
        rows: features.rows.clone(),
        norms: features.rows.iter().map(SparseVec::norm).collect(),
        labels: labels.to_vec(),
    }
}

fn distance(params: &KnnParams, query: &SparseVec, query_norm: f64, idx: usize) -> f64 {
    match params.metric {
        Metric::Euclidean => params.rows[idx].squared_distance(query),
        Metric::Cosine => {
            let denom = params.norms[idx] * query_norm;
            // A zero vector has no direction; call its similarity zero.
            let similarity = if denom > 0.0 {
                params.rows[idx].dot(query) / denom
            } else {
                0.0
            };
            1.0 - similarity
        }
    }
}

pub(super) fn predict(params: &KnnParams, features: &FeatureMatrix) -> Vec<f64> {
    features
        .rows
        .iter()
        .map(|query| {
            let query_norm = query.norm();
            let mut scored: Vec<(f64, usize)> = (0..params.rows.len())
                .map(|idx| (distance(params, query, query_norm, idx), idx))
                .collect();
            scored.sort_by(|a, b| {
                a.0.partial_cmp(&b.0)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(a.1.cmp(&b.1))
            });
            let k = params.k.min(scored.len());
            let multi = scored[..k]
                .iter()
                .filter(|&&(_, idx)| params.labels[idx] == Label::MultiAuthor)
                .count();
            multi as f64 / k as f64
        })
        .collect()
}

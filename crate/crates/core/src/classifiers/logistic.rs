//! Binary logistic regression trained by full-batch gradient descent.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::features::FeatureMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(super) struct LogisticParams {
    pub n_features: usize,
    pub weights: Vec<f64>,
    pub bias: f64,
}

pub(super) fn fit(
    features: &FeatureMatrix,
    labels: &[Label],
    learning_rate: f64,
    epochs: usize,
    l2_lambda: f64,
    seed: u64,
) -> LogisticParams {
    let v = features.n_cols;
    let n = features.n_rows() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights: Vec<f64> = (0..v).map(|_| rng.gen_range(-0.01..=0.01)).collect();
    let mut bias = 0.0;
    let targets: Vec<f64> = labels
        .iter()
        .map(|&l| if l == Label::MultiAuthor { 1.0 } else { 0.0 })
        .collect();

    let mut grad = vec![0.0f64; v];
    for _ in 0..epochs {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut grad_bias = 0.0;
        for (row, &target) in features.rows.iter().zip(&targets) {
            let mut z = bias;
            for &(idx, value) in &row.entries {
                z += weights[idx] * value;
            }
            let err = sigmoid(z) - target;
            for &(idx, value) in &row.entries {
                grad[idx] += err * value;
            }
            grad_bias += err;
        }
        for (w, g) in weights.iter_mut().zip(&grad) {
            *w -= learning_rate * (g / n + l2_lambda * *w);
        }
        bias -= learning_rate * grad_bias / n;
    }
    LogisticParams {
        n_features: v,
        weights,
        bias,
    }
}

pub(super) fn predict(params: &LogisticParams, features: &FeatureMatrix) -> Vec<f64> {
    features
        .rows
        .iter()
        .map(|row| {
            let mut z = params.bias;
            for &(idx, value) in &row.entries {
                z += params.weights[idx] * value;
            }
            sigmoid(z)
        })
        .collect()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_support::separable_set;
    use super::*;

    #[test]
    fn separable_set_fits_to_full_training_accuracy() {
        let (features, labels) = separable_set(20);
        let params = fit(&features, &labels, 0.1, 500, 1e-4, 42);
        let probs = predict(&params, &features);
        let correct = probs
            .iter()
            .zip(&labels)
            .filter(|(&p, &l)| (p >= 0.5) == (l == Label::MultiAuthor))
            .count();
        assert_eq!(correct, labels.len());
    }

    #[test]
    fn sigmoid_is_stable_at_extremes() {
        assert!(sigmoid(-1e6) >= 0.0);
        assert!(sigmoid(1e6) <= 1.0);
        assert!((sigmoid(0.0) - 0.5).abs() < 1e-15);
    }
}

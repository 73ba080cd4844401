//! Dataset balancing: SMOTE in TF-IDF feature space and adjacent-character
//! transpose augmentation in text space. Both methods append synthetic
//! minority samples until class counts are equal and never touch the
//! majority class. All randomness flows from a ChaCha8 stream seeded by the
//! caller, so fixed seeds reproduce byte-identical outputs on any platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document, Label};
use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, SparseVec};

/// The balancing method for the training split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum BalanceMethod {
    NoBalance,
    Smote { k_neighbors: usize, seed: u64 },
    Transpose { swaps_per_100_chars: f64, seed: u64 },
}

fn two_class_split(labels: &[Label]) -> Result<(Label, Vec<usize>, Label, Vec<usize>)> {
    let mut classes: Vec<Label> = labels.to_vec();
    classes.sort();
    classes.dedup();
    if classes.len() != 2 {
        return Err(Error::NotTwoClasses(classes.len()));
    }
    let (a, b) = (classes[0], classes[1]);
    let idx_a: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == a).collect();
    let idx_b: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == b).collect();
    if idx_a.len() <= idx_b.len() {
        Ok((a, idx_a, b, idx_b))
    } else {
        Ok((b, idx_b, a, idx_a))
    }
}

/// SMOTE over feature rows: each synthetic minority row is
/// `x + u * (x_nn - x)` for `u` uniform in [0, 1] and `x_nn` one of the k
/// Euclidean nearest minority neighbors of a round-robin minority row `x`.
/// When the matrix declares unit-normalized rows, synthetic rows are
/// re-normalized to match the feature convention.
pub fn smote_balance(
    features: &FeatureMatrix,
    labels: &[Label],
    k_neighbors: usize,
    seed: u64,
) -> Result<(FeatureMatrix, Vec<Label>)> {
    if features.n_rows() != labels.len() {
        return Err(Error::LabelMismatch {
            model: "smote",
            rows: features.n_rows(),
            labels: labels.len(),
        });
    }
    let (minority, minority_idx, _, majority_idx) = two_class_split(labels)?;
    let need = majority_idx.len() - minority_idx.len();
    if need == 0 {
        return Ok((features.clone(), labels.to_vec()));
    }
    if minority_idx.len() <= k_neighbors {
        return Err(Error::MinorityTooSmall {
            minority: minority_idx.len(),
            k: k_neighbors,
        });
    }

    // k nearest minority neighbors per minority row, ties by lower index.
    let neighbors: Vec<Vec<usize>> = minority_idx
        .iter()
        .map(|&i| {
            let mut dists: Vec<(f64, usize)> = minority_idx
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| (features.rows[i].squared_distance(&features.rows[j]), j))
                .collect();
            dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            dists.truncate(k_neighbors);
            dists.into_iter().map(|(_, j)| j).collect()
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = features.clone();
    let mut out_labels = labels.to_vec();
    for s in 0..need {
        let slot = s % minority_idx.len();
        let base = minority_idx[slot];
        let nn = neighbors[slot][rng.gen_range(0..k_neighbors)];
        let u: f64 = rng.gen_range(0.0..=1.0);
        let mut row = interpolate(&features.rows[base], &features.rows[nn], u);
        if features.unit_normalized {
            let norm = row.norm();
            if norm > 0.0 {
                row.scale(1.0 / norm);
            }
        }
        out.doc_ids
            .push(format!("{}#smote{}", features.doc_ids[base], s + 1));
        out.rows.push(row);
        out_labels.push(minority);
    }
    Ok((out, out_labels))
}

/// `a + u * (b - a)` over the union of sparse supports; exact zeros are
/// dropped so the invariant "no stored zeros" holds.
fn interpolate(a: &SparseVec, b: &SparseVec, u: f64) -> SparseVec {
    let mut entries = Vec::with_capacity(a.entries.len() + b.entries.len());
    let (mut i, mut j) = (0, 0);
    while i < a.entries.len() || j < b.entries.len() {
        let ia = a.entries.get(i).map(|&(idx, _)| idx);
        let ib = b.entries.get(j).map(|&(idx, _)| idx);
        let (idx, va, vb) = match (ia, ib) {
            (Some(x), Some(y)) if x == y => {
                let pair = (x, a.entries[i].1, b.entries[j].1);
                i += 1;
                j += 1;
                pair
            }
            (Some(x), Some(y)) if x < y => {
                let pair = (x, a.entries[i].1, 0.0);
                i += 1;
                pair
            }
            (Some(_), Some(y)) => {
                let pair = (y, 0.0, b.entries[j].1);
                j += 1;
                pair
            }
            (Some(x), None) => {
                let pair = (x, a.entries[i].1, 0.0);
                i += 1;
                pair
            }
            (None, Some(y)) => {
                let pair = (y, 0.0, b.entries[j].1);
                j += 1;
                pair
            }
            (None, None) => break,
        };
        let value = va + u * (vb - va);
        if value != 0.0 {
            entries.push((idx, value));
        }
    }
    SparseVec { entries }
}

/// Balances a corpus by synthesizing minority documents: a round-robin
/// minority source is copied and `ceil(chars / 100 * rate)` independent
/// adjacent-character swaps are applied at seeded positions. Synthetic ids
/// get the suffix `#aug<k>`.
pub fn transpose_balance(
    corpus: &Corpus,
    swaps_per_100_chars: f64,
    seed: u64,
) -> Result<Corpus> {
    let labels = corpus.labels();
    let (minority, minority_idx, _, majority_idx) = two_class_split(&labels)?;
    let need = majority_idx.len() - minority_idx.len();
    if need == 0 {
        return Ok(corpus.clone());
    }
    let sources: Vec<&Document> = minority_idx
        .iter()
        .map(|&i| &corpus.documents()[i])
        .filter(|d| d.text.chars().count() >= 2)
        .collect();
    if sources.is_empty() {
        return Err(Error::MinorityTooShort);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut synthetic = Vec::with_capacity(need);
    for k in 0..need {
        let source = sources[k % sources.len()];
        let mut chars: Vec<char> = source.text.chars().collect();
        let n_swaps = ((chars.len() as f64 / 100.0) * swaps_per_100_chars).ceil() as usize;
        for _ in 0..n_swaps {
            let pos = rng.gen_range(0..chars.len() - 1);
            chars.swap(pos, pos + 1);
        }
        synthetic.push(Document {
            id: format!("{}#aug{}", source.id, k + 1),
            text: chars.into_iter().collect(),
            label: minority,
        });
    }
    corpus.with_appended(synthetic)
}

/// One adjacent swap at the given character position; used by tests and
/// exposed for diagnostics.
pub fn swap_adjacent(text: &str, pos: usize) -> String {
    let mut chars: Vec<char> = text.chars().collect();
    if pos + 1 < chars.len() {
        chars.swap(pos, pos + 1);
    }
    chars.into_iter().collect()
}

//! TF-IDF fitting and transformation: the feature space every classical
//! classifier trains on.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textprep::TokenSequence;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfIdfConfig {
    /// Terms must appear in at least this many documents.
    pub min_df: usize,
    /// Keep at most this many terms, highest document frequency first
    /// (ties broken lexicographically). `None` keeps everything.
    pub max_features: Option<usize>,
    /// L2-normalize nonzero document vectors.
    pub l2_normalize: bool,
}

impl Default for TfIdfConfig {
    fn default() -> Self {
        Self {
            min_df: 2,
            max_features: Some(50_000),
            l2_normalize: true,
        }
    }
}

/// Term index and per-term document frequency. Indices are dense, `0..V-1`,
/// assigned in lexicographic term order so fitting is independent of
/// document order.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    term_to_index: HashMap<String, usize>,
    terms: Vec<String>,
    document_frequency: Vec<usize>,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.term_to_index.get(term).copied()
    }

    /// Terms in index order.
    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn document_frequency(&self) -> &[usize] {
        &self.document_frequency
    }
}

/// A fitted TF-IDF model: vocabulary plus smoothed inverse document
/// frequencies, `idf(t) = ln((1 + N) / (1 + df(t))) + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TfIdfModel {
    pub vocabulary: Vocabulary,
    pub idf: Vec<f64>,
    pub config: TfIdfConfig,
}

/// A sparse nonnegative row vector; entries are (index, value) pairs sorted
/// by index with no zeros stored.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SparseVec {
    pub entries: Vec<(usize, f64)>,
}

impl SparseVec {
    pub fn norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|(_, v)| v * v)
            .sum::<f64>()
            .sqrt()
    }

    pub fn dot(&self, other: &SparseVec) -> f64 {
        let (mut i, mut j) = (0, 0);
        let mut acc = 0.0;
        while i < self.entries.len() && j < other.entries.len() {
            let (ia, va) = self.entries[i];
            let (ib, vb) = other.entries[j];
            match ia.cmp(&ib) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += va * vb;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    pub fn squared_distance(&self, other: &SparseVec) -> f64 {
        let self_sq: f64 = self.entries.iter().map(|(_, v)| v * v).sum();
        let other_sq: f64 = other.entries.iter().map(|(_, v)| v * v).sum();
        (self_sq + other_sq - 2.0 * self.dot(other)).max(0.0)
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map(|pos| self.entries[pos].1)
            .unwrap_or(0.0)
    }

    pub fn scale(&mut self, factor: f64) {
        for (_, v) in &mut self.entries {
            *v *= factor;
        }
    }
}

/// Sparse document-by-term matrix with rows aligned to document ids.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub doc_ids: Vec<String>,
    pub rows: Vec<SparseVec>,
    pub n_cols: usize,
    /// True when nonzero rows carry unit L2 norm (the fitted config asked
    /// for normalization). Balancing uses this to decide whether synthetic
    /// rows must be re-normalized.
    pub unit_normalized: bool,
}

impl FeatureMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }
}

/// Fits vocabulary and idf weights over the given token sequences.
pub fn fit_tfidf(sequences: &[TokenSequence], config: &TfIdfConfig) -> Result<TfIdfModel> {
    if sequences.is_empty() || sequences.iter().all(|s| s.is_empty()) {
        return Err(Error::EmptyFitCorpus);
    }
    let n_docs = sequences.len();
    let mut df: HashMap<&str, usize> = HashMap::new();
    let mut seen_in_doc: Vec<&str> = Vec::new();
    for seq in sequences {
        seen_in_doc.clear();
        seen_in_doc.extend(seq.tokens.iter().map(String::as_str));
        seen_in_doc.sort_unstable();
        seen_in_doc.dedup();
        for term in &seen_in_doc {
            *df.entry(term).or_insert(0) += 1;
        }
    }

    let mut candidates: Vec<(&str, usize)> = df
        .into_iter()
        .filter(|&(_, count)| count >= config.min_df)
        .collect();
    // Highest df first, lexicographic tie-break, then truncate.
    candidates.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    if let Some(cap) = config.max_features {
        candidates.truncate(cap);
    }
    // Index assignment is lexicographic over the surviving terms.
    candidates.sort_by(|a, b| a.0.cmp(b.0));

    let terms: Vec<String> = candidates.iter().map(|(t, _)| t.to_string()).collect();
    let document_frequency: Vec<usize> = candidates.iter().map(|&(_, c)| c).collect();
    let term_to_index = terms
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    let idf = document_frequency
        .iter()
        .map(|&dfi| smoothed_idf(n_docs, dfi))
        .collect();

    Ok(TfIdfModel {
        vocabulary: Vocabulary {
            term_to_index,
            terms,
            document_frequency,
        },
        idf,
        config: config.clone(),
    })
}

fn smoothed_idf(n_docs: usize, df: usize) -> f64 {
    ((1.0 + n_docs as f64) / (1.0 + df as f64)).ln() + 1.0
}

/// Transforms one token sequence into a TF-IDF vector: raw term count times
/// idf, then L2 normalization when configured. Out-of-vocabulary tokens
/// contribute nothing; an empty or fully-OOV sequence yields the zero
/// vector, left unnormalized.
pub fn transform(model: &TfIdfModel, sequence: &TokenSequence) -> SparseVec {
    let mut counts: HashMap<usize, f64> = HashMap::new();
    for token in &sequence.tokens {
        if let Some(idx) = model.vocabulary.index_of(token) {
            *counts.entry(idx).or_insert(0.0) += 1.0;
        }
    }
    let mut entries: Vec<(usize, f64)> = counts
        .into_iter()
        .map(|(idx, count)| (idx, count * model.idf[idx]))
        .collect();
    entries.sort_unstable_by_key(|&(idx, _)| idx);
    let mut vec = SparseVec { entries };
    if model.config.l2_normalize {
        let norm = vec.norm();
        if norm > 0.0 {
            vec.scale(1.0 / norm);
        }
    }
    vec
}

/// Transforms a batch of (id, tokens) pairs into a row-aligned matrix.
pub fn transform_matrix(
    model: &TfIdfModel,
    docs: &[(String, TokenSequence)],
) -> FeatureMatrix {
    FeatureMatrix {
        doc_ids: docs.iter().map(|(id, _)| id.clone()).collect(),
        rows: docs.iter().map(|(_, seq)| transform(model, seq)).collect(),
        n_cols: model.vocabulary.len(),
        unit_normalized: model.config.l2_normalize,
    }
}

#[derive(Serialize, Deserialize)]
struct PersistedModel {
    config: TfIdfConfig,
    terms: Vec<String>,
    idf: Vec<f64>,
}

/// Serializes to the persistence schema: `{config, terms, idf}` with terms
/// in index order. Document frequencies are a fit-time diagnostic and are
/// not persisted.
pub fn model_to_json(model: &TfIdfModel) -> Result<String> {
    Ok(serde_json::to_string_pretty(&PersistedModel {
        config: model.config.clone(),
        terms: model.vocabulary.terms.clone(),
        idf: model.idf.clone(),
    })?)
}

pub fn model_from_json(json: &str) -> Result<TfIdfModel> {
    let persisted: PersistedModel = serde_json::from_str(json)?;
    let term_to_index = persisted
        .terms
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    let n = persisted.terms.len();
    Ok(TfIdfModel {
        vocabulary: Vocabulary {
            term_to_index,
            terms: persisted.terms,
            document_frequency: vec![0; n],
        },
        idf: persisted.idf,
        config: persisted.config,
    })
}

pub fn save_model(model: &TfIdfModel, path: &Path) -> Result<()> {
    std::fs::write(path, model_to_json(model)?)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<TfIdfModel> {
    let raw = std::fs::read_to_string(path)?;
    model_from_json(&raw)
}

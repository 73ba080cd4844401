//! Synthetic data builders shared by the criterion benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use authorfuse::fusion::ScoreMatrix;
use authorfuse::textprep::{tokenize, TokenSequence};
use authorfuse::Label;

/// A validation-set-sized score matrix (models x docs) with labels.
pub fn synthetic_scores(seed: u64, n_docs: usize, n_models: usize) -> (ScoreMatrix, Vec<Label>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scores = (0..n_docs)
        .map(|_| (0..n_models).map(|_| rng.gen_range(0.0..=1.0)).collect())
        .collect();
    let labels = (0..n_docs)
        .map(|_| {
            if rng.gen_bool(0.75) {
                Label::MultiAuthor
            } else {
                Label::SingleAuthor
            }
        })
        .collect();
    (
        ScoreMatrix {
            doc_ids: (0..n_docs).map(|i| format!("d{i:05}")).collect(),
            model_names: (0..n_models).map(|m| format!("m{m}")).collect(),
            scores,
        },
        labels,
    )
}

/// Token sequences drawn from a vocabulary with a Zipf-ish skew.
pub fn synthetic_token_corpus(seed: u64, n_docs: usize, doc_len: usize) -> Vec<TokenSequence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocab: Vec<String> = (0..2000).map(|i| format!("word{i:04}")).collect();
    (0..n_docs)
        .map(|_| {
            let words: Vec<&str> = (0..doc_len)
                .map(|_| {
                    // Squaring a uniform draw concentrates mass on low ids.
                    let u: f64 = rng.gen();
                    let idx = ((u * u) * vocab.len() as f64) as usize;
                    vocab[idx.min(vocab.len() - 1)].as_str()
                })
                .collect();
            tokenize(&words.join(" "))
        })
        .collect()
}

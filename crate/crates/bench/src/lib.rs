//! Synthetic inputs shared by the benchmarks.

use defclust_core::{BinaryDocTermMatrix, Document};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `n` random binary rows over `p` columns, each with at least one 1.
pub fn random_matrix(n: usize, p: usize, density: f64, seed: u64) -> BinaryDocTermMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<u8>> = (0..n)
        .map(|_| {
            let mut row: Vec<u8> = (0..p).map(|_| rng.gen_bool(density) as u8).collect();
            row[rng.gen_range(0..p)] = 1;
            row
        })
        .collect();
    BinaryDocTermMatrix::from_unlabeled_rows(&rows).expect("rows are binary and non-empty")
}

/// `n` short documents of 8–15 words drawn from a vocabulary of `vocab` words.
pub fn random_documents(n: usize, vocab: usize, seed: u64) -> Vec<Document> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let len = rng.gen_range(8..=15);
            let words: Vec<String> = (0..len)
                .map(|_| format!("w{}", rng.gen_range(0..vocab)))
                .collect();
            Document::new(format!("doc{i}"), words.join(" "))
        })
        .collect()
}

//! Shared corpus generation for the benchmarks.

use std::sync::Arc;

use debruijn_entropy::{Alphabet, CyclicWord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn dna_alphabet() -> Arc<Alphabet> {
    Arc::new(Alphabet::from_str("ACGT").expect("valid alphabet"))
}

/// Deterministic random DNA words.
pub fn random_dna_words(count: usize, ell: usize, seed: u64) -> Vec<CyclicWord> {
    let alphabet = dna_alphabet();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let indices: Vec<u32> = (0..ell).map(|_| rng.gen_range(0..4)).collect();
            CyclicWord::from_indices(indices, &alphabet).expect("valid indices")
        })
        .collect()
}

//! The README quick-start, kept compiling.

use debruijn_entropy::{relative_entropy, word_entropy, Alphabet, CyclicWord, Result};
use std::sync::Arc;

fn main() -> Result<()> {
    let alphabet = Arc::new(Alphabet::from_str("ABCDR")?);
    let u = CyclicWord::from_text("ABRACADABRA", &alphabet)?;
    let v = CyclicWord::from_text("ABARACARBAD", &alphabet)?;

    let h = word_entropy(&u, 1)?;
    assert_eq!(h.count(), Some(12)); // twelve cyclic words share u's 2-grams
    println!("H_1({u}) = {} nats, W_1 = {:?}", h.nats, h.count());

    let rel = relative_entropy(&u, &v, 1)?;
    assert_eq!(rel.count(), Some(1)); // identical 2-gram statistics
    println!("H_1({u} || {v}) = {} nats", rel.nats);
    Ok(())
}

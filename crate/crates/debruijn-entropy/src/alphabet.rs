//! Alphabets and cyclic words.
//!
//! A cyclic word (necklace) is stored as a sequence of alphabet indices and
//! read modulo its length; every quiver in this crate is built from one.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// An ordered set of distinct symbols. Symbol order fixes the radix-`n`
/// vertex indexing used by dense quivers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<char>,
    index: HashMap<char, u32>,
}

impl Alphabet {
    pub fn new(symbols: impl IntoIterator<Item = char>) -> Result<Self> {
        let symbols: Vec<char> = symbols.into_iter().collect();
        if symbols.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, &s) in symbols.iter().enumerate() {
            if index.insert(s, i as u32).is_some() {
                return Err(Error::DuplicateSymbol(s));
            }
        }
        Ok(Alphabet { symbols, index })
    }

    #[allow(clippy::should_implement_trait)] // mirrors the FromStr impl below
    pub fn from_str(symbols: &str) -> Result<Self> {
        Self::new(symbols.chars())
    }

    /// Number of symbols `n`.
    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    pub fn index_of(&self, symbol: char) -> Option<u32> {
        self.index.get(&symbol).copied()
    }

    pub fn symbol(&self, index: u32) -> char {
        self.symbols[index as usize]
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Alphabet {
    type Err = Error;

    fn from_str(symbols: &str) -> Result<Self> {
        Self::new(symbols.chars())
    }
}

/// A cyclic word: alphabet indices read modulo the length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicWord {
    indices: Vec<u32>,
    alphabet: Arc<Alphabet>,
}

impl CyclicWord {
    /// Builds a word from text, rejecting symbols outside the alphabet.
    /// Any substitution (e.g. `N` for ambiguous bases) happens upstream;
    /// this is the single validation point.
    pub fn from_text(text: &str, alphabet: &Arc<Alphabet>) -> Result<Self> {
        let mut indices = Vec::with_capacity(text.len());
        for c in text.chars() {
            match alphabet.index_of(c) {
                Some(i) => indices.push(i),
                None => return Err(Error::SymbolNotInAlphabet(c)),
            }
        }
        if indices.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(CyclicWord {
            indices,
            alphabet: Arc::clone(alphabet),
        })
    }

    /// Builds a word directly from alphabet indices (opaque-token alphabets).
    pub fn from_indices(indices: Vec<u32>, alphabet: &Arc<Alphabet>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyWord);
        }
        let n = alphabet.size() as u32;
        for &i in &indices {
            if i >= n {
                return Err(Error::SymbolNotInAlphabet(char::REPLACEMENT_CHARACTER));
            }
        }
        Ok(CyclicWord {
            indices,
            alphabet: Arc::clone(alphabet),
        })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        false // length >= 1 by construction
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    /// Index at cyclic position `j` (wraps modulo the length).
    pub fn index_at(&self, j: usize) -> u32 {
        self.indices[j % self.indices.len()]
    }

    /// Cyclic concatenation `uv`. Both words must share an alphabet.
    pub fn concat(&self, other: &CyclicWord) -> Result<CyclicWord> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch);
        }
        let mut indices = self.indices.clone();
        indices.extend_from_slice(&other.indices);
        Ok(CyclicWord {
            indices,
            alphabet: Arc::clone(&self.alphabet),
        })
    }

    /// Lexicographically least rotation: the canonical representative of the
    /// necklace this word denotes.
    pub fn canonical_rotation(&self) -> CyclicWord {
        let n = self.indices.len();
        let mut best = 0usize;
        for start in 1..n {
            for off in 0..n {
                let a = self.indices[(start + off) % n];
                let b = self.indices[(best + off) % n];
                match a.cmp(&b) {
                    std::cmp::Ordering::Less => {
                        best = start;
                        break;
                    }
                    std::cmp::Ordering::Greater => break,
                    std::cmp::Ordering::Equal => continue,
                }
            }
        }
        let mut indices = Vec::with_capacity(n);
        for off in 0..n {
            indices.push(self.indices[(best + off) % n]);
        }
        CyclicWord {
            indices,
            alphabet: Arc::clone(&self.alphabet),
        }
    }

    /// True if both words denote the same necklace.
    pub fn same_necklace(&self, other: &CyclicWord) -> bool {
        self.alphabet == other.alphabet
            && self.len() == other.len()
            && self.canonical_rotation().indices == other.canonical_rotation().indices
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &i in &self.indices {
            write!(f, "{}", self.alphabet.symbol(i))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> Arc<Alphabet> {
        Arc::new(Alphabet::from_str("ABC").unwrap())
    }

    #[test]
    fn alphabet_rejects_duplicates() {
        assert!(matches!(
            Alphabet::from_str("ABA"),
            Err(Error::DuplicateSymbol('A'))
        ));
        assert!(matches!(Alphabet::from_str(""), Err(Error::EmptyAlphabet)));
    }

    #[test]
    fn word_indexing_wraps() {
        let w = CyclicWord::from_text("ABC", &abc()).unwrap();
        assert_eq!(w.index_at(0), 0);
        assert_eq!(w.index_at(3), 0);
        assert_eq!(w.index_at(5), 2);
    }

    #[test]
    fn word_rejects_foreign_symbols() {
        assert!(matches!(
            CyclicWord::from_text("ABD", &abc()),
            Err(Error::SymbolNotInAlphabet('D'))
        ));
    }

    #[test]
    fn canonical_rotation_is_least() {
        let a = abc();
        let w = CyclicWord::from_text("CAB", &a).unwrap();
        assert_eq!(w.canonical_rotation().to_string(), "ABC");
        let v = CyclicWord::from_text("BCA", &a).unwrap();
        assert!(w.same_necklace(&v));
        let u = CyclicWord::from_text("BAC", &a).unwrap();
        assert!(!w.same_necklace(&u));
    }

    #[test]
    fn concat_joins_in_order() {
        let a = abc();
        let u = CyclicWord::from_text("AB", &a).unwrap();
        let v = CyclicWord::from_text("CA", &a).unwrap();
        assert_eq!(u.concat(&v).unwrap().to_string(), "ABCA");
    }
}

//! De Bruijn entropy and relative entropy of cyclic words, with an
//! alignment-free string-similarity pipeline on top.
//!
//! The order-`k` de Bruijn quiver of a cyclic word records its (k+1)-grams
//! as a multidigraph on k-grams. The number of cyclic words sharing that
//! quiver follows from the matrix-tree and BEST theorems as a divisor sum
//! over Euler-circuit counts, and its log is the word's de Bruijn entropy —
//! a Boltzmann-style count of the microstates behind a local-statistics
//! macrostate. Differencing two quivers (reversing net-negative edges) gives
//! a symmetric relative entropy that compares words by local structure
//! alone, which this crate applies to distance matrices, hierarchical
//! clustering, and Newick tree export.
//!
//! Modules:
//!
//! - [`alphabet`]: alphabets and cyclic words.
//! - [`quiver`]: quiver construction, the boxminus/boxplus algebra,
//!   concatenation corrections, strongly connected components.
//! - [`entropy`]: log-domain spanning-tree/Euler-circuit counting, word and
//!   relative entropy, the binary order-1 closed form, order heuristics.
//! - [`oracle`]: brute-force ground truth (class enumeration, backtracking
//!   circuit counts, Burnside necklace counts, exact determinants).
//! - [`similarity`]: distance matrices, Levenshtein baseline, linkage,
//!   Newick, clade annotation.
//! - [`spin`]: finite circular Ising chains via the order-1 density of
//!   states.
//! - [`io`]: FASTA and GenBank ingestion, distance CSVs.

pub mod alphabet;
pub mod config;
pub mod entropy;
pub mod error;
pub mod io;
pub mod numeric;
pub mod oracle;
pub mod quiver;
pub mod similarity;
pub mod spin;

pub use alphabet::{Alphabet, CyclicWord};
pub use config::Tolerances;
pub use entropy::{
    binary_w1_closed_form, componentwise_entropy, eulerian_entropy, log_spanning_trees,
    relative_entropy, suggest_k, word_entropy, CountReport, EntropyValue, KSelection,
};
pub use error::{Error, Result};
pub use quiver::{
    boxminus, boxplus, concat_quiver, strongly_connected_components, ComponentLabeling, Quiver,
};
pub use similarity::{
    annotate_clades, distance_matrix, levenshtein, linkage, newick_export, DistanceMatrix,
    LinkageMethod, LinkageTree,
};
pub use spin::{CouplingConvention, SpinParams};

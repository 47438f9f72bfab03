use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet must contain at least one symbol")]
    EmptyAlphabet,

    #[error("duplicate symbol {0:?} in alphabet")]
    DuplicateSymbol(char),

    #[error("symbol {0:?} not in alphabet")]
    SymbolNotInAlphabet(char),

    #[error("words must contain at least one symbol")]
    EmptyWord,

    #[error("order k={k} out of range for word of length {len} (need 1 <= k < len)")]
    OrderOutOfRange { k: usize, len: usize },

    #[error("quivers have mismatched alphabets")]
    AlphabetMismatch,

    #[error("quivers have mismatched orders or vertex schemes")]
    SchemeMismatch,

    #[error("edge multiplicity overflow")]
    EdgeOverflow,

    #[error("quiver is not componentwise Eulerian: in-degree != out-degree at vertex {vertex}")]
    NotEulerian { vertex: usize },

    #[error("quiver has no edges")]
    EmptyQuiver,

    #[error("quiver is not strongly connected after dropping isolated vertices")]
    Disconnected,

    #[error("Laplacian minor has numerically nonpositive determinant (disconnected or unstable)")]
    NonPositiveDeterminant,

    #[error("concatenation corrections went negative; quivers do not match the supplied words")]
    ConcatCorrection,

    #[error("{0} is undefined for zero")]
    ZeroArgument(&'static str),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("invalid binary cell (x00={x00}, x*={xstar}) for length {ell}")]
    InvalidBinaryCell { x00: u64, xstar: u64, ell: u64 },

    #[error("word length {needed} exceeds enumeration guard {guard}")]
    EnumerationGuard { needed: u128, guard: u128 },

    #[error("edge count {edges} exceeds backtracking guard {guard}")]
    EdgeGuard { edges: u64, guard: u64 },

    #[error("operation requires a binary alphabet (got size {0})")]
    NotBinaryAlphabet(usize),

    #[error("invalid spin parameters: {0}")]
    InvalidSpinParams(&'static str),

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("distance matrix is invalid: {0}")]
    InvalidDistanceMatrix(String),

    #[error("linkage requires at least two observations")]
    TooFewLeaves,

    #[error("FASTA parse error: {0}")]
    FastaParse(String),

    #[error("GenBank parse error: {0}")]
    GenBankParse(String),

    #[error("Newick parse error: {0}")]
    NewickParse(String),

    #[error("CSV parse error: {0}")]
    CsvParse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

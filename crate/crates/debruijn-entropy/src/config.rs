/// Artifact-wide numeric tolerances.
///
/// Counts are held as natural-log magnitudes, so every equality check is a
/// log-domain comparison and every reported integer is a rounding of
/// `exp(log_w)`. Both thresholds sit well inside double-precision headroom
/// for the word lengths this crate targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute tolerance for log-domain comparisons.
    pub comparison: f64,
    /// Relative tolerance for snapping `exp(log_w)` to an exact integer.
    pub integer_snap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            comparison: 1e-9,
            integer_snap: 1e-6,
        }
    }
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        comparison: 1e-9,
        integer_snap: 1e-6,
    };
}

/// Largest exactly representable integer count (`2^53`); anything bigger is
/// reported only as a log value.
pub const MAX_EXACT_COUNT: f64 = 9_007_199_254_740_992.0;

/// Default vertex-count threshold above which quivers switch from dense
/// radix indexing to sparse discovered-vertex indexing (`2^20`).
pub const DEFAULT_DENSE_VERTEX_LIMIT: u128 = 1 << 20;

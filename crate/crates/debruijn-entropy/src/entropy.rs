//! Euler-circuit counting and de Bruijn entropy, entirely in log domain.
//!
//! The count of cyclic words sharing a quiver is assembled from the
//! matrix-tree theorem (spanning trees as a Laplacian cofactor) and the BEST
//! theorem (Euler circuits from spanning trees and degree factorials), summed
//! over the divisors of the entrywise gcd. Every intermediate value is a
//! natural-log magnitude: the counts overflow any integer type long before
//! realistic word lengths are reached.

use crate::alphabet::CyclicWord;
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::numeric::{divisors, gcd, log_sum_exp, snap_to_count, totient, LogFactorials};
use crate::quiver::{boxminus, canonical_pairing, strongly_connected_components, Quiver};

/// Per-divisor contribution to the class count (Euler circuits of `A/d`
/// weighted by the totient).
#[derive(Debug, Clone, PartialEq)]
pub struct DivisorTerm {
    pub divisor: u64,
    pub totient: u64,
    pub log_term: f64,
}

/// Spanning-tree, Euler-circuit, and class counts of one Eulerian quiver,
/// as natural logs.
#[derive(Debug, Clone, PartialEq)]
pub struct CountReport {
    /// `log t(Q)`: directed spanning trees toward a fixed vertex.
    pub log_spanning_trees: f64,
    /// `log c(Q) = log t(Q) + sum_v log((deg v - 1)!)`.
    pub log_euler_circuits: f64,
    /// `log W(A)`: log of the divisor sum.
    pub log_w: f64,
    pub divisor_terms: Vec<DivisorTerm>,
}

impl CountReport {
    pub fn count(&self, tol: &Tolerances) -> Option<u64> {
        snap_to_count(self.log_w, tol)
    }

    pub fn euler_circuit_count(&self, tol: &Tolerances) -> Option<u64> {
        snap_to_count(self.log_euler_circuits, tol)
    }
}

/// Contribution of one strongly connected component to an entropy value.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentContribution {
    /// 1-based component id from the SCC labeling.
    pub component: usize,
    pub nats: f64,
}

/// Natural-log magnitude of a positive count `W`, with its per-component
/// breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyValue {
    pub nats: f64,
    pub components: Vec<ComponentContribution>,
}

impl EntropyValue {
    pub fn zero() -> Self {
        EntropyValue {
            nats: 0.0,
            components: Vec::new(),
        }
    }

    /// The value rebased to `log_base`; entropies are conventionally read
    /// in base `|alphabet|` unless otherwise indicated.
    pub fn in_base(&self, base: f64) -> f64 {
        self.nats / base.ln()
    }

    /// `exp(nats)` as an exact integer when it snaps (default tolerances).
    pub fn count(&self) -> Option<u64> {
        self.count_with(&Tolerances::DEFAULT)
    }

    pub fn count_with(&self, tol: &Tolerances) -> Option<u64> {
        snap_to_count(self.nats, tol)
    }
}

/// Natural log of `t(Q)`, the number of directed spanning trees oriented
/// toward any fixed vertex: any diagonal cofactor of the Laplacian
/// `diag(row sums) - A`, computed by partial-pivot elimination on the minor
/// that deletes the first retained vertex. Zero-degree vertices are dropped
/// first; the quiver must then be a single strongly connected component with
/// in-degree = out-degree everywhere. A single-vertex quiver has `t = 1`
/// (the 0x0 minor has determinant 1).
pub fn log_spanning_trees(q: &Quiver) -> Result<f64> {
    let a = single_component_matrix(q)?;
    log_spanning_trees_compact(&a)
}

/// Full count report for an Eulerian quiver: `W(A)` as the divisor sum over
/// `d | gcd(A)` of `phi(d) c(A/d) / (d (A/d)!)`, accumulated by
/// largest-term-factored log-sum-exp.
pub fn eulerian_entropy(q: &Quiver) -> Result<CountReport> {
    let a = single_component_matrix(q)?;
    count_report_compact(&a)
}

/// Entropy of a componentwise Eulerian quiver: zero-degree vertices are
/// dropped, the rest decomposes into strongly connected components, and the
/// per-component entropies add. The all-zero quiver and single-vertex
/// components contribute exactly 0 nats.
pub fn componentwise_entropy(q: &Quiver) -> Result<EntropyValue> {
    q.validate_componentwise_eulerian()?;
    if q.edge_total() == 0 {
        return Ok(EntropyValue::zero());
    }
    let labeling = strongly_connected_components(q);
    let mut components = Vec::with_capacity(labeling.component_count());
    let mut nats = 0.0;
    for (idx, comp) in labeling.components().into_iter().enumerate() {
        let contribution = if comp.len() == 1 {
            0.0
        } else {
            let a = compact_matrix(q, &comp);
            // counts are at least 1; a negative log here is rounding noise
            count_report_compact(&a)?.log_w.max(0.0)
        };
        nats += contribution;
        components.push(ComponentContribution {
            component: idx + 1,
            nats: contribution,
        });
    }
    Ok(EntropyValue { nats, components })
}

/// Order-`k` de Bruijn entropy `H_k(w) = log W_k(w)` in nats; rebase with
/// [`EntropyValue::in_base`].
///
/// ```
/// use debruijn_entropy::{word_entropy, Alphabet, CyclicWord};
/// use std::sync::Arc;
///
/// let alphabet = Arc::new(Alphabet::from_str("ABCDR")?);
/// let w = CyclicWord::from_text("ABRACADABRA", &alphabet)?;
/// let h = word_entropy(&w, 1)?;
/// assert_eq!(h.count(), Some(12)); // 12 cyclic words share its 2-grams
/// assert!((h.nats - 12f64.ln()).abs() < 1e-12);
/// # Ok::<(), debruijn_entropy::Error>(())
/// ```
pub fn word_entropy(word: &CyclicWord, k: usize) -> Result<EntropyValue> {
    let q = Quiver::from_word(word, k)?;
    componentwise_entropy(&q)
}

/// Order-`k` relative de Bruijn entropy `H_k(w || w') = H(A_k(w) boxminus
/// A_k(w'))`. The operands are ordered canonically before the boxminus so
/// both argument orders return bit-identical values (the relative entropy is
/// symmetric: `H(A boxminus A') = H(A' boxminus A)`).
///
/// Zero means the two words have identical local structure at scale `k`,
/// however differently their blocks are arranged; it is not a pseudometric
/// (no triangle inequality).
///
/// ```
/// use debruijn_entropy::{relative_entropy, Alphabet, CyclicWord};
/// use std::sync::Arc;
///
/// let alphabet = Arc::new(Alphabet::from_str("ABCDR")?);
/// let u = CyclicWord::from_text("ABRACADABRA", &alphabet)?;
/// let v = CyclicWord::from_text("ABARACARBAD", &alphabet)?;
/// assert_eq!(relative_entropy(&u, &v, 1)?.count(), Some(1));
/// # Ok::<(), debruijn_entropy::Error>(())
/// ```
pub fn relative_entropy(w: &CyclicWord, w2: &CyclicWord, k: usize) -> Result<EntropyValue> {
    if w.alphabet() != w2.alphabet() {
        return Err(Error::AlphabetMismatch);
    }
    let qa = Quiver::from_word(w, k)?;
    let qb = Quiver::from_word(w2, k)?;
    relative_quiver_entropy(&qa, &qb)
}

/// Relative entropy of two quivers directly.
pub fn relative_quiver_entropy(a: &Quiver, b: &Quiver) -> Result<EntropyValue> {
    let (lo, hi) = canonical_pairing(a, b);
    componentwise_entropy(&boxminus(lo, hi)?)
}

/// Closed-form `log W_1(x00, x*; ell)` for binary order-1 quivers
/// `[[x00, x*], [x*, x11]]` with `x11 = ell - x00 - 2 x*`:
///
/// ```text
/// W_1 = x* / ((x00 + x*)(x* + x11))
///       * sum_{d | gcd(x00, x11, x*)} phi(d) C((x00+x*)/d, x*/d) C((x*+x11)/d, x*/d)
/// ```
///
/// The degenerate `x* = 0` case covers only the two constant words
/// (`x00` equal to 0 or `ell`), where `W = 1`.
pub fn binary_w1_closed_form(x00: u64, xstar: u64, ell: u64) -> Result<f64> {
    if ell == 0 || x00 + 2 * xstar > ell {
        return Err(Error::InvalidBinaryCell { x00, xstar, ell });
    }
    let x11 = ell - x00 - 2 * xstar;
    if xstar == 0 {
        return if x00 == 0 || x00 == ell {
            Ok(0.0)
        } else {
            Err(Error::InvalidBinaryCell { x00, xstar, ell })
        };
    }
    let g = gcd(gcd(x00, x11), xstar);
    let lf = LogFactorials::up_to(ell);
    let mut terms = Vec::new();
    for d in divisors(g)? {
        let phi = totient(d)?;
        let log_term = (phi as f64).ln()
            + lf.log_binomial((x00 + xstar) / d, xstar / d)
            + lf.log_binomial((xstar + x11) / d, xstar / d);
        terms.push(log_term);
    }
    let prefactor = (xstar as f64).ln() - ((x00 + xstar) as f64).ln() - ((xstar + x11) as f64).ln();
    Ok(prefactor + log_sum_exp(&terms))
}

/// How to pick the quiver order for a word of length `ell`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KSelection {
    /// `floor(log_n ell)`: the lower edge of the maximally informative range.
    Informative,
    /// `floor(log_n ell / omega)`: caps the determinant cost at linear time,
    /// where `omega` is the matrix-multiplication exponent in use.
    LinearTime { omega: f64 },
}

impl KSelection {
    pub const DEFAULT_OMEGA: f64 = 3.0;

    pub fn linear_time() -> Self {
        KSelection::LinearTime {
            omega: Self::DEFAULT_OMEGA,
        }
    }
}

/// Suggested order for a word of length `ell` over an alphabet of size `n`,
/// clamped to at least 1. Total: degenerate inputs also clamp.
pub fn suggest_k(ell: u64, n: usize, mode: KSelection) -> usize {
    if ell < 2 || n < 2 {
        return 1;
    }
    match mode {
        KSelection::Informative => {
            // largest k with n^k <= ell, in exact integer arithmetic
            let mut k = 0usize;
            let mut power = 1u128;
            let n = n as u128;
            let ell = ell as u128;
            while power.saturating_mul(n) <= ell {
                power *= n;
                k += 1;
            }
            k.max(1)
        }
        KSelection::LinearTime { omega } => {
            let v = (ell as f64).ln() / (n as f64).ln() / omega;
            ((v + 1e-9).floor() as usize).max(1)
        }
    }
}

/// Adjacency matrix over the retained vertices, after checking the quiver is
/// Eulerian and a single strongly connected component.
fn single_component_matrix(q: &Quiver) -> Result<Vec<Vec<u64>>> {
    q.validate_componentwise_eulerian()?;
    if q.edge_total() == 0 {
        return Err(Error::EmptyQuiver);
    }
    let labeling = strongly_connected_components(q);
    if labeling.component_count() != 1 {
        return Err(Error::Disconnected);
    }
    Ok(compact_matrix(q, labeling.retained()))
}

/// Dense submatrix over `vertices` (ascending).
fn compact_matrix(q: &Quiver, vertices: &[usize]) -> Vec<Vec<u64>> {
    let s = vertices.len();
    let mut a = vec![vec![0u64; s]; s];
    for ((u, v), m) in q.entries() {
        if let (Ok(pu), Ok(pv)) = (vertices.binary_search(&u), vertices.binary_search(&v)) {
            a[pu][pv] = m;
        }
    }
    a
}

fn count_report_compact(a: &[Vec<u64>]) -> Result<CountReport> {
    let degrees: Vec<u64> = a.iter().map(|row| row.iter().sum()).collect();
    let max_degree = degrees.iter().copied().max().unwrap_or(0);
    let lf = LogFactorials::up_to(max_degree.max(1));

    let mut g = 0u64;
    for row in a {
        for &m in row {
            if m > 0 {
                g = gcd(g, m);
            }
        }
    }
    debug_assert!(g >= 1, "caller guarantees at least one edge");

    let mut log_spanning = 0.0;
    let mut log_circuits = 0.0;
    let mut divisor_terms = Vec::new();
    for d in divisors(g)? {
        let scaled: Vec<Vec<u64>> = a
            .iter()
            .map(|row| row.iter().map(|&m| m / d).collect())
            .collect();
        let log_t = log_spanning_trees_compact(&scaled)?;
        let mut log_c = log_t;
        for &degree in &degrees {
            log_c += lf.lf(degree / d - 1);
        }
        let mut log_entry_factorials = 0.0;
        for row in &scaled {
            for &m in row {
                log_entry_factorials += lf.lf(m);
            }
        }
        let phi = totient(d)?;
        let log_term = (phi as f64).ln() + log_c - (d as f64).ln() - log_entry_factorials;
        if d == 1 {
            log_spanning = log_t;
            log_circuits = log_c;
        }
        divisor_terms.push(DivisorTerm {
            divisor: d,
            totient: phi,
            log_term,
        });
    }

    let terms: Vec<f64> = divisor_terms.iter().map(|t| t.log_term).collect();
    Ok(CountReport {
        log_spanning_trees: log_spanning,
        log_euler_circuits: log_circuits,
        log_w: log_sum_exp(&terms),
        divisor_terms,
    })
}

/// `log t` from the Laplacian minor that deletes vertex 0. The determinant
/// must come out strictly positive; zero or negative signals disconnection
/// or numerical trouble.
fn log_spanning_trees_compact(a: &[Vec<u64>]) -> Result<f64> {
    let s = a.len();
    if s <= 1 {
        return Ok(0.0);
    }
    let mut minor = vec![vec![0.0f64; s - 1]; s - 1];
    for i in 1..s {
        let row_sum: u64 = a[i].iter().sum();
        for j in 1..s {
            let mut val = -(a[i][j] as f64);
            if i == j {
                val += row_sum as f64;
            }
            minor[i - 1][j - 1] = val;
        }
    }
    let (sign, log_abs) = log_abs_det(minor);
    if sign <= 0.0 || !log_abs.is_finite() {
        return Err(Error::NonPositiveDeterminant);
    }
    Ok(log_abs)
}

/// Partial-pivot triangular factorization accumulating `sum log |pivot|`.
/// Returns (sign, log |det|); a zero pivot yields (0, -inf).
#[allow(clippy::needless_range_loop)]
fn log_abs_det(mut m: Vec<Vec<f64>>) -> (f64, f64) {
    let n = m.len();
    let mut sign = 1.0f64;
    let mut log_abs = 0.0f64;
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_mag = m[col][col].abs();
        for row in col + 1..n {
            let mag = m[row][col].abs();
            if mag > pivot_mag {
                pivot_row = row;
                pivot_mag = mag;
            }
        }
        if pivot_mag == 0.0 {
            return (0.0, f64::NEG_INFINITY);
        }
        if pivot_row != col {
            m.swap(pivot_row, col);
            sign = -sign;
        }
        let pivot = m[col][col];
        sign *= pivot.signum();
        log_abs += pivot_mag.ln();
        for row in col + 1..n {
            let factor = m[row][col] / pivot;
            if factor != 0.0 {
                for j in col..n {
                    m[row][j] -= factor * m[col][j];
                }
            }
        }
    }
    (sign, log_abs)
}

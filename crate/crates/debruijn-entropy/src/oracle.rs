//! Independent brute-force ground truth for small instances: exhaustive
//! class enumeration, backtracking Euler-circuit counts, Burnside necklace
//! counts, and an exact integer determinant. Nothing here shares a code path
//! with the log-domain engine it validates.

use num_bigint::{BigInt, BigUint, Sign};

use crate::alphabet::CyclicWord;
use crate::error::{Error, Result};
use crate::numeric::totient;
use crate::quiver::{strongly_connected_components, Quiver};

/// Enumeration ceiling for [`enumerate_class`].
pub const DEFAULT_ENUMERATION_GUARD: u128 = 10_000_000;

/// Edge ceiling for [`count_euler_circuits`].
pub const DEFAULT_EDGE_GUARD: u64 = 14;

/// The equivalence class of a word under "same order-k quiver": canonical
/// rotation representatives, lexicographically sorted.
#[derive(Debug, Clone)]
pub struct ClassEnumeration {
    pub representative: CyclicWord,
    pub k: usize,
    pub members: Vec<CyclicWord>,
}

impl ClassEnumeration {
    pub fn count(&self) -> u64 {
        self.members.len() as u64
    }
}

/// Exhaustively enumerates the cyclic words sharing `word`'s order-`k`
/// quiver. All `n^ell` words are tried when that fits the guard; otherwise
/// the search falls back to the distinct arrangements of `word`'s symbol
/// multiset (a quiver fixes the symbol counts, so this is still exhaustive).
pub fn enumerate_class(word: &CyclicWord, k: usize) -> Result<ClassEnumeration> {
    enumerate_class_guarded(word, k, DEFAULT_ENUMERATION_GUARD)
}

pub fn enumerate_class_guarded(
    word: &CyclicWord,
    k: usize,
    guard: u128,
) -> Result<ClassEnumeration> {
    let ell = word.len();
    let n = word.alphabet().size();
    let target = Quiver::from_word(word, k)?;

    let full = (n as u128).checked_pow(ell as u32);
    let candidates: Box<dyn Iterator<Item = Vec<u32>>> = match full {
        Some(total) if total <= guard => Box::new(OdometerWords::new(n as u32, ell)),
        _ => {
            let perms = multiset_permutation_count(word.indices(), guard)?;
            if perms > guard {
                return Err(Error::EnumerationGuard {
                    needed: perms,
                    guard,
                });
            }
            let mut sorted = word.indices().to_vec();
            sorted.sort_unstable();
            Box::new(MultisetPermutations::new(sorted))
        }
    };

    let mut members = Vec::new();
    for indices in candidates {
        if !is_least_rotation(&indices) {
            continue;
        }
        let candidate = CyclicWord::from_indices(indices, word.alphabet())?;
        if Quiver::from_word(&candidate, k)? == target {
            members.push(candidate);
        }
    }
    members.sort_by(|a, b| a.indices().cmp(b.indices()));
    Ok(ClassEnumeration {
        representative: word.clone(),
        k,
        members,
    })
}

/// True when no rotation of `indices` is lexicographically smaller.
fn is_least_rotation(indices: &[u32]) -> bool {
    let ell = indices.len();
    for start in 1..ell {
        for off in 0..ell {
            let rotated = indices[(start + off) % ell];
            let base = indices[off];
            if rotated < base {
                return false;
            }
            if rotated > base {
                break;
            }
        }
    }
    true
}

/// Number of distinct arrangements of the symbol multiset, or `guard + 1` as
/// soon as the running product exceeds it.
fn multiset_permutation_count(indices: &[u32], guard: u128) -> Result<u128> {
    let mut counts = std::collections::BTreeMap::new();
    for &i in indices {
        *counts.entry(i).or_insert(0u64) += 1;
    }
    let mut remaining = indices.len() as u64;
    let mut total = 1u128;
    for (_, c) in counts {
        for j in 1..=c {
            total = total
                .checked_mul((remaining - c + j) as u128)
                .ok_or(Error::Overflow("multiset permutation count"))?
                / j as u128;
            if total > guard {
                return Ok(guard + 1);
            }
        }
        remaining -= c;
    }
    Ok(total)
}

/// All base-`n` digit strings of a fixed length, ascending.
struct OdometerWords {
    n: u32,
    current: Option<Vec<u32>>,
}

impl OdometerWords {
    fn new(n: u32, ell: usize) -> Self {
        OdometerWords {
            n,
            current: Some(vec![0; ell]),
        }
    }
}

impl Iterator for OdometerWords {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let out = self.current.clone()?;
        let digits = self.current.as_mut().expect("checked above");
        let mut pos = digits.len();
        loop {
            if pos == 0 {
                self.current = None;
                break;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < self.n {
                break;
            }
            digits[pos] = 0;
        }
        Some(out)
    }
}

/// Distinct permutations of a sorted multiset, in lexicographic order.
struct MultisetPermutations {
    current: Option<Vec<u32>>,
}

impl MultisetPermutations {
    fn new(sorted: Vec<u32>) -> Self {
        MultisetPermutations {
            current: Some(sorted),
        }
    }
}

impl Iterator for MultisetPermutations {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let out = self.current.clone()?;
        let v = self.current.as_mut().expect("checked above");
        // standard next-permutation step
        let mut i = v.len().saturating_sub(1);
        while i > 0 && v[i - 1] >= v[i] {
            i -= 1;
        }
        if i == 0 {
            self.current = None;
            return Some(out);
        }
        let mut j = v.len() - 1;
        while v[j] <= v[i - 1] {
            j -= 1;
        }
        v.swap(i - 1, j);
        v[i..].reverse();
        Some(out)
    }
}

/// Exact Euler-circuit count by backtracking, for quivers with at most
/// [`DEFAULT_EDGE_GUARD`] edges. Parallel edges count as distinguishable,
/// matching the BEST-theorem convention; circuits are counted up to
/// rotation (trails from a fixed start vertex, divided by its degree).
pub fn count_euler_circuits(q: &Quiver) -> Result<u64> {
    count_euler_circuits_guarded(q, DEFAULT_EDGE_GUARD)
}

pub fn count_euler_circuits_guarded(q: &Quiver, guard: u64) -> Result<u64> {
    let edges = q.edge_total();
    if edges == 0 {
        return Err(Error::EmptyQuiver);
    }
    if edges > guard {
        return Err(Error::EdgeGuard { edges, guard });
    }
    q.validate_componentwise_eulerian()?;
    let labeling = strongly_connected_components(q);
    if labeling.component_count() != 1 {
        return Err(Error::Disconnected);
    }

    let vertices = labeling.retained().to_vec();
    let s = vertices.len();
    let mut remaining = vec![vec![0u64; s]; s];
    for ((u, v), m) in q.entries() {
        let pu = vertices.binary_search(&u).expect("retained vertex");
        let pv = vertices.binary_search(&v).expect("retained vertex");
        remaining[pu][pv] = m;
    }
    let start_degree: u64 = remaining[0].iter().sum();

    fn trails(remaining: &mut Vec<Vec<u64>>, cur: usize, left: u64, start: usize) -> u128 {
        if left == 0 {
            return u128::from(cur == start);
        }
        let mut total = 0u128;
        for next in 0..remaining.len() {
            let mult = remaining[cur][next];
            if mult > 0 {
                remaining[cur][next] -= 1;
                total += mult as u128 * trails(remaining, next, left - 1, start);
                remaining[cur][next] += 1;
            }
        }
        total
    }

    let from_start = trails(&mut remaining, 0, edges, 0);
    debug_assert_eq!(from_start % start_degree as u128, 0);
    u64::try_from(from_start / start_degree as u128)
        .map_err(|_| Error::Overflow("euler circuit count"))
}

/// Necklace count `(1/ell) sum_{d | ell} phi(d) n^(ell/d)` via the
/// Cauchy-Frobenius (Burnside) lemma.
pub fn burnside_necklaces(n: u64, ell: u64) -> Result<u64> {
    if n == 0 || ell == 0 {
        return Err(Error::ZeroArgument("burnside_necklaces"));
    }
    let mut total = 0u128;
    for d in crate::numeric::divisors(ell)? {
        let phi = totient(d)? as u128;
        let power = (n as u128)
            .checked_pow((ell / d) as u32)
            .ok_or(Error::Overflow("burnside_necklaces"))?;
        total = total
            .checked_add(
                phi.checked_mul(power)
                    .ok_or(Error::Overflow("burnside_necklaces"))?,
            )
            .ok_or(Error::Overflow("burnside_necklaces"))?;
    }
    let count = total / ell as u128;
    u64::try_from(count).map_err(|_| Error::Overflow("burnside_necklaces"))
}

/// Exact `t(Q)` by fraction-free (Bareiss) elimination over big integers on
/// the same Laplacian minor the floating-point engine factorizes. Intended
/// as a cross-check at small dimensions.
pub fn spanning_tree_count_exact(q: &Quiver) -> Result<BigUint> {
    q.validate_componentwise_eulerian()?;
    if q.edge_total() == 0 {
        return Err(Error::EmptyQuiver);
    }
    let labeling = strongly_connected_components(q);
    if labeling.component_count() != 1 {
        return Err(Error::Disconnected);
    }
    let vertices = labeling.retained().to_vec();
    let s = vertices.len();
    if s == 1 {
        return Ok(BigUint::from(1u32));
    }

    let mut a = vec![vec![0i64; s]; s];
    for ((u, v), m) in q.entries() {
        let pu = vertices.binary_search(&u).expect("retained vertex");
        let pv = vertices.binary_search(&v).expect("retained vertex");
        a[pu][pv] = m as i64;
    }
    let dim = s - 1;
    let mut m: Vec<Vec<BigInt>> = (1..s)
        .map(|i| {
            let row_sum: i64 = a[i].iter().sum();
            (1..s)
                .map(|j| {
                    let mut val = -a[i][j];
                    if i == j {
                        val += row_sum;
                    }
                    BigInt::from(val)
                })
                .collect()
        })
        .collect();

    let zero = BigInt::from(0);
    let mut sign = 1i8;
    let mut prev = BigInt::from(1);
    for col in 0..dim {
        if m[col][col] == zero {
            match (col + 1..dim).find(|&r| m[r][col] != zero) {
                Some(r) => {
                    m.swap(col, r);
                    sign = -sign;
                }
                None => return Ok(BigUint::from(0u32)),
            }
        }
        for row in col + 1..dim {
            for j in col + 1..dim {
                let num = &m[row][j] * &m[col][col] - &m[row][col] * &m[col][j];
                m[row][j] = num / &prev;
            }
            m[row][col] = zero.clone();
        }
        prev = m[col][col].clone();
    }
    let det = if sign < 0 {
        -m[dim - 1][dim - 1].clone()
    } else {
        m[dim - 1][dim - 1].clone()
    };
    match det.sign() {
        Sign::Minus => Err(Error::NonPositiveDeterminant),
        _ => Ok(det.to_biguint().expect("non-negative determinant")),
    }
}

/// Natural log of a big integer, safe for values far beyond `f64` range.
pub fn log_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 53 {
        let mut v = 0u64;
        for (i, d) in x.to_u64_digits().iter().enumerate() {
            v |= d << (64 * i);
        }
        return (v as f64).ln();
    }
    let shift = bits - 53;
    let top = x >> shift;
    let digits = top.to_u64_digits();
    (digits[0] as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use std::sync::Arc;

    fn word(text: &str, alphabet: &str) -> CyclicWord {
        let a = Arc::new(Alphabet::from_str(alphabet).unwrap());
        CyclicWord::from_text(text, &a).unwrap()
    }

    #[test]
    fn burnside_examples() {
        assert_eq!(burnside_necklaces(2, 16).unwrap(), 4116);
        assert_eq!(burnside_necklaces(7, 1).unwrap(), 7);
        // {0000, 0001, 0011, 0101, 0111, 1111}
        assert_eq!(burnside_necklaces(2, 4).unwrap(), 6);
        assert!(burnside_necklaces(0, 3).is_err());
        assert!(burnside_necklaces(2, 200).is_err());
    }

    #[test]
    fn euler_circuit_golden_counts() {
        let q = Quiver::from_word(&word("ABRACADABRA", "ABCDR"), 1).unwrap();
        assert_eq!(count_euler_circuits(&q).unwrap(), 96);
        let q = Quiver::from_word(&word("BARBARA", "ABR"), 1).unwrap();
        assert_eq!(count_euler_circuits(&q).unwrap(), 8);
    }

    #[test]
    fn three_loops_have_two_circuits() {
        let q = Quiver::from_dense_matrix(0, 1, &[vec![3]]).unwrap();
        assert_eq!(count_euler_circuits(&q).unwrap(), 2);
    }

    #[test]
    fn circuit_count_guards() {
        let q = Quiver::from_dense_matrix(0, 1, &[vec![20]]).unwrap();
        assert!(matches!(
            count_euler_circuits(&q),
            Err(Error::EdgeGuard { edges: 20, .. })
        ));
        let unbalanced = Quiver::from_dense_matrix(1, 2, &[vec![0, 1], vec![0, 0]]).unwrap();
        assert!(count_euler_circuits(&unbalanced).is_err());
    }

    #[test]
    fn barbara_class_members() {
        let w = word("BARBARA", "ABR");
        let class = enumerate_class(&w, 1).unwrap();
        assert_eq!(class.count(), 2);
        let other = word("BARARBA", "ABR");
        assert!(class.members.iter().any(|m| m.same_necklace(&w)));
        assert!(class.members.iter().any(|m| m.same_necklace(&other)));
        // members are canonical rotations in ascending order
        for m in &class.members {
            assert_eq!(m.indices(), m.canonical_rotation().indices());
        }
        assert!(class.members[0].indices() < class.members[1].indices());
    }

    #[test]
    fn constant_word_class_is_singleton() {
        let w = word("0000000", "01");
        let class = enumerate_class(&w, 1).unwrap();
        assert_eq!(class.count(), 1);
        assert!(class.members[0].same_necklace(&w));
    }

    #[test]
    fn enumeration_guard_trips() {
        // 4^20 words and a multiset with ~4e9 arrangements: both over guard
        let text = "ACGT".repeat(5);
        let w = word(&text, "ACGT");
        assert!(matches!(
            enumerate_class_guarded(&w, 1, 1000),
            Err(Error::EnumerationGuard { .. })
        ));
    }

    #[test]
    fn exact_spanning_trees_match_golden() {
        let q = Quiver::from_word(&word("ABRACADABRA", "ABCDR"), 1).unwrap();
        assert_eq!(spanning_tree_count_exact(&q).unwrap(), BigUint::from(4u32));
        let q = Quiver::from_word(&word("BARBARA", "ABR"), 1).unwrap();
        assert_eq!(spanning_tree_count_exact(&q).unwrap(), BigUint::from(4u32));
    }

    #[test]
    fn log_big_handles_huge_values() {
        let x = BigUint::from(2u32).pow(400);
        assert!((log_big(&x) - 400.0 * std::f64::consts::LN_2).abs() < 1e-9);
        assert!((log_big(&BigUint::from(96u32)) - 96.0f64.ln()).abs() < 1e-12);
    }
}

//! Corpus-level similarity: pairwise relative-entropy distance matrices, a
//! Levenshtein baseline, agglomerative linkage, Newick export, and clade
//! annotation.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::alphabet::CyclicWord;
use crate::config::Tolerances;
use crate::entropy::{componentwise_entropy, relative_quiver_entropy};
use crate::error::{Error, Result};
use crate::quiver::{concat_quiver, Quiver};

/// Symmetric nonnegative distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    size: usize,
    values: Vec<f64>,
    k: Option<usize>,
    normalized: bool,
    /// Pairs where a zero normalizer forced a fall back to the
    /// unnormalized value.
    fallback_pairs: Vec<(usize, usize)>,
}

impl DistanceMatrix {
    /// Validates symmetry, finiteness, nonnegativity, and a zero diagonal.
    pub fn from_values(rows: &[Vec<f64>]) -> Result<DistanceMatrix> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidDistanceMatrix("matrix is not square".into()));
        }
        let mut values = vec![0.0; n * n];
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidDistanceMatrix(format!(
                        "entry ({i},{j}) = {v} is not a finite nonnegative value"
                    )));
                }
                if i == j && v != 0.0 {
                    return Err(Error::InvalidDistanceMatrix(format!(
                        "diagonal entry ({i},{i}) = {v} is nonzero"
                    )));
                }
                if rows[j][i] != v {
                    return Err(Error::InvalidDistanceMatrix(format!(
                        "entries ({i},{j}) and ({j},{i}) differ"
                    )));
                }
                values[i * n + j] = v;
            }
        }
        Ok(DistanceMatrix {
            size: n,
            values,
            k: None,
            normalized: false,
            fallback_pairs: Vec::new(),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.size + j]
    }

    /// Quiver order the distances were computed at, when known.
    pub fn order(&self) -> Option<usize> {
        self.k
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn fallback_pairs(&self) -> &[(usize, usize)] {
        &self.fallback_pairs
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.size)
            .map(|i| self.values[i * self.size..(i + 1) * self.size].to_vec())
            .collect()
    }
}

/// Pairwise relative de Bruijn entropies at order `k`; when `normalize` is
/// set, each entry is divided by the entropy of the concatenated word's
/// quiver. A zero normalizer with a zero numerator gives distance 0; with a
/// positive numerator the unnormalized value is kept and the pair flagged.
pub fn distance_matrix(words: &[CyclicWord], k: usize, normalize: bool) -> Result<DistanceMatrix> {
    let n = words.len();
    if n == 0 {
        return Err(Error::SizeMismatch("no words given".into()));
    }
    for w in words {
        if w.alphabet() != words[0].alphabet() {
            return Err(Error::AlphabetMismatch);
        }
        if k == 0 || k >= w.len() {
            return Err(Error::OrderOutOfRange { k, len: w.len() });
        }
    }
    let quivers: Vec<Quiver> = words
        .iter()
        .map(|w| Quiver::from_word(w, k))
        .collect::<Result<_>>()?;

    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    // entries are independent; writes land in disjoint slots, so the result
    // is identical regardless of schedule
    let computed: Vec<Result<(f64, bool)>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let numer = relative_quiver_entropy(&quivers[i], &quivers[j])?.nats;
            if !normalize {
                return Ok((numer, false));
            }
            let concat = concat_quiver(&words[i], &words[j], &quivers[i], &quivers[j])?;
            let denom = componentwise_entropy(&concat)?.nats;
            Ok(normalized_entry(numer, denom))
        })
        .collect();

    let mut values = vec![0.0; n * n];
    let mut fallback_pairs = Vec::new();
    for (&(i, j), result) in pairs.iter().zip(computed) {
        let (v, fell_back) = result?;
        values[i * n + j] = v;
        values[j * n + i] = v;
        if fell_back {
            fallback_pairs.push((i, j));
        }
    }
    Ok(DistanceMatrix {
        size: n,
        values,
        k: Some(k),
        normalized: normalize,
        fallback_pairs,
    })
}

/// Applies the normalizer: a zero (within tolerance) concatenated-quiver
/// entropy with a zero numerator means identical local structure and gives
/// distance 0; a zero normalizer with a positive numerator keeps the
/// unnormalized value and reports the fallback, so the pipeline stays total
/// instead of emitting NaN.
fn normalized_entry(numerator: f64, denominator: f64) -> (f64, bool) {
    let tol = Tolerances::DEFAULT.comparison;
    if denominator > tol {
        (numerator / denominator, false)
    } else if numerator <= tol {
        (0.0, false)
    } else {
        (numerator, true)
    }
}

/// Unit-cost edit distance between linear (non-cyclic) symbol slices.
pub fn levenshtein_slices<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    let mut current: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut previous = current[0];
        current[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let substitution = previous + usize::from(ca != cb);
            previous = current[j + 1];
            current[j + 1] = substitution.min(previous + 1).min(current[j] + 1);
        }
    }
    current[b.len()]
}

/// Unit-cost edit distance between two strings (per char).
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    levenshtein_slices(&a, &b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkageMethod {
    Single,
    Average,
    Complete,
}

impl std::str::FromStr for LinkageMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(LinkageMethod::Single),
            "average" => Ok(LinkageMethod::Average),
            "complete" => Ok(LinkageMethod::Complete),
            other => Err(Error::SizeMismatch(format!(
                "unknown linkage method {other:?} (expected single, average, or complete)"
            ))),
        }
    }
}

/// One agglomeration step. Cluster ids: leaves are `0..n`, the cluster made
/// by merge `m` is `n + m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Merge {
    pub first: usize,
    pub second: usize,
    pub height: f64,
}

/// A stepwise dendrogram: `n - 1` merges over `n` leaves.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkageTree {
    leaves: usize,
    merges: Vec<Merge>,
}

impl LinkageTree {
    pub fn leaves(&self) -> usize {
        self.leaves
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Height of a cluster id (leaves sit at 0).
    pub fn node_height(&self, id: usize) -> f64 {
        if id < self.leaves {
            0.0
        } else {
            self.merges[id - self.leaves].height
        }
    }

    /// Leaf ids under a cluster id, ascending.
    pub fn leaf_members(&self, id: usize) -> Vec<usize> {
        let mut members = Vec::new();
        let mut pending = vec![id];
        while let Some(c) = pending.pop() {
            if c < self.leaves {
                members.push(c);
            } else {
                let m = &self.merges[c - self.leaves];
                pending.push(m.first);
                pending.push(m.second);
            }
        }
        members.sort_unstable();
        members
    }
}

/// Lance-Williams agglomeration. Ties at the minimal distance break toward
/// the lexicographically smallest cluster-id pair, so results are identical
/// across platforms.
///
/// ```
/// use debruijn_entropy::{linkage, newick_export, DistanceMatrix, LinkageMethod};
///
/// let d = DistanceMatrix::from_values(&[
///     vec![0.0, 1.0, 4.0],
///     vec![1.0, 0.0, 6.0],
///     vec![4.0, 6.0, 0.0],
/// ])?;
/// let tree = linkage(&d, LinkageMethod::Average)?;
/// let labels: Vec<String> = ["L1", "L2", "L3"].iter().map(|s| s.to_string()).collect();
/// assert_eq!(newick_export(&tree, &labels)?, "((L1:1,L2:1):4,L3:5);");
/// # Ok::<(), debruijn_entropy::Error>(())
/// ```
pub fn linkage(d: &DistanceMatrix, method: LinkageMethod) -> Result<LinkageTree> {
    let n = d.size();
    if n < 2 {
        return Err(Error::TooFewLeaves);
    }
    let mut dist: std::collections::BTreeMap<(usize, usize), f64> =
        std::collections::BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            dist.insert((i, j), d.get(i, j));
        }
    }
    let mut sizes: std::collections::BTreeMap<usize, usize> = (0..n).map(|i| (i, 1)).collect();
    let mut merges = Vec::with_capacity(n - 1);

    for step in 0..n - 1 {
        let (&(a, b), &height) = dist
            .iter()
            .min_by(|(pa, va), (pb, vb)| va.partial_cmp(vb).unwrap().then(pa.cmp(pb)))
            .expect("at least one active pair");

        let new_id = n + step;
        let size_a = sizes[&a];
        let size_b = sizes[&b];
        let others: Vec<usize> = sizes
            .keys()
            .copied()
            .filter(|&c| c != a && c != b)
            .collect();
        for c in others {
            let da = dist[&pair_key(a, c)];
            let db = dist[&pair_key(b, c)];
            let updated = match method {
                LinkageMethod::Single => da.min(db),
                LinkageMethod::Complete => da.max(db),
                LinkageMethod::Average => {
                    (size_a as f64 * da + size_b as f64 * db) / (size_a + size_b) as f64
                }
            };
            dist.insert(pair_key(new_id, c), updated);
        }
        dist.retain(|&(x, y), _| x != a && x != b && y != a && y != b);
        sizes.remove(&a);
        sizes.remove(&b);
        sizes.insert(new_id, size_a + size_b);
        merges.push(Merge {
            first: a,
            second: b,
            height,
        });
    }
    Ok(LinkageTree { leaves: n, merges })
}

fn pair_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Serializes a linkage tree as Newick with branch lengths (parent height
/// minus child height; leaves at height 0). Labels are quoted when they
/// contain metacharacters. Optional per-merge internal labels (from
/// [`annotate_clades`]) become internal node names.
pub fn newick_export(t: &LinkageTree, labels: &[String]) -> Result<String> {
    newick_export_annotated(t, labels, None)
}

pub fn newick_export_annotated(
    t: &LinkageTree,
    labels: &[String],
    clade_labels: Option<&[Option<String>]>,
) -> Result<String> {
    if labels.len() != t.leaves() {
        return Err(Error::SizeMismatch(format!(
            "{} labels for {} leaves",
            labels.len(),
            t.leaves()
        )));
    }
    if let Some(cl) = clade_labels {
        if cl.len() != t.merges().len() {
            return Err(Error::SizeMismatch(format!(
                "{} clade labels for {} merges",
                cl.len(),
                t.merges().len()
            )));
        }
    }

    fn render(
        t: &LinkageTree,
        labels: &[String],
        clade_labels: Option<&[Option<String>]>,
        id: usize,
        out: &mut String,
    ) {
        if id < t.leaves() {
            out.push_str(&escape_newick_label(&labels[id]));
            return;
        }
        let merge = &t.merges()[id - t.leaves()];
        // taller child first; ties break toward the smaller id
        let mut children = [merge.first, merge.second];
        children.sort_by(|&x, &y| {
            t.node_height(y)
                .partial_cmp(&t.node_height(x))
                .unwrap()
                .then(x.cmp(&y))
        });
        out.push('(');
        for (pos, &child) in children.iter().enumerate() {
            if pos > 0 {
                out.push(',');
            }
            render(t, labels, clade_labels, child, out);
            out.push(':');
            out.push_str(&format!("{}", merge.height - t.node_height(child)));
        }
        out.push(')');
        if let Some(cl) = clade_labels {
            if let Some(Some(name)) = cl.get(id - t.leaves()) {
                out.push_str(&escape_newick_label(name));
            }
        }
    }

    let mut out = String::new();
    let root = t.leaves() + t.merges().len() - 1;
    render(t, labels, clade_labels, root, &mut out);
    out.push(';');
    Ok(out)
}

fn escape_newick_label(label: &str) -> String {
    let needs_quoting = label
        .chars()
        .any(|c| c.is_whitespace() || "()[]{}':;,=".contains(c));
    if needs_quoting {
        format!("'{}'", label.replace('\'', "''"))
    } else {
        label.to_string()
    }
}

/// A parsed Newick subtree: `branch` is the length up to the parent.
#[derive(Debug, Clone, PartialEq)]
pub struct NewickNode {
    pub label: Option<String>,
    pub branch: Option<f64>,
    pub children: Vec<NewickNode>,
}

/// Parses a single ';'-terminated Newick tree.
pub fn parse_newick(text: &str) -> Result<NewickNode> {
    let chars: Vec<char> = text.trim().chars().collect();
    let mut pos = 0usize;
    let node = parse_newick_node(&chars, &mut pos)?;
    if pos >= chars.len() || chars[pos] != ';' {
        return Err(Error::NewickParse("missing terminating ';'".into()));
    }
    Ok(node)
}

fn parse_newick_node(chars: &[char], pos: &mut usize) -> Result<NewickNode> {
    let mut children = Vec::new();
    if *pos < chars.len() && chars[*pos] == '(' {
        *pos += 1;
        loop {
            children.push(parse_newick_node(chars, pos)?);
            match chars.get(*pos) {
                Some(',') => *pos += 1,
                Some(')') => {
                    *pos += 1;
                    break;
                }
                other => {
                    return Err(Error::NewickParse(format!(
                        "expected ',' or ')', found {other:?}"
                    )))
                }
            }
        }
    }
    let label = parse_newick_label(chars, pos)?;
    let branch = if chars.get(*pos) == Some(&':') {
        *pos += 1;
        let start = *pos;
        while *pos < chars.len() && !",();:".contains(chars[*pos]) {
            *pos += 1;
        }
        let text: String = chars[start..*pos].iter().collect();
        Some(
            text.trim()
                .parse::<f64>()
                .map_err(|e| Error::NewickParse(format!("bad branch length {text:?}: {e}")))?,
        )
    } else {
        None
    };
    Ok(NewickNode {
        label,
        branch,
        children,
    })
}

fn parse_newick_label(chars: &[char], pos: &mut usize) -> Result<Option<String>> {
    match chars.get(*pos) {
        Some('\'') => {
            *pos += 1;
            let mut label = String::new();
            loop {
                match chars.get(*pos) {
                    Some('\'') if chars.get(*pos + 1) == Some(&'\'') => {
                        label.push('\'');
                        *pos += 2;
                    }
                    Some('\'') => {
                        *pos += 1;
                        break;
                    }
                    Some(&c) => {
                        label.push(c);
                        *pos += 1;
                    }
                    None => return Err(Error::NewickParse("unterminated quoted label".into())),
                }
            }
            Ok(Some(label))
        }
        _ => {
            let start = *pos;
            while *pos < chars.len() && !",();:".contains(chars[*pos]) {
                *pos += 1;
            }
            if *pos == start {
                Ok(None)
            } else {
                Ok(Some(chars[start..*pos].iter().collect()))
            }
        }
    }
}

/// Labels each internal node with the most general taxon shared by all of
/// its leaves and by no outside leaf; `None` where no such taxon exists.
/// Lineages are ordered general to specific, one per leaf.
pub fn annotate_clades(t: &LinkageTree, leaf_taxa: &[Vec<String>]) -> Result<Vec<Option<String>>> {
    if leaf_taxa.len() != t.leaves() {
        return Err(Error::SizeMismatch(format!(
            "{} lineages for {} leaves",
            leaf_taxa.len(),
            t.leaves()
        )));
    }
    let taxa_sets: Vec<BTreeSet<&str>> = leaf_taxa
        .iter()
        .map(|lineage| lineage.iter().map(String::as_str).collect())
        .collect();

    let mut labels = Vec::with_capacity(t.merges().len());
    for m in 0..t.merges().len() {
        let members = t.leaf_members(t.leaves() + m);
        let mut shared = taxa_sets[members[0]].clone();
        for &leaf in &members[1..] {
            shared = shared.intersection(&taxa_sets[leaf]).copied().collect();
        }
        let member_set: BTreeSet<usize> = members.iter().copied().collect();
        for (leaf, outside) in taxa_sets.iter().enumerate() {
            if !member_set.contains(&leaf) {
                for name in outside {
                    shared.remove(name);
                }
            }
        }
        // most general = earliest entry of a member lineage present in the set
        let label = leaf_taxa[members[0]]
            .iter()
            .find(|name| shared.contains(name.as_str()))
            .cloned();
        labels.push(label);
    }
    Ok(labels)
}

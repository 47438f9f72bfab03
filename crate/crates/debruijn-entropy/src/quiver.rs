//! De Bruijn quivers and the quiver algebra.
//!
//! The order-`k` quiver of a cyclic word has one edge per cyclic position,
//! from the k-gram starting there to the k-gram one step later, with
//! multiplicities accumulated. Wrap edges are always included: entropy needs
//! Eulerian (in-degree = out-degree) quivers, and only cyclic words give
//! them. Vertices are indexed either densely (radix value of the k-gram over
//! the whole `n^k` universe) or sparsely (discovered k-grams only); the two
//! schemes have identical semantics and the dense one is picked whenever
//! `n^k` stays below a configurable limit.

use std::collections::BTreeMap;

use crate::alphabet::CyclicWord;
use crate::config::DEFAULT_DENSE_VERTEX_LIMIT;
use crate::error::{Error, Result};

type Gram = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Scheme {
    /// Vertex id = big-endian radix value of the k-gram; universe `n^k`.
    Dense { vertex_count: usize },
    /// Vertex id = position in `grams`; only seen k-grams get vertices, and
    /// `index` maps each gram back to its contiguous id.
    Sparse {
        grams: Vec<Gram>,
        index: BTreeMap<Gram, usize>,
    },
}

impl Scheme {
    fn sparse_from_grams(grams: Vec<Gram>) -> Scheme {
        let index = grams
            .iter()
            .enumerate()
            .map(|(i, g)| (g.clone(), i))
            .collect();
        Scheme::Sparse { grams, index }
    }
}

/// Sparse nonnegative-integer adjacency matrix with k-gram vertex labels.
#[derive(Debug, Clone)]
pub struct Quiver {
    k: usize,
    alphabet_size: usize,
    scheme: Scheme,
    /// (row, col) -> multiplicity; absent means zero.
    entries: BTreeMap<(usize, usize), u64>,
}

impl Quiver {
    /// Order-`k` de Bruijn quiver of a cyclic word, with the default dense
    /// vertex limit.
    pub fn from_word(word: &CyclicWord, k: usize) -> Result<Quiver> {
        Self::from_word_with_limit(word, k, DEFAULT_DENSE_VERTEX_LIMIT)
    }

    /// As [`Quiver::from_word`], switching to sparse discovered-vertex
    /// indexing when `n^k` exceeds `dense_vertex_limit`.
    pub fn from_word_with_limit(
        word: &CyclicWord,
        k: usize,
        dense_vertex_limit: u128,
    ) -> Result<Quiver> {
        let ell = word.len();
        if k == 0 || k >= ell {
            return Err(Error::OrderOutOfRange { k, len: ell });
        }
        let n = word.alphabet().size();
        let mut quiver = match dense_vertex_count(n, k, dense_vertex_limit) {
            Some(vertex_count) => Quiver {
                k,
                alphabet_size: n,
                scheme: Scheme::Dense { vertex_count },
                entries: BTreeMap::new(),
            },
            None => Quiver {
                k,
                alphabet_size: n,
                scheme: Scheme::sparse_from_grams(Vec::new()),
                entries: BTreeMap::new(),
            },
        };

        let indices = word.indices();
        let mut from = quiver.vertex_for_gram(&gram_at(indices, 0, k));
        for j in 0..ell {
            let to = quiver.vertex_for_gram(&gram_at(indices, j + 1, k));
            quiver.add_edge(from, to, 1)?;
            from = to;
        }
        Ok(quiver)
    }

    /// Builds a quiver from a full `n^k x n^k` adjacency matrix in radix
    /// vertex order. Intended for small hand-specified quivers.
    pub fn from_dense_matrix(k: usize, alphabet_size: usize, rows: &[Vec<u64>]) -> Result<Quiver> {
        let vertex_count = dense_vertex_count(alphabet_size, k, u128::MAX)
            .ok_or(Error::Overflow("dense vertex count"))?;
        if rows.len() != vertex_count || rows.iter().any(|r| r.len() != vertex_count) {
            return Err(Error::SizeMismatch(format!(
                "expected a {vertex_count}x{vertex_count} matrix"
            )));
        }
        let mut entries = BTreeMap::new();
        for (i, row) in rows.iter().enumerate() {
            for (j, &m) in row.iter().enumerate() {
                if m > 0 {
                    entries.insert((i, j), m);
                }
            }
        }
        Ok(Quiver {
            k,
            alphabet_size,
            scheme: Scheme::Dense { vertex_count },
            entries,
        })
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    /// Size of the vertex universe (dense: `n^k`; sparse: discovered grams).
    pub fn vertex_count(&self) -> usize {
        match &self.scheme {
            Scheme::Dense { vertex_count } => *vertex_count,
            Scheme::Sparse { grams, .. } => grams.len(),
        }
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.scheme, Scheme::Dense { .. })
    }

    /// Multiplicity of the edge `(from, to)`; absent edges are zero.
    pub fn entry(&self, from: usize, to: usize) -> u64 {
        self.entries.get(&(from, to)).copied().unwrap_or(0)
    }

    /// Positive entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), u64)> + '_ {
        self.entries.iter().map(|(&e, &m)| (e, m))
    }

    pub fn edge_total(&self) -> u64 {
        self.entries.values().sum()
    }

    /// The k-gram labelling a vertex.
    pub fn gram(&self, vertex: usize) -> Gram {
        match &self.scheme {
            Scheme::Dense { .. } => {
                let mut gram = vec![0u32; self.k];
                let mut rest = vertex;
                for slot in gram.iter_mut().rev() {
                    *slot = (rest % self.alphabet_size) as u32;
                    rest /= self.alphabet_size;
                }
                gram
            }
            Scheme::Sparse { grams, .. } => grams[vertex].clone(),
        }
    }

    /// (out-degree, in-degree) for every vertex touched by an edge.
    pub fn degrees(&self) -> BTreeMap<usize, (u64, u64)> {
        let mut deg: BTreeMap<usize, (u64, u64)> = BTreeMap::new();
        for (&(u, v), &m) in &self.entries {
            deg.entry(u).or_default().0 += m;
            deg.entry(v).or_default().1 += m;
        }
        deg
    }

    /// Vertices with nonzero degree, ascending.
    pub fn retained_vertices(&self) -> Vec<usize> {
        self.degrees().into_keys().collect()
    }

    /// Errs with the first vertex whose in- and out-degrees differ.
    pub fn validate_componentwise_eulerian(&self) -> Result<()> {
        for (v, (out, inn)) in self.degrees() {
            if out != inn {
                return Err(Error::NotEulerian { vertex: v });
            }
        }
        Ok(())
    }

    pub fn is_componentwise_eulerian(&self) -> bool {
        self.validate_componentwise_eulerian().is_ok()
    }

    pub fn transpose(&self) -> Quiver {
        let entries = self
            .entries
            .iter()
            .map(|(&(u, v), &m)| ((v, u), m))
            .collect();
        Quiver {
            k: self.k,
            alphabet_size: self.alphabet_size,
            scheme: self.scheme.clone(),
            entries,
        }
    }

    fn add_edge(&mut self, from: usize, to: usize, mult: u64) -> Result<()> {
        let slot = self.entries.entry((from, to)).or_insert(0);
        *slot = slot.checked_add(mult).ok_or(Error::EdgeOverflow)?;
        Ok(())
    }

    /// Vertex id for a gram, discovering it if the scheme is sparse.
    fn vertex_for_gram(&mut self, gram: &[u32]) -> usize {
        match &mut self.scheme {
            Scheme::Dense { .. } => radix_value(gram, self.alphabet_size),
            Scheme::Sparse { grams, index } => match index.get(gram) {
                Some(&i) => i,
                None => {
                    let i = grams.len();
                    grams.push(gram.to_vec());
                    index.insert(gram.to_vec(), i);
                    i
                }
            },
        }
    }

    /// Entries keyed by gram pairs, independent of the vertex scheme.
    pub(crate) fn semantic_entries(&self) -> BTreeMap<(Gram, Gram), u64> {
        self.entries
            .iter()
            .map(|(&(u, v), &m)| ((self.gram(u), self.gram(v)), m))
            .collect()
    }

    fn check_compatible(&self, other: &Quiver) -> Result<()> {
        if self.alphabet_size != other.alphabet_size {
            return Err(Error::AlphabetMismatch);
        }
        if self.k != other.k || self.is_dense() != other.is_dense() {
            return Err(Error::SchemeMismatch);
        }
        if let (Scheme::Dense { vertex_count: a }, Scheme::Dense { vertex_count: b }) =
            (&self.scheme, &other.scheme)
        {
            if a != b {
                return Err(Error::SchemeMismatch);
            }
        }
        Ok(())
    }
}

/// Quivers compare equal when they have the same order, alphabet size, and
/// gram-level edge multiset, regardless of vertex scheme internals.
impl PartialEq for Quiver {
    fn eq(&self, other: &Self) -> bool {
        if self.k != other.k || self.alphabet_size != other.alphabet_size {
            return false;
        }
        match (&self.scheme, &other.scheme) {
            (Scheme::Dense { .. }, Scheme::Dense { .. }) => self.entries == other.entries,
            _ => self.semantic_entries() == other.semantic_entries(),
        }
    }
}

impl Eq for Quiver {}

fn dense_vertex_count(n: usize, k: usize, limit: u128) -> Option<usize> {
    let count = (n as u128).checked_pow(k as u32)?;
    if count <= limit && count <= usize::MAX as u128 {
        Some(count as usize)
    } else {
        None
    }
}

fn radix_value(gram: &[u32], n: usize) -> usize {
    gram.iter().fold(0usize, |acc, &i| acc * n + i as usize)
}

/// Cyclic k-gram of `indices` starting at position `start`.
fn gram_at(indices: &[u32], start: usize, k: usize) -> Gram {
    let ell = indices.len();
    (0..k).map(|t| indices[(start + t) % ell]).collect()
}

/// `max(A - A', 0) + max(A' - A, 0)^T` with elementwise maxima: the quiver of
/// `A - A'` after reversing net-negative edges. Componentwise Eulerian inputs
/// give a componentwise Eulerian result.
pub fn boxminus(a: &Quiver, b: &Quiver) -> Result<Quiver> {
    a.check_compatible(b)?;
    if a.is_dense() {
        let mut entries = BTreeMap::new();
        for (&(u, v), &m) in &a.entries {
            let diff = m as i64 - b.entry(u, v) as i64;
            if diff > 0 {
                entries.insert((u, v), diff as u64);
            }
        }
        for (&(u, v), &m) in &b.entries {
            let diff = m as i64 - a.entry(u, v) as i64;
            if diff > 0 {
                *entries.entry((v, u)).or_insert(0) += diff as u64;
            }
        }
        Ok(Quiver {
            k: a.k,
            alphabet_size: a.alphabet_size,
            scheme: a.scheme.clone(),
            entries,
        })
    } else {
        let left = a.semantic_entries();
        let right = b.semantic_entries();
        let mut result: BTreeMap<(Gram, Gram), u64> = BTreeMap::new();
        for (key, &m) in &left {
            let diff = m as i64 - right.get(key).copied().unwrap_or(0) as i64;
            if diff > 0 {
                result.insert(key.clone(), diff as u64);
            }
        }
        for ((gu, gv), &m) in &right {
            let diff = m as i64 - left.get(&(gu.clone(), gv.clone())).copied().unwrap_or(0) as i64;
            if diff > 0 {
                *result.entry((gv.clone(), gu.clone())).or_insert(0) += diff as u64;
            }
        }
        Ok(sparse_from_gram_entries(a.k, a.alphabet_size, &result))
    }
}

/// `A boxplus A' := A boxminus A'^T`; preserves (componentwise) Eulerian-ness.
pub fn boxplus(a: &Quiver, b: &Quiver) -> Result<Quiver> {
    boxminus(a, &b.transpose())
}

/// Orders an unordered quiver pair deterministically (by gram-level entry
/// maps), so symmetric operations can pick a fixed orientation.
pub(crate) fn canonical_pairing<'a>(a: &'a Quiver, b: &'a Quiver) -> (&'a Quiver, &'a Quiver) {
    if a.semantic_entries() <= b.semantic_entries() {
        (a, b)
    } else {
        (b, a)
    }
}

/// Vertex-to-component labels over the nonzero-degree part of a quiver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabeling {
    labels: BTreeMap<usize, usize>,
    retained: Vec<usize>,
    component_count: usize,
}

impl ComponentLabeling {
    /// 1-based component id of a retained vertex.
    pub fn label_of(&self, vertex: usize) -> Option<usize> {
        self.labels.get(&vertex).copied()
    }

    /// Nonzero-degree vertices, ascending.
    pub fn retained(&self) -> &[usize] {
        &self.retained
    }

    pub fn component_count(&self) -> usize {
        self.component_count
    }

    /// Component member lists indexed by id (entry 0 is component 1).
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.component_count];
        for (&v, &id) in &self.labels {
            out[id - 1].push(v);
        }
        out
    }
}

/// Strongly connected components of a quiver, after dropping zero-degree
/// vertices. Component ids are contiguous from 1, ordered by each
/// component's smallest vertex.
pub fn strongly_connected_components(q: &Quiver) -> ComponentLabeling {
    let retained = q.retained_vertices();
    let pos: BTreeMap<usize, usize> = retained.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let m = retained.len();
    let mut adj = vec![Vec::new(); m];
    for &(u, v) in q.entries.keys() {
        adj[pos[&u]].push(pos[&v]);
    }

    let components = tarjan(&adj);
    let mut by_min: Vec<Vec<usize>> = components
        .into_iter()
        .map(|comp| {
            let mut verts: Vec<usize> = comp.into_iter().map(|p| retained[p]).collect();
            verts.sort_unstable();
            verts
        })
        .collect();
    by_min.sort_by_key(|comp| comp[0]);

    let mut labels = BTreeMap::new();
    for (id, comp) in by_min.iter().enumerate() {
        for &v in comp {
            labels.insert(v, id + 1);
        }
    }
    ComponentLabeling {
        labels,
        retained,
        component_count: by_min.len(),
    }
}

/// Iterative Tarjan over a compact adjacency list.
fn tarjan(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut components = Vec::new();

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        // (vertex, next child position) frames replace recursion
        let mut frames: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(&(v, child)) = frames.last() {
            if child == 0 {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if child < adj[v].len() {
                frames.last_mut().expect("frame exists").1 += 1;
                let w = adj[v][child];
                if index[w] == usize::MAX {
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                frames.pop();
                if let Some(&(parent, _)) = frames.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    components.push(comp);
                }
            }
        }
    }
    components
}

/// Quiver of the cyclic concatenation `uv`, assembled from the words' own
/// quivers: `qu + qv`, minus each word's k wrap-crossing edges, plus the k
/// boundary edges at each of the two junctions of `uv`.
pub fn concat_quiver(u: &CyclicWord, v: &CyclicWord, qu: &Quiver, qv: &Quiver) -> Result<Quiver> {
    qu.check_compatible(qv)?;
    let k = qu.order();
    if k >= u.len() {
        return Err(Error::OrderOutOfRange { k, len: u.len() });
    }
    if k >= v.len() {
        return Err(Error::OrderOutOfRange { k, len: v.len() });
    }
    if u.alphabet() != v.alphabet() || u.alphabet().size() != qu.alphabet_size() {
        return Err(Error::AlphabetMismatch);
    }

    let mut acc: BTreeMap<(Gram, Gram), i64> = BTreeMap::new();
    let mut bump = |from: Gram, to: Gram, delta: i64| {
        *acc.entry((from, to)).or_insert(0) += delta;
    };
    for ((from, to), m) in qu.semantic_entries() {
        bump(from, to, m as i64);
    }
    for ((from, to), m) in qv.semantic_entries() {
        bump(from, to, m as i64);
    }

    let (lu, lv) = (u.len(), v.len());
    // Each word's wrap-crossing edges start at positions ell-k .. ell-1.
    for t in 0..k {
        let j = lu - k + t;
        bump(
            gram_at(u.indices(), j, k),
            gram_at(u.indices(), j + 1, k),
            -1,
        );
        let j = lv - k + t;
        bump(
            gram_at(v.indices(), j, k),
            gram_at(v.indices(), j + 1, k),
            -1,
        );
    }
    // Junction edges of uv: k crossing u->v, and k crossing v->u at the wrap.
    let uv: Vec<u32> = u.indices().iter().chain(v.indices()).copied().collect();
    let vu: Vec<u32> = v.indices().iter().chain(u.indices()).copied().collect();
    for t in 0..k {
        let j = lu - k + t;
        bump(linear_gram(&uv, j, k), linear_gram(&uv, j + 1, k), 1);
        let j = lv - k + t;
        bump(linear_gram(&vu, j, k), linear_gram(&vu, j + 1, k), 1);
    }

    let mut positive: BTreeMap<(Gram, Gram), u64> = BTreeMap::new();
    for ((from, to), m) in acc {
        if m < 0 {
            return Err(Error::ConcatCorrection);
        }
        if m > 0 {
            positive.insert((from, to), m as u64);
        }
    }

    if qu.is_dense() {
        let n = qu.alphabet_size();
        let entries = positive
            .into_iter()
            .map(|((from, to), m)| ((radix_value(&from, n), radix_value(&to, n)), m))
            .collect();
        Ok(Quiver {
            k,
            alphabet_size: n,
            scheme: qu.scheme.clone(),
            entries,
        })
    } else {
        Ok(sparse_from_gram_entries(k, qu.alphabet_size(), &positive))
    }
}

/// Builds a sparse quiver from gram-keyed entries, with vertices in sorted
/// gram order.
fn sparse_from_gram_entries(
    k: usize,
    alphabet_size: usize,
    gram_entries: &BTreeMap<(Gram, Gram), u64>,
) -> Quiver {
    let gram_set: std::collections::BTreeSet<&Gram> = gram_entries
        .keys()
        .flat_map(|(from, to)| [from, to])
        .collect();
    let grams: Vec<Gram> = gram_set.into_iter().cloned().collect();
    let index: BTreeMap<&Gram, usize> = grams.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let entries: BTreeMap<(usize, usize), u64> = gram_entries
        .iter()
        .map(|((from, to), &m)| ((index[from], index[to]), m))
        .collect();
    Quiver {
        k,
        alphabet_size,
        scheme: Scheme::sparse_from_grams(grams),
        entries,
    }
}

fn linear_gram(indices: &[u32], start: usize, k: usize) -> Gram {
    indices[start..start + k].to_vec()
}

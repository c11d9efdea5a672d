//! Sparse bipartite document-feature graphs, partitions over their vertices
//! and the quotient graph used to move whole blocks during descent.
//!
//! Vertex ids put documents first (`0..n_docs`) and features after them, so
//! the side of a vertex is a single comparison.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Doc,
    Feature,
}

/// Immutable unit-weight bipartite graph in compressed sparse row layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    n_docs: usize,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    labels: Vec<String>,
}

impl BipartiteGraph {
    /// Builds a graph from `(doc, feature)` pairs where `feature` indexes
    /// `feature_labels`. Duplicate pairs collapse to a single edge.
    pub fn from_edges(
        doc_labels: Vec<String>,
        feature_labels: Vec<String>,
        edges: &[(usize, usize)],
    ) -> Result<Self> {
        let n_docs = doc_labels.len();
        let n = n_docs + feature_labels.len();
        if n > u32::MAX as usize {
            return Err(Error::Graph(format!(
                "{n} vertices exceed the u32 id space"
            )));
        }
        let mut pairs = Vec::with_capacity(edges.len() * 2);
        for &(d, f) in edges {
            if d >= n_docs || f >= feature_labels.len() {
                return Err(Error::Graph(format!(
                    "edge ({d}, {f}) out of range ({n_docs} docs, {} features)",
                    feature_labels.len()
                )));
            }
            let fv = n_docs + f;
            pairs.push((d as u32, fv as u32));
            pairs.push((fv as u32, d as u32));
        }
        pairs.sort_unstable();
        pairs.dedup();

        let mut offsets = vec![0usize; n + 1];
        for &(u, _) in &pairs {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let neighbors = pairs.into_iter().map(|(_, v)| v).collect();

        let mut labels = doc_labels;
        labels.extend(feature_labels);
        Ok(Self {
            n_docs,
            offsets,
            neighbors,
            labels,
        })
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn n_features(&self) -> usize {
        self.labels.len() - self.n_docs
    }

    pub fn n_vertices(&self) -> usize {
        self.labels.len()
    }

    /// Number of edges, `L`.
    pub fn n_edges(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn side(&self, v: usize) -> Side {
        if v < self.n_docs {
            Side::Doc
        } else {
            Side::Feature
        }
    }

    pub fn is_doc(&self, v: usize) -> bool {
        v < self.n_docs
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Sorted neighbor ids.
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Iterates every edge once as `(doc, feature)` vertex ids.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n_docs).flat_map(move |d| self.neighbors(d).iter().map(move |&f| (d, f as usize)))
    }

    /// Checks the structural invariants; used by tests and the CLI's
    /// internal-consistency exit path.
    pub fn validate(&self) -> Result<()> {
        let mut doc_sum = 0usize;
        let mut feat_sum = 0usize;
        for v in 0..self.n_vertices() {
            let nb = self.neighbors(v);
            if nb.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Invariant(format!(
                    "neighbors of {v} not strictly sorted"
                )));
            }
            for &u in nb {
                let u = u as usize;
                if self.is_doc(u) == self.is_doc(v) {
                    return Err(Error::Invariant(format!("edge {v}-{u} joins one side")));
                }
                if self.neighbors(u).binary_search(&(v as u32)).is_err() {
                    return Err(Error::Invariant(format!("edge {v}-{u} is not symmetric")));
                }
            }
            if self.is_doc(v) {
                doc_sum += nb.len();
            } else {
                feat_sum += nb.len();
            }
        }
        if doc_sum != self.n_edges() || feat_sum != self.n_edges() {
            return Err(Error::Invariant(format!(
                "degree sums {doc_sum}/{feat_sum} differ from L={}",
                self.n_edges()
            )));
        }
        Ok(())
    }
}

/// Relabels cluster ids to `0..k` in order of first appearance.
pub fn canonicalize(assign: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    assign
        .iter()
        .map(|&c| {
            let next = map.len();
            *map.entry(c).or_insert(next)
        })
        .collect()
}

/// A canonical partition of a graph's vertices with per-cluster aggregates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assign: Vec<usize>,
    /// Edges with both ends in the cluster.
    internal: Vec<u64>,
    /// Sum of document-side degrees.
    doc_degree: Vec<u64>,
    /// Sum of feature-side degrees.
    feature_degree: Vec<u64>,
    size: Vec<usize>,
}

impl Partition {
    /// Canonicalizes `assign` and computes the aggregates over `g`.
    pub fn new(g: &BipartiteGraph, assign: &[usize]) -> Result<Self> {
        if assign.len() != g.n_vertices() {
            return Err(Error::VertexCountMismatch {
                expected: g.n_vertices(),
                got: assign.len(),
            });
        }
        let assign = canonicalize(assign);
        let k = assign.iter().max().map_or(0, |&m| m + 1);
        let mut p = Self {
            assign,
            internal: vec![0; k],
            doc_degree: vec![0; k],
            feature_degree: vec![0; k],
            size: vec![0; k],
        };
        for v in 0..g.n_vertices() {
            let c = p.assign[v];
            p.size[c] += 1;
            let deg = g.degree(v) as u64;
            if g.is_doc(v) {
                p.doc_degree[c] += deg;
            } else {
                p.feature_degree[c] += deg;
            }
        }
        for (d, f) in g.edges() {
            if p.assign[d] == p.assign[f] {
                p.internal[p.assign[d]] += 1;
            }
        }
        Ok(p)
    }

    pub fn singletons(g: &BipartiteGraph) -> Self {
        let ids: Vec<usize> = (0..g.n_vertices()).collect();
        Self::new(g, &ids).expect("length matches by construction")
    }

    pub fn whole(g: &BipartiteGraph) -> Self {
        Self::new(g, &vec![0; g.n_vertices()]).expect("length matches by construction")
    }

    pub fn n_clusters(&self) -> usize {
        self.size.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.assign.len()
    }

    pub fn cluster_of(&self, v: usize) -> usize {
        self.assign[v]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assign
    }

    pub fn internal_edges(&self) -> &[u64] {
        &self.internal
    }

    pub fn doc_degree(&self) -> &[u64] {
        &self.doc_degree
    }

    pub fn feature_degree(&self) -> &[u64] {
        &self.feature_degree
    }

    pub fn sizes(&self) -> &[usize] {
        &self.size
    }

    /// Whether every cluster of `self` is a union of clusters of `finer`.
    pub fn is_coarsening_of(&self, finer: &Partition) -> bool {
        coarsening_violation(finer.assignment(), self.assignment()).is_none()
    }
}

/// First vertex whose base block is split across clusters of `start`.
pub(crate) fn coarsening_violation(base: &[usize], start: &[usize]) -> Option<usize> {
    let k = base.iter().max().map_or(0, |&m| m + 1);
    let mut seen = vec![usize::MAX; k];
    for (v, (&b, &s)) in base.iter().zip(start).enumerate() {
        if seen[b] == usize::MAX {
            seen[b] = s;
        } else if seen[b] != s {
            return Some(v);
        }
    }
    None
}

/// Quotient graph: one super-vertex per block of a base partition.
///
/// Blocks may mix documents and features, so the two side-degree sums are
/// carried separately. Inter-block weights count base edges; edges inside a
/// block are folded into its internal weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregatedGraph {
    doc_degree: Vec<u64>,
    feature_degree: Vec<u64>,
    internal: Vec<u64>,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    weights: Vec<u64>,
    block_of: Vec<usize>,
    total_edges: u64,
}

impl AggregatedGraph {
    pub fn n_blocks(&self) -> usize {
        self.internal.len()
    }

    pub fn total_edges(&self) -> u64 {
        self.total_edges
    }

    pub fn doc_degree(&self, b: usize) -> u64 {
        self.doc_degree[b]
    }

    pub fn feature_degree(&self, b: usize) -> u64 {
        self.feature_degree[b]
    }

    pub fn internal_weight(&self, b: usize) -> u64 {
        self.internal[b]
    }

    /// `(neighbor block, edge count)` pairs, sorted by block, no self loops.
    pub fn neighbors(&self, b: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        let r = self.offsets[b]..self.offsets[b + 1];
        self.neighbors[r.clone()]
            .iter()
            .zip(&self.weights[r])
            .map(|(&n, &w)| (n as usize, w))
    }

    pub fn degree(&self, b: usize) -> usize {
        self.offsets[b + 1] - self.offsets[b]
    }

    /// Base vertex to super-vertex map.
    pub fn block_of(&self) -> &[usize] {
        &self.block_of
    }

    /// Total weight of inter-block edges, each counted once.
    pub fn inter_block_weight(&self) -> u64 {
        self.weights.iter().sum::<u64>() / 2
    }
}

/// Builds the quotient of `g` by `p`.
pub fn aggregate(g: &BipartiteGraph, p: &Partition) -> Result<AggregatedGraph> {
    if p.n_vertices() != g.n_vertices() {
        return Err(Error::VertexCountMismatch {
            expected: g.n_vertices(),
            got: p.n_vertices(),
        });
    }
    let k = p.n_clusters();
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    let mut internal = vec![0u64; k];
    for (d, f) in g.edges() {
        let (a, b) = (p.cluster_of(d), p.cluster_of(f));
        if a == b {
            internal[a] += 1;
        } else {
            pairs.push((a as u32, b as u32));
            pairs.push((b as u32, a as u32));
        }
    }
    pairs.sort_unstable();

    let mut offsets = vec![0usize; k + 1];
    let mut neighbors = Vec::new();
    let mut weights: Vec<u64> = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let (a, b) = pairs[i];
        let mut j = i;
        while j < pairs.len() && pairs[j] == (a, b) {
            j += 1;
        }
        neighbors.push(b);
        weights.push((j - i) as u64);
        offsets[a as usize + 1] += 1;
        i = j;
    }
    for c in 0..k {
        offsets[c + 1] += offsets[c];
    }

    Ok(AggregatedGraph {
        doc_degree: p.doc_degree().to_vec(),
        feature_degree: p.feature_degree().to_vec(),
        internal,
        offsets,
        neighbors,
        weights,
        block_of: p.assignment().to_vec(),
        total_edges: g.n_edges() as u64,
    })
}

/// Undirected unipartite graph with integer edge weights, for the ordinary
/// (non-bipartite) modularity.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    edges: Vec<(usize, usize, u64)>,
}

impl SimpleGraph {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            edges: Vec::new(),
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize, weight: u64) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(Error::Graph(format!(
                "edge ({u}, {v}) out of range for {} vertices",
                self.n
            )));
        }
        self.edges.push((u, v, weight));
        Ok(())
    }

    /// `k` vertex-disjoint copies of `self`; copy `i` occupies ids
    /// `i*n..(i+1)*n`.
    pub fn disjoint_copies(&self, k: usize) -> Self {
        let mut out = Self::new(self.n * k);
        for i in 0..k {
            let off = i * self.n;
            out.edges
                .extend(self.edges.iter().map(|&(u, v, w)| (u + off, v + off, w)));
        }
        out
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, u64)] {
        &self.edges
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.iter().map(|e| e.2).sum()
    }
}

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{AggregatedGraph, BipartiteGraph, Partition, SimpleGraph};
use crate::scalar::Scalar;

/// Modularity split into its edge term `Q+` and (resolution-scaled) null
/// term `Q-`; `total = edge_term - null_term`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModularityValue<S> {
    pub total: S,
    pub edge_term: S,
    pub null_term: S,
}

impl<S: Scalar> ModularityValue<S> {
    pub fn from_terms(edge_term: S, null_term: S) -> Self {
        Self {
            total: edge_term.clone() - null_term.clone(),
            edge_term,
            null_term,
        }
    }

    pub fn to_f64(&self) -> ModularityValue<f64> {
        ModularityValue {
            total: self.total.to_real(),
            edge_term: self.edge_term.to_real(),
            null_term: self.null_term.to_real(),
        }
    }
}

/// Bipartite modularity from integer sums: `edge_sum / L - λ null_sum / L²`.
fn from_sums<S: Scalar>(
    edge_sum: u64,
    null_sum: u128,
    edges: u64,
    lambda: &S,
) -> ModularityValue<S> {
    let l = S::from_count(edges as i128);
    let edge_term = S::from_count(edge_sum as i128) / l.clone();
    let null_term = lambda.clone() * S::from_count(null_sum as i128) / (l.clone() * l);
    ModularityValue::from_terms(edge_term, null_term)
}

/// Parametric bipartite modularity of `p` on `g`:
/// `Σ_i l_i/L − λ D¹_i D²_i / L²`. At `λ = 1` this is Barber's modularity.
pub fn q_bipartite<S: Scalar>(
    g: &BipartiteGraph,
    p: &Partition,
    lambda: &S,
) -> Result<ModularityValue<S>> {
    if p.n_vertices() != g.n_vertices() {
        return Err(Error::VertexCountMismatch {
            expected: g.n_vertices(),
            got: p.n_vertices(),
        });
    }
    if g.n_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    let edge_sum = p.internal_edges().iter().sum();
    let null_sum = p
        .doc_degree()
        .iter()
        .zip(p.feature_degree())
        .map(|(&a, &b)| a as u128 * b as u128)
        .sum();
    Ok(from_sums(edge_sum, null_sum, g.n_edges() as u64, lambda))
}

/// Same objective evaluated on a quotient graph, `assign` mapping blocks to
/// clusters.
pub fn q_aggregated<S: Scalar>(
    ag: &AggregatedGraph,
    assign: &[usize],
    lambda: &S,
) -> Result<ModularityValue<S>> {
    if assign.len() != ag.n_blocks() {
        return Err(Error::VertexCountMismatch {
            expected: ag.n_blocks(),
            got: assign.len(),
        });
    }
    if ag.total_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    let k = assign.iter().max().map_or(0, |&m| m + 1);
    let mut d1 = vec![0u64; k];
    let mut d2 = vec![0u64; k];
    let mut edge_sum = 0u64;
    for (b, &c) in assign.iter().enumerate() {
        d1[c] += ag.doc_degree(b);
        d2[c] += ag.feature_degree(b);
        edge_sum += ag.internal_weight(b);
        for (nb, w) in ag.neighbors(b) {
            // each inter-block edge is seen from both ends
            if nb > b && assign[nb] == c {
                edge_sum += w;
            }
        }
    }
    let null_sum = d1
        .iter()
        .zip(&d2)
        .map(|(&a, &b)| a as u128 * b as u128)
        .sum();
    Ok(from_sums(edge_sum, null_sum, ag.total_edges(), lambda))
}

/// Parametric modularity of an ordinary undirected graph:
/// `Σ_i l_i/L − λ D_i² / (4L²)`, self loops contributing `2w` to degree.
pub fn q_simple<S: Scalar>(
    g: &SimpleGraph,
    assign: &[usize],
    lambda: &S,
) -> Result<ModularityValue<S>> {
    if assign.len() != g.n_vertices() {
        return Err(Error::VertexCountMismatch {
            expected: g.n_vertices(),
            got: assign.len(),
        });
    }
    let total = g.total_weight();
    if total == 0 {
        return Err(Error::EmptyGraph);
    }
    let k = assign.iter().max().map_or(0, |&m| m + 1);
    let mut degree = vec![0u128; k];
    let mut edge_sum = 0u64;
    for &(u, v, w) in g.edges() {
        degree[assign[u]] += w as u128;
        degree[assign[v]] += w as u128;
        if assign[u] == assign[v] {
            edge_sum += w;
        }
    }
    let l = S::from_count(total as i128);
    let edge_term = S::from_count(edge_sum as i128) / l.clone();
    let sq: u128 = degree.iter().map(|d| d * d).sum();
    let null_term = lambda.clone() * S::from_count(sq as i128) / (S::from_count(4) * l.clone() * l);
    Ok(ModularityValue::from_terms(edge_term, null_term))
}

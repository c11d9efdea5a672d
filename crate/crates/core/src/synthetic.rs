//! Planted-topic corpora for tests, benchmarks and smoke runs.
//!
//! Each document belongs to one topic and draws most of its tokens from that
//! topic's private vocabulary, the rest from a shared background vocabulary.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{build_graph, Corpus, Document, PipelineConfig, Split};
use crate::error::Result;
use crate::graph::BipartiteGraph;

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedSpec {
    pub n_docs: usize,
    pub n_topics: usize,
    pub topic_vocab: usize,
    pub shared_vocab: usize,
    /// Distinct tokens per document.
    pub doc_length: usize,
    /// Probability a token comes from the document's own topic.
    pub topic_affinity: f64,
    /// Leading fraction of documents tagged as training data.
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for PlantedSpec {
    fn default() -> Self {
        Self {
            n_docs: 400,
            n_topics: 4,
            topic_vocab: 150,
            shared_vocab: 300,
            doc_length: 30,
            topic_affinity: 0.7,
            train_fraction: 0.6,
            seed: 7,
        }
    }
}

/// Topic of document `i`.
pub fn planted_topic(spec: &PlantedSpec, i: usize) -> usize {
    i % spec.n_topics
}

pub fn planted_corpus(spec: &PlantedSpec) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n_train = (spec.n_docs as f64 * spec.train_fraction).round() as usize;
    let mut docs = Vec::with_capacity(spec.n_docs);
    for i in 0..spec.n_docs {
        let topic = planted_topic(spec, i);
        let mut tokens = Vec::with_capacity(spec.doc_length);
        let mut seen = std::collections::HashSet::new();
        while tokens.len() < spec.doc_length {
            let tok = if spec.shared_vocab == 0 || rng.gen_bool(spec.topic_affinity) {
                format!("t{topic}w{}", rng.gen_range(0..spec.topic_vocab))
            } else {
                format!("s{}", rng.gen_range(0..spec.shared_vocab))
            };
            if seen.insert(tok.clone()) {
                tokens.push(tok);
            }
        }
        tokens.shuffle(&mut rng);
        docs.push(Document {
            doc_id: format!("doc{i}"),
            gold_label: Some(format!("topic{topic}")),
            split: if i < n_train {
                Split::Train
            } else {
                Split::Test
            },
            tokens,
        });
    }
    Corpus::new(docs).expect("generated ids are unique")
}

/// Graph of [`planted_corpus`] with tokens used verbatim.
pub fn planted_graph(spec: &PlantedSpec) -> Result<BipartiteGraph> {
    build_graph(&planted_corpus(spec), &PipelineConfig::identity())
}

/// Uniform random bipartite graph with `n_docs` documents of degree at most
/// `degree` over `n_features` features. Useful for property tests.
pub fn random_graph(n_docs: usize, n_features: usize, degree: usize, seed: u64) -> BipartiteGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for d in 0..n_docs {
        for _ in 0..degree {
            edges.push((d, rng.gen_range(0..n_features)));
        }
    }
    let docs = (0..n_docs).map(|i| format!("d{i}")).collect();
    let feats = (0..n_features).map(|i| format!("f{i}")).collect();
    BipartiteGraph::from_edges(docs, feats, &edges).expect("ids in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_sized() {
        let spec = PlantedSpec::default();
        let a = planted_corpus(&spec);
        assert_eq!(a, planted_corpus(&spec));
        assert_eq!(a.len(), 400);
        assert_eq!(a.count(Split::Train), 240);
        assert!(a.documents().iter().all(|d| d.tokens.len() == 30));
        let g = planted_graph(&spec).unwrap();
        assert_eq!(g.n_edges(), 400 * 30);
    }
}

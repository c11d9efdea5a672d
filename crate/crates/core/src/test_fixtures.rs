use crate::corpus::{build_graph, Corpus, Document, PipelineConfig, Split};
use crate::graph::BipartiteGraph;

/// Docs d1,d2 linked to words w1,w2; docs d3,d4 linked to w3,w4.
pub fn two_bicliques() -> BipartiteGraph {
    let docs = ["d1", "d2", "d3", "d4"].map(String::from).to_vec();
    let words = ["w1", "w2", "w3", "w4"].map(String::from).to_vec();
    let edges = [
        (0, 0),
        (0, 1),
        (1, 0),
        (1, 1),
        (2, 2),
        (2, 3),
        (3, 2),
        (3, 3),
    ];
    BipartiteGraph::from_edges(docs, words, &edges).unwrap()
}

/// [`two_bicliques`] plus a word w5 linked only to d1.
pub fn two_bicliques_with_w5() -> BipartiteGraph {
    let docs = ["d1", "d2", "d3", "d4"].map(String::from).to_vec();
    let words = ["w1", "w2", "w3", "w4", "w5"].map(String::from).to_vec();
    let edges = [
        (0, 0),
        (0, 1),
        (1, 0),
        (1, 1),
        (2, 2),
        (2, 3),
        (3, 2),
        (3, 3),
        (0, 4),
    ];
    BipartiteGraph::from_edges(docs, words, &edges).unwrap()
}

/// The two-biclique graph built through the corpus pipeline, labels A/B.
pub fn two_biclique_corpus() -> (Corpus, BipartiteGraph) {
    let doc = |id: &str, label: &str, toks: [&str; 2]| Document {
        doc_id: id.into(),
        gold_label: Some(label.into()),
        split: Split::Unlabeled,
        tokens: toks.iter().map(|t| t.to_string()).collect(),
    };
    let corpus = Corpus::new(vec![
        doc("d1", "A", ["w1", "w2"]),
        doc("d2", "A", ["w1", "w2"]),
        doc("d3", "B", ["w3", "w4"]),
        doc("d4", "B", ["w3", "w4"]),
    ])
    .unwrap();
    let g = build_graph(&corpus, &PipelineConfig::identity()).unwrap();
    (corpus, g)
}

//! End-to-end runs and the text artifacts they produce.
//!
//! Everything here renders to `String` so runs can be compared byte for
//! byte; writing to disk is left to the caller.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::classify::{classify_with, ClassifyOptions, TrainingAssignment};
use crate::corpus::{Corpus, PipelineConfig, PipelineSummary, Split};
use crate::error::{Error, Result};
use crate::eval::{f1_scores_with_classes, ClassScores, Contingency, EvalReport};
use crate::graph::{BipartiteGraph, Partition};
use crate::modularity::{cluster, finalize, q_bipartite, DescentConfig, ModularityValue, Schedule};

/// Number of representative words listed per cluster.
pub const TOP_WORDS: usize = 10;

/// `doc_id<TAB>feature<TAB>1` per edge.
pub fn graph_tsv(g: &BipartiteGraph) -> String {
    let mut out = String::with_capacity(g.n_edges() * 24);
    for (d, f) in g.edges() {
        let _ = writeln!(out, "{}\t{}\t1", g.label(d), g.label(f));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphSidecar {
    pub n_docs: usize,
    pub n_features: usize,
    pub n_vertices: usize,
    pub edges: usize,
    pub pipeline: PipelineSummary,
    pub empty_documents: Vec<String>,
}

impl GraphSidecar {
    pub fn new(g: &BipartiteGraph, corpus: &Corpus, pipeline: &PipelineConfig) -> Self {
        Self {
            n_docs: g.n_docs(),
            n_features: g.n_features(),
            n_vertices: g.n_vertices(),
            edges: g.n_edges(),
            pipeline: pipeline.summary(),
            empty_documents: corpus
                .empty_documents()
                .into_iter()
                .map(String::from)
                .collect(),
        }
    }
}

/// `vertex_label<TAB>cluster_id` per vertex.
pub fn partition_tsv(g: &BipartiteGraph, p: &Partition) -> String {
    let mut out = String::new();
    for v in 0..g.n_vertices() {
        let _ = writeln!(out, "{}\t{}", g.label(v), p.cluster_of(v));
    }
    out
}

/// Highest-degree features of each cluster, ties by vertex id.
pub fn top_words(g: &BipartiteGraph, p: &Partition, k: usize) -> Vec<Vec<String>> {
    let mut per: Vec<Vec<usize>> = vec![Vec::new(); p.n_clusters()];
    for v in g.n_docs()..g.n_vertices() {
        per[p.cluster_of(v)].push(v);
    }
    per.into_iter()
        .map(|mut vs| {
            vs.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));
            vs.into_iter()
                .take(k)
                .map(|v| g.label(v).to_string())
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterReport {
    pub n_clusters: usize,
    pub lambda: f64,
    pub schedule: Schedule,
    pub modularity: ModularityValue<f64>,
    pub sizes: Vec<usize>,
    pub documents_per_cluster: Vec<usize>,
    pub top_words: Vec<Vec<String>>,
    pub nmi: Option<f64>,
    pub purity: Option<f64>,
    pub contingency: Option<Contingency>,
    pub empty_documents: Vec<String>,
}

/// Cluster of every gold-labelled document paired with its label.
fn scored_documents<'a>(corpus: &'a Corpus, p: &Partition) -> (Vec<usize>, Vec<&'a str>) {
    corpus
        .documents()
        .iter()
        .enumerate()
        .filter_map(|(i, d)| d.gold_label.as_deref().map(|l| (p.cluster_of(i), l)))
        .unzip()
}

impl ClusterReport {
    pub fn new(
        g: &BipartiteGraph,
        corpus: &Corpus,
        p: &Partition,
        cfg: &DescentConfig<f64>,
    ) -> Result<Self> {
        let modularity = q_bipartite(g, p, &cfg.lambda)?;
        let mut documents_per_cluster = vec![0; p.n_clusters()];
        for d in 0..g.n_docs() {
            documents_per_cluster[p.cluster_of(d)] += 1;
        }
        let (pred, gold) = scored_documents(corpus, p);
        let contingency = if gold.is_empty() {
            None
        } else {
            Some(Contingency::new(&pred, &gold)?)
        };
        Ok(Self {
            n_clusters: p.n_clusters(),
            lambda: cfg.lambda,
            schedule: cfg.schedule,
            modularity,
            sizes: p.sizes().to_vec(),
            documents_per_cluster,
            top_words: top_words(g, p, TOP_WORDS),
            nmi: contingency.as_ref().map(Contingency::nmi),
            purity: contingency.as_ref().map(Contingency::purity),
            contingency,
            empty_documents: corpus
                .empty_documents()
                .into_iter()
                .map(String::from)
                .collect(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable") + "\n"
    }
}

#[derive(Debug, Clone)]
pub struct ClusterOutput {
    pub partition: Partition,
    pub report: ClusterReport,
    /// Projection onto the requested number of clusters, when asked for.
    pub projection: Option<(Partition, ClusterReport)>,
}

/// Clusters `g`, optionally projects onto `n_clusters`, and scores both
/// against the corpus gold labels.
pub fn run_cluster(
    g: &BipartiteGraph,
    corpus: &Corpus,
    cfg: &DescentConfig<f64>,
    n_clusters: Option<usize>,
) -> Result<ClusterOutput> {
    if corpus.len() != g.n_docs() {
        return Err(Error::VertexCountMismatch {
            expected: g.n_docs(),
            got: corpus.len(),
        });
    }
    let result = cluster(g, cfg)?;
    let report = ClusterReport::new(g, corpus, &result.partition, cfg)?;
    let projection = match n_clusters {
        Some(n) if n < result.partition.n_clusters() => {
            let fin = finalize(g, &result.partition, n, cfg)?;
            let rep = ClusterReport::new(g, corpus, &fin, cfg)?;
            Some((fin, rep))
        }
        Some(n) => {
            log::warn!(
                "clustering already has {} <= {n} clusters; projection skipped",
                result.partition.n_clusters()
            );
            None
        }
        None => None,
    };
    Ok(ClusterOutput {
        partition: result.partition,
        report,
        projection,
    })
}

/// Training assignment from the corpus: every `Train` document with a gold
/// label. Document `i` of the corpus is vertex `i` of its graph.
pub fn training_from_corpus(corpus: &Corpus) -> Result<TrainingAssignment> {
    let rows = corpus
        .documents()
        .iter()
        .enumerate()
        .filter(|(_, d)| d.split == Split::Train)
        .filter_map(|(i, d)| d.gold_label.as_deref().map(|l| (i, l)));
    let t = TrainingAssignment::from_rows(rows)?;
    if t.is_empty() {
        return Err(Error::Training(
            "corpus has no labelled training documents".into(),
        ));
    }
    Ok(t)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub doc_id: String,
    pub predicted: String,
    pub gold: Option<String>,
}

#[derive(Debug, Clone)]
pub struct ClassifyOutput {
    pub predictions: Vec<Prediction>,
    pub scores: Option<ClassScores>,
    pub report: EvalReport,
    /// Evaluated documents with no features, labelled by the tie rule.
    pub isolated_documents: Vec<String>,
    /// Gold test classes never seen in training.
    pub unseen_classes: Vec<String>,
}

/// Classifies every `Test` document of `corpus` (vertex `i` = document `i`).
pub fn run_classify(
    g: &BipartiteGraph,
    corpus: &Corpus,
    train: &TrainingAssignment,
    cfg: &DescentConfig<f64>,
    opts: ClassifyOptions,
) -> Result<ClassifyOutput> {
    let test: Vec<usize> = (0..corpus.len())
        .filter(|&i| corpus.documents()[i].split == Split::Test)
        .collect();
    run_classify_documents(g, corpus, train, cfg, opts, &test)
}

/// As [`run_classify`] but predicts and scores the documents listed in
/// `evaluate`, whatever their split. Listing training documents scores
/// self-classification.
pub fn run_classify_documents(
    g: &BipartiteGraph,
    corpus: &Corpus,
    train: &TrainingAssignment,
    cfg: &DescentConfig<f64>,
    opts: ClassifyOptions,
    evaluate: &[usize],
) -> Result<ClassifyOutput> {
    if corpus.len() != g.n_docs() {
        return Err(Error::VertexCountMismatch {
            expected: g.n_docs(),
            got: corpus.len(),
        });
    }
    let result = classify_with(g, train, cfg, opts)?;
    if let Some(&bad) = evaluate.iter().find(|&&i| i >= corpus.len()) {
        return Err(Error::UnknownBlock(bad));
    }
    let names = train.class_names();
    let predictions: Vec<Prediction> = evaluate
        .iter()
        .map(|&i| {
            let d = &corpus.documents()[i];
            Prediction {
                doc_id: d.doc_id.clone(),
                predicted: names[result.class_of(i)].clone(),
                gold: d.gold_label.clone(),
            }
        })
        .collect();

    let known: BTreeSet<&String> = names.iter().collect();
    let unseen_classes: Vec<String> = predictions
        .iter()
        .filter_map(|p| p.gold.as_ref())
        .filter(|g| !known.contains(g))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .cloned()
        .collect();
    for c in &unseen_classes {
        log::warn!("test class `{c}` has no training documents; it scores F = 0");
    }

    let scored: Vec<&Prediction> = predictions.iter().filter(|p| p.gold.is_some()).collect();
    let scores = if scored.is_empty() {
        None
    } else {
        let pred: Vec<String> = scored.iter().map(|p| p.predicted.clone()).collect();
        let gold: Vec<String> = scored
            .iter()
            .map(|p| p.gold.clone().unwrap_or_default())
            .collect();
        let mut vocab: Vec<String> = names.to_vec();
        vocab.extend(unseen_classes.iter().cloned());
        vocab.sort();
        Some(f1_scores_with_classes(&pred, &gold, &vocab)?)
    };
    let isolated_documents = result
        .isolated
        .iter()
        .filter(|&&v| g.is_doc(v) && evaluate.contains(&v))
        .map(|&v| g.label(v).to_string())
        .collect();
    let report = EvalReport {
        nmi: None,
        purity: None,
        micro_f1: scores.as_ref().map(|s| s.micro_f1),
        macro_f1: scores.as_ref().map(|s| s.macro_f1),
        n_clusters: result.partition.n_clusters(),
        lambda: cfg.lambda,
        per_class: scores.as_ref().map(|s| s.per_class.clone()),
        contingency: None,
    };
    Ok(ClassifyOutput {
        predictions,
        scores,
        report,
        isolated_documents,
        unseen_classes,
    })
}

/// `doc_id<TAB>predicted<TAB>gold` (gold empty when unknown).
pub fn predictions_tsv(rows: &[Prediction]) -> String {
    let mut out = String::new();
    for r in rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}",
            r.doc_id,
            r.predicted,
            r.gold.as_deref().unwrap_or("")
        );
    }
    out
}

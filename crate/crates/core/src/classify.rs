//! Semi-supervised classification: training vertices pin `N` class clusters
//! and every other vertex is redistributed among them.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Partition};
use crate::modularity::{local_descent, redistribute_to_anchors, DescentConfig};
use crate::scalar::Scalar;

/// Prefix marking a seed word row in a training TSV.
pub const WORD_PREFIX: &str = "word:";

/// Known classes for a subset of vertices (documents and optionally words).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingAssignment {
    class_names: Vec<String>,
    assign: BTreeMap<usize, usize>,
}

impl TrainingAssignment {
    /// `rows` are `(vertex, class name)`; classes are numbered in order of
    /// first appearance.
    pub fn from_rows<'a>(rows: impl IntoIterator<Item = (usize, &'a str)>) -> Result<Self> {
        let mut class_names: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut assign = BTreeMap::new();
        for (v, class) in rows {
            let c = *index.entry(class.to_string()).or_insert_with(|| {
                class_names.push(class.to_string());
                class_names.len() - 1
            });
            if let Some(prev) = assign.insert(v, c) {
                if prev != c {
                    return Err(Error::Training(format!(
                        "vertex {v} assigned to both `{}` and `{class}`",
                        class_names[prev]
                    )));
                }
            }
        }
        Ok(Self {
            class_names,
            assign,
        })
    }

    /// Explicit class vocabulary; every class must receive a vertex.
    pub fn new(class_names: Vec<String>, assign: BTreeMap<usize, usize>) -> Result<Self> {
        let t = Self {
            class_names,
            assign,
        };
        let mut counts = vec![0usize; t.n_classes()];
        for &c in t.assign.values() {
            if c >= t.n_classes() {
                return Err(Error::Training(format!("class index {c} out of range")));
            }
            counts[c] += 1;
        }
        if let Some(c) = counts.iter().position(|&n| n == 0) {
            return Err(Error::Training(format!(
                "class `{}` has no training vertices",
                t.class_names[c]
            )));
        }
        Ok(t)
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn class_of(&self, v: usize) -> Option<usize> {
        self.assign.get(&v).copied()
    }

    pub fn vertices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.assign.iter().map(|(&v, &c)| (v, c))
    }

    pub fn len(&self) -> usize {
        self.assign.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assign.is_empty()
    }

    fn validate(&self, g: &BipartiteGraph) -> Result<()> {
        if self.class_names.is_empty() {
            return Err(Error::Training("no classes".into()));
        }
        if let Some(&v) = self.assign.keys().find(|&&v| v >= g.n_vertices()) {
            return Err(Error::Training(format!("vertex {v} is not in the graph")));
        }
        Ok(())
    }
}

/// Parses `doc_id<TAB>class` rows, plus `word:<feature><TAB>class` rows
/// for seed words. Features are matched against graph labels verbatim, so
/// seed words must be given in their preprocessed (stemmed) form.
pub fn parse_training_tsv(text: &str, g: &BipartiteGraph) -> Result<TrainingAssignment> {
    let mut docs = HashMap::new();
    let mut features = HashMap::new();
    for v in 0..g.n_vertices() {
        let map = if g.is_doc(v) {
            &mut docs
        } else {
            &mut features
        };
        map.insert(g.label(v), v);
    }
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split('\t');
        let (Some(key), Some(class), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Training(format!(
                "line {}: expected two tab-separated fields",
                i + 1
            )));
        };
        let vertex = match key.strip_prefix(WORD_PREFIX) {
            Some(word) => features.get(word),
            None => docs.get(key),
        };
        let &v = vertex.ok_or_else(|| {
            Error::Training(format!("line {}: `{key}` is not in the graph", i + 1))
        })?;
        rows.push((v, class.trim()));
    }
    TrainingAssignment::from_rows(rows)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClassifyOptions {
    /// Run an unconstrained vertex-level descent after redistribution and
    /// relabel non-training vertices by the training majority of their new
    /// cluster. Off by default.
    pub refine: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    /// Exactly `N` clusters.
    pub partition: Partition,
    /// Class index for every vertex.
    pub labels: Vec<usize>,
    /// Non-training vertices of degree zero, placed by the tie rule.
    pub isolated: Vec<usize>,
}

impl Classification {
    pub fn class_of(&self, v: usize) -> usize {
        self.labels[v]
    }
}

/// Attributes every non-training vertex to one of the training classes.
pub fn classify<S: Scalar>(
    g: &BipartiteGraph,
    train: &TrainingAssignment,
    cfg: &DescentConfig<S>,
) -> Result<Classification> {
    classify_with(g, train, cfg, ClassifyOptions::default())
}

pub fn classify_with<S: Scalar>(
    g: &BipartiteGraph,
    train: &TrainingAssignment,
    cfg: &DescentConfig<S>,
    opts: ClassifyOptions,
) -> Result<Classification> {
    train.validate(g)?;
    let n = train.n_classes();
    let mut start = Vec::with_capacity(g.n_vertices());
    let mut next_free = n;
    for v in 0..g.n_vertices() {
        match train.class_of(v) {
            Some(c) => start.push(c),
            None => {
                start.push(next_free);
                next_free += 1;
            }
        }
    }
    let p = Partition::new(g, &start)?;
    let mut anchors = vec![usize::MAX; n];
    for (v, c) in train.vertices() {
        anchors[c] = p.cluster_of(v);
    }
    if let Some(c) = anchors.iter().position(|&a| a == usize::MAX) {
        return Err(Error::Training(format!(
            "class `{}` has no training vertices",
            train.class_names()[c]
        )));
    }

    let out = redistribute_to_anchors(g, &p, n, Some(&anchors), cfg)?;
    let mut labels = out.labels;
    if opts.refine {
        labels = refine(g, train, labels, cfg)?;
    }
    let partition = Partition::new(g, &labels)?;
    Ok(Classification {
        partition,
        labels,
        isolated: out.isolated,
    })
}

fn refine<S: Scalar>(
    g: &BipartiteGraph,
    train: &TrainingAssignment,
    labels: Vec<usize>,
    cfg: &DescentConfig<S>,
) -> Result<Vec<usize>> {
    let start = Partition::new(g, &labels)?;
    let polished = local_descent(g, &Partition::singletons(g), &start, cfg)?;
    let mut votes = vec![vec![0usize; train.n_classes()]; polished.n_clusters()];
    for (v, c) in train.vertices() {
        votes[polished.cluster_of(v)][c] += 1;
    }
    let majority: Vec<Option<usize>> = votes
        .iter()
        .map(|row| {
            let best = (0..row.len()).max_by(|&a, &b| row[a].cmp(&row[b]).then(b.cmp(&a)))?;
            (row[best] > 0).then_some(best)
        })
        .collect();
    Ok(labels
        .iter()
        .enumerate()
        .map(|(v, &old)| match train.class_of(v) {
            Some(c) => c,
            None => majority[polished.cluster_of(v)].unwrap_or(old),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_fixtures::two_bicliques;

    #[test]
    fn seeds_pull_their_components() {
        let g = two_bicliques();
        let train = TrainingAssignment::from_rows([(0, "A"), (2, "B")]).unwrap();
        let out = classify(&g, &train, &DescentConfig::new(1.0)).unwrap();
        assert_eq!(out.class_of(1), 0);
        assert_eq!(out.class_of(3), 1);
        assert_eq!(out.partition.n_clusters(), 2);
    }

    #[test]
    fn fully_trained_is_unchanged() {
        let g = two_bicliques();
        let rows: Vec<_> = (0..8)
            .map(|v| (v, if v % 2 == 0 { "A" } else { "B" }))
            .collect();
        let train = TrainingAssignment::from_rows(rows).unwrap();
        let out = classify(&g, &train, &DescentConfig::new(1.0)).unwrap();
        for v in 0..8 {
            assert_eq!(out.class_of(v), v % 2);
        }
    }

    #[test]
    fn empty_class_rejected() {
        let mut assign = BTreeMap::new();
        assign.insert(0, 0);
        assert!(TrainingAssignment::new(vec!["A".into(), "B".into()], assign).is_err());
    }

    #[test]
    fn vertex_outside_graph_rejected() {
        let g = two_bicliques();
        let train = TrainingAssignment::from_rows([(0, "A"), (42, "B")]).unwrap();
        assert!(classify(&g, &train, &DescentConfig::new(1.0)).is_err());
    }

    #[test]
    fn conflicting_rows_rejected() {
        assert!(TrainingAssignment::from_rows([(0, "A"), (0, "B")]).is_err());
    }

    #[test]
    fn tsv_with_seed_words() {
        let g = two_bicliques();
        let t = parse_training_tsv("d1\tA\nword:w3\tB\n\n", &g).unwrap();
        assert_eq!(t.class_of(0), Some(0));
        assert_eq!(t.class_of(6), Some(1));
        assert!(parse_training_tsv("nope\tA\n", &g).is_err());
        assert!(parse_training_tsv("d1 A\n", &g).is_err());
    }

    #[test]
    fn refine_keeps_training_labels() {
        let g = two_bicliques();
        let train = TrainingAssignment::from_rows([(0, "A"), (2, "B")]).unwrap();
        let opts = ClassifyOptions { refine: true };
        let out = classify_with(&g, &train, &DescentConfig::new(1.0), opts).unwrap();
        assert_eq!(out.class_of(0), 0);
        assert_eq!(out.class_of(2), 1);
        assert_eq!(out.class_of(1), 0);
    }
}

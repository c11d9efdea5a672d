//! Corpus ingestion, token preprocessing and document-feature graph
//! construction.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;

const SMART_STOPLIST: &str = include_str!("../data/smart_stoplist.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
    Unlabeled,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub doc_id: String,
    pub gold_label: Option<String>,
    pub split: Split,
    pub tokens: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<Document>,
    class_set: BTreeSet<String>,
}

impl Corpus {
    pub fn new(documents: Vec<Document>) -> Result<Self> {
        let mut ids = HashSet::with_capacity(documents.len());
        for d in &documents {
            if !ids.insert(d.doc_id.as_str()) {
                return Err(Error::DuplicateDocument(d.doc_id.clone()));
            }
        }
        let class_set = documents
            .iter()
            .filter_map(|d| d.gold_label.clone())
            .collect();
        Ok(Self {
            documents,
            class_set,
        })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn class_set(&self) -> &BTreeSet<String> {
        &self.class_set
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn count(&self, split: Split) -> usize {
        self.documents.iter().filter(|d| d.split == split).count()
    }

    /// Documents left without tokens by preprocessing. They stay in the
    /// corpus and become isolated vertices.
    pub fn empty_documents(&self) -> Vec<&str> {
        self.documents
            .iter()
            .filter(|d| d.tokens.is_empty())
            .map(|d| d.doc_id.as_str())
            .collect()
    }

    /// Concatenates two corpora, keeping document order.
    pub fn merge(self, other: Corpus) -> Result<Self> {
        let mut docs = self.documents;
        docs.extend(other.documents);
        Self::new(docs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorpusFormat {
    /// `<label> <token> <token> ...`, one document per line.
    #[default]
    LabeledLines,
}

/// Reads one corpus file; every document is tagged with `split`.
pub fn load_corpus(path: impl AsRef<Path>, format: CorpusFormat, split: Split) -> Result<Corpus> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let CorpusFormat::LabeledLines = format;
    let mut docs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let mut fields = line.split_whitespace();
        let Some(label) = fields.next() else { continue };
        let tokens: Vec<String> = fields.map(str::to_string).collect();
        if tokens.is_empty() {
            return Err(Error::Load {
                path: path.to_path_buf(),
                line: i + 1,
                message: "expected a label followed by at least one token".into(),
            });
        }
        docs.push(Document {
            doc_id: format!("{name}:{}", i + 1),
            gold_label: Some(label.to_string()),
            split,
            tokens,
        });
    }
    if docs.is_empty() {
        log::warn!("{} contains no documents", path.display());
    }
    Corpus::new(docs)
}

/// Loads a train file and a test file into one corpus, train first.
pub fn load_train_test(train: impl AsRef<Path>, test: impl AsRef<Path>) -> Result<Corpus> {
    let a = load_corpus(train, CorpusFormat::LabeledLines, Split::Train)?;
    let b = load_corpus(test, CorpusFormat::LabeledLines, Split::Test)?;
    a.merge(b)
}

pub fn smart_stoplist() -> BTreeSet<String> {
    parse_stoplist(SMART_STOPLIST)
}

fn parse_stoplist(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}

/// Stoplist file: one token per line.
pub fn load_stoplist(path: impl AsRef<Path>) -> Result<BTreeSet<String>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_stoplist(&text))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineConfig {
    pub stoplist: BTreeSet<String>,
    pub stem: bool,
    /// Features in fewer documents than this are dropped.
    pub min_doc_frequency: usize,
    pub use_bigrams: bool,
    pub lowercase: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            stoplist: smart_stoplist(),
            stem: true,
            min_doc_frequency: 5,
            use_bigrams: false,
            lowercase: true,
        }
    }
}

impl PipelineConfig {
    /// Leaves tokens untouched: no stoplist, no stemming, no frequency
    /// filter, no case folding.
    pub fn identity() -> Self {
        Self {
            stoplist: BTreeSet::new(),
            stem: false,
            min_doc_frequency: 1,
            use_bigrams: false,
            lowercase: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_doc_frequency < 1 {
            return Err(Error::Config("min_doc_frequency must be at least 1".into()));
        }
        Ok(())
    }

    pub fn summary(&self) -> PipelineSummary {
        // FNV-1a over the sorted stoplist
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for w in &self.stoplist {
            for b in w.bytes().chain(std::iter::once(b'\n')) {
                h ^= b as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        PipelineSummary {
            stem: self.stem,
            min_doc_frequency: self.min_doc_frequency,
            use_bigrams: self.use_bigrams,
            lowercase: self.lowercase,
            stoplist_size: self.stoplist.len(),
            stoplist_fingerprint: format!("{h:016x}"),
        }
    }
}

/// Reproducibility record of a [`PipelineConfig`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PipelineSummary {
    pub stem: bool,
    pub min_doc_frequency: usize,
    pub use_bigrams: bool,
    pub lowercase: bool,
    pub stoplist_size: usize,
    pub stoplist_fingerprint: String,
}

/// Porter stemmer for English.
pub fn stem(token: &str) -> String {
    porter_stemmer::stem(token)
}

fn document_frequency<'a, I>(docs: I) -> HashMap<String, usize>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut df: HashMap<String, usize> = HashMap::new();
    for features in docs {
        let distinct: HashSet<String> = features.into_iter().collect();
        for f in distinct {
            *df.entry(f).or_default() += 1;
        }
    }
    df
}

/// Lowercase, drop stopwords, stem, then drop tokens that occur in fewer
/// than `min_doc_frequency` documents.
pub fn preprocess(corpus: &Corpus, cfg: &PipelineConfig) -> Corpus {
    let mut docs: Vec<Document> = corpus
        .documents()
        .iter()
        .map(|d| {
            let tokens = d
                .tokens
                .iter()
                .map(|t| {
                    if cfg.lowercase {
                        t.to_lowercase()
                    } else {
                        t.clone()
                    }
                })
                .filter(|t| !cfg.stoplist.contains(t))
                .map(|t| if cfg.stem { stem(&t) } else { t })
                .filter(|t| !t.is_empty())
                .collect();
            Document {
                tokens,
                ..d.clone()
            }
        })
        .collect();

    if cfg.min_doc_frequency > 1 {
        let df = document_frequency(docs.iter().map(|d| d.tokens.clone()));
        for d in &mut docs {
            d.tokens.retain(|t| df[t] >= cfg.min_doc_frequency);
        }
    }
    let empty = docs.iter().filter(|d| d.tokens.is_empty()).count();
    if empty > 0 {
        log::warn!("{empty} documents have no tokens left after preprocessing");
    }
    Corpus {
        documents: docs,
        class_set: corpus.class_set.clone(),
    }
}

fn bigrams(tokens: &[String]) -> impl Iterator<Item = String> + '_ {
    tokens.windows(2).map(|w| format!("{}_{}", w[0], w[1]))
}

/// Document-feature graph of a preprocessed corpus.
///
/// Documents keep corpus order; features are numbered by first occurrence
/// (walking documents in order, each word followed by the bigram it
/// closes). Bigrams are filtered with the same document-frequency
/// threshold as words.
pub fn build_graph(corpus: &Corpus, cfg: &PipelineConfig) -> Result<BipartiteGraph> {
    cfg.validate()?;
    if corpus.documents().iter().all(|d| d.tokens.is_empty()) {
        return Err(Error::Graph("corpus has no non-empty documents".into()));
    }
    let bigram_df = if cfg.use_bigrams {
        document_frequency(
            corpus
                .documents()
                .iter()
                .map(|d| bigrams(&d.tokens).collect()),
        )
    } else {
        HashMap::new()
    };

    let mut index: HashMap<String, usize> = HashMap::new();
    let mut features: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    let mut intern = |f: String, doc: usize, edges: &mut Vec<(usize, usize)>| {
        let id = *index.entry(f).or_insert_with_key(|k| {
            features.push(k.clone());
            features.len() - 1
        });
        edges.push((doc, id));
    };
    for (d, doc) in corpus.documents().iter().enumerate() {
        for (i, tok) in doc.tokens.iter().enumerate() {
            intern(tok.clone(), d, &mut edges);
            if cfg.use_bigrams && i > 0 {
                let bg = format!("{}_{}", doc.tokens[i - 1], tok);
                if bigram_df[&bg] >= cfg.min_doc_frequency {
                    intern(bg, d, &mut edges);
                }
            }
        }
    }
    let doc_labels = corpus
        .documents()
        .iter()
        .map(|d| d.doc_id.clone())
        .collect();
    BipartiteGraph::from_edges(doc_labels, features, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(id: &str, label: &str, tokens: &[&str]) -> Document {
        Document {
            doc_id: id.into(),
            gold_label: Some(label.into()),
            split: Split::Unlabeled,
            tokens: tokens.iter().map(|t| t.to_string()).collect(),
        }
    }

    #[test]
    fn stems_and_stoplist() {
        let c = Corpus::new(vec![doc("x", "sci.space", &["The", "Shuttle", "launched"])]).unwrap();
        let cfg = PipelineConfig {
            min_doc_frequency: 1,
            ..PipelineConfig::default()
        };
        let out = preprocess(&c, &cfg);
        assert_eq!(out.documents()[0].tokens, vec!["shuttl", "launch"]);
    }

    #[test]
    fn rare_tokens_dropped_everywhere() {
        let mut docs: Vec<Document> = (0..4)
            .map(|i| doc(&format!("d{i}"), "a", &["rare", "common"]))
            .collect();
        docs.push(doc("d4", "a", &["common"]));
        let c = Corpus::new(docs).unwrap();
        let cfg = PipelineConfig {
            min_doc_frequency: 5,
            ..PipelineConfig::identity()
        };
        let out = preprocess(&c, &cfg);
        assert!(out.documents().iter().all(|d| d.tokens == vec!["common"]));
    }

    #[test]
    fn identity_config_is_a_no_op() {
        let c = Corpus::new(vec![
            doc("a", "x", &["Foo", "the", "running"]),
            doc("b", "y", &["bar"]),
        ])
        .unwrap();
        assert_eq!(preprocess(&c, &PipelineConfig::identity()), c);
    }

    #[test]
    fn empty_after_filtering_is_reported() {
        let c = Corpus::new(vec![doc("a", "x", &["the"]), doc("b", "y", &["shuttle"])]).unwrap();
        let cfg = PipelineConfig {
            min_doc_frequency: 1,
            ..PipelineConfig::default()
        };
        let out = preprocess(&c, &cfg);
        assert_eq!(out.len(), 2);
        assert_eq!(out.empty_documents(), vec!["a"]);
    }

    #[test]
    fn small_graph() {
        let c = Corpus::new(vec![
            doc("d1", "x", &["a", "b"]),
            doc("d2", "x", &["b", "c"]),
        ])
        .unwrap();
        let g = build_graph(&c, &PipelineConfig::identity()).unwrap();
        assert_eq!((g.n_docs(), g.n_features(), g.n_edges()), (2, 3, 4));
        assert_eq!(g.labels(), &["d1", "d2", "a", "b", "c"]);
        g.validate().unwrap();
    }

    #[test]
    fn bigram_features() {
        let c = Corpus::new(vec![doc("d", "x", &["good", "hotel", "room"])]).unwrap();
        let cfg = PipelineConfig {
            use_bigrams: true,
            ..PipelineConfig::identity()
        };
        let g = build_graph(&c, &cfg).unwrap();
        assert_eq!(
            &g.labels()[1..],
            &["good", "hotel", "good_hotel", "room", "hotel_room"]
        );
    }

    #[test]
    fn repeated_tokens_give_one_edge() {
        let c = Corpus::new(vec![doc("d", "x", &["a", "a", "a"])]).unwrap();
        let g = build_graph(&c, &PipelineConfig::identity()).unwrap();
        assert_eq!(g.n_edges(), 1);
    }

    #[test]
    fn all_empty_is_an_error() {
        let c = Corpus::new(vec![doc("d", "x", &["the"])]).unwrap();
        let cfg = PipelineConfig {
            min_doc_frequency: 1,
            ..PipelineConfig::default()
        };
        assert!(build_graph(&preprocess(&c, &cfg), &cfg).is_err());
    }

    #[test]
    fn duplicate_ids_rejected() {
        assert!(Corpus::new(vec![doc("d", "x", &["a"]), doc("d", "y", &["b"])]).is_err());
    }

    #[test]
    fn shipped_stoplist() {
        let s = smart_stoplist();
        assert!(s.len() > 500);
        assert!(s.contains("the") && s.contains("whereupon"));
    }
}

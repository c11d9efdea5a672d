use std::io::Write;

use bimod::corpus::{load_stoplist, load_train_test, smart_stoplist, stem, CorpusFormat};
use bimod::{build_graph, load_corpus, preprocess, Error, PipelineConfig, Split};

fn file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn loads_labelled_lines() {
    let f = file("sport ball goal goal\n\npolitics vote law\n");
    let c = load_corpus(f.path(), CorpusFormat::LabeledLines, Split::Train).unwrap();
    assert_eq!(c.len(), 2);
    let d = &c.documents()[1];
    assert_eq!(d.gold_label.as_deref(), Some("politics"));
    assert_eq!(d.tokens, vec!["vote", "law"]);
    assert!(d.doc_id.ends_with(":3"));
    assert_eq!(c.class_set().len(), 2);
}

#[test]
fn malformed_line_names_file_and_line() {
    let f = file("a x y\nlonely\n");
    let err = load_corpus(f.path(), CorpusFormat::LabeledLines, Split::Test).unwrap_err();
    match &err {
        Error::Load { path, line, .. } => {
            assert_eq!(path, f.path());
            assert_eq!(*line, 2);
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(err.to_string().contains(&f.path().display().to_string()));
}

#[test]
fn missing_file_names_path() {
    let err = load_corpus(
        "/no/such/corpus.txt",
        CorpusFormat::LabeledLines,
        Split::Train,
    )
    .unwrap_err();
    assert!(err.to_string().contains("/no/such/corpus.txt"));
}

#[test]
fn empty_file_is_an_empty_corpus() {
    let f = file("");
    let c = load_corpus(f.path(), CorpusFormat::LabeledLines, Split::Train).unwrap();
    assert!(c.is_empty());
    assert!(build_graph(&c, &PipelineConfig::identity()).is_err());
}

#[test]
fn train_and_test_merge_in_order() {
    let (a, b) = (file("x p q\ny r s\n"), file("x p r\n"));
    let c = load_train_test(a.path(), b.path()).unwrap();
    assert_eq!(c.count(Split::Train), 2);
    assert_eq!(c.count(Split::Test), 1);
    assert_eq!(c.documents()[2].split, Split::Test);
}

#[test]
fn pipeline_filters_stems_and_counts() {
    let f = file(
        "a The Running dogs were running\n\
         a running dogs bark\n\
         b cats sleep quietly\n\
         b cats sleeping\n",
    );
    let c = load_corpus(f.path(), CorpusFormat::LabeledLines, Split::Unlabeled).unwrap();
    let cfg = PipelineConfig {
        min_doc_frequency: 2,
        ..PipelineConfig::default()
    };
    let p = preprocess(&c, &cfg);
    assert_eq!(p.documents()[0].tokens, vec!["run", "dog", "run"]);
    assert_eq!(p.documents()[2].tokens, vec!["cat", "sleep"]);
    let g = build_graph(&p, &cfg).unwrap();
    assert_eq!(g.n_docs(), 4);
    assert_eq!(g.n_features(), 4);
    // repeated tokens give one unit edge
    assert_eq!(g.degree(0), 2);
    assert_eq!(g.n_edges(), 8);
}

#[test]
fn bigrams_share_the_frequency_threshold() {
    let f = file("a new york city\na new york times\nb old town\n");
    let c = load_corpus(f.path(), CorpusFormat::LabeledLines, Split::Unlabeled).unwrap();
    let cfg = PipelineConfig {
        use_bigrams: true,
        min_doc_frequency: 2,
        ..PipelineConfig::identity()
    };
    let g = build_graph(&preprocess(&c, &cfg), &cfg).unwrap();
    let feats: Vec<&str> = (g.n_docs()..g.n_vertices()).map(|v| g.label(v)).collect();
    assert_eq!(feats, vec!["new", "york", "new_york"]);
    assert_eq!(g.degree(2), 0);
}

#[test]
fn stoplists() {
    let smart = smart_stoplist();
    assert!(smart.len() > 500);
    for w in ["the", "and", "were", "about"] {
        assert!(smart.contains(w), "{w}");
    }
    let f = file("foo\n\n  bar \n");
    let custom = load_stoplist(f.path()).unwrap();
    assert_eq!(custom.len(), 2);
    assert!(custom.contains("bar"));
    assert_eq!(stem("running"), "run");
    assert_eq!(stem("cats"), "cat");
}

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use bimod::classify::{parse_training_tsv, ClassifyOptions, TrainingAssignment};
use bimod::corpus::{
    load_stoplist, load_train_test, smart_stoplist, CorpusFormat, PipelineSummary,
};
use bimod::eval::EvalReport;
use bimod::report::{
    graph_tsv, partition_tsv, predictions_tsv, run_classify, run_classify_documents, run_cluster,
    training_from_corpus, ClusterOutput, ClusterReport, GraphSidecar,
};
use bimod::{
    build_graph, load_corpus, preprocess, BipartiteGraph, Corpus, DescentConfig64, PipelineConfig,
    Split,
};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::args::{ClassifyArgs, ClusterArgs, DescentArgs, InputArgs, PipelineArgs, SweepArgs};

/// A failed run, classified by exit status.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(String),
    Internal(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<bimod::Error> for Failure {
    fn from(e: bimod::Error) -> Self {
        use bimod::Error as E;
        let msg = e.to_string();
        match e {
            E::Config(_) | E::Projection { .. } => Failure::Usage(msg),
            E::Io { .. }
            | E::Load { .. }
            | E::DuplicateDocument(_)
            | E::Graph(_)
            | E::EmptyGraph
            | E::Training(_)
            | E::LabelMismatch(_) => Failure::Data(msg),
            E::VertexCountMismatch { .. }
            | E::NotCoarsening { .. }
            | E::UnknownCluster(_)
            | E::UnknownBlock(_)
            | E::Invariant(_) => Failure::Internal(msg),
        }
    }
}

type Result<T> = std::result::Result<T, Failure>;

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents)
        .map_err(|e| Failure::Data(format!("cannot write {}: {e}", path.display())))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path)
        .map_err(|e| Failure::Data(format!("cannot create {}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn pipeline_config(args: &PipelineArgs) -> Result<PipelineConfig> {
    let stoplist = match args.stoplist.as_str() {
        "smart" => smart_stoplist(),
        "none" => Default::default(),
        path => load_stoplist(path)?,
    };
    let cfg = PipelineConfig {
        stoplist,
        stem: args.stem.is_on(),
        min_doc_frequency: args.min_df,
        use_bigrams: args.bigrams.is_on(),
        lowercase: args.lowercase.is_on(),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (fs::canonicalize(a), fs::canonicalize(b)) {
        (Ok(x), Ok(y)) => x == y,
        _ => a == b,
    }
}

fn load_input(input: &InputArgs) -> Result<(Corpus, Vec<PathBuf>)> {
    match (&input.corpus, &input.train, &input.test) {
        (Some(path), None, None) => {
            let c = load_corpus(path, CorpusFormat::LabeledLines, Split::Unlabeled)?;
            Ok((c, vec![path.clone()]))
        }
        (None, Some(train), Some(test)) if same_file(train, test) => {
            let c = load_corpus(train, CorpusFormat::LabeledLines, Split::Unlabeled)?;
            Ok((c, vec![train.clone()]))
        }
        (None, Some(train), Some(test)) => Ok((
            load_train_test(train, test)?,
            vec![train.clone(), test.clone()],
        )),
        _ => Err(Failure::Usage(
            "give either --corpus or both --train and --test".into(),
        )),
    }
}

/// Preprocesses `raw`, builds its graph and writes `graph.tsv` plus the
/// `graph.json` sidecar.
fn prepare(
    raw: &Corpus,
    pipeline: &PipelineConfig,
    out: &Path,
) -> Result<(Corpus, BipartiteGraph)> {
    let corpus = preprocess(raw, pipeline);
    let g = build_graph(&corpus, pipeline)?;
    create_dir(out)?;
    write(&out.join("graph.tsv"), graph_tsv(&g))?;
    write(
        &out.join("graph.json"),
        to_json(&GraphSidecar::new(&g, &corpus, pipeline)),
    )?;
    log::info!(
        "graph: {} documents, {} features, {} edges",
        g.n_docs(),
        g.n_features(),
        g.n_edges()
    );
    Ok((corpus, g))
}

fn descent_config(lambda: f64, args: &DescentArgs) -> Result<DescentConfig64> {
    let cfg = DescentConfig64::new(lambda)
        .with_schedule(args.schedule.into())
        .with_seed(args.seed)
        .with_astray_order(args.astray_order.into());
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Serialize)]
struct InputFile {
    path: String,
    sha256: String,
}

/// Everything that determines a run's outputs. The output directory is
/// deliberately left out.
#[derive(Debug, Serialize)]
struct RunConfig {
    command: &'static str,
    inputs: Vec<String>,
    pipeline: PipelineSummary,
    schedule: String,
    astray_order: String,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    clusters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    refine: Option<bool>,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    library_version: &'static str,
    config_hash: String,
    config: &'a RunConfig,
    inputs: Vec<InputFile>,
    outputs: Vec<String>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write_manifest(
    out: &Path,
    config: &RunConfig,
    inputs: &[PathBuf],
    mut outputs: Vec<String>,
) -> Result<()> {
    let files = inputs
        .iter()
        .map(|p| {
            let bytes = fs::read(p)
                .map_err(|e| Failure::Data(format!("cannot read {}: {e}", p.display())))?;
            Ok(InputFile {
                path: p.display().to_string(),
                sha256: sha256_hex(&bytes),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    outputs.sort();
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        library_version: bimod::VERSION,
        config_hash: sha256_hex(
            serde_json::to_string(config)
                .expect("serializable")
                .as_bytes(),
        ),
        config,
        inputs: files,
        outputs,
    };
    write(&out.join("manifest.json"), to_json(&manifest))
}

/// Writes the partition, report and optional projection of one clustering
/// into `dir`; returns the file names written.
fn write_clustering(dir: &Path, g: &BipartiteGraph, out: &ClusterOutput) -> Result<Vec<String>> {
    create_dir(dir)?;
    write(&dir.join("partition.tsv"), partition_tsv(g, &out.partition))?;
    write(&dir.join("report.json"), out.report.to_json())?;
    let mut names = vec!["partition.tsv".to_string(), "report.json".to_string()];
    if let Some((p, rep)) = &out.projection {
        write(&dir.join("projection.tsv"), partition_tsv(g, p))?;
        write(&dir.join("projection.json"), rep.to_json())?;
        names.extend(["projection.tsv".to_string(), "projection.json".to_string()]);
    }
    Ok(names)
}

fn summary_line(rep: &ClusterReport) -> String {
    let mut s = format!(
        "lambda {}  clusters {}  Q {:.6}",
        rep.lambda, rep.n_clusters, rep.modularity.total
    );
    if let (Some(nmi), Some(purity)) = (rep.nmi, rep.purity) {
        let _ = write!(s, "  NMI {nmi:.4}  Purity {purity:.4}");
    }
    s
}

fn input_strings(inputs: &[PathBuf]) -> Vec<String> {
    inputs.iter().map(|p| p.display().to_string()).collect()
}

pub fn cluster(args: &ClusterArgs) -> Result<()> {
    let pipeline = pipeline_config(&args.pipeline)?;
    let cfg = descent_config(args.lambda, &args.descent)?;
    if args.clusters == Some(0) {
        return Err(Failure::Usage("--clusters must be at least 1".into()));
    }
    let (raw, inputs) = load_input(&args.input)?;
    let out_dir = &args.descent.out;
    let (corpus, g) = prepare(&raw, &pipeline, out_dir)?;
    let result = run_cluster(&g, &corpus, &cfg, args.clusters)?;
    let mut outputs = write_clustering(out_dir, &g, &result)?;
    outputs.extend(["graph.tsv".to_string(), "graph.json".to_string()]);

    println!("{}", summary_line(&result.report));
    if let Some((_, rep)) = &result.projection {
        println!("projection: {}", summary_line(rep));
    }
    let config = RunConfig {
        command: "cluster",
        inputs: input_strings(&inputs),
        pipeline: pipeline.summary(),
        schedule: cfg.schedule.to_string(),
        astray_order: cfg.astray_order.to_string(),
        seed: cfg.seed,
        lambda: Some(args.lambda),
        sweep: None,
        clusters: args.clusters,
        refine: None,
    };
    write_manifest(out_dir, &config, &inputs, outputs)
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("BIMOD_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| {
            Failure::Usage(format!(
                "BIMOD_THREADS must be a positive integer, got `{v}`"
            ))
        })?;
        builder = builder.num_threads(n.max(1));
    }
    builder
        .build()
        .map_err(|e| Failure::Internal(format!("cannot start thread pool: {e}")))
}

/// Directory name for one sweep point.
pub fn lambda_dir(lambda: f64) -> String {
    format!("lambda-{lambda}")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

pub fn sweep(args: &SweepArgs) -> Result<()> {
    let pipeline = pipeline_config(&args.pipeline)?;
    let lambdas = args.sweep.values();
    let configs = lambdas
        .iter()
        .map(|&l| descent_config(l, &args.descent))
        .collect::<Result<Vec<_>>>()?;
    if args.clusters == Some(0) {
        return Err(Failure::Usage("--clusters must be at least 1".into()));
    }
    let (raw, inputs) = load_input(&args.input)?;
    let out_dir = &args.descent.out;
    let (corpus, g) = prepare(&raw, &pipeline, out_dir)?;

    let pool = thread_pool()?;
    let results: Vec<Result<(ClusterOutput, Vec<String>)>> = pool.install(|| {
        configs
            .par_iter()
            .map(|cfg| {
                let out = run_cluster(&g, &corpus, cfg, args.clusters)?;
                let dir = lambda_dir(cfg.lambda);
                let names = write_clustering(&out_dir.join(&dir), &g, &out)?;
                Ok((
                    out,
                    names.into_iter().map(|n| format!("{dir}/{n}")).collect(),
                ))
            })
            .collect()
    });
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;

    // best NMI, ties to the smaller λ
    let mut best: Option<(usize, f64)> = None;
    for (i, (out, _)) in results.iter().enumerate() {
        if let Some(nmi) = out.report.nmi {
            if best.is_none_or(|(_, b)| nmi > b) {
                best = Some((i, nmi));
            }
        }
    }

    let mut table = String::from("lambda\tn_clusters\tQ\tedge_term\tnull_term\tNMI\tPurity");
    if args.clusters.is_some() {
        table.push_str("\tprojected_clusters\tprojected_Q\tprojected_NMI\tprojected_Purity");
    }
    table.push_str("\tbest\n");
    let mut outputs = vec![
        "graph.tsv".to_string(),
        "graph.json".to_string(),
        "sweep.tsv".to_string(),
    ];
    for (i, (out, names)) in results.iter().enumerate() {
        let r = &out.report;
        let _ = write!(
            table,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.lambda,
            r.n_clusters,
            r.modularity.total,
            r.modularity.edge_term,
            r.modularity.null_term,
            opt(r.nmi),
            opt(r.purity)
        );
        if args.clusters.is_some() {
            let p = out.projection.as_ref().map(|(_, rep)| rep).unwrap_or(r);
            let _ = write!(
                table,
                "\t{}\t{}\t{}\t{}",
                p.n_clusters,
                p.modularity.total,
                opt(p.nmi),
                opt(p.purity)
            );
        }
        let mark = if best.is_some_and(|(b, _)| b == i) {
            "*"
        } else {
            ""
        };
        let _ = writeln!(table, "\t{mark}");
        outputs.extend(names.iter().cloned());
    }
    write(&out_dir.join("sweep.tsv"), &table)?;
    print!("{table}");
    match best {
        Some((i, _)) => {
            write(&out_dir.join("best_lambda"), format!("{}\n", lambdas[i]))?;
            outputs.push("best_lambda".to_string());
        }
        None => log::warn!("no gold labels; no best λ marked"),
    }

    let config = RunConfig {
        command: "sweep",
        inputs: input_strings(&inputs),
        pipeline: pipeline.summary(),
        schedule: configs[0].schedule.to_string(),
        astray_order: configs[0].astray_order.to_string(),
        seed: args.descent.seed,
        lambda: None,
        sweep: Some(lambdas),
        clusters: args.clusters,
        refine: None,
    };
    write_manifest(out_dir, &config, &inputs, outputs)
}

fn read_lambda(path: &Path) -> Result<f64> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Data(format!("cannot read {}: {e}", path.display())))?;
    text.trim().parse().map_err(|_| {
        Failure::Data(format!(
            "{}: expected a number, got `{}`",
            path.display(),
            text.trim()
        ))
    })
}

fn merge_training(a: &TrainingAssignment, b: &TrainingAssignment) -> Result<TrainingAssignment> {
    let rows = a
        .vertices()
        .map(|(v, c)| (v, a.class_names()[c].as_str()))
        .chain(b.vertices().map(|(v, c)| (v, b.class_names()[c].as_str())));
    Ok(TrainingAssignment::from_rows(rows)?)
}

#[derive(Debug, Serialize)]
struct ClassifyJson<'a> {
    report: &'a EvalReport,
    self_classification: bool,
    isolated_documents: &'a [String],
    unseen_classes: &'a [String],
}

pub fn classify(args: &ClassifyArgs) -> Result<()> {
    let pipeline = pipeline_config(&args.pipeline)?;
    let lambda = match (&args.lambda, &args.lambda_file) {
        (Some(l), _) => *l,
        (None, Some(path)) => read_lambda(path)?,
        (None, None) => 1.0,
    };
    let cfg = descent_config(lambda, &args.descent)?;
    let self_classification = same_file(&args.train, &args.test);
    let (raw, mut inputs) = if self_classification {
        let c = load_corpus(&args.train, CorpusFormat::LabeledLines, Split::Train)?;
        (c, vec![args.train.clone()])
    } else {
        (
            load_train_test(&args.train, &args.test)?,
            vec![args.train.clone(), args.test.clone()],
        )
    };
    let out_dir = &args.descent.out;
    let (corpus, g) = prepare(&raw, &pipeline, out_dir)?;
    let mut train = training_from_corpus(&corpus)?;
    if let Some(path) = &args.seeds {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Data(format!("cannot read {}: {e}", path.display())))?;
        let seeds = parse_training_tsv(&text, &g)
            .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
        train = merge_training(&train, &seeds)?;
        inputs.push(path.clone());
    }
    let opts = ClassifyOptions {
        refine: args.refine,
    };
    let result = if self_classification {
        let all: Vec<usize> = (0..corpus.len()).collect();
        run_classify_documents(&g, &corpus, &train, &cfg, opts, &all)?
    } else {
        run_classify(&g, &corpus, &train, &cfg, opts)?
    };

    write(
        &out_dir.join("predictions.tsv"),
        predictions_tsv(&result.predictions),
    )?;
    let json = ClassifyJson {
        report: &result.report,
        self_classification,
        isolated_documents: &result.isolated_documents,
        unseen_classes: &result.unseen_classes,
    };
    write(&out_dir.join("classify.json"), to_json(&json))?;

    match &result.scores {
        Some(s) => println!(
            "lambda {lambda}  documents {}  micro-F1 {:.2}  macro-F1 {:.2}",
            s.documents, s.micro_f1, s.macro_f1
        ),
        None => println!(
            "lambda {lambda}  {} documents predicted, none labelled",
            result.predictions.len()
        ),
    }
    let config = RunConfig {
        command: "classify",
        inputs: input_strings(&inputs),
        pipeline: pipeline.summary(),
        schedule: cfg.schedule.to_string(),
        astray_order: cfg.astray_order.to_string(),
        seed: cfg.seed,
        lambda: Some(lambda),
        sweep: None,
        clusters: None,
        refine: Some(args.refine),
    };
    let outputs = [
        "graph.tsv",
        "graph.json",
        "predictions.tsv",
        "classify.json",
    ]
    .map(String::from)
    .to_vec();
    write_manifest(out_dir, &config, &inputs, outputs)
}

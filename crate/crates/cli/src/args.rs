use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use bimod::{AstrayOrder, Schedule};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "bimod",
    version,
    about = "Cluster and classify text collections by bipartite modularity"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster a corpus at one value of λ.
    Cluster(ClusterArgs),
    /// Cluster a corpus at every λ of a grid and mark the best one.
    Sweep(SweepArgs),
    /// Attribute test documents to the classes of the training documents.
    Classify(ClassifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Switch {
    On,
    Off,
}

impl Switch {
    pub fn is_on(self) -> bool {
        self == Switch::On
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScheduleArg {
    Louvain,
    Interleaved,
}

impl From<ScheduleArg> for Schedule {
    fn from(s: ScheduleArg) -> Self {
        match s {
            ScheduleArg::Louvain => Schedule::Louvain,
            ScheduleArg::Interleaved => Schedule::Interleaved,
        }
    }
}

/// Where the input documents come from.
#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Single labelled-lines corpus (documents are unlabelled w.r.t. splits).
    #[arg(long, conflicts_with_all = ["train", "test"])]
    pub corpus: Option<PathBuf>,
    /// Training corpus, labelled lines.
    #[arg(long, requires = "test")]
    pub train: Option<PathBuf>,
    /// Test corpus, labelled lines.
    #[arg(long, requires = "train")]
    pub test: Option<PathBuf>,
}

/// Text preprocessing and graph construction.
#[derive(Debug, Clone, Args)]
pub struct PipelineArgs {
    /// Add consecutive-word pairs as features.
    #[arg(long, value_enum, default_value = "off")]
    pub bigrams: Switch,
    /// Stoplist file (one word per line), `none`, or `smart` for the built-in list.
    #[arg(long, default_value = "smart")]
    pub stoplist: String,
    /// Drop features occurring in fewer documents than this.
    #[arg(long = "min-df", default_value_t = 5)]
    pub min_df: usize,
    /// Porter stemming.
    #[arg(long, value_enum, default_value = "on")]
    pub stem: Switch,
    /// Case folding.
    #[arg(long, value_enum, default_value = "on")]
    pub lowercase: Switch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AstrayOrderArg {
    Degree,
    Index,
}

impl From<AstrayOrderArg> for AstrayOrder {
    fn from(a: AstrayOrderArg) -> Self {
        match a {
            AstrayOrderArg::Degree => AstrayOrder::Degree,
            AstrayOrderArg::Index => AstrayOrder::Index,
        }
    }
}

/// Optimizer settings shared by every command.
#[derive(Debug, Clone, Args)]
pub struct DescentArgs {
    #[arg(long, value_enum, default_value = "interleaved")]
    pub schedule: ScheduleArg,
    /// Placement order of vertices outside the anchor clusters during
    /// projection and classification.
    #[arg(long, value_enum, default_value = "degree")]
    pub astray_order: AstrayOrderArg,
    /// Seed for the sweep order; 0 visits vertices in id order.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory, created if missing.
    #[arg(long, default_value = "bimod-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[command(flatten)]
    pub descent: DescentArgs,
    /// Resolution parameter λ.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Also project the clustering onto this many clusters.
    #[arg(long)]
    pub clusters: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[command(flatten)]
    pub descent: DescentArgs,
    /// λ grid as `start:stop:step`.
    #[arg(long)]
    pub sweep: SweepSpec,
    /// Also project every clustering onto this many clusters.
    #[arg(long)]
    pub clusters: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    /// Training corpus, labelled lines.
    #[arg(long)]
    pub train: PathBuf,
    /// Test corpus, labelled lines. May be the training file itself.
    #[arg(long)]
    pub test: PathBuf,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[command(flatten)]
    pub descent: DescentArgs,
    /// Resolution parameter λ.
    #[arg(long, conflicts_with = "lambda_file")]
    pub lambda: Option<f64>,
    /// Read λ from the `best_lambda` file written by `sweep`.
    #[arg(long)]
    pub lambda_file: Option<PathBuf>,
    /// Extra training vertices: `doc_id<TAB>class` or
    /// `word:<feature><TAB>class` rows, features in preprocessed form.
    #[arg(long)]
    pub seeds: Option<PathBuf>,
    /// After redistribution, polish without constraints and relabel by
    /// training majority.
    #[arg(long)]
    pub refine: bool,
}

/// `start:stop:step` with `start <= stop` and `step > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepSpec {
    /// Grid points, computed by multiplication and rounded to 12 decimals
    /// so that `0.1` steps print cleanly.
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n)
            .map(|i| ((self.start + i as f64 * self.step) * 1e12).round() / 1e12)
            .collect()
    }
}

impl FromStr for SweepSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, c] = parts[..] else {
            return Err(format!("expected start:stop:step, got `{s}`"));
        };
        let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
        let spec = SweepSpec {
            start: num(a)?,
            stop: num(b)?,
            step: num(c)?,
        };
        if !(spec.start.is_finite() && spec.stop.is_finite() && spec.step.is_finite()) {
            return Err("sweep bounds must be finite".into());
        }
        if spec.start < 0.0 {
            return Err("sweep start must be >= 0".into());
        }
        if spec.start > spec.stop {
            return Err(format!(
                "sweep start {} exceeds stop {}",
                spec.start, spec.stop
            ));
        }
        if spec.step <= 0.0 {
            return Err("sweep step must be > 0".into());
        }
        Ok(spec)
    }
}

impl fmt::Display for SweepSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_grid() {
        let s: SweepSpec = "1:3:0.5".parse().unwrap();
        assert_eq!(s.values(), vec![1.0, 1.5, 2.0, 2.5, 3.0]);
        let s: SweepSpec = "0.1:0.3:0.1".parse().unwrap();
        assert_eq!(s.values(), vec![0.1, 0.2, 0.3]);
        let s: SweepSpec = "2:2:1".parse().unwrap();
        assert_eq!(s.values(), vec![2.0]);
    }

    #[test]
    fn sweep_rejects_bad_specs() {
        for bad in ["3:1:1", "1:2:0", "1:2", "a:b:c", "1:2:-1"] {
            assert!(bad.parse::<SweepSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}

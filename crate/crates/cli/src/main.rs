use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use histofeat_core::pipeline::{self, Method, PipelineConfig};
use histofeat_core::{ClassifierKind, Error, Result};

/// Histogram bin-width features for vibration-based condition monitoring.
///
/// Set HISTOFEAT_LOG to error, info or debug for progress output on stderr.
#[derive(Parser)]
#[command(name = "histofeat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the feature table (features.csv) for the configured method.
    Extract(Common),
    /// Cross-validate classifiers; writes report_<clf>.json and table.txt.
    Evaluate(Common),
    /// PCA projection of the feature table to projection.csv.
    Project(Common),
    /// Generate the synthetic bearing suite plus a matching suite.json.
    Synth(Common),
}

#[derive(Args)]
struct Common {
    /// JSON config file; flags below override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// proposed, td, fd or raw-segment.
    #[arg(long)]
    method: Option<String>,
    /// Number of cross-validation folds.
    #[arg(long)]
    k: Option<usize>,
    /// Directory of <state>_*.csv / <state>_*.f64 recordings.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Classifier to evaluate (nn, rf, svm); repeatable.
    #[arg(long = "classifier")]
    classifiers: Vec<String>,
}

impl Common {
    fn config(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::load(path)?,
            None => PipelineConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(m) = &self.method {
            cfg.method = m
                .parse::<Method>()
                .map_err(|e| Error::Config(vec![format!("method: {e}")]))?;
        }
        if let Some(k) = self.k {
            cfg.k = k;
        }
        if let Some(dir) = &self.data {
            cfg.data_dir = Some(dir.clone());
        }
        if !self.classifiers.is_empty() {
            cfg.classifiers = self
                .classifiers
                .iter()
                .map(|c| c.parse::<ClassifierKind>())
                .collect::<Result<_>>()
                .map_err(|e| Error::Config(vec![format!("classifiers: {e}")]))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Extract(c) => {
            let data = pipeline::run_extract(&c.config()?, &c.out)?;
            println!(
                "{} rows x {} features -> {}",
                data.len(),
                data.m_star,
                c.out.join("features.csv").display()
            );
        }
        Command::Evaluate(c) => {
            for r in pipeline::run_evaluate(&c.config()?, &c.out)? {
                print!("{}", r.to_table());
            }
        }
        Command::Project(c) => {
            let p = pipeline::run_project(&c.config()?, &c.out)?;
            println!(
                "{} points -> {}",
                p.points.len(),
                c.out.join("projection.csv").display()
            );
        }
        Command::Synth(c) => {
            let files = pipeline::run_synth(&c.config()?, &c.out)?;
            println!("{} recordings -> {}", files.len(), c.out.display());
        }
    }
    Ok(())
}

fn exit_code(category: &str) -> u8 {
    match category {
        "config" => 2,
        "io" => 3,
        "parse" => 4,
        "signal" => 5,
        "feature" => 6,
        "train" => 7,
        _ => 8,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("HISTOFEAT_LOG", "error"))
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error[{}]: {msg}", e.category());
            ExitCode::from(exit_code(e.category()))
        }
    }
}

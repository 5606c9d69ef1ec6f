use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use clustereval::features::DEFAULT_CHUNK_ROWS;
use clustereval::pipeline::{self, AssignmentSource, DataPaths, RunConfig, Settings, SweepAxis};
use clustereval::report::{write_report, ReportFormat};
use clustereval::{Error, Result};

#[derive(Parser)]
#[command(name = "clustereval", version, about = "PCA + mini-batch k-means evaluation of feature embeddings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit PCA and per-seed k-means; write model directories to --out.
    Fit(Common),
    /// Score models from --models; write a report to --out.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        models: PathBuf,
    },
    /// Fit and score in one pass; write a report to --out.
    Run(Common),
    /// Repeat `run` over values of one parameter; write a CSV to --out.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        axis: SweepAxis,
        /// Comma-separated values, e.g. 64,128,256.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<usize>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    train_features: PathBuf,
    #[arg(long)]
    train_labels: Option<PathBuf>,
    #[arg(long, requires = "eval_labels")]
    eval_features: Option<PathBuf>,
    #[arg(long, requires = "eval_features")]
    eval_labels: Option<PathBuf>,
    #[arg(long, default_value_t = pipeline::DEFAULT_K)]
    k: usize,
    #[arg(long, default_value_t = pipeline::DEFAULT_PCA_DIM)]
    pca_dim: usize,
    #[arg(long, default_value_t = clustereval::kmeans::DEFAULT_EPOCHS)]
    epochs: usize,
    #[arg(long, default_value_t = clustereval::kmeans::DEFAULT_BATCH_SIZE)]
    batch_size: usize,
    /// Comma-separated k-means seeds.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4")]
    seeds: Vec<u64>,
    #[arg(long, value_enum, default_value_t = AssignmentSource::Val)]
    assignment: AssignmentSource,
    /// CSV with `eval_class,target_class` rows.
    #[arg(long)]
    classes: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    format: ReportFormat,
    /// Sequential SVD; bit-identical output across runs.
    #[arg(long)]
    deterministic: bool,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_CHUNK_ROWS, hide = true)]
    chunk_rows: usize,
}

impl Common {
    fn config(&self) -> RunConfig {
        RunConfig {
            data: DataPaths {
                train_features: self.train_features.clone(),
                train_labels: self.train_labels.clone(),
                eval_features: self.eval_features.clone(),
                eval_labels: self.eval_labels.clone(),
                classes: self.classes.clone(),
            },
            settings: Settings {
                k: self.k,
                pca_dim: self.pca_dim,
                epochs: self.epochs,
                batch_size: self.batch_size,
                seeds: self.seeds.clone(),
                assignment: self.assignment,
                pca_batch: None,
                deterministic: self.deterministic,
                threads: self.threads,
            },
            chunk_rows: self.chunk_rows,
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Fit(c) => {
            let models = pipeline::cmd_fit(&c.config(), &c.out)?;
            eprintln!("wrote PCA and {} k-means models to {}", models.kmeans.len(), c.out.display());
        }
        Command::Eval { common: c, models } => {
            let report = pipeline::cmd_eval(&c.config(), &models)?;
            write_report(&report, &c.out, c.format)?;
        }
        Command::Run(c) => {
            let report = pipeline::cmd_run(&c.config())?;
            write_report(&report, &c.out, c.format)?;
        }
        Command::Sweep { common: c, axis, values } => {
            if c.format != ReportFormat::Csv && c.out.extension().is_some_and(|e| e == "json") {
                return Err(Error::Usage("sweep output is CSV".into()));
            }
            pipeline::cmd_sweep(&c.config(), axis, &values, &c.out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

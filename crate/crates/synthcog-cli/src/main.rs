use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use synthcog_cli::{
    cmd_bench, cmd_bench_fixtures_only, cmd_eval, cmd_report, cmd_train, exit_code, RunConfig,
};

/// Episodic SDR sequence classifier: windowed encoding over an online
/// prototype tree, with benchmark analytics.
#[derive(Parser)]
#[command(name = "synthcog", version, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Window length in sequence elements
    #[arg(long)]
    window: Option<usize>,
    /// Elements the window advances between inputs
    #[arg(long)]
    stride: Option<usize>,
    /// Similarity at or above which an input is absorbed into a leaf
    #[arg(long)]
    merge_threshold: Option<f64>,
    /// Similarity at or above which a new leaf branches as a sibling
    #[arg(long)]
    branch_threshold: Option<f64>,
    /// Hard cap on stored representations
    #[arg(long = "max-reps")]
    max_reps: Option<usize>,
    /// Class treated as positive in binary reports
    #[arg(long)]
    positive_label: Option<String>,
    /// Output directory for models and reports
    #[arg(long, env = "SYNTHCOG_OUT", default_value = ".")]
    out: PathBuf,
    /// Include per-sample vote distributions in eval reports
    #[arg(long)]
    verbose: bool,
}

impl ConfigArgs {
    fn run_config(&self) -> RunConfig {
        RunConfig {
            window_n: self.window,
            stride: self.stride,
            merge_threshold: self.merge_threshold,
            branch_threshold: self.branch_threshold,
            max_representations: self.max_reps,
            positive_label: self.positive_label.clone(),
            out_dir: self.out.clone(),
            verbose: self.verbose,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train a model on a dataset's train split
    Train {
        /// Dataset manifest (TOML)
        #[arg(long)]
        manifest: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Evaluate a saved model on a dataset's test split
    Eval {
        /// Saved model file
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Train and evaluate a fresh model per dataset; emit score, rank, and
    /// summary tables
    Bench {
        /// Dataset manifests (repeatable)
        #[arg(long = "manifest", required_unless_present = "fixtures_only")]
        manifests: Vec<PathBuf>,
        /// Comma-separated window sizes to sweep (rows are tagged)
        #[arg(long, value_delimiter = ',')]
        sweep: Option<Vec<usize>>,
        /// Analytics over the bundled reference scores only (no training)
        #[arg(long)]
        fixtures_only: bool,
        /// Merge bundled published score columns into the analytics
        #[arg(long)]
        with_fixture: bool,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Rank and summary analytics over an existing score matrix
    Report {
        /// Score matrix CSV (header: task,<models...>)
        #[arg(long, required_unless_present = "fixtures_only")]
        scores: Option<PathBuf>,
        /// Use the bundled reference scores
        #[arg(long)]
        fixtures_only: bool,
        #[arg(long, env = "SYNTHCOG_OUT", default_value = ".")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Usage problems exit 1; --help and --version exit 0.
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

fn run(cli: Cli) -> synthcog::Result<ExitCode> {
    match cli.command {
        Command::Train { manifest, config } => {
            let outcome = cmd_train(&manifest, &config.run_config())?;
            for w in &outcome.validation_warnings {
                eprintln!("warning: {w}");
            }
            println!(
                "trained {} windows into {} representations",
                outcome.n_train_windows, outcome.n_representations
            );
            println!("model: {}", outcome.model_path.display());
            println!("summary: {}", outcome.summary_path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval {
            model,
            manifest,
            config,
        } => {
            let outcome = cmd_eval(&model, &manifest, &config.run_config())?;
            println!("auc = {}", outcome.auc);
            if outcome.per_class.len() > 2 {
                for (label, auc) in &outcome.per_class {
                    println!("auc[{label}] = {auc}");
                }
            }
            println!("report: {}", outcome.report_path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench {
            manifests,
            sweep,
            fixtures_only,
            with_fixture,
            config,
        } => {
            let outcome = if fixtures_only {
                cmd_bench_fixtures_only(&config.out)?
            } else {
                cmd_bench(
                    &manifests,
                    &config.run_config(),
                    sweep.as_deref(),
                    with_fixture,
                )?
            };
            for r in &outcome.results {
                match r.published {
                    Some(p) => println!(
                        "{}: auc = {:.4} (published {:.3}), {} representations, {:.1}s",
                        r.task, r.auc, p, r.n_representations, r.wall_clock_seconds
                    ),
                    None => println!(
                        "{}: auc = {:.4}, {} representations, {:.1}s",
                        r.task, r.auc, r.n_representations, r.wall_clock_seconds
                    ),
                }
            }
            println!("scores: {}", outcome.scores_path.display());
            if let Some(p) = &outcome.rank_path {
                println!("ranks: {}", p.display());
            }
            if let Some(p) = &outcome.summary_path {
                println!("summary: {}", p.display());
            }
            if let Some(p) = &outcome.comparison_path {
                println!("published comparison: {}", p.display());
            }
            if outcome.failures.is_empty() {
                Ok(ExitCode::SUCCESS)
            } else {
                for (path, err) in &outcome.failures {
                    eprintln!("failed: {}: {err}", path.display());
                }
                Ok(ExitCode::from(2))
            }
        }
        Command::Report {
            scores,
            fixtures_only,
            out,
        } => {
            let outcome = cmd_report(scores.as_deref(), fixtures_only, &out)?;
            println!("model,wins,win_fraction,average_rank");
            for s in &outcome.ranks {
                println!(
                    "{},{},{:.4},{:.4}",
                    s.model, s.wins, s.win_fraction, s.average_rank
                );
            }
            println!("ranks: {}", outcome.rank_path.display());
            println!("summary: {}", outcome.summary_path.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

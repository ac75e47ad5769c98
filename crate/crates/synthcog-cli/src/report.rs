//! Report files: training summaries and evaluation reports.
//!
//! Reports are line-oriented `key = value` text. Every field is deterministic
//! except `wall_clock_seconds`; tooling that compares reports byte-for-byte
//! should drop lines matched by [`is_timing_line`].

use std::fmt::Write as _;

use synthcog::episodic::VoteDistribution;
use synthcog::tree::Model;

/// True for report lines that vary between identical runs.
pub fn is_timing_line(line: &str) -> bool {
    line.starts_with("wall_clock_seconds")
}

fn config_block(out: &mut String, model: &Model) {
    let c = model.config();
    let _ = writeln!(out, "window_n = {}", c.window.n);
    let _ = writeln!(out, "stride = {}", c.window.stride);
    let _ = writeln!(out, "merge_threshold = {}", c.core.merge_threshold);
    let _ = writeln!(out, "branch_threshold = {}", c.core.branch_threshold);
    let _ = writeln!(out, "max_representations = {}", c.core.max_representations);
}

fn labels_line(model: &Model) -> String {
    let quoted: Vec<String> = model.labels().iter().map(|l| format!("{l:?}")).collect();
    format!("labels = [{}]", quoted.join(", "))
}

/// Summary written next to a saved model file.
pub struct TrainSummary<'a> {
    pub dataset: &'a str,
    pub train_samples: usize,
    pub model: &'a Model,
    pub model_file: &'a str,
    pub wall_clock_seconds: f64,
}

impl TrainSummary<'_> {
    pub fn render(&self) -> String {
        let mut out = String::from("# synthcog training summary\n");
        let _ = writeln!(out, "dataset = {:?}", self.dataset);
        let _ = writeln!(out, "train_samples = {}", self.train_samples);
        config_block(&mut out, self.model);
        let _ = writeln!(out, "{}", labels_line(self.model));
        let _ = writeln!(out, "n_train_windows = {}", self.model.trained_count());
        let _ = writeln!(out, "n_representations = {}", self.model.n_nodes());
        let _ = writeln!(out, "n_leaves = {}", self.model.n_leaves());
        let _ = writeln!(out, "n_roots = {}", self.model.roots().len());
        let _ = writeln!(out, "model_file = {:?}", self.model_file);
        let _ = writeln!(out, "wall_clock_seconds = {:.3}", self.wall_clock_seconds);
        out
    }
}

/// Per-dataset evaluation report.
pub struct EvalReport<'a> {
    pub dataset: &'a str,
    pub model: &'a Model,
    pub samples: usize,
    /// Macro one-vs-rest AUC (equals the binary AUC on two-class tasks).
    pub auc: f64,
    /// (label name, one-vs-rest AUC) per class, reported for multiclass runs.
    pub per_class: &'a [(String, f64)],
    pub positive_label: Option<&'a str>,
    pub wall_clock_seconds: f64,
    /// Per-sample details, rendered only in verbose mode.
    pub verbose: Option<EvalSamples<'a>>,
}

pub struct EvalSamples<'a> {
    pub distributions: &'a [VoteDistribution],
    pub true_labels: &'a [String],
}

impl EvalReport<'_> {
    pub fn render(&self) -> String {
        let mut out = String::from("# synthcog evaluation report\n");
        let _ = writeln!(out, "dataset = {:?}", self.dataset);
        let _ = writeln!(out, "split = \"test\"");
        let _ = writeln!(out, "samples = {}", self.samples);
        config_block(&mut out, self.model);
        let _ = writeln!(out, "{}", labels_line(self.model));
        if let Some(p) = self.positive_label {
            let _ = writeln!(out, "positive_label = {p:?}");
        }
        let _ = writeln!(out, "n_train_windows = {}", self.model.trained_count());
        let _ = writeln!(out, "n_representations = {}", self.model.n_nodes());
        let _ = writeln!(out, "auc = {}", self.auc);
        if self.per_class.len() > 2 {
            for (label, auc) in self.per_class {
                let _ = writeln!(out, "auc_class.{label} = {auc}");
            }
        }
        let _ = writeln!(out, "wall_clock_seconds = {:.3}", self.wall_clock_seconds);
        if let Some(samples) = &self.verbose {
            let _ = writeln!(out, "# sample <index> <true> <predicted> probs=<...> votes=<...>");
            for (i, d) in samples.distributions.iter().enumerate() {
                let probs: Vec<String> = d.probs.iter().map(|p| format!("{p}")).collect();
                let votes: Vec<String> = d.counts.iter().map(|c| c.to_string()).collect();
                let _ = writeln!(
                    out,
                    "sample {i} {} {} probs={} votes={}",
                    samples.true_labels[i],
                    self.model.label_name(d.predicted),
                    probs.join(","),
                    votes.join(",")
                );
            }
        }
        out
    }
}

/// Rank/summary tables rendered as delimiter-separated rows.
pub fn rank_csv(stats: &[synthcog::metrics::ModelRankStats]) -> String {
    let mut out = String::from("model,wins,win_fraction,average_rank\n");
    for s in stats {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            s.model, s.wins, s.win_fraction, s.average_rank
        );
    }
    out
}

pub fn summary_csv(stats: &[(String, f64, f64)]) -> String {
    let mut out = String::from("model,mean,std\n");
    for (model, mean, std) in stats {
        let _ = writeln!(out, "{model},{mean},{std}");
    }
    out
}

/// Achieved-vs-published comparison rows for tasks present in the bundled
/// reference table.
pub fn comparison_csv(rows: &[(String, f64, f64)]) -> String {
    let mut out = String::from("task,achieved_auc,published_auc\n");
    for (task, achieved, published) in rows {
        let _ = writeln!(out, "{task},{achieved},{published}");
    }
    out
}

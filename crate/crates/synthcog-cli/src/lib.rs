//! Command implementations behind the `synthcog` binary: train, eval, bench,
//! and report. The binary is a thin argument parser over these functions so
//! integration tests can drive them directly.

pub mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use synthcog::datasets::{
    load_dataset, validate_dataset, DatasetManifest, LabeledSequenceSet, Split,
};
use synthcog::encoder::WindowConfig;
use synthcog::episodic::{classify_sequence, train_sequence, VoteDistribution};
use synthcog::error::{Error, Result};
use synthcog::fixtures::{bundled_benchmark_scores, OWN_MODEL_NAME};
use synthcog::metrics::{
    group_average, rank_table, roc_auc_macro_ovr, summary_stats, ScoreMatrix, TaskGroup,
};
use synthcog::tree::{CoreConfig, Model, ModelConfig};
use synthcog::Codebook;

use report::{comparison_csv, rank_csv, summary_csv, EvalReport, EvalSamples, TrainSummary};

/// Operator-facing knobs. Unset values fall back to the built-in defaults at
/// train time and to the model's own config at eval time.
#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub window_n: Option<usize>,
    pub stride: Option<usize>,
    pub merge_threshold: Option<f64>,
    pub branch_threshold: Option<f64>,
    pub max_representations: Option<usize>,
    pub positive_label: Option<String>,
    pub out_dir: PathBuf,
    pub verbose: bool,
}

impl RunConfig {
    pub fn with_out_dir(dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            out_dir: dir.into(),
            ..Default::default()
        }
    }

    /// Resolve into a concrete model config for training.
    pub fn model_config(&self) -> Result<ModelConfig> {
        let defaults = CoreConfig::default();
        let core = CoreConfig {
            merge_threshold: self.merge_threshold.unwrap_or(defaults.merge_threshold),
            branch_threshold: self.branch_threshold.unwrap_or(defaults.branch_threshold),
            max_representations: self
                .max_representations
                .unwrap_or(defaults.max_representations),
        };
        core.validate()?;
        let window = WindowConfig::new(self.window_n.unwrap_or(5), self.stride.unwrap_or(1))?;
        Ok(ModelConfig {
            core,
            window,
            codebook: Codebook::dna_one_hot(),
        })
    }

    /// Check eval-time overrides against a loaded model's config.
    fn check_against_model(&self, model: &Model) -> Result<()> {
        let w = model.config().window;
        if let Some(n) = self.window_n {
            if n != w.n {
                return Err(Error::ConfigMismatch(format!(
                    "--window {n} but the model was trained with n = {}",
                    w.n
                )));
            }
        }
        if let Some(s) = self.stride {
            if s != w.stride {
                return Err(Error::ConfigMismatch(format!(
                    "--stride {s} but the model was trained with stride = {}",
                    w.stride
                )));
            }
        }
        Ok(())
    }
}

/// File-system-safe slug for a dataset name.
pub fn slugify(name: &str) -> String {
    let mut out: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect();
    while out.contains("__") {
        out = out.replace("__", "_");
    }
    out.trim_matches('_').to_string()
}

pub struct TrainOutcome {
    pub model_path: PathBuf,
    pub summary_path: PathBuf,
    pub n_representations: usize,
    pub n_train_windows: u64,
    pub validation_warnings: Vec<String>,
}

/// Train a model on the manifest's train split and write the model artifact
/// plus a training summary.
pub fn cmd_train(manifest_path: &Path, config: &RunConfig) -> Result<TrainOutcome> {
    let started = Instant::now();
    let manifest = DatasetManifest::from_path(manifest_path)?;
    let train = load_dataset(&manifest, Split::Train)?;
    let validation = validate_dataset(&train, &manifest);

    let mut model = Model::new(config.model_config()?, train.label_order.clone())?;
    for (i, r) in train.records.iter().enumerate() {
        train_sequence(&mut model, &r.sequence, &r.label)
            .map_err(|e| e.context(format!("dataset {} record {i}", manifest.name)))?;
    }

    std::fs::create_dir_all(&config.out_dir)?;
    let slug = slugify(&manifest.name);
    let model_path = config.out_dir.join(format!("{slug}.model"));
    model.save(&model_path)?;

    let summary = TrainSummary {
        dataset: &manifest.name,
        train_samples: train.len(),
        model: &model,
        model_file: &model_path.file_name().unwrap().to_string_lossy(),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    let summary_path = config.out_dir.join(format!("{slug}.train.txt"));
    std::fs::write(&summary_path, summary.render())?;

    Ok(TrainOutcome {
        model_path,
        summary_path,
        n_representations: model.n_nodes(),
        n_train_windows: model.trained_count(),
        validation_warnings: validation
            .warnings()
            .map(|c| format!("{}: declared {} observed {}", c.field, c.declared, c.observed))
            .collect(),
    })
}

pub struct EvalOutcome {
    pub report_path: PathBuf,
    pub auc: f64,
    pub per_class: Vec<(String, f64)>,
    pub distributions: Vec<VoteDistribution>,
}

/// Evaluate a saved model on the manifest's test split and write a report.
pub fn cmd_eval(model_path: &Path, manifest_path: &Path, config: &RunConfig) -> Result<EvalOutcome> {
    let model = Model::load(model_path)?;
    let manifest = DatasetManifest::from_path(manifest_path)?;
    evaluate_and_report(&model, &manifest, config, None)
}

/// Shared eval path for `eval` and `bench`. `tag` suffixes the report file
/// name for window sweeps.
fn evaluate_and_report(
    model: &Model,
    manifest: &DatasetManifest,
    config: &RunConfig,
    tag: Option<&str>,
) -> Result<EvalOutcome> {
    let started = Instant::now();
    config.check_against_model(model)?;
    let test = load_dataset(manifest, Split::Test)?;

    let (distributions, labels) = classify_set(model, &test)?;
    let probs: Vec<Vec<f64>> = distributions.iter().map(|d| d.probs.clone()).collect();
    let macro_auc = roc_auc_macro_ovr(&probs, &labels, model.labels().len())?;
    let per_class: Vec<(String, f64)> = macro_auc
        .per_class
        .iter()
        .map(|&(id, auc)| (model.label_name(id).to_string(), auc))
        .collect();

    let positive = config
        .positive_label
        .as_deref()
        .or(manifest.positive_label.as_deref());
    if let Some(p) = positive {
        if model.label_id(p).is_none() {
            return Err(Error::ConfigMismatch(format!(
                "positive label '{p}' not in the model's label table"
            )));
        }
    }

    let true_labels: Vec<String> = test.records.iter().map(|r| r.label.clone()).collect();
    let report = EvalReport {
        dataset: &manifest.name,
        model,
        samples: test.len(),
        auc: macro_auc.macro_auc,
        per_class: &per_class,
        positive_label: positive,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        verbose: config.verbose.then_some(EvalSamples {
            distributions: &distributions,
            true_labels: &true_labels,
        }),
    };
    std::fs::create_dir_all(&config.out_dir)?;
    let slug = slugify(&manifest.name);
    let file = match tag {
        Some(t) => format!("{slug}.{t}.eval.txt"),
        None => format!("{slug}.eval.txt"),
    };
    let report_path = config.out_dir.join(file);
    std::fs::write(&report_path, report.render())?;

    Ok(EvalOutcome {
        report_path,
        auc: macro_auc.macro_auc,
        per_class,
        distributions,
    })
}

/// Classify every test record (parallel across samples, order preserved) and
/// map true labels onto the model's label table.
fn classify_set(
    model: &Model,
    test: &LabeledSequenceSet,
) -> Result<(Vec<VoteDistribution>, Vec<usize>)> {
    let distributions: Vec<VoteDistribution> = test
        .records
        .par_iter()
        .map(|r| classify_sequence(model, &r.sequence))
        .collect::<Result<_>>()?;
    let labels: Vec<usize> = test
        .records
        .iter()
        .map(|r| {
            model.label_id(&r.label).ok_or_else(|| {
                Error::ConfigMismatch(format!(
                    "test label '{}' never seen during training",
                    r.label
                ))
            })
        })
        .collect::<Result<_>>()?;
    Ok((distributions, labels))
}

pub struct BenchTaskResult {
    pub task: String,
    pub auc: f64,
    pub published: Option<f64>,
    pub n_representations: usize,
    pub wall_clock_seconds: f64,
}

pub struct BenchOutcome {
    pub scores_path: PathBuf,
    pub rank_path: Option<PathBuf>,
    pub summary_path: Option<PathBuf>,
    pub comparison_path: Option<PathBuf>,
    pub results: Vec<BenchTaskResult>,
    /// (manifest path, error text) for datasets that failed; the run
    /// continues past individual failures.
    pub failures: Vec<(PathBuf, String)>,
}

/// Run the fixture-only analytics: rank and summary tables over the bundled
/// reference scores.
pub fn cmd_bench_fixtures_only(out_dir: &Path) -> Result<BenchOutcome> {
    let scores = bundled_benchmark_scores();
    std::fs::create_dir_all(out_dir)?;
    let scores_path = out_dir.join("bench_scores.csv");
    std::fs::write(&scores_path, scores.to_csv())?;
    let (rank_path, summary_path) = write_analytics(&scores, out_dir)?;
    Ok(BenchOutcome {
        scores_path,
        rank_path: Some(rank_path),
        summary_path: Some(summary_path),
        comparison_path: None,
        results: Vec::new(),
        failures: Vec::new(),
    })
}

fn write_analytics(scores: &ScoreMatrix, out_dir: &Path) -> Result<(PathBuf, PathBuf)> {
    let ranks = rank_table(scores)?;
    let summary = summary_stats(scores)?;
    let rank_path = out_dir.join("bench_rank.csv");
    let summary_path = out_dir.join("bench_summary.csv");
    std::fs::write(&rank_path, rank_csv(&ranks))?;
    std::fs::write(&summary_path, summary_csv(&summary))?;
    Ok((rank_path, summary_path))
}

/// Train + evaluate each manifest with a fresh model (optionally once per
/// sweep window size), apply task grouping, and emit score/rank/summary
/// tables. With `with_fixture`, published reference columns are merged in
/// for the comparative analytics.
pub fn cmd_bench(
    manifest_paths: &[PathBuf],
    config: &RunConfig,
    sweep: Option<&[usize]>,
    with_fixture: bool,
) -> Result<BenchOutcome> {
    let manifests: Vec<DatasetManifest> = manifest_paths
        .iter()
        .map(|p| DatasetManifest::from_path(p))
        .collect::<Result<_>>()?;

    let window_sizes: Vec<Option<usize>> = match sweep {
        Some(ns) if !ns.is_empty() => ns.iter().map(|&n| Some(n)).collect(),
        _ => vec![None],
    };
    let tagged = sweep.is_some();

    struct Job {
        manifest_idx: usize,
        window_n: Option<usize>,
        task: String,
        group: Option<String>,
    }
    let mut jobs = Vec::new();
    for (mi, manifest) in manifests.iter().enumerate() {
        for &wn in &window_sizes {
            let tag = wn.filter(|_| tagged).map(|n| format!("@n={n}"));
            let suffix = tag.as_deref().unwrap_or("");
            jobs.push(Job {
                manifest_idx: mi,
                window_n: wn,
                task: format!("{}{suffix}", manifest.name),
                group: manifest.task_group.as_ref().map(|g| format!("{g}{suffix}")),
            });
        }
    }

    // (auc, representation count, seconds) per job, or the error text.
    type JobResult = std::result::Result<(f64, usize, f64), String>;
    let runs: Vec<(usize, JobResult)> = jobs
        .par_iter()
        .enumerate()
        .map(|(ji, job)| {
            let manifest = &manifests[job.manifest_idx];
            let mut cfg = config.clone();
            if let Some(n) = job.window_n {
                cfg.window_n = Some(n);
            }
            let run = || -> Result<(f64, usize, f64)> {
                let started = Instant::now();
                let train = load_dataset(manifest, Split::Train)?;
                let mut model = Model::new(cfg.model_config()?, train.label_order.clone())?;
                for (i, r) in train.records.iter().enumerate() {
                    train_sequence(&mut model, &r.sequence, &r.label)
                        .map_err(|e| e.context(format!("dataset {} record {i}", manifest.name)))?;
                }
                let tag = job.window_n.filter(|_| tagged).map(|n| format!("n{n}"));
                let outcome = evaluate_and_report(&model, manifest, &cfg, tag.as_deref())?;
                Ok((outcome.auc, model.n_nodes(), started.elapsed().as_secs_f64()))
            };
            (ji, run().map_err(|e| e.to_string()))
        })
        .collect();

    let published = bundled_benchmark_scores();
    let mut results = Vec::new();
    let mut failures = Vec::new();
    let mut scored: Vec<(String, Option<String>, f64)> = Vec::new();
    for (ji, outcome) in runs {
        let job = &jobs[ji];
        match outcome {
            Ok((auc, n_nodes, secs)) => {
                scored.push((job.task.clone(), job.group.clone(), auc));
                results.push(BenchTaskResult {
                    task: job.task.clone(),
                    auc,
                    published: published
                        .get_by_name(&manifests[job.manifest_idx].name, OWN_MODEL_NAME),
                    n_representations: n_nodes,
                    wall_clock_seconds: secs,
                });
            }
            Err(e) => failures.push((manifest_paths[job.manifest_idx].clone(), e)),
        }
    }

    // Score matrix over the successful tasks, grouped where manifests say so.
    let tasks: Vec<String> = scored.iter().map(|(t, _, _)| t.clone()).collect();
    let mut matrix = ScoreMatrix::new(tasks, vec![OWN_MODEL_NAME.to_string()]);
    for (t, (_, _, auc)) in scored.iter().enumerate() {
        matrix.set(t, 0, auc.clamp(0.0, 1.0))?;
    }
    let groups = collect_groups(&scored);
    let grouped = group_average(&matrix, &groups)?;

    std::fs::create_dir_all(&config.out_dir)?;
    let scores_path = config.out_dir.join("bench_scores.csv");
    std::fs::write(&scores_path, grouped.to_csv())?;

    // Achieved vs published for any task the bundled table knows about.
    let comparison: Vec<(String, f64, f64)> = grouped
        .tasks()
        .iter()
        .enumerate()
        .filter_map(|(t, task)| {
            let base = task.split("@n=").next().unwrap_or(task);
            published
                .get_by_name(base, OWN_MODEL_NAME)
                .map(|p| (task.clone(), grouped.get(t, 0).unwrap(), p))
        })
        .collect();
    let comparison_path = if comparison.is_empty() {
        None
    } else {
        let p = config.out_dir.join("bench_vs_published.csv");
        std::fs::write(&p, comparison_csv(&comparison))?;
        Some(p)
    };

    let analytic = if with_fixture {
        let fixture = bundled_benchmark_scores();
        let renamed_models: Vec<String> = fixture
            .models()
            .iter()
            .map(|m| format!("{m} (published)"))
            .collect();
        let mut renamed = ScoreMatrix::new(fixture.tasks().to_vec(), renamed_models);
        for t in 0..fixture.tasks().len() {
            for m in 0..fixture.models().len() {
                if let Some(v) = fixture.get(t, m) {
                    renamed.set(t, m, v)?;
                }
            }
        }
        grouped.merge_columns(&renamed)
    } else {
        grouped.clone()
    };
    if with_fixture {
        let merged_path = config.out_dir.join("bench_scores_merged.csv");
        std::fs::write(&merged_path, analytic.to_csv())?;
    }
    let (rank_path, summary_path) = match write_analytics(&analytic, &config.out_dir) {
        Ok((r, s)) => (Some(r), Some(s)),
        // Merging against tasks the fixture does not know leaves holes; the
        // per-task outputs above are still valid, so don't fail the run.
        Err(Error::IncompleteMatrix { .. }) if with_fixture => (None, None),
        Err(e) => return Err(e),
    };

    Ok(BenchOutcome {
        scores_path,
        rank_path,
        summary_path,
        comparison_path,
        results,
        failures,
    })
}

fn collect_groups(scored: &[(String, Option<String>, f64)]) -> Vec<TaskGroup> {
    let mut groups: Vec<TaskGroup> = Vec::new();
    for (task, group, _) in scored {
        if let Some(g) = group {
            match groups.iter_mut().find(|tg| &tg.name == g) {
                Some(tg) => tg.members.push(task.clone()),
                None => groups.push(TaskGroup {
                    name: g.clone(),
                    members: vec![task.clone()],
                }),
            }
        }
    }
    groups
}

pub struct ReportOutcome {
    pub rank_path: PathBuf,
    pub summary_path: PathBuf,
    pub ranks: Vec<synthcog::metrics::ModelRankStats>,
    pub summary: Vec<(String, f64, f64)>,
}

/// Comparative analytics over a score matrix file (or the bundled reference
/// table with `fixtures_only`).
pub fn cmd_report(
    scores_path: Option<&Path>,
    fixtures_only: bool,
    out_dir: &Path,
) -> Result<ReportOutcome> {
    let matrix = if fixtures_only {
        bundled_benchmark_scores()
    } else {
        let path = scores_path.ok_or_else(|| {
            Error::InvalidConfig("report needs --scores <file> or --fixtures-only".into())
        })?;
        let text =
            std::fs::read_to_string(path).map_err(|_| Error::MissingFile(path.to_path_buf()))?;
        ScoreMatrix::from_csv(&text)?
    };
    let ranks = rank_table(&matrix)?;
    let summary = summary_stats(&matrix)?;
    std::fs::create_dir_all(out_dir)?;
    let rank_path = out_dir.join("report_rank.csv");
    let summary_path = out_dir.join("report_summary.csv");
    std::fs::write(&rank_path, rank_csv(&ranks))?;
    std::fs::write(&summary_path, summary_csv(&summary))?;
    Ok(ReportOutcome {
        rank_path,
        summary_path,
        ranks,
        summary,
    })
}

/// Process exit code for an error, per the documented contract:
/// 1 usage, 2 data, 3 capacity, 4 internal.
pub fn exit_code(err: &Error) -> i32 {
    match err.root() {
        Error::CapacityExceeded { .. } => 3,
        Error::Io(_) | Error::Internal(_) => 4,
        _ => 2,
    }
}

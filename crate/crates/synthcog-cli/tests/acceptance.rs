//! Acceptance suite: one test per shipping criterion, each printing a
//! PASS line (run with `--nocapture` to see them). Expected values come from
//! independent oracles implemented here or frozen from hand computation,
//! never from the code under test.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use synthcog::baselines::{kmer_centroid, majority_baseline};
use synthcog::datasets::{
    benchmark_standin, load_dataset, make_standin, make_synthetic, write_dataset_dir,
    DatasetManifest, Split, SyntheticSpec, SYNTH_POS,
};
use synthcog::encoder::{encode_window, windows, Codebook, WindowConfig};
use synthcog::episodic::train_sequence;
use synthcog::fixtures::{
    benchmark_task_groups, bundled_benchmark_scores, bundled_dataset_inventory,
};
use synthcog::metrics::{group_average, rank_table, roc_auc_binary, ScoreMatrix};
use synthcog::tree::{Model, ModelConfig};
use synthcog_cli::report::is_timing_line;
use synthcog_cli::{cmd_bench, cmd_eval, cmd_train, RunConfig};

/// Independent all-pairs AUC: wins count 1, ties 1/2.
fn auc_brute_force(scores: &[f64], is_positive: &[bool]) -> f64 {
    let mut wins = 0.0f64;
    let mut pairs = 0.0f64;
    for i in 0..scores.len() {
        if !is_positive[i] {
            continue;
        }
        for j in 0..scores.len() {
            if is_positive[j] {
                continue;
            }
            pairs += 1.0;
            if scores[i] > scores[j] {
                wins += 1.0;
            } else if scores[i] == scores[j] {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

fn planted_fixture(dir: &Path) -> PathBuf {
    let (train, test) = make_synthetic(&SyntheticSpec::default_planted()).unwrap();
    write_dataset_dir(dir, &train, &test, Some(SYNTH_POS), None).unwrap()
}

fn read_without_timing(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !is_timing_line(l))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn c01_window_count_formula() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10_000 {
        let n = rng.gen_range(1usize..=20);
        let len = rng.gen_range(n..=n + 400);
        let stride = rng.gen_range(1usize..=10);
        let cfg = WindowConfig::new(n, stride).unwrap();
        let seq = vec!['A'; len];
        let got = windows(&seq, &cfg, 'N').unwrap().len();
        assert_eq!(got, (len - n) / stride + 1, "L={len} n={n} stride={stride}");
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    println!("criterion 01 PASS: 10,000 random window counts match the formula in {elapsed:?}");
}

#[test]
fn c02_auc_matches_brute_force_oracle() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..1_000 {
        let len = rng.gen_range(2usize..=50);
        // Few distinct score levels: heavy ties on purpose.
        let levels = rng.gen_range(2u8..=5);
        let scores: Vec<f64> = (0..len)
            .map(|_| rng.gen_range(0..levels) as f64 / levels as f64)
            .collect();
        let mut flags: Vec<bool> = (0..len).map(|_| rng.gen_bool(0.5)).collect();
        flags[0] = true;
        flags[1] = false;
        let fast = roc_auc_binary(&scores, &flags).unwrap();
        let brute = auc_brute_force(&scores, &flags);
        assert!(
            (fast - brute).abs() < 1e-12,
            "fast {fast} vs brute {brute} on {scores:?} / {flags:?}"
        );
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    println!("criterion 02 PASS: 1,000 AUC instances match brute-force pairs in {elapsed:?}");
}

#[test]
fn c03_tree_composition_audit() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut model = Model::new(ModelConfig::default(), vec![]).unwrap();
    let cb = Codebook::dna_one_hot();
    let labels = ["alpha", "beta", "gamma"];
    let symbols = ['A', 'C', 'G', 'T', 'N'];
    for _ in 0..1_000 {
        let window: Vec<char> = (0..5).map(|_| symbols[rng.gen_range(0..5)]).collect();
        let x = encode_window(&cb, &window, 5).unwrap();
        model.train_one(&x, labels[rng.gen_range(0..3)]).unwrap();
    }
    assert_eq!(model.trained_count(), 1_000);

    // Independent audit over the public node view.
    let mut leaf_total = 0u64;
    for node in model.nodes() {
        if node.is_leaf() {
            leaf_total += node.counts.iter().sum::<u64>();
            continue;
        }
        let mut bits: BTreeSet<usize> = BTreeSet::new();
        let mut counts = vec![0u64; model.labels().len()];
        for &c in &node.children {
            let child = model.node(c);
            assert_eq!(child.parent, Some(node.id));
            bits.extend(child.sdr.active().iter().copied());
            for (i, &v) in child.counts.iter().enumerate() {
                counts[i] += v;
            }
        }
        let or: Vec<usize> = bits.into_iter().collect();
        assert_eq!(node.sdr.active(), &or[..], "interior {} is not the OR of its children", node.id);
        assert_eq!(node.counts, counts, "interior {} counts are not the children sum", node.id);
    }
    assert_eq!(leaf_total, model.trained_count());
    println!(
        "criterion 03 PASS: composition audit over {} nodes after 1,000 inserts",
        model.n_nodes()
    );
}

#[test]
fn c04_end_to_end_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = planted_fixture(&tmp.path().join("data"));

    let run = |out: &Path| -> (PathBuf, PathBuf, PathBuf) {
        let mut config = RunConfig::with_out_dir(out);
        config.verbose = true;
        let train = cmd_train(&manifest, &config).unwrap();
        let eval = cmd_eval(&train.model_path, &manifest, &config).unwrap();
        (train.model_path, train.summary_path, eval.report_path)
    };
    let (model1, summary1, report1) = run(&tmp.path().join("run1"));
    let (model2, summary2, report2) = run(&tmp.path().join("run2"));

    assert_eq!(
        std::fs::read(&model1).unwrap(),
        std::fs::read(&model2).unwrap(),
        "model files differ between identical runs"
    );
    assert_eq!(read_without_timing(&report1), read_without_timing(&report2));
    assert_eq!(read_without_timing(&summary1), read_without_timing(&summary2));
    println!("criterion 04 PASS: byte-identical model files and reports (timing excluded)");
}

#[test]
fn c05_synthetic_separability() {
    let started = Instant::now();
    let spec = SyntheticSpec::default_planted();
    let (train, test) = make_synthetic(&spec).unwrap();
    assert_eq!((train.len(), test.len()), (200, 200));

    let mut model = Model::new(ModelConfig::default(), train.label_order.clone()).unwrap();
    for r in &train.records {
        train_sequence(&mut model, &r.sequence, &r.label).unwrap();
    }
    let pos = model.label_id(SYNTH_POS).unwrap();
    let flags: Vec<bool> = test.records.iter().map(|r| r.label == SYNTH_POS).collect();
    let mut scores = Vec::with_capacity(test.len());
    for r in &test.records {
        let d = synthcog::episodic::classify_sequence(&model, &r.sequence).unwrap();
        scores.push(d.prob_of(pos));
    }
    let model_auc = roc_auc_binary(&scores, &flags).unwrap();
    assert!(model_auc >= 0.95, "main model AUC {model_auc} below 0.95");

    let kmer = kmer_centroid(&train, &test, 5).unwrap();
    let kmer_scores: Vec<f64> = kmer.iter().map(|d| d.prob_of(pos)).collect();
    let kmer_auc = roc_auc_binary(&kmer_scores, &flags).unwrap();
    assert!(kmer_auc >= 0.95, "k-mer baseline AUC {kmer_auc} below 0.95");

    let majority = majority_baseline(&train, &test).unwrap();
    let maj_scores: Vec<f64> = majority.iter().map(|d| d.prob_of(pos)).collect();
    let maj_auc = roc_auc_binary(&maj_scores, &flags).unwrap();
    assert_eq!(maj_auc, 0.5, "majority baseline AUC must be exactly 0.5");

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!(
        "criterion 05 PASS: model {model_auc:.4} / k-mer {kmer_auc:.4} >= 0.95, majority exactly 0.5, in {elapsed:?}"
    );
}

#[test]
fn c06_reference_table_analytics() {
    let started = Instant::now();
    let scores = bundled_benchmark_scores();
    let ranks = rank_table(&scores).unwrap();
    let by_name: std::collections::BTreeMap<&str, _> =
        ranks.iter().map(|s| (s.model.as_str(), s)).collect();

    // Win counts under the first-listed tie rule, and their percentages.
    for (model, wins) in [("DNABERT-2", 16), ("NT-v2", 10), ("HyenaDNA", 2), ("SynthCog", 16)] {
        let s = by_name[model];
        assert_eq!(s.wins, wins, "{model} wins");
        assert!(
            (s.win_fraction - wins as f64 / 44.0).abs() < 1e-12,
            "{model} win fraction"
        );
    }

    // Published average ranks reproduced within +/- 0.06 (the published
    // table used competition ranking for ties; this harness uses fractional
    // ranking, and the tolerance covers the difference).
    for (model, published) in [
        ("DNABERT-2", 1.977),
        ("NT-v2", 2.477),
        ("HyenaDNA", 3.159),
        ("SynthCog", 2.295),
    ] {
        let got = by_name[model].average_rank;
        assert!(
            (got - published).abs() <= 0.06,
            "{model}: fractional rank {got} vs published {published}"
        );
    }

    // Self-check against the exact fractional rank sums computed by hand:
    // 87.5, 110.5, 141.0, 101.0 over 44 tasks.
    for (model, sum) in [
        ("DNABERT-2", 87.5),
        ("NT-v2", 110.5),
        ("HyenaDNA", 141.0),
        ("SynthCog", 101.0),
    ] {
        assert!((by_name[model].average_rank - sum / 44.0).abs() < 1e-12);
    }

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!(
        "criterion 06 PASS: wins 16/10/2/16 (36.36%/22.73%/4.55%/36.36%), ranks within 0.06 of published, in {elapsed:?}"
    );
}

#[test]
fn c07_group_reduction_57_to_44() {
    let inventory = bundled_dataset_inventory();
    assert_eq!(inventory.len(), 57);
    let tasks: Vec<String> = inventory.iter().map(|r| r.dataset.clone()).collect();
    let models = vec!["m0".to_string(), "m1".to_string()];
    let mut sm = ScoreMatrix::new(tasks.clone(), models);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for t in 0..57 {
        for m in 0..2 {
            sm.set(t, m, rng.gen_range(0.0..=1.0)).unwrap();
        }
    }

    let groups = benchmark_task_groups();
    let grouped = group_average(&sm, &groups).unwrap();
    assert_eq!(grouped.n_tasks(), 44, "57 rows must reduce to 44");

    // Every grouped cell equals the member mean, recomputed independently.
    for g in &groups {
        let gt = grouped.tasks().iter().position(|t| t == &g.name).unwrap();
        for m in 0..2 {
            let mean: f64 = g
                .members
                .iter()
                .map(|member| {
                    let t = tasks.iter().position(|x| x == member).unwrap();
                    sm.get(t, m).unwrap()
                })
                .sum::<f64>()
                / g.members.len() as f64;
            let got = grouped.get(gt, m).unwrap();
            assert!((got - mean).abs() < 1e-12, "group {} model {m}", g.name);
        }
    }
    // Ungrouped rows pass through untouched.
    let donor_before = sm.get_by_name("Donor", "m0").unwrap();
    assert_eq!(grouped.get_by_name("Donor", "m0").unwrap(), donor_before);
    println!("criterion 07 PASS: 57-row matrix grouped to 44 rows, means exact to 1e-12");
}

/// Desk-scale datasets: real benchmark files when SYNTHCOG_BENCH_DATA points
/// at a directory of converted datasets, otherwise deterministic stand-ins
/// with the inventory-declared shapes.
fn desk_scale_manifests(tmp: &Path) -> Vec<PathBuf> {
    let names = ["Promoter B_amyloliquefaciens", "DNase_I Hypersensitive"];
    if let Ok(base) = std::env::var("SYNTHCOG_BENCH_DATA") {
        let base = Path::new(&base);
        let manifests: Vec<PathBuf> = names
            .iter()
            .map(|n| base.join(synthcog_cli::slugify(n)).join("manifest.toml"))
            .collect();
        if manifests.iter().all(|m| m.exists()) {
            return manifests;
        }
        eprintln!("SYNTHCOG_BENCH_DATA set but manifests missing; using stand-ins");
    }
    names
        .iter()
        .map(|name| {
            let spec = benchmark_standin(name).unwrap();
            let (train, test) = make_standin(&spec).unwrap();
            write_dataset_dir(
                &tmp.join(synthcog_cli::slugify(name)),
                &train,
                &test,
                Some(SYNTH_POS),
                None,
            )
            .unwrap()
        })
        .collect()
}

#[test]
fn c08_desk_scale_benchmark_smoke() {
    let started = Instant::now();
    let tmp = tempfile::tempdir().unwrap();
    let manifests = desk_scale_manifests(tmp.path());

    // Shape check against the bundled inventory before running.
    for (manifest_path, declared) in manifests.iter().zip([(1483usize, 636usize), (711, 306)]) {
        let manifest = DatasetManifest::from_path(manifest_path).unwrap();
        let train = load_dataset(&manifest, Split::Train).unwrap();
        let test = load_dataset(&manifest, Split::Test).unwrap();
        assert_eq!((train.len(), test.len()), declared, "{}", manifest.name);
    }

    let config = RunConfig::with_out_dir(tmp.path().join("out"));
    let outcome = cmd_bench(&manifests, &config, None, false).unwrap();
    assert!(outcome.failures.is_empty(), "bench failures: {:?}", outcome.failures);

    let floors = [
        ("Promoter B_amyloliquefaciens", 0.70, 0.882),
        ("DNase_I Hypersensitive", 0.65, 0.835),
    ];
    for (task, floor, published) in floors {
        let r = outcome
            .results
            .iter()
            .find(|r| r.task == task)
            .unwrap_or_else(|| panic!("no bench result for {task}"));
        assert!(r.auc >= floor, "{task}: AUC {} below floor {floor}", r.auc);
        assert_eq!(r.published, Some(published), "{task}: published score lookup");
        println!("  {task}: achieved {:.4} (floor {floor}, published {published})", r.auc);
    }

    // The achieved-vs-published table must be part of the bench output.
    let comparison_path = outcome.comparison_path.expect("bench_vs_published.csv missing");
    let comparison = std::fs::read_to_string(comparison_path).unwrap();
    assert!(comparison.contains("Promoter B_amyloliquefaciens") && comparison.contains("0.882"));
    assert!(comparison.contains("DNase_I Hypersensitive") && comparison.contains("0.835"));

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(600), "took {elapsed:?}");
    println!("criterion 08 PASS: desk-scale bench cleared both floors in {elapsed:?}");
}

#[test]
fn c09_window_sweep_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = planted_fixture(&tmp.path().join("data"));
    let config = RunConfig::with_out_dir(tmp.path().join("out"));
    let outcome = cmd_bench(&[manifest], &config, Some(&[5, 10]), false).unwrap();
    assert!(outcome.failures.is_empty(), "{:?}", outcome.failures);

    let scores = ScoreMatrix::from_csv(&std::fs::read_to_string(&outcome.scores_path).unwrap()).unwrap();
    assert_eq!(scores.n_tasks(), 2, "sweep over two window sizes must emit two rows");
    assert_eq!(
        scores.tasks(),
        &["planted_motif@n=5", "planted_motif@n=10"],
        "sweep rows must be tagged by window size"
    );
    for t in 0..2 {
        let v = scores.get(t, 0).unwrap();
        assert!((0.0..=1.0).contains(&v));
    }
    println!("criterion 09 PASS: sweep n in {{5, 10}} produced two tagged score rows");
}

#[test]
fn c10_vote_distribution_normalization() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest_path = planted_fixture(&tmp.path().join("data"));
    let manifest = DatasetManifest::from_path(&manifest_path).unwrap();
    let test = load_dataset(&manifest, Split::Test).unwrap();

    let mut config = RunConfig::with_out_dir(tmp.path().join("out"));
    config.verbose = true;
    let train = cmd_train(&manifest_path, &config).unwrap();
    let eval = cmd_eval(&train.model_path, &manifest_path, &config).unwrap();

    let window = WindowConfig::default();
    assert_eq!(eval.distributions.len(), test.len());
    for (d, r) in eval.distributions.iter().zip(&test.records) {
        let total: f64 = d.probs.iter().sum();
        assert!((total - 1.0).abs() < 1e-12, "probs sum {total}");
        assert_eq!(
            d.total_votes(),
            window.window_count(r.sequence.len()) as u64,
            "vote count must match the window-count formula"
        );
    }
    println!(
        "criterion 10 PASS: {} samples, probs sum to 1 within 1e-12 and votes match the formula",
        eval.distributions.len()
    );
}

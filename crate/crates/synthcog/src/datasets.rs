//! Dataset ingestion, validation, and synthetic fixtures.
//!
//! The canonical record format is two-column delimiter-separated text with a
//! `sequence,label` header, one record per line, no quoting and no embedded
//! delimiters. A dataset is described by a TOML manifest naming the train and
//! test files (relative to the manifest), the alphabet, optional declared
//! stats for validation, and an optional task group for grouped averaging.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::error::{Error, Result};

pub const DEFAULT_ALPHABET: &str = "ACGTN";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Test,
}

impl std::fmt::Display for Split {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Split::Train => write!(f, "train"),
            Split::Test => write!(f, "test"),
        }
    }
}

/// Declared reference stats for validation (warnings only).
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
pub struct DeclaredStats {
    pub train_samples: Option<usize>,
    pub test_samples: Option<usize>,
    pub max_len: Option<usize>,
    pub avg_len: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct ManifestFile {
    name: String,
    train: String,
    test: String,
    alphabet: Option<String>,
    labels: Option<Vec<String>>,
    positive_label: Option<String>,
    task_group: Option<String>,
    declared: Option<DeclaredStats>,
}

/// A parsed dataset manifest with resolved paths.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub name: String,
    pub train_path: PathBuf,
    pub test_path: PathBuf,
    pub alphabet: String,
    pub labels: Option<Vec<String>>,
    pub positive_label: Option<String>,
    pub task_group: Option<String>,
    pub declared: DeclaredStats,
}

impl DatasetManifest {
    /// Parse a manifest file; `train`/`test` entries resolve relative to the
    /// manifest's directory and must exist.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|_| Error::MissingFile(path.to_path_buf()))?;
        let raw: ManifestFile = toml::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("manifest {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let manifest = DatasetManifest {
            name: raw.name,
            train_path: base.join(&raw.train),
            test_path: base.join(&raw.test),
            alphabet: raw
                .alphabet
                .unwrap_or_else(|| DEFAULT_ALPHABET.to_string())
                .to_uppercase(),
            labels: raw.labels,
            positive_label: raw.positive_label,
            task_group: raw.task_group,
            declared: raw.declared.unwrap_or_default(),
        };
        for p in [&manifest.train_path, &manifest.test_path] {
            if !p.exists() {
                return Err(Error::MissingFile(p.clone()));
            }
        }
        Ok(manifest)
    }

    pub fn path_for(&self, split: Split) -> &Path {
        match split {
            Split::Train => &self.train_path,
            Split::Test => &self.test_path,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub sequence: Vec<char>,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LengthStats {
    pub min: usize,
    pub max: usize,
    pub mean: f64,
}

/// One loaded dataset split, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSequenceSet {
    pub name: String,
    pub split: Split,
    pub records: Vec<Record>,
    /// Distinct labels: manifest-declared order, or first appearance.
    pub label_order: Vec<String>,
    pub stats: LengthStats,
}

impl LabeledSequenceSet {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn label_id(&self, label: &str) -> Option<usize> {
        self.label_order.iter().position(|l| l == label)
    }

    fn from_records(
        name: &str,
        split: Split,
        records: Vec<Record>,
        declared_order: Option<&[String]>,
    ) -> Result<Self> {
        let mut label_order: Vec<String> = declared_order.map(<[String]>::to_vec).unwrap_or_default();
        for (i, r) in records.iter().enumerate() {
            if !label_order.iter().any(|l| l == &r.label) {
                if declared_order.is_some() {
                    return Err(Error::InvalidInput(format!(
                        "record {i}: label '{}' not in declared label set",
                        r.label
                    )));
                }
                label_order.push(r.label.clone());
            }
        }
        let min = records.iter().map(|r| r.sequence.len()).min().unwrap_or(0);
        let max = records.iter().map(|r| r.sequence.len()).max().unwrap_or(0);
        let total: usize = records.iter().map(|r| r.sequence.len()).sum();
        let mean = if records.is_empty() {
            0.0
        } else {
            total as f64 / records.len() as f64
        };
        Ok(LabeledSequenceSet {
            name: name.to_string(),
            split,
            records,
            label_order,
            stats: LengthStats { min, max, mean },
        })
    }
}

/// Load one split of the manifest's dataset. Records keep file order;
/// sequences are upper-cased and validated against the manifest alphabet.
pub fn load_dataset(manifest: &DatasetManifest, split: Split) -> Result<LabeledSequenceSet> {
    let path = manifest.path_for(split);
    let text = std::fs::read_to_string(path).map_err(|_| Error::MissingFile(path.to_path_buf()))?;
    let alphabet: BTreeSet<char> = manifest.alphabet.chars().collect();

    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end_matches('\r') == "sequence,label" => {}
        Some((_, header)) => {
            return Err(Error::MalformedRow {
                path: path.to_path_buf(),
                line: 1,
                msg: format!("expected header 'sequence,label', got '{header}'"),
            })
        }
        None => return Err(Error::EmptyDataset(path.to_path_buf())),
    }

    let mut records = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let row = raw.trim_end_matches('\r');
        if row.is_empty() {
            continue;
        }
        let mut fields = row.split(',');
        let (seq, label) = match (fields.next(), fields.next(), fields.next()) {
            (Some(s), Some(l), None) => (s, l),
            _ => {
                return Err(Error::MalformedRow {
                    path: path.to_path_buf(),
                    line: line_no,
                    msg: "expected exactly two comma-separated fields".into(),
                })
            }
        };
        if seq.is_empty() {
            return Err(Error::MalformedRow {
                path: path.to_path_buf(),
                line: line_no,
                msg: "empty sequence".into(),
            });
        }
        if label.is_empty() {
            return Err(Error::MalformedRow {
                path: path.to_path_buf(),
                line: line_no,
                msg: "empty label".into(),
            });
        }
        let sequence: Vec<char> = seq.chars().map(|c| c.to_ascii_uppercase()).collect();
        for (col, &c) in sequence.iter().enumerate() {
            if !alphabet.contains(&c) {
                return Err(Error::UnknownDatasetSymbol {
                    path: path.to_path_buf(),
                    line: line_no,
                    column: col + 1,
                    symbol: c,
                });
            }
        }
        records.push(Record {
            sequence,
            label: label.to_string(),
        });
    }
    if records.is_empty() {
        return Err(Error::EmptyDataset(path.to_path_buf()));
    }
    LabeledSequenceSet::from_records(&manifest.name, split, records, manifest.labels.as_deref())
}

/// Write a set back to the canonical record format.
pub fn save_csv(set: &LabeledSequenceSet, path: &Path) -> Result<()> {
    let mut out = String::from("sequence,label\n");
    for r in &set.records {
        out.extend(r.sequence.iter());
        out.push(',');
        out.push_str(&r.label);
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Warn,
}

#[derive(Debug, Clone)]
pub struct ValidationCheck {
    pub field: String,
    pub declared: String,
    pub observed: String,
    pub status: CheckStatus,
}

/// Report from comparing a loaded split against manifest declarations.
/// Mismatches are warnings, never errors.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == CheckStatus::Pass)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &ValidationCheck> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Warn)
    }

    fn push(&mut self, field: &str, declared: String, observed: String, ok: bool) {
        self.checks.push(ValidationCheck {
            field: field.to_string(),
            declared,
            observed,
            status: if ok { CheckStatus::Pass } else { CheckStatus::Warn },
        });
    }
}

/// Compare observed counts and lengths against the manifest's declared stats.
pub fn validate_dataset(set: &LabeledSequenceSet, manifest: &DatasetManifest) -> ValidationReport {
    let mut report = ValidationReport::default();
    let declared = &manifest.declared;
    let declared_count = match set.split {
        Split::Train => declared.train_samples,
        Split::Test => declared.test_samples,
    };
    if let Some(n) = declared_count {
        report.push(
            &format!("{}_samples", set.split),
            n.to_string(),
            set.len().to_string(),
            set.len() == n,
        );
    }
    if let Some(m) = declared.max_len {
        report.push(
            "max_len",
            m.to_string(),
            set.stats.max.to_string(),
            set.stats.max == m,
        );
    }
    if let Some(a) = declared.avg_len {
        // Declared averages are printed rounded; accept anything that rounds
        // to the declared value.
        report.push(
            "avg_len",
            a.to_string(),
            format!("{:.2}", set.stats.mean),
            (set.stats.mean - a).abs() <= 0.5,
        );
    }
    report
}

/// Parameters for the planted-motif oracle dataset: every positive sequence
/// contains at least one positive motif and no negative motif, and vice
/// versa. Labels are `pos`/`neg` with label order `[neg, pos]`.
#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub name: String,
    pub positive_motifs: Vec<String>,
    pub negative_motifs: Vec<String>,
    pub train_per_class: usize,
    pub test_per_class: usize,
    pub length: usize,
    /// Motif instances planted per sequence (>= 1); more plants mean a
    /// stronger per-sequence signal.
    pub plants_per_sequence: usize,
    pub seed: u64,
}

pub const SYNTH_NEG: &str = "neg";
pub const SYNTH_POS: &str = "pos";

impl SyntheticSpec {
    /// The canonical planted-motif oracle: disjoint homopolymer 5-mers,
    /// 200 train / 200 test sequences of length 40, two plants each, seed 7.
    pub fn default_planted() -> Self {
        SyntheticSpec {
            name: "planted_motif".into(),
            positive_motifs: vec!["AAAAA".into()],
            negative_motifs: vec!["TTTTT".into()],
            train_per_class: 100,
            test_per_class: 100,
            length: 40,
            plants_per_sequence: 2,
            seed: 7,
        }
    }
}

const BASES: [char; 4] = ['A', 'C', 'G', 'T'];

fn contains_motif(seq: &[char], motifs: &[Vec<char>]) -> bool {
    motifs.iter().any(|m| seq.windows(m.len()).any(|w| w == m.as_slice()))
}

type MotifSet = Vec<Vec<char>>;

fn check_motifs(spec: &SyntheticSpec) -> Result<(MotifSet, MotifSet)> {
    let to_chars = |ms: &[String]| -> Result<MotifSet> {
        ms.iter()
            .map(|m| {
                if m.is_empty() {
                    return Err(Error::InvalidSyntheticSpec("empty motif".into()));
                }
                let cs: Vec<char> = m.chars().collect();
                if cs.iter().any(|c| !BASES.contains(c)) {
                    return Err(Error::InvalidSyntheticSpec(format!(
                        "motif '{m}' contains non-ACGT symbols"
                    )));
                }
                Ok(cs)
            })
            .collect()
    };
    let pos = to_chars(&spec.positive_motifs)?;
    let neg = to_chars(&spec.negative_motifs)?;
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::InvalidSyntheticSpec(
            "both motif sets must be non-empty".into(),
        ));
    }
    // Substring overlap in either direction makes the planted contract
    // unsatisfiable (inserting one class's motif would embed the other's).
    for p in &pos {
        for n in &neg {
            let p_str: String = p.iter().collect();
            let n_str: String = n.iter().collect();
            if p_str.contains(&n_str) || n_str.contains(&p_str) {
                return Err(Error::InvalidSyntheticSpec(format!(
                    "motif sets overlap: '{p_str}' vs '{n_str}'"
                )));
            }
        }
    }
    let max_len = pos.iter().chain(neg.iter()).map(Vec::len).max().unwrap();
    if spec.length < max_len {
        return Err(Error::InvalidSyntheticSpec(format!(
            "sequence length {} shorter than longest motif ({max_len})",
            spec.length
        )));
    }
    Ok((pos, neg))
}

fn plant_one(
    rng: &mut ChaCha8Rng,
    length: usize,
    plants: usize,
    own: &[Vec<char>],
    other: &[Vec<char>],
) -> Result<Vec<char>> {
    // Rejection-sample until the sequence is free of the other class's motifs.
    for _ in 0..10_000 {
        let mut seq: Vec<char> = (0..length).map(|_| BASES[rng.gen_range(0..4)]).collect();
        let mut spans: Vec<(usize, usize)> = Vec::with_capacity(plants);
        for _ in 0..plants {
            let motif = &own[rng.gen_range(0..own.len())];
            // Prefer non-overlapping plant sites; fall back to overlap (the
            // last write stays intact, so the contract still holds).
            let mut at = rng.gen_range(0..=length - motif.len());
            for _ in 0..100 {
                let end = at + motif.len();
                if spans.iter().all(|&(s, e)| end <= s || at >= e) {
                    break;
                }
                at = rng.gen_range(0..=length - motif.len());
            }
            seq[at..at + motif.len()].copy_from_slice(motif);
            spans.push((at, at + motif.len()));
        }
        if contains_motif(&seq, own) && !contains_motif(&seq, other) {
            return Ok(seq);
        }
    }
    Err(Error::InvalidSyntheticSpec(
        "could not satisfy the planted-motif contract; motif sets too dense".into(),
    ))
}

/// Generate the seed-deterministic planted-motif train/test pair.
pub fn make_synthetic(spec: &SyntheticSpec) -> Result<(LabeledSequenceSet, LabeledSequenceSet)> {
    let (pos, neg) = check_motifs(spec)?;
    if spec.plants_per_sequence == 0 {
        return Err(Error::InvalidSyntheticSpec(
            "plants_per_sequence must be >= 1".into(),
        ));
    }
    let plants = spec.plants_per_sequence;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut make_split = |per_class: usize, split: Split| -> Result<LabeledSequenceSet> {
        let mut records = Vec::with_capacity(per_class * 2);
        for _ in 0..per_class {
            records.push(Record {
                sequence: plant_one(&mut rng, spec.length, plants, &neg, &pos)?,
                label: SYNTH_NEG.to_string(),
            });
            records.push(Record {
                sequence: plant_one(&mut rng, spec.length, plants, &pos, &neg)?,
                label: SYNTH_POS.to_string(),
            });
        }
        LabeledSequenceSet::from_records(
            &spec.name,
            split,
            records,
            Some(&[SYNTH_NEG.to_string(), SYNTH_POS.to_string()]),
        )
    };
    let train = make_split(spec.train_per_class, Split::Train)?;
    let test = make_split(spec.test_per_class, Split::Test)?;
    Ok((train, test))
}

/// Parameters for benchmark-shaped stand-in datasets: declared sample counts
/// and length range, with a partial planted signal (positives carry a motif
/// with probability `motif_prob`; negatives are pure background, which may
/// contain motifs by chance). Used where the real benchmark files are not
/// locally available.
#[derive(Debug, Clone)]
pub struct StandinSpec {
    pub name: String,
    pub train_samples: usize,
    pub test_samples: usize,
    pub min_len: usize,
    pub max_len: usize,
    pub motifs: Vec<String>,
    pub motif_prob: f64,
    /// Motif instances planted when a positive sequence carries the signal.
    pub plants_per_positive: usize,
    pub seed: u64,
}

/// Generate a benchmark-shaped stand-in. Class balance is as even as the
/// declared totals allow; label order is `[neg, pos]`.
pub fn make_standin(spec: &StandinSpec) -> Result<(LabeledSequenceSet, LabeledSequenceSet)> {
    if spec.motifs.is_empty() {
        return Err(Error::InvalidSyntheticSpec("need at least one motif".into()));
    }
    if spec.min_len == 0 || spec.min_len > spec.max_len {
        return Err(Error::InvalidSyntheticSpec(format!(
            "bad length range {}..{}",
            spec.min_len, spec.max_len
        )));
    }
    if spec.plants_per_positive == 0 {
        return Err(Error::InvalidSyntheticSpec(
            "plants_per_positive must be >= 1".into(),
        ));
    }
    let motifs: Vec<Vec<char>> = spec.motifs.iter().map(|m| m.chars().collect()).collect();
    let longest = motifs.iter().map(Vec::len).max().unwrap();
    if longest > spec.min_len {
        return Err(Error::InvalidSyntheticSpec(
            "motif longer than minimum sequence length".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut make_split = |total: usize, split: Split| -> Result<LabeledSequenceSet> {
        let mut records = Vec::with_capacity(total);
        for i in 0..total {
            let length = rng.gen_range(spec.min_len..=spec.max_len);
            let mut seq: Vec<char> = (0..length).map(|_| BASES[rng.gen_range(0..4)]).collect();
            let positive = i % 2 == 1;
            if positive && rng.gen_bool(spec.motif_prob) {
                for _ in 0..spec.plants_per_positive {
                    let motif = &motifs[rng.gen_range(0..motifs.len())];
                    let at = rng.gen_range(0..=length - motif.len());
                    seq[at..at + motif.len()].copy_from_slice(motif);
                }
            }
            records.push(Record {
                sequence: seq,
                label: if positive { SYNTH_POS } else { SYNTH_NEG }.to_string(),
            });
        }
        LabeledSequenceSet::from_records(
            &spec.name,
            split,
            records,
            Some(&[SYNTH_NEG.to_string(), SYNTH_POS.to_string()]),
        )
    };
    let train = make_split(spec.train_samples, Split::Train)?;
    let test = make_split(spec.test_samples, Split::Test)?;
    Ok((train, test))
}

/// Shape-exact stand-in specs for benchmark datasets, keyed by the inventory
/// name. Sample counts and length ranges come from the bundled inventory;
/// the planted signal is synthetic. Intended for harness smoke runs when the
/// real benchmark files are not locally available.
pub fn benchmark_standin(name: &str) -> Result<StandinSpec> {
    let row = crate::fixtures::inventory_row(name).ok_or_else(|| {
        Error::InvalidSyntheticSpec(format!("'{name}' is not in the bundled inventory"))
    })?;
    // Length range chosen so the midpoint matches the declared average.
    let (min_len, max_len) = if row.avg_len == row.max_len {
        (row.max_len, row.max_len)
    } else {
        (2 * row.avg_len - row.max_len, row.max_len)
    };
    let (motifs, motif_prob, plants): (Vec<String>, f64, usize) = match name {
        // Canonical bacterial promoter hexamers, loosely planted.
        "Promoter B_amyloliquefaciens" => (
            vec!["TATAAT".into(), "TTGACA".into()],
            0.9,
            2,
        ),
        // No single accessibility motif exists; several weak marks scale the
        // signal with the longer sequences.
        "DNase_I Hypersensitive" => (
            vec!["GGGCGG".into(), "CCAAT".into(), "GATAAG".into()],
            0.9,
            3,
        ),
        _ => (vec!["TATAAT".into()], 0.9, 1),
    };
    Ok(StandinSpec {
        name: name.to_string(),
        train_samples: row.train_samples,
        test_samples: row.test_samples,
        min_len,
        max_len,
        motifs,
        motif_prob,
        plants_per_positive: plants,
        seed: 0x5eed ^ name.len() as u64,
    })
}

/// Write a train/test pair plus a manifest into `dir`, returning the
/// manifest path. Declared stats are filled from the generated data.
pub fn write_dataset_dir(
    dir: &Path,
    train: &LabeledSequenceSet,
    test: &LabeledSequenceSet,
    positive_label: Option<&str>,
    task_group: Option<&str>,
) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let train_file = dir.join("train.csv");
    let test_file = dir.join("test.csv");
    save_csv(train, &train_file)?;
    save_csv(test, &test_file)?;
    let mut manifest = String::new();
    manifest.push_str(&format!("name = {:?}\n", train.name));
    manifest.push_str("train = \"train.csv\"\n");
    manifest.push_str("test = \"test.csv\"\n");
    manifest.push_str(&format!("alphabet = {DEFAULT_ALPHABET:?}\n"));
    let labels: Vec<String> = train.label_order.iter().map(|l| format!("{l:?}")).collect();
    manifest.push_str(&format!("labels = [{}]\n", labels.join(", ")));
    if let Some(p) = positive_label {
        manifest.push_str(&format!("positive_label = {p:?}\n"));
    }
    if let Some(g) = task_group {
        manifest.push_str(&format!("task_group = {g:?}\n"));
    }
    manifest.push_str("\n[declared]\n");
    manifest.push_str(&format!("train_samples = {}\n", train.len()));
    manifest.push_str(&format!("test_samples = {}\n", test.len()));
    manifest.push_str(&format!("max_len = {}\n", train.stats.max.max(test.stats.max)));
    let manifest_path = dir.join("manifest.toml");
    std::fs::write(&manifest_path, manifest)?;
    Ok(manifest_path)
}

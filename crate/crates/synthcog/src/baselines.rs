//! Reference classifiers for sanity-checking the harness.
//!
//! These are deliberately cheap: the majority baseline scores every test
//! sample with the training label distribution (binary AUC exactly 0.5 by
//! construction), and the k-mer centroid classifier scores by cosine
//! similarity to per-class mean k-mer frequency vectors. Neither is a
//! benchmark comparator; they exist to pin the floor and ceiling of the
//! evaluation pipeline.

use std::collections::BTreeMap;

use crate::datasets::LabeledSequenceSet;
use crate::episodic::VoteDistribution;
use crate::error::{Error, Result};

/// Every test sample receives the training label distribution.
pub fn majority_baseline(
    train: &LabeledSequenceSet,
    test: &LabeledSequenceSet,
) -> Result<Vec<VoteDistribution>> {
    if train.is_empty() {
        return Err(Error::InvalidInput("empty training set".into()));
    }
    let n_labels = train.label_order.len();
    let mut counts = vec![0u64; n_labels];
    for r in &train.records {
        let id = train
            .label_id(&r.label)
            .ok_or_else(|| Error::InvalidInput(format!("label '{}' missing from order", r.label)))?;
        counts[id] += 1;
    }
    let total = train.len() as f64;
    let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / total).collect();
    let predicted = probs
        .iter()
        .enumerate()
        .fold(0usize, |best, (i, &p)| if p > probs[best] { i } else { best });
    let dist = VoteDistribution {
        counts,
        probs,
        predicted,
    };
    Ok(vec![dist; test.len()])
}

/// Sparse k-mer frequency vector over the ACGT alphabet; k-mers containing
/// any other symbol are skipped.
fn kmer_freqs(sequence: &[char], k: usize) -> BTreeMap<u64, f64> {
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    let mut total = 0u64;
    'outer: for w in sequence.windows(k) {
        let mut key = 0u64;
        for &c in w {
            let code = match c {
                'A' => 0,
                'C' => 1,
                'G' => 2,
                'T' => 3,
                _ => continue 'outer,
            };
            key = key * 4 + code;
        }
        *counts.entry(key).or_insert(0) += 1;
        total += 1;
    }
    if total == 0 {
        return BTreeMap::new();
    }
    counts
        .into_iter()
        .map(|(k, c)| (k, c as f64 / total as f64))
        .collect()
}

fn cosine(a: &BTreeMap<u64, f64>, b: &BTreeMap<u64, f64>) -> f64 {
    let norm = |m: &BTreeMap<u64, f64>| m.values().map(|v| v * v).sum::<f64>().sqrt();
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let dot: f64 = small
        .iter()
        .filter_map(|(k, va)| large.get(k).map(|vb| va * vb))
        .sum();
    dot / (na * nb)
}

/// Nearest-centroid over per-class mean k-mer frequency vectors; per-sample
/// class scores are cosine similarities normalized to a distribution.
pub fn kmer_centroid(
    train: &LabeledSequenceSet,
    test: &LabeledSequenceSet,
    k: usize,
) -> Result<Vec<VoteDistribution>> {
    if train.is_empty() {
        return Err(Error::InvalidInput("empty training set".into()));
    }
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    let min_len = train
        .records
        .iter()
        .chain(test.records.iter())
        .map(|r| r.sequence.len())
        .min()
        .unwrap_or(0);
    if k > min_len {
        return Err(Error::InvalidInput(format!(
            "k = {k} exceeds minimum sequence length {min_len}"
        )));
    }

    let n_labels = train.label_order.len();
    let mut sums: Vec<BTreeMap<u64, f64>> = vec![BTreeMap::new(); n_labels];
    let mut members = vec![0usize; n_labels];
    for r in &train.records {
        let id = train
            .label_id(&r.label)
            .ok_or_else(|| Error::InvalidInput(format!("label '{}' missing from order", r.label)))?;
        let freqs = kmer_freqs(&r.sequence, k);
        if freqs.is_empty() {
            continue; // no usable k-mers (all ambiguous)
        }
        for (key, v) in freqs {
            *sums[id].entry(key).or_insert(0.0) += v;
        }
        members[id] += 1;
    }
    let mut centroids = Vec::with_capacity(n_labels);
    for (id, sum) in sums.into_iter().enumerate() {
        if members[id] == 0 {
            return Err(Error::InvalidInput(format!(
                "class '{}' has no sequences with usable k-mers",
                train.label_order[id]
            )));
        }
        let n = members[id] as f64;
        centroids.push(
            sum.into_iter()
                .map(|(key, v)| (key, v / n))
                .collect::<BTreeMap<u64, f64>>(),
        );
    }

    test.records
        .iter()
        .map(|r| {
            let freqs = kmer_freqs(&r.sequence, k);
            let scores: Vec<f64> = centroids.iter().map(|c| cosine(&freqs, c)).collect();
            VoteDistribution::from_probs(scores)
        })
        .collect()
}

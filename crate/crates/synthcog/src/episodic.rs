//! Sequence-level training and classification.
//!
//! A sequence is never shown to the tree whole: it is cut into windows, each
//! window is encoded and handled independently, and at classification time
//! the per-window predicted labels are harmonized into a single class
//! distribution by frequency. The most repeated class is the answer; its
//! per-class frequencies double as the probability vector that downstream
//! AUC scoring consumes.

use crate::encoder::{encode_window, windows};
use crate::error::{Error, Result};
use crate::tree::Model;

/// How per-window votes collapse into one answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HarmonizeMode {
    /// Most repeated class wins; ties break toward the earliest label.
    #[default]
    Frequency,
    /// One designated class fires as soon as any window votes for it;
    /// otherwise fall back to frequency.
    AnyTrigger { trigger: usize },
}

/// How much each window vote weighs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VoteWeighting {
    /// Every window counts 1 (the default procedure).
    #[default]
    Uniform,
    /// Windows weigh in with their identification similarity.
    Similarity,
}

/// Optional deviations from the default per-window voting procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EpisodicConfig {
    pub harmonize: HarmonizeMode,
    pub weighting: VoteWeighting,
}

/// Per-class vote tallies for one classified sequence.
///
/// `counts` are raw window votes. With uniform weighting `probs[c] =
/// counts[c] / total`; with similarity weighting `probs` renormalizes the
/// accumulated weights instead, while `counts` still records the raw votes.
#[derive(Debug, Clone, PartialEq)]
pub struct VoteDistribution {
    pub counts: Vec<u64>,
    pub probs: Vec<f64>,
    pub predicted: usize,
}

impl VoteDistribution {
    /// Build directly from a probability vector (score-based classifiers
    /// that never cast discrete votes). Counts are left zero.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidInput("empty probability vector".into()));
        }
        let total: f64 = probs.iter().sum();
        if !(total.is_finite()) || probs.iter().any(|&p| p < 0.0) {
            return Err(Error::InvalidInput(
                "probabilities must be finite and non-negative".into(),
            ));
        }
        let probs: Vec<f64> = if total == 0.0 {
            let u = 1.0 / probs.len() as f64;
            vec![u; probs.len()]
        } else {
            probs.iter().map(|p| p / total).collect()
        };
        let predicted = argmax(&probs);
        Ok(VoteDistribution {
            counts: vec![0; probs.len()],
            probs,
            predicted,
        })
    }

    pub fn total_votes(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn prob_of(&self, label_id: usize) -> f64 {
        self.probs.get(label_id).copied().unwrap_or(0.0)
    }
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0usize;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Collapse a list of label-id votes into a frequency distribution.
/// `n_labels` fixes the distribution length and the tie-break order.
pub fn harmonize(votes: &[usize], n_labels: usize) -> Result<VoteDistribution> {
    harmonize_with(votes, n_labels, HarmonizeMode::Frequency)
}

pub fn harmonize_with(
    votes: &[usize],
    n_labels: usize,
    mode: HarmonizeMode,
) -> Result<VoteDistribution> {
    if votes.is_empty() {
        return Err(Error::EmptyVotes);
    }
    let mut counts = vec![0u64; n_labels];
    for &v in votes {
        if v >= n_labels {
            return Err(Error::InvalidInput(format!(
                "vote {v} outside label table of size {n_labels}"
            )));
        }
        counts[v] += 1;
    }
    let total = votes.len() as f64;
    let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / total).collect();
    let predicted = match mode {
        HarmonizeMode::Frequency => argmax(&probs),
        HarmonizeMode::AnyTrigger { trigger } => {
            if trigger >= n_labels {
                return Err(Error::InvalidConfig(format!(
                    "trigger label {trigger} outside label table of size {n_labels}"
                )));
            }
            if counts[trigger] > 0 {
                trigger
            } else {
                argmax(&probs)
            }
        }
    };
    Ok(VoteDistribution {
        counts,
        probs,
        predicted,
    })
}

/// Rebase a window-local unknown-symbol position onto the whole sequence.
fn rebase(err: Error, window_start: usize) -> Error {
    match err {
        Error::UnknownSymbol { symbol, position } => Error::UnknownSymbol {
            symbol,
            position: window_start + position,
        },
        other => other,
    }
}

/// Train the model on every window of one labeled sequence, in order.
pub fn train_sequence(model: &mut Model, sequence: &[char], label: &str) -> Result<()> {
    let cfg = model.config().window;
    let pad = model.config().codebook.pad_symbol();
    let wins = windows(sequence, &cfg, pad)?;
    for (k, w) in wins.iter().enumerate() {
        let sdr = encode_window(&model.config().codebook, w, cfg.n)
            .map_err(|e| rebase(e, k * cfg.stride))?;
        model
            .train_one(&sdr, label)
            .map_err(|e| e.context(format!("window {k}")))?;
    }
    Ok(())
}

/// Classify one sequence: one vote per window, harmonized by frequency.
pub fn classify_sequence(model: &Model, sequence: &[char]) -> Result<VoteDistribution> {
    classify_sequence_with(model, sequence, &EpisodicConfig::default())
}

pub fn classify_sequence_with(
    model: &Model,
    sequence: &[char],
    config: &EpisodicConfig,
) -> Result<VoteDistribution> {
    let cfg = model.config().window;
    let pad = model.config().codebook.pad_symbol();
    let wins = windows(sequence, &cfg, pad)?;
    let n_labels = model.labels().len();
    let mut votes = Vec::with_capacity(wins.len());
    let mut weights = vec![0.0f64; n_labels];
    for (k, w) in wins.iter().enumerate() {
        let sdr = encode_window(&model.config().codebook, w, cfg.n)
            .map_err(|e| rebase(e, k * cfg.stride))?;
        match config.weighting {
            VoteWeighting::Uniform => votes.push(model.predict_window_label(&sdr)?),
            VoteWeighting::Similarity => {
                let (leaf, score) = model.identify(&sdr)?;
                let node = model.node(leaf);
                let mut best = 0usize;
                let mut best_count = 0u64;
                for i in 0..n_labels {
                    let c = node.count_of(i);
                    if c > best_count {
                        best = i;
                        best_count = c;
                    }
                }
                votes.push(best);
                weights[best] += score;
            }
        }
    }
    let mut dist = harmonize_with(&votes, n_labels, config.harmonize)?;
    if config.weighting == VoteWeighting::Similarity {
        let total: f64 = weights.iter().sum();
        if total > 0.0 {
            dist.probs = weights.iter().map(|w| w / total).collect();
            dist.predicted = match config.harmonize {
                HarmonizeMode::AnyTrigger { trigger } if dist.counts[trigger] > 0 => trigger,
                _ => argmax(&dist.probs),
            };
        }
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::{Codebook, WindowConfig};
    use crate::tree::{CoreConfig, ModelConfig};

    fn chars(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    fn dna_model(n: usize) -> Model {
        let config = ModelConfig {
            core: CoreConfig::default(),
            window: WindowConfig::new(n, 1).unwrap(),
            codebook: Codebook::dna_one_hot(),
        };
        Model::new(config, vec![]).unwrap()
    }

    #[test]
    fn training_counts_windows() {
        let mut m = dna_model(5);
        let seq: Vec<char> = "ACGT".chars().cycle().take(40).collect();
        train_sequence(&mut m, &seq, "pos").unwrap();
        assert_eq!(m.trained_count(), 36);

        let mut m = dna_model(5);
        train_sequence(&mut m, &chars("ACGTA"), "pos").unwrap();
        assert_eq!(m.trained_count(), 1);

        // Shorter than the window: one padded window.
        let mut m = dna_model(5);
        train_sequence(&mut m, &chars("ACG"), "pos").unwrap();
        assert_eq!(m.trained_count(), 1);
    }

    #[test]
    fn classify_is_pure_and_unanimous_when_trained_on_one_class() {
        let mut m = dna_model(5);
        let seq: Vec<char> = "ACGTACGTACGT".chars().collect();
        train_sequence(&mut m, &seq, "a").unwrap();
        let d1 = classify_sequence(&m, &seq).unwrap();
        let d2 = classify_sequence(&m, &seq).unwrap();
        assert_eq!(d1, d2);
        assert_eq!(m.label_name(d1.predicted), "a");
        assert_eq!(d1.probs, vec![1.0]);
    }

    #[test]
    fn harmonize_frequency_and_ties() {
        // [X] -> X with probability 1.
        let d = harmonize(&[0], 1).unwrap();
        assert_eq!((d.predicted, d.probs[0]), (0, 1.0));

        // [X,Y,Y,Z] -> Y at 0.5.
        let d = harmonize(&[0, 1, 1, 2], 3).unwrap();
        assert_eq!(d.predicted, 1);
        assert_eq!(d.probs, vec![0.25, 0.5, 0.25]);

        // Votes [A,B,A,A] -> A at 0.75.
        let d = harmonize(&[0, 1, 0, 0], 2).unwrap();
        assert_eq!(d.predicted, 0);
        assert_eq!(d.probs, vec![0.75, 0.25]);

        // Three-way tie goes to the earliest label in table order.
        let d = harmonize(&[2, 0, 1], 3).unwrap();
        assert_eq!(d.predicted, 0);

        // Binary 1:1 tie -> label 0.
        let d = harmonize(&[0, 1], 2).unwrap();
        assert_eq!(d.predicted, 0);
        assert_eq!(d.probs, vec![0.5, 0.5]);
    }

    #[test]
    fn harmonize_rejects_empty_and_out_of_range() {
        assert!(matches!(harmonize(&[], 2), Err(Error::EmptyVotes)));
        assert!(harmonize(&[5], 2).is_err());
    }

    #[test]
    fn any_trigger_fires_on_a_single_vote() {
        let d = harmonize_with(&[0, 0, 0, 1], 2, HarmonizeMode::AnyTrigger { trigger: 1 }).unwrap();
        assert_eq!(d.predicted, 1);
        assert_eq!(d.probs, vec![0.75, 0.25]);
        // No trigger vote: frequency fallback.
        let d = harmonize_with(&[0, 0, 0], 2, HarmonizeMode::AnyTrigger { trigger: 1 }).unwrap();
        assert_eq!(d.predicted, 0);
    }

    #[test]
    fn probs_sum_to_one() {
        let d = harmonize(&[0, 1, 1, 2, 2, 2, 0], 4).unwrap();
        let total: f64 = d.probs.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn from_probs_normalizes_and_handles_zero_mass() {
        let d = VoteDistribution::from_probs(vec![2.0, 2.0]).unwrap();
        assert_eq!(d.probs, vec![0.5, 0.5]);
        let d = VoteDistribution::from_probs(vec![0.0, 0.0]).unwrap();
        assert_eq!(d.probs, vec![0.5, 0.5]);
        assert!(VoteDistribution::from_probs(vec![]).is_err());
        assert!(VoteDistribution::from_probs(vec![-0.5, 1.5]).is_err());
    }

    #[test]
    fn similarity_weighting_reshapes_probs_but_not_counts() {
        let mut m = dna_model(5);
        train_sequence(&mut m, &chars("AAAAACCCCC"), "a").unwrap();
        train_sequence(&mut m, &chars("GGGGGTTTTT"), "b").unwrap();
        let cfg = EpisodicConfig {
            weighting: VoteWeighting::Similarity,
            ..Default::default()
        };
        let seq = chars("AAAAAGGGGG");
        let plain = classify_sequence(&m, &seq).unwrap();
        let weighted = classify_sequence_with(&m, &seq, &cfg).unwrap();
        // Raw votes are identical; only the probability mass moves.
        assert_eq!(plain.counts, weighted.counts);
        let total: f64 = weighted.probs.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(weighted.probs.len(), 2);
    }

    #[test]
    fn unknown_symbol_positions_are_sequence_absolute() {
        let mut m = dna_model(3);
        let seq = chars("ACGTQGT");
        let err = train_sequence(&mut m, &seq, "x").unwrap_err();
        match err.root() {
            Error::UnknownSymbol {
                symbol: 'Q',
                position: 4,
            } => {}
            other => panic!("expected UnknownSymbol at 4, got {other:?}"),
        }
    }
}

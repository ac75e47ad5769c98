//! Scoring and comparative analytics.
//!
//! AUC is computed as the tie-aware pair statistic (Mann-Whitney form):
//! correctly ordered positive/negative pairs count 1, ties count 1/2,
//! normalized by `n_pos * n_neg`. Vote-frequency scores are heavily tied at
//! small window counts, so the pair form is used rather than trapezoidal
//! integration. Multiclass AUC is the unweighted (macro) mean of one-vs-rest
//! binary AUCs over the classes present.
//!
//! Comparative analytics over a task x model score matrix: win counts (the
//! first-listed model takes a shared maximum), fractional average ranks, and
//! per-model mean / population standard deviation summaries.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Tie-aware binary ROC AUC from sample scores and positive flags.
pub fn roc_auc_binary(scores: &[f64], is_positive: &[bool]) -> Result<f64> {
    if scores.len() != is_positive.len() {
        return Err(Error::InvalidInput(format!(
            "{} scores vs {} labels",
            scores.len(),
            is_positive.len()
        )));
    }
    let n_pos = is_positive.iter().filter(|&&p| p).count();
    let n_neg = is_positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::UndefinedAuc(format!(
            "need both classes, got {n_pos} positive / {n_neg} negative"
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidInput("NaN score".into()));
    }

    // Fractional ranks over ascending scores; AUC = (R_pos - n_pos(n_pos+1)/2)
    // / (n_pos * n_neg). Rank sums are multiples of 1/2, so this matches the
    // all-pairs enumeration exactly in f64.
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());
    let mut rank_sum_pos = 0.0f64;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let rank = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            if is_positive[idx] {
                rank_sum_pos += rank;
            }
        }
        i = j;
    }
    let n_pos = n_pos as f64;
    let n_neg = n_neg as f64;
    Ok((rank_sum_pos - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg))
}

/// Per-class and macro one-vs-rest AUC for multiclass tasks.
#[derive(Debug, Clone, PartialEq)]
pub struct MacroAuc {
    /// Unweighted mean over the classes present in the labels.
    pub macro_auc: f64,
    /// (label id, one-vs-rest AUC) for each class present.
    pub per_class: Vec<(usize, f64)>,
}

/// Macro one-vs-rest AUC. `probs[i][c]` is sample i's probability of class c;
/// `labels[i]` is its true label id. Classes absent from the labels are
/// skipped; fewer than two present classes is undefined.
pub fn roc_auc_macro_ovr(probs: &[Vec<f64>], labels: &[usize], n_labels: usize) -> Result<MacroAuc> {
    if probs.len() != labels.len() {
        return Err(Error::InvalidInput(format!(
            "{} probability vectors vs {} labels",
            probs.len(),
            labels.len()
        )));
    }
    let mut present = vec![false; n_labels];
    for &l in labels {
        if l >= n_labels {
            return Err(Error::InvalidInput(format!(
                "label id {l} outside table of size {n_labels}"
            )));
        }
        present[l] = true;
    }
    if present.iter().filter(|&&p| p).count() < 2 {
        return Err(Error::UndefinedAuc("all samples share one class".into()));
    }
    let mut per_class = Vec::new();
    let mut total = 0.0;
    for (c, _) in present.iter().enumerate().filter(|(_, &p)| p) {
        let class_scores: Vec<f64> = probs
            .iter()
            .map(|p| p.get(c).copied().unwrap_or(0.0))
            .collect();
        let flags: Vec<bool> = labels.iter().map(|&l| l == c).collect();
        let auc = roc_auc_binary(&class_scores, &flags)?;
        per_class.push((c, auc));
        total += auc;
    }
    Ok(MacroAuc {
        macro_auc: total / per_class.len() as f64,
        per_class,
    })
}

/// Task x model grid of scores in [0, 1]; cells may be missing.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    tasks: Vec<String>,
    models: Vec<String>,
    scores: Vec<Vec<Option<f64>>>,
}

impl ScoreMatrix {
    pub fn new(tasks: Vec<String>, models: Vec<String>) -> Self {
        let scores = vec![vec![None; models.len()]; tasks.len()];
        ScoreMatrix {
            tasks,
            models,
            scores,
        }
    }

    pub fn tasks(&self) -> &[String] {
        &self.tasks
    }

    pub fn models(&self) -> &[String] {
        &self.models
    }

    pub fn n_tasks(&self) -> usize {
        self.tasks.len()
    }

    pub fn get(&self, task: usize, model: usize) -> Option<f64> {
        self.scores[task][model]
    }

    pub fn get_by_name(&self, task: &str, model: &str) -> Option<f64> {
        let t = self.tasks.iter().position(|x| x == task)?;
        let m = self.models.iter().position(|x| x == model)?;
        self.scores[t][m]
    }

    pub fn set(&mut self, task: usize, model: usize, score: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&score) {
            return Err(Error::InvalidInput(format!(
                "score {score} outside [0, 1]"
            )));
        }
        self.scores[task][model] = Some(score);
        Ok(())
    }

    pub fn task_index(&self, task: &str) -> Option<usize> {
        self.tasks.iter().position(|t| t == task)
    }

    fn require_complete(&self) -> Result<()> {
        for (t, row) in self.scores.iter().enumerate() {
            for (m, cell) in row.iter().enumerate() {
                if cell.is_none() {
                    return Err(Error::IncompleteMatrix {
                        task: self.tasks[t].clone(),
                        model: self.models[m].clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Append the columns of `other` for the tasks of `self`, in `other`'s
    /// model order. Tasks missing from `other` keep empty cells.
    pub fn merge_columns(&self, other: &ScoreMatrix) -> ScoreMatrix {
        let mut models = self.models.clone();
        models.extend(other.models.iter().cloned());
        let mut out = ScoreMatrix::new(self.tasks.clone(), models);
        for (t, task) in self.tasks.iter().enumerate() {
            for m in 0..self.models.len() {
                out.scores[t][m] = self.scores[t][m];
            }
            if let Some(ot) = other.task_index(task) {
                for m in 0..other.models.len() {
                    out.scores[t][self.models.len() + m] = other.scores[ot][m];
                }
            }
        }
        out
    }

    /// Serialize as delimiter-separated text: header `task,<models...>`,
    /// one row per task, missing cells empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("task");
        for m in &self.models {
            out.push(',');
            out.push_str(m);
        }
        out.push('\n');
        for (t, task) in self.tasks.iter().enumerate() {
            out.push_str(task);
            for cell in &self.scores[t] {
                out.push(',');
                if let Some(v) = cell {
                    let _ = write!(out, "{v}");
                }
            }
            out.push('\n');
        }
        out
    }

    /// Parse the `to_csv` format. Lines starting with `#` are comments.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows = text
            .lines()
            .map(str::trim_end)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = rows
            .next()
            .ok_or_else(|| Error::InvalidInput("empty score matrix file".into()))?;
        let mut cols = header.split(',');
        if cols.next() != Some("task") {
            return Err(Error::InvalidInput(
                "score matrix header must start with 'task'".into(),
            ));
        }
        let models: Vec<String> = cols.map(str::to_string).collect();
        if models.is_empty() {
            return Err(Error::InvalidInput("score matrix has no model columns".into()));
        }
        let mut tasks = Vec::new();
        let mut scores = Vec::new();
        for line in rows {
            let mut fields = line.split(',');
            let task = fields.next().unwrap_or_default();
            if task.is_empty() {
                return Err(Error::InvalidInput(format!("row without task name: '{line}'")));
            }
            let cells: Vec<&str> = fields.collect();
            if cells.len() != models.len() {
                return Err(Error::InvalidInput(format!(
                    "task '{task}': {} cells for {} models",
                    cells.len(),
                    models.len()
                )));
            }
            let mut row = Vec::with_capacity(models.len());
            for cell in cells {
                if cell.is_empty() {
                    row.push(None);
                } else {
                    let v: f64 = cell.parse().map_err(|_| {
                        Error::InvalidInput(format!("task '{task}': bad score '{cell}'"))
                    })?;
                    if !(0.0..=1.0).contains(&v) {
                        return Err(Error::InvalidInput(format!(
                            "task '{task}': score {v} outside [0, 1]"
                        )));
                    }
                    row.push(Some(v));
                }
            }
            tasks.push(task.to_string());
            scores.push(row);
        }
        Ok(ScoreMatrix {
            tasks,
            models,
            scores,
        })
    }
}

/// Per-model comparative statistics over a complete score matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelRankStats {
    pub model: String,
    pub wins: usize,
    pub win_fraction: f64,
    pub average_rank: f64,
}

/// Win counts (first-listed model takes a shared maximum) and fractional
/// average ranks per model.
pub fn rank_table(sm: &ScoreMatrix) -> Result<Vec<ModelRankStats>> {
    sm.require_complete()?;
    if sm.tasks.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    let k = sm.models.len();
    let mut wins = vec![0usize; k];
    let mut rank_sums = vec![0.0f64; k];
    for row in &sm.scores {
        let vals: Vec<f64> = row.iter().map(|c| c.unwrap()).collect();
        let best = vals
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let winner = vals.iter().position(|&v| v == best).unwrap();
        wins[winner] += 1;

        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap());
        let mut i = 0;
        while i < k {
            let mut j = i;
            while j < k && vals[order[j]] == vals[order[i]] {
                j += 1;
            }
            let rank = (i + 1 + j) as f64 / 2.0;
            for &m in &order[i..j] {
                rank_sums[m] += rank;
            }
            i = j;
        }
    }
    let n = sm.tasks.len() as f64;
    Ok(sm
        .models
        .iter()
        .enumerate()
        .map(|(m, name)| ModelRankStats {
            model: name.clone(),
            wins: wins[m],
            win_fraction: wins[m] as f64 / n,
            average_rank: rank_sums[m] / n,
        })
        .collect())
}

/// A named group of tasks to be replaced by their unweighted mean row.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskGroup {
    pub name: String,
    pub members: Vec<String>,
}

/// Replace each group's member rows with a single mean row at the position
/// of the group's first member; ungrouped rows pass through unchanged.
pub fn group_average(sm: &ScoreMatrix, groups: &[TaskGroup]) -> Result<ScoreMatrix> {
    for g in groups {
        for member in &g.members {
            let t = sm.task_index(member).ok_or_else(|| Error::IncompleteGroup {
                group: g.name.clone(),
                missing: member.clone(),
            })?;
            for (m, cell) in sm.scores[t].iter().enumerate() {
                if cell.is_none() {
                    return Err(Error::IncompleteGroup {
                        group: g.name.clone(),
                        missing: format!("{member} (model {})", sm.models[m]),
                    });
                }
            }
        }
    }

    let group_of = |task: &str| -> Option<usize> {
        groups
            .iter()
            .position(|g| g.members.iter().any(|m| m == task))
    };

    let mut tasks = Vec::new();
    let mut scores: Vec<Vec<Option<f64>>> = Vec::new();
    let mut emitted = vec![false; groups.len()];
    for (t, task) in sm.tasks.iter().enumerate() {
        match group_of(task) {
            None => {
                tasks.push(task.clone());
                scores.push(sm.scores[t].clone());
            }
            Some(gi) if !emitted[gi] => {
                emitted[gi] = true;
                let g = &groups[gi];
                let mut row = Vec::with_capacity(sm.models.len());
                for m in 0..sm.models.len() {
                    let sum: f64 = g
                        .members
                        .iter()
                        .map(|member| sm.scores[sm.task_index(member).unwrap()][m].unwrap())
                        .sum();
                    row.push(Some(sum / g.members.len() as f64));
                }
                tasks.push(g.name.clone());
                scores.push(row);
            }
            Some(_) => {} // later member of an already-emitted group
        }
    }
    Ok(ScoreMatrix {
        tasks,
        models: sm.models.clone(),
        scores,
    })
}

/// Per-model (mean, population standard deviation) over a complete matrix,
/// in model order. Plot-ready.
pub fn summary_stats(sm: &ScoreMatrix) -> Result<Vec<(String, f64, f64)>> {
    sm.require_complete()?;
    if sm.tasks.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    let n = sm.tasks.len() as f64;
    Ok(sm
        .models
        .iter()
        .enumerate()
        .map(|(m, name)| {
            let col: Vec<f64> = sm.scores.iter().map(|row| row[m].unwrap()).collect();
            let mean = col.iter().sum::<f64>() / n;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            (name.clone(), mean, var.sqrt())
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auc_perfect_separation() {
        let auc = roc_auc_binary(&[0.9, 0.8, 0.3, 0.1], &[true, true, false, false]).unwrap();
        assert_eq!(auc, 1.0);
    }

    #[test]
    fn auc_all_tied_is_half() {
        let auc = roc_auc_binary(&[0.5; 6], &[true, false, true, false, true, false]).unwrap();
        assert_eq!(auc, 0.5);
    }

    #[test]
    fn auc_with_one_tied_pair() {
        // Pairs: (0.9 vs 0.7) win, (0.9 vs 0.2) win, (0.7 vs 0.7) tie,
        // (0.7 vs 0.2) win => (3 + 0.5) / 4.
        let auc = roc_auc_binary(&[0.9, 0.7, 0.7, 0.2], &[true, false, true, false]).unwrap();
        assert!((auc - 0.875).abs() < 1e-15);
    }

    #[test]
    fn auc_single_class_undefined() {
        assert!(matches!(
            roc_auc_binary(&[0.5, 0.6], &[true, true]),
            Err(Error::UndefinedAuc(_))
        ));
    }

    #[test]
    fn macro_ovr_reduces_to_binary() {
        let probs = vec![
            vec![0.2, 0.8],
            vec![0.6, 0.4],
            vec![0.3, 0.7],
            vec![0.9, 0.1],
        ];
        let labels = vec![1, 0, 1, 0];
        let macro_auc = roc_auc_macro_ovr(&probs, &labels, 2).unwrap();
        let pos_scores: Vec<f64> = probs.iter().map(|p| p[1]).collect();
        let flags: Vec<bool> = labels.iter().map(|&l| l == 1).collect();
        let binary = roc_auc_binary(&pos_scores, &flags).unwrap();
        assert!((macro_auc.macro_auc - binary).abs() < 1e-15);
    }

    #[test]
    fn macro_ovr_three_classes() {
        // Perfectly predicted three-class set.
        let probs = vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![0.9, 0.1, 0.0],
        ];
        let labels = vec![0, 1, 2, 0];
        let m = roc_auc_macro_ovr(&probs, &labels, 3).unwrap();
        assert_eq!(m.macro_auc, 1.0);

        // Uniform vectors: every pair tied.
        let probs = vec![vec![1.0 / 3.0; 3]; 6];
        let labels = vec![0, 1, 2, 0, 1, 2];
        let m = roc_auc_macro_ovr(&probs, &labels, 3).unwrap();
        assert_eq!(m.macro_auc, 0.5);

        // One class only: undefined.
        let probs = vec![vec![0.5, 0.5]; 3];
        assert!(matches!(
            roc_auc_macro_ovr(&probs, &[0, 0, 0], 2),
            Err(Error::UndefinedAuc(_))
        ));
    }

    fn matrix(tasks: &[&str], models: &[&str], rows: &[&[f64]]) -> ScoreMatrix {
        let mut sm = ScoreMatrix::new(
            tasks.iter().map(|s| s.to_string()).collect(),
            models.iter().map(|s| s.to_string()).collect(),
        );
        for (t, row) in rows.iter().enumerate() {
            for (m, &v) in row.iter().enumerate() {
                sm.set(t, m, v).unwrap();
            }
        }
        sm
    }

    #[test]
    fn rank_table_symmetry_case() {
        let sm = matrix(
            &["t1", "t2"],
            &["a", "b"],
            &[&[0.9, 0.8], &[0.7, 0.9]],
        );
        let stats = rank_table(&sm).unwrap();
        assert_eq!(stats[0].wins, 1);
        assert_eq!(stats[1].wins, 1);
        assert_eq!(stats[0].average_rank, 1.5);
        assert_eq!(stats[1].average_rank, 1.5);
    }

    #[test]
    fn rank_table_tie_goes_to_first_listed() {
        let sm = matrix(&["t"], &["a", "b", "c"], &[&[0.5, 0.7, 0.7]]);
        let stats = rank_table(&sm).unwrap();
        assert_eq!(stats[1].wins, 1);
        assert_eq!(stats[2].wins, 0);
        // Fractional ranks: b and c share (1+2)/2, a gets 3.
        assert_eq!(stats[1].average_rank, 1.5);
        assert_eq!(stats[2].average_rank, 1.5);
        assert_eq!(stats[0].average_rank, 3.0);
    }

    #[test]
    fn rank_table_requires_complete_matrix() {
        let sm = ScoreMatrix::new(vec!["t".into()], vec!["a".into()]);
        assert!(matches!(
            rank_table(&sm),
            Err(Error::IncompleteMatrix { .. })
        ));
    }

    #[test]
    fn ranks_sum_to_triangle_number() {
        let sm = matrix(
            &["t1", "t2", "t3"],
            &["a", "b", "c", "d"],
            &[
                &[0.1, 0.2, 0.3, 0.4],
                &[0.5, 0.5, 0.5, 0.5],
                &[0.9, 0.1, 0.9, 0.2],
            ],
        );
        let stats = rank_table(&sm).unwrap();
        let total: f64 = stats.iter().map(|s| s.average_rank).sum::<f64>() * 3.0;
        assert!((total - 3.0 * 10.0).abs() < 1e-12);
    }

    #[test]
    fn group_average_means_and_identity() {
        let sm = matrix(
            &["a", "g1", "b", "g2"],
            &["m"],
            &[&[0.5], &[0.6], &[0.9], &[0.8]],
        );
        let groups = [TaskGroup {
            name: "g (all)".into(),
            members: vec!["g1".into(), "g2".into()],
        }];
        let out = group_average(&sm, &groups).unwrap();
        assert_eq!(out.tasks(), &["a", "g (all)", "b"]);
        assert!((out.get(1, 0).unwrap() - 0.7).abs() < 1e-15);

        // Group of one is the identity.
        let groups1 = [TaskGroup {
            name: "solo".into(),
            members: vec!["a".into()],
        }];
        let out1 = group_average(&sm, &groups1).unwrap();
        assert_eq!(out1.get(0, 0), Some(0.5));
        assert_eq!(out1.tasks()[0], "solo");
        assert_eq!(out1.n_tasks(), 4);
    }

    #[test]
    fn group_average_missing_member_fails() {
        let sm = matrix(&["a"], &["m"], &[&[0.5]]);
        let groups = [TaskGroup {
            name: "g".into(),
            members: vec!["a".into(), "nope".into()],
        }];
        assert!(matches!(
            group_average(&sm, &groups),
            Err(Error::IncompleteGroup { .. })
        ));
    }

    #[test]
    fn summary_stats_mean_and_population_std() {
        let sm = matrix(&["t1", "t2"], &["m"], &[&[0.5], &[0.7]]);
        let stats = summary_stats(&sm).unwrap();
        assert!((stats[0].1 - 0.6).abs() < 1e-15);
        assert!((stats[0].2 - 0.1).abs() < 1e-15);

        let single = matrix(&["t"], &["m"], &[&[0.4]]);
        let stats = summary_stats(&single).unwrap();
        assert_eq!(stats[0].2, 0.0);
    }

    #[test]
    fn csv_round_trip_with_missing_cells() {
        let mut sm = ScoreMatrix::new(
            vec!["t1".into(), "t2".into()],
            vec!["a".into(), "b".into()],
        );
        sm.set(0, 0, 0.5).unwrap();
        sm.set(1, 1, 0.25).unwrap();
        let text = sm.to_csv();
        let back = ScoreMatrix::from_csv(&text).unwrap();
        assert_eq!(sm, back);
    }

    #[test]
    fn csv_rejects_bad_scores() {
        assert!(ScoreMatrix::from_csv("task,m\nt,1.5\n").is_err());
        assert!(ScoreMatrix::from_csv("task,m\nt,abc\n").is_err());
        assert!(ScoreMatrix::from_csv("notask,m\nt,0.5\n").is_err());
    }
}

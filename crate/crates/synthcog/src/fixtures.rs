//! Bundled reference data: published benchmark scores and the dataset
//! inventory they were computed on, compiled into the binary so analytics
//! run without any external files.

use crate::error::{Error, Result};
use crate::metrics::{ScoreMatrix, TaskGroup};

const SCORES_CSV: &str = include_str!("../data/benchmark_scores.csv");
const DATASETS_CSV: &str = include_str!("../data/benchmark_datasets.csv");

/// Model column name under which this repository's classifier appears in the
/// bundled score table.
pub const OWN_MODEL_NAME: &str = "SynthCog";

/// The 44-task x 4-model reference score matrix.
pub fn bundled_benchmark_scores() -> ScoreMatrix {
    ScoreMatrix::from_csv(SCORES_CSV).expect("bundled benchmark scores must parse")
}

/// One row of the dataset inventory.
#[derive(Debug, Clone, PartialEq)]
pub struct InventoryRow {
    pub dataset: String,
    pub train_samples: usize,
    pub test_samples: usize,
    pub max_len: usize,
    pub avg_len: usize,
    pub total_train_size: u64,
}

/// The 57-row dataset inventory, in total-train-size order.
pub fn bundled_dataset_inventory() -> Vec<InventoryRow> {
    parse_inventory(DATASETS_CSV).expect("bundled dataset inventory must parse")
}

/// Look up one inventory row by dataset name.
pub fn inventory_row(name: &str) -> Option<InventoryRow> {
    bundled_dataset_inventory()
        .into_iter()
        .find(|r| r.dataset == name)
}

fn parse_inventory(text: &str) -> Result<Vec<InventoryRow>> {
    let mut lines = text
        .lines()
        .map(str::trim_end)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidInput("empty inventory".into()))?;
    if header != "dataset,train_samples,test_samples,max_len,avg_len,total_train_size" {
        return Err(Error::InvalidInput(format!("bad inventory header '{header}'")));
    }
    let mut rows = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::InvalidInput(format!("bad inventory row '{line}'")));
        }
        let parse_usize = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::InvalidInput(format!("bad number '{s}' in '{line}'")))
        };
        rows.push(InventoryRow {
            dataset: fields[0].to_string(),
            train_samples: parse_usize(fields[1])?,
            test_samples: parse_usize(fields[2])?,
            max_len: parse_usize(fields[3])?,
            avg_len: parse_usize(fields[4])?,
            total_train_size: parse_usize(fields[5])? as u64,
        });
    }
    Ok(rows)
}

/// The canonical grouping that folds the 57 inventory datasets into the 44
/// scored tasks: five mouse functional-motif datasets and ten yeast
/// epigenetic-mark datasets each collapse to one averaged row.
pub fn benchmark_task_groups() -> Vec<TaskGroup> {
    vec![
        TaskGroup {
            name: "Mouse TFBS (all)".into(),
            members: (1..=5).map(|i| format!("Mouse TFBS {i}")).collect(),
        },
        TaskGroup {
            name: "Yeast Epigenetic Marks (all)".into(),
            members: (1..=10)
                .map(|i| format!("Yeast Epigenetic Marks {i}"))
                .collect(),
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scores_fixture_shape() {
        let sm = bundled_benchmark_scores();
        assert_eq!(sm.n_tasks(), 44);
        assert_eq!(sm.models(), &["DNABERT-2", "NT-v2", "HyenaDNA", OWN_MODEL_NAME]);
        assert_eq!(
            sm.get_by_name("Promoter B_amyloliquefaciens", OWN_MODEL_NAME),
            Some(0.882)
        );
        assert_eq!(sm.get_by_name("DNase_I Hypersensitive", OWN_MODEL_NAME), Some(0.835));
        assert_eq!(sm.get_by_name("E.Coli 4mC", "NT-v2"), Some(0.579));
    }

    #[test]
    fn inventory_shape_and_known_rows() {
        let inv = bundled_dataset_inventory();
        assert_eq!(inv.len(), 57);
        let promoter = inventory_row("Promoter B_amyloliquefaciens").unwrap();
        assert_eq!(
            (promoter.train_samples, promoter.test_samples, promoter.max_len),
            (1483, 636, 40)
        );
        let mc5 = inventory_row("5-methylcytosin(5mC)").unwrap();
        assert_eq!((mc5.train_samples, mc5.test_samples, mc5.max_len), (2344, 2344, 41));
        let dnase = inventory_row("DNase_I Hypersensitive").unwrap();
        assert_eq!(
            (dnase.train_samples, dnase.test_samples, dnase.max_len, dnase.avg_len),
            (711, 306, 275, 243)
        );
    }

    #[test]
    fn summary_stats_match_independent_recomputation() {
        // Frozen from a spreadsheet-style recomputation of the bundled table
        // (arithmetic mean, population standard deviation per column).
        let expected = [
            ("DNABERT-2", 0.7640454545, 0.1357187859),
            ("NT-v2", 0.7407272727, 0.1295652457),
            ("HyenaDNA", 0.7195000000, 0.1202730794),
            ("SynthCog", 0.7482954545, 0.1344300392),
        ];
        let stats = crate::metrics::summary_stats(&bundled_benchmark_scores()).unwrap();
        for ((model, mean, std), got) in expected.iter().zip(&stats) {
            assert_eq!(&got.0, model);
            assert!((got.1 - mean).abs() < 1e-9, "{model} mean {} vs {mean}", got.1);
            assert!((got.2 - std).abs() < 1e-9, "{model} std {} vs {std}", got.2);
        }
    }

    #[test]
    fn groups_cover_fifteen_inventory_rows() {
        let groups = benchmark_task_groups();
        let inv = bundled_dataset_inventory();
        let total_members: usize = groups.iter().map(|g| g.members.len()).sum();
        assert_eq!(total_members, 15);
        for g in &groups {
            for m in &g.members {
                assert!(
                    inv.iter().any(|r| &r.dataset == m),
                    "group member '{m}' missing from inventory"
                );
            }
        }
    }
}

//! Online hierarchical prototype tree.
//!
//! Training inserts one SDR at a time. Each input is compared against every
//! stored leaf by Jaccard overlap; depending on the best score it is either
//! absorbed into that leaf (score >= merge threshold), attached as a sibling
//! of it (score >= branch threshold), or planted as a fresh root. Interior
//! nodes are compositions: their SDR is the bitwise OR of their children and
//! their label histogram the element-wise sum, maintained incrementally on
//! every insertion.
//!
//! Identification scans leaves exhaustively, so the returned representation
//! is the literal argmax of similarity; the hierarchy exists for abstraction
//! and reporting, not search pruning. All ties break toward the lowest node
//! id (insertion order), which makes every operation deterministic.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::encoder::{Codebook, Sdr, WindowConfig};
use crate::error::{Error, Result};

const MODEL_MAGIC: &str = "synthcog-model";
const MODEL_VERSION: u32 = 1;

/// Jaccard similarity of two equal-width SDRs; 1.0 when both are empty.
pub fn similarity(a: &Sdr, b: &Sdr) -> Result<f64> {
    if a.width() != b.width() {
        return Err(Error::WidthMismatch {
            left: a.width(),
            right: b.width(),
        });
    }
    let (inter, union) = a.overlap_counts(b);
    if union == 0 {
        return Ok(1.0);
    }
    Ok(inter as f64 / union as f64)
}

/// Union of two equal-width SDRs (the composition operator).
pub fn aggregate(a: &Sdr, b: &Sdr) -> Result<Sdr> {
    if a.width() != b.width() {
        return Err(Error::WidthMismatch {
            left: a.width(),
            right: b.width(),
        });
    }
    let mut out = a.clone();
    out.union_in_place(b);
    Ok(out)
}

/// Insertion thresholds and the hard memory bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoreConfig {
    /// Absorb into the best leaf at or above this similarity.
    pub merge_threshold: f64,
    /// Below merge but at or above this: branch as a sibling of the best leaf.
    pub branch_threshold: f64,
    /// Hard cap on stored representations (leaves and interior nodes).
    pub max_representations: usize,
}

impl Default for CoreConfig {
    fn default() -> Self {
        CoreConfig {
            merge_threshold: 0.8,
            branch_threshold: 0.4,
            max_representations: 5_000_000,
        }
    }
}

impl CoreConfig {
    pub fn validate(&self) -> Result<()> {
        let (t, m) = (self.branch_threshold, self.merge_threshold);
        if !(0.0..=1.0).contains(&t) || !(0.0..=1.0).contains(&m) || t > m {
            return Err(Error::InvalidConfig(format!(
                "thresholds must satisfy 0 <= branch ({t}) <= merge ({m}) <= 1"
            )));
        }
        if self.max_representations == 0 {
            return Err(Error::InvalidConfig(
                "max_representations must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Immutable construction parameters carried by every model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub core: CoreConfig,
    pub window: WindowConfig,
    pub codebook: Codebook,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            core: CoreConfig::default(),
            window: WindowConfig::default(),
            codebook: Codebook::dna_one_hot(),
        }
    }
}

impl ModelConfig {
    /// SDR width of one encoded window.
    pub fn window_width(&self) -> usize {
        self.window.n * self.codebook.bits_per_symbol()
    }
}

/// One stored prototype: an SDR, a per-label absorption histogram, and its
/// place in the tree. Leaves absorb inputs; interior nodes compose children.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    pub id: usize,
    pub sdr: Sdr,
    /// Histogram indexed by label id; always spans the model's label table.
    pub counts: Vec<u64>,
    pub children: Vec<usize>,
    pub parent: Option<usize>,
}

impl Representation {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn count_of(&self, label_id: usize) -> u64 {
        self.counts.get(label_id).copied().unwrap_or(0)
    }
}

/// The full representation tree plus its construction config and label table.
///
/// Training is strictly sequential (insertion order matters); a trained model
/// is immutable under `identify`/`predict_window_label` and safe to share
/// across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    config: ModelConfig,
    labels: Vec<String>,
    label_index: BTreeMap<String, usize>,
    nodes: Vec<Representation>,
    roots: Vec<usize>,
    /// Leaf ids in creation order. Leaves never become interior nodes, so
    /// this is push-only and stays sorted by id.
    leaves: Vec<usize>,
    trained_count: u64,
}

impl Model {
    /// Create an empty model. `label_order` seeds the label table and fixes
    /// tie-break order; labels seen later during training are appended.
    pub fn new(config: ModelConfig, label_order: Vec<String>) -> Result<Self> {
        config.core.validate()?;
        let mut label_index = BTreeMap::new();
        for (i, l) in label_order.iter().enumerate() {
            if label_index.insert(l.clone(), i).is_some() {
                return Err(Error::InvalidConfig(format!("duplicate label '{l}'")));
            }
        }
        Ok(Model {
            config,
            labels: label_order,
            label_index,
            nodes: Vec::new(),
            roots: Vec::new(),
            leaves: Vec::new(),
            trained_count: 0,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_name(&self, id: usize) -> &str {
        &self.labels[id]
    }

    pub fn label_id(&self, name: &str) -> Option<usize> {
        self.label_index.get(name).copied()
    }

    pub fn node(&self, id: usize) -> &Representation {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Representation> {
        self.nodes.iter()
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_leaves(&self) -> usize {
        self.leaves.len()
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn trained_count(&self) -> u64 {
        self.trained_count
    }

    /// Expected SDR width for inputs: window length x bits per symbol.
    pub fn window_width(&self) -> usize {
        self.config.window_width()
    }

    fn check_width(&self, x: &Sdr) -> Result<()> {
        if x.width() != self.window_width() {
            return Err(Error::WidthMismatch {
                left: x.width(),
                right: self.window_width(),
            });
        }
        Ok(())
    }

    fn intern_label(&mut self, label: &str) -> usize {
        if let Some(&id) = self.label_index.get(label) {
            return id;
        }
        let id = self.labels.len();
        self.labels.push(label.to_string());
        self.label_index.insert(label.to_string(), id);
        // Histograms always span the full label table.
        for node in &mut self.nodes {
            node.counts.resize(id + 1, 0);
        }
        id
    }

    fn ensure_capacity(&self, needed: usize) -> Result<()> {
        if self.nodes.len() + needed > self.config.core.max_representations {
            return Err(Error::CapacityExceeded {
                limit: self.config.core.max_representations,
                needed,
            });
        }
        Ok(())
    }

    /// Best-matching leaf by Jaccard similarity; ties go to the lowest id.
    fn best_leaf(&self, x: &Sdr) -> (usize, f64) {
        debug_assert!(!self.leaves.is_empty());
        let mut best_id = self.leaves[0];
        let mut best_score = -1.0f64;
        for &leaf in &self.leaves {
            let (inter, union) = self.nodes[leaf].sdr.overlap_counts(x);
            let score = if union == 0 {
                1.0
            } else {
                inter as f64 / union as f64
            };
            if score > best_score {
                best_score = score;
                best_id = leaf;
            }
        }
        (best_id, best_score)
    }

    fn new_leaf(&mut self, sdr: Sdr, label_id: usize, parent: Option<usize>) -> usize {
        let id = self.nodes.len();
        let mut counts = vec![0u64; self.labels.len()];
        counts[label_id] = 1;
        self.nodes.push(Representation {
            id,
            sdr,
            counts,
            children: Vec::new(),
            parent,
        });
        self.leaves.push(id);
        id
    }

    /// OR `x` into every ancestor starting at `from` and bump the label count.
    /// Children only ever gain bits and counts, so the incremental update is
    /// equivalent to recomposing each interior node from its children.
    fn recompose_upward(&mut self, from: usize, x: &Sdr, label_id: usize) {
        let mut cur = Some(from);
        while let Some(id) = cur {
            self.nodes[id].sdr.union_in_place(x);
            self.nodes[id].counts[label_id] += 1;
            cur = self.nodes[id].parent;
        }
    }

    /// Insert one training input under the given class label.
    pub fn train_one(&mut self, x: &Sdr, label: &str) -> Result<()> {
        self.check_width(x)?;

        if self.leaves.is_empty() {
            self.ensure_capacity(1)?;
            let label_id = self.intern_label(label);
            let id = self.new_leaf(x.clone(), label_id, None);
            self.roots.push(id);
            self.trained_count += 1;
            return Ok(());
        }

        let (best, score) = self.best_leaf(x);
        if score >= self.config.core.merge_threshold {
            // Absorb: the best leaf aggregates the input.
            let label_id = self.intern_label(label);
            self.nodes[best].sdr.union_in_place(x);
            self.nodes[best].counts[label_id] += 1;
            if let Some(p) = self.nodes[best].parent {
                self.recompose_upward(p, x, label_id);
            }
        } else if score >= self.config.core.branch_threshold {
            // Branch: new leaf joins best as a sibling.
            match self.nodes[best].parent {
                Some(p) => {
                    self.ensure_capacity(1)?;
                    let label_id = self.intern_label(label);
                    let leaf = self.new_leaf(x.clone(), label_id, Some(p));
                    self.nodes[p].children.push(leaf);
                    self.recompose_upward(p, x, label_id);
                }
                None => {
                    // Best is a root leaf: compose the pair under a new
                    // interior node that takes best's root slot.
                    self.ensure_capacity(2)?;
                    let label_id = self.intern_label(label);
                    let leaf = self.new_leaf(x.clone(), label_id, None);
                    let parent_id = self.nodes.len();
                    let mut sdr = self.nodes[best].sdr.clone();
                    sdr.union_in_place(x);
                    let mut counts = self.nodes[best].counts.clone();
                    counts[label_id] += 1;
                    self.nodes.push(Representation {
                        id: parent_id,
                        sdr,
                        counts,
                        children: vec![best, leaf],
                        parent: None,
                    });
                    self.nodes[best].parent = Some(parent_id);
                    self.nodes[leaf].parent = Some(parent_id);
                    let slot = self
                        .roots
                        .iter()
                        .position(|&r| r == best)
                        .expect("best leaf without parent must be a root");
                    self.roots[slot] = parent_id;
                }
            }
        } else {
            // Too dissimilar from everything stored: plant a new root.
            self.ensure_capacity(1)?;
            let label_id = self.intern_label(label);
            let id = self.new_leaf(x.clone(), label_id, None);
            self.roots.push(id);
        }
        self.trained_count += 1;
        Ok(())
    }

    /// Exhaustive argmax of similarity over leaves.
    pub fn identify(&self, x: &Sdr) -> Result<(usize, f64)> {
        self.check_width(x)?;
        if self.leaves.is_empty() {
            return Err(Error::UntrainedModel);
        }
        Ok(self.best_leaf(x))
    }

    /// Label with the highest count on the identified leaf; ties break toward
    /// the earliest label in the table. Returns a label id.
    pub fn predict_window_label(&self, x: &Sdr) -> Result<usize> {
        let (leaf, _) = self.identify(x)?;
        let counts = &self.nodes[leaf].counts;
        let mut best = 0usize;
        let mut best_count = 0u64;
        for (i, &c) in counts.iter().enumerate() {
            if c > best_count {
                best = i;
                best_count = c;
            }
        }
        Ok(best)
    }

    /// Full-tree audit: parent/child link consistency, reachability from the
    /// roots, composition identities (interior sdr = OR of children, counts =
    /// sum of children), and leaf totals matching `trained_count`.
    pub fn verify_invariants(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Internal(format!("tree audit: {msg}")));

        for (i, node) in self.nodes.iter().enumerate() {
            if node.id != i {
                return fail(format!("node at index {i} has id {}", node.id));
            }
        }
        for &r in &self.roots {
            if self.nodes[r].parent.is_some() {
                return fail(format!("root {r} has a parent"));
            }
        }

        let mut visited = vec![false; self.nodes.len()];
        let mut stack: Vec<usize> = self.roots.clone();
        while let Some(id) = stack.pop() {
            if visited[id] {
                return fail(format!("node {id} reachable twice"));
            }
            visited[id] = true;
            for &c in &self.nodes[id].children {
                if self.nodes[c].parent != Some(id) {
                    return fail(format!("child {c} of {id} has parent {:?}", self.nodes[c].parent));
                }
                stack.push(c);
            }
        }
        if let Some(orphan) = visited.iter().position(|&v| !v) {
            return fail(format!("node {orphan} unreachable from roots"));
        }

        let mut leaf_total = 0u64;
        for node in &self.nodes {
            if node.is_leaf() {
                leaf_total += node.counts.iter().sum::<u64>();
                continue;
            }
            let mut sdr = Sdr::empty(self.window_width());
            let mut counts: Vec<u64> = Vec::new();
            for &c in &node.children {
                sdr.union_in_place(&self.nodes[c].sdr);
                for (i, &v) in self.nodes[c].counts.iter().enumerate() {
                    if counts.len() <= i {
                        counts.resize(i + 1, 0);
                    }
                    counts[i] += v;
                }
            }
            if sdr.active() != node.sdr.active() {
                return fail(format!("interior {} sdr is not the OR of its children", node.id));
            }
            let width = counts.len().max(node.counts.len());
            for i in 0..width {
                let want = counts.get(i).copied().unwrap_or(0);
                if node.count_of(i) != want {
                    return fail(format!(
                        "interior {} count[{i}] = {}, children sum {want}",
                        node.id,
                        node.count_of(i)
                    ));
                }
            }
        }
        if leaf_total != self.trained_count {
            return fail(format!(
                "leaf count total {leaf_total} != trained_count {}",
                self.trained_count
            ));
        }
        Ok(())
    }

    /// Serialize to the versioned line-oriented model format.
    pub fn to_model_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MODEL_MAGIC} v{MODEL_VERSION}");
        let _ = writeln!(out, "window.n={}", self.config.window.n);
        let _ = writeln!(out, "window.stride={}", self.config.window.stride);
        let _ = writeln!(out, "core.merge_threshold={}", self.config.core.merge_threshold);
        let _ = writeln!(out, "core.branch_threshold={}", self.config.core.branch_threshold);
        let _ = writeln!(
            out,
            "core.max_representations={}",
            self.config.core.max_representations
        );
        let _ = writeln!(
            out,
            "codebook.bits_per_symbol={}",
            self.config.codebook.bits_per_symbol()
        );
        let _ = writeln!(out, "codebook.pad={}", self.config.codebook.pad_symbol());
        for (sym, bits) in self.config.codebook.entries() {
            let _ = write!(out, "sym {sym}");
            for b in bits {
                let _ = write!(out, " {b}");
            }
            out.push('\n');
        }
        for label in &self.labels {
            let _ = writeln!(out, "label {label}");
        }
        let _ = writeln!(out, "trained_count={}", self.trained_count);
        let _ = writeln!(out, "roots={}", join(&self.roots));
        let _ = writeln!(out, "nodes={}", self.nodes.len());
        let n_labels = self.labels.len();
        for node in &self.nodes {
            let parent = node
                .parent
                .map(|p| p.to_string())
                .unwrap_or_else(|| "-".to_string());
            let mut counts = node.counts.clone();
            counts.resize(n_labels, 0);
            let _ = writeln!(
                out,
                "{}|{}|{}|{}|{}",
                node.id,
                parent,
                join(&node.children),
                join(node.sdr.active()),
                join(&counts)
            );
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_model_string())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_model_str(&text)
    }

    /// Parse the versioned model format; rejects wrong magic/version and any
    /// structural inconsistency.
    pub fn from_model_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let mut next = |what: &str| -> Result<(usize, &str)> {
            lines.next().ok_or_else(|| Error::MalformedModel {
                msg: format!("unexpected end of file, expected {what}"),
                line: None,
            })
        };

        let (_, header) = next("header")?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some(MODEL_MAGIC) {
            return Err(Error::MalformedModel {
                msg: format!("bad magic, expected '{MODEL_MAGIC}'"),
                line: Some(1),
            });
        }
        match parts.next() {
            Some(v) if v == format!("v{MODEL_VERSION}") => {}
            Some(v) => {
                return Err(Error::MalformedModel {
                    msg: format!("unsupported version '{v}', this build reads v{MODEL_VERSION}"),
                    line: Some(1),
                })
            }
            None => {
                return Err(Error::MalformedModel {
                    msg: "missing version".into(),
                    line: Some(1),
                })
            }
        }

        let field = |line: usize, text: &str, key: &str| -> Result<String> {
            match text.split_once('=') {
                Some((k, v)) if k == key => Ok(v.to_string()),
                _ => Err(Error::MalformedModel {
                    msg: format!("expected '{key}=...', got '{text}'"),
                    line: Some(line + 1),
                }),
            }
        };
        fn parse<T: std::str::FromStr>(line: usize, v: &str, what: &str) -> Result<T> {
            v.parse().map_err(|_| Error::MalformedModel {
                msg: format!("invalid {what} '{v}'"),
                line: Some(line + 1),
            })
        }

        let (l, t) = next("window.n")?;
        let n: usize = parse(l, &field(l, t, "window.n")?, "window length")?;
        let (l, t) = next("window.stride")?;
        let stride: usize = parse(l, &field(l, t, "window.stride")?, "stride")?;
        let window = WindowConfig::new(n, stride)?;

        let (l, t) = next("core.merge_threshold")?;
        let merge: f64 = parse(l, &field(l, t, "core.merge_threshold")?, "threshold")?;
        let (l, t) = next("core.branch_threshold")?;
        let branch: f64 = parse(l, &field(l, t, "core.branch_threshold")?, "threshold")?;
        let (l, t) = next("core.max_representations")?;
        let max_reps: usize = parse(l, &field(l, t, "core.max_representations")?, "count")?;
        let core = CoreConfig {
            merge_threshold: merge,
            branch_threshold: branch,
            max_representations: max_reps,
        };

        let (l, t) = next("codebook.bits_per_symbol")?;
        let bits: usize = parse(l, &field(l, t, "codebook.bits_per_symbol")?, "count")?;
        let (l, t) = next("codebook.pad")?;
        let pad_str = field(l, t, "codebook.pad")?;
        let pad = single_char(l, &pad_str)?;

        // Symbol lines, then label lines, then the tree block.
        let mut code = BTreeMap::new();
        let mut labels: Vec<String> = Vec::new();
        let trained_line;
        loop {
            let (l, t) = next("sym/label/trained_count")?;
            if let Some(rest) = t.strip_prefix("sym ") {
                let mut it = rest.split_whitespace();
                let sym_tok = it.next().ok_or(Error::MalformedModel {
                    msg: "empty symbol entry".into(),
                    line: Some(l + 1),
                })?;
                let sym = single_char(l, sym_tok)?;
                let mut bits_list = Vec::new();
                for tok in it {
                    bits_list.push(parse::<usize>(l, tok, "bit index")?);
                }
                code.insert(sym, bits_list);
            } else if let Some(rest) = t.strip_prefix("label ") {
                labels.push(rest.to_string());
            } else {
                trained_line = (l, t.to_string());
                break;
            }
        }
        let codebook = Codebook::new(bits, pad, code)?;

        let (l, t) = (trained_line.0, trained_line.1.as_str());
        let trained_count: u64 = parse(l, &field(l, t, "trained_count")?, "count")?;
        let (l, t) = next("roots")?;
        let roots = parse_id_list(l, &field(l, t, "roots")?)?;
        let (l, t) = next("nodes")?;
        let n_nodes: usize = parse(l, &field(l, t, "nodes")?, "count")?;

        let config = ModelConfig {
            core,
            window,
            codebook,
        };
        let width = config.window_width();
        let mut nodes = Vec::with_capacity(n_nodes);
        for i in 0..n_nodes {
            let (l, t) = next("node row")?;
            let mut fields = t.split('|');
            let mut take = |what: &str| -> Result<&str> {
                fields.next().ok_or_else(|| Error::MalformedModel {
                    msg: format!("node row missing {what}"),
                    line: Some(l + 1),
                })
            };
            let id: usize = parse(l, take("id")?, "node id")?;
            if id != i {
                return Err(Error::MalformedModel {
                    msg: format!("node ids out of order: expected {i}, got {id}"),
                    line: Some(l + 1),
                });
            }
            let parent_tok = take("parent")?;
            let parent = if parent_tok == "-" {
                None
            } else {
                Some(parse::<usize>(l, parent_tok, "parent id")?)
            };
            let children = parse_id_list(l, take("children")?)?;
            let active = parse_id_list(l, take("active bits")?)?;
            let counts_raw = parse_id_list(l, take("counts")?)?;
            if counts_raw.len() != labels.len() {
                return Err(Error::MalformedModel {
                    msg: format!(
                        "node {id}: {} counts for {} labels",
                        counts_raw.len(),
                        labels.len()
                    ),
                    line: Some(l + 1),
                });
            }
            let sdr = Sdr::new(width, active).map_err(|e| Error::MalformedModel {
                msg: format!("node {id}: {e}"),
                line: Some(l + 1),
            })?;
            nodes.push(Representation {
                id,
                sdr,
                counts: counts_raw.into_iter().map(|c| c as u64).collect(),
                children,
                parent,
            });
        }

        let mut model = Model::new(config, labels)?;
        let leaves: Vec<usize> = nodes
            .iter()
            .filter(|n| n.is_leaf())
            .map(|n| n.id)
            .collect();
        model.nodes = nodes;
        model.roots = roots;
        model.leaves = leaves;
        model.trained_count = trained_count;
        model.verify_invariants().map_err(|e| Error::MalformedModel {
            msg: e.to_string(),
            line: None,
        })?;
        Ok(model)
    }
}

fn join(ids: &[impl std::fmt::Display]) -> String {
    ids.iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn parse_id_list(line: usize, text: &str) -> Result<Vec<usize>> {
    text.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>().map_err(|_| Error::MalformedModel {
                msg: format!("invalid id '{tok}'"),
                line: Some(line + 1),
            })
        })
        .collect()
}

fn single_char(line: usize, tok: &str) -> Result<char> {
    let mut chars = tok.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(Error::MalformedModel {
            msg: format!("expected single symbol, got '{tok}'"),
            line: Some(line + 1),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sdr(width: usize, bits: &[usize]) -> Sdr {
        Sdr::new(width, bits.to_vec()).unwrap()
    }

    fn tiny_model(merge: f64, branch: f64) -> Model {
        // bits_per_symbol 8, n = 1 => window width 8, enough room to play.
        let mut code = BTreeMap::new();
        for (i, sym) in ['A', 'C', 'G', 'T'].into_iter().enumerate() {
            code.insert(sym, vec![2 * i, 2 * i + 1]);
        }
        code.insert('N', vec![]);
        let config = ModelConfig {
            core: CoreConfig {
                merge_threshold: merge,
                branch_threshold: branch,
                max_representations: 5_000_000,
            },
            window: WindowConfig::new(1, 1).unwrap(),
            codebook: Codebook::new(8, 'N', code).unwrap(),
        };
        Model::new(config, vec![]).unwrap()
    }

    #[test]
    fn similarity_identity_disjoint_and_partial() {
        let a = sdr(8, &[1, 3]);
        assert_eq!(similarity(&a, &a).unwrap(), 1.0);
        let b = sdr(8, &[0, 2]);
        assert_eq!(similarity(&a, &b).unwrap(), 0.0);
        let c = sdr(8, &[3, 5]);
        assert!((similarity(&a, &c).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let both_empty = similarity(&Sdr::empty(8), &Sdr::empty(8)).unwrap();
        assert_eq!(both_empty, 1.0);
    }

    #[test]
    fn similarity_width_mismatch() {
        let a = sdr(8, &[1]);
        let b = sdr(4, &[1]);
        assert!(matches!(
            similarity(&a, &b),
            Err(Error::WidthMismatch { .. })
        ));
    }

    #[test]
    fn aggregate_is_union() {
        let x = sdr(16, &[0, 5]);
        let y = sdr(16, &[5, 9]);
        assert_eq!(aggregate(&x, &y).unwrap().active(), &[0, 5, 9]);
        assert_eq!(aggregate(&x, &x).unwrap(), x);
        assert_eq!(aggregate(&x, &Sdr::empty(16)).unwrap(), x);
    }

    #[test]
    fn first_insertion_creates_root_leaf() {
        let mut m = tiny_model(0.8, 0.4);
        m.train_one(&sdr(8, &[0, 1]), "pos").unwrap();
        assert_eq!(m.n_nodes(), 1);
        assert_eq!(m.roots(), &[0]);
        assert_eq!(m.node(0).counts, vec![1]);
        assert_eq!(m.trained_count(), 1);
    }

    #[test]
    fn repeat_insertion_merges() {
        let mut m = tiny_model(0.8, 0.4);
        let x = sdr(8, &[0, 1]);
        m.train_one(&x, "pos").unwrap();
        m.train_one(&x, "pos").unwrap();
        assert_eq!(m.n_leaves(), 1);
        assert_eq!(m.node(0).counts, vec![2]);
        assert_eq!(m.trained_count(), 2);
    }

    #[test]
    fn disjoint_insertion_opens_new_root() {
        let mut m = tiny_model(0.8, 0.4);
        m.train_one(&sdr(8, &[0, 1]), "pos").unwrap();
        m.train_one(&sdr(8, &[2, 3]), "neg").unwrap();
        assert_eq!(m.n_nodes(), 2);
        assert_eq!(m.roots(), &[0, 1]);
        m.verify_invariants().unwrap();
    }

    #[test]
    fn branching_composes_an_interior_parent() {
        let mut m = tiny_model(0.9, 0.3);
        m.train_one(&sdr(8, &[0, 1, 2]), "pos").unwrap();
        // Jaccard {0,1,2} vs {1,2,3} = 2/4 = 0.5: branch, not merge.
        m.train_one(&sdr(8, &[1, 2, 3]), "neg").unwrap();
        assert_eq!(m.n_nodes(), 3);
        assert_eq!(m.roots(), &[2]);
        let interior = m.node(2);
        assert_eq!(interior.children, vec![0, 1]);
        assert_eq!(interior.sdr.active(), &[0, 1, 2, 3]);
        assert_eq!(interior.counts, vec![1, 1]);
        m.verify_invariants().unwrap();

        // A third branching input joins the same parent without a new interior.
        m.train_one(&sdr(8, &[2, 3, 4]), "pos").unwrap();
        assert_eq!(m.n_nodes(), 4);
        assert_eq!(m.node(2).children, vec![0, 1, 3]);
        m.verify_invariants().unwrap();
    }

    #[test]
    fn identify_exact_and_tie_rules() {
        let mut m = tiny_model(0.8, 0.0);
        let a = sdr(8, &[0, 1]);
        let b = sdr(8, &[2, 3]);
        m.train_one(&a, "pos").unwrap();
        m.train_one(&b, "neg").unwrap();

        assert_eq!(m.identify(&a).unwrap(), (0, 1.0));
        // {1,2} vs {0,1}: 1/3. {1,2} vs {2,3}: 1/3. Tie -> lowest id.
        let (id, score) = m.identify(&sdr(8, &[1, 2])).unwrap();
        assert_eq!(id, 0);
        assert!((score - 1.0 / 3.0).abs() < 1e-15);
        // Disjoint from everything: similarity 0, lowest id wins.
        let (id, score) = m.identify(&sdr(8, &[6, 7])).unwrap();
        assert_eq!((id, score), (0, 0.0));
    }

    #[test]
    fn identify_on_empty_model_fails() {
        let m = tiny_model(0.8, 0.4);
        assert!(matches!(
            m.identify(&sdr(8, &[0])),
            Err(Error::UntrainedModel)
        ));
    }

    #[test]
    fn predict_argmax_and_label_order_tie() {
        let x = sdr(8, &[0, 1]);

        let mut m = tiny_model(0.8, 0.4);
        for _ in 0..3 {
            m.train_one(&x, "pos").unwrap();
        }
        m.train_one(&x, "neg").unwrap();
        assert_eq!(m.label_name(m.predict_window_label(&x).unwrap()), "pos");

        // Tie 2:2 with declared order [neg, pos] -> neg.
        let labels = vec!["neg".to_string(), "pos".to_string()];
        let mut m = Model::new(m.config().clone(), labels).unwrap();
        for _ in 0..2 {
            m.train_one(&x, "pos").unwrap();
            m.train_one(&x, "neg").unwrap();
        }
        assert_eq!(m.label_name(m.predict_window_label(&x).unwrap()), "neg");

        // Single-leaf model trained once.
        let mut m = tiny_model(0.8, 0.4);
        m.train_one(&x, "only").unwrap();
        assert_eq!(m.label_name(m.predict_window_label(&x).unwrap()), "only");
    }

    #[test]
    fn capacity_is_a_hard_error() {
        let mut config = tiny_model(0.8, 0.4).config().clone();
        config.core.max_representations = 1;
        let mut m = Model::new(config, vec![]).unwrap();
        m.train_one(&sdr(8, &[0, 1]), "pos").unwrap();
        // Disjoint input needs a second node.
        let err = m.train_one(&sdr(8, &[2, 3]), "neg").unwrap_err();
        assert!(matches!(err, Error::CapacityExceeded { limit: 1, .. }));
        // The failed insertion must not have mutated the model.
        assert_eq!(m.n_nodes(), 1);
        assert_eq!(m.trained_count(), 1);
        assert_eq!(m.labels(), &["pos".to_string()]);
        m.verify_invariants().unwrap();
    }

    #[test]
    fn empty_model_round_trips() {
        let m = tiny_model(0.8, 0.4);
        let text = m.to_model_string();
        let back = Model::from_model_str(&text).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn truncated_file_is_malformed() {
        let mut m = tiny_model(0.8, 0.4);
        m.train_one(&sdr(8, &[0, 1]), "pos").unwrap();
        m.train_one(&sdr(8, &[2, 3]), "neg").unwrap();
        let text = m.to_model_string();
        let cut = &text[..text.len() - 10];
        assert!(matches!(
            Model::from_model_str(cut),
            Err(Error::MalformedModel { .. })
        ));
    }

    #[test]
    fn wrong_magic_and_version_rejected() {
        assert!(matches!(
            Model::from_model_str("other-format v1\n"),
            Err(Error::MalformedModel { .. })
        ));
        let m = tiny_model(0.8, 0.4);
        let text = m.to_model_string().replace("v1", "v9");
        assert!(matches!(
            Model::from_model_str(&text),
            Err(Error::MalformedModel { .. })
        ));
    }

    #[test]
    fn threshold_validation() {
        let bad = CoreConfig {
            merge_threshold: 0.3,
            branch_threshold: 0.5,
            max_representations: 10,
        };
        assert!(bad.validate().is_err());
    }
}

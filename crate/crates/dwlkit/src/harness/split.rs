use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::temporal::DynamicGraph;

/// Evaluation section of a split.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Section {
    Val,
    Test,
}

/// Chronological split of an event stream, with optional inductive masking.
///
/// Boundaries sit at 0.7 and 0.85 of the maximum event time; events fall
/// into `[0, 0.7T)`, `[0.7T, 0.85T)` and `[0.85T, T]` by half-open
/// intervals, so a boundary event belongs to the later section.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub t_total: f64,
    pub train_range: (usize, usize),
    pub val_range: (usize, usize),
    pub test_range: (usize, usize),
    /// Sorted masked nodes; empty for a transductive split.
    pub masked_nodes: Vec<usize>,
    /// Sorted train-range event indices removed by masking.
    pub removed_train_events: Vec<usize>,
    /// True once inductive masking was applied (even with fraction 0).
    pub inductive: bool,
    pub seed: u64,
}

impl SplitSpec {
    pub fn is_inductive(&self) -> bool {
        self.inductive
    }

    /// Training event indices, masked events excluded.
    pub fn train_event_indices(&self) -> Vec<usize> {
        (self.train_range.0..self.train_range.1)
            .filter(|i| self.removed_train_events.binary_search(i).is_err())
            .collect()
    }

    fn range(&self, section: Section) -> (usize, usize) {
        match section {
            Section::Val => self.val_range,
            Section::Test => self.test_range,
        }
    }

    /// Events evaluated in a section: all of them transductively, only those
    /// touching a masked node once inductive masking was applied.
    pub fn section_event_indices(&self, g: &DynamicGraph, section: Section) -> Vec<usize> {
        let (from, to) = self.range(section);
        (from..to)
            .filter(|&i| {
                if !self.inductive {
                    return true;
                }
                let ev = &g.events()[i];
                self.masked_nodes.binary_search(&ev.src).is_ok()
                    || self.masked_nodes.binary_search(&ev.dst).is_ok()
            })
            .collect()
    }
}

/// Splits the time range `[0, T]` at `0.7T` and `0.85T`. Any empty section
/// is rejected as degenerate (for example when every event shares one
/// timestamp).
pub fn chronological_split(g: &DynamicGraph) -> Result<SplitSpec> {
    if g.events().len() < 3 {
        return Err(Error::invalid(format!(
            "need at least 3 events to split, got {}",
            g.events().len()
        )));
    }
    let t_total = g.max_time();
    let b1 = 0.7 * t_total;
    let b2 = 0.85 * t_total;
    let i1 = g.events().partition_point(|e| e.time < b1);
    let i2 = g.events().partition_point(|e| e.time < b2);
    let m = g.events().len();
    if i1 == 0 || i2 == i1 || i2 == m {
        return Err(Error::invalid(format!(
            "degenerate split: sections of sizes {}/{}/{}",
            i1,
            i2 - i1,
            m - i2
        )));
    }
    Ok(SplitSpec {
        t_total,
        train_range: (0, i1),
        val_range: (i1, i2),
        test_range: (i2, m),
        masked_nodes: Vec::new(),
        removed_train_events: Vec::new(),
        inductive: false,
        seed: 0,
    })
}

/// Samples `ceil(fraction * |test nodes|)` nodes appearing in the test range
/// and removes their incident events from the training range. Evaluation of
/// a masked split is restricted to events touching a masked node.
pub fn inductive_mask(
    split: &SplitSpec,
    g: &DynamicGraph,
    fraction: f64,
    seed: u64,
) -> Result<SplitSpec> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::invalid("mask fraction must lie in [0, 1]"));
    }
    let (t0, t1) = split.test_range;
    if t0 == t1 {
        return Err(Error::invalid("test section is empty"));
    }
    let mut test_nodes: Vec<usize> =
        g.events()[t0..t1].iter().flat_map(|e| [e.src, e.dst]).collect();
    test_nodes.sort_unstable();
    test_nodes.dedup();
    let count = (fraction * test_nodes.len() as f64).ceil() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shuffled = test_nodes.clone();
    shuffled.shuffle(&mut rng);
    let mut masked: Vec<usize> = shuffled.into_iter().take(count).collect();
    masked.sort_unstable();

    let removed: Vec<usize> = (split.train_range.0..split.train_range.1)
        .filter(|&i| {
            let ev = &g.events()[i];
            masked.binary_search(&ev.src).is_ok() || masked.binary_search(&ev.dst).is_ok()
        })
        .collect();
    Ok(SplitSpec {
        masked_nodes: masked,
        removed_train_events: removed,
        inductive: true,
        seed,
        ..split.clone()
    })
}

/// The graph a model may train on: training-range events minus masked ones,
/// with edge features re-indexed to the surviving events.
pub fn training_graph(g: &DynamicGraph, split: &SplitSpec) -> Result<DynamicGraph> {
    let keep = split.train_event_indices();
    let d_e = g.edge_features().cols();
    let mut events = Vec::with_capacity(keep.len());
    let mut rows = Vec::with_capacity(keep.len());
    for (new_idx, &i) in keep.iter().enumerate() {
        let mut ev = g.events()[i];
        if d_e > 0 {
            if let Some(old) = ev.edge_feature_index {
                rows.push(g.edge_features().row(old).to_vec());
                ev.edge_feature_index = Some(new_idx);
            } else {
                rows.push(vec![0.0; d_e]);
                ev.edge_feature_index = Some(new_idx);
            }
        }
        events.push(ev);
    }
    let edge_features =
        if d_e > 0 { Matrix::from_rows(&rows) } else { Matrix::zeros(events.len(), 0) };
    DynamicGraph::new(g.node_count(), events, g.node_features().clone(), edge_features)
}

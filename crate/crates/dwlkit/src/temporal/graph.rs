use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// A single timestamped interaction between two nodes.
///
/// `src`/`dst` record the original event orientation (used for feature
/// lookup); all neighborhood and isomorphism semantics treat the pair as
/// unordered.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Event {
    pub src: usize,
    pub dst: usize,
    pub time: f64,
    /// Row of the edge-feature table this event carries, if any.
    pub edge_feature_index: Option<usize>,
}

impl Event {
    pub fn new(src: usize, dst: usize, time: f64) -> Self {
        Event { src, dst, time, edge_feature_index: None }
    }

    /// The endpoint other than `node`; for self-loops returns `node`.
    pub fn other(&self, node: usize) -> usize {
        if self.src == node {
            self.dst
        } else {
            self.src
        }
    }
}

/// An immutable continuous-time dynamic graph: node/edge features plus a
/// time-sorted event stream and a per-node incidence index.
#[derive(Clone, Debug)]
pub struct DynamicGraph {
    node_count: usize,
    events: Vec<Event>,
    node_features: Matrix,
    edge_features: Matrix,
    /// Per node, event indices sorted by time (stream order on ties).
    incidence: Vec<Vec<usize>>,
}

impl DynamicGraph {
    /// Builds a graph, sorting events stably by time and validating ids,
    /// feature shapes and timestamp finiteness.
    pub fn new(
        node_count: usize,
        mut events: Vec<Event>,
        node_features: Matrix,
        edge_features: Matrix,
    ) -> Result<Self> {
        for ev in &events {
            if ev.src >= node_count {
                return Err(Error::InvalidNode { id: ev.src, count: node_count });
            }
            if ev.dst >= node_count {
                return Err(Error::InvalidNode { id: ev.dst, count: node_count });
            }
            if !ev.time.is_finite() || ev.time < 0.0 {
                return Err(Error::invalid(format!(
                    "event ({},{}) has invalid timestamp {}",
                    ev.src, ev.dst, ev.time
                )));
            }
            if let Some(idx) = ev.edge_feature_index {
                if idx >= edge_features.rows() && edge_features.cols() > 0 {
                    return Err(Error::invalid(format!("edge feature index {idx} out of range")));
                }
            }
        }
        if node_features.rows() != node_count {
            return Err(Error::invalid(format!(
                "node feature rows {} != node count {}",
                node_features.rows(),
                node_count
            )));
        }
        if edge_features.cols() > 0 && edge_features.rows() != events.len() {
            return Err(Error::invalid(format!(
                "edge feature rows {} != event count {}",
                edge_features.rows(),
                events.len()
            )));
        }
        events.sort_by(|a, b| a.time.partial_cmp(&b.time).expect("finite timestamps"));
        let mut incidence = vec![Vec::new(); node_count];
        for (i, ev) in events.iter().enumerate() {
            incidence[ev.src].push(i);
            if ev.dst != ev.src {
                incidence[ev.dst].push(i);
            }
        }
        Ok(DynamicGraph { node_count, events, node_features, edge_features, incidence })
    }

    /// Graph with zero-width feature matrices.
    pub fn from_events(node_count: usize, events: Vec<Event>) -> Result<Self> {
        Self::with_zero_features(node_count, events, 0, 0)
    }

    /// Graph whose features are all-zero rows of the given widths.
    pub fn with_zero_features(
        node_count: usize,
        events: Vec<Event>,
        node_dim: usize,
        edge_dim: usize,
    ) -> Result<Self> {
        let n_feat = Matrix::zeros(node_count, node_dim);
        let e_feat = Matrix::zeros(events.len(), edge_dim);
        Self::new(node_count, events, n_feat, e_feat)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn node_features(&self) -> &Matrix {
        &self.node_features
    }

    pub fn edge_features(&self) -> &Matrix {
        &self.edge_features
    }

    /// Event indices incident to `node`, ascending by time.
    pub(crate) fn incident_events(&self, node: usize) -> &[usize] {
        &self.incidence[node]
    }

    /// Latest event timestamp, or 0 for an empty stream.
    pub fn max_time(&self) -> f64 {
        self.events.last().map_or(0.0, |e| e.time)
    }

    /// Feature row of a node.
    pub fn node_feature_row(&self, node: usize) -> &[f64] {
        self.node_features.row(node)
    }

    /// The graph under a node relabeling: node `u` becomes `perm[u]`,
    /// features move with their nodes, event order is unchanged.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.node_count {
            return Err(Error::invalid("permutation length mismatch"));
        }
        let events = self
            .events
            .iter()
            .map(|e| Event { src: perm[e.src], dst: perm[e.dst], ..*e })
            .collect();
        let mut node_features = Matrix::zeros(self.node_count, self.node_features.cols());
        for u in 0..self.node_count {
            node_features.row_mut(perm[u]).copy_from_slice(self.node_features.row(u));
        }
        Self::new(self.node_count, events, node_features, self.edge_features.clone())
    }
}

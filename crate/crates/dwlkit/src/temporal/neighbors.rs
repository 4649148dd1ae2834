use crate::error::{Error, Result};

use super::graph::DynamicGraph;

/// One historical interaction incident to the root node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NeighborEntry {
    pub neighbor: usize,
    pub time: f64,
    pub edge_feature_index: Option<usize>,
    /// Index of the originating event in the graph's event stream.
    pub event_index: usize,
}

/// The historical neighborhood of a node at a query time: interactions
/// strictly before `t`, most recent `limit` kept, sorted ascending by time.
/// Repeat interactions are retained with multiplicity.
#[derive(Clone, Debug)]
pub struct HistoricalNeighborhood {
    pub root: usize,
    pub t: f64,
    pub entries: Vec<NeighborEntry>,
}

/// Collects the events incident to `u` with time strictly before `t`,
/// keeping the `limit` most recent.
pub fn historical_neighbors(
    g: &DynamicGraph,
    u: usize,
    t: f64,
    limit: usize,
) -> Result<HistoricalNeighborhood> {
    if u >= g.node_count() {
        return Err(Error::InvalidNode { id: u, count: g.node_count() });
    }
    if limit == 0 {
        return Err(Error::invalid("neighbor limit must be positive"));
    }
    let incident = g.incident_events(u);
    // Incident lists are time-sorted, so the events before t form a prefix.
    let cut = incident.partition_point(|&i| g.events()[i].time < t);
    let start = cut.saturating_sub(limit);
    let entries = incident[start..cut]
        .iter()
        .map(|&i| {
            let ev = &g.events()[i];
            NeighborEntry {
                neighbor: ev.other(u),
                time: ev.time,
                edge_feature_index: ev.edge_feature_index,
                event_index: i,
            }
        })
        .collect();
    Ok(HistoricalNeighborhood { root: u, t, entries })
}

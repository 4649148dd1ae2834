//! Event-stream data model for continuous-time dynamic graphs.
//!
//! A dynamic graph is a node set plus a time-sorted stream of pairwise
//! interaction events. This module provides the per-pair interaction
//! timeline (the dynamic adjacency tensor, stored sparsely), its
//! time-censored views, a historical-neighbor index, loaders for the two
//! supported on-disk formats, and an exhaustive isomorphism oracle for
//! small graphs.

mod dat;
mod graph;
mod io;
mod neighbors;
mod oracle;

pub use dat::{build_dat, hdat_at, tit_at, Dat, PairKey};
pub use graph::{DynamicGraph, Event};
pub use io::{load_events, parse_events, to_edge_list, GraphFormat};
pub use neighbors::{historical_neighbors, HistoricalNeighborhood, NeighborEntry};
pub use oracle::{
    brute_force_isomorphic_until, brute_force_pair_isomorphic_until, IsoVerdict,
    DEFAULT_ORACLE_BOUND,
};

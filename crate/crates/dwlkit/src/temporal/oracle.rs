use crate::error::{Error, Result};

use super::dat::{build_dat, Dat};
use super::graph::DynamicGraph;

/// Default node-count cap for the exhaustive search (8! bijections per check
/// stays desk-scale).
pub const DEFAULT_ORACLE_BOUND: usize = 8;

/// Outcome of an exhaustive isomorphism check.
#[derive(Clone, Debug, PartialEq)]
pub struct IsoVerdict {
    pub isomorphic: bool,
    /// A witness bijection (`witness[u]` is the image of `u`) when one exists.
    pub witness: Option<Vec<usize>>,
}

impl IsoVerdict {
    fn no() -> Self {
        IsoVerdict { isomorphic: false, witness: None }
    }

    fn yes(witness: Vec<usize>) -> Self {
        IsoVerdict { isomorphic: true, witness: Some(witness) }
    }
}

/// Exhaustively searches for a bijection under which the time-censored
/// pair timelines (timestamps strictly before `t`) of the two graphs agree,
/// comparing node features for equality when present.
pub fn brute_force_isomorphic_until(
    ga: &DynamicGraph,
    gb: &DynamicGraph,
    t: f64,
    bound: usize,
) -> Result<IsoVerdict> {
    search(ga, gb, t, bound, &[])
}

/// Same search, with the mapping pinned on a node pair: the witness must send
/// `pair_a` to `pair_b` position-wise. Used to decide whether two node pairs
/// are isomorphic until `t`.
pub fn brute_force_pair_isomorphic_until(
    ga: &DynamicGraph,
    pair_a: (usize, usize),
    gb: &DynamicGraph,
    pair_b: (usize, usize),
    t: f64,
    bound: usize,
) -> Result<IsoVerdict> {
    for &(node, g) in &[(pair_a.0, ga), (pair_a.1, ga), (pair_b.0, gb), (pair_b.1, gb)] {
        if node >= g.node_count() {
            return Err(Error::InvalidNode { id: node, count: g.node_count() });
        }
    }
    // A position-wise pin is inconsistent when one side repeats a node and
    // the other does not.
    if (pair_a.0 == pair_a.1) != (pair_b.0 == pair_b.1) {
        return Ok(IsoVerdict::no());
    }
    search(ga, gb, t, bound, &[(pair_a.0, pair_b.0), (pair_a.1, pair_b.1)])
}

fn search(
    ga: &DynamicGraph,
    gb: &DynamicGraph,
    t: f64,
    bound: usize,
    pins: &[(usize, usize)],
) -> Result<IsoVerdict> {
    let n = ga.node_count();
    if n > bound || gb.node_count() > bound {
        return Err(Error::SearchBound { nodes: n.max(gb.node_count()), bound });
    }
    if n != gb.node_count() {
        return Ok(IsoVerdict::no());
    }
    if ga.node_features().cols() != gb.node_features().cols() {
        return Ok(IsoVerdict::no());
    }
    let dat_a = build_dat(ga);
    let dat_b = build_dat(gb);
    let mut mapping = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for &(from, to) in pins {
        if mapping[from] != usize::MAX {
            if mapping[from] != to {
                return Ok(IsoVerdict::no());
            }
            continue;
        }
        if used[to] {
            return Ok(IsoVerdict::no());
        }
        mapping[from] = to;
        used[to] = true;
    }
    // Pinned assignments must already be mutually consistent.
    let pinned: Vec<usize> = (0..n).filter(|&u| mapping[u] != usize::MAX).collect();
    for (i, &u) in pinned.iter().enumerate() {
        if !node_compatible(ga, gb, u, mapping[u]) {
            return Ok(IsoVerdict::no());
        }
        for &w in &pinned[..=i] {
            if !pair_compatible(&dat_a, &dat_b, u, w, mapping[u], mapping[w], t) {
                return Ok(IsoVerdict::no());
            }
        }
    }
    let order: Vec<usize> = (0..n).filter(|&u| mapping[u] == usize::MAX).collect();
    if extend(ga, gb, &dat_a, &dat_b, t, &order, 0, &mut mapping, &mut used) {
        Ok(IsoVerdict::yes(mapping))
    } else {
        Ok(IsoVerdict::no())
    }
}

/// Depth-first extension of a partial bijection, pruning on node features
/// and on every pair timeline among already-assigned nodes.
#[allow(clippy::too_many_arguments)]
fn extend(
    ga: &DynamicGraph,
    gb: &DynamicGraph,
    dat_a: &Dat,
    dat_b: &Dat,
    t: f64,
    order: &[usize],
    depth: usize,
    mapping: &mut Vec<usize>,
    used: &mut Vec<bool>,
) -> bool {
    if depth == order.len() {
        return true;
    }
    let u = order[depth];
    for v in 0..mapping.len() {
        if used[v] || !node_compatible(ga, gb, u, v) {
            continue;
        }
        let consistent = (0..mapping.len()).all(|w| {
            mapping[w] == usize::MAX
                || pair_compatible(dat_a, dat_b, u, w, v, mapping[w], t)
        }) && pair_compatible(dat_a, dat_b, u, u, v, v, t);
        if !consistent {
            continue;
        }
        mapping[u] = v;
        used[v] = true;
        if extend(ga, gb, dat_a, dat_b, t, order, depth + 1, mapping, used) {
            return true;
        }
        mapping[u] = usize::MAX;
        used[v] = false;
    }
    false
}

fn node_compatible(ga: &DynamicGraph, gb: &DynamicGraph, u: usize, v: usize) -> bool {
    ga.node_feature_row(u) == gb.node_feature_row(v)
}

fn pair_compatible(
    dat_a: &Dat,
    dat_b: &Dat,
    u: usize,
    w: usize,
    u_img: usize,
    w_img: usize,
    t: f64,
) -> bool {
    dat_a.timestamps_before(u, w, t) == dat_b.timestamps_before(u_img, w_img, t)
}

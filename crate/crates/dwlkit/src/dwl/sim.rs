use crate::encode::mite_raw;
use crate::error::Result;
use crate::temporal::DynamicGraph;

use super::color::{tag, ColorId, ColorTable, Coloring, EntityKind, SignatureBuf};
use super::refine::GraphCtx;

/// What a node-level simulator message carries for a historical event
/// (w, t') seen from root u.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MessageFormat {
    /// The time interval t - t' of that event.
    #[default]
    PerEventInterval,
    /// The full interaction timeline of the pair (u, w) before t.
    PairHistory,
}

/// Augments round-0 node colors with each node's MITE vector relative to a
/// designated target pair.
#[derive(Clone, Copy, Debug)]
pub struct MiteTarget {
    pub pair: (usize, usize),
    /// Preserved timestamps per half.
    pub k: usize,
}

/// Options for the node-level message-passing simulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct SimOptions {
    pub rounds: usize,
    pub message: MessageFormat,
    pub mite_target: Option<MiteTarget>,
}

impl SimOptions {
    pub fn vanilla(rounds: usize) -> Self {
        SimOptions { rounds, ..Default::default() }
    }

    pub fn with_mite(rounds: usize, pair: (usize, usize), k: usize) -> Self {
        SimOptions { rounds, message: MessageFormat::default(), mite_target: Some(MiteTarget { pair, k }) }
    }
}

/// Symbolic node-level dynamic message passing: aggregation and update are
/// replaced by canonical injective hashing, so the resulting coloring is the
/// tightest partition any such architecture can achieve. Round 0 hashes node
/// features (plus the MITE vector relative to `mite_target` when set); each
/// later round hashes the previous color together with one message per
/// historical event.
pub fn dygnn_sim(
    g: &DynamicGraph,
    t: f64,
    opts: SimOptions,
    table: &mut ColorTable,
) -> Result<Coloring> {
    let ctx = GraphCtx::new(g, t);
    let n = g.node_count();
    let mut coloring = Coloring::new(EntityKind::Node, t, n);

    let mut current: Vec<ColorId> = (0..n)
        .map(|u| {
            let mut sig = SignatureBuf::with_tag(tag::SIM_INIT);
            sig.put_f64_seq(g.node_feature_row(u));
            match opts.mite_target {
                None => sig.put_u64(0),
                Some(target) => {
                    sig.put_u64(1);
                    let (a, b) = target.pair;
                    let mite = mite_raw(&ctx.dat, a, b, u, t, target.k)?;
                    sig.put_f64_seq(mite.values());
                }
            }
            Ok(table.intern(sig))
        })
        .collect::<Result<_>>()?;
    coloring.push_round(current.clone());

    for _ in 0..opts.rounds {
        let next: Vec<ColorId> = (0..n)
            .map(|u| {
                let mut items: Vec<Vec<u8>> = Vec::with_capacity(ctx.events_before[u].len());
                for &(w, time) in &ctx.events_before[u] {
                    let mut item = SignatureBuf::default();
                    item.put_color(current[w]);
                    match opts.message {
                        MessageFormat::PerEventInterval => {
                            item.put_u64(0);
                            item.put_f64(t - time);
                        }
                        MessageFormat::PairHistory => {
                            item.put_u64(1);
                            item.put_f64_seq(ctx.dat.timestamps_before(u, w, t));
                        }
                    }
                    items.push(item.into_bytes());
                }
                let mut sig = SignatureBuf::with_tag(tag::SIM_REFINE);
                sig.put_color(current[u]);
                sig.put_multiset(items);
                table.intern(sig)
            })
            .collect();
        coloring.push_round(next.clone());
        current = next;
    }
    Ok(coloring)
}

/// Which nodes may replace a member of the central pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairSimMode {
    /// Every node of the graph.
    Global,
    /// Only distinct nodes from the joint historical neighborhood of the
    /// pair's members.
    Local,
}

/// Symbolic pair-level dynamic message passing with injective hashing.
///
/// Round 0 hashes the concatenated member features. Each later round hashes
/// the previous pair color together with, per replacing node w, the colors
/// of the replaced pairs (u,w), (v,w) and w's interval timelines to both
/// members. In global mode this induces the same partitions as order-2
/// refinement; local mode trades power for cost by restricting w.
pub fn pair_dygnn_sim(
    g: &DynamicGraph,
    t: f64,
    rounds: usize,
    mode: PairSimMode,
    table: &mut ColorTable,
) -> Result<Coloring> {
    let ctx = GraphCtx::new(g, t);
    let n = g.node_count();
    let mut coloring = Coloring::new(EntityKind::Pair, t, n);

    let mut current: Vec<ColorId> = (0..n * n)
        .map(|e| {
            let (u, v) = (e / n, e % n);
            let mut sig = SignatureBuf::with_tag(tag::PAIR_SIM_INIT);
            sig.put_f64_seq(g.node_feature_row(u));
            sig.put_f64_seq(g.node_feature_row(v));
            table.intern(sig)
        })
        .collect();
    coloring.push_round(current.clone());

    let mut local_candidates = Vec::new();
    for _ in 0..rounds {
        let next: Vec<ColorId> = (0..n * n)
            .map(|e| {
                let (u, v) = (e / n, e % n);
                let candidates: &[usize] = match mode {
                    PairSimMode::Global => {
                        local_candidates = (0..n).collect();
                        &local_candidates
                    }
                    PairSimMode::Local => {
                        local_candidates = ctx.distinct_before[u]
                            .iter()
                            .chain(&ctx.distinct_before[v])
                            .copied()
                            .collect();
                        local_candidates.sort_unstable();
                        local_candidates.dedup();
                        &local_candidates
                    }
                };
                let mut items: Vec<Vec<u8>> = Vec::with_capacity(candidates.len());
                for &w in candidates {
                    let mut item = SignatureBuf::default();
                    item.put_color(current[u * n + w]);
                    item.put_color(current[v * n + w]);
                    item.put_f64_seq(&intervals_before(&ctx, u, w, t));
                    item.put_f64_seq(&intervals_before(&ctx, v, w, t));
                    items.push(item.into_bytes());
                }
                let mut sig = SignatureBuf::with_tag(tag::PAIR_SIM_REFINE);
                sig.put_color(current[e]);
                sig.put_multiset(items);
                table.intern(sig)
            })
            .collect();
        coloring.push_round(next.clone());
        current = next;
    }
    Ok(coloring)
}

fn intervals_before(ctx: &GraphCtx, u: usize, w: usize, t: f64) -> Vec<f64> {
    ctx.dat.timestamps_before(u, w, t).iter().map(|&ts| t - ts).collect()
}

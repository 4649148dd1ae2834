use crate::error::{Error, Result};
use crate::temporal::{build_dat, Dat, DynamicGraph};

use super::color::{
    same_color_multiset, tag, ColorId, ColorTable, Coloring, EntityKind, SignatureBuf, Verdict,
};

/// Round-0 labeling of refinement entities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum InitLabeling {
    /// Everyone starts equal.
    Constant,
    /// Nodes labeled by their feature rows; pairs by the concatenation of
    /// both rows. Distinct features, distinct labels.
    #[default]
    FromFeatures,
}

/// How often a neighbor contributes to the k=1 aggregation multiset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Multiplicity {
    /// Once per historical event: a neighbor with m interactions contributes
    /// m identical (color, timeline) entries.
    #[default]
    PerEvent,
    /// Once per distinct neighbor node.
    PerNeighbor,
}

/// Knobs for a refinement run.
#[derive(Clone, Copy, Debug, Default)]
pub struct RefineOptions {
    pub init: InitLabeling,
    pub multiplicity: Multiplicity,
    /// When false, the k=2 aggregation drops the pair timelines and hashes
    /// replaced-pair colors only. Exists so the property suite can prove it
    /// notices a broken refinement; leave true for faithful tests.
    pub include_histories: bool,
}

impl RefineOptions {
    pub fn new() -> Self {
        RefineOptions { init: InitLabeling::default(), multiplicity: Multiplicity::default(), include_histories: true }
    }

    pub fn with_init(init: InitLabeling) -> Self {
        RefineOptions { init, ..Self::new() }
    }
}

/// Per-graph context shared by every refinement family.
pub(crate) struct GraphCtx<'a> {
    pub g: &'a DynamicGraph,
    pub dat: Dat,
    /// Historical events per node: (neighbor, time), ascending by time.
    pub events_before: Vec<Vec<(usize, f64)>>,
    /// Distinct historical neighbors per node, sorted.
    pub distinct_before: Vec<Vec<usize>>,
}

impl<'a> GraphCtx<'a> {
    pub fn new(g: &'a DynamicGraph, t: f64) -> Self {
        let dat = build_dat(g);
        let mut events_before = vec![Vec::new(); g.node_count()];
        let mut distinct_before = vec![Vec::new(); g.node_count()];
        for u in 0..g.node_count() {
            for &i in g.incident_events(u) {
                let ev = &g.events()[i];
                if ev.time >= t {
                    break;
                }
                events_before[u].push((ev.other(u), ev.time));
            }
            let mut distinct: Vec<usize> =
                events_before[u].iter().map(|&(w, _)| w).collect();
            distinct.sort_unstable();
            distinct.dedup();
            distinct_before[u] = distinct;
        }
        GraphCtx { g, dat, events_before, distinct_before }
    }
}

fn init_signature(
    kind: EntityKind,
    init: InitLabeling,
    ctx: &GraphCtx,
    entity: usize,
) -> SignatureBuf {
    let n = ctx.g.node_count();
    match (kind, init) {
        (EntityKind::Node, InitLabeling::Constant) => SignatureBuf::with_tag(tag::NODE_INIT_CONST),
        (EntityKind::Node, InitLabeling::FromFeatures) => {
            let mut b = SignatureBuf::with_tag(tag::NODE_INIT_FEATURES);
            b.put_f64_seq(ctx.g.node_feature_row(entity));
            b
        }
        (EntityKind::Pair, InitLabeling::Constant) => SignatureBuf::with_tag(tag::PAIR_INIT_CONST),
        (EntityKind::Pair, InitLabeling::FromFeatures) => {
            let (u, v) = (entity / n, entity % n);
            let mut b = SignatureBuf::with_tag(tag::PAIR_INIT_FEATURES);
            b.put_f64_seq(ctx.g.node_feature_row(u));
            b.put_f64_seq(ctx.g.node_feature_row(v));
            b
        }
    }
}

fn node_round_signature(
    ctx: &GraphCtx,
    prev: &[ColorId],
    u: usize,
    t: f64,
    opts: &RefineOptions,
) -> SignatureBuf {
    let mut items: Vec<Vec<u8>> = Vec::new();
    let encode_entry = |w: usize| {
        let mut item = SignatureBuf::default();
        item.put_color(prev[w]);
        item.put_f64_seq(ctx.dat.timestamps_before(u, w, t));
        item.into_bytes()
    };
    match opts.multiplicity {
        Multiplicity::PerEvent => {
            for &(w, _) in &ctx.events_before[u] {
                items.push(encode_entry(w));
            }
        }
        Multiplicity::PerNeighbor => {
            for &w in &ctx.distinct_before[u] {
                items.push(encode_entry(w));
            }
        }
    }
    let mut sig = SignatureBuf::with_tag(tag::NODE_REFINE);
    sig.put_color(prev[u]);
    sig.put_multiset(items);
    sig
}

fn pair_round_signature(
    ctx: &GraphCtx,
    prev: &[ColorId],
    entity: usize,
    t: f64,
    opts: &RefineOptions,
) -> SignatureBuf {
    let n = ctx.g.node_count();
    let (u, v) = (entity / n, entity % n);
    let mut items: Vec<Vec<u8>> = Vec::with_capacity(n);
    for w in 0..n {
        // Replacing each position of (u, v) with w gives (w, v) and (u, w);
        // the item carries their colors plus w's timelines to both members.
        let mut item = SignatureBuf::default();
        item.put_color(prev[w * n + v]);
        item.put_color(prev[u * n + w]);
        if opts.include_histories {
            item.put_f64_seq(ctx.dat.timestamps_before(w, u, t));
            item.put_f64_seq(ctx.dat.timestamps_before(w, v, t));
        }
        items.push(item.into_bytes());
    }
    let mut sig = SignatureBuf::with_tag(tag::PAIR_REFINE);
    sig.put_color(prev[entity]);
    sig.put_multiset(items);
    sig
}

/// Joint color refinement over one or more graphs sharing one table.
///
/// All graphs advance in lockstep; the loop stops when the combined
/// partition stabilizes or after `max_rounds` (itself capped by the total
/// entity count, which bounds how long a partition can keep splitting).
pub fn dwl_refine_joint(
    graphs: &[&DynamicGraph],
    t: f64,
    k: usize,
    opts: RefineOptions,
    max_rounds: usize,
    table: &mut ColorTable,
) -> Result<Vec<Coloring>> {
    let kind = match k {
        1 => EntityKind::Node,
        2 => EntityKind::Pair,
        other => return Err(Error::UnsupportedOrder(other)),
    };
    let ctxs: Vec<GraphCtx> = graphs.iter().map(|g| GraphCtx::new(g, t)).collect();
    let mut colorings: Vec<Coloring> =
        ctxs.iter().map(|c| Coloring::new(kind, t, c.g.node_count())).collect();
    let entity_counts: Vec<usize> = colorings.iter().map(|c| c.entity_count()).collect();
    let total_entities: usize = entity_counts.iter().sum();

    let mut current: Vec<Vec<ColorId>> = Vec::with_capacity(ctxs.len());
    for (ctx, &count) in ctxs.iter().zip(&entity_counts) {
        let colors: Vec<ColorId> = (0..count)
            .map(|e| table.intern(init_signature(kind, opts.init, ctx, e)))
            .collect();
        current.push(colors);
    }
    for (coloring, colors) in colorings.iter_mut().zip(&current) {
        coloring.push_round(colors.clone());
    }

    let cap = max_rounds.min(total_entities.max(1));
    let mut prev_distinct = distinct_count(&current);
    for _ in 1..=cap {
        let mut next: Vec<Vec<ColorId>> = Vec::with_capacity(ctxs.len());
        for (gi, ctx) in ctxs.iter().enumerate() {
            let prev = &current[gi];
            let colors: Vec<ColorId> = (0..entity_counts[gi])
                .map(|e| {
                    let sig = match kind {
                        EntityKind::Node => node_round_signature(ctx, prev, e, t, &opts),
                        EntityKind::Pair => pair_round_signature(ctx, prev, e, t, &opts),
                    };
                    table.intern(sig)
                })
                .collect();
            next.push(colors);
        }
        for (coloring, colors) in colorings.iter_mut().zip(&next) {
            coloring.push_round(colors.clone());
        }
        let distinct = distinct_count(&next);
        current = next;
        if distinct == prev_distinct {
            // Refinement only splits classes, so an unchanged class count
            // means the partition is stable.
            break;
        }
        prev_distinct = distinct;
    }
    Ok(colorings)
}

fn distinct_count(colors: &[Vec<ColorId>]) -> usize {
    let mut all: Vec<ColorId> = colors.iter().flatten().copied().collect();
    all.sort_unstable();
    all.dedup();
    all.len()
}

/// Color refinement of a single graph. `table` may be shared with other
/// calls of the same comparison run to keep colors comparable.
pub fn dwl_refine(
    g: &DynamicGraph,
    t: f64,
    k: usize,
    init: InitLabeling,
    max_rounds: usize,
    table: &mut ColorTable,
) -> Result<Coloring> {
    let opts = RefineOptions::with_init(init);
    dwl_refine_with(g, t, k, opts, max_rounds, table)
}

/// [`dwl_refine`] with full options.
pub fn dwl_refine_with(
    g: &DynamicGraph,
    t: f64,
    k: usize,
    opts: RefineOptions,
    max_rounds: usize,
    table: &mut ColorTable,
) -> Result<Coloring> {
    Ok(dwl_refine_joint(&[g], t, k, opts, max_rounds, table)?.pop().expect("one coloring"))
}

/// Runs the order-`k` test on both graphs in parallel over a fresh shared
/// table and reports the first round whose color multisets differ.
///
/// With constant init, a node-count mismatch shows up at round 0 purely
/// because the entity multisets have different sizes.
pub fn dwl_distinguish(
    ga: &DynamicGraph,
    gb: &DynamicGraph,
    t: f64,
    k: usize,
    max_rounds: usize,
) -> Result<Verdict> {
    dwl_distinguish_with(ga, gb, t, k, RefineOptions::new(), max_rounds)
}

/// [`dwl_distinguish`] with full options.
pub fn dwl_distinguish_with(
    ga: &DynamicGraph,
    gb: &DynamicGraph,
    t: f64,
    k: usize,
    opts: RefineOptions,
    max_rounds: usize,
) -> Result<Verdict> {
    let mut table = ColorTable::new();
    let colorings = dwl_refine_joint(&[ga, gb], t, k, opts, max_rounds, &mut table)?;
    Ok(compare_rounds(&colorings[0], &colorings[1]))
}

/// First-differing-round comparison of two colorings from one joint run.
pub(crate) fn compare_rounds(a: &Coloring, b: &Coloring) -> Verdict {
    let rounds = a.rounds_run().max(b.rounds_run());
    for round in 0..=rounds {
        if !same_color_multiset(a.colors_at(round), b.colors_at(round)) {
            return Verdict::NonIsomorphic { round };
        }
    }
    Verdict::PossiblyIsomorphic { rounds }
}

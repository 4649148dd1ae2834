use crate::error::Result;
use crate::temporal::DynamicGraph;

use super::color::{tag, ColorId, ColorTable, Coloring, EntityKind, SignatureBuf, Verdict};
use super::refine::{compare_rounds, InitLabeling};

/// Classic 1-WL color refinement on the static multigraph obtained by
/// dropping timestamps: every event is an edge, multiplicities kept.
pub fn static_wl1(
    g: &DynamicGraph,
    init: InitLabeling,
    rounds: usize,
    table: &mut ColorTable,
) -> Result<Coloring> {
    Ok(static_wl1_joint(&[g], init, rounds, table)?.pop().expect("one coloring"))
}

/// Parallel static 1-WL on two graphs; first differing color multiset round.
pub fn static_wl1_distinguish(
    ga: &DynamicGraph,
    gb: &DynamicGraph,
    init: InitLabeling,
    rounds: usize,
) -> Result<Verdict> {
    let mut table = ColorTable::new();
    let colorings = static_wl1_joint(&[ga, gb], init, rounds, &mut table)?;
    Ok(compare_rounds(&colorings[0], &colorings[1]))
}

fn static_wl1_joint(
    graphs: &[&DynamicGraph],
    init: InitLabeling,
    rounds: usize,
    table: &mut ColorTable,
) -> Result<Vec<Coloring>> {
    let mut colorings: Vec<Coloring> = Vec::with_capacity(graphs.len());
    let mut current: Vec<Vec<ColorId>> = Vec::with_capacity(graphs.len());
    for g in graphs {
        let colors: Vec<ColorId> = (0..g.node_count())
            .map(|u| {
                let mut sig = SignatureBuf::with_tag(tag::STATIC_INIT);
                match init {
                    InitLabeling::Constant => sig.put_u64(0),
                    InitLabeling::FromFeatures => {
                        sig.put_u64(1);
                        sig.put_f64_seq(g.node_feature_row(u));
                    }
                }
                table.intern(sig)
            })
            .collect();
        let mut coloring = Coloring::new(EntityKind::Node, f64::INFINITY, g.node_count());
        coloring.push_round(colors.clone());
        colorings.push(coloring);
        current.push(colors);
    }

    let total: usize = graphs.iter().map(|g| g.node_count()).sum();
    let cap = rounds.min(total.max(1));
    let mut prev_distinct = distinct(&current);
    for _ in 1..=cap {
        let mut next = Vec::with_capacity(graphs.len());
        for (gi, g) in graphs.iter().enumerate() {
            let prev = &current[gi];
            let colors: Vec<ColorId> = (0..g.node_count())
                .map(|u| {
                    let mut items: Vec<Vec<u8>> = g
                        .incident_events(u)
                        .iter()
                        .map(|&i| {
                            let w = g.events()[i].other(u);
                            let mut item = SignatureBuf::default();
                            item.put_color(prev[w]);
                            item.into_bytes()
                        })
                        .collect();
                    items.sort_unstable();
                    let mut sig = SignatureBuf::with_tag(tag::STATIC_REFINE);
                    sig.put_color(prev[u]);
                    sig.put_multiset(items);
                    table.intern(sig)
                })
                .collect();
            next.push(colors);
        }
        for (coloring, colors) in colorings.iter_mut().zip(&next) {
            coloring.push_round(colors.clone());
        }
        let d = distinct(&next);
        current = next;
        if d == prev_distinct {
            break;
        }
        prev_distinct = d;
    }
    Ok(colorings)
}

fn distinct(colors: &[Vec<ColorId>]) -> usize {
    let mut all: Vec<ColorId> = colors.iter().flatten().copied().collect();
    all.sort_unstable();
    all.dedup();
    all.len()
}

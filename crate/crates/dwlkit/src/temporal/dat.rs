use std::collections::HashMap;

use super::graph::DynamicGraph;

/// Unordered node pair used as a timeline key.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairKey(usize, usize);

impl PairKey {
    pub fn new(a: usize, b: usize) -> Self {
        if a <= b {
            PairKey(a, b)
        } else {
            PairKey(b, a)
        }
    }
}

/// Per-pair sorted interaction timestamps — the dynamic adjacency tensor,
/// stored sparsely. Conceptually every pair holds a length-`T` sequence
/// padded with `∞`; only the finite timestamps are stored and the padded
/// views are materialized on demand.
#[derive(Clone, Debug, Default)]
pub struct Dat {
    pairs: HashMap<PairKey, Vec<f64>>,
    max_len: usize,
}

impl Dat {
    /// Maximum interaction count over all pairs (the padded length `T`).
    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    /// Stored (finite) timestamps of a pair, ascending; empty if absent.
    pub fn timestamps(&self, u: usize, v: usize) -> &[f64] {
        self.pairs.get(&PairKey::new(u, v)).map_or(&[], |v| v.as_slice())
    }

    /// Timestamps of a pair strictly before `t`, ascending. Because stored
    /// sequences are sorted, this is the finite prefix of the censored view.
    pub fn timestamps_before(&self, u: usize, v: usize, t: f64) -> &[f64] {
        let ts = self.timestamps(u, v);
        let cut = ts.partition_point(|&x| x < t);
        &ts[..cut]
    }

    /// Number of interactions of a pair strictly before `t`.
    pub fn count_before(&self, u: usize, v: usize, t: f64) -> usize {
        self.timestamps_before(u, v, t).len()
    }

    pub fn pair_keys(&self) -> impl Iterator<Item = &PairKey> {
        self.pairs.keys()
    }
}

/// Collects every event's timestamp under its unordered pair; sequences stay
/// ascending because the event stream is time-sorted. Repeat interactions at
/// the same timestamp are kept with multiplicity.
pub fn build_dat(g: &DynamicGraph) -> Dat {
    let mut pairs: HashMap<PairKey, Vec<f64>> = HashMap::new();
    for ev in g.events() {
        pairs.entry(PairKey::new(ev.src, ev.dst)).or_default().push(ev.time);
    }
    let max_len = pairs.values().map(Vec::len).max().unwrap_or(0);
    Dat { pairs, max_len }
}

/// Time-censored timeline of a pair: length `T`, entry `k` is the stored
/// timestamp when it is strictly before `t` and `∞` otherwise.
pub fn hdat_at(dat: &Dat, u: usize, v: usize, t: f64) -> Vec<f64> {
    let finite = dat.timestamps_before(u, v, t);
    let mut out = vec![f64::INFINITY; dat.max_len()];
    out[..finite.len()].copy_from_slice(finite);
    out
}

/// Interval view of a pair at `t`: length `T`, entry `k` is `t - timestamp`
/// where the censored timeline is finite and `∞` otherwise.
pub fn tit_at(dat: &Dat, u: usize, v: usize, t: f64) -> Vec<f64> {
    let finite = dat.timestamps_before(u, v, t);
    let mut out = vec![f64::INFINITY; dat.max_len()];
    for (slot, ts) in out.iter_mut().zip(finite) {
        *slot = t - ts;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::temporal::Event;

    fn graph(events: &[(usize, usize, f64)], n: usize) -> DynamicGraph {
        DynamicGraph::from_events(
            n,
            events.iter().map(|&(u, v, t)| Event::new(u, v, t)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn build_collects_pairs() {
        let g = graph(&[(1, 2, 5.0), (1, 2, 7.0), (2, 3, 6.0)], 4);
        let dat = build_dat(&g);
        assert_eq!(dat.timestamps(1, 2), &[5.0, 7.0]);
        assert_eq!(dat.timestamps(2, 1), &[5.0, 7.0]);
        assert_eq!(dat.timestamps(2, 3), &[6.0]);
        assert_eq!(dat.max_len(), 2);
        assert_eq!(dat.pair_count(), 2);
    }

    #[test]
    fn empty_graph_gives_empty_dat() {
        let dat = build_dat(&graph(&[], 0));
        assert_eq!(dat.max_len(), 0);
        assert_eq!(dat.pair_count(), 0);
    }

    #[test]
    fn event_count_preserved_over_pairs() {
        // Counting oracle: the per-pair lengths must sum to the raw event count.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let events: Vec<Event> = (0..50)
            .map(|_| {
                Event::new(
                    rng.random_range(0..6),
                    rng.random_range(0..6),
                    rng.random_range(0..1000) as f64,
                )
            })
            .collect();
        let g = DynamicGraph::from_events(6, events).unwrap();
        let dat = build_dat(&g);
        let total: usize =
            dat.pair_keys().map(|&PairKey(a, b)| dat.timestamps(a, b).len()).sum();
        assert_eq!(total, 50);
    }

    #[test]
    fn hdat_censors_strictly() {
        let g = graph(&[(1, 2, 5.0), (1, 2, 7.0), (2, 3, 6.0)], 4);
        let dat = build_dat(&g);
        assert_eq!(hdat_at(&dat, 1, 2, 6.5), vec![5.0, f64::INFINITY]);
        // Equal timestamp is censored: the comparison is strict.
        assert_eq!(hdat_at(&dat, 1, 2, 7.0), vec![5.0, f64::INFINITY]);
        // Absent pair: all padding.
        assert_eq!(hdat_at(&dat, 0, 3, 6.5), vec![f64::INFINITY, f64::INFINITY]);
    }

    #[test]
    fn tit_matches_hdat_intervals() {
        let g = graph(&[(1, 2, 5.0), (1, 2, 7.0)], 3);
        let dat = build_dat(&g);
        assert_eq!(tit_at(&dat, 1, 2, 6.5), vec![1.5, f64::INFINITY]);
        assert_eq!(tit_at(&dat, 0, 2, 6.5), vec![f64::INFINITY, f64::INFINITY]);
    }
}

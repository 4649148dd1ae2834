use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::temporal::{DynamicGraph, Event};

/// Times are drawn on a dyadic grid (multiples of 1/1024) so that interval
/// arithmetic on them is exact in 64-bit floats.
const TIME_GRID: f64 = 1024.0;

fn grid_time(rng: &mut ChaCha8Rng, t_max: f64) -> f64 {
    let cells = (t_max * TIME_GRID) as u64;
    rng.random_range(1..cells.max(2)) as f64 / TIME_GRID
}

/// `m` events with endpoints uniform over distinct node pairs and times
/// uniform on a dyadic grid in `(0, t_max)`, sorted by time. Featureless.
pub fn random_dynamic_graph(n: usize, m: usize, t_max: f64, seed: u64) -> DynamicGraph {
    assert!(n >= 1, "need at least one node");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let events: Vec<Event> = (0..m)
        .map(|_| {
            let src = rng.random_range(0..n);
            let dst = loop {
                let v = rng.random_range(0..n);
                if v != src || n == 1 {
                    break v;
                }
            };
            Event::new(src, dst, grid_time(&mut rng, t_max))
        })
        .collect();
    DynamicGraph::from_events(n, events).expect("generated events are valid")
}

/// Plants `count` triangles on `n` nodes: each picks three distinct nodes
/// and emits both wedge edges before the closing edge, at consecutive grid
/// times. The closing edge is therefore always predictable from the recent
/// common neighbor.
pub fn triangle_stream(n: usize, count: usize, seed: u64) -> DynamicGraph {
    assert!(n >= 3, "triangles need at least three nodes");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut events = Vec::with_capacity(count * 3);
    for i in 0..count {
        let a = rng.random_range(0..n);
        let b = loop {
            let v = rng.random_range(0..n);
            if v != a {
                break v;
            }
        };
        let c = loop {
            let v = rng.random_range(0..n);
            if v != a && v != b {
                break v;
            }
        };
        let base = (3 * i + 1) as f64;
        events.push(Event::new(a, b, base));
        events.push(Event::new(b, c, base + 1.0));
        events.push(Event::new(a, c, base + 2.0));
    }
    DynamicGraph::from_events(n, events).expect("generated events are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::temporal::build_dat;

    #[test]
    fn empty_stream_for_zero_events() {
        let g = random_dynamic_graph(4, 0, 10.0, 1);
        assert_eq!(g.events().len(), 0);
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        let a = random_dynamic_graph(6, 12, 50.0, 9);
        let b = random_dynamic_graph(6, 12, 50.0, 9);
        assert_eq!(a.events(), b.events());
        assert_ne!(a.events(), random_dynamic_graph(6, 12, 50.0, 10).events());
    }

    #[test]
    fn no_self_loops_and_times_in_range() {
        let g = random_dynamic_graph(5, 100, 20.0, 3);
        for ev in g.events() {
            assert_ne!(ev.src, ev.dst);
            assert!(ev.time > 0.0 && ev.time < 20.0);
        }
    }

    #[test]
    fn closing_edges_are_preceded_by_both_wedges() {
        // Scan-check: before every third event of a triple, both wedge
        // events must already have happened.
        let g = triangle_stream(12, 40, 5);
        let dat = build_dat(&g);
        for chunk_start in (0..g.events().len()).step_by(3) {
            let close = &g.events()[chunk_start + 2];
            let wedge1 = &g.events()[chunk_start];
            let wedge2 = &g.events()[chunk_start + 1];
            assert!(wedge1.time < close.time && wedge2.time < close.time);
            // The common neighbor interacted with both endpoints before the
            // closing time.
            let b = wedge1.dst;
            assert!(dat.count_before(b, close.src, close.time) >= 1);
            assert!(dat.count_before(b, close.dst, close.time) >= 1);
        }
    }
}

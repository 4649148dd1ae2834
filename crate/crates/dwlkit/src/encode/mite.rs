use crate::error::{Error, Result};
use crate::temporal::Dat;

/// Multi-interacted time encoding of a candidate node w with respect to a
/// target pair (u, v): the log-normalized recent interaction intervals of
/// (w, u) followed by those of (w, v), each half truncated to the K most
/// recent and zero-padded.
///
/// Real intervals are strictly positive before the transform, so
/// `ln(1 + interval) > 0` and the zero padding is unambiguous.
#[derive(Clone, Debug, PartialEq)]
pub struct MiteVector {
    k: usize,
    values: Vec<f64>,
}

impl MiteVector {
    /// Preserved timestamps per half.
    pub fn k(&self) -> usize {
        self.k
    }

    /// The 2K encoded values; first half (w,u), second half (w,v).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn first_half(&self) -> &[f64] {
        &self.values[..self.k]
    }

    pub fn second_half(&self) -> &[f64] {
        &self.values[self.k..]
    }

    /// Count of non-padding slots per half.
    pub fn nonzero_counts(&self) -> (usize, usize) {
        let count = |half: &[f64]| half.iter().filter(|&&v| v != 0.0).count();
        (count(self.first_half()), count(self.second_half()))
    }
}

/// Interval transform applied to every preserved interval.
fn normalize(interval: f64) -> f64 {
    interval.ln_1p()
}

fn fill_half(out: &mut [f64], dat: &Dat, w: usize, x: usize, t: f64) {
    let ts = dat.timestamps_before(w, x, t);
    // Most recent K, kept oldest-first to match the timeline sort order.
    let keep = &ts[ts.len().saturating_sub(out.len())..];
    for (slot, &stamp) in out.iter_mut().zip(keep) {
        *slot = normalize(t - stamp);
    }
}

/// Raw (pre-projection) MITE of node `w` with respect to the pair `(u, v)`
/// at time `t`, preserving `k` timestamps per half.
pub fn mite_raw(dat: &Dat, u: usize, v: usize, w: usize, t: f64, k: usize) -> Result<MiteVector> {
    if k == 0 {
        return Err(Error::invalid("mite requires k >= 1"));
    }
    if !t.is_finite() {
        return Err(Error::invalid("mite requires a finite query time"));
    }
    let mut values = vec![0.0; 2 * k];
    fill_half(&mut values[..k], dat, w, u, t);
    fill_half(&mut values[k..], dat, w, v, t);
    Ok(MiteVector { k, values })
}

/// Neighbor co-occurrence encoding: how often `w` interacted with `u` and
/// with `v` before `t`. This is the count-degenerate case of MITE: for K at
/// least both counts, it equals the per-half non-padding counts.
pub fn ncoe(dat: &Dat, u: usize, v: usize, w: usize, t: f64) -> (usize, usize) {
    (dat.count_before(w, u, t), dat.count_before(w, v, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::temporal::{build_dat, DynamicGraph, Event};

    fn graph(events: &[(usize, usize, f64)], n: usize) -> Dat {
        build_dat(
            &DynamicGraph::from_events(
                n,
                events.iter().map(|&(u, v, t)| Event::new(u, v, t)).collect(),
            )
            .unwrap(),
        )
    }

    #[test]
    fn common_neighbor_encodes_both_intervals() {
        // b (node 1) interacts with a (0) at t1=1 and with c (2) at t2=2;
        // at t5=5 its encoding w.r.t. (a, c) is [ln(1+4), 0.. | ln(1+3), 0..].
        let dat = graph(&[(1, 0, 1.0), (1, 2, 2.0)], 3);
        let m = mite_raw(&dat, 0, 2, 1, 5.0, 3).unwrap();
        assert_eq!(m.first_half(), &[(4.0f64).ln_1p(), 0.0, 0.0]);
        assert_eq!(m.second_half(), &[(3.0f64).ln_1p(), 0.0, 0.0]);
    }

    #[test]
    fn unrelated_node_is_all_zero() {
        let dat = graph(&[(0, 1, 1.0)], 4);
        let m = mite_raw(&dat, 0, 1, 3, 5.0, 2).unwrap();
        assert_eq!(m.values(), &[0.0; 4]);
    }

    #[test]
    fn truncation_keeps_most_recent_oldest_first() {
        // (w,u) interactions at 1, 2, 3; K=2 at t=4 keeps timestamps {2, 3},
        // encoded oldest-first as intervals [2, 1].
        let dat = graph(&[(1, 0, 1.0), (1, 0, 2.0), (1, 0, 3.0)], 2);
        let m = mite_raw(&dat, 0, 0, 1, 4.0, 2).unwrap();
        assert_eq!(m.first_half(), &[(2.0f64).ln_1p(), (1.0f64).ln_1p()]);
    }

    #[test]
    fn swapping_the_pair_swaps_the_halves() {
        let dat = graph(&[(2, 0, 1.0), (2, 1, 3.0), (2, 1, 4.0)], 3);
        let uv = mite_raw(&dat, 0, 1, 2, 5.0, 3).unwrap();
        let vu = mite_raw(&dat, 1, 0, 2, 5.0, 3).unwrap();
        assert_eq!(uv.first_half(), vu.second_half());
        assert_eq!(uv.second_half(), vu.first_half());
    }

    #[test]
    fn ncoe_counts_interactions() {
        // u's history {a, b, a}, v's history {b, b, a, c}: the counts of
        // a, b, c w.r.t. (u, v) are [2,1], [1,2], [0,1].
        // Nodes: u=0, v=1, a=2, b=3, c=4.
        let dat = graph(
            &[
                (0, 2, 1.0),
                (0, 3, 2.0),
                (0, 2, 3.0),
                (1, 3, 4.0),
                (1, 3, 5.0),
                (1, 2, 6.0),
                (1, 4, 7.0),
            ],
            5,
        );
        assert_eq!(ncoe(&dat, 0, 1, 2, 10.0), (2, 1));
        assert_eq!(ncoe(&dat, 0, 1, 3, 10.0), (1, 2));
        assert_eq!(ncoe(&dat, 0, 1, 4, 10.0), (0, 1));
        assert_eq!(ncoe(&dat, 0, 1, 0, 0.5), (0, 0));
    }

    #[test]
    fn ncoe_equals_mite_nonzero_counts_for_large_k() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let events: Vec<(usize, usize, f64)> = (0..60)
            .map(|_| {
                (
                    rng.random_range(0..5),
                    rng.random_range(0..5),
                    rng.random_range(1..1000) as f64,
                )
            })
            .collect();
        let dat = graph(&events, 5);
        for u in 0..5 {
            for v in 0..5 {
                for w in 0..5 {
                    let counts = ncoe(&dat, u, v, w, 500.0);
                    let m = mite_raw(&dat, u, v, w, 500.0, 64).unwrap();
                    assert_eq!(m.nonzero_counts(), counts);
                }
            }
        }
    }
}

use crate::error::Result;
use crate::matrix::Matrix;
use crate::temporal::{historical_neighbors, Dat, DynamicGraph};

use super::mite::mite_raw;
use super::time::{time_encode, TimeEncoding};

/// The four per-neighbor encoding matrices of a target pair's joint
/// historical neighborhood. All matrices share row count `s`; rows list the
/// first member's neighborhood (ascending by time) followed by the second
/// member's. A node appearing in both neighborhoods keeps both rows.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodingBundle {
    /// Combined node encodings `[X_w || X_u || X_v]`, `s × 3·d_N`.
    pub x_c: Matrix,
    /// Edge features of each neighborhood event, `s × d_E`.
    pub x_e: Matrix,
    /// Time encodings of the intervals `t - t'`, `s × d_T`.
    pub x_t: Matrix,
    /// Raw MITE rows of each neighbor w.r.t. the pair, `s × 2K`.
    pub x_m: Matrix,
    pub s: usize,
}

/// Builds the encoding bundle of `pair` at time `t`, truncating each
/// member's neighborhood to the `limit` most recent events and preserving
/// `k` timestamps per MITE half. An empty joint neighborhood yields a legal
/// zero-row bundle.
pub fn build_encoding_bundle(
    g: &DynamicGraph,
    dat: &Dat,
    pair: (usize, usize),
    t: f64,
    limit: usize,
    k: usize,
    enc: &TimeEncoding,
) -> Result<EncodingBundle> {
    let (u, v) = pair;
    let nu = historical_neighbors(g, u, t, limit)?;
    let nv = historical_neighbors(g, v, t, limit)?;
    let s = nu.entries.len() + nv.entries.len();

    let d_n = g.node_features().cols();
    let d_e = g.edge_features().cols();
    let mut x_c = Matrix::zeros(s, 3 * d_n);
    let mut x_e = Matrix::zeros(s, d_e);
    let mut x_t = Matrix::zeros(s, enc.dim());
    let mut x_m = Matrix::zeros(s, 2 * k);

    for (row, entry) in nu.entries.iter().chain(&nv.entries).enumerate() {
        if d_n > 0 {
            let dst = x_c.row_mut(row);
            dst[..d_n].copy_from_slice(g.node_feature_row(entry.neighbor));
            dst[d_n..2 * d_n].copy_from_slice(g.node_feature_row(u));
            dst[2 * d_n..].copy_from_slice(g.node_feature_row(v));
        }
        if d_e > 0 {
            if let Some(idx) = entry.edge_feature_index {
                x_e.row_mut(row).copy_from_slice(g.edge_features().row(idx));
            }
        }
        x_t.row_mut(row).copy_from_slice(&time_encode(t - entry.time, enc));
        let mite = mite_raw(dat, u, v, entry.neighbor, t, k)?;
        x_m.row_mut(row).copy_from_slice(mite.values());
    }
    Ok(EncodingBundle { x_c, x_e, x_t, x_m, s })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::temporal::{build_dat, Event};

    #[test]
    fn empty_neighborhoods_give_zero_rows() {
        let g = DynamicGraph::from_events(2, vec![]).unwrap();
        let dat = build_dat(&g);
        let enc = TimeEncoding::geometric(4).unwrap();
        let b = build_encoding_bundle(&g, &dat, (0, 1), 5.0, 8, 2, &enc).unwrap();
        assert_eq!(b.s, 0);
        assert_eq!(b.x_m.rows(), 0);
    }

    #[test]
    fn featureless_graph_gives_zero_combined_encoding() {
        let g = DynamicGraph::with_zero_features(3, vec![Event::new(0, 1, 1.0)], 2, 0).unwrap();
        let dat = build_dat(&g);
        let enc = TimeEncoding::geometric(4).unwrap();
        let b = build_encoding_bundle(&g, &dat, (0, 1), 2.0, 8, 2, &enc).unwrap();
        assert_eq!(b.x_c.cols(), 6);
        assert!(b.x_c.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mutual_event_encodes_interval_on_opposite_halves() {
        let g = DynamicGraph::from_events(2, vec![Event::new(0, 1, 1.0)]).unwrap();
        let dat = build_dat(&g);
        let enc = TimeEncoding::geometric(4).unwrap();
        let b = build_encoding_bundle(&g, &dat, (0, 1), 2.0, 8, 2, &enc).unwrap();
        assert_eq!(b.s, 2);
        let g1 = (1.0f64).ln_1p();
        // Row 0: neighbor of u=0 is w=1; (w,u) interval 1.0 in the first
        // half, (w,v) = (1,1) empty second half.
        assert_eq!(b.x_m.row(0), &[g1, 0.0, 0.0, 0.0]);
        // Row 1: neighbor of v=1 is w=0; first half (0,0) empty, second
        // half (0,1) interval 1.0.
        assert_eq!(b.x_m.row(1), &[0.0, 0.0, g1, 0.0]);
    }

    #[test]
    fn bundles_are_deterministic() {
        let g = crate::harness::random_dynamic_graph(6, 30, 100.0, 5);
        let dat = build_dat(&g);
        let enc = TimeEncoding::geometric(6).unwrap();
        let a = build_encoding_bundle(&g, &dat, (0, 1), 80.0, 4, 3, &enc).unwrap();
        let b = build_encoding_bundle(&g, &dat, (0, 1), 80.0, 4, 3, &enc).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rows_follow_time_then_member_order() {
        let g = DynamicGraph::from_events(
            4,
            vec![Event::new(0, 2, 3.0), Event::new(0, 3, 1.0), Event::new(1, 3, 2.0)],
        )
        .unwrap();
        let dat = build_dat(&g);
        let enc = TimeEncoding::geometric(2).unwrap();
        let b = build_encoding_bundle(&g, &dat, (0, 1), 5.0, 8, 1, &enc).unwrap();
        assert_eq!(b.s, 3);
        // u=0 neighborhood ascending: (3, t=1), (2, t=3); then v=1: (3, t=2).
        let scale = 1.0f64; // d_T = 2 → sqrt(2/2) = 1
        assert!((b.x_t.get(0, 0) - scale * (4.0f64).cos()).abs() < 1e-15);
        assert!((b.x_t.get(1, 0) - scale * (2.0f64).cos()).abs() < 1e-15);
        assert!((b.x_t.get(2, 0) - scale * (3.0f64).cos()).abs() < 1e-15);
    }
}

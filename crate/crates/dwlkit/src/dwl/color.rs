use std::collections::HashMap;

use serde::{Deserialize, Serialize};

/// Dense color id assigned by a [`ColorTable`].
pub type ColorId = u64;

/// Canonical byte encoding of a refinement signature.
///
/// Every variable-length component is length-prefixed and every variant is
/// tagged, so distinct structured signatures never serialize to the same
/// bytes. Timestamps are encoded at full 64-bit precision via their bit
/// pattern: the tests are exact, no tolerance.
#[derive(Default)]
pub struct SignatureBuf {
    bytes: Vec<u8>,
}

impl SignatureBuf {
    pub fn with_tag(tag: u8) -> Self {
        let mut b = SignatureBuf::default();
        b.bytes.push(tag);
        b
    }

    pub fn put_u64(&mut self, v: u64) {
        self.bytes.extend_from_slice(&v.to_le_bytes());
    }

    pub fn put_color(&mut self, c: ColorId) {
        self.put_u64(c);
    }

    pub fn put_f64(&mut self, v: f64) {
        self.put_u64(v.to_bits());
    }

    pub fn put_f64_seq(&mut self, s: &[f64]) {
        self.put_u64(s.len() as u64);
        for &v in s {
            self.put_f64(v);
        }
    }

    /// Appends a multiset of already-encoded items in canonical (sorted)
    /// order, each length-prefixed.
    pub fn put_multiset(&mut self, mut items: Vec<Vec<u8>>) {
        items.sort_unstable();
        self.put_u64(items.len() as u64);
        for item in items {
            self.put_u64(item.len() as u64);
            self.bytes.extend_from_slice(&item);
        }
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }
}

/// Signature variant tags. Distinct refinement families never share ids for
/// structurally different signatures.
pub(crate) mod tag {
    pub const NODE_INIT_CONST: u8 = 0x01;
    pub const NODE_INIT_FEATURES: u8 = 0x02;
    pub const PAIR_INIT_CONST: u8 = 0x03;
    pub const PAIR_INIT_FEATURES: u8 = 0x04;
    pub const NODE_REFINE: u8 = 0x05;
    pub const PAIR_REFINE: u8 = 0x06;
    pub const SIM_INIT: u8 = 0x07;
    pub const SIM_REFINE: u8 = 0x08;
    pub const PAIR_SIM_INIT: u8 = 0x09;
    pub const PAIR_SIM_REFINE: u8 = 0x0a;
    pub const STATIC_INIT: u8 = 0x0b;
    pub const STATIC_REFINE: u8 = 0x0c;
}

/// Injective signature-to-color interner.
///
/// Ids are dense, deterministic given insertion order, and shared between
/// the graphs of one comparison run so that colors stay comparable across
/// them. Ids from different tables are never comparable.
#[derive(Default)]
pub struct ColorTable {
    map: HashMap<Vec<u8>, ColorId>,
}

impl ColorTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, sig: SignatureBuf) -> ColorId {
        let next = self.map.len() as ColorId;
        *self.map.entry(sig.into_bytes()).or_insert(next)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// What a coloring's entities are.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EntityKind {
    Node,
    /// Ordered node pairs, entity id `u * n + v`.
    Pair,
}

/// Per-round colors for one graph's entities at a fixed query time.
#[derive(Clone, Debug)]
pub struct Coloring {
    kind: EntityKind,
    t: f64,
    node_count: usize,
    /// `rounds[j][entity]`; round 0 is the initial labeling.
    rounds: Vec<Vec<ColorId>>,
}

impl Coloring {
    pub(crate) fn new(kind: EntityKind, t: f64, node_count: usize) -> Self {
        Coloring { kind, t, node_count, rounds: Vec::new() }
    }

    pub(crate) fn push_round(&mut self, colors: Vec<ColorId>) {
        self.rounds.push(colors);
    }

    pub fn kind(&self) -> EntityKind {
        self.kind
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn entity_count(&self) -> usize {
        match self.kind {
            EntityKind::Node => self.node_count,
            EntityKind::Pair => self.node_count * self.node_count,
        }
    }

    /// Number of refinement rounds executed (round 0 excluded).
    pub fn rounds_run(&self) -> usize {
        self.rounds.len().saturating_sub(1)
    }

    /// Colors at a round. Refinement stops once the partition stabilizes, and
    /// the partition no longer changes afterwards, so queries beyond the last
    /// computed round clamp to it.
    pub fn colors_at(&self, round: usize) -> &[ColorId] {
        let r = round.min(self.rounds.len() - 1);
        &self.rounds[r]
    }

    pub fn node_color(&self, round: usize, u: usize) -> ColorId {
        debug_assert_eq!(self.kind, EntityKind::Node);
        self.colors_at(round)[u]
    }

    pub fn pair_color(&self, round: usize, u: usize, v: usize) -> ColorId {
        debug_assert_eq!(self.kind, EntityKind::Pair);
        self.colors_at(round)[u * self.node_count + v]
    }

    /// Color-class sizes at a round, largest first.
    pub fn class_sizes(&self, round: usize) -> Vec<usize> {
        let mut counts: HashMap<ColorId, usize> = HashMap::new();
        for &c in self.colors_at(round) {
            *counts.entry(c).or_insert(0) += 1;
        }
        let mut sizes: Vec<usize> = counts.into_values().collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }
}

/// Distinguishing verdict of a parallel refinement run on two graphs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// The per-round color multisets first differ at `round` (multisets agree
    /// at all earlier rounds).
    NonIsomorphic { round: usize },
    /// No difference found through `rounds` refinement rounds.
    PossiblyIsomorphic { rounds: usize },
}

impl Verdict {
    pub fn refuted(&self) -> bool {
        matches!(self, Verdict::NonIsomorphic { .. })
    }
}

/// True when `a(x) == a(y)` implies `b(x) == b(y)` over aligned entity
/// slices, i.e. partition `a` refines (or equals) partition `b`.
pub fn refines(a: &[ColorId], b: &[ColorId]) -> bool {
    assert_eq!(a.len(), b.len(), "partition length mismatch");
    let mut image: HashMap<ColorId, ColorId> = HashMap::new();
    for (&ca, &cb) in a.iter().zip(b) {
        match image.insert(ca, cb) {
            Some(prev) if prev != cb => return false,
            _ => {}
        }
    }
    true
}

/// True when the two colorings induce the same partition.
pub fn same_partition(a: &[ColorId], b: &[ColorId]) -> bool {
    refines(a, b) && refines(b, a)
}

/// Multiset equality of two color slices. Only meaningful for colorings
/// produced by the same joint run (ids are table-local).
pub fn same_color_multiset(a: &[ColorId], b: &[ColorId]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut counts: HashMap<ColorId, isize> = HashMap::new();
    for &c in a {
        *counts.entry(c).or_insert(0) += 1;
    }
    for &c in b {
        *counts.entry(c).or_insert(0) -= 1;
    }
    counts.values().all(|&v| v == 0)
}

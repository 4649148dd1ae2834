//! Dynamic Weisfeiler-Lehman color refinement and symbolic simulators.
//!
//! The order-1 test refines node colors from neighbor colors plus the full
//! pair interaction timelines before the query time; the order-2 test
//! refines ordered-pair colors by replacing each member with every node and
//! hashing the replaced pairs' colors plus their timelines. All hashing is
//! injective interning in a [`ColorTable`] shared across the graphs of one
//! comparison run, so equal colors mean equal signatures — exactly.

mod color;
mod refine;
mod sim;
mod static_wl;

pub use color::{
    refines, same_color_multiset, same_partition, ColorId, ColorTable, Coloring, EntityKind,
    SignatureBuf, Verdict,
};
pub use refine::{
    dwl_distinguish, dwl_distinguish_with, dwl_refine, dwl_refine_joint, dwl_refine_with,
    InitLabeling, Multiplicity, RefineOptions,
};
pub use sim::{dygnn_sim, pair_dygnn_sim, MessageFormat, MiteTarget, PairSimMode, SimOptions};
pub use static_wl::{static_wl1, static_wl1_distinguish};

//! Experiment orchestration: chronological splits with inductive masking,
//! ranking metrics, synthetic graph generators and the executable
//! expressiveness property suite.

mod generate;
mod metrics;
mod split;
mod suite;

pub use generate::{random_dynamic_graph, triangle_stream};
pub use metrics::{average_precision, roc_auc, MetricsReport};
pub use split::{chronological_split, inductive_mask, training_graph, Section, SplitSpec};
pub use suite::{
    expressiveness_suite, mirrored_wedges, mirrored_wedges_at, Counterexample, Mutation,
    PropertyResult, SuiteConfig, SuiteReport,
};

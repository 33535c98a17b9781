//! Toolkit for mining library-migration rules from the dependency histories
//! of many software projects, curating them with a seed/banned knowledge
//! base, and deriving migration graphs, categories, usage trends and
//! statistical summaries.

pub mod graph;
pub mod ingest;
pub mod knowledge;
pub mod loglens;
pub mod mining;
pub mod model;
pub mod stats;
pub mod svg;
pub mod synth;
pub mod trends;

pub use model::{
    DependencyHistory, LibraryId, Migration, MigrationRule, ProjectId, RuleStats, Snapshot, Verdict,
};

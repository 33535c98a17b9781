//! Front-ends that turn manifests, snapshot logs and source imports into
//! [`DependencyHistory`](crate::model::DependencyHistory) values, plus the
//! couple-sampling scheme that decides which version pairs get diffed.

mod couples;
mod imports;
mod pom;
mod snaplog;
mod version;

pub use couples::{sample_couples, CoupleList};
pub use imports::{
    parse_library_index, resolve_libraries, scan_imports, Ambiguity, LibraryIndex, Resolution,
};
pub use pom::{parse_pom, PomParse};
pub use snaplog::{parse_snapshot_log, write_snapshot_log};
pub use version::compare_versions;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("xml error: {0}")]
    Xml(String),
    #[error("missing top-level {0} element")]
    MissingCoordinate(&'static str),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate snapshot {project} index {index}")]
    DuplicateSnapshot {
        line: usize,
        project: String,
        index: u32,
    },
    #[error("history has fewer than 2 snapshots")]
    TooShort,
    #[error("invalid index pattern {0:?}: '*' may only appear once, at the end")]
    BadPattern(String),
}

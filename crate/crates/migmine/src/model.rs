//! Core domain types shared by every stage of the mining pipeline.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("malformed coordinate {0:?}: expected \"group:artifact\" with non-empty parts")]
    MalformedCoordinate(String),
    #[error("empty {0} field")]
    EmptyField(&'static str),
    #[error("field {0} must not contain ':'")]
    SeparatorInField(&'static str),
    #[error("snapshot indices must start at 1 and increase strictly")]
    BadSnapshotIndex,
    #[error("snapshot timestamps must be non-decreasing")]
    TimestampsNotOrdered,
}

/// A library coordinate: owner namespace plus the unique name within it.
/// Canonical rendering is `group:artifact`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LibraryId {
    group: String,
    artifact: String,
}

impl LibraryId {
    pub fn new(group: impl Into<String>, artifact: impl Into<String>) -> Result<Self, ModelError> {
        let group = group.into();
        let artifact = artifact.into();
        if group.is_empty() {
            return Err(ModelError::EmptyField("group"));
        }
        if artifact.is_empty() {
            return Err(ModelError::EmptyField("artifact"));
        }
        if group.contains(':') {
            return Err(ModelError::SeparatorInField("group"));
        }
        if artifact.contains(':') {
            return Err(ModelError::SeparatorInField("artifact"));
        }
        Ok(LibraryId { group, artifact })
    }

    /// Parses the canonical `group:artifact` rendering.
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let mut parts = text.split(':');
        match (parts.next(), parts.next(), parts.next()) {
            (Some(g), Some(a), None) if !g.is_empty() && !a.is_empty() => {
                LibraryId::new(g, a).map_err(|_| ModelError::MalformedCoordinate(text.to_string()))
            }
            _ => Err(ModelError::MalformedCoordinate(text.to_string())),
        }
    }

    pub fn group(&self) -> &str {
        &self.group
    }

    pub fn artifact(&self) -> &str {
        &self.artifact
    }
}

impl fmt::Display for LibraryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.group, self.artifact)
    }
}

/// A project under study, identified as `owner:name`. The owner doubles as
/// the organization key used when deduplicating rule observations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjectId {
    owner: String,
    name: String,
}

impl ProjectId {
    pub fn new(owner: impl Into<String>, name: impl Into<String>) -> Result<Self, ModelError> {
        let owner = owner.into();
        let name = name.into();
        if owner.is_empty() {
            return Err(ModelError::EmptyField("owner"));
        }
        if name.is_empty() {
            return Err(ModelError::EmptyField("name"));
        }
        if owner.contains(':') {
            return Err(ModelError::SeparatorInField("owner"));
        }
        if name.contains(':') {
            return Err(ModelError::SeparatorInField("name"));
        }
        Ok(ProjectId { owner, name })
    }

    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let mut parts = text.split(':');
        match (parts.next(), parts.next(), parts.next()) {
            (Some(o), Some(n), None) if !o.is_empty() && !n.is_empty() => ProjectId::new(o, n),
            _ => Err(ModelError::MalformedCoordinate(text.to_string())),
        }
    }

    pub fn owner(&self) -> &str {
        &self.owner
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Display for ProjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.owner, self.name)
    }
}

/// One observed version of a project: its position in the history, when it
/// was seen, and the dependency set it declared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub index: u32,
    pub timestamp: i64,
    pub dependencies: std::collections::BTreeSet<LibraryId>,
}

/// The ordered version history of one project.
///
/// Indices increase strictly and timestamps never decrease; both are checked
/// at construction so downstream code can rely on the ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyHistory {
    project: ProjectId,
    snapshots: Vec<Snapshot>,
}

impl DependencyHistory {
    pub fn new(project: ProjectId, snapshots: Vec<Snapshot>) -> Result<Self, ModelError> {
        for pair in snapshots.windows(2) {
            if pair[1].index <= pair[0].index {
                return Err(ModelError::BadSnapshotIndex);
            }
            if pair[1].timestamp < pair[0].timestamp {
                return Err(ModelError::TimestampsNotOrdered);
            }
        }
        if snapshots.first().is_some_and(|s| s.index < 1) {
            return Err(ModelError::BadSnapshotIndex);
        }
        Ok(DependencyHistory { project, snapshots })
    }

    pub fn project(&self) -> &ProjectId {
        &self.project
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    /// Looks a snapshot up by its index value (not list position).
    pub fn snapshot(&self, index: u32) -> Option<&Snapshot> {
        self.snapshots
            .binary_search_by_key(&index, |s| s.index)
            .ok()
            .map(|pos| &self.snapshots[pos])
    }
}

/// A single observed migration: project `p` dropped `source` and picked up
/// `target` between the two given snapshots.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Migration {
    pub project: ProjectId,
    pub from_index: u32,
    pub to_index: u32,
    pub from_time: i64,
    pub to_time: i64,
    pub source: LibraryId,
    pub target: LibraryId,
}

impl Migration {
    /// The artifact-level rule this migration witnesses.
    pub fn rule(&self) -> MigrationRule {
        MigrationRule::new(self.source.artifact(), self.target.artifact())
    }
}

/// A directed source → target rule over merged (artifact-level) library names.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MigrationRule {
    pub source: String,
    pub target: String,
}

impl MigrationRule {
    pub fn new(source: impl Into<String>, target: impl Into<String>) -> Self {
        MigrationRule {
            source: source.into(),
            target: target.into(),
        }
    }

    pub fn reversed(&self) -> MigrationRule {
        MigrationRule::new(self.target.clone(), self.source.clone())
    }
}

impl fmt::Display for MigrationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.source, self.target)
    }
}

/// Aggregated evidence for one rule: which projects exhibited it, under how
/// many distinct owners, how often overall, and with what confidence.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleStats {
    pub rule: MigrationRule,
    pub occurrences: std::collections::BTreeSet<ProjectId>,
    pub owners: std::collections::BTreeSet<String>,
    pub score: u32,
    pub confidence: f64,
}

impl RuleStats {
    pub fn new(rule: MigrationRule) -> Self {
        RuleStats {
            rule,
            occurrences: Default::default(),
            owners: Default::default(),
            score: 0,
            confidence: 0.0,
        }
    }
}

/// Human (or propagated) correctness verdict for a rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    Seed,
    Banned,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Seed => write!(f, "seed"),
            Verdict::Banned => write!(f, "banned"),
            Verdict::Unknown => write!(f, "unknown"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn parse_canonical_coordinate() {
        let lib = LibraryId::parse("org.hsqldb:hsqldb").unwrap();
        assert_eq!(lib.group(), "org.hsqldb");
        assert_eq!(lib.artifact(), "hsqldb");
        assert_eq!(lib.to_string(), "org.hsqldb:hsqldb");
    }

    #[test]
    fn parse_minimal_coordinate() {
        let lib = LibraryId::parse("a:b").unwrap();
        assert_eq!((lib.group(), lib.artifact()), ("a", "b"));
    }

    #[test]
    fn parse_rejects_excess_separator() {
        assert!(matches!(
            LibraryId::parse("a:b:c"),
            Err(ModelError::MalformedCoordinate(_))
        ));
        assert!(matches!(
            LibraryId::parse("a:"),
            Err(ModelError::MalformedCoordinate(_))
        ));
        assert!(matches!(
            LibraryId::parse(":b"),
            Err(ModelError::MalformedCoordinate(_))
        ));
        assert!(matches!(
            LibraryId::parse("nocolon"),
            Err(ModelError::MalformedCoordinate(_))
        ));
    }

    #[test]
    fn rendering_round_trips() {
        for text in ["org.hsqldb:hsqldb", "a:b", "com.h2database:h2"] {
            let lib = LibraryId::parse(text).unwrap();
            assert_eq!(LibraryId::parse(&lib.to_string()).unwrap(), lib);
        }
    }

    fn snap(index: u32, ts: i64) -> Snapshot {
        Snapshot {
            index,
            timestamp: ts,
            dependencies: BTreeSet::new(),
        }
    }

    #[test]
    fn history_rejects_unordered_timestamps() {
        let project = ProjectId::new("o", "p").unwrap();
        let err = DependencyHistory::new(project, vec![snap(1, 100), snap(2, 50)]);
        assert_eq!(err.unwrap_err(), ModelError::TimestampsNotOrdered);
    }

    #[test]
    fn history_rejects_non_increasing_indices() {
        let project = ProjectId::new("o", "p").unwrap();
        let err = DependencyHistory::new(project.clone(), vec![snap(2, 1), snap(2, 2)]);
        assert_eq!(err.unwrap_err(), ModelError::BadSnapshotIndex);
        let err = DependencyHistory::new(project, vec![snap(0, 1)]);
        assert_eq!(err.unwrap_err(), ModelError::BadSnapshotIndex);
    }

    #[test]
    fn snapshot_lookup_is_by_index_value() {
        let project = ProjectId::new("o", "p").unwrap();
        let history =
            DependencyHistory::new(project, vec![snap(1, 1), snap(3, 2), snap(7, 3)]).unwrap();
        assert_eq!(history.snapshot(3).unwrap().timestamp, 2);
        assert!(history.snapshot(2).is_none());
    }
}

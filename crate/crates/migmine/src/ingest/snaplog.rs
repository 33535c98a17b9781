use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::io::BufRead;

use serde::Deserialize;

use crate::model::{DependencyHistory, LibraryId, ProjectId, Snapshot};

use super::IngestError;

#[derive(Debug, Deserialize)]
struct RawRecord {
    project: String,
    index: u32,
    ts: i64,
    deps: Vec<String>,
}

/// Parses the line-oriented snapshot log: one JSON object per line, `#`
/// comments and blank lines skipped. Snapshots are re-sorted by
/// `(timestamp, index)` per project and re-indexed 1..n in that order, so
/// downstream code always sees a contiguous chronological history.
pub fn parse_snapshot_log<R: BufRead>(reader: R) -> Result<Vec<DependencyHistory>, IngestError> {
    let mut per_project: BTreeMap<ProjectId, Vec<(i64, u32, BTreeSet<LibraryId>)>> =
        BTreeMap::new();
    let mut seen: BTreeSet<(ProjectId, u32)> = BTreeSet::new();

    for (lineno, line) in reader.lines().enumerate() {
        let line_no = lineno + 1;
        let line = line.map_err(|e| IngestError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let raw: RawRecord = serde_json::from_str(trimmed).map_err(|e| IngestError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if raw.index < 1 {
            return Err(IngestError::Parse {
                line: line_no,
                message: "index must be >= 1".to_string(),
            });
        }
        let project = ProjectId::parse(&raw.project).map_err(|e| IngestError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if !seen.insert((project.clone(), raw.index)) {
            return Err(IngestError::DuplicateSnapshot {
                line: line_no,
                project: raw.project,
                index: raw.index,
            });
        }
        let mut deps = BTreeSet::new();
        for dep in &raw.deps {
            let lib = LibraryId::parse(dep).map_err(|e| IngestError::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
            deps.insert(lib);
        }
        per_project
            .entry(project)
            .or_default()
            .push((raw.ts, raw.index, deps));
    }

    let mut histories = Vec::with_capacity(per_project.len());
    for (project, mut snaps) in per_project {
        snaps.sort_by_key(|s| (s.0, s.1));
        let snapshots = snaps
            .into_iter()
            .enumerate()
            .map(|(pos, (ts, _, deps))| Snapshot {
                index: (pos + 1) as u32,
                timestamp: ts,
                dependencies: deps,
            })
            .collect();
        let history =
            DependencyHistory::new(project, snapshots).map_err(|e| IngestError::Parse {
                line: 0,
                message: e.to_string(),
            })?;
        histories.push(history);
    }
    Ok(histories)
}

/// Serializes histories back to the snapshot-log format, one record per line
/// in project order.
pub fn write_snapshot_log(histories: &[DependencyHistory]) -> String {
    let mut out = String::new();
    for history in histories {
        for snap in history.snapshots() {
            let deps: Vec<String> = snap.dependencies.iter().map(|d| d.to_string()).collect();
            let record = serde_json::json!({
                "project": history.project().to_string(),
                "index": snap.index,
                "ts": snap.timestamp,
                "deps": deps,
            });
            out.push_str(&record.to_string());
            out.push('\n');
        }
    }
    out
}

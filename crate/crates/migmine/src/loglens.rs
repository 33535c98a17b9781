//! Commit-message retrieval for rule triage: an inverted token index over
//! commit logs and a conjunctive source-and-target search.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;

use serde::Deserialize;
use thiserror::Error;

use crate::mining::tokens;
use crate::model::{MigrationRule, ProjectId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LoglensError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate commit {project} {id}")]
    DuplicateCommit {
        line: usize,
        project: String,
        id: String,
    },
}

/// One commit message with its provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommitRecord {
    pub project: ProjectId,
    pub id: String,
    pub timestamp: i64,
    pub author: String,
    pub message: String,
}

#[derive(Debug, Deserialize)]
struct RawCommit {
    project: String,
    id: String,
    ts: i64,
    author: String,
    msg: String,
}

/// Inverted index from message tokens to commit records. Tokenization is
/// the same used for artifact names, so `log4j` in a message matches the
/// `log4j` artifact but not `log4j12`.
#[derive(Debug, Default)]
pub struct LogIndex {
    records: Vec<CommitRecord>,
    postings: BTreeMap<String, BTreeSet<usize>>,
}

impl LogIndex {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[CommitRecord] {
        &self.records
    }

    fn insert(&mut self, record: CommitRecord) {
        let slot = self.records.len();
        for token in tokens(&record.message) {
            self.postings.entry(token).or_default().insert(slot);
        }
        self.records.push(record);
    }

    fn matching_any(&self, query: &BTreeSet<String>) -> BTreeSet<usize> {
        let mut slots = BTreeSet::new();
        for token in query {
            if let Some(postings) = self.postings.get(token) {
                slots.extend(postings.iter().copied());
            }
        }
        slots
    }

    /// Commits whose message mentions both sides of the rule, newest first.
    pub fn search(&self, rule: &MigrationRule) -> Vec<&CommitRecord> {
        let source_hits = self.matching_any(&tokens(&rule.source));
        let target_hits = self.matching_any(&tokens(&rule.target));
        let mut hits: Vec<&CommitRecord> = source_hits
            .intersection(&target_hits)
            .map(|&slot| &self.records[slot])
            .collect();
        hits.sort_by(|a, b| {
            b.timestamp
                .cmp(&a.timestamp)
                .then_with(|| (&a.project, &a.id).cmp(&(&b.project, &b.id)))
        });
        hits
    }
}

/// Builds the index from the commit-log format: one JSON object per line,
/// `#` comments skipped. A repeated (project, id) pair is an error.
pub fn index_logs<R: BufRead>(reader: R) -> Result<LogIndex, LoglensError> {
    let mut index = LogIndex::default();
    let mut seen: BTreeSet<(ProjectId, String)> = BTreeSet::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line_no = lineno + 1;
        let line = line.map_err(|e| LoglensError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let raw: RawCommit = serde_json::from_str(trimmed).map_err(|e| LoglensError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let project = ProjectId::parse(&raw.project).map_err(|e| LoglensError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if !seen.insert((project.clone(), raw.id.clone())) {
            return Err(LoglensError::DuplicateCommit {
                line: line_no,
                project: raw.project,
                id: raw.id,
            });
        }
        index.insert(CommitRecord {
            project,
            id: raw.id,
            timestamp: raw.ts,
            author: raw.author,
            message: raw.msg,
        });
    }
    Ok(index)
}

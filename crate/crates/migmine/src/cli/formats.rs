//! On-disk interchange formats shared by the pipeline stages.

use std::collections::{BTreeMap, BTreeSet};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use migmine::mining::MineOutput;
use migmine::model::{LibraryId, Migration, MigrationRule, ProjectId, RuleStats};

/// Full merged rule statistics plus the confidence denominators; written as
/// scoreboard.json so later stages can re-filter without re-mining.
#[derive(Debug, Serialize, Deserialize)]
pub struct ScoreboardFile {
    pub rules: Vec<ScoreboardRule>,
    pub drop_owners: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ScoreboardRule {
    pub source: String,
    pub target: String,
    pub score: u32,
    pub owners: Vec<String>,
    pub projects: Vec<String>,
    pub confidence: f64,
}

impl ScoreboardFile {
    pub fn from_output(output: &MineOutput) -> Self {
        ScoreboardFile {
            rules: output
                .merged
                .iter()
                .map(|(rule, stats)| ScoreboardRule {
                    source: rule.source.clone(),
                    target: rule.target.clone(),
                    score: stats.score,
                    owners: stats.owners.iter().cloned().collect(),
                    projects: stats.occurrences.iter().map(|p| p.to_string()).collect(),
                    confidence: stats.confidence,
                })
                .collect(),
            drop_owners: output
                .board
                .drop_owners()
                .iter()
                .map(|(artifact, owners)| (artifact.clone(), owners.iter().cloned().collect()))
                .collect(),
        }
    }

    pub fn merged_rules(&self) -> Result<BTreeMap<MigrationRule, RuleStats>> {
        let mut merged = BTreeMap::new();
        for row in &self.rules {
            let rule = MigrationRule::new(row.source.clone(), row.target.clone());
            let mut stats = RuleStats::new(rule.clone());
            stats.score = row.score;
            stats.confidence = row.confidence;
            stats.owners = row.owners.iter().cloned().collect();
            for project in &row.projects {
                stats
                    .occurrences
                    .insert(ProjectId::parse(project).context("bad project id")?);
            }
            merged.insert(rule, stats);
        }
        Ok(merged)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct MigrationRecord {
    project: String,
    from_index: u32,
    to_index: u32,
    from_ts: i64,
    to_ts: i64,
    source: String,
    target: String,
}

/// Candidate migrations as JSON lines.
pub fn migrations_jsonl(migrations: &[Migration]) -> String {
    let mut out = String::new();
    for m in migrations {
        let record = MigrationRecord {
            project: m.project.to_string(),
            from_index: m.from_index,
            to_index: m.to_index,
            from_ts: m.from_time,
            to_ts: m.to_time,
            source: m.source.to_string(),
            target: m.target.to_string(),
        };
        out.push_str(&serde_json::to_string(&record).expect("record serializes"));
        out.push('\n');
    }
    out
}

pub fn parse_migrations_jsonl(text: &str) -> Result<Vec<Migration>> {
    let mut migrations = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let record: MigrationRecord = serde_json::from_str(trimmed)
            .with_context(|| format!("migrations line {}", lineno + 1))?;
        migrations.push(Migration {
            project: ProjectId::parse(&record.project)
                .with_context(|| format!("migrations line {}", lineno + 1))?,
            from_index: record.from_index,
            to_index: record.to_index,
            from_time: record.from_ts,
            to_time: record.to_ts,
            source: LibraryId::parse(&record.source)
                .with_context(|| format!("migrations line {}", lineno + 1))?,
            target: LibraryId::parse(&record.target)
                .with_context(|| format!("migrations line {}", lineno + 1))?,
        });
    }
    Ok(migrations)
}

/// One row of the rules.csv report.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleRow {
    pub rule: MigrationRule,
    pub score: u32,
    pub groups: u32,
    pub confidence: f64,
    pub projects: u32,
}

pub fn parse_rules_csv(text: &str) -> Result<Vec<RuleRow>> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            bail!("rules.csv line {}: expected 6 fields", lineno + 1);
        }
        rows.push(RuleRow {
            rule: MigrationRule::new(fields[0], fields[1]),
            score: fields[2].parse().context("score")?,
            groups: fields[3].parse().context("groups")?,
            confidence: fields[4].parse().context("confidence")?,
            projects: fields[5].parse().context("projects")?,
        });
    }
    Ok(rows)
}

/// Client counts per artifact at each project's latest snapshot.
pub fn usage_counts(histories: &[migmine::DependencyHistory]) -> BTreeMap<String, u64> {
    let mut usage: BTreeMap<String, u64> = BTreeMap::new();
    for history in histories {
        let Some(last) = history.snapshots().last() else {
            continue;
        };
        let artifacts: BTreeSet<&str> = last.dependencies.iter().map(|l| l.artifact()).collect();
        for artifact in artifacts {
            *usage.entry(artifact.to_string()).or_insert(0) += 1;
        }
    }
    usage
}

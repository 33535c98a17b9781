//! Candidate generation, scoring, rule merging and filtering.
//!
//! Per observed version couple the dependency sets are diffed; the Cartesian
//! product of removed × added dependencies yields candidate migrations after
//! equivalent and already-known pairs have been excised. Scores count
//! observations, owner sets deduplicate organizations, and merged
//! artifact-level rules are kept only when they clear the score/owner
//! thresholds and the confidence cut.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::ingest::sample_couples;
use crate::model::{DependencyHistory, LibraryId, Migration, MigrationRule, ProjectId, RuleStats};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MiningError {
    #[error("snapshot index {0} not present in history")]
    MissingSnapshot(u32),
    #[error("no drop observations for source library {0:?}")]
    NoDropObservations(String),
}

/// Dependency delta of one project between two observed versions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepDiff {
    pub project: ProjectId,
    pub couple: (u32, u32),
    pub removed: BTreeSet<LibraryId>,
    pub added: BTreeSet<LibraryId>,
    pub from_time: i64,
    pub to_time: i64,
}

/// Set difference of the dependency sets at the two ends of a couple:
/// removed = dep(i) \ dep(j), added = dep(j) \ dep(i).
pub fn diff_deps(history: &DependencyHistory, couple: (u32, u32)) -> Result<DepDiff, MiningError> {
    let from = history
        .snapshot(couple.0)
        .ok_or(MiningError::MissingSnapshot(couple.0))?;
    let to = history
        .snapshot(couple.1)
        .ok_or(MiningError::MissingSnapshot(couple.1))?;
    Ok(DepDiff {
        project: history.project().clone(),
        couple,
        removed: from
            .dependencies
            .difference(&to.dependencies)
            .cloned()
            .collect(),
        added: to
            .dependencies
            .difference(&from.dependencies)
            .cloned()
            .collect(),
        from_time: from.timestamp,
        to_time: to.timestamp,
    })
}

/// Lexical tokens of an artifact name: split on non-alphanumeric characters
/// and on lower-to-upper CamelCase boundaries, lowercased.
pub fn tokens(artifact: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut current = String::new();
    let mut prev_lower = false;
    for ch in artifact.chars() {
        if !ch.is_alphanumeric() {
            if !current.is_empty() {
                out.insert(std::mem::take(&mut current));
            }
            prev_lower = false;
            continue;
        }
        if ch.is_uppercase() && prev_lower && !current.is_empty() {
            out.insert(std::mem::take(&mut current));
        }
        prev_lower = ch.is_lowercase();
        current.extend(ch.to_lowercase());
    }
    if !current.is_empty() {
        out.insert(current);
    }
    out
}

/// Two libraries are equivalent when they share a groupId or when their
/// artifact token sets overlap; such pairs denote renames, not migrations.
pub fn equivalent(a: &LibraryId, b: &LibraryId) -> bool {
    if a.group() == b.group() {
        return true;
    }
    !tokens(a.artifact()).is_disjoint(&tokens(b.artifact()))
}

fn seed_hit(seeds: &BTreeSet<MigrationRule>, removed: &LibraryId, added: &LibraryId) -> bool {
    seeds.contains(&MigrationRule::new(removed.artifact(), added.artifact()))
}

/// Candidate migrations for one diff: libraries participating in an
/// equivalent or already-seeded pair are excised from both sets (the whole
/// library, not just the pair), as is any artifact present on both sides;
/// the Cartesian product of what remains becomes the candidates.
pub fn generate_candidates(diff: &DepDiff, seeds: &BTreeSet<MigrationRule>) -> Vec<Migration> {
    let mut related: BTreeSet<LibraryId> = BTreeSet::new();
    for removed in &diff.removed {
        for added in &diff.added {
            if equivalent(removed, added) || seed_hit(seeds, removed, added) {
                related.insert(removed.clone());
                related.insert(added.clone());
            }
        }
    }

    let removed_artifacts: BTreeSet<&str> = diff.removed.iter().map(|l| l.artifact()).collect();
    let added_artifacts: BTreeSet<&str> = diff.added.iter().map(|l| l.artifact()).collect();

    let retained = |lib: &&LibraryId, other_side: &BTreeSet<&str>| {
        !related.contains(lib) && !other_side.contains(lib.artifact())
    };
    let removed: Vec<&LibraryId> = diff
        .removed
        .iter()
        .filter(|l| retained(l, &added_artifacts))
        .collect();
    let added: Vec<&LibraryId> = diff
        .added
        .iter()
        .filter(|l| retained(l, &removed_artifacts))
        .collect();

    let mut candidates = Vec::with_capacity(removed.len() * added.len());
    for source in &removed {
        for target in &added {
            candidates.push(Migration {
                project: diff.project.clone(),
                from_index: diff.couple.0,
                to_index: diff.couple.1,
                from_time: diff.from_time,
                to_time: diff.to_time,
                source: (*source).clone(),
                target: (*target).clone(),
            });
        }
    }
    candidates
}

/// Coordinate-level rule key used while accumulating, before groupIds are
/// discarded by merging.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CoordRule {
    pub source: LibraryId,
    pub target: LibraryId,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoordStats {
    pub score: u32,
    pub occurrences: BTreeSet<ProjectId>,
    pub owners: BTreeSet<String>,
}

/// Running score/owner bookkeeping over all mined diffs. Partial boards
/// from concurrent workers merge commutatively.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScoreBoard {
    stats: BTreeMap<CoordRule, CoordStats>,
    /// Owners observed removing each artifact; the confidence denominator.
    drop_owners: BTreeMap<String, BTreeSet<String>>,
}

impl ScoreBoard {
    pub fn new() -> Self {
        Self::default()
    }

    /// Folds one diff and its candidates into the board. Every removed
    /// library records its dropping owner even when the diff produced no
    /// candidates; added-only diffs leave the board untouched.
    pub fn accumulate(&mut self, diff: &DepDiff, candidates: &[Migration]) {
        let owner = diff.project.owner().to_string();
        for removed in &diff.removed {
            self.drop_owners
                .entry(removed.artifact().to_string())
                .or_default()
                .insert(owner.clone());
        }
        for candidate in candidates {
            let key = CoordRule {
                source: candidate.source.clone(),
                target: candidate.target.clone(),
            };
            let entry = self.stats.entry(key).or_default();
            entry.score += 1;
            entry.occurrences.insert(candidate.project.clone());
            entry.owners.insert(candidate.project.owner().to_string());
        }
    }

    /// Merges another (partial) board into this one. Commutative and
    /// associative, so worker merge order is irrelevant.
    pub fn merge(&mut self, other: ScoreBoard) {
        for (rule, stats) in other.stats {
            let entry = self.stats.entry(rule).or_default();
            entry.score += stats.score;
            entry.occurrences.extend(stats.occurrences);
            entry.owners.extend(stats.owners);
        }
        for (artifact, owners) in other.drop_owners {
            self.drop_owners.entry(artifact).or_default().extend(owners);
        }
    }

    pub fn stats(&self) -> &BTreeMap<CoordRule, CoordStats> {
        &self.stats
    }

    pub fn drop_owners(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.drop_owners
    }

    pub fn drop_owners_of(&self, artifact: &str) -> Option<&BTreeSet<String>> {
        self.drop_owners.get(artifact)
    }
}

/// Discards groupIds and merges rules with identical source and target
/// artifacts: scores sum, occurrence and owner sets union, and self-rules
/// (same artifact on both sides) are dropped.
pub fn merge_rules(board: &ScoreBoard) -> BTreeMap<MigrationRule, RuleStats> {
    let mut merged: BTreeMap<MigrationRule, RuleStats> = BTreeMap::new();
    for (coord, stats) in &board.stats {
        if coord.source.artifact() == coord.target.artifact() {
            continue;
        }
        let rule = MigrationRule::new(coord.source.artifact(), coord.target.artifact());
        let entry = merged
            .entry(rule.clone())
            .or_insert_with(|| RuleStats::new(rule));
        entry.score += stats.score;
        entry.occurrences.extend(stats.occurrences.iter().cloned());
        entry.owners.extend(stats.owners.iter().cloned());
    }
    merged
}

/// Retention thresholds for merged rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleThresholds {
    pub min_score: u32,
    pub min_groups: u32,
    pub bidir_min_score: u32,
}

impl Default for RuleThresholds {
    fn default() -> Self {
        RuleThresholds {
            min_score: 4,
            min_groups: 2,
            bidir_min_score: 2,
        }
    }
}

/// Keeps a rule when it clears score >= min_score with owners >= min_groups,
/// or when both directions exist with score >= bidir_min_score and
/// owners >= min_groups each.
pub fn filter_rules(
    merged: &BTreeMap<MigrationRule, RuleStats>,
    thresholds: RuleThresholds,
) -> BTreeMap<MigrationRule, RuleStats> {
    let clears = |stats: &RuleStats, min_score: u32| {
        stats.score >= min_score && stats.owners.len() as u32 >= thresholds.min_groups
    };
    merged
        .iter()
        .filter(|(rule, stats)| {
            if clears(stats, thresholds.min_score) {
                return true;
            }
            merged.get(&rule.reversed()).is_some_and(|back| {
                clears(stats, thresholds.bidir_min_score)
                    && clears(back, thresholds.bidir_min_score)
            })
        })
        .map(|(rule, stats)| (rule.clone(), stats.clone()))
        .collect()
}

/// Owner-level rule confidence: the share of owners that dropped the source
/// library and landed on this rule's target.
pub fn confidence(stats: &RuleStats, board: &ScoreBoard) -> Result<f64, MiningError> {
    let droppers = board
        .drop_owners_of(&stats.rule.source)
        .filter(|set| !set.is_empty())
        .ok_or_else(|| MiningError::NoDropObservations(stats.rule.source.clone()))?;
    Ok(stats.owners.len() as f64 / droppers.len() as f64)
}

/// Report ordering: most widely observed rules first.
pub fn report_order(
    a: &(MigrationRule, RuleStats),
    b: &(MigrationRule, RuleStats),
) -> std::cmp::Ordering {
    b.1.owners
        .len()
        .cmp(&a.1.owners.len())
        .then_with(|| b.1.score.cmp(&a.1.score))
        .then_with(|| a.0.source.cmp(&b.0.source))
        .then_with(|| a.0.target.cmp(&b.0.target))
}

/// Full mining configuration as exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MineConfig {
    pub step: u32,
    pub thresholds: RuleThresholds,
    pub min_confidence: f64,
}

impl Default for MineConfig {
    fn default() -> Self {
        MineConfig {
            step: 30,
            thresholds: RuleThresholds::default(),
            min_confidence: 0.06,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct MineOutput {
    pub board: ScoreBoard,
    /// All candidate migrations, in project order.
    pub candidates: Vec<Migration>,
    /// Merged artifact-level rules with confidence filled in.
    pub merged: BTreeMap<MigrationRule, RuleStats>,
    /// Rules surviving thresholds and the confidence cut, report-ordered.
    pub retained: Vec<(MigrationRule, RuleStats)>,
}

/// Mines one history into a partial board plus its candidate list.
pub fn mine_history(
    history: &DependencyHistory,
    seeds: &BTreeSet<MigrationRule>,
    step: u32,
) -> (ScoreBoard, Vec<Migration>) {
    let mut board = ScoreBoard::new();
    let mut candidates = Vec::new();
    let Ok(list) = sample_couples(history, step) else {
        return (board, candidates);
    };
    for couple in list.couples {
        let diff = diff_deps(history, couple).expect("sampled couples exist in history");
        let found = generate_candidates(&diff, seeds);
        board.accumulate(&diff, &found);
        candidates.extend(found);
    }
    (board, candidates)
}

/// Runs the whole pipeline over a corpus. `jobs` bounds worker parallelism;
/// results are identical for any worker count.
pub fn mine_histories(
    histories: &[DependencyHistory],
    seeds: &BTreeSet<MigrationRule>,
    config: &MineConfig,
    jobs: usize,
) -> MineOutput {
    let parts: Vec<(ScoreBoard, Vec<Migration>)> = if jobs <= 1 {
        histories
            .iter()
            .map(|h| mine_history(h, seeds, config.step))
            .collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool");
        pool.install(|| {
            use rayon::prelude::*;
            histories
                .par_iter()
                .map(|h| mine_history(h, seeds, config.step))
                .collect()
        })
    };

    let mut output = MineOutput::default();
    for (board, candidates) in parts {
        output.board.merge(board);
        output.candidates.extend(candidates);
    }

    output.merged = merge_rules(&output.board);
    for stats in output.merged.values_mut() {
        stats.confidence = confidence(stats, &output.board).unwrap_or(0.0);
    }
    let mut retained: Vec<(MigrationRule, RuleStats)> =
        filter_rules(&output.merged, config.thresholds)
            .into_iter()
            .filter(|(rule, _)| output.merged[rule].confidence >= config.min_confidence)
            .map(|(rule, _)| (rule.clone(), output.merged[&rule].clone()))
            .collect();
    retained.sort_by(report_order);
    output.retained = retained;
    output
}

/// Keeps only the migrations whose artifact-level rule belongs to the
/// validated set; used once rules have been rated.
pub fn validate_migrations(
    candidates: &[Migration],
    accepted: &BTreeSet<MigrationRule>,
) -> Vec<Migration> {
    candidates
        .iter()
        .filter(|m| accepted.contains(&m.rule()))
        .cloned()
        .collect()
}

/// Renders the retained rules as the canonical CSV report.
pub fn rules_csv(retained: &[(MigrationRule, RuleStats)]) -> String {
    let mut out = String::from("source,target,score,groups,confidence,projects\n");
    for (rule, stats) in retained {
        out.push_str(&format!(
            "{},{},{},{},{:.4},{}\n",
            rule.source,
            rule.target,
            stats.score,
            stats.owners.len(),
            stats.confidence,
            stats.occurrences.len()
        ));
    }
    out
}

//! Synthetic corpus generation with planted migrations and known churn, plus
//! the precision/recall evaluation and sampling-step sweep built on it.
//!
//! Generation is deterministic: the seed in the config fixes the corpus,
//! ground truth and commit log byte for byte. Each project derives its own
//! sub-seed, so projects are independent and generation order is free.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::loglens::CommitRecord;
use crate::mining::{diff_deps, generate_candidates};
use crate::model::{DependencyHistory, LibraryId, Migration, ProjectId, Snapshot};

/// Knobs for the generator. Rates are per-project probabilities of planting
/// the corresponding story; `alias_rate` re-publishes a library under a
/// second groupId to exercise the equivalence and merge filters.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SynthConfig {
    pub n_projects: u32,
    pub n_snapshots: u32,
    pub n_libraries: u32,
    pub migration_rate: f64,
    pub alias_rate: f64,
    pub loopback_rate: f64,
    pub bounce_rate: f64,
    /// Fraction of plain migrations where the two libraries cohabit for a
    /// few snapshots instead of swapping in one step.
    #[serde(default)]
    pub cohabitation_rate: f64,
    /// Stories where the migration source only arrives after the first
    /// snapshot, invisible to a whole-history couple.
    #[serde(default)]
    pub late_intro_rate: f64,
    /// Stories where the migration target is dropped again before the end.
    #[serde(default)]
    pub early_retire_rate: f64,
    pub rng_seed: u64,
}

impl SynthConfig {
    fn validate(&self) {
        for rate in [
            self.migration_rate,
            self.alias_rate,
            self.loopback_rate,
            self.bounce_rate,
            self.cohabitation_rate,
            self.late_intro_rate,
            self.early_retire_rate,
        ] {
            assert!((0.0..=1.0).contains(&rate), "rates must be in [0,1]");
        }
    }
}

/// Why a planted migration may escape the miner at a given step size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scenario {
    /// Single-step swap, visible to any couple spanning it.
    Plain,
    /// Source and target overlap for a few snapshots; couples whose
    /// boundary falls inside the overlap miss it.
    Cohabitation,
    /// Source introduced after the first snapshot.
    LateIntroduction,
    /// Target dropped again before the last snapshot.
    EarlyRetirement,
    /// Middle hop of an x -> y -> z chain; wide couples see only x -> z.
    Bounce,
    /// Migration undone later; wide couples see nothing.
    Loopback,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Planted {
    pub migration: Migration,
    pub scenario: Scenario,
}

/// Pure add/remove churn that must never become a candidate on its own.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoy {
    pub project: ProjectId,
    pub index: u32,
    pub library: LibraryId,
    pub added: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundTruth {
    pub planted: Vec<Planted>,
    pub decoys: Vec<Decoy>,
}

#[derive(Debug, Clone, Default)]
pub struct SynthCorpus {
    pub histories: Vec<DependencyHistory>,
    pub commits: Vec<CommitRecord>,
    pub truth: GroundTruth,
}

const BASE_TS: i64 = 1_230_768_000; // 2009-01-01
const WEEK: i64 = 7 * 86_400;

fn split_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 step keyed by the project index
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn library(index: u32) -> LibraryId {
    LibraryId::new(format!("org.lib{index:04}"), format!("lib{index:04}")).unwrap()
}

fn alias_of(lib: &LibraryId) -> LibraryId {
    LibraryId::new(format!("net.{}", lib.artifact()), lib.artifact()).unwrap()
}

#[derive(Debug, Clone)]
enum Change {
    Add(LibraryId),
    Remove(LibraryId),
}

struct ProjectPlan {
    project: ProjectId,
    initial: BTreeSet<LibraryId>,
    /// (snapshot position, change, commit message)
    changes: Vec<(u32, Change, String)>,
    planted: Vec<Planted>,
    decoys: Vec<Decoy>,
}

/// Reserves `span` consecutive unused transitions, returning the first.
fn take_span(
    rng: &mut ChaCha8Rng,
    used: &mut BTreeSet<u32>,
    n_snapshots: u32,
    span: u32,
) -> Option<u32> {
    if n_snapshots < 2 + span - 1 {
        return None;
    }
    for _ in 0..64 {
        let start = rng.gen_range(2..=n_snapshots - span + 1);
        if (start..start + span).all(|t| !used.contains(&t)) {
            used.extend(start..start + span);
            return Some(start);
        }
    }
    None
}

fn plan_project(config: &SynthConfig, project_index: u32) -> ProjectPlan {
    let mut rng = ChaCha8Rng::seed_from_u64(split_seed(config.rng_seed, project_index as u64));
    let project = ProjectId::new(
        format!("org{project_index:05}"),
        format!("proj{project_index:05}"),
    )
    .unwrap();

    let mut pool: Vec<u32> = (0..config.n_libraries).collect();
    pool.shuffle(&mut rng);
    let mut fresh = pool.into_iter().map(library);
    let mut draw = || fresh.next().expect("library universe exhausted");

    // five stable slots plus one removable decoy lib
    let initial: Vec<LibraryId> = (0..6).map(|_| draw()).collect();
    let mut plan = ProjectPlan {
        project: project.clone(),
        initial: initial.iter().cloned().collect(),
        changes: Vec::new(),
        planted: Vec::new(),
        decoys: Vec::new(),
    };
    let mut used: BTreeSet<u32> = BTreeSet::new();
    let n = config.n_snapshots;

    let plant = |plan: &mut ProjectPlan,
                 window: (u32, u32),
                 source: &LibraryId,
                 target: &LibraryId,
                 scenario: Scenario| {
        plan.planted.push(Planted {
            migration: Migration {
                project: project.clone(),
                from_index: window.0,
                to_index: window.1,
                from_time: timestamp(project_index, window.0),
                to_time: timestamp(project_index, window.1),
                source: source.clone(),
                target: target.clone(),
            },
            scenario,
        });
    };

    // plain (optionally cohabiting) migration on slot 0
    if rng.gen_bool(config.migration_rate) {
        let source = initial[0].clone();
        let target = draw();
        if rng.gen_bool(config.cohabitation_rate) {
            if let Some(start) = take_span(&mut rng, &mut used, n, 4) {
                let gap = rng.gen_range(1..=3u32);
                plan.changes.push((
                    start,
                    Change::Add(target.clone()),
                    format!("start moving to {}", target.artifact()),
                ));
                plan.changes.push((
                    start + gap,
                    Change::Remove(source.clone()),
                    format!("finish dropping {}", source.artifact()),
                ));
                plant(
                    &mut plan,
                    (start - 1, start + gap),
                    &source,
                    &target,
                    Scenario::Cohabitation,
                );
            }
        } else if let Some(t) = take_span(&mut rng, &mut used, n, 1) {
            plan.changes.push((
                t,
                Change::Remove(source.clone()),
                format!(
                    "migrate from {} to {}",
                    source.artifact(),
                    target.artifact()
                ),
            ));
            plan.changes
                .push((t, Change::Add(target.clone()), String::new()));
            plant(&mut plan, (t - 1, t), &source, &target, Scenario::Plain);
        }
    }

    // loopback on slot 1: s -> u, later u -> s
    if rng.gen_bool(config.loopback_rate) {
        let source = initial[1].clone();
        let via = draw();
        let (a, b) = match (
            take_span(&mut rng, &mut used, n, 1),
            take_span(&mut rng, &mut used, n, 1),
        ) {
            (Some(a), Some(b)) if a != b => (a.min(b), a.max(b)),
            _ => (0, 0),
        };
        if a != 0 {
            plan.changes.push((
                a,
                Change::Remove(source.clone()),
                format!("migrate from {} to {}", source.artifact(), via.artifact()),
            ));
            plan.changes
                .push((a, Change::Add(via.clone()), String::new()));
            plan.changes.push((
                b,
                Change::Remove(via.clone()),
                format!("migrate from {} to {}", via.artifact(), source.artifact()),
            ));
            plan.changes
                .push((b, Change::Add(source.clone()), String::new()));
            plant(&mut plan, (a - 1, a), &source, &via, Scenario::Loopback);
            plant(&mut plan, (b - 1, b), &via, &source, Scenario::Loopback);
        }
    }

    // bounce on slot 2: x -> y -> z
    if rng.gen_bool(config.bounce_rate) {
        let x = initial[2].clone();
        let y = draw();
        let z = draw();
        let (a, b) = match (
            take_span(&mut rng, &mut used, n, 1),
            take_span(&mut rng, &mut used, n, 1),
        ) {
            (Some(a), Some(b)) if a != b => (a.min(b), a.max(b)),
            _ => (0, 0),
        };
        if a != 0 {
            plan.changes.push((
                a,
                Change::Remove(x.clone()),
                format!("migrate from {} to {}", x.artifact(), y.artifact()),
            ));
            plan.changes
                .push((a, Change::Add(y.clone()), String::new()));
            plan.changes.push((
                b,
                Change::Remove(y.clone()),
                format!("migrate from {} to {}", y.artifact(), z.artifact()),
            ));
            plan.changes
                .push((b, Change::Add(z.clone()), String::new()));
            plant(&mut plan, (a - 1, a), &x, &y, Scenario::Bounce);
            plant(&mut plan, (b - 1, b), &y, &z, Scenario::Bounce);
        }
    }

    // late introduction: the future source is not an initial dependency
    if rng.gen_bool(config.late_intro_rate) {
        let source = draw();
        let target = draw();
        let (a, b) = match (
            take_span(&mut rng, &mut used, n, 1),
            take_span(&mut rng, &mut used, n, 1),
        ) {
            (Some(a), Some(b)) if a != b => (a.min(b), a.max(b)),
            _ => (0, 0),
        };
        if a != 0 {
            plan.changes.push((
                a,
                Change::Add(source.clone()),
                format!("add {}", source.artifact()),
            ));
            plan.decoys.push(Decoy {
                project: project.clone(),
                index: a,
                library: source.clone(),
                added: true,
            });
            plan.changes.push((
                b,
                Change::Remove(source.clone()),
                format!(
                    "migrate from {} to {}",
                    source.artifact(),
                    target.artifact()
                ),
            ));
            plan.changes
                .push((b, Change::Add(target.clone()), String::new()));
            plant(
                &mut plan,
                (b - 1, b),
                &source,
                &target,
                Scenario::LateIntroduction,
            );
        }
    }

    // early retirement: the target disappears again before the end
    if rng.gen_bool(config.early_retire_rate) {
        let source = initial[3].clone();
        let target = draw();
        let (a, b) = match (
            take_span(&mut rng, &mut used, n, 1),
            take_span(&mut rng, &mut used, n, 1),
        ) {
            (Some(a), Some(b)) if a != b => (a.min(b), a.max(b)),
            _ => (0, 0),
        };
        if a != 0 {
            plan.changes.push((
                a,
                Change::Remove(source.clone()),
                format!(
                    "migrate from {} to {}",
                    source.artifact(),
                    target.artifact()
                ),
            ));
            plan.changes
                .push((a, Change::Add(target.clone()), String::new()));
            plan.changes.push((
                b,
                Change::Remove(target.clone()),
                format!("remove {}", target.artifact()),
            ));
            plan.decoys.push(Decoy {
                project: project.clone(),
                index: b,
                library: target.clone(),
                added: false,
            });
            plant(
                &mut plan,
                (a - 1, a),
                &source,
                &target,
                Scenario::EarlyRetirement,
            );
        }
    }

    // alias churn on slot 4: same artifact re-published under a new groupId
    if rng.gen_bool(config.alias_rate) {
        let original = initial[4].clone();
        let alias = alias_of(&original);
        if let Some(t) = take_span(&mut rng, &mut used, n, 1) {
            plan.changes.push((
                t,
                Change::Remove(original.clone()),
                format!("relocate {} to new group", original.artifact()),
            ));
            plan.changes
                .push((t, Change::Add(alias.clone()), String::new()));
            plan.decoys.push(Decoy {
                project: project.clone(),
                index: t,
                library: original,
                added: false,
            });
            plan.decoys.push(Decoy {
                project: project.clone(),
                index: t,
                library: alias,
                added: true,
            });
        }
    }

    // unconditional one-sided churn: one pure add and one pure remove
    if let Some(t) = take_span(&mut rng, &mut used, n, 1) {
        let extra = draw();
        plan.changes.push((
            t,
            Change::Add(extra.clone()),
            format!("add {}", extra.artifact()),
        ));
        plan.decoys.push(Decoy {
            project: project.clone(),
            index: t,
            library: extra,
            added: true,
        });
    }
    if let Some(t) = take_span(&mut rng, &mut used, n, 1) {
        let gone = initial[5].clone();
        plan.changes.push((
            t,
            Change::Remove(gone.clone()),
            format!("remove {}", gone.artifact()),
        ));
        plan.decoys.push(Decoy {
            project: project.clone(),
            index: t,
            library: gone,
            added: false,
        });
    }

    plan
}

fn timestamp(project_index: u32, snapshot: u32) -> i64 {
    BASE_TS + i64::from(project_index) * 3_600 + i64::from(snapshot - 1) * WEEK
}

/// Generates the corpus described by the config. Identical configs yield
/// identical corpora.
pub fn generate(config: &SynthConfig) -> SynthCorpus {
    config.validate();
    assert!(config.n_snapshots >= 2, "need at least 2 snapshots");
    assert!(
        config.n_libraries >= 16,
        "library universe too small for the planned stories"
    );

    let mut corpus = SynthCorpus::default();
    for project_index in 0..config.n_projects {
        let plan = plan_project(config, project_index);
        let mut deps = plan.initial.clone();
        let mut snapshots = Vec::with_capacity(config.n_snapshots as usize);
        for snap in 1..=config.n_snapshots {
            let mut commit_messages: Vec<&str> = Vec::new();
            for (at, change, message) in &plan.changes {
                if *at == snap {
                    match change {
                        Change::Add(lib) => {
                            deps.insert(lib.clone());
                        }
                        Change::Remove(lib) => {
                            deps.remove(lib);
                        }
                    }
                    if !message.is_empty() {
                        commit_messages.push(message);
                    }
                }
            }
            let ts = timestamp(project_index, snap);
            for (i, message) in commit_messages.iter().enumerate() {
                corpus.commits.push(CommitRecord {
                    project: plan.project.clone(),
                    id: format!("c{snap:04}-{i}"),
                    timestamp: ts,
                    author: format!("dev{}", project_index % 7),
                    message: (*message).to_string(),
                });
            }
            snapshots.push(Snapshot {
                index: snap,
                timestamp: ts,
                dependencies: deps.clone(),
            });
        }
        corpus.histories.push(
            DependencyHistory::new(plan.project, snapshots).expect("generated history is ordered"),
        );
        corpus.truth.planted.extend(plan.planted);
        corpus.truth.decoys.extend(plan.decoys);
    }
    corpus
}

/// Precision/recall of mined candidates against the planted truth.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub tp: u64,
    pub fp: u64,
    pub precision: f64,
    pub recall: f64,
    /// True when precision had no support (nothing was mined).
    pub zero_support: bool,
    /// Planted-but-unmined migrations, bucketed by their scenario.
    pub missed: std::collections::BTreeMap<Scenario, u64>,
    /// False positives explained as compositions of successive planted
    /// migrations (x -> z mined across an x -> y -> z chain).
    pub composite_fp: u64,
}

fn windows_overlap(a: &Migration, b: &Migration) -> bool {
    a.from_index <= b.to_index && b.from_index <= a.to_index
}

fn matches(mined: &Migration, planted: &Migration) -> bool {
    mined.project == planted.project
        && mined.source == planted.source
        && mined.target == planted.target
        && windows_overlap(mined, planted)
}

fn is_composite(mined: &Migration, truth: &GroundTruth) -> bool {
    truth.planted.iter().any(|first| {
        first.migration.project == mined.project
            && first.migration.source == mined.source
            && first.migration.from_index >= mined.from_index
            && first.migration.to_index <= mined.to_index
            && truth.planted.iter().any(|second| {
                second.migration.project == mined.project
                    && second.migration.source == first.migration.target
                    && second.migration.target == mined.target
                    && second.migration.from_index >= first.migration.to_index
                    && second.migration.to_index <= mined.to_index
            })
    })
}

pub fn evaluate(mined: &[Migration], truth: &GroundTruth) -> EvalReport {
    let mut tp = 0u64;
    let mut fp = 0u64;
    let mut composite_fp = 0u64;
    for candidate in mined {
        if truth
            .planted
            .iter()
            .any(|p| matches(candidate, &p.migration))
        {
            tp += 1;
        } else {
            fp += 1;
            if is_composite(candidate, truth) {
                composite_fp += 1;
            }
        }
    }

    let mut missed = std::collections::BTreeMap::new();
    let mut found = 0u64;
    for planted in &truth.planted {
        if mined.iter().any(|m| matches(m, &planted.migration)) {
            found += 1;
        } else {
            *missed.entry(planted.scenario).or_insert(0) += 1;
        }
    }

    let zero_support = mined.is_empty();
    let precision = if zero_support {
        1.0
    } else {
        tp as f64 / mined.len() as f64
    };
    let recall = if truth.planted.is_empty() {
        1.0
    } else {
        found as f64 / truth.planted.len() as f64
    };
    EvalReport {
        tp,
        fp,
        precision,
        recall,
        zero_support,
        missed,
        composite_fp,
    }
}

/// Raw candidate mining at one step size, no seed filtering.
pub fn mine_candidates(histories: &[DependencyHistory], step: u32) -> Vec<Migration> {
    let seeds = BTreeSet::new();
    let mut all = Vec::new();
    for history in histories {
        let Ok(list) = crate::ingest::sample_couples(history, step) else {
            continue;
        };
        for couple in list.couples {
            let diff = diff_deps(history, couple).expect("sampled couples exist");
            all.extend(generate_candidates(&diff, &seeds));
        }
    }
    all
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub step: u32,
    pub candidates: u64,
    pub tp: u64,
    pub fp: u64,
    pub runtime_ms: u64,
}

/// Runs raw mining at each step size and scores it against the truth.
pub fn step_sweep(
    histories: &[DependencyHistory],
    truth: &GroundTruth,
    steps: &[u32],
) -> Vec<SweepRow> {
    steps
        .iter()
        .map(|&step| {
            let started = Instant::now();
            let mined = mine_candidates(histories, step);
            let report = evaluate(&mined, truth);
            SweepRow {
                step,
                candidates: mined.len() as u64,
                tp: report.tp,
                fp: report.fp,
                runtime_ms: started.elapsed().as_millis() as u64,
            }
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("step,candidates,tp,fp,runtime_ms\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.step, row.candidates, row.tp, row.fp, row.runtime_ms
        ));
    }
    out
}

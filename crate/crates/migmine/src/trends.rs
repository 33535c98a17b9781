//! Usage-trend series and migration measurements: library introductions,
//! popularity evolution in fixed time buckets, per-rule migration times and
//! the commit/day/author effort distribution.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{TimeZone, Utc};
use thiserror::Error;

use crate::loglens::CommitRecord;
use crate::model::{DependencyHistory, Migration, MigrationRule};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TrendsError {
    #[error("no effort records")]
    NoRecords,
}

fn uses(history: &DependencyHistory, artifact: &str, at: usize) -> bool {
    history.snapshots()[at]
        .dependencies
        .iter()
        .any(|lib| lib.artifact() == artifact)
}

/// Number of times the project started to use the library: every
/// absent-to-present transition counts, including presence at the very
/// first snapshot.
pub fn introductions(history: &DependencyHistory, artifact: &str) -> u32 {
    let mut count = 0;
    let mut present = false;
    for at in 0..history.len() {
        let now = uses(history, artifact, at);
        if now && !present {
            count += 1;
        }
        present = now;
    }
    count
}

/// Per-library client counts over fixed-width time buckets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PopularitySeries {
    pub library: String,
    /// (bucket start, number of client projects) pairs, strictly increasing
    /// in time.
    pub buckets: Vec<(i64, u64)>,
}

/// Counts, for every library of the category and every bucket, the projects
/// whose most recent snapshot at or before the bucket start depends on the
/// library. Buckets span the corpus observation period; the default width
/// is two weeks.
pub fn popularity_series(
    histories: &[DependencyHistory],
    category: &BTreeSet<String>,
    bucket_days: u32,
) -> Vec<PopularitySeries> {
    let timestamps: Vec<i64> = histories
        .iter()
        .flat_map(|h| h.snapshots().iter().map(|s| s.timestamp))
        .collect();
    let (Some(&start), Some(&end)) = (timestamps.iter().min(), timestamps.iter().max()) else {
        return category
            .iter()
            .map(|library| PopularitySeries {
                library: library.clone(),
                buckets: Vec::new(),
            })
            .collect();
    };
    let width = i64::from(bucket_days) * 86_400;
    let bucket_starts: Vec<i64> = (0..)
        .map(|k| start + k * width)
        .take_while(|&t| t <= end)
        .collect();

    category
        .iter()
        .map(|library| {
            let buckets = bucket_starts
                .iter()
                .map(|&bucket_start| {
                    let clients = histories
                        .iter()
                        .filter(|history| {
                            history
                                .snapshots()
                                .iter()
                                .rev()
                                .find(|s| s.timestamp <= bucket_start)
                                .is_some_and(|s| {
                                    s.dependencies.iter().any(|l| l.artifact() == *library)
                                })
                        })
                        .count() as u64;
                    (bucket_start, clients)
                })
                .collect();
            PopularitySeries {
                library: library.clone(),
                buckets,
            }
        })
        .collect()
}

/// Which end of the observation couple dates a migration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeSide {
    From,
    #[default]
    To,
}

/// Groups migration timestamps by rule, each list sorted ascending. By
/// default a migration is dated by its completion side.
pub fn migration_times(
    migrations: &[Migration],
    side: TimeSide,
) -> BTreeMap<MigrationRule, Vec<i64>> {
    let mut map: BTreeMap<MigrationRule, Vec<i64>> = BTreeMap::new();
    for migration in migrations {
        let ts = match side {
            TimeSide::From => migration.from_time,
            TimeSide::To => migration.to_time,
        };
        map.entry(migration.rule()).or_default().push(ts);
    }
    for times in map.values_mut() {
        times.sort_unstable();
    }
    map
}

/// Commits, distinct commit days and distinct authors spent inside one
/// migration's observation window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffortRecord {
    pub migration: Migration,
    pub n_commits: u32,
    pub n_days: u32,
    pub n_authors: u32,
}

/// Measures effort over the window (from_time, to_time]. A window with no
/// commit records floors at (1,1,1): the migration itself is evidence of
/// one commit.
pub fn effort(migration: &Migration, commits: &[CommitRecord]) -> EffortRecord {
    let mut n_commits = 0u32;
    let mut days = BTreeSet::new();
    let mut authors = BTreeSet::new();
    for commit in commits {
        if commit.project != migration.project {
            continue;
        }
        if commit.timestamp > migration.from_time && commit.timestamp <= migration.to_time {
            n_commits += 1;
            let date = Utc
                .timestamp_opt(commit.timestamp, 0)
                .single()
                .map(|dt| dt.date_naive())
                .expect("valid unix timestamp");
            days.insert(date);
            authors.insert(commit.author.clone());
        }
    }
    if n_commits == 0 {
        return EffortRecord {
            migration: migration.clone(),
            n_commits: 1,
            n_days: 1,
            n_authors: 1,
        };
    }
    EffortRecord {
        migration: migration.clone(),
        n_commits,
        n_days: days.len() as u32,
        n_authors: authors.len() as u32,
    }
}

/// Percentage distribution over the value buckets 1..9 and >=10, one row
/// per effort dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EffortTable {
    pub commits: [f64; 10],
    pub days: [f64; 10],
    pub authors: [f64; 10],
}

fn bucket(value: u32) -> usize {
    debug_assert!(value >= 1);
    (value.min(10) - 1) as usize
}

pub fn effort_distribution(records: &[EffortRecord]) -> Result<EffortTable, TrendsError> {
    if records.is_empty() {
        return Err(TrendsError::NoRecords);
    }
    let mut commits = [0u64; 10];
    let mut days = [0u64; 10];
    let mut authors = [0u64; 10];
    for record in records {
        commits[bucket(record.n_commits)] += 1;
        days[bucket(record.n_days)] += 1;
        authors[bucket(record.n_authors)] += 1;
    }
    let total = records.len() as f64;
    let to_pct = |counts: [u64; 10]| counts.map(|c| 100.0 * c as f64 / total);
    Ok(EffortTable {
        commits: to_pct(commits),
        days: to_pct(days),
        authors: to_pct(authors),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{LibraryId, ProjectId, Snapshot};

    fn history(deps_per_version: &[&[&str]]) -> DependencyHistory {
        let project = ProjectId::new("o", "p").unwrap();
        let snapshots = deps_per_version
            .iter()
            .enumerate()
            .map(|(pos, deps)| Snapshot {
                index: (pos + 1) as u32,
                timestamp: (pos as i64 + 1) * 86_400,
                dependencies: deps.iter().map(|d| LibraryId::parse(d).unwrap()).collect(),
            })
            .collect();
        DependencyHistory::new(project, snapshots).unwrap()
    }

    #[test]
    fn reintroduction_counts_twice() {
        let h = history(&[&["x:lib"], &["x:lib"], &[], &[], &["x:lib"]]);
        assert_eq!(introductions(&h, "lib"), 2);
    }

    #[test]
    fn absent_library_has_no_introductions() {
        let h = history(&[&["x:other"], &[]]);
        assert_eq!(introductions(&h, "lib"), 0);
    }

    /// The toy popularity diagram: 5 junit introductions, 3 testng, 8 total
    /// for the category.
    #[test]
    fn toy_category_introduction_totals() {
        let junit_histories = [
            history(&[&["junit:junit"], &["junit:junit"]]),
            history(&[&["junit:junit"], &["junit:junit"], &[]]),
            history(&[&[], &["junit:junit"]]),
            history(&[&[], &["junit:junit"], &[], &["junit:junit"]]),
        ];
        let testng_histories = [
            history(&[&["org.testng:testng"], &["org.testng:testng"]]),
            history(&[&[], &["org.testng:testng"]]),
            history(&[&["org.testng:testng"], &[]]),
        ];
        let junit: u32 = junit_histories
            .iter()
            .map(|h| introductions(h, "junit"))
            .sum();
        let testng: u32 = testng_histories
            .iter()
            .map(|h| introductions(h, "testng"))
            .sum();
        assert_eq!(junit, 5);
        assert_eq!(testng, 3);
        assert_eq!(junit + testng, 8);
    }

    #[test]
    fn constant_user_yields_constant_series() {
        let histories = vec![history(&[&["x:lib"], &["x:lib"], &["x:lib"]])];
        let category = BTreeSet::from(["lib".to_string()]);
        let series = popularity_series(&histories, &category, 1);
        assert_eq!(series.len(), 1);
        assert!(!series[0].buckets.is_empty());
        assert!(series[0].buckets.iter().all(|(_, count)| *count == 1));
    }

    #[test]
    fn adoption_steps_zero_to_one() {
        let histories = vec![history(&[&[], &[], &["x:lib"], &["x:lib"]])];
        let category = BTreeSet::from(["lib".to_string()]);
        let series = popularity_series(&histories, &category, 1);
        let counts: Vec<u64> = series[0].buckets.iter().map(|(_, c)| *c).collect();
        assert_eq!(counts, vec![0, 0, 1, 1]);
    }

    #[test]
    fn empty_category_empty_list() {
        let histories = vec![history(&[&["x:lib"], &[]])];
        let series = popularity_series(&histories, &BTreeSet::new(), 14);
        assert!(series.is_empty());
    }

    #[test]
    fn bucket_counts_never_exceed_project_count() {
        let histories = vec![
            history(&[&["x:lib"], &["x:lib"]]),
            history(&[&[], &["x:lib"]]),
            history(&[&["x:lib"], &[]]),
        ];
        let category = BTreeSet::from(["lib".to_string(), "ghost".to_string()]);
        for series in popularity_series(&histories, &category, 1) {
            for (_, count) in &series.buckets {
                assert!(*count <= 3);
            }
            if series.library == "ghost" {
                assert!(series.buckets.iter().all(|(_, c)| *c == 0));
            }
        }
    }

    fn migration(source: &str, target: &str, from_time: i64, to_time: i64) -> Migration {
        Migration {
            project: ProjectId::new("o", "p").unwrap(),
            from_index: 1,
            to_index: 2,
            from_time,
            to_time,
            source: LibraryId::parse(source).unwrap(),
            target: LibraryId::parse(target).unwrap(),
        }
    }

    #[test]
    fn times_grouped_and_sorted_per_rule() {
        let migrations = vec![
            migration("a:s", "b:t", 10, 300),
            migration("a:s", "b:t", 20, 100),
            migration("c:u", "d:v", 30, 200),
            migration("a:s", "b:t", 40, 250),
        ];
        let map = migration_times(&migrations, TimeSide::To);
        assert_eq!(map.len(), 2);
        assert_eq!(map[&MigrationRule::new("s", "t")], vec![100, 250, 300]);
        assert_eq!(map[&MigrationRule::new("u", "v")], vec![200]);
        let from_side = migration_times(&migrations, TimeSide::From);
        assert_eq!(from_side[&MigrationRule::new("s", "t")], vec![10, 20, 40]);
    }

    #[test]
    fn no_migrations_empty_map() {
        assert!(migration_times(&[], TimeSide::To).is_empty());
    }

    fn commit(ts: i64, author: &str) -> CommitRecord {
        CommitRecord {
            project: ProjectId::new("o", "p").unwrap(),
            id: format!("c{ts}"),
            timestamp: ts,
            author: author.to_string(),
            message: "work".to_string(),
        }
    }

    #[test]
    fn single_commit_window() {
        let m = migration("a:s", "b:t", 100, 200);
        let record = effort(&m, &[commit(150, "alice")]);
        assert_eq!(
            (record.n_commits, record.n_days, record.n_authors),
            (1, 1, 1)
        );
    }

    #[test]
    fn multi_day_multi_author_window() {
        let m = migration("a:s", "b:t", 0, 200_000);
        let commits = [
            commit(1_000, "alice"),
            commit(2_000, "bob"),
            commit(100_000, "alice"), // next UTC day
        ];
        let record = effort(&m, &commits);
        assert_eq!(
            (record.n_commits, record.n_days, record.n_authors),
            (3, 2, 2)
        );
    }

    #[test]
    fn empty_window_floors_at_one() {
        let m = migration("a:s", "b:t", 100, 200);
        let record = effort(&m, &[commit(999, "alice")]);
        assert_eq!(
            (record.n_commits, record.n_days, record.n_authors),
            (1, 1, 1)
        );
    }

    #[test]
    fn window_is_half_open() {
        let m = migration("a:s", "b:t", 100, 200);
        // at from_time: excluded; at to_time: included
        let record = effort(&m, &[commit(100, "a"), commit(200, "b")]);
        assert_eq!(record.n_commits, 1);
    }

    #[test]
    fn other_projects_commits_ignored() {
        let m = migration("a:s", "b:t", 0, 1000);
        let mut foreign = commit(500, "alice");
        foreign.project = ProjectId::new("other", "q").unwrap();
        let record = effort(&m, &[foreign]);
        assert_eq!(record.n_commits, 1, "floor convention applies");
    }

    #[test]
    fn effort_relations_hold() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let m = migration("a:s", "b:t", 0, 1_000_000);
            let n = rng.gen_range(0..20);
            let commits: Vec<CommitRecord> = (0..n)
                .map(|i| {
                    let mut c = commit(rng.gen_range(1..=1_000_000), "");
                    c.author = format!("dev{}", rng.gen_range(0..4));
                    c.id = format!("c{i}");
                    c
                })
                .collect();
            let record = effort(&m, &commits);
            assert!(record.n_authors <= record.n_commits);
            assert!(record.n_days <= record.n_commits);
            assert!(record.n_commits >= 1 && record.n_days >= 1 && record.n_authors >= 1);
        }
    }

    #[test]
    fn all_single_commit_records() {
        let m = migration("a:s", "b:t", 100, 200);
        let records = vec![effort(&m, &[]); 8];
        let table = effort_distribution(&records).unwrap();
        assert_eq!(table.commits[0], 100.0);
        assert_eq!(table.days[0], 100.0);
        assert_eq!(table.authors[0], 100.0);
    }

    #[test]
    fn big_values_land_in_overflow_bucket() {
        let m = migration("a:s", "b:t", 100, 200);
        let mut record = effort(&m, &[]);
        record.n_commits = 12;
        record.n_days = 3;
        record.n_authors = 2;
        let table = effort_distribution(&[record]).unwrap();
        assert_eq!(table.commits[9], 100.0);
        assert_eq!(table.days[2], 100.0);
        assert_eq!(table.authors[1], 100.0);
    }

    #[test]
    fn rows_sum_to_one_hundred() {
        let m = migration("a:s", "b:t", 100, 200);
        let mut records = Vec::new();
        for (count, value) in [(7u32, 1u32), (3, 2), (5, 11)] {
            for _ in 0..count {
                let mut r = effort(&m, &[]);
                r.n_commits = value;
                records.push(r);
            }
        }
        let table = effort_distribution(&records).unwrap();
        let sum: f64 = table.commits.iter().sum();
        assert!((sum - 100.0).abs() < 0.1);
    }
}

//! Command-line front end wiring the pipeline stages together. Stages
//! communicate only through documented files so any stage can be re-run
//! in isolation.

mod formats;
mod review;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use migmine::graph::{
    build_graph, categories, detect_patterns, export_dot, to_json, PatternConfig, WeightSource,
};
use migmine::ingest::{
    compare_versions, parse_library_index, parse_pom, parse_snapshot_log, resolve_libraries,
    scan_imports, write_snapshot_log,
};
use migmine::knowledge::{load_knowledge, save_knowledge};
use migmine::loglens::index_logs;
use migmine::mining::{mine_histories, rules_csv, MineConfig, RuleThresholds};
use migmine::model::{DependencyHistory, MigrationRule, ProjectId, Snapshot};
use migmine::svg;
use migmine::synth::{generate, step_sweep, sweep_csv, SynthConfig};
use migmine::trends::{
    effort, effort_distribution, introductions, migration_times, popularity_series, TimeSide,
};

#[derive(Parser)]
#[command(name = "migmine", version, about = "Library-migration mining toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert manifests, import scans or raw snapshot logs into the
    /// canonical snapshot-log corpus format.
    Ingest(IngestArgs),
    /// Mine migration rules from a snapshot-log corpus.
    Mine(MineArgs),
    /// Interactively rate mined rules as seed or banned.
    Review(ReviewArgs),
    /// Build the migration graph, categories and pattern annotations.
    Graph(GraphArgs),
    /// Compute introductions, popularity series, migration times and effort.
    Trends(TrendsArgs),
    /// Search commit logs mentioning both sides of a rule.
    Logsearch(LogsearchArgs),
    /// Generate a synthetic corpus with known ground truth.
    Synth(SynthArgs),
    /// Evaluate mining at several sampling steps against ground truth.
    Sweep(SweepArgs),
    /// Render a Markdown summary of a pipeline output directory.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum IngestFormat {
    Pom,
    Snaplog,
    Imports,
}

#[derive(Args)]
struct CommonOut {
    /// Output directory for artifacts and the run manifest.
    #[arg(long)]
    out: PathBuf,
    /// Omit timestamps from the run manifest so reruns are byte-identical.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Args)]
struct IngestArgs {
    /// Input format: pom and imports take a TSV listing file, snaplog a log.
    #[arg(long, value_enum)]
    format: IngestFormat,
    /// Input file: the snapshot log, or the listing for pom/imports.
    #[arg(long = "in")]
    input: PathBuf,
    /// Library index file (required for --format imports).
    #[arg(long)]
    index: Option<PathBuf>,
    #[command(flatten)]
    common: CommonOut,
}

#[derive(Args)]
struct MineArgs {
    /// Snapshot-log corpus.
    #[arg(long = "in")]
    input: PathBuf,
    /// Sampling step between observed version couples.
    #[arg(long, default_value_t = 30)]
    step: u32,
    #[arg(long = "min-score", default_value_t = 4)]
    min_score: u32,
    #[arg(long = "min-groups", default_value_t = 2)]
    min_groups: u32,
    #[arg(long = "bidir-min-score", default_value_t = 2)]
    bidir_min_score: u32,
    /// Confidence threshold t_c.
    #[arg(long, default_value_t = 0.06)]
    tc: f64,
    /// Knowledge base whose seeds are excised during candidate generation.
    #[arg(long)]
    seeds: Option<PathBuf>,
    /// Worker count for per-project mining; results are identical for any
    /// value.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[command(flatten)]
    common: CommonOut,
}

#[derive(Args)]
struct ReviewArgs {
    /// rules.csv from the mine stage.
    #[arg(long)]
    rules: PathBuf,
    /// Knowledge base file; created if missing, rewritten with new verdicts.
    #[arg(long)]
    kb: PathBuf,
    /// Commit log for justification lookups.
    #[arg(long)]
    logs: Option<PathBuf>,
    /// Annotator name recorded with each verdict.
    #[arg(long, default_value = "reviewer")]
    annotator: String,
}

#[derive(Args)]
struct GraphArgs {
    /// scoreboard.json from the mine stage.
    #[arg(long)]
    board: PathBuf,
    /// Snapshot-log corpus for latest-snapshot user counts.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "owners")]
    weight: WeightArg,
    #[arg(long = "min-score", default_value_t = 4)]
    min_score: u32,
    #[arg(long = "min-groups", default_value_t = 2)]
    min_groups: u32,
    #[arg(long = "bidir-min-score", default_value_t = 2)]
    bidir_min_score: u32,
    #[arg(long, default_value_t = 0.06)]
    tc: f64,
    #[arg(long, default_value_t = 5)]
    volume: u64,
    #[arg(long, default_value_t = 3)]
    dominance: u64,
    #[arg(long = "pong-min", default_value_t = 2)]
    pong_min: u64,
    #[arg(long = "pong-ratio", default_value_t = 2.0)]
    pong_ratio: f64,
    #[arg(long = "challenger-min", default_value_t = 3)]
    challenger_min: u64,
    #[command(flatten)]
    common: CommonOut,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightArg {
    Owners,
    Projects,
}

#[derive(Clone, Copy, ValueEnum)]
enum TimeSideArg {
    From,
    To,
}

#[derive(Args)]
struct TrendsArgs {
    /// Snapshot-log corpus.
    #[arg(long = "in")]
    input: PathBuf,
    /// migrations.jsonl from the mine stage.
    #[arg(long)]
    migrations: PathBuf,
    /// Knowledge base; when given, only seed-validated migrations count.
    #[arg(long)]
    kb: Option<PathBuf>,
    /// Commit log enabling the effort table.
    #[arg(long)]
    logs: Option<PathBuf>,
    /// Popularity bucket width in days.
    #[arg(long = "bucket-days", default_value_t = 14)]
    bucket_days: u32,
    /// Which side of the couple dates a migration.
    #[arg(long = "time-side", value_enum, default_value = "to")]
    time_side: TimeSideArg,
    #[command(flatten)]
    common: CommonOut,
}

#[derive(Args)]
struct LogsearchArgs {
    #[arg(long)]
    logs: PathBuf,
    /// Source library name.
    #[arg(long)]
    source: String,
    /// Target library name.
    #[arg(long)]
    target: String,
    #[arg(long, default_value_t = 20)]
    limit: usize,
}

#[derive(Args)]
struct SynthArgs {
    /// Generator config (JSON, see README for the schema).
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    common: CommonOut,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Comma-separated sampling steps to evaluate.
    #[arg(long, value_delimiter = ',', default_value = "1,5,15,30,60")]
    steps: Vec<u32>,
    #[command(flatten)]
    common: CommonOut,
}

#[derive(Args)]
struct ReportArgs {
    /// Directory holding rules.csv / graph.json / categories.csv artifacts.
    #[arg(long)]
    dir: PathBuf,
    #[command(flatten)]
    common: CommonOut,
}

/// Data errors exit with 2, usage errors with 1.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    let result = match cli.command {
        Command::Ingest(args) => cmd_ingest(args),
        Command::Mine(args) => cmd_mine(args),
        Command::Review(args) => cmd_review(args),
        Command::Graph(args) => cmd_graph(args),
        Command::Trends(args) => cmd_trends(args),
        Command::Logsearch(args) => cmd_logsearch(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Report(args) => cmd_report(args),
    };
    match result {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_artifact(dir: &Path, name: &str, content: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn write_manifest(common: &CommonOut, subcommand: &str, inputs: &[&Path]) -> Result<()> {
    let mut manifest = serde_json::json!({
        "tool": "migmine",
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": subcommand,
        "argv": std::env::args().skip(1).collect::<Vec<String>>(),
        "inputs": inputs.iter().map(|p| p.display().to_string()).collect::<Vec<String>>(),
    });
    if !common.deterministic {
        manifest["created_at"] = serde_json::json!(chrono::Utc::now().to_rfc3339());
    }
    write_artifact(
        &common.out,
        "manifest.json",
        &format!("{}\n", serde_json::to_string_pretty(&manifest)?),
    )
}

fn load_corpus(path: &Path) -> Result<Vec<DependencyHistory>> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    parse_snapshot_log(BufReader::new(file)).map_err(Into::into)
}

fn cmd_ingest(args: IngestArgs) -> Result<()> {
    let histories = match args.format {
        IngestFormat::Snaplog => load_corpus(&args.input)?,
        IngestFormat::Pom => {
            // listing: one "<ts>\t<path>" per line, project taken from the POM
            let listing = read(&args.input)?;
            let mut raw: Corpus = BTreeMap::new();
            let mut skipped_deps = 0u32;
            for (lineno, line) in listing.lines().enumerate() {
                let trimmed = line.trim();
                if trimmed.is_empty() || trimmed.starts_with('#') {
                    continue;
                }
                let (ts, path) = trimmed.split_once('\t').with_context(|| {
                    format!("listing line {}: expected ts<TAB>path", lineno + 1)
                })?;
                let ts: i64 = ts.trim().parse().context("timestamp")?;
                let parsed = parse_pom(&read(Path::new(path.trim()))?)
                    .with_context(|| format!("parsing {path}"))?;
                skipped_deps += parsed.skipped;
                raw.entry(parsed.project).or_default().push((
                    ts,
                    parsed.version,
                    parsed.dependencies,
                ));
            }
            if skipped_deps > 0 {
                eprintln!("warning: skipped {skipped_deps} dependency entries missing coordinates");
            }
            build_histories(raw)?
        }
        IngestFormat::Imports => {
            // listing: one "<project>\t<ts>\t<path>" per line
            let index_path = args
                .index
                .as_ref()
                .context("--format imports requires --index")?;
            let index = parse_library_index(&read(index_path)?)?;
            let listing = read(&args.input)?;
            let mut raw: Corpus = BTreeMap::new();
            let mut ambiguous = 0usize;
            for (lineno, line) in listing.lines().enumerate() {
                let trimmed = line.trim();
                if trimmed.is_empty() || trimmed.starts_with('#') {
                    continue;
                }
                let fields: Vec<&str> = trimmed.split('\t').collect();
                if fields.len() != 3 {
                    bail!(
                        "listing line {}: expected project<TAB>ts<TAB>path",
                        lineno + 1
                    );
                }
                let project = ProjectId::parse(fields[0].trim())?;
                let ts: i64 = fields[1].trim().parse().context("timestamp")?;
                let names = scan_imports(&read(Path::new(fields[2].trim()))?);
                let resolution = resolve_libraries(&names, &index);
                ambiguous += resolution.ambiguities.len();
                raw.entry(project)
                    .or_default()
                    .push((ts, None, resolution.libraries));
            }
            if ambiguous > 0 {
                eprintln!("warning: {ambiguous} ambiguous qualified names left unresolved");
            }
            build_histories(raw)?
        }
    };
    write_artifact(
        &args.common.out,
        "corpus.snaplog",
        &write_snapshot_log(&histories),
    )?;
    write_manifest(&args.common, "ingest", &[&args.input])
}

type Corpus = BTreeMap<ProjectId, Vec<(i64, Option<String>, BTreeSet<migmine::LibraryId>)>>;

fn build_histories(raw: Corpus) -> Result<Vec<DependencyHistory>> {
    let mut histories = Vec::with_capacity(raw.len());
    for (project, mut snaps) in raw {
        // chronological; the version scheme breaks timestamp ties
        snaps.sort_by(|a, b| {
            a.0.cmp(&b.0).then_with(|| {
                compare_versions(a.1.as_deref().unwrap_or(""), b.1.as_deref().unwrap_or(""))
            })
        });
        let snapshots = snaps
            .into_iter()
            .enumerate()
            .map(|(pos, (ts, _, deps))| Snapshot {
                index: (pos + 1) as u32,
                timestamp: ts,
                dependencies: deps,
            })
            .collect();
        histories.push(DependencyHistory::new(project, snapshots)?);
    }
    Ok(histories)
}

fn cmd_mine(args: MineArgs) -> Result<()> {
    let histories = load_corpus(&args.input)?;
    let seeds: BTreeSet<MigrationRule> = match &args.seeds {
        Some(path) => load_knowledge(&read(path)?)?.seeds().clone(),
        None => BTreeSet::new(),
    };
    let config = MineConfig {
        step: args.step,
        thresholds: RuleThresholds {
            min_score: args.min_score,
            min_groups: args.min_groups,
            bidir_min_score: args.bidir_min_score,
        },
        min_confidence: args.tc,
    };
    let jobs = if args.jobs == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        args.jobs
    };
    let output = mine_histories(&histories, &seeds, &config, jobs);

    write_artifact(&args.common.out, "rules.csv", &rules_csv(&output.retained))?;
    let board = formats::ScoreboardFile::from_output(&output);
    write_artifact(
        &args.common.out,
        "scoreboard.json",
        &format!("{}\n", serde_json::to_string_pretty(&board)?),
    )?;
    write_artifact(
        &args.common.out,
        "migrations.jsonl",
        &formats::migrations_jsonl(&output.candidates),
    )?;
    let mut inputs: Vec<&Path> = vec![&args.input];
    if let Some(seeds) = &args.seeds {
        inputs.push(seeds);
    }
    write_manifest(&args.common, "mine", &inputs)
}

fn cmd_review(args: ReviewArgs) -> Result<()> {
    let rows = formats::parse_rules_csv(&read(&args.rules)?)?;
    let mut kb = if args.kb.exists() {
        load_knowledge(&read(&args.kb)?)?
    } else {
        Default::default()
    };
    let logs = match &args.logs {
        Some(path) => {
            let file =
                fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
            Some(index_logs(BufReader::new(file))?)
        }
        None => None,
    };
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    let outcome = review::run_review(
        &mut kb,
        &rows,
        logs.as_ref(),
        &mut stdin.lock(),
        &mut stdout.lock(),
        &args.annotator,
        chrono::Utc::now().timestamp(),
    )?;
    fs::write(&args.kb, save_knowledge(&kb))
        .with_context(|| format!("writing {}", args.kb.display()))?;
    println!(
        "\nrecorded {} verdict(s), auto-classified {}; base now has {} seeds / {} banned",
        outcome.reviewed,
        outcome.auto_classified,
        kb.seeds().len(),
        kb.banned().len()
    );
    Ok(())
}

fn retained_from_board(
    board: &formats::ScoreboardFile,
    thresholds: RuleThresholds,
    tc: f64,
) -> Result<BTreeMap<MigrationRule, migmine::RuleStats>> {
    let merged = board.merged_rules()?;
    Ok(migmine::mining::filter_rules(&merged, thresholds)
        .into_iter()
        .filter(|(_, stats)| stats.confidence >= tc)
        .collect())
}

fn cmd_graph(args: GraphArgs) -> Result<()> {
    let board: formats::ScoreboardFile = serde_json::from_str(&read(&args.board)?)
        .with_context(|| format!("parsing {}", args.board.display()))?;
    let thresholds = RuleThresholds {
        min_score: args.min_score,
        min_groups: args.min_groups,
        bidir_min_score: args.bidir_min_score,
    };
    let retained = retained_from_board(&board, thresholds, args.tc)?;
    let usage = match &args.input {
        Some(path) => formats::usage_counts(&load_corpus(path)?),
        None => BTreeMap::new(),
    };
    let weight = match args.weight {
        WeightArg::Owners => WeightSource::Owners,
        WeightArg::Projects => WeightSource::Projects,
    };
    let graph = build_graph(&retained, &usage, weight);
    let config = PatternConfig {
        volume: args.volume,
        dominance: args.dominance,
        pong_min: args.pong_min,
        pong_ratio: args.pong_ratio,
        challenger_min: args.challenger_min,
    };
    let patterns = detect_patterns(&graph, &config);

    write_artifact(
        &args.common.out,
        "graph.dot",
        &export_dot(&graph, &patterns),
    )?;
    write_artifact(
        &args.common.out,
        "graph.json",
        &format!("{}\n", to_json(&graph, &patterns)),
    )?;
    let mut categories_csv = String::from("category,members\n");
    for category in categories(&graph) {
        categories_csv.push_str(&format!(
            "{},{}\n",
            category.id,
            category
                .members
                .iter()
                .cloned()
                .collect::<Vec<_>>()
                .join(" ")
        ));
    }
    write_artifact(&args.common.out, "categories.csv", &categories_csv)?;
    let mut inputs: Vec<&Path> = vec![&args.board];
    if let Some(input) = &args.input {
        inputs.push(input);
    }
    write_manifest(&args.common, "graph", &inputs)
}

fn cmd_trends(args: TrendsArgs) -> Result<()> {
    let histories = load_corpus(&args.input)?;
    let all_migrations = formats::parse_migrations_jsonl(&read(&args.migrations)?)?;
    let migrations = match &args.kb {
        Some(path) => {
            let kb = load_knowledge(&read(path)?)?;
            migmine::mining::validate_migrations(&all_migrations, kb.seeds())
        }
        None => all_migrations,
    };

    // categories derived from the migrations' rules (unit weights suffice)
    let rule_arcs: BTreeSet<(String, String)> = migrations
        .iter()
        .map(|m| (m.rule().source, m.rule().target))
        .collect();
    let graph = migmine::graph::MigrationGraph::from_arcs(
        rule_arcs.into_iter().map(|(s, t)| (s, t, 1)),
        &BTreeMap::new(),
    );
    let cats = categories(&graph);

    let mut intro_csv = String::from("category,library,introductions\n");
    for category in &cats {
        for library in &category.members {
            let total: u32 = histories.iter().map(|h| introductions(h, library)).sum();
            intro_csv.push_str(&format!("{},{library},{total}\n", category.id));
        }
    }
    write_artifact(&args.common.out, "introductions.csv", &intro_csv)?;

    for category in &cats {
        let series = popularity_series(&histories, &category.members, args.bucket_days);
        for s in &series {
            let mut csv = String::from("bucket_start,count\n");
            for (start, count) in &s.buckets {
                csv.push_str(&format!("{start},{count}\n"));
            }
            write_artifact(
                &args.common.out,
                &format!("popularity_{}_{}.csv", category.id, s.library),
                &csv,
            )?;
        }
        let chart: Vec<(String, Vec<(f64, f64)>)> = series
            .iter()
            .map(|s| {
                (
                    s.library.clone(),
                    s.buckets
                        .iter()
                        .map(|(t, c)| (*t as f64, *c as f64))
                        .collect(),
                )
            })
            .collect();
        write_artifact(
            &args.common.out,
            &format!("popularity_{}.svg", category.id),
            &svg::line_chart(&format!("popularity of category {}", category.id), &chart),
        )?;
    }

    let side = match args.time_side {
        TimeSideArg::From => TimeSide::From,
        TimeSideArg::To => TimeSide::To,
    };
    let times = migration_times(&migrations, side);
    let mut times_csv = String::from("rule,timestamp\n");
    for (rule, stamps) in &times {
        for ts in stamps {
            times_csv.push_str(&format!("{} -> {},{ts}\n", rule.source, rule.target));
        }
    }
    write_artifact(&args.common.out, "migration_times.csv", &times_csv)?;
    let rows: Vec<(String, Vec<f64>)> = times
        .iter()
        .map(|(rule, stamps)| {
            (
                format!("{} -> {}", rule.source, rule.target),
                stamps.iter().map(|t| *t as f64).collect(),
            )
        })
        .collect();
    write_artifact(
        &args.common.out,
        "migration_times.svg",
        &svg::scatter_chart("migration times", &rows),
    )?;

    if let Some(path) = &args.logs {
        let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let index = index_logs(BufReader::new(file))?;
        let records: Vec<_> = migrations
            .iter()
            .map(|m| effort(m, index.records()))
            .collect();
        if !records.is_empty() {
            let table = effort_distribution(&records)?;
            let mut csv = String::from("dimension,b1,b2,b3,b4,b5,b6,b7,b8,b9,b10plus\n");
            for (name, row) in [
                ("commits", &table.commits),
                ("days", &table.days),
                ("authors", &table.authors),
            ] {
                let cells: Vec<String> = row.iter().map(|v| format!("{v:.1}")).collect();
                csv.push_str(&format!("{name},{}\n", cells.join(",")));
            }
            write_artifact(&args.common.out, "effort.csv", &csv)?;
        }
        write_group_stats(&args.common.out, &histories, &migrations, &index)?;
    }

    let mut inputs: Vec<&Path> = vec![&args.input, &args.migrations];
    if let Some(kb) = &args.kb {
        inputs.push(kb);
    }
    if let Some(logs) = &args.logs {
        inputs.push(logs);
    }
    write_manifest(&args.common, "trends", &inputs)
}

/// Groups projects into commit-count deciles and tests whether migrations
/// distribute proportionally to group size.
fn write_group_stats(
    out: &Path,
    histories: &[DependencyHistory],
    migrations: &[migmine::Migration],
    index: &migmine::loglens::LogIndex,
) -> Result<()> {
    use migmine::stats::{chi_squared, decile_group, deciles};

    let mut commit_counts: BTreeMap<&ProjectId, u64> = BTreeMap::new();
    for commit in index.records() {
        *commit_counts.entry(&commit.project).or_insert(0) += 1;
    }
    let project_metric: Vec<(&ProjectId, f64)> = histories
        .iter()
        .map(|h| {
            let project = h.project();
            (
                project,
                commit_counts.get(project).copied().unwrap_or(0) as f64,
            )
        })
        .collect();
    if project_metric.len() < 10 {
        return Ok(()); // too few projects to form deciles
    }
    let values: Vec<f64> = project_metric.iter().map(|(_, v)| *v).collect();
    let bounds = deciles(&values)?;

    let mut group_sizes = [0u64; 10];
    let mut group_of: BTreeMap<&ProjectId, usize> = BTreeMap::new();
    for (project, value) in &project_metric {
        let group = decile_group(*value, &bounds);
        group_sizes[group - 1] += 1;
        group_of.insert(project, group);
    }
    let mut observed = [0u64; 10];
    for migration in migrations {
        if let Some(group) = group_of.get(&migration.project) {
            observed[group - 1] += 1;
        }
    }

    let mut csv = String::from("group,upper_bound,projects,migrations\n");
    for i in 0..10 {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            i + 1,
            bounds[i],
            group_sizes[i],
            observed[i]
        ));
    }
    // the test needs every group populated and at least one migration
    let total_observed: u64 = observed.iter().sum();
    if group_sizes.iter().all(|&s| s > 0) && total_observed > 0 {
        let result = chi_squared(&observed, &group_sizes)?;
        csv.push_str(&format!(
            "# chi-squared statistic={:.4} df={} p-value={:.6e}\n",
            result.statistic, result.df, result.p_value
        ));
    }
    write_artifact(out, "group_stats.csv", &csv)
}

fn cmd_logsearch(args: LogsearchArgs) -> Result<()> {
    let file =
        fs::File::open(&args.logs).with_context(|| format!("opening {}", args.logs.display()))?;
    let index = index_logs(BufReader::new(file))?;
    let rule = MigrationRule::new(args.source, args.target);
    let hits = index.search(&rule);
    for commit in hits.iter().take(args.limit) {
        println!(
            "{}  {}  {}  {}",
            commit.timestamp, commit.project, commit.id, commit.message
        );
    }
    if hits.is_empty() {
        println!(
            "no commit logs mention both {} and {}",
            rule.source, rule.target
        );
    }
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let config: SynthConfig = serde_json::from_str(&read(&args.config)?)
        .with_context(|| format!("parsing {}", args.config.display()))?;
    let corpus = generate(&config);
    write_artifact(
        &args.common.out,
        "corpus.snaplog",
        &format!(
            "# synthetic corpus, seed {}\n{}",
            config.rng_seed,
            write_snapshot_log(&corpus.histories)
        ),
    )?;
    let mut commits = String::new();
    for c in &corpus.commits {
        commits.push_str(
            &serde_json::json!({
                "project": c.project.to_string(),
                "id": c.id,
                "ts": c.timestamp,
                "author": c.author,
                "msg": c.message,
            })
            .to_string(),
        );
        commits.push('\n');
    }
    write_artifact(&args.common.out, "commits.jsonl", &commits)?;
    let truth: Vec<serde_json::Value> = corpus
        .truth
        .planted
        .iter()
        .map(|p| {
            serde_json::json!({
                "project": p.migration.project.to_string(),
                "from_index": p.migration.from_index,
                "to_index": p.migration.to_index,
                "source": p.migration.source.to_string(),
                "target": p.migration.target.to_string(),
                "scenario": format!("{:?}", p.scenario),
            })
        })
        .collect();
    write_artifact(
        &args.common.out,
        "truth.json",
        &format!("{}\n", serde_json::to_string_pretty(&truth)?),
    )?;
    write_manifest(&args.common, "synth", &[&args.config])
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    if args.steps.is_empty() {
        bail!("--steps must list at least one step");
    }
    let config: SynthConfig = serde_json::from_str(&read(&args.config)?)
        .with_context(|| format!("parsing {}", args.config.display()))?;
    let corpus = generate(&config);
    let rows = step_sweep(&corpus.histories, &corpus.truth, &args.steps);
    write_artifact(&args.common.out, "sweep.csv", &sweep_csv(&rows))?;
    write_manifest(&args.common, "sweep", &[&args.config])
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    let mut report = String::from("# Migration mining report\n");

    let rules_path = args.dir.join("rules.csv");
    if rules_path.exists() {
        let rows = formats::parse_rules_csv(&read(&rules_path)?)?;
        report.push_str("\n## Most observed migrations\n\n");
        report.push_str("| Source | Target | Groups | Score | Confidence |\n");
        report.push_str("|---|---|---:|---:|---:|\n");
        for row in rows.iter().take(15) {
            report.push_str(&format!(
                "| {} | {} | {} | {} | {:.4} |\n",
                row.rule.source, row.rule.target, row.groups, row.score, row.confidence
            ));
        }
        report.push_str(&format!(
            "\n{} retained rule(s) in [rules.csv](rules.csv).\n",
            rows.len()
        ));
    }

    let graph_path = args.dir.join("graph.json");
    if graph_path.exists() {
        let graph = migmine::graph::from_json(&read(&graph_path)?)?;
        let cats = categories(&graph);
        report.push_str(&format!(
            "\n## Categories\n\n{} categories over {} libraries ([graph.dot](graph.dot), [graph.json](graph.json)).\n\n",
            cats.len(),
            graph.nodes().len()
        ));
        for category in &cats {
            report.push_str(&format!(
                "- category {}: {}\n",
                category.id,
                category
                    .members
                    .iter()
                    .cloned()
                    .collect::<Vec<_>>()
                    .join(", ")
            ));
        }
        let patterns = detect_patterns(&graph, &PatternConfig::default());
        if !patterns.is_empty() {
            report.push_str("\n## Patterns\n\n");
            for hit in &patterns {
                report.push_str(&format!("- {}: {}\n", hit.element, hit.tag.label()));
            }
        }
    }

    for artifact in [
        "introductions.csv",
        "migration_times.csv",
        "effort.csv",
        "sweep.csv",
    ] {
        if args.dir.join(artifact).exists() {
            report.push_str(&format!("\nSee [{artifact}]({artifact}).\n"));
        }
    }

    write_artifact(&args.common.out, "report.md", &report)?;
    write_manifest(&args.common, "report", &[&args.dir])
}

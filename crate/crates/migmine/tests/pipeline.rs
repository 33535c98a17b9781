//! End-to-end runs of the compiled binary: synth -> mine -> graph -> trends
//! -> report, plus exit-code and rerun-determinism checks.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_migmine"))
}

fn run_ok(args: &[&str]) {
    let output = bin().args(args).output().expect("binary runs");
    assert!(
        output.status.success(),
        "migmine {:?} failed:\n{}\n{}",
        args,
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

fn synth_config(dir: &Path) -> PathBuf {
    let path = dir.join("synth.json");
    fs::write(
        &path,
        serde_json::json!({
            "n_projects": 150,
            "n_snapshots": 30,
            "n_libraries": 16,
            "migration_rate": 0.8,
            "alias_rate": 0.2,
            "loopback_rate": 0.0,
            "bounce_rate": 0.1,
            "rng_seed": 4242
        })
        .to_string(),
    )
    .unwrap();
    path
}

#[test]
fn full_pipeline_produces_consistent_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();
    let config = synth_config(root);

    let synth_dir = root.join("synth");
    run_ok(&[
        "synth",
        "--config",
        config.to_str().unwrap(),
        "--out",
        synth_dir.to_str().unwrap(),
        "--deterministic",
    ]);
    let corpus = synth_dir.join("corpus.snaplog");
    assert!(corpus.exists() && synth_dir.join("commits.jsonl").exists());
    assert!(synth_dir.join("truth.json").exists());
    assert!(synth_dir.join("manifest.json").exists());

    let mine_dir = root.join("mine");
    run_ok(&[
        "mine",
        "--in",
        corpus.to_str().unwrap(),
        "--step",
        "5",
        "--tc",
        "0.0",
        "--min-score",
        "2",
        "--jobs",
        "2",
        "--out",
        mine_dir.to_str().unwrap(),
        "--deterministic",
    ]);
    let rules = read(&mine_dir.join("rules.csv"));
    assert!(rules.starts_with("source,target,score,groups,confidence,projects\n"));
    assert!(
        rules.lines().count() > 1,
        "fixture mines at least one rule:\n{rules}"
    );
    assert!(mine_dir.join("scoreboard.json").exists());
    assert!(mine_dir.join("migrations.jsonl").exists());

    let graph_dir = root.join("graph");
    run_ok(&[
        "graph",
        "--board",
        mine_dir.join("scoreboard.json").to_str().unwrap(),
        "--in",
        corpus.to_str().unwrap(),
        "--tc",
        "0.0",
        "--min-score",
        "2",
        "--out",
        graph_dir.to_str().unwrap(),
        "--deterministic",
    ]);
    let dot = read(&graph_dir.join("graph.dot"));
    assert!(dot.starts_with("digraph"));
    assert!(graph_dir.join("graph.json").exists());
    assert!(read(&graph_dir.join("categories.csv")).starts_with("category,members\n"));

    let trends_dir = root.join("trends");
    run_ok(&[
        "trends",
        "--in",
        corpus.to_str().unwrap(),
        "--migrations",
        mine_dir.join("migrations.jsonl").to_str().unwrap(),
        "--logs",
        synth_dir.join("commits.jsonl").to_str().unwrap(),
        "--out",
        trends_dir.to_str().unwrap(),
        "--deterministic",
    ]);
    assert!(
        read(&trends_dir.join("introductions.csv")).starts_with("category,library,introductions\n")
    );
    assert!(trends_dir.join("migration_times.csv").exists());
    assert!(trends_dir.join("migration_times.svg").exists());
    let popularity: Vec<PathBuf> = fs::read_dir(&trends_dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            let name = p.file_name().unwrap().to_string_lossy();
            name.starts_with("popularity_") && name.ends_with(".csv")
        })
        .collect();
    assert!(!popularity.is_empty(), "one CSV per library series");
    assert!(read(&popularity[0]).starts_with("bucket_start,count\n"));
    assert!(read(&trends_dir.join("effort.csv")).contains("commits,"));

    // collect stage outputs for the report
    let report_src = root.join("artifacts");
    fs::create_dir_all(&report_src).unwrap();
    for (dir, name) in [
        (&mine_dir, "rules.csv"),
        (&graph_dir, "graph.json"),
        (&graph_dir, "graph.dot"),
        (&trends_dir, "introductions.csv"),
        (&trends_dir, "migration_times.csv"),
        (&trends_dir, "effort.csv"),
    ] {
        fs::copy(dir.join(name), report_src.join(name)).unwrap();
    }
    let report_dir = root.join("report");
    run_ok(&[
        "report",
        "--dir",
        report_src.to_str().unwrap(),
        "--out",
        report_dir.to_str().unwrap(),
        "--deterministic",
    ]);
    let report = read(&report_dir.join("report.md"));
    assert!(report.contains("# Migration mining report"));
    assert!(report.contains("| Source | Target |"));
    assert!(report.contains("## Categories"));

    assert!(read(&trends_dir.join("group_stats.csv"))
        .starts_with("group,upper_bound,projects,migrations\n"));

    let sweep_dir = root.join("sweep");
    run_ok(&[
        "sweep",
        "--config",
        config.to_str().unwrap(),
        "--steps",
        "1,5,15,30,60",
        "--out",
        sweep_dir.to_str().unwrap(),
        "--deterministic",
    ]);
    let sweep = read(&sweep_dir.join("sweep.csv"));
    assert!(sweep.starts_with("step,candidates,tp,fp,runtime_ms\n"));
    assert_eq!(sweep.lines().count(), 6, "one row per step:\n{sweep}");
    assert!(sweep.lines().nth(1).unwrap().starts_with("1,"));

    // a seed knowledge base excises its rules from the next mining run
    let first_rule = rules.lines().nth(1).unwrap();
    let (source, target) = {
        let mut fields = first_rule.split(',');
        (fields.next().unwrap(), fields.next().unwrap())
    };
    let kb_path = root.join("seeds.csv");
    fs::write(
        &kb_path,
        format!("{source},{target},seed,tester,2013-01-01T00:00:00Z\n"),
    )
    .unwrap();
    let seeded_dir = root.join("mine_seeded");
    run_ok(&[
        "mine",
        "--in",
        corpus.to_str().unwrap(),
        "--step",
        "5",
        "--tc",
        "0.0",
        "--min-score",
        "2",
        "--seeds",
        kb_path.to_str().unwrap(),
        "--out",
        seeded_dir.to_str().unwrap(),
        "--deterministic",
    ]);
    let seeded_rules = read(&seeded_dir.join("rules.csv"));
    assert!(
        !seeded_rules.contains(&format!("{source},{target},")),
        "seeded rule must no longer be mined:\n{seeded_rules}"
    );
}

#[test]
fn pom_ingestion_builds_a_minable_corpus() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();

    let pom = |version: &str, deps: &[(&str, &str)]| {
        let mut body = String::new();
        for (group, artifact) in deps {
            body.push_str(&format!(
                "<dependency><groupId>{group}</groupId><artifactId>{artifact}</artifactId></dependency>"
            ));
        }
        format!(
            "<project><groupId>demo</groupId><artifactId>app</artifactId>\
             <version>{version}</version><dependencies>{body}</dependencies></project>"
        )
    };
    // same timestamp on the first two: the version comparator must order them
    let versions = [
        ("1.0", 1_000, vec![("junit", "junit")]),
        ("1.0-alpha", 1_000, vec![("junit", "junit")]),
        ("2.0", 2_000, vec![("org.testng", "testng")]),
    ];
    let mut listing = String::new();
    for (i, (version, ts, deps)) in versions.iter().enumerate() {
        let path = root.join(format!("pom{i}.xml"));
        fs::write(&path, pom(version, deps)).unwrap();
        listing.push_str(&format!("{ts}\t{}\n", path.display()));
    }
    let listing_path = root.join("poms.tsv");
    fs::write(&listing_path, listing).unwrap();

    let out = root.join("ingest");
    run_ok(&[
        "ingest",
        "--format",
        "pom",
        "--in",
        listing_path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--deterministic",
    ]);
    let corpus = read(&out.join("corpus.snaplog"));
    let lines: Vec<&str> = corpus.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].contains("\"index\":1"));
    assert!(
        lines[2].contains("testng"),
        "newest manifest last: {corpus}"
    );

    let mine_dir = root.join("mine");
    run_ok(&[
        "mine",
        "--in",
        out.join("corpus.snaplog").to_str().unwrap(),
        "--step",
        "1",
        "--min-score",
        "1",
        "--min-groups",
        "1",
        "--tc",
        "0.0",
        "--out",
        mine_dir.to_str().unwrap(),
        "--deterministic",
    ]);
    let rules = read(&mine_dir.join("rules.csv"));
    assert!(rules.contains("junit,testng,1,1,"), "{rules}");
}

#[test]
fn reruns_and_worker_counts_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();
    let config = synth_config(root);
    let synth_dir = root.join("synth");
    run_ok(&[
        "synth",
        "--config",
        config.to_str().unwrap(),
        "--out",
        synth_dir.to_str().unwrap(),
        "--deterministic",
    ]);
    let corpus = synth_dir.join("corpus.snaplog");

    let mut outputs = Vec::new();
    for (label, jobs) in [("a", "1"), ("b", "8"), ("c", "1")] {
        let dir = root.join(format!("mine_{label}"));
        run_ok(&[
            "mine",
            "--in",
            corpus.to_str().unwrap(),
            "--step",
            "5",
            "--tc",
            "0.0",
            "--min-score",
            "2",
            "--jobs",
            jobs,
            "--out",
            dir.to_str().unwrap(),
            "--deterministic",
        ]);
        outputs.push((
            read(&dir.join("rules.csv")),
            read(&dir.join("scoreboard.json")),
            read(&dir.join("migrations.jsonl")),
        ));
    }
    assert_eq!(
        outputs[0].0, outputs[1].0,
        "rules.csv identical for jobs 1 vs 8"
    );
    assert_eq!(
        outputs[0].1, outputs[1].1,
        "scoreboard.json identical for jobs 1 vs 8"
    );
    assert_eq!(
        outputs[0].2, outputs[1].2,
        "migrations.jsonl identical for jobs 1 vs 8"
    );
    assert_eq!(outputs[0], outputs[2], "rerun is byte-identical");

    // synth rerun determinism at the file level: identical flags twice
    let again = root.join("synth_again");
    let args = [
        "synth",
        "--config",
        config.to_str().unwrap(),
        "--out",
        again.to_str().unwrap(),
        "--deterministic",
    ];
    run_ok(&args);
    let first_manifest = read(&again.join("manifest.json"));
    let first_corpus = read(&again.join("corpus.snaplog"));
    run_ok(&args);
    assert_eq!(
        read(&again.join("manifest.json")),
        first_manifest,
        "deterministic manifests carry no timestamps"
    );
    assert_eq!(read(&again.join("corpus.snaplog")), first_corpus);
    assert_eq!(
        first_corpus,
        read(&corpus),
        "same config, same corpus, any out dir"
    );
}

#[test]
fn review_session_appends_verdicts_via_stdin() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();

    let rules = "source,target,score,groups,confidence,projects\n\
                 log4j,slf4j-api,11,5,0.5000,11\n\
                 slf4j-api,log4j,3,3,0.2000,3\n\
                 junit,qux,4,2,0.1000,4\n";
    let rules_path = root.join("rules.csv");
    fs::write(&rules_path, rules).unwrap();
    let kb_path = root.join("kb.csv");
    let logs_path = root.join("commits.jsonl");
    fs::write(
        &logs_path,
        serde_json::json!({
            "project": "o:p", "id": "c1", "ts": 5,
            "author": "dev", "msg": "moved off log4j onto slf4j-api"
        })
        .to_string()
            + "\n",
    )
    .unwrap();

    let mut child = bin()
        .args([
            "review",
            "--rules",
            rules_path.to_str().unwrap(),
            "--kb",
            kb_path.to_str().unwrap(),
            "--logs",
            logs_path.to_str().unwrap(),
            "--annotator",
            "tester",
        ])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child.stdin.as_mut().unwrap().write_all(b"s\nb\n").unwrap();
    let output = child.wait_with_output().unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(
        stdout.contains("[s]eed / [b]an / s[k]ip / [q]uit"),
        "{stdout}"
    );
    assert!(
        stdout.contains("moved off log4j onto slf4j-api"),
        "log shown: {stdout}"
    );

    let kb = read(&kb_path);
    assert!(kb.contains("log4j,slf4j-api,seed,tester,"));
    assert!(kb.contains("junit,qux,banned,tester,"));
    // the reverse rule was auto-classified once the seed landed
    assert!(kb.contains("slf4j-api,log4j,seed,auto,"));
}

#[test]
fn exit_codes_distinguish_usage_and_data_errors() {
    let status = bin().arg("--definitely-not-a-flag").output().unwrap();
    assert_eq!(status.status.code(), Some(1), "usage errors exit 1");

    let status = bin()
        .args(["mine", "--in", "/nonexistent.snaplog", "--out", "/tmp/x"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2), "data errors exit 2");

    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.snaplog");
    fs::write(&bad, "this is not json\n").unwrap();
    let out = tmp.path().join("out");
    let status = bin()
        .args([
            "mine",
            "--in",
            bad.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&status.stderr);
    assert!(
        stderr.contains("line 1"),
        "parse errors carry line numbers: {stderr}"
    );

    let status = bin().args(["--help"]).output().unwrap();
    assert_eq!(status.status.code(), Some(0));
}

#[test]
fn logsearch_prints_matching_commits() {
    let tmp = tempfile::tempdir().unwrap();
    let logs = tmp.path().join("commits.jsonl");
    fs::write(
        &logs,
        serde_json::json!({
            "project": "o:p", "id": "c9", "ts": 77,
            "author": "dev", "msg": "simple migration to logback since log4j is old"
        })
        .to_string()
            + "\n",
    )
    .unwrap();
    let output = bin()
        .args([
            "logsearch",
            "--logs",
            logs.to_str().unwrap(),
            "--source",
            "log4j",
            "--target",
            "logback",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("simple migration to logback"), "{stdout}");

    let output = bin()
        .args([
            "logsearch",
            "--logs",
            logs.to_str().unwrap(),
            "--source",
            "junit",
            "--target",
            "testng",
        ])
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("no commit logs mention"), "{stdout}");
}

//! The curated rule knowledge base: seed (true) and banned (false) verdicts,
//! the undirected seed graph and directed banned graph built from them, and
//! verdict propagation for newly mined rules.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use chrono::{DateTime, TimeZone, Utc};
use thiserror::Error;

use crate::model::{MigrationRule, Verdict};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KnowledgeError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("conflicting verdict for rule {0}")]
    ConflictingVerdict(String),
}

/// Who recorded a verdict and when.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annotation {
    pub annotator: String,
    pub timestamp: i64,
}

/// Persistent seed/banned rule bases. Seeds are stored directed as recorded
/// but project onto an undirected graph; banned rules stay directed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    seeds: BTreeSet<MigrationRule>,
    banned: BTreeSet<MigrationRule>,
    annotations: BTreeMap<MigrationRule, Annotation>,
}

impl KnowledgeBase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn seeds(&self) -> &BTreeSet<MigrationRule> {
        &self.seeds
    }

    pub fn banned(&self) -> &BTreeSet<MigrationRule> {
        &self.banned
    }

    pub fn annotation(&self, rule: &MigrationRule) -> Option<&Annotation> {
        self.annotations.get(rule)
    }

    pub fn verdict_of(&self, rule: &MigrationRule) -> Verdict {
        if self.seeds.contains(rule) {
            Verdict::Seed
        } else if self.banned.contains(rule) {
            Verdict::Banned
        } else {
            Verdict::Unknown
        }
    }
}

/// Appends a verdict to the base. Recording the same verdict twice is a
/// no-op; recording the opposite verdict is refused.
pub fn record_verdict(
    kb: &mut KnowledgeBase,
    rule: MigrationRule,
    verdict: Verdict,
    annotator: &str,
    timestamp: i64,
) -> Result<(), KnowledgeError> {
    let (target, opposite) = match verdict {
        Verdict::Seed => (&mut kb.seeds, &kb.banned),
        Verdict::Banned => (&mut kb.banned, &kb.seeds),
        Verdict::Unknown => panic!("cannot record an Unknown verdict"),
    };
    if opposite.contains(&rule) {
        return Err(KnowledgeError::ConflictingVerdict(rule.to_string()));
    }
    if target.insert(rule.clone()) {
        kb.annotations.insert(
            rule,
            Annotation {
                annotator: annotator.to_string(),
                timestamp,
            },
        );
    }
    Ok(())
}

fn format_ts(ts: i64) -> String {
    Utc.timestamp_opt(ts, 0)
        .single()
        .map(|dt| dt.format("%Y-%m-%dT%H:%M:%SZ").to_string())
        .unwrap_or_else(|| ts.to_string())
}

fn parse_ts(text: &str) -> Option<i64> {
    DateTime::parse_from_rfc3339(text)
        .map(|dt| dt.timestamp())
        .ok()
}

/// Serializes the base as `source,target,verdict,annotator,timestamp` lines,
/// seeds first, each block sorted.
pub fn save_knowledge(kb: &KnowledgeBase) -> String {
    let mut out =
        String::from("# source,target,verdict(seed|banned),annotator,iso8601-timestamp\n");
    let mut write = |rules: &BTreeSet<MigrationRule>, verdict: &str| {
        for rule in rules {
            let annotation = kb.annotations.get(rule);
            let (who, when) = match annotation {
                Some(a) => (a.annotator.as_str(), format_ts(a.timestamp)),
                None => ("unknown", format_ts(0)),
            };
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                rule.source, rule.target, verdict, who, when
            ));
        }
    };
    write(&kb.seeds, "seed");
    write(&kb.banned, "banned");
    out
}

/// Parses the knowledge file format. Duplicate identical verdicts keep the
/// first annotation; a rule listed under both verdicts is an error.
pub fn load_knowledge(text: &str) -> Result<KnowledgeBase, KnowledgeError> {
    let mut kb = KnowledgeBase::new();
    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 5 {
            return Err(KnowledgeError::Parse {
                line: line_no,
                message: format!("expected 5 comma-separated fields, got {}", fields.len()),
            });
        }
        let rule = MigrationRule::new(fields[0].trim(), fields[1].trim());
        if rule.source.is_empty() || rule.target.is_empty() {
            return Err(KnowledgeError::Parse {
                line: line_no,
                message: "empty rule side".to_string(),
            });
        }
        let verdict = match fields[2].trim() {
            "seed" => Verdict::Seed,
            "banned" => Verdict::Banned,
            other => {
                return Err(KnowledgeError::Parse {
                    line: line_no,
                    message: format!("unknown verdict {other:?}"),
                })
            }
        };
        let timestamp = parse_ts(fields[4].trim()).ok_or(KnowledgeError::Parse {
            line: line_no,
            message: format!("bad timestamp {:?}", fields[4]),
        })?;
        record_verdict(&mut kb, rule, verdict, fields[3].trim(), timestamp)?;
    }
    Ok(kb)
}

/// Immutable snapshot of the seed graph (undirected) and banned graph
/// (directed) used for verdict propagation.
#[derive(Debug, Clone, Default)]
pub struct KnowledgeGraphs {
    gm: BTreeMap<String, BTreeSet<String>>,
    gmb: BTreeMap<String, BTreeSet<String>>,
}

impl KnowledgeGraphs {
    pub fn build(kb: &KnowledgeBase) -> Self {
        let mut graphs = KnowledgeGraphs::default();
        for rule in &kb.seeds {
            graphs
                .gm
                .entry(rule.source.clone())
                .or_default()
                .insert(rule.target.clone());
            graphs
                .gm
                .entry(rule.target.clone())
                .or_default()
                .insert(rule.source.clone());
        }
        for rule in &kb.banned {
            graphs
                .gmb
                .entry(rule.source.clone())
                .or_default()
                .insert(rule.target.clone());
        }
        graphs
    }

    /// Connected component of the seed graph containing `library`; the
    /// singleton {library} when it is unknown to the graph.
    pub fn seed_component(&self, library: &str) -> BTreeSet<String> {
        let mut component = BTreeSet::from([library.to_string()]);
        let mut queue = VecDeque::from([library.to_string()]);
        while let Some(node) = queue.pop_front() {
            if let Some(neighbors) = self.gm.get(&node) {
                for next in neighbors {
                    if component.insert(next.clone()) {
                        queue.push_back(next.clone());
                    }
                }
            }
        }
        component
    }

    /// Whether a directed banned path of length >= 1 leads from `from` to `to`.
    pub fn banned_path(&self, from: &str, to: &str) -> bool {
        let mut visited = BTreeSet::new();
        let mut queue: VecDeque<&str> = VecDeque::from([from]);
        while let Some(node) = queue.pop_front() {
            if let Some(successors) = self.gmb.get(node) {
                for next in successors {
                    if next == to {
                        return true;
                    }
                    if visited.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
            }
        }
        false
    }
}

/// Propagated verdict for a rule: Seed when the target shares the source's
/// seed component, otherwise Banned when any member of that component has a
/// banned path to the target, otherwise Unknown. The seed condition wins
/// when both hold, so growing the seed base never demotes a Seed answer.
pub fn classify(rule: &MigrationRule, graphs: &KnowledgeGraphs) -> Verdict {
    let component = graphs.seed_component(&rule.source);
    if component.contains(&rule.target) {
        return Verdict::Seed;
    }
    if component
        .iter()
        .any(|x| graphs.banned_path(x, &rule.target))
    {
        return Verdict::Banned;
    }
    Verdict::Unknown
}

/// Extends an expert rule set with every candidate that the seed graph
/// already vouches for.
pub fn augment(
    expert: &BTreeSet<MigrationRule>,
    candidates: &BTreeSet<MigrationRule>,
    graphs: &KnowledgeGraphs,
) -> BTreeSet<MigrationRule> {
    let mut result = expert.clone();
    for candidate in candidates {
        if classify(candidate, graphs) == Verdict::Seed {
            result.insert(candidate.clone());
        }
    }
    result
}

/// Outcome of pulling the next rule off the triage queue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TriageStep {
    /// This rule needs a human call; `suggested` is Unknown until a human
    /// decides.
    Review {
        rule: MigrationRule,
        suggested: Verdict,
    },
    Done,
}

/// Advances the triage queue: rules the graphs can already classify are
/// recorded silently (annotated as `auto`), and the first genuinely unknown
/// rule is surfaced for review.
pub fn triage_next(
    kb: &mut KnowledgeBase,
    pending: &mut VecDeque<MigrationRule>,
    timestamp: i64,
) -> TriageStep {
    while let Some(rule) = pending.pop_front() {
        if kb.verdict_of(&rule) != Verdict::Unknown {
            continue;
        }
        let graphs = KnowledgeGraphs::build(kb);
        match classify(&rule, &graphs) {
            Verdict::Unknown => {
                return TriageStep::Review {
                    rule,
                    suggested: Verdict::Unknown,
                }
            }
            verdict => {
                record_verdict(kb, rule, verdict, "auto", timestamp)
                    .expect("auto verdict cannot conflict: rule was Unknown");
            }
        }
    }
    TriageStep::Done
}

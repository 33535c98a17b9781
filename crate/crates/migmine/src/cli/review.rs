//! Interactive rule triage: auto-classify what the knowledge graphs already
//! cover, surface the rest one by one, and append verdicts to the base.

use std::collections::VecDeque;
use std::io::{BufRead, Write};

use anyhow::Result;

use migmine::knowledge::{
    classify, record_verdict, triage_next, KnowledgeBase, KnowledgeGraphs, TriageStep,
};
use migmine::loglens::LogIndex;
use migmine::model::{MigrationRule, Verdict};

use super::formats::RuleRow;

/// How many pending rules a hypothetical verdict would auto-classify.
fn unlocked_by(
    kb: &KnowledgeBase,
    rule: &MigrationRule,
    verdict: Verdict,
    pending: &VecDeque<MigrationRule>,
) -> usize {
    let mut scratch = kb.clone();
    if record_verdict(&mut scratch, rule.clone(), verdict, "preview", 0).is_err() {
        return 0;
    }
    let graphs = KnowledgeGraphs::build(&scratch);
    pending
        .iter()
        .filter(|candidate| *candidate != rule)
        .filter(|candidate| classify(candidate, &graphs) != Verdict::Unknown)
        .count()
}

pub struct ReviewOutcome {
    pub reviewed: usize,
    pub auto_classified: usize,
}

/// Runs the triage loop over the report rows. Input lines drive the
/// prompt; `now` stamps recorded verdicts.
pub fn run_review<R: BufRead, W: Write>(
    kb: &mut KnowledgeBase,
    rows: &[RuleRow],
    logs: Option<&LogIndex>,
    input: &mut R,
    output: &mut W,
    annotator: &str,
    now: i64,
) -> Result<ReviewOutcome> {
    let before = kb.seeds().len() + kb.banned().len();
    let mut pending: VecDeque<MigrationRule> = rows
        .iter()
        .filter(|row| kb.verdict_of(&row.rule) == Verdict::Unknown)
        .map(|row| row.rule.clone())
        .collect();
    let mut reviewed = 0usize;

    loop {
        let step = triage_next(kb, &mut pending, now);
        let TriageStep::Review { rule, suggested } = step else {
            break;
        };
        let row = rows.iter().find(|r| r.rule == rule);
        writeln!(output)?;
        writeln!(
            output,
            "rule: {rule}  score={}  groups={}  confidence={:.4}  suggested={suggested}",
            row.map_or(0, |r| r.score),
            row.map_or(0, |r| r.groups),
            row.map_or(0.0, |r| r.confidence),
        )?;
        if let Some(index) = logs {
            for commit in index.search(&rule).into_iter().take(3) {
                writeln!(output, "  log [{}] {}", commit.project, commit.message)?;
            }
        }
        writeln!(
            output,
            "  seed would auto-classify {} pending rule(s); ban would auto-classify {}",
            unlocked_by(kb, &rule, Verdict::Seed, &pending),
            unlocked_by(kb, &rule, Verdict::Banned, &pending),
        )?;
        write!(
            output,
            "{} -> {}  [s]eed / [b]an / s[k]ip / [q]uit: ",
            rule.source, rule.target
        )?;
        output.flush()?;

        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            break; // end of input behaves like quit
        }
        match line.trim() {
            "s" => {
                record_verdict(kb, rule, Verdict::Seed, annotator, now)?;
                reviewed += 1;
            }
            "b" => {
                record_verdict(kb, rule, Verdict::Banned, annotator, now)?;
                reviewed += 1;
            }
            "q" => break,
            _ => {} // skip: leave the rule undecided
        }
    }

    let auto_classified = kb.seeds().len() + kb.banned().len() - before - reviewed;
    Ok(ReviewOutcome {
        reviewed,
        auto_classified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use migmine::knowledge::load_knowledge;

    fn row(s: &str, t: &str, score: u32, groups: u32) -> RuleRow {
        RuleRow {
            rule: MigrationRule::new(s, t),
            score,
            groups,
            confidence: 0.5,
            projects: score,
        }
    }

    #[test]
    fn scripted_session_records_verdicts() {
        let mut kb = KnowledgeBase::new();
        let rows = vec![
            row("log4j", "slf4j-api", 11, 5),
            row("junit", "qux", 4, 2),
            row("slf4j-api", "log4j", 3, 3),
        ];
        let mut input = "s\nb\n".as_bytes();
        let mut output = Vec::new();
        let outcome = run_review(
            &mut kb,
            &rows,
            None,
            &mut input,
            &mut output,
            "tester",
            1_000,
        )
        .unwrap();
        assert_eq!(outcome.reviewed, 2);
        assert_eq!(
            kb.verdict_of(&MigrationRule::new("log4j", "slf4j-api")),
            Verdict::Seed
        );
        assert_eq!(
            kb.verdict_of(&MigrationRule::new("junit", "qux")),
            Verdict::Banned
        );
        // the reverse of a seed is auto-classified, not prompted
        assert_eq!(
            kb.verdict_of(&MigrationRule::new("slf4j-api", "log4j")),
            Verdict::Seed
        );
        assert_eq!(outcome.auto_classified, 1);
        let text = String::from_utf8(output).unwrap();
        assert!(text.contains("[s]eed / [b]an / s[k]ip / [q]uit"));
    }

    #[test]
    fn quit_and_eof_stop_the_loop() {
        let mut kb = KnowledgeBase::new();
        let rows = vec![row("a", "b", 5, 2), row("c", "d", 5, 2)];
        let mut input = "q\n".as_bytes();
        let mut output = Vec::new();
        let outcome =
            run_review(&mut kb, &rows, None, &mut input, &mut output, "tester", 0).unwrap();
        assert_eq!(outcome.reviewed, 0);
        assert_eq!(kb.seeds().len() + kb.banned().len(), 0);

        let mut empty = "".as_bytes();
        let outcome =
            run_review(&mut kb, &rows, None, &mut empty, &mut output, "tester", 0).unwrap();
        assert_eq!(outcome.reviewed, 0);
    }

    #[test]
    fn skip_leaves_rule_undecided() {
        let mut kb = KnowledgeBase::new();
        let rows = vec![row("a", "b", 5, 2)];
        let mut input = "k\n".as_bytes();
        let mut output = Vec::new();
        run_review(&mut kb, &rows, None, &mut input, &mut output, "tester", 0).unwrap();
        assert_eq!(
            kb.verdict_of(&MigrationRule::new("a", "b")),
            Verdict::Unknown
        );
    }

    #[test]
    fn already_decided_rules_are_not_prompted() {
        let mut kb = load_knowledge("a,b,seed,me,2013-01-01T00:00:00Z\n").unwrap();
        let rows = vec![row("a", "b", 5, 2)];
        let mut input = "".as_bytes();
        let mut output = Vec::new();
        let outcome =
            run_review(&mut kb, &rows, None, &mut input, &mut output, "tester", 0).unwrap();
        assert_eq!(outcome.reviewed, 0);
        assert!(String::from_utf8(output).unwrap().is_empty());
    }
}

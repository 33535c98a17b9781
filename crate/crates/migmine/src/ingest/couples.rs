use crate::model::DependencyHistory;

use super::IngestError;

/// The ordered version couples selected for diffing. Couples chain: the
/// right end of one couple is the left end of the next, and the final
/// couple always ends at the last snapshot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoupleList {
    pub couples: Vec<(u32, u32)>,
}

/// Selects sequential version couples at a fixed step. With n snapshots and
/// step s the couples are (1, 1+s), (1+s, 1+2s), ...; when the next endpoint
/// would run past the end, the last couple stops at the final snapshot.
pub fn sample_couples(history: &DependencyHistory, step: u32) -> Result<CoupleList, IngestError> {
    assert!(step >= 1, "step must be >= 1");
    let n = history.len() as u32;
    if n < 2 {
        return Err(IngestError::TooShort);
    }
    let index_at = |pos: u32| history.snapshots()[(pos - 1) as usize].index;

    let mut couples = Vec::new();
    let mut start = 1u32;
    while start < n {
        let end = if start + step < n { start + step } else { n };
        couples.push((index_at(start), index_at(end)));
        start = end;
    }
    Ok(CoupleList { couples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ProjectId, Snapshot};
    use std::collections::BTreeSet;

    fn history(n: u32) -> DependencyHistory {
        let project = ProjectId::new("o", "p").unwrap();
        let snapshots = (1..=n)
            .map(|i| Snapshot {
                index: i,
                timestamp: i as i64,
                dependencies: BTreeSet::new(),
            })
            .collect();
        DependencyHistory::new(project, snapshots).unwrap()
    }

    #[test]
    fn step_ten_over_thirty_one() {
        let list = sample_couples(&history(31), 10).unwrap();
        assert_eq!(list.couples, vec![(1, 11), (11, 21), (21, 31)]);
    }

    #[test]
    fn terminal_couple_is_clamped() {
        let list = sample_couples(&history(65), 30).unwrap();
        assert_eq!(list.couples, vec![(1, 31), (31, 61), (61, 65)]);
    }

    #[test]
    fn short_history_gets_single_couple() {
        let list = sample_couples(&history(2), 30).unwrap();
        assert_eq!(list.couples, vec![(1, 2)]);
    }

    #[test]
    fn single_snapshot_is_too_short() {
        assert!(matches!(
            sample_couples(&history(1), 10),
            Err(IngestError::TooShort)
        ));
    }

    #[test]
    fn exact_multiple_has_no_degenerate_tail() {
        let list = sample_couples(&history(11), 10).unwrap();
        assert_eq!(list.couples, vec![(1, 11)]);
        assert!(list.couples.iter().all(|(i, j)| i < j));
    }

    #[test]
    fn couples_chain_covers_every_index() {
        for n in 2..40u32 {
            for step in 1..35u32 {
                let list = sample_couples(&history(n), step).unwrap();
                assert_eq!(list.couples.first().unwrap().0, 1);
                assert_eq!(list.couples.last().unwrap().1, n);
                for pair in list.couples.windows(2) {
                    assert_eq!(pair[0].1, pair[1].0);
                }
            }
        }
    }
}

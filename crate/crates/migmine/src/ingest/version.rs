use std::cmp::Ordering;

/// One comparable piece of a version string.
///
/// Numeric segments outrank any qualifier; known qualifiers follow the
/// usual pre-release ladder with the empty/`release` segment between
/// `snapshot` and `sp`; unknown qualifiers sort lexicographically after
/// `sp`. Missing trailing segments compare as `release`.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Segment {
    Qualifier(u8),
    Unknown(String),
    // Digit-only text, kept as a normalized string so arbitrarily long
    // version numbers still compare correctly.
    Numeric(String),
}

const RELEASE: Segment = Segment::Qualifier(5);

fn qualifier_rank(text: &str) -> Option<u8> {
    match text {
        "alpha" => Some(0),
        "beta" => Some(1),
        "milestone" => Some(2),
        "rc" => Some(3),
        "snapshot" => Some(4),
        "" | "release" => Some(5),
        "sp" => Some(6),
        _ => None,
    }
}

fn segment(text: &str) -> Segment {
    if !text.is_empty() && text.bytes().all(|b| b.is_ascii_digit()) {
        return Segment::Numeric(text.trim_start_matches('0').to_string());
    }
    let lower = text.to_ascii_lowercase();
    match qualifier_rank(&lower) {
        Some(rank) => Segment::Qualifier(rank),
        None => Segment::Unknown(lower),
    }
}

fn segments(version: &str) -> Vec<Segment> {
    version.split(['.', '-']).map(segment).collect()
}

fn cmp_segment(a: &Segment, b: &Segment) -> Ordering {
    use Segment::*;
    match (a, b) {
        (Numeric(x), Numeric(y)) => x.len().cmp(&y.len()).then_with(|| x.cmp(y)),
        (Numeric(_), _) => Ordering::Greater,
        (_, Numeric(_)) => Ordering::Less,
        (Qualifier(x), Qualifier(y)) => x.cmp(y),
        (Qualifier(_), Unknown(_)) => Ordering::Less,
        (Unknown(_), Qualifier(_)) => Ordering::Greater,
        (Unknown(x), Unknown(y)) => x.cmp(y),
    }
}

/// Total order over version strings: tokens split on `.` and `-`, numeric
/// tokens compared numerically, qualifiers by rank, with shorter versions
/// padded with the release segment.
pub fn compare_versions(a: &str, b: &str) -> Ordering {
    let sa = segments(a);
    let sb = segments(b);
    let len = sa.len().max(sb.len());
    for i in 0..len {
        let x = sa.get(i).unwrap_or(&RELEASE);
        let y = sb.get(i).unwrap_or(&RELEASE);
        let ord = cmp_segment(x, y);
        if ord != Ordering::Equal {
            return ord;
        }
    }
    Ordering::Equal
}

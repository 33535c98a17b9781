use std::collections::BTreeSet;

use crate::model::LibraryId;

use super::IngestError;

/// Maps qualified-name patterns to the libraries that define them.
///
/// Patterns are anchored: every character is literal except a single
/// trailing `*`, which matches any suffix.
#[derive(Debug, Clone, Default)]
pub struct LibraryIndex {
    entries: Vec<(Pattern, LibraryId)>,
}

#[derive(Debug, Clone)]
struct Pattern {
    prefix: String,
    wildcard: bool,
}

impl Pattern {
    fn compile(text: &str) -> Result<Pattern, IngestError> {
        let stars = text.matches('*').count();
        match stars {
            0 => Ok(Pattern {
                prefix: text.to_string(),
                wildcard: false,
            }),
            1 if text.ends_with('*') => Ok(Pattern {
                prefix: text[..text.len() - 1].to_string(),
                wildcard: true,
            }),
            _ => Err(IngestError::BadPattern(text.to_string())),
        }
    }

    fn matches(&self, name: &str) -> bool {
        if self.wildcard {
            name.starts_with(&self.prefix)
        } else {
            name == self.prefix
        }
    }
}

impl LibraryIndex {
    pub fn add(&mut self, pattern: &str, library: LibraryId) -> Result<(), IngestError> {
        self.entries.push((Pattern::compile(pattern)?, library));
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Parses the index file format: one `pattern<TAB>group:artifact` per line,
/// `#` comments and blank lines ignored.
pub fn parse_library_index(text: &str) -> Result<LibraryIndex, IngestError> {
    let mut index = LibraryIndex::default();
    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (pattern, coord) = trimmed.split_once('\t').ok_or(IngestError::Parse {
            line: line_no,
            message: "expected pattern<TAB>group:artifact".to_string(),
        })?;
        let library = LibraryId::parse(coord.trim()).map_err(|e| IngestError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        index.add(pattern.trim(), library)?;
    }
    Ok(index)
}

/// Collects the dotted names imported by a source file. Only `import` and
/// `import static` lines are recognized; a trailing `.*` is stripped down
/// to the package name.
pub fn scan_imports(source_text: &str) -> BTreeSet<String> {
    let mut names = BTreeSet::new();
    for line in source_text.lines() {
        let trimmed = line.trim_start();
        let Some(rest) = trimmed.strip_prefix("import ") else {
            continue;
        };
        let rest = rest.trim_start();
        let rest = rest.strip_prefix("static ").unwrap_or(rest).trim_start();
        let Some(end) = rest.find(';') else {
            continue;
        };
        let mut name = rest[..end].trim();
        name = name.strip_suffix(".*").unwrap_or(name);
        if !name.is_empty() {
            names.insert(name.to_string());
        }
    }
    names
}

/// A name that matched more than one library and was therefore left
/// unresolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ambiguity {
    pub name: String,
    pub candidates: Vec<LibraryId>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Resolution {
    pub libraries: BTreeSet<LibraryId>,
    pub ambiguities: Vec<Ambiguity>,
}

/// Resolves qualified names against the index. A name matching exactly one
/// library contributes it; a name matching several distinct libraries is
/// reported as an ambiguity instead of being guessed; unmatched names are
/// dropped.
pub fn resolve_libraries(names: &BTreeSet<String>, index: &LibraryIndex) -> Resolution {
    let mut resolution = Resolution::default();
    for name in names {
        let mut candidates: BTreeSet<LibraryId> = BTreeSet::new();
        for (pattern, library) in &index.entries {
            if pattern.matches(name) {
                candidates.insert(library.clone());
            }
        }
        match candidates.len() {
            0 => {}
            1 => {
                resolution
                    .libraries
                    .insert(candidates.into_iter().next().unwrap());
            }
            _ => resolution.ambiguities.push(Ambiguity {
                name: name.clone(),
                candidates: candidates.into_iter().collect(),
            }),
        }
    }
    resolution
}

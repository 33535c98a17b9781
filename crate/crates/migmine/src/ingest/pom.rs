use std::collections::BTreeSet;

use quick_xml::events::Event;
use quick_xml::Reader;

use crate::model::{LibraryId, ProjectId};

use super::IngestError;

/// Result of parsing one POM manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PomParse {
    pub project: ProjectId,
    /// The manifest's own version tag, when present; orders snapshots with
    /// equal timestamps.
    pub version: Option<String>,
    pub dependencies: BTreeSet<LibraryId>,
    /// Dependency entries skipped because a coordinate part was missing.
    pub skipped: u32,
}

/// Extracts the project coordinate and its declared dependencies from a POM
/// document. Dependency version tags are ignored; entries lacking a groupId
/// or artifactId are skipped and counted rather than failing the whole file.
fn at(path: &[String], expected: &[&str]) -> bool {
    path.len() == expected.len() && path.iter().zip(expected).all(|(a, b)| a == b)
}

pub fn parse_pom(xml_text: &str) -> Result<PomParse, IngestError> {
    let mut reader = Reader::from_str(xml_text);
    reader.trim_text(true);

    // Element path relative to the document root, local names only.
    let mut path: Vec<String> = Vec::new();
    let mut project_group: Option<String> = None;
    let mut project_artifact: Option<String> = None;
    let mut project_version: Option<String> = None;
    let mut dep_group: Option<String> = None;
    let mut dep_artifact: Option<String> = None;
    let mut dependencies = BTreeSet::new();
    let mut skipped = 0u32;

    loop {
        match reader.read_event() {
            Err(e) => return Err(IngestError::Xml(e.to_string())),
            Ok(Event::Eof) => {
                if !path.is_empty() {
                    return Err(IngestError::Xml(format!(
                        "unexpected end of file inside <{}>",
                        path.last().unwrap()
                    )));
                }
                break;
            }
            Ok(Event::Start(e)) => {
                let name = String::from_utf8_lossy(e.local_name().as_ref()).into_owned();
                path.push(name);
            }
            Ok(Event::End(_)) => {
                if at(&path, &["project", "dependencies", "dependency"]) {
                    match (dep_group.take(), dep_artifact.take()) {
                        (Some(g), Some(a)) => match LibraryId::new(g, a) {
                            Ok(lib) => {
                                dependencies.insert(lib);
                            }
                            Err(_) => skipped += 1,
                        },
                        _ => skipped += 1,
                    }
                }
                path.pop();
            }
            Ok(Event::Empty(_)) => {}
            Ok(Event::Text(t)) => {
                let text = t
                    .unescape()
                    .map_err(|e| IngestError::Xml(e.to_string()))?
                    .trim()
                    .to_string();
                if text.is_empty() {
                    continue;
                }
                if at(&path, &["project", "groupId"]) {
                    project_group = Some(text);
                } else if at(&path, &["project", "artifactId"]) {
                    project_artifact = Some(text);
                } else if at(&path, &["project", "version"]) {
                    project_version = Some(text);
                } else if at(&path, &["project", "dependencies", "dependency", "groupId"]) {
                    dep_group = Some(text);
                } else if at(
                    &path,
                    &["project", "dependencies", "dependency", "artifactId"],
                ) {
                    dep_artifact = Some(text);
                }
            }
            Ok(_) => {}
        }
    }

    let group = project_group.ok_or(IngestError::MissingCoordinate("groupId"))?;
    let artifact = project_artifact.ok_or(IngestError::MissingCoordinate("artifactId"))?;
    let project = ProjectId::new(group, artifact).map_err(|e| IngestError::Xml(e.to_string()))?;

    Ok(PomParse {
        project,
        version: project_version,
        dependencies,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"<?xml version="1.0"?>
<project>
  <groupId>g</groupId>
  <artifactId>a</artifactId>
  <version>1.0</version>
  <dependencies>
    <dependency>
      <groupId>junit</groupId>
      <artifactId>junit</artifactId>
      <version>4.10</version>
    </dependency>
  </dependencies>
</project>"#;

    #[test]
    fn minimal_pom() {
        let parsed = parse_pom(MINIMAL).unwrap();
        assert_eq!(parsed.project, ProjectId::new("g", "a").unwrap());
        assert_eq!(parsed.version.as_deref(), Some("1.0"));
        assert_eq!(
            parsed.dependencies,
            BTreeSet::from([LibraryId::parse("junit:junit").unwrap()])
        );
        assert_eq!(parsed.skipped, 0);
    }

    #[test]
    fn empty_dependencies_section() {
        let xml = r#"<project><groupId>g</groupId><artifactId>a</artifactId><dependencies></dependencies></project>"#;
        let parsed = parse_pom(xml).unwrap();
        assert!(parsed.dependencies.is_empty());
        assert_eq!(parsed.skipped, 0);
    }

    #[test]
    fn dependency_without_artifact_is_skipped() {
        let xml = r#"<project><groupId>g</groupId><artifactId>a</artifactId>
<dependencies>
  <dependency><groupId>junit</groupId></dependency>
  <dependency><groupId>log4j</groupId><artifactId>log4j</artifactId></dependency>
</dependencies></project>"#;
        let parsed = parse_pom(xml).unwrap();
        assert_eq!(parsed.skipped, 1);
        assert_eq!(
            parsed.dependencies,
            BTreeSet::from([LibraryId::parse("log4j:log4j").unwrap()])
        );
    }

    #[test]
    fn missing_top_level_coordinate() {
        let err = parse_pom("<project><artifactId>a</artifactId></project>").unwrap_err();
        assert!(matches!(err, IngestError::MissingCoordinate("groupId")));
    }

    #[test]
    fn malformed_xml() {
        let err = parse_pom("<project><groupId>g</groupId").unwrap_err();
        assert!(matches!(err, IngestError::Xml(_)));
    }

    #[test]
    fn dependency_management_is_not_a_dependency() {
        let xml = r#"<project><groupId>g</groupId><artifactId>a</artifactId>
<dependencyManagement><dependencies>
  <dependency><groupId>x</groupId><artifactId>y</artifactId></dependency>
</dependencies></dependencyManagement></project>"#;
        let parsed = parse_pom(xml).unwrap();
        assert!(parsed.dependencies.is_empty());
    }

    #[test]
    fn namespaced_pom_is_accepted() {
        let xml = r#"<project xmlns="http://maven.apache.org/POM/4.0.0">
  <groupId>g</groupId><artifactId>a</artifactId>
  <dependencies><dependency><groupId>x</groupId><artifactId>y</artifactId></dependency></dependencies>
</project>"#;
        let parsed = parse_pom(xml).unwrap();
        assert_eq!(parsed.dependencies.len(), 1);
    }
}

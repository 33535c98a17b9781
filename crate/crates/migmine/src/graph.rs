//! The migration graph: libraries as nodes, observed rule flows as weighted
//! arcs, connected components as categories, and the four visual patterns
//! that summarize flow shapes.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{MigrationRule, RuleStats};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("bad graph json: {0}")]
    BadJson(String),
}

/// Whether arc weights count distinct owners (the default) or distinct
/// projects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightSource {
    Owners,
    Projects,
}

/// Weighted directed graph over merged library names. `nodes` carries the
/// client count of each library at the latest corpus snapshot.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MigrationGraph {
    nodes: BTreeMap<String, u64>,
    arcs: BTreeMap<(String, String), u64>,
}

impl MigrationGraph {
    pub fn nodes(&self) -> &BTreeMap<String, u64> {
        &self.nodes
    }

    pub fn arcs(&self) -> &BTreeMap<(String, String), u64> {
        &self.arcs
    }

    pub fn user_count(&self, node: &str) -> u64 {
        self.nodes.get(node).copied().unwrap_or(0)
    }

    pub fn weight(&self, source: &str, target: &str) -> u64 {
        self.arcs
            .get(&(source.to_string(), target.to_string()))
            .copied()
            .unwrap_or(0)
    }

    pub fn in_weight(&self, node: &str) -> u64 {
        self.arcs
            .iter()
            .filter(|((_, t), _)| t == node)
            .map(|(_, w)| w)
            .sum()
    }

    pub fn out_weight(&self, node: &str) -> u64 {
        self.arcs
            .iter()
            .filter(|((s, _), _)| s == node)
            .map(|(_, w)| w)
            .sum()
    }

    /// Direct construction from explicit arcs, for report tooling that does
    /// not go through rule stats.
    pub fn from_arcs(
        arcs: impl IntoIterator<Item = (String, String, u64)>,
        usage: &BTreeMap<String, u64>,
    ) -> Self {
        let mut graph = MigrationGraph::default();
        for (source, target, weight) in arcs {
            if weight == 0 {
                continue;
            }
            graph
                .nodes
                .entry(source.clone())
                .or_insert_with(|| usage.get(&source).copied().unwrap_or(0));
            graph
                .nodes
                .entry(target.clone())
                .or_insert_with(|| usage.get(&target).copied().unwrap_or(0));
            *graph.arcs.entry((source, target)).or_insert(0) += weight;
        }
        graph
    }
}

/// Builds the migration graph from retained rules: one node per library in
/// any rule, one arc per rule weighted by its owner (or project) count.
pub fn build_graph(
    rules: &BTreeMap<MigrationRule, RuleStats>,
    usage: &BTreeMap<String, u64>,
    weight: WeightSource,
) -> MigrationGraph {
    MigrationGraph::from_arcs(
        rules.iter().map(|(rule, stats)| {
            let w = match weight {
                WeightSource::Owners => stats.owners.len() as u64,
                WeightSource::Projects => stats.occurrences.len() as u64,
            };
            (rule.source.clone(), rule.target.clone(), w)
        }),
        usage,
    )
}

/// A connected component of the undirected projection: a set of libraries
/// projects treat as interchangeable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Category {
    pub id: usize,
    pub members: BTreeSet<String>,
    /// Total library introductions across members; filled by trend tooling.
    pub introductions: u64,
}

/// Partitions the graph into categories, ordered by descending internal arc
/// weight and then by smallest member name.
pub fn categories(graph: &MigrationGraph) -> Vec<Category> {
    let mut undirected: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for (source, target) in graph.arcs().keys() {
        undirected.entry(source).or_default().insert(target);
        undirected.entry(target).or_default().insert(source);
    }

    let mut assigned: BTreeSet<&str> = BTreeSet::new();
    let mut components: Vec<BTreeSet<String>> = Vec::new();
    for node in graph.nodes().keys() {
        if !assigned.insert(node) {
            continue;
        }
        let mut members = BTreeSet::from([node.clone()]);
        let mut queue: Vec<&str> = vec![node];
        while let Some(current) = queue.pop() {
            if let Some(neighbors) = undirected.get(current) {
                for &neighbor in neighbors {
                    if assigned.insert(neighbor) {
                        members.insert(neighbor.to_string());
                        queue.push(neighbor);
                    }
                }
            }
        }
        components.push(members);
    }

    let weight_of = |members: &BTreeSet<String>| -> u64 {
        graph
            .arcs()
            .iter()
            .filter(|((s, _), _)| members.contains(s))
            .map(|(_, w)| w)
            .sum()
    };
    let mut ordered: Vec<(u64, BTreeSet<String>)> = components
        .into_iter()
        .map(|members| (weight_of(&members), members))
        .collect();
    ordered.sort_by(|a, b| {
        b.0.cmp(&a.0)
            .then_with(|| a.1.iter().next().cmp(&b.1.iter().next()))
    });
    ordered
        .into_iter()
        .enumerate()
        .map(|(id, (_, members))| Category {
            id,
            members,
            introductions: 0,
        })
        .collect()
}

/// Thresholds for the visual patterns. The patterns are qualitative by
/// nature; these defaults make them checkable and are all tunable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternConfig {
    /// Minimum in (out) flow before a gold rush (exodus) is considered.
    pub volume: u64,
    /// The dominant direction must carry at least this multiple of the other.
    pub dominance: u64,
    /// Both arcs of a pong pair must weigh at least this much.
    pub pong_min: u64,
    /// Largest allowed imbalance between the two arcs of a pong pair.
    pub pong_ratio: f64,
    /// Minimum weight received from the category's most used library.
    pub challenger_min: u64,
}

impl Default for PatternConfig {
    fn default() -> Self {
        PatternConfig {
            volume: 5,
            dominance: 3,
            pong_min: 2,
            pong_ratio: 2.0,
            challenger_min: 3,
        }
    }
}

/// Flow-shape classification attached to a node (or, for Pong, to an arc
/// pair identified by the lexicographically first endpoint).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum PatternTag {
    GoldRush,
    Exodus,
    Challenger,
    Pong(String),
}

impl PatternTag {
    pub fn label(&self) -> String {
        match self {
            PatternTag::GoldRush => "gold-rush".to_string(),
            PatternTag::Exodus => "exodus".to_string(),
            PatternTag::Challenger => "challenger".to_string(),
            PatternTag::Pong(peer) => format!("pong:{peer}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PatternHit {
    pub element: String,
    pub tag: PatternTag,
}

fn lower_median(mut values: Vec<u64>) -> u64 {
    values.sort_unstable();
    values[(values.len().saturating_sub(1)) / 2]
}

/// Detects all pattern instances in the graph under the given thresholds.
pub fn detect_patterns(graph: &MigrationGraph, config: &PatternConfig) -> Vec<PatternHit> {
    let mut hits = Vec::new();

    for node in graph.nodes().keys() {
        let incoming = graph.in_weight(node);
        let outgoing = graph.out_weight(node);
        if incoming >= config.volume && incoming >= config.dominance * outgoing.max(1) {
            hits.push(PatternHit {
                element: node.clone(),
                tag: PatternTag::GoldRush,
            });
        }
        if outgoing >= config.volume && outgoing >= config.dominance * incoming.max(1) {
            hits.push(PatternHit {
                element: node.clone(),
                tag: PatternTag::Exodus,
            });
        }
    }

    for ((a, b), &forward) in graph.arcs() {
        if a >= b {
            continue;
        }
        let backward = graph.weight(b, a);
        if forward >= config.pong_min && backward >= config.pong_min {
            let (lo, hi) = (forward.min(backward), forward.max(backward));
            if hi as f64 <= config.pong_ratio * lo as f64 {
                hits.push(PatternHit {
                    element: a.clone(),
                    tag: PatternTag::Pong(b.clone()),
                });
            }
        }
    }

    for category in categories(graph) {
        if category.members.len() < 2 {
            continue;
        }
        let most_used = category
            .members
            .iter()
            .max_by(|a, b| {
                graph
                    .user_count(a)
                    .cmp(&graph.user_count(b))
                    .then_with(|| b.cmp(a))
            })
            .expect("non-empty category")
            .clone();
        let median = lower_median(
            category
                .members
                .iter()
                .map(|m| graph.user_count(m))
                .collect(),
        );
        for member in &category.members {
            if member == &most_used {
                continue;
            }
            if graph.weight(&most_used, member) >= config.challenger_min
                && graph.user_count(member) < median
            {
                hits.push(PatternHit {
                    element: member.clone(),
                    tag: PatternTag::Challenger,
                });
            }
        }
    }

    hits.sort();
    hits
}

fn gray_level(users: u64, category_max: u64) -> u64 {
    if category_max == 0 {
        return 95;
    }
    // linear ramp: most used in the category = gray20, unused = gray95
    95 - (75 * users + category_max / 2) / category_max
}

/// Renders the graph as a DOT digraph. Edge pen width scales linearly with
/// weight into [1,5]; node fill darkens with the library's user count
/// relative to its category; pattern tags show up in node labels and pong
/// pairs are drawn bold. Output is byte-stable for equal inputs.
pub fn export_dot(graph: &MigrationGraph, patterns: &[PatternHit]) -> String {
    let mut node_tags: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    let mut pong_pairs: BTreeSet<(&str, &str)> = BTreeSet::new();
    for hit in patterns {
        match &hit.tag {
            PatternTag::Pong(peer) => {
                pong_pairs.insert((hit.element.as_str(), peer.as_str()));
                pong_pairs.insert((peer.as_str(), hit.element.as_str()));
            }
            tag => node_tags
                .entry(hit.element.as_str())
                .or_default()
                .push(tag.label()),
        }
    }

    let mut category_max: BTreeMap<&str, u64> = BTreeMap::new();
    for category in categories(graph) {
        let max = category
            .members
            .iter()
            .map(|m| graph.user_count(m))
            .max()
            .unwrap_or(0);
        for member in &category.members {
            let key = graph
                .nodes()
                .keys()
                .find(|k| *k == member)
                .map(|k| k.as_str())
                .unwrap();
            category_max.insert(key, max);
        }
    }

    let weights: Vec<u64> = graph.arcs().values().copied().collect();
    let (w_min, w_max) = (
        weights.iter().copied().min().unwrap_or(1),
        weights.iter().copied().max().unwrap_or(1),
    );
    let penwidth = |w: u64| -> f64 {
        if w_max == w_min {
            1.0
        } else {
            1.0 + 4.0 * (w - w_min) as f64 / (w_max - w_min) as f64
        }
    };

    let mut out = String::from("digraph migrations {\n  rankdir=LR;\n  node [style=filled];\n");
    for (node, &users) in graph.nodes() {
        let gray = gray_level(users, category_max.get(node.as_str()).copied().unwrap_or(0));
        let font = if gray < 60 { "white" } else { "black" };
        let mut label = node.clone();
        if let Some(tags) = node_tags.get(node.as_str()) {
            label.push_str("\\n[");
            label.push_str(&tags.join(", "));
            label.push(']');
        }
        out.push_str(&format!(
            "  \"{node}\" [fillcolor=gray{gray}, fontcolor={font}, label=\"{label}\"];\n"
        ));
    }
    for ((source, target), &weight) in graph.arcs() {
        let style = if pong_pairs.contains(&(source.as_str(), target.as_str())) {
            ", style=bold"
        } else {
            ""
        };
        out.push_str(&format!(
            "  \"{source}\" -> \"{target}\" [label={weight}, penwidth={:.2}{style}];\n",
            penwidth(weight)
        ));
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonNode {
    name: String,
    users: u64,
    patterns: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonArc {
    s: String,
    t: String,
    w: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonGraph {
    nodes: Vec<JsonNode>,
    arcs: Vec<JsonArc>,
}

/// Machine-readable dump of the graph and its pattern annotations.
pub fn to_json(graph: &MigrationGraph, patterns: &[PatternHit]) -> String {
    let mut tags: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for hit in patterns {
        tags.entry(hit.element.as_str())
            .or_default()
            .push(hit.tag.label());
    }
    let dump = JsonGraph {
        nodes: graph
            .nodes()
            .iter()
            .map(|(name, &users)| JsonNode {
                name: name.clone(),
                users,
                patterns: tags.get(name.as_str()).cloned().unwrap_or_default(),
            })
            .collect(),
        arcs: graph
            .arcs()
            .iter()
            .map(|((s, t), &w)| JsonArc {
                s: s.clone(),
                t: t.clone(),
                w,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&dump).expect("graph dump serializes")
}

/// Rebuilds a graph from its JSON dump (pattern annotations are derived
/// data and are recomputed rather than trusted).
pub fn from_json(text: &str) -> Result<MigrationGraph, GraphError> {
    let dump: JsonGraph =
        serde_json::from_str(text).map_err(|e| GraphError::BadJson(e.to_string()))?;
    let mut graph = MigrationGraph::default();
    for node in dump.nodes {
        graph.nodes.insert(node.name, node.users);
    }
    for arc in dump.arcs {
        if !graph.nodes.contains_key(&arc.s) || !graph.nodes.contains_key(&arc.t) {
            return Err(GraphError::BadJson(format!(
                "arc {} -> {} references a missing node",
                arc.s, arc.t
            )));
        }
        graph.arcs.insert((arc.s, arc.t), arc.w);
    }
    Ok(graph)
}

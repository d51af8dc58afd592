//! Decision extraction: the bipartite issue/change graph and its connected
//! components.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ingestion::ArchitecturalImpactList;
use crate::model::{ArchitecturalChange, EntityId, VersionPair};
use crate::par;

/// Decisions with more changes than this are hard to review at a glance.
pub const DEFAULT_TRACTABILITY_THRESHOLD: usize = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecisionError {
    #[error("a decision needs at least one issue and one change (got {issues} issues, {changes} changes)")]
    EmptyDecision { issues: usize, changes: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DecisionKind {
    Simple,
    Compound,
    Crosscutting,
}

impl DecisionKind {
    pub const ALL: [DecisionKind; 3] = [DecisionKind::Simple, DecisionKind::Compound, DecisionKind::Crosscutting];
}

impl fmt::Display for DecisionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            DecisionKind::Simple => "Simple",
            DecisionKind::Compound => "Compound",
            DecisionKind::Crosscutting => "Crosscutting",
        };
        f.write_str(name)
    }
}

/// Simple is one issue and one change, compound several issues and one
/// change, crosscutting anything with two or more changes.
pub fn classify(issue_count: usize, change_count: usize) -> Result<DecisionKind, DecisionError> {
    match (issue_count, change_count) {
        (0, _) | (_, 0) => Err(DecisionError::EmptyDecision {
            issues: issue_count,
            changes: change_count,
        }),
        (1, 1) => Ok(DecisionKind::Simple),
        (_, 1) => Ok(DecisionKind::Compound),
        _ => Ok(DecisionKind::Crosscutting),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionGraph {
    pub version_pair: VersionPair,
    pub issue_nodes: BTreeSet<String>,
    pub change_nodes: BTreeSet<String>,
    /// `(issue id, change id)` pairs.
    pub edges: BTreeSet<(String, String)>,
}

/// Connects an issue to every change whose deltas touch one of its entities.
pub fn build_decision_graph(impact: &ArchitecturalImpactList, changes: &[ArchitecturalChange]) -> DecisionGraph {
    let mut touching: HashMap<&EntityId, Vec<&str>> = HashMap::new();
    for change in changes {
        for entity in change.entities() {
            touching.entry(entity).or_default().push(change.id.as_str());
        }
    }
    let entries: Vec<(&String, &BTreeSet<EntityId>)> = impact.entries.iter().collect();
    let per_issue = par::map(&entries, |(issue, entities)| {
        let mut linked = BTreeSet::new();
        for entity in entities.iter() {
            if let Some(ids) = touching.get(entity) {
                linked.extend(ids.iter().map(|id| (issue.to_string(), id.to_string())));
            }
        }
        linked
    });
    DecisionGraph {
        version_pair: impact.version_pair.clone(),
        issue_nodes: impact.entries.keys().cloned().collect(),
        change_nodes: changes.iter().map(|c| c.id.clone()).collect(),
        edges: per_issue.into_iter().flatten().collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub id: String,
    pub kind: DecisionKind,
    pub version_pair: VersionPair,
    pub issues: BTreeSet<String>,
    pub changes: BTreeSet<String>,
    pub tractable: bool,
}

/// Content-addressed id: stable for the same issues, changes and versions.
pub fn decision_id(version_pair: &VersionPair, issues: &BTreeSet<String>, changes: &BTreeSet<String>) -> String {
    let mut hasher = Sha256::new();
    for part in [&version_pair.from, &version_pair.to] {
        hasher.update(part.as_bytes());
        hasher.update([0u8]);
    }
    for issue in issues {
        hasher.update(b"i:");
        hasher.update(issue.as_bytes());
        hasher.update([0u8]);
    }
    for change in changes {
        hasher.update(b"c:");
        hasher.update(change.as_bytes());
        hasher.update([0u8]);
    }
    let digest = hasher.finalize();
    format!("D-{}", &hex::encode(digest.as_slice())[..16])
}

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut node: usize) -> usize {
        let mut root = node;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[node] != root {
            let next = self.parent[node];
            self.parent[node] = root;
            node = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        match self.rank[a].cmp(&self.rank[b]) {
            std::cmp::Ordering::Less => self.parent[a] = b,
            std::cmp::Ordering::Greater => self.parent[b] = a,
            std::cmp::Ordering::Equal => {
                self.parent[b] = a;
                self.rank[a] += 1;
            }
        }
    }
}

/// Drops orphan nodes and turns every remaining connected component into a
/// decision, ordered by the smallest issue id it contains.
pub fn find_decisions(graph: &DecisionGraph) -> Vec<Decision> {
    // Only nodes with at least one edge get an index; orphans never enter.
    let mut index: BTreeMap<(bool, &str), usize> = BTreeMap::new();
    let mut nodes: Vec<(bool, &str)> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(graph.edges.len());
    for (issue, change) in &graph.edges {
        let mut ends = [0usize; 2];
        for (slot, key) in [(false, issue.as_str()), (true, change.as_str())]
            .into_iter()
            .enumerate()
        {
            ends[slot] = *index.entry(key).or_insert_with(|| {
                nodes.push(key);
                nodes.len() - 1
            });
        }
        edges.push((ends[0], ends[1]));
    }

    let mut sets = DisjointSet::new(nodes.len());
    for &(i, c) in &edges {
        sets.union(i, c);
    }

    let mut groups: BTreeMap<usize, (BTreeSet<String>, BTreeSet<String>)> = BTreeMap::new();
    for (node, &(is_change, name)) in nodes.iter().enumerate() {
        let group = groups.entry(sets.find(node)).or_default();
        if is_change {
            group.1.insert(name.to_string());
        } else {
            group.0.insert(name.to_string());
        }
    }

    let mut decisions: Vec<Decision> = groups
        .into_values()
        .map(|(issues, changes)| {
            let kind = classify(issues.len(), changes.len()).expect("every edge joins one issue and one change");
            Decision {
                id: decision_id(&graph.version_pair, &issues, &changes),
                kind,
                version_pair: graph.version_pair.clone(),
                tractable: changes.len() <= DEFAULT_TRACTABILITY_THRESHOLD,
                issues,
                changes,
            }
        })
        .collect();
    decisions.sort_by(|a, b| a.issues.first().cmp(&b.issues.first()));
    decisions
}

pub fn mark_tractability(mut decision: Decision, threshold: usize) -> Decision {
    decision.tractable = decision.changes.len() <= threshold;
    decision
}

/// Share of changes that belong to some decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coverage {
    pub covered: usize,
    pub total: usize,
}

impl Coverage {
    /// `covered / total`, with an empty change set counting as fully covered.
    pub fn ratio(&self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.covered as f64 / self.total as f64
        }
    }
}

pub fn change_coverage(changes: &[ArchitecturalChange], decisions: &[Decision]) -> Coverage {
    let in_decisions: BTreeSet<&str> = decisions
        .iter()
        .flat_map(|d| d.changes.iter().map(String::as_str))
        .collect();
    let covered = changes.iter().filter(|c| in_decisions.contains(c.id.as_str())).count();
    Coverage {
        covered,
        total: changes.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ChangeKind, Delta};

    fn graph(edges: &[(&str, &str)], issues: &[&str], changes: &[&str]) -> DecisionGraph {
        DecisionGraph {
            version_pair: VersionPair::new("1", "2"),
            issue_nodes: issues.iter().map(|s| s.to_string()).collect(),
            change_nodes: changes.iter().map(|s| s.to_string()).collect(),
            edges: edges.iter().map(|(i, c)| (i.to_string(), c.to_string())).collect(),
        }
    }

    fn change(id: &str, entities: &[&str]) -> ArchitecturalChange {
        ArchitecturalChange {
            id: id.into(),
            kind: ChangeKind::ComponentModified,
            source_component: Some("x".into()),
            target_component: Some("x".into()),
            deltas: entities
                .iter()
                .map(|e| Delta::add(EntityId::new(*e).unwrap()))
                .collect(),
            version_pair: VersionPair::new("1", "2"),
        }
    }

    fn impact(entries: &[(&str, &[&str])]) -> ArchitecturalImpactList {
        ArchitecturalImpactList {
            version_pair: VersionPair::new("1", "2"),
            entries: entries
                .iter()
                .map(|(i, es)| (i.to_string(), es.iter().map(|e| EntityId::new(*e).unwrap()).collect()))
                .collect(),
        }
    }

    fn pairs(g: &DecisionGraph) -> Vec<(&str, &str)> {
        g.edges.iter().map(|(i, c)| (i.as_str(), c.as_str())).collect()
    }

    #[test]
    fn graph_edges_follow_shared_entities() {
        let g = build_decision_graph(
            &impact(&[("i1", &["e1"]), ("i2", &["e9"]), ("i3", &["e1", "e2"])]),
            &[change("c1", &["e1"]), change("c2", &["e2"])],
        );
        assert_eq!(pairs(&g), vec![("i1", "c1"), ("i3", "c1"), ("i3", "c2")]);
        assert!(g.issue_nodes.contains("i2"));
        assert_eq!(g.change_nodes.len(), 2);
    }

    #[test]
    fn classification_table() {
        assert_eq!(classify(1, 1), Ok(DecisionKind::Simple));
        assert_eq!(classify(3, 1), Ok(DecisionKind::Compound));
        assert_eq!(classify(1, 2), Ok(DecisionKind::Crosscutting));
        assert_eq!(classify(4, 7), Ok(DecisionKind::Crosscutting));
        assert!(classify(0, 1).is_err());
        assert!(classify(1, 0).is_err());
    }

    #[test]
    fn single_edge_is_simple() {
        let d = find_decisions(&graph(&[("i1", "c1")], &["i1"], &["c1"]));
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind, DecisionKind::Simple);
    }

    #[test]
    fn shared_change_is_compound() {
        let d = find_decisions(&graph(&[("i1", "c1"), ("i2", "c1")], &["i1", "i2"], &["c1"]));
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind, DecisionKind::Compound);
    }

    #[test]
    fn orphans_dropped_and_crosscutting_found() {
        let d = find_decisions(&graph(
            &[("i1", "c1"), ("i1", "c2"), ("i2", "c2")],
            &["i1", "i2", "i3"],
            &["c1", "c2", "c3"],
        ));
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind, DecisionKind::Crosscutting);
        assert_eq!(d[0].issues, ["i1".to_string(), "i2".to_string()].into());
        assert_eq!(d[0].changes, ["c1".to_string(), "c2".to_string()].into());
    }

    #[test]
    fn decisions_ordered_by_smallest_issue() {
        let d = find_decisions(&graph(&[("i9", "c1"), ("i2", "c2"), ("i5", "c2")], &[], &[]));
        let firsts: Vec<_> = d.iter().map(|d| d.issues.first().unwrap().as_str()).collect();
        assert_eq!(firsts, ["i2", "i9"]);
    }

    #[test]
    fn ids_are_content_addressed() {
        let g = graph(&[("i1", "c1")], &[], &[]);
        assert_eq!(find_decisions(&g)[0].id, find_decisions(&g)[0].id);
        let mut other = g.clone();
        other.version_pair = VersionPair::new("1", "3");
        assert_ne!(find_decisions(&g)[0].id, find_decisions(&other)[0].id);
        assert!(find_decisions(&g)[0].id.starts_with("D-"));
    }

    #[test]
    fn tractability_threshold() {
        let edges: Vec<(String, String)> = (0..6).map(|k| ("i".to_string(), format!("c{k}"))).collect();
        let mut g = graph(&[], &[], &[]);
        g.edges = edges.into_iter().collect();
        let d = find_decisions(&g).remove(0);
        assert!(!d.tractable);
        assert!(mark_tractability(d.clone(), 10).tractable);
        assert!(!mark_tractability(d.clone(), 5).tractable);

        let mut five = d;
        five.changes = (0..5).map(|k| format!("c{k}")).collect();
        assert!(mark_tractability(five, 5).tractable);
    }

    #[test]
    fn coverage_ratio() {
        let changes: Vec<_> = (0..10).map(|k| change(&format!("c{k}"), &["e"])).collect();
        let d = find_decisions(&graph(&[("i1", "c0"), ("i1", "c1")], &[], &[]));
        let cov = change_coverage(&changes, &d);
        assert_eq!((cov.covered, cov.total), (2, 10));
        assert!((cov.ratio() - 0.2).abs() < 1e-12);

        let mut every = graph(&[], &[], &[]);
        every.edges = (0..10).map(|k| ("i1".to_string(), format!("c{k}"))).collect();
        let all = find_decisions(&every);
        assert_eq!(change_coverage(&changes, &all).ratio(), 1.0);
        assert_eq!(change_coverage(&[], &[]).ratio(), 1.0);
    }
}

//! Change analysis between two architecture snapshots.
//!
//! Pass one balances the component lists, prices every component pair by the
//! number of entity deltas separating them and solves the bijective matching
//! of minimum total cost. Pass two turns every matched pair into change
//! instances.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::assignment;
use crate::model::{ArchitecturalChange, ArchitectureSnapshot, ChangeKind, Component, Delta, EntityId, VersionPair};
use crate::par;

/// Pads the shorter list with empty dummy components so both have equal length.
pub fn balance(components_a: &[Component], components_b: &[Component]) -> (Vec<Component>, Vec<Component>) {
    let mut a = components_a.to_vec();
    let mut b = components_b.to_vec();
    let n = a.len().max(b.len());
    let shorter = if a.len() < b.len() { &mut a } else { &mut b };
    let missing = n - shorter.len();
    shorter.extend((0..missing).map(Component::dummy));
    (a, b)
}

/// Number of entity deltas turning `c_a` into `c_b`: the size of the
/// symmetric difference of their entity sets.
pub fn change_cost(c_a: &Component, c_b: &Component) -> u64 {
    c_a.entities.symmetric_difference(&c_b.entities).count() as u64
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchEdge {
    pub component_a: String,
    pub component_b: String,
    pub cost: u64,
}

/// A balanced pair of component lists together with the complete cost matrix.
#[derive(Debug, Clone)]
pub struct MatchingProblem {
    components_a: Vec<Component>,
    components_b: Vec<Component>,
    costs: Vec<Vec<u64>>,
}

impl MatchingProblem {
    pub fn new(components_a: &[Component], components_b: &[Component]) -> Self {
        let (components_a, components_b) = balance(components_a, components_b);
        let costs = cost_matrix(&components_a, &components_b);
        Self {
            components_a,
            components_b,
            costs,
        }
    }

    pub fn components_a(&self) -> &[Component] {
        &self.components_a
    }

    pub fn components_b(&self) -> &[Component] {
        &self.components_b
    }

    pub fn size(&self) -> usize {
        self.components_a.len()
    }

    pub fn cost(&self, a: usize, b: usize) -> u64 {
        self.costs[a][b]
    }

    fn edge(&self, a: usize, b: usize) -> MatchEdge {
        MatchEdge {
            component_a: self.components_a[a].name.clone(),
            component_b: self.components_b[b].name.clone(),
            cost: self.costs[a][b],
        }
    }

    /// Every edge of the complete bipartite graph.
    pub fn all_edges(&self) -> impl Iterator<Item = MatchEdge> + '_ {
        let n = self.size();
        (0..n).flat_map(move |a| (0..n).map(move |b| self.edge(a, b)))
    }
}

fn cost_matrix(a: &[Component], b: &[Component]) -> Vec<Vec<u64>> {
    let mut owner: HashMap<&EntityId, usize> = HashMap::new();
    let mut partitioned = true;
    for (j, component) in b.iter().enumerate() {
        for entity in &component.entities {
            if owner.insert(entity, j).is_some() {
                partitioned = false;
            }
        }
    }
    if !partitioned {
        return par::map(a, |ca| b.iter().map(|cb| change_cost(ca, cb)).collect());
    }
    // |A △ B| = |A| + |B| - 2|A ∩ B|, with intersections counted through the
    // owner map of B.
    par::map(a, |ca| {
        let mut shared = vec![0u64; b.len()];
        for entity in &ca.entities {
            if let Some(&j) = owner.get(entity) {
                shared[j] += 1;
            }
        }
        b.iter()
            .zip(&shared)
            .map(|(cb, &s)| ca.len() as u64 + cb.len() as u64 - 2 * s)
            .collect()
    })
}

/// Minimum-total-cost bijection between the balanced component lists.
///
/// Among equal-cost optima, the result is the lexicographically smallest list
/// of `(component_a, component_b)` name pairs. Edges are returned sorted by
/// `component_a`.
pub fn min_cost_matching(problem: &MatchingProblem) -> Vec<MatchEdge> {
    solve_matching(problem)
        .into_iter()
        .map(|(a, b)| problem.edge(a, b))
        .collect()
}

/// Chosen `(index_a, index_b)` pairs, sorted by `component_a` name.
fn solve_matching(problem: &MatchingProblem) -> Vec<(usize, usize)> {
    let n = problem.size();
    let costs: Vec<Vec<i64>> = problem
        .costs
        .iter()
        .map(|row| row.iter().map(|&c| c as i64).collect())
        .collect();

    let mut row_order: Vec<usize> = (0..n).collect();
    row_order.sort_by(|&x, &y| problem.components_a[x].name.cmp(&problem.components_a[y].name));
    let mut col_order: Vec<usize> = (0..n).collect();
    col_order.sort_by(|&x, &y| problem.components_b[x].name.cmp(&problem.components_b[y].name));
    let mut col_rank = vec![0usize; n];
    for (rank, &col) in col_order.iter().enumerate() {
        col_rank[col] = rank;
    }

    let solution = assignment::solve_lexicographic(&costs, &row_order, &col_rank);
    row_order.iter().map(|&a| (a, solution.row_to_col[a])).collect()
}

fn change(
    id: String,
    kind: ChangeKind,
    source: Option<&Component>,
    target: Option<&Component>,
    deltas: BTreeSet<Delta>,
    version_pair: &VersionPair,
) -> ArchitecturalChange {
    ArchitecturalChange {
        id,
        kind,
        source_component: source.map(|c| c.name.clone()),
        target_component: target.map(|c| c.name.clone()),
        deltas,
        version_pair: version_pair.clone(),
    }
}

fn removed(c_a: &Component, version_pair: &VersionPair) -> ArchitecturalChange {
    change(
        format!("removed:{}", c_a.name),
        ChangeKind::ComponentRemoved,
        Some(c_a),
        None,
        c_a.entities.iter().cloned().map(Delta::remove).collect(),
        version_pair,
    )
}

fn added(c_b: &Component, version_pair: &VersionPair) -> ArchitecturalChange {
    change(
        format!("added:{}", c_b.name),
        ChangeKind::ComponentAdded,
        None,
        Some(c_b),
        c_b.entities.iter().cloned().map(Delta::add).collect(),
        version_pair,
    )
}

/// Change instances for one matched component pair.
///
/// Disjoint entity sets yield a removal of `c_a` and an addition of `c_b`
/// (either may be absent when its side is empty). Overlapping sets yield one
/// modification whose deltas are the symmetric difference. Equal sets yield
/// nothing.
pub fn get_change_instances(c_a: &Component, c_b: &Component, version_pair: &VersionPair) -> Vec<ArchitecturalChange> {
    if c_a.entities == c_b.entities {
        return Vec::new();
    }
    if c_a.entities.is_disjoint(&c_b.entities) {
        let mut out = Vec::with_capacity(2);
        if !c_a.is_empty() {
            out.push(removed(c_a, version_pair));
        }
        if !c_b.is_empty() {
            out.push(added(c_b, version_pair));
        }
        return out;
    }
    let deltas = c_a
        .entities
        .difference(&c_b.entities)
        .cloned()
        .map(Delta::remove)
        .chain(c_b.entities.difference(&c_a.entities).cloned().map(Delta::add))
        .collect();
    vec![change(
        format!("modified:{}>{}", c_a.name, c_b.name),
        ChangeKind::ComponentModified,
        Some(c_a),
        Some(c_b),
        deltas,
        version_pair,
    )]
}

/// Matching and changes for one version pair.
#[derive(Debug, Clone)]
pub struct ChangeAnalysis {
    pub version_pair: VersionPair,
    pub matching: Vec<MatchEdge>,
    pub changes: Vec<ArchitecturalChange>,
}

impl ChangeAnalysis {
    pub fn matching_cost(&self) -> u64 {
        self.matching.iter().map(|e| e.cost).sum()
    }

    pub fn delta_count(&self) -> u64 {
        self.changes.iter().map(|c| c.deltas.len() as u64).sum()
    }
}

pub fn analyze(arch_a: &ArchitectureSnapshot, arch_b: &ArchitectureSnapshot) -> ChangeAnalysis {
    let version_pair = VersionPair::new(&arch_a.version, &arch_b.version);
    let problem = MatchingProblem::new(arch_a.components(), arch_b.components());
    let chosen = solve_matching(&problem);
    let mut changes: Vec<ArchitecturalChange> = chosen
        .iter()
        .flat_map(|&(a, b)| get_change_instances(&problem.components_a[a], &problem.components_b[b], &version_pair))
        .collect();
    let matching = chosen.into_iter().map(|(a, b)| problem.edge(a, b)).collect();
    changes.sort_by(|x, y| x.id.cmp(&y.id));
    ChangeAnalysis {
        version_pair,
        matching,
        changes,
    }
}

/// All architectural changes between two snapshots, sorted by change id.
pub fn analyze_changes(arch_a: &ArchitectureSnapshot, arch_b: &ArchitectureSnapshot) -> Vec<ArchitecturalChange> {
    analyze(arch_a, arch_b).changes
}

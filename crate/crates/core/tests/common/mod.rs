//! Independent oracles and generators shared by the integration suites.
//! Nothing here calls into the solver or union-find under test.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use decision_miner::ingestion::{CommitRecord, IssueRecord};
use decision_miner::model::{ArchitectureSnapshot, Component, EntityId};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn entity(name: &str) -> EntityId {
    EntityId::new(name).unwrap()
}

/// Symmetric difference size, computed by plain membership counting.
pub fn naive_cost(a: &BTreeSet<EntityId>, b: &BTreeSet<EntityId>) -> u64 {
    (a.iter().filter(|e| !b.contains(*e)).count() + b.iter().filter(|e| !a.contains(*e)).count()) as u64
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    heap_permute(n, &mut perm, &mut out);
    out
}

fn heap_permute(k: usize, perm: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(perm.clone());
        return;
    }
    for i in 0..k - 1 {
        heap_permute(k - 1, perm, out);
        if k.is_multiple_of(2) {
            perm.swap(i, k - 1);
        } else {
            perm.swap(0, k - 1);
        }
    }
    heap_permute(k - 1, perm, out);
}

/// Exhaustive optimum over all n! bijections after padding with empty sides.
/// Returns the minimum cost and the lexicographically smallest optimal list
/// of (name_a, name_b) pairs sorted by name_a. Padding names follow the
/// reserved `__dummy_<k>` scheme.
pub fn brute_force_matching(a: &[Component], b: &[Component]) -> (u64, Vec<(String, String)>) {
    let n = a.len().max(b.len());
    let pad = |side: &[Component]| -> Vec<(String, BTreeSet<EntityId>)> {
        let mut v: Vec<_> = side.iter().map(|c| (c.name.clone(), c.entities.clone())).collect();
        let missing = n - v.len();
        v.extend((0..missing).map(|k| (format!("__dummy_{k}"), BTreeSet::new())));
        v
    };
    let (a, b) = (pad(a), pad(b));
    let mut best: Option<(u64, Vec<(String, String)>)> = None;
    for perm in permutations(n) {
        let cost: u64 = (0..n).map(|i| naive_cost(&a[i].1, &b[perm[i]].1)).sum();
        let mut pairs: Vec<(String, String)> = (0..n).map(|i| (a[i].0.clone(), b[perm[i]].0.clone())).collect();
        pairs.sort();
        let candidate = (cost, pairs);
        if best.as_ref().is_none_or(|current| candidate < *current) {
            best = Some(candidate);
        }
    }
    best.unwrap_or((0, Vec::new()))
}

/// Random snapshot: `components` non-empty components holding 1..=max
/// entities each, drawn without replacement from a shared pool so that two
/// snapshots overlap.
pub fn random_snapshot<R: Rng>(
    rng: &mut R,
    version: &str,
    prefix: &str,
    components: usize,
    max_entities: usize,
    pool: &[String],
) -> ArchitectureSnapshot {
    let mut names: Vec<&String> = pool.iter().collect();
    names.shuffle(rng);
    let mut cursor = 0;
    let mut out = Vec::new();
    for k in 0..components {
        let size = rng.random_range(1..=max_entities).min(names.len() - cursor);
        let members = names[cursor..cursor + size].iter().map(|n| entity(n));
        cursor += size;
        out.push(Component::new(format!("{prefix}{k}"), members));
    }
    ArchitectureSnapshot::new(version, out).unwrap()
}

pub fn entity_pool(size: usize) -> Vec<String> {
    (0..size).map(|k| format!("pkg{}.E{k}", k % 7)).collect()
}

/// Connected components of a bipartite graph by breadth-first reachability,
/// ignoring isolated nodes. Each component is (issues, changes).
pub fn reachability_components(edges: &[(String, String)]) -> BTreeSet<(BTreeSet<String>, BTreeSet<String>)> {
    let mut adjacency: BTreeMap<(bool, &str), Vec<(bool, &str)>> = BTreeMap::new();
    for (i, c) in edges {
        adjacency.entry((false, i)).or_default().push((true, c));
        adjacency.entry((true, c)).or_default().push((false, i));
    }
    let mut seen: BTreeSet<(bool, &str)> = BTreeSet::new();
    let mut out = BTreeSet::new();
    for &start in adjacency.keys() {
        if seen.contains(&start) {
            continue;
        }
        let mut issues = BTreeSet::new();
        let mut changes = BTreeSet::new();
        let mut queue = VecDeque::from([start]);
        seen.insert(start);
        while let Some(node) = queue.pop_front() {
            if node.0 {
                changes.insert(node.1.to_string());
            } else {
                issues.insert(node.1.to_string());
            }
            for &next in &adjacency[&node] {
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        out.insert((issues, changes));
    }
    out
}

/// Expected change instances for one matched pair, restated from the rules:
/// identical sets yield nothing, disjoint sets a removal and an addition
/// (each only when that side has entities), overlapping sets one
/// modification carrying the symmetric difference. Keyed by change id; the
/// value lists (added?, entity) deltas.
pub fn expected_changes(a: &Component, b: &Component) -> BTreeMap<String, BTreeSet<(bool, String)>> {
    let mut out = BTreeMap::new();
    if a.entities == b.entities {
        return out;
    }
    let names = |set: &BTreeSet<EntityId>| set.iter().map(|e| e.as_str().to_string()).collect::<Vec<_>>();
    let shared = a.entities.iter().any(|e| b.entities.contains(e));
    if shared {
        let mut deltas = BTreeSet::new();
        for e in names(&a.entities) {
            if !b.entities.iter().any(|x| x.as_str() == e) {
                deltas.insert((false, e));
            }
        }
        for e in names(&b.entities) {
            if !a.entities.iter().any(|x| x.as_str() == e) {
                deltas.insert((true, e));
            }
        }
        out.insert(format!("modified:{}>{}", a.name, b.name), deltas);
    } else {
        if !a.entities.is_empty() {
            out.insert(
                format!("removed:{}", a.name),
                names(&a.entities).into_iter().map(|e| (false, e)).collect(),
            );
        }
        if !b.entities.is_empty() {
            out.insert(
                format!("added:{}", b.name),
                names(&b.entities).into_iter().map(|e| (true, e)).collect(),
            );
        }
    }
    out
}

/// Source path that the default Java rules map back to `entity`.
pub fn java_path(entity: &str) -> String {
    format!("src/java/{}.java", entity.replace('.', "/"))
}

/// A random history: `versions` snapshots over a shared entity pool, plus
/// issues whose commits touch random pool entities (and sometimes files no
/// rule maps). Every issue is resolved and merged; a few miss either flag.
pub fn random_history<R: Rng>(
    rng: &mut R,
    versions: usize,
    components: usize,
    max_entities: usize,
    pool_size: usize,
    issues_per_version: usize,
) -> (Vec<ArchitectureSnapshot>, Vec<IssueRecord>, Vec<CommitRecord>) {
    let pool = entity_pool(pool_size);
    let snapshots: Vec<_> = (0..versions)
        .map(|v| {
            let count = rng.random_range(1..=components);
            random_snapshot(rng, &format!("{v}.0"), "c", count, max_entities, &pool)
        })
        .collect();
    let mut issues = Vec::new();
    let mut commits = Vec::new();
    for v in 1..versions {
        for k in 0..issues_per_version {
            let id = format!("P-{v}{k:04}");
            let mut commit_ids = BTreeSet::new();
            for c in 0..rng.random_range(1..=2) {
                let commit_id = format!("{id}-c{c}");
                let mut paths: BTreeSet<String> = (0..rng.random_range(1..=3))
                    .map(|_| java_path(&pool[rng.random_range(0..pool.len())]))
                    .collect();
                if rng.random_bool(0.2) {
                    paths.insert("docs/notes.txt".into());
                }
                commits.push(CommitRecord {
                    id: commit_id.clone(),
                    paths,
                    issue_keys: BTreeSet::new(),
                });
                commit_ids.insert(commit_id);
            }
            issues.push(IssueRecord {
                id,
                summary: format!("issue {k} of {v}.0"),
                resolved: rng.random_bool(0.95),
                merged: rng.random_bool(0.95),
                versions: BTreeSet::from([format!("{v}.0")]),
                commit_ids,
            });
        }
    }
    (snapshots, issues, commits)
}

/// Synthetic evolving history for timing runs. Entities start spread evenly
/// over `components` components; each release moves about one percent of
/// them and occasionally renames a component. Issues of a release touch a
/// mix of moved and untouched entities.
pub fn synthetic_history(
    seed: u64,
    versions: usize,
    components: usize,
    entities: usize,
    issues: usize,
) -> (Vec<ArchitectureSnapshot>, Vec<IssueRecord>, Vec<CommitRecord>) {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (0..entities).map(|k| format!("org.p{}.E{k}", k % components)).collect();
    let mut owner: Vec<usize> = (0..entities).map(|k| k % components).collect();
    let mut labels: Vec<String> = (0..components).map(|c| format!("comp{c}")).collect();
    let build = |version: &str, owner: &[usize], labels: &[String]| {
        let mut members: Vec<Vec<EntityId>> = vec![Vec::new(); labels.len()];
        for (k, &c) in owner.iter().enumerate() {
            members[c].push(entity(&names[k]));
        }
        let comps = labels
            .iter()
            .zip(members)
            .filter(|(_, m)| !m.is_empty())
            .map(|(l, m)| Component::new(l.clone(), m))
            .collect();
        ArchitectureSnapshot::new(version, comps).unwrap()
    };

    let mut snapshots = vec![build("v0", &owner, &labels)];
    let mut issue_records = Vec::new();
    let mut commits = Vec::new();
    let per_version = issues.div_ceil(versions.saturating_sub(1).max(1));
    for v in 1..versions {
        let mut moved = Vec::new();
        for _ in 0..(entities / 100).max(1) {
            let k = rng.random_range(0..entities);
            owner[k] = rng.random_range(0..components);
            moved.push(k);
        }
        if rng.random_bool(0.3) {
            let c = rng.random_range(0..components);
            labels[c] = format!("comp{c}r{v}");
        }
        let version = format!("v{v}");
        snapshots.push(build(&version, &owner, &labels));
        for n in 0..per_version {
            if issue_records.len() == issues {
                break;
            }
            let id = format!("SYN-{}", issue_records.len() + 1);
            let commit_id = format!("{id}-c");
            let paths: BTreeSet<String> = (0..rng.random_range(1..=3))
                .map(|_| {
                    let k = if n % 2 == 0 {
                        moved[rng.random_range(0..moved.len())]
                    } else {
                        rng.random_range(0..entities)
                    };
                    java_path(&names[k])
                })
                .collect();
            commits.push(CommitRecord {
                id: commit_id.clone(),
                paths,
                issue_keys: BTreeSet::new(),
            });
            issue_records.push(IssueRecord {
                id,
                summary: format!("synthetic issue for {version}"),
                resolved: true,
                merged: true,
                versions: BTreeSet::from([version.clone()]),
                commit_ids: BTreeSet::from([commit_id]),
            });
        }
    }
    (snapshots, issue_records, commits)
}

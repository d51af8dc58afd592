//! Mapping of resolved issues onto the architectural entities their commits
//! touched (the architectural impact list).

mod exclusions;
mod gitlog;
mod paths;
mod records;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{EntityId, VersionPair};

pub use exclusions::{apply_exclusions, strip_excluded_changes, ExclusionList};
pub use gitlog::convert_name_status_log;
pub use paths::{path_to_entity, PathRule, PathRules};
pub use records::{load_commits, load_issues, to_json_lines, CommitRecord, IssueRecord};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{what} record at line {line}: {message}")]
    Record {
        what: &'static str,
        line: usize,
        message: String,
    },
    #[error("duplicate {what} id `{id}` at line {line}")]
    DuplicateId {
        what: &'static str,
        line: usize,
        id: String,
    },
    #[error("path rule #{index}: {message}")]
    InvalidRule { index: usize, message: String },
    #[error("configuration: {0}")]
    Config(String),
    #[error("log line {line}: {message}")]
    Log { line: usize, message: String },
}

/// Issues that belong to `version` and are resolved with merged changes.
pub fn select_issues(issues: &[IssueRecord], version: &str) -> Vec<IssueRecord> {
    issues
        .iter()
        .filter(|i| i.resolved && i.merged && i.versions.contains(version))
        .cloned()
        .collect()
}

/// Resolved, merged issues whose version labels name none of `known`.
/// Typically a mislabeled affected version.
pub fn issues_with_unknown_versions(issues: &[IssueRecord], known: &BTreeSet<String>) -> Vec<String> {
    issues
        .iter()
        .filter(|i| i.resolved && i.merged && i.versions.is_disjoint(known))
        .map(|i| i.id.clone())
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinkOptions {
    /// Also link commits whose messages mention the issue key.
    pub link_by_message_keys: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchitecturalImpactList {
    pub version_pair: VersionPair,
    pub entries: BTreeMap<String, BTreeSet<EntityId>>,
}

impl ArchitecturalImpactList {
    /// Every entity mentioned by some entry.
    pub fn entities(&self) -> BTreeSet<&EntityId> {
        self.entries.values().flatten().collect()
    }

    /// Fraction of mapped entities present in `universe`; 1 when nothing is
    /// mapped. A low value hints at mismatched entity granularity.
    pub fn overlap_ratio(&self, universe: &BTreeSet<EntityId>) -> f64 {
        let mapped = self.entities();
        if mapped.is_empty() {
            return 1.0;
        }
        let shared = mapped.iter().filter(|e| universe.contains(**e)).count();
        shared as f64 / mapped.len() as f64
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MissingCommit {
    pub issue: String,
    pub commit: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImpactDiagnostics {
    /// Commit ids referenced by an issue but absent from the commit log.
    pub missing_commits: Vec<MissingCommit>,
    /// Changed paths no rule could translate (counted once per commit).
    pub skipped_paths: u64,
    /// Distinct entities removed by the exclusion list.
    pub excluded_entities: u64,
}

#[derive(Debug, Clone)]
pub struct ImpactBuild {
    pub impact: ArchitecturalImpactList,
    pub diagnostics: ImpactDiagnostics,
}

/// Builds the impact list for already selected issues.
///
/// An issue's entities are the union of the mapped paths of all its commits,
/// minus excluded namespaces. Issues without any entity keep an empty entry.
pub fn build_impact_list(
    issues: &[IssueRecord],
    commits: &[CommitRecord],
    rules: &PathRules,
    exclusions: &ExclusionList,
    version_pair: &VersionPair,
    options: &LinkOptions,
) -> ImpactBuild {
    let by_id: HashMap<&str, &CommitRecord> = commits.iter().map(|c| (c.id.as_str(), c)).collect();
    let mut by_key: HashMap<&str, Vec<&CommitRecord>> = HashMap::new();
    if options.link_by_message_keys {
        for commit in commits {
            for key in &commit.issue_keys {
                by_key.entry(key.as_str()).or_default().push(commit);
            }
        }
    }

    let mut mapped: HashMap<&str, BTreeSet<EntityId>> = HashMap::new();
    let mut diagnostics = ImpactDiagnostics::default();
    let mut excluded: BTreeSet<EntityId> = BTreeSet::new();
    let mut entries = BTreeMap::new();

    for issue in issues {
        let mut linked: Vec<&CommitRecord> = Vec::new();
        for commit_id in &issue.commit_ids {
            match by_id.get(commit_id.as_str()) {
                Some(commit) => linked.push(commit),
                None => diagnostics.missing_commits.push(MissingCommit {
                    issue: issue.id.clone(),
                    commit: commit_id.clone(),
                }),
            }
        }
        if let Some(extra) = by_key.get(issue.id.as_str()) {
            linked.extend(extra.iter().copied());
        }

        let mut entities = BTreeSet::new();
        for commit in linked {
            let commit_entities = mapped.entry(commit.id.as_str()).or_insert_with(|| {
                let mut set = BTreeSet::new();
                for path in &commit.paths {
                    match path_to_entity(path, rules) {
                        Some(entity) => {
                            set.insert(entity);
                        }
                        None => diagnostics.skipped_paths += 1,
                    }
                }
                set
            });
            entities.extend(commit_entities.iter().cloned());
        }
        let kept = apply_exclusions(&entities, exclusions);
        excluded.extend(entities.difference(&kept).cloned());
        entries.insert(issue.id.clone(), kept);
    }
    diagnostics.excluded_entities = excluded.len() as u64;

    ImpactBuild {
        impact: ArchitecturalImpactList {
            version_pair: version_pair.clone(),
            entries,
        },
        diagnostics,
    }
}

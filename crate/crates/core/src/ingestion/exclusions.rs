//! Namespace exclusion lists for third-party code.

use std::collections::BTreeSet;

use crate::model::{ArchitecturalChange, EntityId};

const SEPARATORS: [char; 5] = ['.', '/', '$', ':', '\\'];

/// Namespace prefixes whose entities are not developed by the project team.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExclusionList {
    prefixes: Vec<String>,
}

impl ExclusionList {
    pub fn new(prefixes: impl IntoIterator<Item = impl Into<String>>) -> Self {
        let mut prefixes: Vec<String> = prefixes.into_iter().map(Into::into).collect();
        prefixes.sort();
        prefixes.dedup();
        Self { prefixes }
    }

    /// One prefix per line; `#` starts a comment. A trailing `.*` or
    /// separator on an entry is ignored.
    pub fn parse(text: &str) -> Self {
        Self::new(text.lines().filter_map(|line| {
            let entry = line.split('#').next().unwrap_or("").trim();
            let entry = entry.strip_suffix(".*").unwrap_or(entry);
            let entry = entry.trim_end_matches(SEPARATORS);
            (!entry.is_empty()).then(|| entry.to_string())
        }))
    }

    pub fn prefixes(&self) -> &[String] {
        &self.prefixes
    }

    pub fn is_empty(&self) -> bool {
        self.prefixes.is_empty()
    }

    /// True when `name` equals a prefix or continues it after a separator.
    pub fn excludes(&self, name: &str) -> bool {
        self.prefixes
            .iter()
            .any(|prefix| match name.strip_prefix(prefix.as_str()) {
                Some("") => true,
                Some(rest) => rest.starts_with(SEPARATORS),
                None => false,
            })
    }
}

pub fn apply_exclusions(entities: &BTreeSet<EntityId>, exclusions: &ExclusionList) -> BTreeSet<EntityId> {
    entities
        .iter()
        .filter(|e| !exclusions.excludes(e.as_str()))
        .cloned()
        .collect()
}

/// Removes excluded deltas from every change. Changes left without deltas
/// are dropped; their ids are returned alongside the surviving changes.
pub fn strip_excluded_changes(
    changes: &[ArchitecturalChange],
    exclusions: &ExclusionList,
) -> (Vec<ArchitecturalChange>, Vec<String>) {
    if exclusions.is_empty() {
        return (changes.to_vec(), Vec::new());
    }
    let mut kept = Vec::with_capacity(changes.len());
    let mut dropped = Vec::new();
    for change in changes {
        let mut change = change.clone();
        change.deltas.retain(|d| !exclusions.excludes(d.entity.as_str()));
        if change.deltas.is_empty() {
            dropped.push(change.id);
        } else {
            kept.push(change);
        }
    }
    (kept, dropped)
}

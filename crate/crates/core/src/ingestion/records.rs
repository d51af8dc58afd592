//! Line-delimited JSON issue exports and commit logs.

use std::collections::{BTreeSet, HashSet};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::IngestError;

/// One tracker item. Unknown fields in the export are ignored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IssueRecord {
    pub id: String,
    #[serde(default)]
    pub summary: String,
    #[serde(default)]
    pub resolved: bool,
    #[serde(default)]
    pub merged: bool,
    #[serde(default)]
    pub versions: BTreeSet<String>,
    #[serde(default, rename = "commits")]
    pub commit_ids: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitRecord {
    pub id: String,
    #[serde(default)]
    pub paths: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub issue_keys: BTreeSet<String>,
}

trait Keyed {
    fn key(&self) -> &str;
}

impl Keyed for IssueRecord {
    fn key(&self) -> &str {
        &self.id
    }
}

impl Keyed for CommitRecord {
    fn key(&self) -> &str {
        &self.id
    }
}

fn load_lines<T: DeserializeOwned + Keyed>(text: &str, what: &'static str) -> Result<Vec<T>, IngestError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (index, line) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let record: T = serde_json::from_str(line).map_err(|e| IngestError::Record {
            what,
            line: line_no,
            message: e.to_string(),
        })?;
        if record.key().trim().is_empty() {
            return Err(IngestError::Record {
                what,
                line: line_no,
                message: "empty `id`".into(),
            });
        }
        if !seen.insert(record.key().to_string()) {
            return Err(IngestError::DuplicateId {
                what,
                line: line_no,
                id: record.key().to_string(),
            });
        }
        out.push(record);
    }
    Ok(out)
}

/// Parses an issue export, one JSON object per line.
pub fn load_issues(text: &str) -> Result<Vec<IssueRecord>, IngestError> {
    load_lines(text, "issue")
}

/// Parses a commit log, one JSON object per line.
pub fn load_commits(text: &str) -> Result<Vec<CommitRecord>, IngestError> {
    load_lines(text, "commit")
}

/// Serializes records back into the line-delimited form.
pub fn to_json_lines<T: Serialize>(records: &[T]) -> String {
    let mut out = String::new();
    for record in records {
        out.push_str(&serde_json::to_string(record).expect("records serialize"));
        out.push('\n');
    }
    out
}

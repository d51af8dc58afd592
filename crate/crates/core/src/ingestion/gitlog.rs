//! Converts `git log --name-status` output into commit records.
//!
//! Each commit block starts with `commit <hash>`; indented lines are the
//! message (scanned for issue keys such as `HADOOP-1234`), and lines like
//! `M\tpath` or `R100\told\tnew` are changed paths. Renames and copies
//! contribute both paths.

use std::sync::OnceLock;

use regex::Regex;

use super::records::CommitRecord;
use super::IngestError;

fn issue_key_pattern() -> &'static Regex {
    static PATTERN: OnceLock<Regex> = OnceLock::new();
    PATTERN.get_or_init(|| Regex::new(r"\b[A-Z][A-Z0-9_]*-[0-9]+\b").expect("valid regex"))
}

fn status_pattern() -> &'static Regex {
    static PATTERN: OnceLock<Regex> = OnceLock::new();
    PATTERN.get_or_init(|| Regex::new(r"^([ACDMRTUXB])([0-9]*)\t(.+)$").expect("valid regex"))
}

const HEADERS: [&str; 7] = [
    "Author:",
    "AuthorDate:",
    "Commit:",
    "CommitDate:",
    "Date:",
    "Merge:",
    "Notes:",
];

pub fn convert_name_status_log(text: &str) -> Result<Vec<CommitRecord>, IngestError> {
    let mut commits: Vec<CommitRecord> = Vec::new();
    for (index, line) in text.lines().enumerate() {
        let line_no = index + 1;
        if let Some(rest) = line.strip_prefix("commit ") {
            let id = rest.split_whitespace().next().unwrap_or("");
            if id.is_empty() {
                return Err(IngestError::Log {
                    line: line_no,
                    message: "commit header without hash".into(),
                });
            }
            commits.push(CommitRecord {
                id: id.to_string(),
                paths: Default::default(),
                issue_keys: Default::default(),
            });
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let Some(current) = commits.last_mut() else {
            return Err(IngestError::Log {
                line: line_no,
                message: "content before the first commit header".into(),
            });
        };
        if line.starts_with("    ") {
            current
                .issue_keys
                .extend(issue_key_pattern().find_iter(line).map(|m| m.as_str().to_string()));
        } else if let Some(caps) = status_pattern().captures(line) {
            let paths = &caps[3];
            current.paths.extend(paths.split('\t').map(str::to_string));
        } else if HEADERS.iter().any(|h| line.starts_with(h)) {
            continue;
        } else {
            return Err(IngestError::Log {
                line: line_no,
                message: format!("unrecognized line {line:?}"),
            });
        }
    }
    Ok(commits)
}

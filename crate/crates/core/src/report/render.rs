use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::decisions::Decision;
use crate::model::{ArchitecturalChange, ChangeKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum DecisionFormat {
    #[default]
    Text,
    Structured,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IssueLine {
    pub id: String,
    pub summary: String,
}

/// A decision with its issues and the full delta detail of its changes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionDocument {
    #[serde(flatten)]
    pub decision: Decision,
    pub issue_details: Vec<IssueLine>,
    pub change_details: Vec<ArchitecturalChange>,
}

impl DecisionDocument {
    pub fn new(decision: &Decision, issues: &BTreeMap<String, String>, changes: &[ArchitecturalChange]) -> Self {
        Self {
            decision: decision.clone(),
            issue_details: decision
                .issues
                .iter()
                .map(|id| IssueLine {
                    id: id.clone(),
                    summary: issues.get(id).cloned().unwrap_or_default(),
                })
                .collect(),
            change_details: changes
                .iter()
                .filter(|c| decision.changes.contains(&c.id))
                .cloned()
                .collect(),
        }
    }
}

fn describe_change(change: &ArchitecturalChange) -> String {
    let verb = change.kind.verb();
    let component = match change.kind {
        ChangeKind::ComponentModified => change.display_component(),
        _ => change
            .target_component
            .clone()
            .or_else(|| change.source_component.clone())
            .unwrap_or_default(),
    };
    format!(
        "component {component} {verb} (+{}/-{} entities)",
        change.added_count(),
        change.removed_count()
    )
}

fn render_text(doc: &DecisionDocument) -> String {
    let d = &doc.decision;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} [{}] {} ({} issue(s), {} change(s), {})",
        d.id,
        d.kind,
        d.version_pair,
        d.issues.len(),
        d.changes.len(),
        if d.tractable { "tractable" } else { "not tractable" }
    );
    let _ = writeln!(out, "  Issue(s):");
    for (n, issue) in doc.issue_details.iter().enumerate() {
        let summary = issue.summary.lines().next().unwrap_or("");
        let _ = writeln!(out, "    [{}] {}: {}", n + 1, issue.id, summary);
    }
    let _ = writeln!(out, "  Change(s):");
    for (n, change) in doc.change_details.iter().enumerate() {
        let _ = writeln!(out, "    ({}) {}", n + 1, describe_change(change));
    }
    out
}

/// Text card or JSON document for one decision.
pub fn render_decision(
    decision: &Decision,
    issues: &BTreeMap<String, String>,
    changes: &[ArchitecturalChange],
    format: DecisionFormat,
) -> String {
    let doc = DecisionDocument::new(decision, issues, changes);
    match format {
        DecisionFormat::Text => render_text(&doc),
        DecisionFormat::Structured => super::to_json(&doc),
    }
}

pub fn render_decisions_text(
    decisions: &[Decision],
    issues: &BTreeMap<String, String>,
    changes: &[ArchitecturalChange],
) -> String {
    decisions
        .iter()
        .map(|d| render_decision(d, issues, changes, DecisionFormat::Text))
        .collect::<Vec<_>>()
        .join("\n")
}

//! Machine-readable documents produced by the tool, and the summaries and
//! renderings derived from them.

mod render;
mod summary;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::changes::MatchEdge;
use crate::decisions::{Coverage, Decision};
use crate::error::{Error, Result};
use crate::ingestion::{ArchitecturalImpactList, ImpactDiagnostics};
use crate::model::{ArchitecturalChange, VersionPair};

pub use render::{render_decision, render_decisions_text, DecisionDocument, DecisionFormat};
pub use summary::{
    emit_distribution, render_coverage, render_distribution, render_summary, summarize, Distribution, DistributionRow,
    KindCounts, RunSummary, SummaryRow, COUNTING_CONVENTION,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Output of `analyze-changes`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeSetDocument {
    pub schema_version: u32,
    pub version_pair: VersionPair,
    pub matching: Vec<MatchEdge>,
    pub changes: Vec<ArchitecturalChange>,
}

/// Output of `build-impact`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImpactDocument {
    pub schema_version: u32,
    pub impact: ArchitecturalImpactList,
    /// Issue id to summary, for every issue in the impact list.
    pub issues: BTreeMap<String, String>,
    pub diagnostics: ImpactDiagnostics,
}

/// Output of `extract-decisions`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionSetDocument {
    pub schema_version: u32,
    pub version_pair: VersionPair,
    pub tractability_threshold: usize,
    pub coverage: Coverage,
    pub decisions: Vec<Decision>,
}

/// Share of impact-list entities that occur in either snapshot of the pair.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityOverlap {
    pub shared: usize,
    pub mapped: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairDiagnostics {
    #[serde(flatten)]
    pub impact: ImpactDiagnostics,
    pub entity_overlap: EntityOverlap,
}

/// Everything computed for one consecutive version pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairReport {
    pub version_pair: VersionPair,
    pub matching: Vec<MatchEdge>,
    /// Changes detected before the exclusion list is applied.
    pub detected_change_count: usize,
    /// Changes after cleanup; decisions refer to these.
    pub changes: Vec<ArchitecturalChange>,
    /// Ids of changes that consisted solely of excluded entities.
    pub excluded_changes: Vec<String>,
    pub impact: ArchitecturalImpactList,
    pub issues: BTreeMap<String, String>,
    pub decisions: Vec<Decision>,
    pub coverage_before_cleanup: Coverage,
    pub coverage_after_cleanup: Coverage,
    pub diagnostics: PairDiagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    Input,
    Invariant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairFailure {
    pub version_pair: VersionPair,
    pub kind: FailureKind,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunDiagnostics {
    /// Resolved, merged issues labelled with versions absent from the run.
    pub issues_with_unknown_versions: Vec<String>,
}

/// Structured output of a pipeline run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub convention: String,
    pub tractability_threshold: usize,
    pub versions: Vec<String>,
    pub pairs: Vec<PairReport>,
    pub failures: Vec<PairFailure>,
    pub diagnostics: RunDiagnostics,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: RunReport = serde_json::from_str(text).map_err(|source| Error::Json {
            context: "run report".into(),
            source,
        })?;
        if report.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                report.schema_version
            )));
        }
        Ok(report)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("documents serialize");
    text.push('\n');
    text
}

pub fn from_json<T: serde::de::DeserializeOwned>(text: &str, context: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|source| Error::Json {
        context: context.to_string(),
        source,
    })
}

//! End-to-end run over an ordered version history.
//!
//! Every consecutive version pair goes through change analysis, impact-list
//! construction and decision extraction. Pairs are independent and run in
//! parallel; a failing pair is recorded and the others proceed.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::changes;
use crate::decisions::{
    build_decision_graph, change_coverage, find_decisions, mark_tractability, DEFAULT_TRACTABILITY_THRESHOLD,
};
use crate::error::{read_file, Error, Result};
use crate::ingestion::{
    apply_exclusions, build_impact_list, issues_with_unknown_versions, load_commits, load_issues, select_issues,
    strip_excluded_changes, ArchitecturalImpactList, CommitRecord, ExclusionList, IssueRecord, LinkOptions, PathRules,
};
use crate::model::{parse_snapshot, ArchitectureSnapshot, VersionPair};
use crate::par;
use crate::report::{
    EntityOverlap, FailureKind, PairDiagnostics, PairFailure, PairReport, RunDiagnostics, RunReport,
    COUNTING_CONVENTION, SCHEMA_VERSION,
};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VersionEntry {
    pub label: String,
    pub snapshot: PathBuf,
}

fn default_threshold() -> usize {
    DEFAULT_TRACTABILITY_THRESHOLD
}

/// Run configuration, read from TOML. Relative paths are resolved against
/// the directory holding the configuration file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub versions: Vec<VersionEntry>,
    pub issues: PathBuf,
    pub commits: PathBuf,
    #[serde(default)]
    pub exclusions: Option<PathBuf>,
    #[serde(default)]
    pub rules: Option<PathBuf>,
    #[serde(default = "default_threshold")]
    pub tractability_threshold: usize,
    #[serde(default)]
    pub link_by_message_keys: bool,
    #[serde(default)]
    pub workers: Option<usize>,
    /// Directory receiving `report.json` and `decisions.txt`.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl PipelineConfig {
    pub fn from_toml(text: &str, base: &Path) -> Result<Self> {
        let mut config: PipelineConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for v in &mut config.versions {
            resolve(&mut v.snapshot);
        }
        resolve(&mut config.issues);
        resolve(&mut config.commits);
        for p in [&mut config.exclusions, &mut config.rules, &mut config.output]
            .into_iter()
            .flatten()
        {
            resolve(p);
        }
        if config.tractability_threshold == 0 {
            return Err(Error::Config("tractability_threshold must be positive".into()));
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = read_file(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base)
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub tractability_threshold: usize,
    pub link: LinkOptions,
    pub workers: Option<usize>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            tractability_threshold: DEFAULT_TRACTABILITY_THRESHOLD,
            link: LinkOptions::default(),
            workers: None,
        }
    }
}

/// One version of the history. A snapshot that failed to load only breaks
/// the pairs it belongs to.
#[derive(Debug, Clone)]
pub struct VersionInput {
    pub label: String,
    pub snapshot: std::result::Result<ArchitectureSnapshot, String>,
}

#[derive(Debug, Clone)]
pub struct PipelineInputs {
    pub versions: Vec<VersionInput>,
    pub issues: Vec<IssueRecord>,
    pub commits: Vec<CommitRecord>,
    pub rules: PathRules,
    pub exclusions: ExclusionList,
}

impl PipelineInputs {
    pub fn from_snapshots(
        snapshots: Vec<ArchitectureSnapshot>,
        issues: Vec<IssueRecord>,
        commits: Vec<CommitRecord>,
        rules: PathRules,
        exclusions: ExclusionList,
    ) -> Self {
        Self {
            versions: snapshots
                .into_iter()
                .map(|s| VersionInput {
                    label: s.version.clone(),
                    snapshot: Ok(s),
                })
                .collect(),
            issues,
            commits,
            rules,
            exclusions,
        }
    }

    /// Reads every input named by `config`. Issue, commit, rule and exclusion
    /// files are required to load; snapshots may fail individually.
    pub fn load(config: &PipelineConfig) -> Result<Self> {
        let versions = par::map(&config.versions, |entry| VersionInput {
            label: entry.label.clone(),
            snapshot: read_file(&entry.snapshot)
                .and_then(|text| parse_snapshot(&text, &entry.label).map_err(Error::from))
                .map_err(|e| format!("snapshot {}: {e}", entry.snapshot.display())),
        });
        let issues = load_issues(&read_file(&config.issues)?)?;
        let commits = load_commits(&read_file(&config.commits)?)?;
        let rules = match &config.rules {
            Some(path) => PathRules::from_toml(&read_file(path)?)?,
            None => PathRules::java_default(),
        };
        let exclusions = match &config.exclusions {
            Some(path) => ExclusionList::parse(&read_file(path)?),
            None => ExclusionList::default(),
        };
        Ok(Self {
            versions,
            issues,
            commits,
            rules,
            exclusions,
        })
    }
}

fn issue_summaries(issues: &[IssueRecord], impact: &ArchitecturalImpactList) -> BTreeMap<String, String> {
    issues
        .iter()
        .filter(|i| impact.entries.contains_key(&i.id))
        .map(|i| (i.id.clone(), i.summary.clone()))
        .collect()
}

/// Runs all three phases for one version pair.
pub fn process_pair(
    arch_a: &ArchitectureSnapshot,
    arch_b: &ArchitectureSnapshot,
    inputs: &PipelineInputs,
    options: &PipelineOptions,
) -> Result<PairReport> {
    let analysis = changes::analyze(arch_a, arch_b);
    for change in &analysis.changes {
        change
            .validate()
            .map_err(|e| Error::Invariant(format!("{}: {e}", analysis.version_pair)))?;
    }
    if analysis.delta_count() != analysis.matching_cost() {
        return Err(Error::Invariant(format!(
            "{}: {} deltas emitted for a matching of cost {}",
            analysis.version_pair,
            analysis.delta_count(),
            analysis.matching_cost()
        )));
    }
    let version_pair = analysis.version_pair.clone();

    let selected = select_issues(&inputs.issues, &version_pair.to);
    let raw = build_impact_list(
        &selected,
        &inputs.commits,
        &inputs.rules,
        &ExclusionList::default(),
        &version_pair,
        &options.link,
    );
    let raw_decisions = find_decisions(&build_decision_graph(&raw.impact, &analysis.changes));
    let coverage_before_cleanup = change_coverage(&analysis.changes, &raw_decisions);

    let impact = ArchitecturalImpactList {
        version_pair: version_pair.clone(),
        entries: raw
            .impact
            .entries
            .iter()
            .map(|(issue, entities)| (issue.clone(), apply_exclusions(entities, &inputs.exclusions)))
            .collect(),
    };
    let (clean_changes, excluded_changes) = strip_excluded_changes(&analysis.changes, &inputs.exclusions);
    let decisions: Vec<_> = find_decisions(&build_decision_graph(&impact, &clean_changes))
        .into_iter()
        .map(|d| mark_tractability(d, options.tractability_threshold))
        .collect();
    let coverage_after_cleanup = change_coverage(&clean_changes, &decisions);

    let mut impact_diagnostics = raw.diagnostics;
    let raw_entities = raw.impact.entities();
    let kept_entities = impact.entities();
    impact_diagnostics.excluded_entities = (raw_entities.len() - kept_entities.len()) as u64;

    let universe: BTreeSet<_> = arch_a
        .entity_universe()
        .into_iter()
        .chain(arch_b.entity_universe())
        .collect();
    let entity_overlap = EntityOverlap {
        shared: kept_entities.iter().filter(|e| universe.contains(**e)).count(),
        mapped: kept_entities.len(),
    };

    Ok(PairReport {
        issues: issue_summaries(&selected, &impact),
        version_pair,
        matching: analysis.matching,
        detected_change_count: analysis.changes.len(),
        changes: clean_changes,
        excluded_changes,
        impact,
        decisions,
        coverage_before_cleanup,
        coverage_after_cleanup,
        diagnostics: PairDiagnostics {
            impact: impact_diagnostics,
            entity_overlap,
        },
    })
}

/// Processes every consecutive version pair.
pub fn run(inputs: &PipelineInputs, options: &PipelineOptions) -> RunReport {
    let pair_indices: Vec<usize> = (1..inputs.versions.len()).collect();
    let outcomes = par::with_workers(options.workers, || {
        par::map(&pair_indices, |&k| {
            let (a, b) = (&inputs.versions[k - 1], &inputs.versions[k]);
            let version_pair = VersionPair::new(&a.label, &b.label);
            let failure = |kind, message: String| PairFailure {
                version_pair: version_pair.clone(),
                kind,
                message,
            };
            match (&a.snapshot, &b.snapshot) {
                (Ok(sa), Ok(sb)) => process_pair(sa, sb, inputs, options).map_err(|e| {
                    let kind = if e.is_invariant() {
                        FailureKind::Invariant
                    } else {
                        FailureKind::Input
                    };
                    failure(kind, e.to_string())
                }),
                (Err(e), _) | (_, Err(e)) => Err(failure(FailureKind::Input, e.clone())),
            }
        })
    });

    let mut pairs = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(pair) => pairs.push(pair),
            Err(failure) => failures.push(failure),
        }
    }
    let labels: Vec<String> = inputs.versions.iter().map(|v| v.label.clone()).collect();
    let known: BTreeSet<String> = labels.iter().cloned().collect();

    RunReport {
        schema_version: SCHEMA_VERSION,
        convention: COUNTING_CONVENTION.to_string(),
        tractability_threshold: options.tractability_threshold,
        versions: labels,
        pairs,
        failures,
        diagnostics: RunDiagnostics {
            issues_with_unknown_versions: issues_with_unknown_versions(&inputs.issues, &known),
        },
    }
}

/// Loads the configured inputs and runs the pipeline.
pub fn run_pipeline(config: &PipelineConfig) -> Result<RunReport> {
    let inputs = PipelineInputs::load(config)?;
    let options = PipelineOptions {
        tractability_threshold: config.tractability_threshold,
        link: LinkOptions {
            link_by_message_keys: config.link_by_message_keys,
        },
        workers: config.workers,
    };
    Ok(run(&inputs, &options))
}

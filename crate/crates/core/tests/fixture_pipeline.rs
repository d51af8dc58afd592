//! The two-release mini project under `tests/fixtures/mini`.
//!
//! Expected values were derived by hand before running the tool:
//! costs (rows core/io/web, columns core/stream/web) are
//! [1 3 4; 4 2 3; 5 3 2]; of the six bijections only the diagonal reaches
//! the minimum 5. The matched pairs give four changes: core modified
//! (+Scheduler), io removed (-Reader), stream added (+Writer) and web
//! modified (+jetty.Handler, -jetty.Server). APP-1 touches Scheduler,
//! APP-2 Reader and Writer, APP-3 Writer; so APP-1 forms a simple decision
//! and APP-2/APP-3 with the io/stream changes a crosscutting one. The web
//! change is third-party only, leaving coverage 3/4 before cleanup and 3/3
//! after.

use std::path::PathBuf;

use decision_miner::decisions::{Coverage, DecisionKind};
use decision_miner::pipeline::{run_pipeline, PipelineConfig};
use decision_miner::report::{emit_distribution, summarize, RunReport};
use num_rational::Ratio;

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/mini")
}

fn run_fixture() -> RunReport {
    let config = PipelineConfig::load(&fixture_dir().join("pipeline.toml")).unwrap();
    run_pipeline(&config).unwrap()
}

#[test]
fn matching_and_changes() {
    let run = run_fixture();
    assert!(run.failures.is_empty(), "{:?}", run.failures);
    assert_eq!(run.pairs.len(), 1);
    let pair = &run.pairs[0];

    let matching: Vec<_> = pair
        .matching
        .iter()
        .map(|e| (e.component_a.as_str(), e.component_b.as_str(), e.cost))
        .collect();
    assert_eq!(matching, [("core", "core", 1), ("io", "stream", 2), ("web", "web", 2)]);

    assert_eq!(pair.detected_change_count, 4);
    let ids: Vec<_> = pair.changes.iter().map(|c| c.id.as_str()).collect();
    assert_eq!(ids, ["added:stream", "modified:core>core", "removed:io"]);
    assert_eq!(pair.excluded_changes, ["modified:web>web"]);
}

#[test]
fn decision_ledger() {
    let run = run_fixture();
    let pair = &run.pairs[0];
    assert_eq!(pair.decisions.len(), 2);

    let simple = &pair.decisions[0];
    assert_eq!(simple.kind, DecisionKind::Simple);
    assert_eq!(simple.issues.iter().collect::<Vec<_>>(), ["APP-1"]);
    assert_eq!(simple.changes.iter().collect::<Vec<_>>(), ["modified:core>core"]);

    let crosscutting = &pair.decisions[1];
    assert_eq!(crosscutting.kind, DecisionKind::Crosscutting);
    assert_eq!(crosscutting.issues.iter().collect::<Vec<_>>(), ["APP-2", "APP-3"]);
    assert_eq!(
        crosscutting.changes.iter().collect::<Vec<_>>(),
        ["added:stream", "removed:io"]
    );
    assert!(pair.decisions.iter().all(|d| d.tractable));

    assert_eq!(pair.coverage_before_cleanup, Coverage { covered: 3, total: 4 });
    assert_eq!(pair.coverage_after_cleanup, Coverage { covered: 3, total: 3 });
    assert_eq!(pair.diagnostics.impact.skipped_paths, 1);
    assert_eq!(
        pair.diagnostics.entity_overlap.shared,
        pair.diagnostics.entity_overlap.mapped
    );
}

#[test]
fn summary_and_distribution() {
    let run = run_fixture();
    let summary = summarize(&run);
    let overall = &summary.overall;
    assert_eq!(overall.issues_in_decisions, 3);
    assert_eq!(overall.change_count, 4);
    assert_eq!(overall.decision_count, 2);
    assert_eq!(overall.avg_issues_per_decision(), Ratio::new(3, 2));
    assert_eq!(overall.avg_changes_per_decision(), Ratio::new(3, 2));
    assert_eq!(
        overall.avg_issues_per_decision() * overall.decision_count,
        Ratio::from_integer(overall.issues_in_decisions)
    );

    let dist = emit_distribution(
        run.pairs
            .iter()
            .map(|p| (p.version_pair.to_string(), p.decisions.as_slice())),
    );
    assert_eq!(
        dist.aggregate.counts.proportions(),
        [Ratio::new(1, 2), Ratio::from_integer(0), Ratio::new(1, 2)]
    );
}

#[test]
fn structured_output_round_trips_and_is_deterministic() {
    let first = run_fixture();
    let text = first.to_json();
    assert_eq!(RunReport::from_json(&text).unwrap(), first);
    assert_eq!(run_fixture().to_json(), text);
}

#[test]
fn without_exclusions_nothing_is_cleaned() {
    let mut config = PipelineConfig::load(&fixture_dir().join("pipeline.toml")).unwrap();
    config.exclusions = None;
    let run = run_pipeline(&config).unwrap();
    let pair = &run.pairs[0];
    assert_eq!(pair.coverage_before_cleanup, pair.coverage_after_cleanup);
    assert_eq!(pair.changes.len(), 4);
}

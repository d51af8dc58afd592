use std::fmt::Write as _;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{PairReport, RunReport};
use crate::decisions::{Coverage, Decision, DecisionKind};

pub const COUNTING_CONVENTION: &str =
    "issues are counted once per version pair (distinct ids); run totals sum over pairs";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindCounts {
    pub simple: u64,
    pub compound: u64,
    pub crosscutting: u64,
}

impl KindCounts {
    pub fn of(decisions: &[Decision]) -> Self {
        let mut counts = Self::default();
        for d in decisions {
            counts.add(d.kind, 1);
        }
        counts
    }

    fn add(&mut self, kind: DecisionKind, n: u64) {
        match kind {
            DecisionKind::Simple => self.simple += n,
            DecisionKind::Compound => self.compound += n,
            DecisionKind::Crosscutting => self.crosscutting += n,
        }
    }

    pub fn get(&self, kind: DecisionKind) -> u64 {
        match kind {
            DecisionKind::Simple => self.simple,
            DecisionKind::Compound => self.compound,
            DecisionKind::Crosscutting => self.crosscutting,
        }
    }

    pub fn total(&self) -> u64 {
        self.simple + self.compound + self.crosscutting
    }

    fn merge(&mut self, other: &KindCounts) {
        for kind in DecisionKind::ALL {
            self.add(kind, other.get(kind));
        }
    }

    /// Proportions in simple/compound/crosscutting order; all zero when empty.
    pub fn proportions(&self) -> [Ratio<u64>; 3] {
        let total = self.total();
        DecisionKind::ALL.map(|kind| {
            if total == 0 {
                Ratio::from_integer(0)
            } else {
                Ratio::new(self.get(kind), total)
            }
        })
    }
}

/// Table-style statistics for one version pair or a whole run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub label: String,
    pub issues_in_decisions: u64,
    /// Changes detected before cleanup.
    pub change_count: u64,
    pub decision_count: u64,
    /// Sum of |changes| over decisions.
    pub changes_in_decisions: u64,
    pub kind_distribution: KindCounts,
    pub coverage_before_cleanup: Coverage,
    pub coverage_after_cleanup: Coverage,
}

impl SummaryRow {
    fn empty(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            issues_in_decisions: 0,
            change_count: 0,
            decision_count: 0,
            changes_in_decisions: 0,
            kind_distribution: KindCounts::default(),
            coverage_before_cleanup: Coverage { covered: 0, total: 0 },
            coverage_after_cleanup: Coverage { covered: 0, total: 0 },
        }
    }

    fn of_pair(pair: &PairReport) -> Self {
        Self {
            label: pair.version_pair.to_string(),
            issues_in_decisions: pair.decisions.iter().map(|d| d.issues.len() as u64).sum(),
            change_count: pair.detected_change_count as u64,
            decision_count: pair.decisions.len() as u64,
            changes_in_decisions: pair.decisions.iter().map(|d| d.changes.len() as u64).sum(),
            kind_distribution: KindCounts::of(&pair.decisions),
            coverage_before_cleanup: pair.coverage_before_cleanup,
            coverage_after_cleanup: pair.coverage_after_cleanup,
        }
    }

    fn absorb(&mut self, other: &SummaryRow) {
        self.issues_in_decisions += other.issues_in_decisions;
        self.change_count += other.change_count;
        self.decision_count += other.decision_count;
        self.changes_in_decisions += other.changes_in_decisions;
        self.kind_distribution.merge(&other.kind_distribution);
        for (mine, theirs) in [
            (&mut self.coverage_before_cleanup, &other.coverage_before_cleanup),
            (&mut self.coverage_after_cleanup, &other.coverage_after_cleanup),
        ] {
            mine.covered += theirs.covered;
            mine.total += theirs.total;
        }
    }

    fn average(total: u64, count: u64) -> Ratio<u64> {
        if count == 0 {
            Ratio::from_integer(0)
        } else {
            Ratio::new(total, count)
        }
    }

    /// Exact; zero when there are no decisions.
    pub fn avg_issues_per_decision(&self) -> Ratio<u64> {
        Self::average(self.issues_in_decisions, self.decision_count)
    }

    pub fn avg_changes_per_decision(&self) -> Ratio<u64> {
        Self::average(self.changes_in_decisions, self.decision_count)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSummary {
    pub pairs: Vec<SummaryRow>,
    pub overall: SummaryRow,
}

pub fn summarize(report: &RunReport) -> RunSummary {
    let pairs: Vec<SummaryRow> = report.pairs.iter().map(SummaryRow::of_pair).collect();
    let mut overall = SummaryRow::empty("overall");
    for row in &pairs {
        overall.absorb(row);
    }
    RunSummary { pairs, overall }
}

/// Two-decimal rendering of an exact ratio.
pub fn format_ratio(value: Ratio<u64>) -> String {
    let scaled = (value * 100u64).round().to_integer();
    format!("{}.{:02}", scaled / 100, scaled % 100)
}

fn format_coverage(c: &Coverage) -> String {
    if c.total == 0 {
        return "1.00".to_string();
    }
    format_ratio(Ratio::new(c.covered as u64, c.total as u64))
}

pub fn render_summary(summary: &RunSummary) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {COUNTING_CONVENTION}");
    let _ = writeln!(
        out,
        "{:<28} {:>8} {:>8} {:>9} {:>10} {:>11} {:>7} {:>9} {:>13} {:>9} {:>8}",
        "pair",
        "issues",
        "changes",
        "decisions",
        "avg_iss/d",
        "avg_chg/d",
        "simple",
        "compound",
        "crosscutting",
        "cov_before",
        "cov_after"
    );
    for row in summary.pairs.iter().chain(std::iter::once(&summary.overall)) {
        let _ = writeln!(
            out,
            "{:<28} {:>8} {:>8} {:>9} {:>10} {:>11} {:>7} {:>9} {:>13} {:>9} {:>8}",
            row.label,
            row.issues_in_decisions,
            row.change_count,
            row.decision_count,
            format_ratio(row.avg_issues_per_decision()),
            format_ratio(row.avg_changes_per_decision()),
            row.kind_distribution.simple,
            row.kind_distribution.compound,
            row.kind_distribution.crosscutting,
            format_coverage(&row.coverage_before_cleanup),
            format_coverage(&row.coverage_after_cleanup),
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionRow {
    pub label: String,
    pub counts: KindCounts,
}

/// Per-kind decision counts per version pair plus an aggregate row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Distribution {
    pub pairs: Vec<DistributionRow>,
    pub aggregate: DistributionRow,
}

pub fn emit_distribution<'a>(groups: impl IntoIterator<Item = (String, &'a [Decision])>) -> Distribution {
    let pairs: Vec<DistributionRow> = groups
        .into_iter()
        .map(|(label, decisions)| DistributionRow {
            label,
            counts: KindCounts::of(decisions),
        })
        .collect();
    let mut total = KindCounts::default();
    for row in &pairs {
        total.merge(&row.counts);
    }
    Distribution {
        pairs,
        aggregate: DistributionRow {
            label: "aggregate".into(),
            counts: total,
        },
    }
}

fn decimal(value: Ratio<u64>) -> String {
    let scaled = (value * 10_000u64).round().to_integer();
    format!("{}.{:04}", scaled / 10_000, scaled % 10_000)
}

/// Tab-separated table, one row per pair and a final aggregate row.
pub fn render_distribution(distribution: &Distribution) -> String {
    let mut out = String::from("pair\tsimple\tcompound\tcrosscutting\ttotal\tp_simple\tp_compound\tp_crosscutting\n");
    for row in distribution
        .pairs
        .iter()
        .chain(std::iter::once(&distribution.aggregate))
    {
        let c = &row.counts;
        let [ps, pc, px] = c.proportions();
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            row.label,
            c.simple,
            c.compound,
            c.crosscutting,
            c.total(),
            decimal(ps),
            decimal(pc),
            decimal(px)
        );
    }
    out
}

pub fn render_coverage(summary: &RunSummary) -> String {
    let mut out = String::from(
        "pair\tcovered_before\ttotal_before\tcoverage_before\tcovered_after\ttotal_after\tcoverage_after\n",
    );
    for row in summary.pairs.iter().chain(std::iter::once(&summary.overall)) {
        let (b, a) = (&row.coverage_before_cleanup, &row.coverage_after_cleanup);
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            row.label,
            b.covered,
            b.total,
            format_coverage(b),
            a.covered,
            a.total,
            format_coverage(a)
        );
    }
    out
}

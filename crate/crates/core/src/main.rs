use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use decision_miner::changes::analyze;
use decision_miner::decisions::{
    build_decision_graph, change_coverage, find_decisions, mark_tractability, DEFAULT_TRACTABILITY_THRESHOLD,
};
use decision_miner::error::{Error, Result};
use decision_miner::ingestion::{
    build_impact_list, convert_name_status_log, load_commits, load_issues, select_issues, to_json_lines, ExclusionList,
    LinkOptions, PathRules,
};
use decision_miner::model::{parse_snapshot, DeltaKind, VersionPair};
use decision_miner::pipeline::{run_pipeline, PipelineConfig};
use decision_miner::report::{
    self, emit_distribution, render_coverage, render_decision, render_decisions_text, render_distribution,
    render_summary, summarize, ChangeSetDocument, DecisionFormat, DecisionSetDocument, FailureKind, ImpactDocument,
    RunReport, SCHEMA_VERSION,
};

#[derive(Parser)]
#[command(
    name = "decision-miner",
    version,
    about = "Uncover architectural design decisions from version history"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Match two recovered architectures and list the architectural changes.
    AnalyzeChanges {
        #[arg(long)]
        arch_a: PathBuf,
        #[arg(long)]
        arch_b: PathBuf,
        /// Version label of `--arch-a` (defaults to the file stem).
        #[arg(long)]
        version_a: Option<String>,
        #[arg(long)]
        version_b: Option<String>,
        #[arg(long, value_enum, default_value_t = DecisionFormat::Text)]
        format: DecisionFormat,
    },
    /// Build the architectural impact list of one version.
    BuildImpact {
        #[arg(long)]
        issues: PathBuf,
        #[arg(long)]
        commits: PathBuf,
        /// Version the issues must belong to.
        #[arg(long)]
        version: String,
        /// Previous version, recorded in the output.
        #[arg(long, default_value = "")]
        from_version: String,
        #[arg(long)]
        rules: Option<PathBuf>,
        #[arg(long)]
        exclusions: Option<PathBuf>,
        /// Also link commits whose messages mention the issue key.
        #[arg(long)]
        link_by_message_keys: bool,
    },
    /// Link changes and impact list into decisions.
    ExtractDecisions {
        #[arg(long)]
        changes: PathBuf,
        #[arg(long)]
        impact: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TRACTABILITY_THRESHOLD as u64, value_parser = clap::value_parser!(u64).range(1..))]
        tractability_threshold: u64,
        #[arg(long, value_enum, default_value_t = DecisionFormat::Structured)]
        format: DecisionFormat,
    },
    /// Run the whole pipeline over a version history.
    Pipeline {
        #[arg(long)]
        config: PathBuf,
        /// Exit non-zero when any version pair fails.
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Convert `git log --name-status` output to the commit-log format.
    ConvertLog {
        /// Raw log file; standard input when absent.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Render tables from a pipeline report.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out", value_enum)]
        kind: ReportKind,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportKind {
    Summary,
    Distribution,
    Coverage,
    Decisions,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn print(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Error::io("<stdout>", e))
}

fn analyze_changes(
    arch_a: &Path,
    arch_b: &Path,
    version_a: Option<String>,
    version_b: Option<String>,
    format: DecisionFormat,
) -> Result<()> {
    let a = parse_snapshot(&read(arch_a)?, &version_a.unwrap_or_else(|| stem(arch_a)))?;
    let b = parse_snapshot(&read(arch_b)?, &version_b.unwrap_or_else(|| stem(arch_b)))?;
    let analysis = analyze(&a, &b);
    match format {
        DecisionFormat::Structured => print(&report::to_json(&ChangeSetDocument {
            schema_version: SCHEMA_VERSION,
            version_pair: analysis.version_pair,
            matching: analysis.matching,
            changes: analysis.changes,
        })),
        DecisionFormat::Text => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "{}: {} change(s), matching cost {}",
                analysis.version_pair,
                analysis.changes.len(),
                analysis.matching_cost()
            );
            for change in &analysis.changes {
                let _ = writeln!(out, "{} [{}]", change.id, change.kind.verb());
                for delta in &change.deltas {
                    let sign = if delta.kind == DeltaKind::AddEntity { '+' } else { '-' };
                    let _ = writeln!(out, "  {sign} {}", delta.entity);
                }
            }
            print(&out)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn build_impact(
    issues: &Path,
    commits: &Path,
    version: String,
    from_version: String,
    rules: Option<PathBuf>,
    exclusions: Option<PathBuf>,
    link_by_message_keys: bool,
) -> Result<()> {
    let issues = load_issues(&read(issues)?)?;
    let commits = load_commits(&read(commits)?)?;
    let rules = match rules {
        Some(path) => PathRules::from_toml(&read(&path)?)?,
        None => PathRules::java_default(),
    };
    let exclusions = match exclusions {
        Some(path) => ExclusionList::parse(&read(&path)?),
        None => ExclusionList::default(),
    };
    let selected = select_issues(&issues, &version);
    let build = build_impact_list(
        &selected,
        &commits,
        &rules,
        &exclusions,
        &VersionPair::new(from_version, version),
        &LinkOptions { link_by_message_keys },
    );
    let doc = ImpactDocument {
        schema_version: SCHEMA_VERSION,
        issues: selected.iter().map(|i| (i.id.clone(), i.summary.clone())).collect(),
        impact: build.impact,
        diagnostics: build.diagnostics,
    };
    print(&report::to_json(&doc))
}

fn extract_decisions(changes: &Path, impact: &Path, threshold: usize, format: DecisionFormat) -> Result<()> {
    let change_set: ChangeSetDocument = report::from_json(&read(changes)?, "change set")?;
    let impact: ImpactDocument = report::from_json(&read(impact)?, "impact list")?;
    let (cp, ip) = (&change_set.version_pair, &impact.impact.version_pair);
    if cp.to != ip.to || (!ip.from.is_empty() && cp.from != ip.from) {
        return Err(Error::Config(format!(
            "change set is for {cp} but impact list is for {ip}"
        )));
    }
    let mut impact_list = impact.impact.clone();
    impact_list.version_pair = change_set.version_pair.clone();
    let decisions: Vec<_> = find_decisions(&build_decision_graph(&impact_list, &change_set.changes))
        .into_iter()
        .map(|d| mark_tractability(d, threshold))
        .collect();
    match format {
        DecisionFormat::Structured => print(&report::to_json(&DecisionSetDocument {
            schema_version: SCHEMA_VERSION,
            version_pair: change_set.version_pair.clone(),
            tractability_threshold: threshold,
            coverage: change_coverage(&change_set.changes, &decisions),
            decisions,
        })),
        DecisionFormat::Text => {
            let cards: Vec<String> = decisions
                .iter()
                .map(|d| render_decision(d, &impact.issues, &change_set.changes, DecisionFormat::Text))
                .collect();
            print(&cards.join("\n"))
        }
    }
}

fn pipeline(config_path: &Path, strict: bool, workers: Option<usize>) -> Result<ExitCode> {
    let mut config = PipelineConfig::load(config_path)?;
    if workers.is_some() {
        config.workers = workers;
    }
    let run = run_pipeline(&config)?;
    for failure in &run.failures {
        eprintln!("error: {}: {}", failure.version_pair, failure.message);
    }
    match &config.output {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            write(&dir.join("report.json"), &run.to_json())?;
            let cards: Vec<String> = run
                .pairs
                .iter()
                .map(|p| render_decisions_text(&p.decisions, &p.issues, &p.changes))
                .filter(|s| !s.is_empty())
                .collect();
            write(&dir.join("decisions.txt"), &cards.join("\n"))?;
            print(&render_summary(&summarize(&run)))?;
        }
        None => print(&run.to_json())?,
    }
    if strict && !run.failures.is_empty() {
        let invariant = run.failures.iter().any(|f| f.kind == FailureKind::Invariant);
        return Ok(ExitCode::from(if invariant { 2 } else { 1 }));
    }
    Ok(ExitCode::SUCCESS)
}

fn convert_log(input: Option<PathBuf>, output: Option<PathBuf>) -> Result<()> {
    let text = match input {
        Some(path) => read(&path)?,
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Error::io("<stdin>", e))?;
            buf
        }
    };
    let lines = to_json_lines(&convert_name_status_log(&text)?);
    match output {
        Some(path) => write(&path, &lines),
        None => print(&lines),
    }
}

fn render_report(input: &Path, kind: ReportKind) -> Result<()> {
    let run = RunReport::from_json(&read(input)?)?;
    let text = match kind {
        ReportKind::Summary => render_summary(&summarize(&run)),
        ReportKind::Coverage => render_coverage(&summarize(&run)),
        ReportKind::Distribution => render_distribution(&emit_distribution(
            run.pairs
                .iter()
                .map(|p| (p.version_pair.to_string(), p.decisions.as_slice())),
        )),
        ReportKind::Decisions => run
            .pairs
            .iter()
            .map(|p| render_decisions_text(&p.decisions, &p.issues, &p.changes))
            .filter(|s| !s.is_empty())
            .collect::<Vec<_>>()
            .join("\n"),
    };
    print(&text)
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::AnalyzeChanges {
            arch_a,
            arch_b,
            version_a,
            version_b,
            format,
        } => analyze_changes(&arch_a, &arch_b, version_a, version_b, format)?,
        Command::BuildImpact {
            issues,
            commits,
            version,
            from_version,
            rules,
            exclusions,
            link_by_message_keys,
        } => build_impact(
            &issues,
            &commits,
            version,
            from_version,
            rules,
            exclusions,
            link_by_message_keys,
        )?,
        Command::ExtractDecisions {
            changes,
            impact,
            tractability_threshold,
            format,
        } => extract_decisions(&changes, &impact, tractability_threshold as usize, format)?,
        Command::Pipeline {
            config,
            strict,
            workers,
        } => return pipeline(&config, strict, workers),
        Command::ConvertLog { input, output } => convert_log(input, output)?,
        Command::Report { input, kind } => render_report(&input, kind)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

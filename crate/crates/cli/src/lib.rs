//! Configuration-driven experiment runner.
//!
//! A run reads a `key = value` configuration (see [`config`]), builds the
//! graph, validates every task parameter, executes, and writes one output
//! file atomically. The same configuration and seed always produce the same
//! bytes.

pub mod config;
pub mod error;
pub mod record;
pub mod spec;
pub mod sweep;
pub mod tasks;

use std::io::Write;
use std::path::{Path, PathBuf};

pub use error::{CliError, CliResult, ErrorKind};
pub use spec::{ExperimentSpec, Format, Overrides};

use perclab::graph::write_edge_list;
use serde_json::json;

use record::{record_csv, Record};
use spec::Params;
use tasks::{group_of, Group, Task};

/// What to run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    BuildGraph,
    Walk,
    Spectral,
    Perc,
    Verify(String),
    Sweep,
}

/// Output text together with the one-line summary of a run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub content: String,
    pub summary: String,
}

pub fn load_spec(config_path: &Path, overrides: &Overrides) -> CliResult<ExperimentSpec> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| CliError::parse(format!("cannot read config {}: {e}", config_path.display())))?;
    ExperimentSpec::from_config(&config::parse_config(&text)?, overrides)
}

fn task_name(spec: &ExperimentSpec) -> CliResult<&str> {
    spec.task.as_deref().ok_or_else(|| CliError::parse("missing `task.name`"))
}

fn render(format: Format, record: &Record, table: impl FnOnce() -> String) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(record).expect("records serialize") + "\n",
        Format::Csv => table(),
    }
}

/// Compute the output of `command` without writing it anywhere.
pub fn execute(command: &Command, spec: &ExperimentSpec) -> CliResult<RunOutput> {
    let g = spec.graph.build()?;
    match command {
        Command::BuildGraph => {
            let mut rec = Record::new("build_graph", &g, spec.sampling.master_seed);
            rec.detail = json!({
                "vertex_count": g.vertex_count(),
                "edge_count": g.edge_count(),
                "max_degree": g.max_degree(),
                "min_degree": g.min_degree(),
                "interior_radius": g.interior_radius(0),
            });
            let summary = format!("built {} with {} vertices and {} edges", g.family().tag(), g.vertex_count(), g.edge_count());
            let content = render(spec.output.format, &rec, || write_edge_list(&g));
            Ok(RunOutput { content, summary })
        }
        Command::Sweep => sweep::run_sweep(spec, &g),
        _ => {
            let name = match command {
                Command::Verify(check) => {
                    if let Some(t) = &spec.task {
                        if t != check {
                            return Err(CliError::parse(format!("config names task `{t}` but `verify {check}` was requested")));
                        }
                    }
                    check.as_str()
                }
                _ => task_name(spec)?,
            };
            let group = group_of(name).ok_or_else(|| CliError::parse(format!("unknown task `{name}`")))?;
            let wanted = match command {
                Command::Walk => Group::Walk,
                Command::Spectral => Group::Spectral,
                Command::Perc => Group::Perc,
                _ => Group::Verify,
            };
            if group != wanted {
                return Err(CliError::parse(format!(
                    "task `{name}` belongs to `{}`, not `{}`",
                    group.as_str(),
                    wanted.as_str()
                )));
            }
            let mut params = Params::new("task", spec.params.clone());
            let task = Task::parse(name, &mut params, &g)?;
            let outcome = tasks::run(name, &task, &g, &spec.sampling)?;
            let summary = outcome.record.summary();
            let content = render(spec.output.format, &outcome.record, || outcome.csv());
            Ok(RunOutput { content, summary })
        }
    }
}

/// Write `content` to `path` through a temporary file in the same
/// directory, so a failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, content: &str) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)
        .map_err(|e| CliError::runtime(format!("cannot create a temporary file in {}: {e}", dir.display())))?;
    tmp.write_all(content.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| CliError::runtime(format!("cannot write {}: {}", path.display(), e.error)))?;
    Ok(())
}

/// Summary of a finished run and where its output went.
#[derive(Debug, Clone)]
pub struct Finished {
    pub summary: String,
    /// `None` when the output went to standard output.
    pub path: Option<PathBuf>,
}

/// Load, execute and write.
pub fn run(command: &Command, config_path: &Path, overrides: &Overrides) -> CliResult<Finished> {
    let spec = load_spec(config_path, overrides)?;
    let out = execute(command, &spec)?;
    match &spec.output.path {
        Some(path) => {
            write_atomic(path, &out.content)?;
            Ok(Finished { summary: format!("{} -> {}", out.summary, path.display()), path: Some(path.clone()) })
        }
        None => {
            std::io::stdout().write_all(out.content.as_bytes())?;
            Ok(Finished { summary: out.summary, path: None })
        }
    }
}

/// Records as the generic CSV table.
pub fn records_csv(records: &[Record]) -> String {
    record_csv(records)
}

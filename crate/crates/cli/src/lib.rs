//! The `tasktrace` command line. [`run`] parses arguments, executes one
//! subcommand, writes its output, and returns the process exit code:
//! 0 on success, 1 when input data fails parsing or validation, 2 on usage
//! errors (bad flags, unreadable paths).

mod input;
mod render;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use tasktrace::dataset::{dataset_stats, screen_dataset, ScreeningRule};
use tasktrace::model::{
    build_markov, detect_loops, diff_complete, suggest_edits, suggest_next, Abstraction,
    LoopRegion, SuggestConfig,
};
use tasktrace::{
    validate_trace, Catalog, Dataset, RuleId, SchemaError, StatsSummary, Suggestion, TaskCategory,
    Trace,
};
use tasktrace_service::ServiceConfig;

pub use input::{read_hint, read_model, read_traces};

#[derive(Debug, Parser)]
#[command(name = "tasktrace", version, about = "Task trace pipeline: ingest, screen, stats, models, suggestions")]
pub struct Cli {
    /// Emit canonical JSON instead of human-readable tables
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate traces, writing them back in canonical form
    Ingest {
        /// JSON-lines traces or exported store records (`-` for stdin)
        #[arg(long)]
        input: PathBuf,
        /// Where to write canonical traces
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply validation and the worker rule, splitting approved from rejected
    Screen {
        #[arg(long)]
        input: PathBuf,
        /// Approved traces
        #[arg(long)]
        out: Option<PathBuf>,
        /// Rejected traces
        #[arg(long)]
        rejected: Option<PathBuf>,
        /// Rejected traces per worker that discard all of that worker's traces
        #[arg(long, default_value_t = ScreeningRule::default().worker_reject_threshold)]
        threshold: usize,
    },
    /// Summary statistics of a dataset
    Stats {
        #[arg(long)]
        input: PathBuf,
    },
    /// Build per-category Markov models
    BuildModel {
        #[arg(long)]
        input: PathBuf,
        /// Only build this category
        #[arg(long, value_parser = parse_category)]
        category: Option<TaskCategory>,
        #[command(flatten)]
        model: ModelArgs,
        /// Model document path; requires exactly one category
        #[arg(long, conflicts_with = "out_dir")]
        out: Option<PathBuf>,
        /// Directory receiving `<slug>.model.json` per category
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Suggest next steps (and, given traces, edits) for a hint
    Suggest {
        /// Model document written by build-model
        #[arg(long)]
        model: PathBuf,
        /// JSON array of steps
        #[arg(long)]
        hint: PathBuf,
        #[arg(long, default_value_t = SuggestConfig::default().k)]
        k: usize,
        /// Training traces; enables missing-step, loop, and branch suggestions
        #[arg(long)]
        traces: Option<PathBuf>,
    },
    /// Missing-step suggestions from the closest training trace
    Diff {
        #[arg(long)]
        hint: PathBuf,
        #[arg(long)]
        traces: PathBuf,
        /// Only compare against traces of this category
        #[arg(long, value_parser = parse_category)]
        category: Option<TaskCategory>,
    },
    /// Detect repeated step blocks
    Loops {
        /// Traces to scan
        #[arg(long, required_unless_present = "hint", conflicts_with = "hint")]
        input: Option<PathBuf>,
        /// A single step sequence to scan
        #[arg(long)]
        hint: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        min_reps: usize,
    },
    /// Run the HTTP service
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// `kind` or `kind+args`
    #[arg(long, default_value = "kind", value_parser = parse_abstraction)]
    pub abstraction: Abstraction,
    /// Additive smoothing pseudo-count
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub listen: SocketAddr,
    #[arg(long)]
    pub data_dir: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Default number of next-step suggestions
    #[arg(long, default_value_t = SuggestConfig::default().k)]
    pub k: usize,
    #[arg(long, default_value_t = ScreeningRule::default().worker_reject_threshold)]
    pub threshold: usize,
    /// Approved submissions between automatic rebuilds; 0 disables
    #[arg(long, default_value_t = 10)]
    pub rebuild_every: usize,
    /// Accept submissions without an acknowledged session
    #[arg(long)]
    pub no_gate: bool,
    /// Prompt catalog JSON (all categories)
    #[arg(long)]
    pub categories: Option<PathBuf>,
}

fn parse_category(s: &str) -> Result<TaskCategory, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_abstraction(s: &str) -> Result<Abstraction, String> {
    s.parse().map_err(|e| format!("{e}"))
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{}{}: {source}", path.display(), line.map(|l| format!(" line {l}")).unwrap_or_default())]
    Schema {
        path: PathBuf,
        line: Option<usize>,
        source: SchemaError,
    },
    #[error("{0}")]
    Data(String),
    #[error("{0} trace(s) failed validation")]
    Rejected(usize),
    #[error(transparent)]
    Service(#[from] tasktrace_service::ServiceError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Read { .. } => 2,
            _ => 1,
        }
    }
}

// ---- JSON output schemas ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceVerdict {
    pub id: String,
    pub worker_id: String,
    pub rules: Vec<RuleId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub traces: usize,
    pub approved: usize,
    pub rejected: Vec<TraceVerdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenedTrace {
    pub id: String,
    pub worker_id: String,
    pub rules: Vec<RuleId>,
    pub worker_discarded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenReport {
    pub approved: usize,
    pub rejected_traces: Vec<ScreenedTrace>,
    pub rejected_workers: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuiltModel {
    pub category: TaskCategory,
    pub trace_count: usize,
    pub states: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildReport {
    pub models: Vec<BuiltModel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuggestReport {
    pub category: TaskCategory,
    pub end_probability: Option<f64>,
    pub unknown_state: bool,
    pub suggestions: Vec<Suggestion>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffReport {
    pub suggestions: Vec<Suggestion>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceLoops {
    pub id: String,
    pub regions: Vec<LoopRegion>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopsReport {
    pub traces: Vec<TraceLoops>,
}

/// Parses `args` (program name first), runs the command, and returns the
/// exit code. Normal output goes to `stdout`, diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.exit_code() == 2 {
                let _ = writeln!(stderr, "usage: tasktrace [--json] <COMMAND> [OPTIONS]; see tasktrace --help");
            }
            e.exit_code()
        }
    }
}

fn emit<T: Serialize>(
    json: bool,
    value: &T,
    human: impl FnOnce(&T) -> String,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let text = if json {
        let mut s = serde_json::to_string(value).expect("report types serialize");
        s.push('\n');
        s
    } else {
        human(value)
    };
    stdout.write_all(text.as_bytes()).map_err(|source| CliError::Write {
        path: PathBuf::from("-"),
        source,
    })
}

fn dataset(traces: Vec<Trace>) -> Result<Dataset, CliError> {
    Dataset::new(traces).map_err(|e| CliError::Data(e.to_string()))
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let json = cli.json;
    match &cli.command {
        Command::Ingest { input, out } => {
            let traces = read_traces(input)?;
            let dataset = dataset(traces)?;
            let mut report = IngestReport {
                traces: dataset.len(),
                approved: 0,
                rejected: Vec::new(),
            };
            for t in dataset.traces() {
                let r = validate_trace(t);
                if r.is_approved() {
                    report.approved += 1;
                } else {
                    report.rejected.push(TraceVerdict {
                        id: t.id.clone(),
                        worker_id: t.worker_id.clone(),
                        rules: r.rules(),
                    });
                }
            }
            if let Some(out) = out {
                input::write_text(out, &input::jsonl(dataset.traces()), stdout)?;
            }
            emit(json, &report, render::ingest, stdout)?;
            match report.rejected.len() {
                0 => Ok(()),
                n => Err(CliError::Rejected(n)),
            }
        }

        Command::Screen {
            input,
            out,
            rejected,
            threshold,
        } => {
            let dataset = dataset(read_traces(input)?)?;
            let rule = ScreeningRule {
                worker_reject_threshold: *threshold,
            };
            let result = screen_dataset(&dataset, rule);
            if let Some(out) = out {
                input::write_text(out, &input::jsonl(&result.approved), stdout)?;
            }
            if let Some(path) = rejected {
                let traces: Vec<Trace> = result.rejected_traces.iter().map(|r| r.trace.clone()).collect();
                input::write_text(path, &input::jsonl(&traces), stdout)?;
            }
            let report = ScreenReport {
                approved: result.approved.len(),
                rejected_traces: result
                    .rejected_traces
                    .iter()
                    .map(|r| ScreenedTrace {
                        id: r.trace.id.clone(),
                        worker_id: r.trace.worker_id.clone(),
                        rules: r.report.rules(),
                        worker_discarded: r.worker_discarded,
                    })
                    .collect(),
                rejected_workers: result.rejected_workers,
            };
            emit(json, &report, render::screen, stdout)
        }

        Command::Stats { input } => {
            let stats: StatsSummary = dataset_stats(&dataset(read_traces(input)?)?);
            emit(json, &stats, render::stats, stdout)
        }

        Command::BuildModel {
            input,
            category,
            model,
            out,
            out_dir,
        } => {
            let mut groups: BTreeMap<TaskCategory, Vec<Trace>> = BTreeMap::new();
            for t in dataset(read_traces(input)?)?.into_traces() {
                if category.is_none_or(|c| c == t.category) {
                    groups.entry(t.category).or_default().push(t);
                }
            }
            if groups.is_empty() {
                return Err(CliError::Data("no traces for the requested category".into()));
            }
            if out_dir.is_none() && groups.len() > 1 {
                return Err(CliError::Usage(
                    "input spans several categories; pass --category or --out-dir".into(),
                ));
            }
            let mut report = BuildReport { models: Vec::new() };
            let mut documents = Vec::new();
            for (cat, traces) in &groups {
                let m = build_markov(traces, model.abstraction, model.alpha)
                    .map_err(|e| CliError::Data(e.to_string()))?;
                let path = match (out, out_dir) {
                    (Some(p), _) => Some(p.clone()),
                    (None, Some(dir)) => Some(dir.join(format!("{}.model.json", cat.slug()))),
                    (None, None) => None,
                };
                report.models.push(BuiltModel {
                    category: *cat,
                    trace_count: m.trace_count(),
                    states: m.states().len(),
                    path: path.clone(),
                });
                documents.push((path, m.to_json()));
            }
            for (path, doc) in &documents {
                match path {
                    Some(p) => input::write_text(p, &format!("{doc}\n"), stdout)?,
                    None => {
                        // no destination: the document itself is the output
                        return input::write_text(Path::new("-"), &format!("{doc}\n"), stdout);
                    }
                }
            }
            emit(json, &report, render::build, stdout)
        }

        Command::Suggest {
            model,
            hint,
            k,
            traces,
        } => {
            let model = read_model(model)?;
            let hint = read_hint(hint)?;
            let next = suggest_next(&model, &hint, *k);
            let suggestions = match traces {
                None => next.suggestions,
                Some(path) => {
                    let traces: Vec<Trace> = read_traces(path)?
                        .into_iter()
                        .filter(|t| t.category == model.category())
                        .collect();
                    let config = SuggestConfig {
                        k: *k,
                        ..SuggestConfig::default()
                    };
                    suggest_edits(&model, &traces, &hint, &config)
                }
            };
            let report = SuggestReport {
                category: model.category(),
                end_probability: next.end_probability,
                unknown_state: next.unknown_state,
                suggestions,
            };
            emit(json, &report, render::suggest, stdout)
        }

        Command::Diff {
            hint,
            traces,
            category,
        } => {
            let hint = read_hint(hint)?;
            let traces: Vec<Trace> = read_traces(traces)?
                .into_iter()
                .filter(|t| category.is_none_or(|c| c == t.category))
                .collect();
            let report = DiffReport {
                suggestions: diff_complete(&hint, &traces, &SuggestConfig::default().costs),
            };
            emit(json, &report, render::diff, stdout)
        }

        Command::Loops {
            input,
            hint,
            min_reps,
        } => {
            let sequences: Vec<(String, Vec<tasktrace::StepInstance>)> = match (input, hint) {
                (Some(path), _) => read_traces(path)?.into_iter().map(|t| (t.id, t.steps)).collect(),
                (None, Some(path)) => vec![("hint".to_owned(), read_hint(path)?)],
                (None, None) => return Err(CliError::Usage("pass --input or --hint".into())),
            };
            let report = LoopsReport {
                traces: sequences
                    .into_iter()
                    .map(|(id, steps)| TraceLoops {
                        regions: detect_loops(&steps, *min_reps),
                        id,
                    })
                    .collect(),
            };
            emit(json, &report, render::loops, stdout)
        }

        Command::Serve(args) => serve(args),
    }
}

fn serve(args: &ServeArgs) -> Result<(), CliError> {
    let mut config = ServiceConfig::new(&args.data_dir);
    config.listen = args.listen;
    config.abstraction = args.model.abstraction;
    config.alpha = args.model.alpha;
    config.screening = ScreeningRule {
        worker_reject_threshold: args.threshold,
    };
    config.suggest.k = args.k;
    config.rebuild_every = args.rebuild_every;
    config.require_acknowledgment = !args.no_gate;
    if let Some(path) = &args.categories {
        config.catalog = Catalog::from_json(&input::read_text(path)?)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    }
    if !config.data_dir.is_dir() {
        return Err(CliError::Usage(format!(
            "data directory {} does not exist",
            config.data_dir.display()
        )));
    }
    let _ = tracing_subscriber::fmt().with_writer(std::io::stderr).try_init();
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Data(e.to_string()))?;
    runtime.block_on(tasktrace_service::serve(config))?;
    Ok(())
}

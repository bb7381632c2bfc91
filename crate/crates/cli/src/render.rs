//! Human-readable renderings of the command reports.

use std::fmt::Write;

use tasktrace::dataset::Summary;
use tasktrace::model::{Payload, State};
use tasktrace::{StatsSummary, StepInstance, Suggestion};

use crate::{BuildReport, DiffReport, IngestReport, LoopsReport, ScreenReport, SuggestReport};

fn rules(rules: &[tasktrace::RuleId]) -> String {
    rules.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",")
}

fn opt_f64(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "-".to_owned(), |x| format!("{x:.digits$}"))
}

fn opt_usize(v: Option<usize>) -> String {
    v.map_or_else(|| "-".to_owned(), |x| x.to_string())
}

fn summary(s: &Summary) -> String {
    format!(
        "mean {}  min {}  max {}",
        opt_f64(s.mean, 2),
        opt_usize(s.min),
        opt_usize(s.max)
    )
}

pub fn step(s: &StepInstance) -> String {
    format!("{}({})", s.kind, s.canonical_args().join(", "))
}

pub fn ingest(r: &IngestReport) -> String {
    let mut out = format!(
        "traces     {}\napproved   {}\nrejected   {}\n",
        r.traces,
        r.approved,
        r.rejected.len()
    );
    for v in &r.rejected {
        let _ = writeln!(out, "  {:<16} {:<10} {}", v.id, v.worker_id, rules(&v.rules));
    }
    out
}

pub fn screen(r: &ScreenReport) -> String {
    let mut out = format!(
        "approved           {}\nrejected traces    {}\nrejected workers   {}\n",
        r.approved,
        r.rejected_traces.len(),
        r.rejected_workers.len()
    );
    for t in &r.rejected_traces {
        let why = if t.worker_discarded && t.rules.is_empty() {
            "worker discarded".to_owned()
        } else if t.worker_discarded {
            format!("{} (worker discarded)", rules(&t.rules))
        } else {
            rules(&t.rules)
        };
        let _ = writeln!(out, "  {:<16} {:<10} {}", t.id, t.worker_id, why);
    }
    out
}

pub fn stats(s: &StatsSummary) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "traces              {}", s.total_traces);
    let _ = writeln!(out, "workers             {}", s.total_workers);
    let _ = writeln!(out, "steps               {}", s.total_steps);
    let _ = writeln!(out, "steps per trace     {}", summary(&s.steps_per_trace));
    let _ = writeln!(out, "descriptions        {}", s.total_descriptions);
    let _ = writeln!(out, "description rate    {}", opt_f64(s.description_rate, 3));
    let _ = writeln!(out, "wait usage          {}", opt_f64(s.wait_usage, 3));
    let _ = writeln!(out, "traces per category {}", summary(&s.traces_per_category.summary));
    for (cat, n) in &s.traces_per_category.counts {
        let _ = writeln!(out, "  {:<18}{n}", cat.slug());
    }
    out
}

pub fn build(r: &BuildReport) -> String {
    let mut out = String::new();
    for m in &r.models {
        let _ = write!(
            out,
            "{:<20} traces {:<4} states {:<4}",
            m.category.slug(),
            m.trace_count,
            m.states
        );
        if let Some(p) = &m.path {
            let _ = write!(out, " -> {}", p.display());
        }
        out.push('\n');
    }
    out
}

fn suggestion_line(s: &Suggestion) -> String {
    let what = match &s.payload {
        Payload::Step { step: st, position } => format!("{} at {position}", step(st)),
        Payload::Loop {
            start,
            period,
            repetitions,
            body,
        } => {
            let kinds: Vec<&str> = body.iter().map(|k| k.as_str()).collect();
            format!("[{}] x{repetitions} from {start} (period {period})", kinds.join(", "))
        }
        Payload::Branch {
            state,
            alternatives,
        } => {
            let alts: Vec<String> = alternatives
                .iter()
                .map(|a| format!("{} {:.3}", state_label(&a.state), a.probability))
                .collect();
            format!("{} -> {}", state_label(state), alts.join(" | "))
        }
    };
    let kind = serde_json::to_value(s.kind).expect("kind serializes");
    format!(
        "{:<13} {:.3}  {what}  [{}]\n",
        kind.as_str().unwrap_or_default(),
        s.score,
        s.provenance
    )
}

fn state_label(s: &State) -> String {
    s.to_string()
}

fn suggestions(list: &[Suggestion]) -> String {
    if list.is_empty() {
        return "no suggestions\n".to_owned();
    }
    list.iter().map(suggestion_line).collect()
}

pub fn suggest(r: &SuggestReport) -> String {
    let mut out = suggestions(&r.suggestions);
    if r.unknown_state {
        out.push_str("last hint step is not a state of the model\n");
    } else {
        let _ = writeln!(out, "end probability {}", opt_f64(r.end_probability, 3));
    }
    out
}

pub fn diff(r: &DiffReport) -> String {
    suggestions(&r.suggestions)
}

pub fn loops(r: &LoopsReport) -> String {
    let mut out = String::new();
    for t in &r.traces {
        if t.regions.is_empty() {
            let _ = writeln!(out, "{:<16} none", t.id);
        }
        for g in &t.regions {
            let _ = writeln!(
                out,
                "{:<16} start {} period {} repetitions {}",
                t.id, g.start, g.period, g.repetitions
            );
        }
    }
    out
}

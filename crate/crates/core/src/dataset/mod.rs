//! Trace datasets: JSON-lines persistence, screening, and summary statistics.

mod screen;
mod stats;

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

pub use screen::{screen_dataset, RejectedTrace, ScreenResult, ScreeningRule};
pub use stats::{dataset_stats, CategoryCounts, StatsSummary, Summary};

pub use crate::trace::{parse_trace, serialize_trace};
use crate::category::Catalog;
use crate::error::DatasetError;
use crate::trace::Trace;

/// A collection of traces with unique ids plus the prompt catalog.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    traces: Vec<Trace>,
    categories: Catalog,
}

impl Dataset {
    pub fn new(traces: Vec<Trace>) -> Result<Self, DatasetError> {
        Self::with_catalog(traces, Catalog::default())
    }

    pub fn with_catalog(traces: Vec<Trace>, categories: Catalog) -> Result<Self, DatasetError> {
        let mut seen = BTreeSet::new();
        for t in &traces {
            if !seen.insert(t.id.as_str()) {
                return Err(DatasetError::DuplicateId(t.id.clone()));
            }
        }
        Ok(Dataset { traces, categories })
    }

    pub fn traces(&self) -> &[Trace] {
        &self.traces
    }

    pub fn categories(&self) -> &Catalog {
        &self.categories
    }

    pub fn into_traces(self) -> Vec<Trace> {
        self.traces
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }
}

/// Reads one trace per non-blank line. Errors carry the 1-based line number.
pub fn read_jsonl<R: BufRead>(reader: R) -> Result<Vec<Trace>, DatasetError> {
    let mut traces = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let trace = parse_trace(&line).map_err(|source| DatasetError::Line {
            line: i + 1,
            source,
        })?;
        traces.push(trace);
    }
    Ok(traces)
}

/// Writes traces in canonical form, one per line.
pub fn write_jsonl<W: Write>(mut writer: W, traces: &[Trace]) -> std::io::Result<()> {
    for t in traces {
        writeln!(writer, "{}", serialize_trace(t))?;
    }
    writer.flush()
}

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::trace::Trace;
use crate::validate::{validate_trace, ValidationReport};

/// Worker-level screening policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScreeningRule {
    /// A worker with at least this many individually rejected traces loses
    /// all of their traces. Below it, only the failing traces are dropped.
    pub worker_reject_threshold: usize,
}

impl Default for ScreeningRule {
    fn default() -> Self {
        ScreeningRule {
            worker_reject_threshold: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectedTrace {
    pub trace: Trace,
    /// The trace's own validation; may be approved when the trace was
    /// discarded only because of its worker.
    pub report: ValidationReport,
    pub worker_discarded: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScreenResult {
    pub approved: Vec<Trace>,
    pub rejected_traces: Vec<RejectedTrace>,
    pub rejected_workers: Vec<String>,
}

/// Validates every trace, then applies the worker rule. Output lists keep
/// input order; `rejected_workers` is sorted.
pub fn screen_dataset(dataset: &Dataset, rule: ScreeningRule) -> ScreenResult {
    let reports: Vec<ValidationReport> = dataset.traces().iter().map(validate_trace).collect();

    let mut failures: BTreeMap<&str, usize> = BTreeMap::new();
    for (t, r) in dataset.traces().iter().zip(&reports) {
        if !r.is_approved() {
            *failures.entry(t.worker_id.as_str()).or_default() += 1;
        }
    }
    let discarded: BTreeSet<&str> = failures
        .iter()
        .filter(|(_, n)| **n >= rule.worker_reject_threshold.max(1))
        .map(|(w, _)| *w)
        .collect();

    let mut result = ScreenResult {
        rejected_workers: discarded.iter().map(|w| (*w).to_owned()).collect(),
        ..Default::default()
    };
    for (t, report) in dataset.traces().iter().zip(reports) {
        let worker_discarded = discarded.contains(t.worker_id.as_str());
        if report.is_approved() && !worker_discarded {
            result.approved.push(t.clone());
        } else {
            result.rejected_traces.push(RejectedTrace {
                trace: t.clone(),
                report,
                worker_discarded,
            });
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{StepInstance, StepKind, TaskCategory};

    fn trace(id: &str, worker: &str, len: usize) -> Trace {
        let steps = (0..len).map(|_| StepInstance::new(StepKind::Grab, ["cup"])).collect();
        Trace::new(id, TaskCategory::Groceries, worker, steps)
    }

    fn ids(ts: &[Trace]) -> Vec<&str> {
        ts.iter().map(|t| t.id.as_str()).collect()
    }

    #[test]
    fn one_failure_keeps_remainder() {
        let ds = Dataset::new(vec![trace("a", "w", 1), trace("b", "w", 5), trace("c", "w", 6)]).unwrap();
        let r = screen_dataset(&ds, ScreeningRule::default());
        assert_eq!(ids(&r.approved), ["b", "c"]);
        assert_eq!(r.rejected_traces.len(), 1);
        assert!(!r.rejected_traces[0].worker_discarded);
        assert!(r.rejected_workers.is_empty());
    }

    #[test]
    fn two_failures_discard_worker() {
        let ds = Dataset::new(vec![
            trace("a", "w", 1),
            trace("b", "w", 1),
            trace("c", "w", 6),
            trace("d", "v", 3),
        ])
        .unwrap();
        let r = screen_dataset(&ds, ScreeningRule::default());
        assert_eq!(ids(&r.approved), ["d"]);
        assert_eq!(r.rejected_traces.len(), 3);
        assert!(r.rejected_traces[2].report.is_approved());
        assert!(r.rejected_traces[2].worker_discarded);
        assert_eq!(r.rejected_workers, ["w"]);
    }

    #[test]
    fn all_valid() {
        let ds = Dataset::new(vec![trace("a", "w", 2), trace("b", "v", 3)]).unwrap();
        let r = screen_dataset(&ds, ScreeningRule::default());
        assert_eq!(r.approved.len(), 2);
        assert!(r.rejected_traces.is_empty());
        assert!(r.rejected_workers.is_empty());
    }

    #[test]
    fn configurable_threshold() {
        let ds = Dataset::new(vec![trace("a", "w", 1), trace("b", "w", 4)]).unwrap();
        let r = screen_dataset(&ds, ScreeningRule { worker_reject_threshold: 1 });
        assert!(r.approved.is_empty());
        assert_eq!(r.rejected_workers, ["w"]);
    }
}

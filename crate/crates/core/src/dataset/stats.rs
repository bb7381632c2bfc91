use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::category::TaskCategory;
use crate::step::StepKind;

/// Mean, min, and max of a count; all absent over an empty population.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub mean: Option<f64>,
    pub min: Option<usize>,
    pub max: Option<usize>,
}

impl Summary {
    fn of(values: impl IntoIterator<Item = usize>) -> Self {
        let (mut n, mut sum) = (0usize, 0usize);
        let (mut min, mut max) = (None::<usize>, None::<usize>);
        for v in values {
            n += 1;
            sum += v;
            min = Some(min.map_or(v, |m| m.min(v)));
            max = Some(max.map_or(v, |m| m.max(v)));
        }
        Summary {
            mean: (n > 0).then(|| sum as f64 / n as f64),
            min,
            max,
        }
    }
}

/// Trace counts per category. The summary ranges over categories with at
/// least one trace.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CategoryCounts {
    pub counts: BTreeMap<TaskCategory, usize>,
    #[serde(flatten)]
    pub summary: Summary,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct StatsSummary {
    pub total_traces: usize,
    pub total_workers: usize,
    pub traces_per_category: CategoryCounts,
    pub steps_per_trace: Summary,
    pub total_steps: usize,
    pub total_descriptions: usize,
    /// `total_descriptions / total_steps`; absent when there are no steps.
    pub description_rate: Option<f64>,
    /// Fraction of workers who used at least one wait step.
    pub wait_usage: Option<f64>,
}

pub fn dataset_stats(dataset: &Dataset) -> StatsSummary {
    let traces = dataset.traces();
    let mut per_category: BTreeMap<TaskCategory, usize> = BTreeMap::new();
    let mut workers = BTreeSet::new();
    let mut waiting_workers = BTreeSet::new();
    let mut total_steps = 0;
    let mut total_descriptions = 0;

    for t in traces {
        *per_category.entry(t.category).or_default() += 1;
        workers.insert(t.worker_id.as_str());
        total_steps += t.steps.len();
        total_descriptions += t.steps.iter().filter(|s| s.has_description()).count();
        if t.steps.iter().any(|s| s.kind == StepKind::Wait) {
            waiting_workers.insert(t.worker_id.as_str());
        }
    }

    let summary = Summary::of(per_category.values().copied());
    StatsSummary {
        total_traces: traces.len(),
        total_workers: workers.len(),
        traces_per_category: CategoryCounts {
            counts: per_category,
            summary,
        },
        steps_per_trace: Summary::of(traces.iter().map(|t| t.steps.len())),
        total_steps,
        total_descriptions,
        description_rate: (total_steps > 0)
            .then(|| total_descriptions as f64 / total_steps as f64),
        wait_usage: (!workers.is_empty())
            .then(|| waiting_workers.len() as f64 / workers.len() as f64),
    }
}

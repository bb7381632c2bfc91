//! Versioned, swap-on-rebuild model snapshots.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, PoisonError, RwLock};

use serde::{Deserialize, Serialize};

use tasktrace::dataset::{screen_dataset, ScreeningRule};
use tasktrace::model::{build_markov, Abstraction};
use tasktrace::{Dataset, MarkovModel, TaskCategory, Trace};

use crate::store::{RecordStatus, StoreRecord};

/// A category's model together with the traces it was built from.
#[derive(Debug)]
pub struct CategoryModel {
    pub model: MarkovModel,
    pub traces: Vec<Trace>,
}

/// One immutable generation of models. Requests hold an `Arc` to a
/// snapshot for their whole duration.
#[derive(Debug, Default)]
pub struct Snapshot {
    pub version: u64,
    pub models: BTreeMap<TaskCategory, CategoryModel>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelStatus {
    Ready,
    NotReady,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryVersion {
    pub status: ModelStatus,
    pub trace_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RebuildReport {
    pub version: u64,
    pub categories: BTreeMap<TaskCategory, CategoryVersion>,
}

impl Snapshot {
    pub fn report(&self) -> RebuildReport {
        RebuildReport {
            version: self.version,
            categories: TaskCategory::ALL
                .iter()
                .map(|c| {
                    let entry = match self.models.get(c) {
                        Some(m) => CategoryVersion {
                            status: ModelStatus::Ready,
                            trace_count: m.traces.len(),
                        },
                        None => CategoryVersion {
                            status: ModelStatus::NotReady,
                            trace_count: 0,
                        },
                    };
                    (*c, entry)
                })
                .collect(),
        }
    }
}

/// Traces eligible for modeling and statistics: approved records whose
/// worker survives screening over all stored records.
pub fn modeling_traces(records: &[StoreRecord], rule: ScreeningRule) -> Vec<Trace> {
    let all: Vec<Trace> = records.iter().map(|r| r.trace.clone()).collect();
    let dataset = Dataset::new(all).expect("store ids are unique");
    let screened = screen_dataset(&dataset, rule);
    let kept: std::collections::HashSet<&str> =
        screened.approved.iter().map(|t| t.id.as_str()).collect();
    records
        .iter()
        .filter(|r| r.status == RecordStatus::Approved && kept.contains(r.trace.id.as_str()))
        .map(|r| r.trace.clone())
        .collect()
}

/// Builds one model per category that has at least one trace.
pub fn build_models(
    traces: Vec<Trace>,
    abstraction: Abstraction,
    alpha: f64,
) -> BTreeMap<TaskCategory, CategoryModel> {
    let mut by_category: BTreeMap<TaskCategory, Vec<Trace>> = BTreeMap::new();
    for t in traces {
        by_category.entry(t.category).or_default().push(t);
    }
    by_category
        .into_iter()
        .map(|(category, traces)| {
            let model = build_markov(&traces, abstraction, alpha)
                .expect("non-empty single-category input with checked alpha");
            (category, CategoryModel { model, traces })
        })
        .collect()
}

#[derive(Debug, Default)]
pub struct Registry {
    current: RwLock<Arc<Snapshot>>,
    rebuild: Mutex<()>,
}

impl Registry {
    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.current
            .read()
            .unwrap_or_else(PoisonError::into_inner)
            .clone()
    }

    /// Builds a new generation from `source` and swaps it in. Rebuilds are
    /// serialized; readers are never blocked while models are built.
    pub fn rebuild(
        &self,
        source: impl FnOnce() -> Vec<Trace>,
        abstraction: Abstraction,
        alpha: f64,
    ) -> Arc<Snapshot> {
        let _guard = self.rebuild.lock().unwrap_or_else(PoisonError::into_inner);
        let models = build_models(source(), abstraction, alpha);
        let version = self.snapshot().version + 1;
        let next = Arc::new(Snapshot { version, models });
        *self.current.write().unwrap_or_else(PoisonError::into_inner) = next.clone();
        next
    }
}

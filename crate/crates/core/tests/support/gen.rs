//! Proptest generators for steps, traces, and datasets.

use proptest::prelude::*;
use tasktrace::{step_schema, StepInstance, StepKind, TaskCategory, Trace};

pub fn kind() -> impl Strategy<Value = StepKind> {
    prop::sample::select(StepKind::ALL.to_vec())
}

pub fn kind_from(kinds: Vec<StepKind>) -> impl Strategy<Value = StepKind> {
    prop::sample::select(kinds)
}

pub fn arg_text() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["mail", "Front Door", "office", " kitchen  table ", "Guest 1", "cup"])
        .prop_map(str::to_owned)
}

/// A schema-valid step of the given kind.
pub fn step_of(kind: StepKind) -> impl Strategy<Value = StepInstance> {
    let n = step_schema(kind).len();
    (
        prop::collection::vec(arg_text(), n),
        prop::option::of(prop::sample::select(vec!["", "because", "wait for reply"])),
    )
        .prop_map(move |(values, desc)| {
            let mut s = StepInstance::new(kind, values);
            s.description = desc.map(str::to_owned);
            s
        })
}

pub fn step() -> impl Strategy<Value = StepInstance> {
    kind().prop_flat_map(step_of)
}

pub fn step_from(kinds: Vec<StepKind>) -> impl Strategy<Value = StepInstance> {
    kind_from(kinds).prop_flat_map(step_of)
}

pub fn category() -> impl Strategy<Value = TaskCategory> {
    prop::sample::select(TaskCategory::ALL.to_vec())
}

/// Valid trace with `len` in the given range; id and worker supplied later.
pub fn trace(len: std::ops::Range<usize>) -> impl Strategy<Value = Trace> {
    (
        category(),
        prop::collection::vec(step(), len),
        0i64..2_000_000_000,
        prop::option::of("[a-z ]{0,12}"),
    )
        .prop_map(|(cat, steps, secs, feedback)| {
            let mut t = Trace::new("t", cat, "w", steps);
            t.created_at = chrono::DateTime::from_timestamp(secs, 0).unwrap();
            t.feedback = feedback;
            t
        })
}

/// Dataset of up to `max` traces over a handful of workers, with unique
/// ids. Lengths include 0 and 1 so that rejections occur.
pub fn traces(max: usize) -> impl Strategy<Value = Vec<Trace>> {
    prop::collection::vec((trace(0..6), 0usize..5), 0..max).prop_map(|items| {
        items
            .into_iter()
            .enumerate()
            .map(|(i, (mut t, w))| {
                t.id = format!("t{i:04}");
                t.worker_id = format!("w{w}");
                t
            })
            .collect()
    })
}

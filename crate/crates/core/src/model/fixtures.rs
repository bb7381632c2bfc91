//! Small reference datasets used by tests, examples, and benchmarks.

use crate::category::TaskCategory;
use crate::step::{StepInstance, StepKind};
use crate::trace::Trace;

/// Three mail-category traces from one worker:
///
/// ```text
/// t1: move_to(front door), grab(mail), deliver(mail, kitchen table)
/// t2: move_to(front door), grab(mail), deliver(mail, office)
/// t3: find(mail),          grab(mail), deliver(mail, office)
/// ```
pub fn f1() -> Vec<Trace> {
    let mail = |first: StepInstance, target: &str| {
        vec![
            first,
            StepInstance::new(StepKind::Grab, ["mail"]),
            StepInstance::new(StepKind::Deliver, ["mail", target]),
        ]
    };
    vec![
        Trace::new(
            "t1",
            TaskCategory::Mail,
            "w1",
            mail(StepInstance::new(StepKind::MoveTo, ["front door"]), "kitchen table"),
        ),
        Trace::new(
            "t2",
            TaskCategory::Mail,
            "w1",
            mail(StepInstance::new(StepKind::MoveTo, ["front door"]), "office"),
        ),
        Trace::new(
            "t3",
            TaskCategory::Mail,
            "w1",
            mail(StepInstance::new(StepKind::Find, ["mail"]), "office"),
        ),
    ]
}

/// A groceries trace whose middle is a grab/place loop over three bags.
pub fn groceries_loop() -> Trace {
    let mut steps = Vec::new();
    for item in ["milk", "bread", "eggs"] {
        steps.push(StepInstance::new(StepKind::Grab, [item]));
        steps.push(StepInstance::new(StepKind::Place, [item, "fridge"]));
    }
    Trace::new("g1", TaskCategory::Groceries, "w1", steps)
}

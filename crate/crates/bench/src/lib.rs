//! Seeded synthetic workloads for the benchmarks.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tasktrace::{StepInstance, StepKind, TaskCategory, Trace};

const KINDS: [StepKind; 6] = [
    StepKind::MoveTo,
    StepKind::Find,
    StepKind::Grab,
    StepKind::Place,
    StepKind::Deliver,
    StepKind::Wait,
];
const ITEMS: [&str; 4] = ["mail", "milk", "cup", "box"];
const PLACES: [&str; 4] = ["kitchen", "office", "shelf", "fridge"];

fn step(rng: &mut StdRng) -> StepInstance {
    let kind = KINDS[rng.gen_range(0..KINDS.len())];
    let item = ITEMS[rng.gen_range(0..ITEMS.len())];
    let place = PLACES[rng.gen_range(0..PLACES.len())];
    match kind {
        StepKind::MoveTo | StepKind::Find => StepInstance::new(kind, [place]),
        StepKind::Grab => StepInstance::new(kind, [item]),
        StepKind::Place | StepKind::Deliver => StepInstance::new(kind, [item, place]),
        _ => StepInstance::new(kind, Vec::<String>::new()),
    }
}

/// A random step sequence of exactly `len` steps.
pub fn steps(seed: u64, len: usize) -> Vec<StepInstance> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..len).map(|_| step(&mut rng)).collect()
}

/// `count` mail traces of 2 to `max_len` steps each.
pub fn traces(seed: u64, count: usize, max_len: usize) -> Vec<Trace> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let len = rng.gen_range(2..=max_len.max(2));
            let steps = (0..len).map(|_| step(&mut rng)).collect();
            Trace::new(format!("t{i}"), TaskCategory::Mail, format!("w{}", i % 7), steps)
        })
        .collect()
}

/// A sequence made of `reps` copies of a `period`-step body.
pub fn repeated(period: usize, reps: usize) -> Vec<StepInstance> {
    let body = steps(7, period);
    body.iter().cycle().take(period * reps).cloned().collect()
}

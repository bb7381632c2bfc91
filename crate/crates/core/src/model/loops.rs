//! Tandem-repeat detection over step kinds.

use serde::{Deserialize, Serialize};

use super::suggestion::{sort_suggestions, Payload, Suggestion, SuggestionKind};
use crate::step::{StepInstance, StepKind};

/// `repetitions` back-to-back copies of a `period`-step block starting at `start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LoopRegion {
    pub start: usize,
    pub period: usize,
    pub repetitions: usize,
}

impl LoopRegion {
    pub fn len(&self) -> usize {
        self.period * self.repetitions
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn end(&self) -> usize {
        self.start + self.len()
    }
}

/// Finds non-overlapping tandem repeats of at least `min_reps` (clamped to
/// 2) copies, compared by kind only. Candidates are the maximal repeat
/// count for every (start, period); overlaps keep the candidate covering
/// more steps, then the earlier start, then the shorter period. Output is
/// ordered by start.
pub fn detect_loops(steps: &[StepInstance], min_reps: usize) -> Vec<LoopRegion> {
    let kinds: Vec<StepKind> = steps.iter().map(|s| s.kind).collect();
    let n = kinds.len();
    let min_reps = min_reps.max(2);

    let mut candidates = Vec::new();
    // agree[j]: length of the run of positions k >= j with kinds[k] == kinds[k + p]
    let mut agree = vec![0usize; n + 1];
    for period in 1..=n / min_reps {
        agree[n - period] = 0;
        for j in (0..n - period).rev() {
            agree[j] = if kinds[j] == kinds[j + period] {
                agree[j + 1] + 1
            } else {
                0
            };
        }
        for start in 0..n - period {
            let repetitions = 1 + agree[start] / period;
            if repetitions >= min_reps {
                candidates.push(LoopRegion {
                    start,
                    period,
                    repetitions,
                });
            }
        }
    }

    candidates.sort_by(|a, b| {
        b.len()
            .cmp(&a.len())
            .then(a.start.cmp(&b.start))
            .then(a.period.cmp(&b.period))
    });
    let mut taken = vec![false; n];
    let mut chosen = Vec::new();
    for c in candidates {
        if taken[c.start..c.end()].iter().any(|t| *t) {
            continue;
        }
        taken[c.start..c.end()].iter_mut().for_each(|t| *t = true);
        chosen.push(c);
    }
    chosen.sort();
    chosen
}

/// Wraps each detected loop as a foreach suggestion scored by the fraction
/// of the hint it covers.
pub fn suggest_foreach(steps: &[StepInstance]) -> Vec<Suggestion> {
    let mut out: Vec<Suggestion> = detect_loops(steps, 2)
        .into_iter()
        .map(|r| Suggestion {
            kind: SuggestionKind::ForeachLoop,
            payload: Payload::Loop {
                start: r.start,
                period: r.period,
                repetitions: r.repetitions,
                body: steps[r.start..r.start + r.period].iter().map(|s| s.kind).collect(),
            },
            score: r.len() as f64 / steps.len() as f64,
            provenance: "hint".into(),
        })
        .collect();
    sort_suggestions(&mut out);
    out
}

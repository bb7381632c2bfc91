//! Suggestions offered against a hint, and their canonical ordering.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::state::State;
use crate::step::{StepInstance, StepKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuggestionKind {
    NextStep,
    MissingStep,
    ForeachLoop,
    BranchPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alternative {
    pub state: State,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Payload {
    /// A step to insert before hint index `position` (`position == hint.len()`
    /// appends).
    Step { step: StepInstance, position: usize },
    /// A tandem repeat in the hint; `body` holds the kinds of one period.
    Loop {
        start: usize,
        period: usize,
        repetitions: usize,
        body: Vec<StepKind>,
    },
    Branch {
        state: State,
        alternatives: Vec<Alternative>,
    },
}

/// A ranked proposal. Scores lie in [0, 1] and are ranking scores, not
/// calibrated probabilities across suggestion kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Suggestion {
    pub kind: SuggestionKind,
    pub payload: Payload,
    pub score: f64,
    pub provenance: String,
}

impl Suggestion {
    fn anchor(&self) -> (Option<StepKind>, Vec<String>) {
        match &self.payload {
            Payload::Step { step, .. } => (Some(step.kind), step.canonical_args()),
            Payload::Loop { body, .. } => (body.first().copied(), Vec::new()),
            Payload::Branch { state, .. } => (
                state.kind(),
                state.key().map(|k| k.signature().to_vec()).unwrap_or_default(),
            ),
        }
    }

    fn location(&self) -> usize {
        match &self.payload {
            Payload::Step { position, .. } => *position,
            Payload::Loop { start, .. } => *start,
            Payload::Branch { .. } => 0,
        }
    }

    /// The canonical list order: score descending, then toolbox kind order,
    /// then argument signature, then suggestion kind and location.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        other
            .score
            .total_cmp(&self.score)
            .then_with(|| self.anchor().cmp(&other.anchor()))
            .then_with(|| self.kind.cmp(&other.kind))
            .then_with(|| self.location().cmp(&other.location()))
            .then_with(|| self.provenance.cmp(&other.provenance))
    }

    /// Identity used for deduplication. Step proposals are identified by
    /// the canonical step and insertion position, whether they came from
    /// the chain or from a diff.
    pub(crate) fn identity(&self) -> String {
        match &self.payload {
            Payload::Step { step, position } => {
                format!("step:{}:{:?}:{position}", step.kind, step.canonical_args())
            }
            Payload::Loop {
                start,
                period,
                repetitions,
                ..
            } => format!("loop:{start}:{period}:{repetitions}"),
            Payload::Branch { state, .. } => format!("branch:{state}"),
        }
    }
}

pub fn sort_suggestions(suggestions: &mut [Suggestion]) {
    suggestions.sort_by(Suggestion::canonical_cmp);
}

/// Keeps one suggestion per identity (the highest-scoring one) and returns
/// the result in canonical order.
pub fn dedup_suggestions(mut suggestions: Vec<Suggestion>) -> Vec<Suggestion> {
    sort_suggestions(&mut suggestions);
    let mut seen = std::collections::BTreeSet::new();
    suggestions.retain(|s| seen.insert(s.identity()));
    suggestions
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step_suggestion(kind: SuggestionKind, step: StepInstance, score: f64) -> Suggestion {
        Suggestion {
            kind,
            payload: Payload::Step { step, position: 0 },
            score,
            provenance: "test".into(),
        }
    }

    #[test]
    fn ties_follow_toolbox_then_args() {
        let mut v = vec![
            step_suggestion(SuggestionKind::NextStep, StepInstance::new(StepKind::Grab, ["b"]), 0.5),
            step_suggestion(SuggestionKind::NextStep, StepInstance::new(StepKind::Grab, ["a"]), 0.5),
            step_suggestion(SuggestionKind::NextStep, StepInstance::new(StepKind::MoveTo, ["z"]), 0.5),
            step_suggestion(SuggestionKind::NextStep, StepInstance::new(StepKind::Wait, Vec::<String>::new()), 0.9),
        ];
        sort_suggestions(&mut v);
        let order: Vec<String> = v.iter().map(|s| s.identity()).collect();
        assert!(order[0].starts_with("step:wait"));
        assert!(order[1].starts_with("step:move_to"));
        assert!(order[2].contains("[\"a\"]"));
        assert!(order[3].contains("[\"b\"]"));
    }

    #[test]
    fn dedup_keeps_max() {
        let step = StepInstance::new(StepKind::Deliver, ["mail", "office"]);
        let v = dedup_suggestions(vec![
            step_suggestion(SuggestionKind::MissingStep, step.clone(), 0.25),
            step_suggestion(SuggestionKind::NextStep, step, 0.75),
        ]);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].score, 0.75);
        assert_eq!(v[0].kind, SuggestionKind::NextStep);
    }

    #[test]
    fn payload_json_round_trip() {
        let s = Suggestion {
            kind: SuggestionKind::ForeachLoop,
            payload: Payload::Loop {
                start: 0,
                period: 2,
                repetitions: 3,
                body: vec![StepKind::Grab, StepKind::Place],
            },
            score: 1.0,
            provenance: "hint".into(),
        };
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<Suggestion>(&json).unwrap(), s);
    }
}

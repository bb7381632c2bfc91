//! Next-step, branch, and combined edit suggestions.

use serde::{Deserialize, Serialize};

use super::align::AlignCosts;
use super::diff::diff_complete;
use super::loops::suggest_foreach;
use super::markov::MarkovModel;
use super::state::State;
use super::suggestion::{dedup_suggestions, sort_suggestions, Alternative, Payload, Suggestion, SuggestionKind};
use crate::step::StepInstance;
use crate::trace::Trace;

/// Ranked successors of a hint's last state.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct NextSteps {
    pub suggestions: Vec<Suggestion>,
    /// Probability that the task ends after the prefix.
    pub end_probability: Option<f64>,
    /// Set when the prefix's last step maps to a state the model never saw.
    pub unknown_state: bool,
}

fn provenance(model: &MarkovModel) -> String {
    format!("markov:{}", model.category())
}

/// Top-`k` successors of the last step of `prefix` (START when empty).
pub fn suggest_next(model: &MarkovModel, prefix: &[StepInstance], k: usize) -> NextSteps {
    let from = prefix.last().map_or(State::Start, |s| model.state_of(s));
    if !model.contains(&from) {
        return NextSteps {
            unknown_state: true,
            ..Default::default()
        };
    }
    let mut end_probability = None;
    let mut suggestions = Vec::new();
    for (to, p) in model.row(&from) {
        match to {
            State::End => end_probability = Some(p),
            State::Step(key) => suggestions.push(Suggestion {
                kind: SuggestionKind::NextStep,
                payload: Payload::Step {
                    step: model.representative_step(&key),
                    position: prefix.len(),
                },
                score: p,
                provenance: provenance(model),
            }),
            State::Start => {}
        }
    }
    sort_suggestions(&mut suggestions);
    suggestions.truncate(k);
    NextSteps {
        suggestions,
        end_probability: Some(end_probability.unwrap_or(0.0)),
        unknown_state: false,
    }
}

/// States (END excluded) with at least two non-END successors whose
/// probability reaches `threshold`. Scored by the second-highest
/// qualifying probability.
pub fn detect_branches(model: &MarkovModel, threshold: f64) -> Vec<Suggestion> {
    let mut out = Vec::new();
    for from in model.states().iter().filter(|s| **s != State::End) {
        let mut alternatives: Vec<Alternative> = model
            .row(from)
            .into_iter()
            .filter(|(to, p)| *to != State::End && *p >= threshold)
            .map(|(state, probability)| Alternative { state, probability })
            .collect();
        if alternatives.len() < 2 {
            continue;
        }
        alternatives.sort_by(|a, b| {
            b.probability
                .total_cmp(&a.probability)
                .then_with(|| a.state.cmp(&b.state))
        });
        out.push(Suggestion {
            kind: SuggestionKind::BranchPoint,
            score: alternatives[1].probability,
            payload: Payload::Branch {
                state: from.clone(),
                alternatives,
            },
            provenance: provenance(model),
        });
    }
    sort_suggestions(&mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuggestConfig {
    pub k: usize,
    pub costs: AlignCosts,
    pub branch_threshold: f64,
}

impl Default for SuggestConfig {
    fn default() -> Self {
        SuggestConfig {
            k: 3,
            costs: AlignCosts::default(),
            branch_threshold: 0.2,
        }
    }
}

/// Combines next-step, missing-step, foreach, and branch suggestions for a
/// hint, deduplicated and in canonical order.
///
/// Branches are reported only at states the hint passes through; START
/// counts once the hint has a first step.
pub fn suggest_edits(
    model: &MarkovModel,
    traces: &[Trace],
    hint: &[StepInstance],
    config: &SuggestConfig,
) -> Vec<Suggestion> {
    let mut all = suggest_next(model, hint, config.k).suggestions;
    all.extend(diff_complete(hint, traces, &config.costs));
    all.extend(suggest_foreach(hint));

    let mut visited: Vec<State> = hint.iter().map(|s| model.state_of(s)).collect();
    if !hint.is_empty() {
        visited.push(State::Start);
    }
    all.extend(
        detect_branches(model, config.branch_threshold)
            .into_iter()
            .filter(|s| matches!(&s.payload, Payload::Branch { state, .. } if visited.contains(state))),
    );
    dedup_suggestions(all)
}

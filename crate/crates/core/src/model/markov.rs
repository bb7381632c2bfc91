//! First-order transition model over abstracted step states.

use std::collections::BTreeMap;

use super::state::{Abstraction, State, StateKey};
use crate::category::TaskCategory;
use crate::error::ModelError;
use crate::step::StepInstance;
use crate::trace::Trace;

/// Per-category Markov chain with synthetic START and END states and
/// additive smoothing. Counts are the source of truth; probabilities are
/// derived on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovModel {
    pub(crate) category: TaskCategory,
    pub(crate) abstraction: Abstraction,
    pub(crate) alpha: f64,
    /// Sorted; always contains START and END.
    pub(crate) states: Vec<State>,
    pub(crate) counts: BTreeMap<(State, State), u64>,
    pub(crate) trace_count: usize,
    /// Most frequent canonical argument values per step state.
    pub(crate) modal_args: BTreeMap<StateKey, Vec<String>>,
    out_totals: BTreeMap<State, u64>,
}

pub(crate) fn check_alpha(alpha: f64) -> Result<(), ModelError> {
    if alpha.is_finite() && alpha >= 0.0 {
        Ok(())
    } else {
        Err(ModelError::BadAlpha(alpha))
    }
}

/// Builds a model from traces of a single category.
pub fn build_markov(
    traces: &[Trace],
    abstraction: Abstraction,
    alpha: f64,
) -> Result<MarkovModel, ModelError> {
    check_alpha(alpha)?;
    let first = traces.first().ok_or(ModelError::NoTraces)?;
    if let Some(other) = traces.iter().find(|t| t.category != first.category) {
        return Err(ModelError::MixedCategories(
            first.category.slug().into(),
            other.category.slug().into(),
        ));
    }

    let mut counts: BTreeMap<(State, State), u64> = BTreeMap::new();
    let mut arg_tallies: BTreeMap<StateKey, BTreeMap<Vec<String>, u64>> = BTreeMap::new();
    for trace in traces {
        let mut prev = State::Start;
        for step in &trace.steps {
            let key = StateKey::from_step(step, abstraction);
            *arg_tallies
                .entry(key.clone())
                .or_default()
                .entry(step.canonical_args())
                .or_default() += 1;
            let next = State::Step(key);
            *counts.entry((prev, next.clone())).or_default() += 1;
            prev = next;
        }
        *counts.entry((prev, State::End)).or_default() += 1;
    }

    let modal_args = arg_tallies
        .into_iter()
        .filter(|(key, _)| key.arg_signature.is_none())
        .map(|(key, tally)| {
            // highest count; BTreeMap order makes the lexicographically
            // smallest tuple win ties
            let best = tally
                .into_iter()
                .fold(None::<(Vec<String>, u64)>, |best, (args, n)| match best {
                    Some((_, m)) if m >= n => best,
                    _ => Some((args, n)),
                })
                .map(|(args, _)| args)
                .unwrap_or_default();
            (key, best)
        })
        .collect();

    Ok(MarkovModel::from_parts(
        first.category,
        abstraction,
        alpha,
        counts,
        traces.len(),
        modal_args,
    ))
}

impl MarkovModel {
    pub(crate) fn from_parts(
        category: TaskCategory,
        abstraction: Abstraction,
        alpha: f64,
        counts: BTreeMap<(State, State), u64>,
        trace_count: usize,
        modal_args: BTreeMap<StateKey, Vec<String>>,
    ) -> Self {
        let mut states: Vec<State> = vec![State::Start, State::End];
        let mut out_totals: BTreeMap<State, u64> = BTreeMap::new();
        for ((from, to), n) in &counts {
            states.push(from.clone());
            states.push(to.clone());
            *out_totals.entry(from.clone()).or_default() += n;
        }
        states.sort();
        states.dedup();
        MarkovModel {
            category,
            abstraction,
            alpha,
            states,
            counts,
            trace_count,
            modal_args,
            out_totals,
        }
    }

    pub fn category(&self) -> TaskCategory {
        self.category
    }

    pub fn abstraction(&self) -> Abstraction {
        self.abstraction
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn trace_count(&self) -> usize {
        self.trace_count
    }

    /// All states in order, START first and END last.
    pub fn states(&self) -> &[State] {
        &self.states
    }

    /// Step states only, in order.
    pub fn step_states(&self) -> impl Iterator<Item = &StateKey> {
        self.states.iter().filter_map(State::key)
    }

    pub fn contains(&self, state: &State) -> bool {
        self.states.binary_search(state).is_ok()
    }

    pub fn count(&self, from: &State, to: &State) -> u64 {
        self.counts
            .get(&(from.clone(), to.clone()))
            .copied()
            .unwrap_or(0)
    }

    pub fn counts(&self) -> impl Iterator<Item = (&State, &State, u64)> {
        self.counts.iter().map(|((a, b), n)| (a, b, *n))
    }

    /// Observed step states plus END: the successor alphabet of every row.
    pub fn successor_alphabet(&self) -> impl Iterator<Item = &State> {
        self.states.iter().filter(|s| **s != State::Start)
    }

    fn alphabet_size(&self) -> usize {
        self.states.len() - 1
    }

    /// Transition probability `P(to | from)`.
    pub fn probability(&self, from: &State, to: &State) -> f64 {
        if *from == State::End
            || *to == State::Start
            || !self.contains(from)
            || !self.contains(to)
        {
            return 0.0;
        }
        let total = self.out_totals.get(from).copied().unwrap_or(0) as f64;
        let denom = total + self.alpha * self.alphabet_size() as f64;
        if denom == 0.0 {
            return 0.0;
        }
        (self.count(from, to) as f64 + self.alpha) / denom
    }

    /// Successors of `from` with positive probability, in state order.
    pub fn row(&self, from: &State) -> Vec<(State, f64)> {
        self.successor_alphabet()
            .map(|to| (to.clone(), self.probability(from, to)))
            .filter(|(_, p)| *p > 0.0)
            .collect()
    }

    pub fn state_of(&self, step: &StepInstance) -> State {
        State::Step(StateKey::from_step(step, self.abstraction))
    }

    /// A representative step for a state: its own signature at kind+args
    /// level, the modal observed arguments at kind level.
    pub fn representative_step(&self, key: &StateKey) -> StepInstance {
        let values = match &key.arg_signature {
            Some(sig) => sig.clone(),
            None => self.modal_args.get(key).cloned().unwrap_or_default(),
        };
        StepInstance::new(key.kind, values)
    }

    /// Argument tokens that characterize a state for emission scoring.
    pub fn state_tokens(&self, key: &StateKey) -> Vec<String> {
        match &key.arg_signature {
            Some(sig) => sig.clone(),
            None => self.modal_args.get(key).cloned().unwrap_or_default(),
        }
    }

    pub fn modal_args(&self) -> &BTreeMap<StateKey, Vec<String>> {
        &self.modal_args
    }
}

/// Log-probability of START, the steps' states, then END. Negative
/// infinity when any transition has zero probability.
pub fn sequence_log_prob(model: &MarkovModel, steps: &[StepInstance]) -> f64 {
    let mut prev = State::Start;
    let mut total = 0.0;
    for next in steps
        .iter()
        .map(|s| model.state_of(s))
        .chain(std::iter::once(State::End))
    {
        let p = model.probability(&prev, &next);
        if p == 0.0 {
            return f64::NEG_INFINITY;
        }
        total += p.ln();
        prev = next;
    }
    total
}

//! Hidden-state inference over ambiguous hints.
//!
//! Hidden states are the step states of a [`MarkovModel`]; initial and
//! transition probabilities come from its START row and step rows. A hint
//! is decoded as a prefix, so END is never entered.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::markov::MarkovModel;
use super::state::{State, StateKey};
use crate::error::ModelError;
use crate::step::{canonicalize, StepInstance, StepKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmissionParams {
    /// Probability that an observed kind equals the hidden state's kind.
    pub p_match: f64,
    /// Weight of argument overlap in the emission score.
    pub arg_weight: f64,
}

impl Default for EmissionParams {
    fn default() -> Self {
        EmissionParams {
            p_match: 0.9,
            arg_weight: 0.5,
        }
    }
}

impl EmissionParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.p_match > 0.0 && self.p_match < 1.0) {
            return Err(ModelError::BadEmission(format!(
                "p_match must lie in (0, 1), got {}",
                self.p_match
            )));
        }
        if !(0.0..=1.0).contains(&self.arg_weight) {
            return Err(ModelError::BadEmission(format!(
                "arg_weight must lie in [0, 1], got {}",
                self.arg_weight
            )));
        }
        Ok(())
    }
}

/// A hint step whose kind and/or arguments may be unknown.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ObservedStep {
    #[serde(default)]
    pub kind: Option<StepKind>,
    /// Argument text; empty when unknown.
    #[serde(default)]
    pub args: Vec<String>,
}

impl ObservedStep {
    pub fn unknown(args: impl IntoIterator<Item = impl Into<String>>) -> Self {
        ObservedStep {
            kind: None,
            args: args.into_iter().map(Into::into).collect(),
        }
    }

    fn tokens(&self) -> BTreeSet<String> {
        self.args
            .iter()
            .map(|a| canonicalize(a))
            .filter(|a| !a.is_empty())
            .collect()
    }
}

impl From<&StepInstance> for ObservedStep {
    fn from(step: &StepInstance) -> Self {
        ObservedStep {
            kind: Some(step.kind),
            args: step.args.values().cloned().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decoded {
    pub path: Vec<StateKey>,
    pub log_score: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InferenceError {
    #[error("no observations to decode")]
    Empty,
    #[error("inconsistent observation: no hidden path has positive likelihood")]
    Inconsistent,
}

/// Jaccard overlap of two token sets; 1 when either side is empty.
pub fn arg_overlap(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 1.0;
    }
    let inter = a.intersection(b).count();
    let union = a.union(b).count();
    inter as f64 / union as f64
}

#[derive(Debug, Clone)]
pub struct Hmm {
    model: MarkovModel,
    params: EmissionParams,
    hidden: Vec<StateKey>,
    tokens: Vec<BTreeSet<String>>,
    log_init: Vec<f64>,
    /// Row-major `hidden.len()` squared.
    log_trans: Vec<f64>,
}

impl Hmm {
    pub fn new(model: MarkovModel, params: EmissionParams) -> Result<Self, ModelError> {
        params.validate()?;
        let hidden: Vec<StateKey> = model.step_states().cloned().collect();
        let tokens = hidden
            .iter()
            .map(|k| {
                model
                    .state_tokens(k)
                    .into_iter()
                    .filter(|t| !t.is_empty())
                    .collect()
            })
            .collect();
        let log_init = hidden
            .iter()
            .map(|k| model.probability(&State::Start, &State::Step(k.clone())).ln())
            .collect();
        let mut log_trans = Vec::with_capacity(hidden.len() * hidden.len());
        for from in &hidden {
            for to in &hidden {
                log_trans.push(
                    model
                        .probability(&State::Step(from.clone()), &State::Step(to.clone()))
                        .ln(),
                );
            }
        }
        Ok(Hmm {
            model,
            params,
            hidden,
            tokens,
            log_init,
            log_trans,
        })
    }

    pub fn model(&self) -> &MarkovModel {
        &self.model
    }

    pub fn params(&self) -> EmissionParams {
        self.params
    }

    /// Hidden states in decoding order.
    pub fn hidden_states(&self) -> &[StateKey] {
        &self.hidden
    }

    /// Emission score of hidden state `index` for `obs`.
    ///
    /// The kind factor is a distribution over the 17 kinds; the argument
    /// factor `w * overlap + (1 - w)` lies in `[1 - w, 1]`.
    pub fn emission(&self, index: usize, obs: &ObservedStep) -> f64 {
        let p = self.params.p_match;
        let kind_factor = match obs.kind {
            None => 1.0 / StepKind::COUNT as f64,
            Some(k) if k == self.hidden[index].kind => p,
            Some(_) => (1.0 - p) / (StepKind::COUNT - 1) as f64,
        };
        let w = self.params.arg_weight;
        let overlap = arg_overlap(&self.tokens[index], &obs.tokens());
        kind_factor * (w * overlap + (1.0 - w))
    }

    fn log_emissions(&self, obs: &ObservedStep) -> Vec<f64> {
        (0..self.hidden.len()).map(|i| self.emission(i, obs).ln()).collect()
    }

    /// Most likely hidden path. Equal scores resolve to the smaller state.
    pub fn viterbi(&self, observations: &[ObservedStep]) -> Result<Decoded, InferenceError> {
        let (first, rest) = observations.split_first().ok_or(InferenceError::Empty)?;
        let n = self.hidden.len();
        let emit = self.log_emissions(first);
        let mut delta: Vec<f64> = (0..n).map(|s| self.log_init[s] + emit[s]).collect();
        let mut backptrs: Vec<Vec<usize>> = Vec::with_capacity(rest.len());

        for obs in rest {
            let emit = self.log_emissions(obs);
            let mut next = vec![f64::NEG_INFINITY; n];
            let mut ptr = vec![0usize; n];
            for to in 0..n {
                let mut best = f64::NEG_INFINITY;
                let mut arg = 0;
                for from in 0..n {
                    let v = delta[from] + self.log_trans[from * n + to];
                    if v > best {
                        best = v;
                        arg = from;
                    }
                }
                next[to] = best + emit[to];
                ptr[to] = arg;
            }
            delta = next;
            backptrs.push(ptr);
        }

        let mut last = 0;
        let mut best = f64::NEG_INFINITY;
        for (s, v) in delta.iter().enumerate() {
            if *v > best {
                best = *v;
                last = s;
            }
        }
        if best == f64::NEG_INFINITY {
            return Err(InferenceError::Inconsistent);
        }

        let mut path = vec![last];
        for ptr in backptrs.iter().rev() {
            last = ptr[last];
            path.push(last);
        }
        path.reverse();
        Ok(Decoded {
            path: path.into_iter().map(|i| self.hidden[i].clone()).collect(),
            log_score: best,
        })
    }

    /// Log of the total likelihood summed over all hidden paths.
    pub fn forward_likelihood(&self, observations: &[ObservedStep]) -> Result<f64, InferenceError> {
        let (first, rest) = observations.split_first().ok_or(InferenceError::Empty)?;
        let n = self.hidden.len();
        let emit = self.log_emissions(first);
        let mut alpha: Vec<f64> = (0..n).map(|s| self.log_init[s] + emit[s]).collect();
        let mut terms = vec![0.0; n];
        for obs in rest {
            let emit = self.log_emissions(obs);
            alpha = (0..n)
                .map(|to| {
                    for from in 0..n {
                        terms[from] = alpha[from] + self.log_trans[from * n + to];
                    }
                    log_sum_exp(&terms) + emit[to]
                })
                .collect();
        }
        let total = log_sum_exp(&alpha);
        if total == f64::NEG_INFINITY {
            Err(InferenceError::Inconsistent)
        } else {
            Ok(total)
        }
    }
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

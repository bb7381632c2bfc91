//! JSON document form of a [`MarkovModel`]. Counts are stored; probabilities
//! are recomputed on load.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::markov::{check_alpha, MarkovModel};
use super::state::{Abstraction, State, StateKey};
use crate::category::TaskCategory;
use crate::error::ModelError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalArgs {
    pub state: StateKey,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub category: TaskCategory,
    pub abstraction: Abstraction,
    pub alpha: f64,
    pub states: Vec<State>,
    /// `counts[i][j]` is the number of `states[i] -> states[j]` transitions.
    pub counts: Vec<Vec<u64>>,
    pub trace_count: usize,
    /// Representative arguments for kind-level states.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modal_args: Vec<ModalArgs>,
}

impl MarkovModel {
    pub fn to_document(&self) -> ModelDocument {
        let counts = self
            .states
            .iter()
            .map(|from| self.states.iter().map(|to| self.count(from, to)).collect())
            .collect();
        ModelDocument {
            category: self.category,
            abstraction: self.abstraction,
            alpha: self.alpha,
            states: self.states.clone(),
            counts,
            trace_count: self.trace_count,
            modal_args: self
                .modal_args
                .iter()
                .filter(|(k, _)| k.arg_signature.is_none())
                .map(|(k, a)| ModalArgs {
                    state: k.clone(),
                    args: a.clone(),
                })
                .collect(),
        }
    }

    pub fn from_document(doc: ModelDocument) -> Result<Self, ModelError> {
        let bad = |m: String| Err(ModelError::BadDocument(m));
        check_alpha(doc.alpha)?;
        let n = doc.states.len();
        if doc.counts.len() != n || doc.counts.iter().any(|row| row.len() != n) {
            return bad(format!("counts must be a {n}x{n} matrix"));
        }
        let mut sorted = doc.states.clone();
        sorted.sort();
        sorted.dedup();
        if sorted != doc.states {
            return bad("states must be sorted and distinct".into());
        }
        if !doc.states.contains(&State::Start) || !doc.states.contains(&State::End) {
            return bad("states must include START and END".into());
        }
        for state in doc.states.iter().filter_map(State::key) {
            let signature_level = state.arg_signature.is_some();
            if signature_level != (doc.abstraction == Abstraction::KindArgs) {
                return bad(format!("state {state} does not match abstraction {}", doc.abstraction));
            }
        }

        let mut counts = BTreeMap::new();
        for (i, from) in doc.states.iter().enumerate() {
            for (j, to) in doc.states.iter().enumerate() {
                let c = doc.counts[i][j];
                if c == 0 {
                    continue;
                }
                if *from == State::End || *to == State::Start {
                    return bad(format!("transition {from} -> {to} is not allowed"));
                }
                counts.insert((from.clone(), to.clone()), c);
            }
        }
        let model = MarkovModel::from_parts(
            doc.category,
            doc.abstraction,
            doc.alpha,
            counts,
            doc.trace_count,
            doc.modal_args.into_iter().map(|m| (m.state, m.args)).collect(),
        );
        if model.states() != doc.states.as_slice() {
            return bad("every listed state must take part in a transition".into());
        }
        Ok(model)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let doc: ModelDocument =
            serde_json::from_str(text).map_err(|e| ModelError::BadDocument(e.to_string()))?;
        Self::from_document(doc)
    }
}

//! Task models built from traces and the suggestions derived from them.

mod align;
mod diff;
mod export;
pub mod fixtures;
mod hmm;
mod loops;
mod markov;
mod state;
mod suggest;
mod suggestion;

pub use align::{align, AlignCosts, Alignment, EditOp};
pub use diff::diff_complete;
pub use export::{ModalArgs, ModelDocument};
pub use hmm::{arg_overlap, Decoded, EmissionParams, Hmm, InferenceError, ObservedStep};
pub use loops::{detect_loops, suggest_foreach, LoopRegion};
pub use markov::{build_markov, sequence_log_prob, MarkovModel};
pub use state::{Abstraction, State, StateKey};
pub use suggest::{detect_branches, suggest_edits, suggest_next, NextSteps, SuggestConfig};
pub use suggestion::{dedup_suggestions, sort_suggestions, Alternative, Payload, Suggestion, SuggestionKind};

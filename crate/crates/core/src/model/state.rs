use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::UnknownToken;
use crate::step::{StepInstance, StepKind};

/// How much of a step is kept when mapping it to a model state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub enum Abstraction {
    /// Step kind only.
    #[default]
    #[serde(rename = "kind")]
    Kind,
    /// Step kind plus the canonical argument values.
    #[serde(rename = "kind+args")]
    KindArgs,
}

impl Abstraction {
    pub fn as_str(self) -> &'static str {
        match self {
            Abstraction::Kind => "kind",
            Abstraction::KindArgs => "kind+args",
        }
    }
}

impl FromStr for Abstraction {
    type Err = UnknownToken;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "kind" => Ok(Abstraction::Kind),
            "kind+args" => Ok(Abstraction::KindArgs),
            _ => Err(UnknownToken::new("abstraction", s)),
        }
    }
}

impl fmt::Display for Abstraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A step-derived model state. Ordering is toolbox kind order, then the
/// argument signature lexicographically (kind-only states first).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateKey {
    pub kind: StepKind,
    #[serde(rename = "args", default, skip_serializing_if = "Option::is_none")]
    pub arg_signature: Option<Vec<String>>,
}

impl StateKey {
    pub fn kind(kind: StepKind) -> Self {
        StateKey {
            kind,
            arg_signature: None,
        }
    }

    pub fn from_step(step: &StepInstance, abstraction: Abstraction) -> Self {
        StateKey {
            kind: step.kind,
            arg_signature: match abstraction {
                Abstraction::Kind => None,
                Abstraction::KindArgs => Some(step.canonical_args()),
            },
        }
    }

    pub fn signature(&self) -> &[String] {
        self.arg_signature.as_deref().unwrap_or(&[])
    }
}

impl fmt::Display for StateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.arg_signature {
            None => write!(f, "{}", self.kind),
            Some(args) => write!(f, "{}({})", self.kind, args.join(", ")),
        }
    }
}

/// A Markov chain state: the synthetic START and END markers or a step.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "StateRepr", into = "StateRepr")]
pub enum State {
    Start,
    Step(StateKey),
    End,
}

impl State {
    pub fn key(&self) -> Option<&StateKey> {
        match self {
            State::Step(k) => Some(k),
            _ => None,
        }
    }

    pub fn kind(&self) -> Option<StepKind> {
        self.key().map(|k| k.kind)
    }
}

impl From<StateKey> for State {
    fn from(k: StateKey) -> Self {
        State::Step(k)
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            State::Start => f.write_str("START"),
            State::End => f.write_str("END"),
            State::Step(k) => k.fmt(f),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum StateRepr {
    Marker(String),
    Step(StateKey),
}

impl TryFrom<StateRepr> for State {
    type Error = String;

    fn try_from(r: StateRepr) -> Result<Self, String> {
        match r {
            StateRepr::Marker(m) if m == "START" => Ok(State::Start),
            StateRepr::Marker(m) if m == "END" => Ok(State::End),
            StateRepr::Marker(m) => Err(format!("unknown state marker {m:?}")),
            StateRepr::Step(k) => Ok(State::Step(k)),
        }
    }
}

impl From<State> for StateRepr {
    fn from(s: State) -> Self {
        match s {
            State::Start => StateRepr::Marker("START".into()),
            State::End => StateRepr::Marker("END".into()),
            State::Step(k) => StateRepr::Step(k),
        }
    }
}

//! Step vocabulary: the closed set of toolbox steps, their parameter slots,
//! and parameterized step instances.

use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::UnknownToken;

/// One of the 17 toolbox steps. Declaration order is the toolbox order and
/// is used for deterministic tie-breaking throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StepKind {
    MoveTo,
    Find,
    Grab,
    Open,
    Close,
    Deliver,
    Receive,
    Place,
    Approach,
    Say,
    Tell,
    Ask,
    Activate,
    Deactivate,
    Vacuum,
    Wipe,
    Wait,
}

/// Role of a step parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ParamSlot {
    Target,
    Item,
    Container,
    Person,
    ExactSpeech,
    Story,
    Device,
    Room,
    Surface,
}

impl StepKind {
    pub const ALL: [StepKind; 17] = [
        StepKind::MoveTo,
        StepKind::Find,
        StepKind::Grab,
        StepKind::Open,
        StepKind::Close,
        StepKind::Deliver,
        StepKind::Receive,
        StepKind::Place,
        StepKind::Approach,
        StepKind::Say,
        StepKind::Tell,
        StepKind::Ask,
        StepKind::Activate,
        StepKind::Deactivate,
        StepKind::Vacuum,
        StepKind::Wipe,
        StepKind::Wait,
    ];

    pub const COUNT: usize = Self::ALL.len();

    pub fn as_str(self) -> &'static str {
        match self {
            StepKind::MoveTo => "move_to",
            StepKind::Find => "find",
            StepKind::Grab => "grab",
            StepKind::Open => "open",
            StepKind::Close => "close",
            StepKind::Deliver => "deliver",
            StepKind::Receive => "receive",
            StepKind::Place => "place",
            StepKind::Approach => "approach",
            StepKind::Say => "say",
            StepKind::Tell => "tell",
            StepKind::Ask => "ask",
            StepKind::Activate => "activate",
            StepKind::Deactivate => "deactivate",
            StepKind::Vacuum => "vacuum",
            StepKind::Wipe => "wipe",
            StepKind::Wait => "wait",
        }
    }

    /// Position in toolbox order.
    pub fn ordinal(self) -> usize {
        self as usize
    }

    /// Toolbox tooltip text.
    pub fn description(self) -> &'static str {
        match self {
            StepKind::MoveTo => "move to a target",
            StepKind::Find => "search for a target",
            StepKind::Grab => "grab an item",
            StepKind::Open => "open a container",
            StepKind::Close => "close a container",
            StepKind::Deliver => "bring an item to a target",
            StepKind::Receive => "receive an item from someone",
            StepKind::Place => "place an item in a container",
            StepKind::Approach => "approach a person",
            StepKind::Say => "say the exact speech as specified",
            StepKind::Tell => "tell a story",
            StepKind::Ask => "ask a question using exact speech",
            StepKind::Activate => "turn a device on",
            StepKind::Deactivate => "turn a device off",
            StepKind::Vacuum => "clean a room by vacuuming it",
            StepKind::Wipe => "clean a surface by wiping it",
            StepKind::Wait => "wait for something to happen",
        }
    }
}

/// Ordered parameter slots for a step kind.
pub fn step_schema(kind: StepKind) -> &'static [ParamSlot] {
    use ParamSlot::*;
    match kind {
        StepKind::MoveTo | StepKind::Find => &[Target],
        StepKind::Grab | StepKind::Receive => &[Item],
        StepKind::Open | StepKind::Close => &[Container],
        StepKind::Deliver => &[Item, Target],
        StepKind::Place => &[Item, Container],
        StepKind::Approach => &[Person],
        StepKind::Say | StepKind::Ask => &[ExactSpeech],
        StepKind::Tell => &[Story],
        StepKind::Activate | StepKind::Deactivate => &[Device],
        StepKind::Vacuum => &[Room],
        StepKind::Wipe => &[Surface],
        StepKind::Wait => &[],
    }
}

impl ParamSlot {
    pub const ALL: [ParamSlot; 9] = [
        ParamSlot::Target,
        ParamSlot::Item,
        ParamSlot::Container,
        ParamSlot::Person,
        ParamSlot::ExactSpeech,
        ParamSlot::Story,
        ParamSlot::Device,
        ParamSlot::Room,
        ParamSlot::Surface,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ParamSlot::Target => "target",
            ParamSlot::Item => "item",
            ParamSlot::Container => "container",
            ParamSlot::Person => "person",
            ParamSlot::ExactSpeech => "exact_speech",
            ParamSlot::Story => "story",
            ParamSlot::Device => "device",
            ParamSlot::Room => "room",
            ParamSlot::Surface => "surface",
        }
    }
}

impl FromStr for StepKind {
    type Err = UnknownToken;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StepKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| UnknownToken::new("step kind", s))
    }
}

impl FromStr for ParamSlot {
    type Err = UnknownToken;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ParamSlot::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| UnknownToken::new("parameter slot", s))
    }
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for ParamSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

macro_rules! serde_via_str {
    ($ty:ty) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(self.as_str())
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

serde_via_str!(StepKind);
serde_via_str!(ParamSlot);

/// Lowercase, trim, and collapse internal whitespace runs to one space.
pub fn canonicalize(text: &str) -> String {
    text.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// A single parameterized step on a task timeline.
///
/// Argument keys are kept as raw strings so that a structurally parsed but
/// schema-violating step can still be represented and reported on by
/// validation. Values are the free-response text as entered.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepInstance {
    pub kind: StepKind,
    #[serde(default)]
    pub args: IndexMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

impl StepInstance {
    /// Builds a step from slot values given in schema order. Extra values
    /// are dropped and missing ones are left out.
    pub fn new<S: Into<String>>(kind: StepKind, values: impl IntoIterator<Item = S>) -> Self {
        let args = step_schema(kind)
            .iter()
            .zip(values)
            .map(|(slot, v)| (slot.as_str().to_owned(), v.into()))
            .collect();
        StepInstance {
            kind,
            args,
            description: None,
        }
    }

    pub fn with_description(mut self, description: impl Into<String>) -> Self {
        self.description = Some(description.into());
        self
    }

    pub fn arg(&self, slot: ParamSlot) -> Option<&str> {
        self.args.get(slot.as_str()).map(String::as_str)
    }

    /// Canonical argument values in stored order.
    pub fn canonical_args(&self) -> Vec<String> {
        self.args.values().map(|v| canonicalize(v)).collect()
    }

    /// True when `description` carries any non-whitespace text.
    pub fn has_description(&self) -> bool {
        self.description
            .as_deref()
            .is_some_and(|d| !d.trim().is_empty())
    }

    /// Same step with argument values canonicalized and the description dropped.
    pub fn canonical(&self) -> StepInstance {
        StepInstance {
            kind: self.kind,
            args: self
                .args
                .iter()
                .map(|(k, v)| (k.clone(), canonicalize(v)))
                .collect(),
            description: None,
        }
    }

    /// Reorders recognized slots into schema order, keeping unrecognized
    /// keys afterwards in their original order.
    pub(crate) fn normalize_arg_order(&mut self) {
        let schema = step_schema(self.kind);
        let mut ordered = IndexMap::with_capacity(self.args.len());
        for slot in schema {
            if let Some(v) = self.args.shift_remove(slot.as_str()) {
                ordered.insert(slot.as_str().to_owned(), v);
            }
        }
        ordered.extend(self.args.drain(..));
        self.args = ordered;
    }
}

impl fmt::Display for StepInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.kind)?;
        for (i, (k, v)) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}: {v}")?;
        }
        f.write_str(")")
    }
}

//! Traces and their canonical JSON form.

use chrono::{DateTime, SecondsFormat, Utc};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::category::TaskCategory;
use crate::error::{SchemaError, SchemaErrorKind};
use crate::step::{StepInstance, StepKind};

/// An ordered sequence of steps recorded for one task prompt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTrace")]
pub struct Trace {
    pub id: String,
    pub category: TaskCategory,
    pub worker_id: String,
    #[serde(serialize_with = "serialize_timestamp")]
    pub created_at: DateTime<Utc>,
    pub steps: Vec<StepInstance>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub feedback: Option<String>,
}

fn serialize_timestamp<S: Serializer>(ts: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_timestamp(ts))
}

/// ISO-8601 UTC with a `Z` suffix; sub-second digits only when present.
pub fn format_timestamp(ts: &DateTime<Utc>) -> String {
    ts.to_rfc3339_opts(SecondsFormat::AutoSi, true)
}

impl Trace {
    pub fn new(
        id: impl Into<String>,
        category: TaskCategory,
        worker_id: impl Into<String>,
        steps: Vec<StepInstance>,
    ) -> Self {
        Trace {
            id: id.into(),
            category,
            worker_id: worker_id.into(),
            created_at: DateTime::<Utc>::UNIX_EPOCH,
            steps,
            feedback: None,
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn kinds(&self) -> Vec<StepKind> {
        self.steps.iter().map(|s| s.kind).collect()
    }
}

/// Structural form of a trace document, before closed vocabularies are checked.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawTrace {
    id: String,
    category: String,
    worker_id: String,
    created_at: String,
    steps: Vec<RawStep>,
    #[serde(default)]
    feedback: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStep {
    kind: String,
    #[serde(default)]
    args: IndexMap<String, String>,
    #[serde(default)]
    description: Option<String>,
}

fn steps_from_raw(raw: Vec<RawStep>, prefix: &str) -> Result<Vec<StepInstance>, SchemaError> {
    raw.into_iter()
        .enumerate()
        .map(|(i, s)| {
            let kind = s.kind.parse().map_err(|e| SchemaError {
                kind: SchemaErrorKind::UnknownKind,
                path: format!("{prefix}[{i}].kind"),
                message: format!("{e}"),
            })?;
            let mut step = StepInstance {
                kind,
                args: s.args,
                description: s.description,
            };
            step.normalize_arg_order();
            Ok(step)
        })
        .collect()
}

fn classify(e: serde_path_to_error::Error<serde_json::Error>, prefix: &str) -> SchemaError {
    let path = match e.path().to_string() {
        p if p == "." => prefix.to_owned(),
        p if prefix.is_empty() => p,
        p if p.starts_with('[') => format!("{prefix}{p}"),
        p => format!("{prefix}.{p}"),
    };
    let inner = e.into_inner();
    let kind = if inner.is_syntax() || inner.is_eof() {
        SchemaErrorKind::Syntax
    } else {
        SchemaErrorKind::Structure
    };
    SchemaError {
        kind,
        path,
        message: inner.to_string(),
    }
}

impl TryFrom<RawTrace> for Trace {
    type Error = SchemaError;

    fn try_from(raw: RawTrace) -> Result<Self, SchemaError> {
        let category = raw.category.parse().map_err(|e| SchemaError {
            kind: SchemaErrorKind::UnknownCategory,
            path: "category".into(),
            message: format!("{e}"),
        })?;
        let created_at = DateTime::parse_from_rfc3339(&raw.created_at)
            .map_err(|e| SchemaError {
                kind: SchemaErrorKind::BadTimestamp,
                path: "created_at".into(),
                message: format!("{e}: {:?}", raw.created_at),
            })?
            .with_timezone(&Utc);
        let steps = steps_from_raw(raw.steps, "steps")?;
        Ok(Trace {
            id: raw.id,
            category,
            worker_id: raw.worker_id,
            created_at,
            steps,
            feedback: raw.feedback,
        })
    }
}

/// Parses one trace document, reporting the JSON path of the first problem.
///
/// Argument keys are checked against the step schema by validation, not
/// here; a document with a missing or unknown slot still parses.
pub fn parse_trace(document: &str) -> Result<Trace, SchemaError> {
    let de = &mut serde_json::Deserializer::from_str(document);
    let raw: RawTrace = serde_path_to_error::deserialize(de).map_err(|e| classify(e, ""))?;
    Trace::try_from(raw)
}

/// Parses a JSON array of steps (a hint or partial timeline) with the same
/// checks and error paths as the steps of a trace document.
pub fn parse_steps(document: &str) -> Result<Vec<StepInstance>, SchemaError> {
    let de = &mut serde_json::Deserializer::from_str(document);
    let raw: Vec<RawStep> = serde_path_to_error::deserialize(de).map_err(|e| classify(e, ""))?;
    steps_from_raw(raw, "")
}

/// As [`parse_steps`], for an already-decoded JSON value found at `path`
/// inside a larger document.
pub fn steps_from_value(value: serde_json::Value, path: &str) -> Result<Vec<StepInstance>, SchemaError> {
    let raw: Vec<RawStep> = serde_path_to_error::deserialize(value).map_err(|e| classify(e, path))?;
    steps_from_raw(raw, path)
}

/// Canonical single-line serialization: fixed key order, UTF-8, no
/// insignificant whitespace.
pub fn serialize_trace(trace: &Trace) -> String {
    serde_json::to_string(trace).expect("trace serialization is infallible")
}

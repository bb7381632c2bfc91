//! Approval rules for a single trace.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{SchemaError, SchemaErrorKind};
use crate::step::{canonicalize, step_schema, ParamSlot, StepInstance};
use crate::trace::Trace;

/// Minimum number of steps an approved trace must contain.
pub const MIN_APPROVED_STEPS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RuleId {
    MinSteps,
    BadStepArgs,
    UnknownKind,
    UnknownCategory,
    EmptyArg,
    /// Advisory reviewer flag; never affects the verdict.
    RelevanceFlag,
}

impl RuleId {
    pub fn is_advisory(self) -> bool {
        matches!(self, RuleId::RelevanceFlag)
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RuleId::MinSteps => "MIN_STEPS",
            RuleId::BadStepArgs => "BAD_STEP_ARGS",
            RuleId::UnknownKind => "UNKNOWN_KIND",
            RuleId::UnknownCategory => "UNKNOWN_CATEGORY",
            RuleId::EmptyArg => "EMPTY_ARG",
            RuleId::RelevanceFlag => "RELEVANCE_FLAG",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Approved,
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: RuleId,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub verdict: Verdict,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        let verdict = if violations.iter().all(|v| v.rule.is_advisory()) {
            Verdict::Approved
        } else {
            Verdict::Rejected
        };
        ValidationReport {
            verdict,
            violations,
        }
    }

    pub fn is_approved(&self) -> bool {
        self.verdict == Verdict::Approved
    }

    pub fn rules(&self) -> Vec<RuleId> {
        self.violations.iter().map(|v| v.rule).collect()
    }

    /// Attaches an advisory relevance flag. The verdict is unchanged.
    pub fn flag_relevance(&mut self, message: impl Into<String>) {
        self.violations.push(Violation {
            rule: RuleId::RelevanceFlag,
            message: message.into(),
        });
    }

    /// Report for a document that could not be turned into a trace.
    pub fn from_schema_error(err: &SchemaError) -> Self {
        let rule = match err.kind {
            SchemaErrorKind::UnknownKind => RuleId::UnknownKind,
            SchemaErrorKind::UnknownCategory => RuleId::UnknownCategory,
            _ => RuleId::BadStepArgs,
        };
        ValidationReport::from_violations(vec![Violation {
            rule,
            message: err.to_string(),
        }])
    }
}

fn check_step(index: usize, step: &StepInstance, out: &mut Vec<Violation>) {
    let schema = step_schema(step.kind);
    let expected: Vec<&str> = schema.iter().map(|s| s.as_str()).collect();
    let actual: Vec<&str> = step.args.keys().map(String::as_str).collect();

    if actual != expected {
        let missing: Vec<&str> = expected
            .iter()
            .filter(|k| !actual.contains(k))
            .copied()
            .collect();
        let extra: Vec<&str> = actual
            .iter()
            .filter(|k| !expected.contains(k))
            .copied()
            .collect();
        let message = if missing.is_empty() && extra.is_empty() {
            format!(
                "steps[{index}] ({}): arguments out of order, expected [{}]",
                step.kind,
                expected.join(", ")
            )
        } else {
            format!(
                "steps[{index}] ({}): missing [{}], unexpected [{}]",
                step.kind,
                missing.join(", "),
                extra.join(", ")
            )
        };
        out.push(Violation {
            rule: RuleId::BadStepArgs,
            message,
        });
    }

    for slot in schema {
        if let Some(value) = step.arg(*slot) {
            if canonicalize(value).is_empty() {
                out.push(Violation {
                    rule: RuleId::EmptyArg,
                    message: format!("steps[{index}].args.{}: empty", ParamSlot::as_str(*slot)),
                });
            }
        }
    }
}

/// Checks a structurally parsed trace against the approval rules.
pub fn validate_trace(trace: &Trace) -> ValidationReport {
    let mut violations = Vec::new();
    if trace.steps.len() < MIN_APPROVED_STEPS {
        violations.push(Violation {
            rule: RuleId::MinSteps,
            message: format!(
                "trace has {} step(s); at least {MIN_APPROVED_STEPS} required",
                trace.steps.len()
            ),
        });
    }
    for (i, step) in trace.steps.iter().enumerate() {
        check_step(i, step, &mut violations);
    }
    ValidationReport::from_violations(violations)
}

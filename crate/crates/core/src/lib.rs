//! Task traces for service-robot task authoring.
//!
//! A [`Trace`] is an ordered list of parameterized [`StepInstance`]s drawn
//! from a closed 17-step toolbox, recorded against one of 18 task
//! categories. This crate validates and screens traces, summarizes
//! datasets, and turns traces into task models that propose next steps,
//! missing steps, foreach loops, and branch points for a partial hint.

pub mod category;
pub mod dataset;
pub mod error;
pub mod model;
pub mod step;
pub mod trace;
pub mod validate;

pub use category::{Catalog, CategoryInfo, LayoutHint, TaskCategory};
pub use dataset::{dataset_stats, screen_dataset, Dataset, ScreenResult, ScreeningRule, StatsSummary};
pub use error::{DatasetError, ModelError, SchemaError, SchemaErrorKind};
pub use model::{MarkovModel, Suggestion, SuggestionKind};
pub use step::{canonicalize, step_schema, ParamSlot, StepInstance, StepKind};
pub use trace::{parse_steps, parse_trace, serialize_trace, steps_from_value, Trace};
pub use validate::{validate_trace, RuleId, ValidationReport, Verdict};

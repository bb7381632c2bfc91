use super::align::{align, AlignCosts, EditOp};
use super::suggestion::{sort_suggestions, Payload, Suggestion, SuggestionKind};
use crate::step::StepInstance;
use crate::trace::Trace;

/// Aligns the hint against every trace, keeps the cheapest (ties go to the
/// smallest trace id), and proposes that alignment's insertions as missing
/// steps. Positions are hint indices to insert before; every proposal
/// scores `1 / (1 + cost)`.
pub fn diff_complete(hint: &[StepInstance], traces: &[Trace], costs: &AlignCosts) -> Vec<Suggestion> {
    let best = traces
        .iter()
        .map(|t| (t, align(hint, &t.steps, costs)))
        .min_by(|(a, x), (b, y)| x.cost.total_cmp(&y.cost).then_with(|| a.id.cmp(&b.id)));
    let Some((trace, alignment)) = best else {
        return Vec::new();
    };

    let score = 1.0 / (1.0 + alignment.cost);
    let mut consumed = 0;
    let mut out = Vec::new();
    for op in &alignment.ops {
        match *op {
            EditOp::Match { .. } | EditOp::Substitute { .. } | EditOp::Delete { .. } => consumed += 1,
            EditOp::Insert { target } => out.push(Suggestion {
                kind: SuggestionKind::MissingStep,
                payload: Payload::Step {
                    step: trace.steps[target].canonical(),
                    position: consumed,
                },
                score,
                provenance: format!("trace:{}", trace.id),
            }),
        }
    }
    sort_suggestions(&mut out);
    out
}

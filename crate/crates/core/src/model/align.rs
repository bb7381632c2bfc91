//! Minimum-cost edit scripts between step sequences.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::step::StepInstance;

/// Per-operation costs. `matched` applies to steps with equal kind and equal
/// canonical arguments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignCosts {
    pub matched: f64,
    /// Same kind, different arguments.
    pub same_kind_substitute: f64,
    /// Different kinds.
    pub substitute: f64,
    pub insert: f64,
    pub delete: f64,
}

impl Default for AlignCosts {
    fn default() -> Self {
        AlignCosts {
            matched: 0.0,
            same_kind_substitute: 0.5,
            substitute: 1.0,
            insert: 1.0,
            delete: 1.0,
        }
    }
}

impl AlignCosts {
    pub fn validate(&self) -> Result<(), ModelError> {
        let all = [
            self.matched,
            self.same_kind_substitute,
            self.substitute,
            self.insert,
            self.delete,
        ];
        if all.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(ModelError::BadCosts("costs must be finite and non-negative".into()));
        }
        if self.matched > self.same_kind_substitute || self.same_kind_substitute > self.substitute {
            return Err(ModelError::BadCosts(
                "require match <= same-kind substitute <= substitute".into(),
            ));
        }
        Ok(())
    }

    /// Cost of aligning `a` against `b`, and whether that is a match.
    pub fn pair(&self, a: &StepInstance, b: &StepInstance) -> (f64, bool) {
        if a.kind != b.kind {
            (self.substitute, false)
        } else if a.canonical_args() == b.canonical_args() {
            (self.matched, true)
        } else {
            (self.same_kind_substitute, false)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum EditOp {
    Match { source: usize, target: usize },
    Substitute { source: usize, target: usize },
    /// Insert `target[target]`.
    Insert { target: usize },
    /// Drop `source[source]`.
    Delete { source: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alignment {
    pub ops: Vec<EditOp>,
    pub cost: f64,
}

impl Alignment {
    /// Applies the script to `source`, producing the target sequence.
    pub fn replay(&self, source: &[StepInstance], target: &[StepInstance]) -> Vec<StepInstance> {
        self.ops
            .iter()
            .filter_map(|op| match *op {
                EditOp::Match { source: i, .. } => Some(source[i].clone()),
                EditOp::Substitute { target: j, .. } | EditOp::Insert { target: j } => {
                    Some(target[j].clone())
                }
                EditOp::Delete { .. } => None,
            })
            .collect()
    }
}

#[derive(Clone, Copy)]
enum Back {
    Diag,
    Up,
    Left,
}

/// Dynamic-programming alignment of `source` onto `target`.
///
/// On equal cost the traceback prefers the diagonal (match or substitute),
/// then delete, then insert.
pub fn align(source: &[StepInstance], target: &[StepInstance], costs: &AlignCosts) -> Alignment {
    let (n, m) = (source.len(), target.len());
    let width = m + 1;
    let mut dist = vec![0.0f64; (n + 1) * width];
    let mut back = vec![Back::Diag; (n + 1) * width];

    for i in 1..=n {
        dist[i * width] = dist[(i - 1) * width] + costs.delete;
        back[i * width] = Back::Up;
    }
    for j in 1..=m {
        dist[j] = dist[j - 1] + costs.insert;
        back[j] = Back::Left;
    }
    for i in 1..=n {
        for j in 1..=m {
            let diag = dist[(i - 1) * width + j - 1] + costs.pair(&source[i - 1], &target[j - 1]).0;
            let up = dist[(i - 1) * width + j] + costs.delete;
            let left = dist[i * width + j - 1] + costs.insert;
            let (d, b) = if diag <= up && diag <= left {
                (diag, Back::Diag)
            } else if up <= left {
                (up, Back::Up)
            } else {
                (left, Back::Left)
            };
            dist[i * width + j] = d;
            back[i * width + j] = b;
        }
    }

    let mut ops = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        match back[i * width + j] {
            Back::Diag => {
                let (s, t) = (i - 1, j - 1);
                ops.push(if costs.pair(&source[s], &target[t]).1 {
                    EditOp::Match { source: s, target: t }
                } else {
                    EditOp::Substitute { source: s, target: t }
                });
                i -= 1;
                j -= 1;
            }
            Back::Up => {
                ops.push(EditOp::Delete { source: i - 1 });
                i -= 1;
            }
            Back::Left => {
                ops.push(EditOp::Insert { target: j - 1 });
                j -= 1;
            }
        }
    }
    ops.reverse();
    Alignment {
        ops,
        cost: dist[n * width + m],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::f1;
    use crate::StepKind;

    #[test]
    fn identity_alignment() {
        let t = &f1()[0].steps;
        let a = align(t, t, &AlignCosts::default());
        assert_eq!(a.cost, 0.0);
        assert!(a.ops.iter().all(|op| matches!(op, EditOp::Match { .. })));
    }

    #[test]
    fn leading_insert() {
        let src = [StepInstance::new(StepKind::Grab, ["mail"])];
        let tgt = [
            StepInstance::new(StepKind::MoveTo, ["front door"]),
            StepInstance::new(StepKind::Grab, ["Mail"]),
        ];
        let a = align(&src, &tgt, &AlignCosts::default());
        assert_eq!(a.cost, 1.0);
        assert_eq!(
            a.ops,
            [EditOp::Insert { target: 0 }, EditOp::Match { source: 0, target: 1 }]
        );
        let replayed: Vec<_> = a.replay(&src, &tgt).iter().map(StepInstance::canonical).collect();
        let canonical: Vec<_> = tgt.iter().map(StepInstance::canonical).collect();
        assert_eq!(replayed, canonical);
    }

    #[test]
    fn same_kind_substitution_is_cheaper() {
        let ts = f1();
        let a = align(&ts[0].steps, &ts[1].steps, &AlignCosts::default());
        assert_eq!(a.cost, 0.5);
        assert!(matches!(a.ops[2], EditOp::Substitute { source: 2, target: 2 }));
    }

    #[test]
    fn tie_prefers_substitute_over_indels() {
        // one substitution (1.0) ties with delete+insert only when indels are 0.5
        let costs = AlignCosts { insert: 0.5, delete: 0.5, ..AlignCosts::default() };
        let src = [StepInstance::new(StepKind::Say, ["a"])];
        let tgt = [StepInstance::new(StepKind::Ask, ["b"])];
        let a = align(&src, &tgt, &costs);
        assert_eq!(a.cost, 1.0);
        assert_eq!(a.ops, [EditOp::Substitute { source: 0, target: 0 }]);
    }

    #[test]
    fn tie_prefers_delete_over_insert() {
        let costs = AlignCosts { substitute: 5.0, same_kind_substitute: 5.0, ..AlignCosts::default() };
        let src = [StepInstance::new(StepKind::Say, ["a"])];
        let tgt = [StepInstance::new(StepKind::Ask, ["b"])];
        let a = align(&src, &tgt, &costs);
        assert_eq!(a.ops, [EditOp::Insert { target: 0 }, EditOp::Delete { source: 0 }]);
    }

    #[test]
    fn empty_sides() {
        let ts = f1();
        let a = align(&[], &ts[0].steps, &AlignCosts::default());
        assert_eq!(a.cost, 3.0);
        assert_eq!(a.ops.len(), 3);
        let b = align(&ts[0].steps, &[], &AlignCosts::default());
        assert!(b.ops.iter().all(|op| matches!(op, EditOp::Delete { .. })));
        assert_eq!(align(&[], &[], &AlignCosts::default()).ops, []);
    }

    #[test]
    fn cost_validation() {
        assert!(AlignCosts::default().validate().is_ok());
        let bad = AlignCosts { same_kind_substitute: 2.0, ..AlignCosts::default() };
        assert!(bad.validate().is_err());
        let neg = AlignCosts { insert: -1.0, ..AlignCosts::default() };
        assert!(neg.validate().is_err());
    }
}

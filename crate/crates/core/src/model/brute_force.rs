//! Exhaustive reference solver. Deliberately simple: it enumerates the full
//! assignment grid, filters by exact constraint satisfaction, and keeps
//! every optimum. It is the oracle the compilation pipeline is checked
//! against, so it shares no code with the compiler.

use std::collections::BTreeMap;

use crate::pbf::VarId;

use super::{Constraint, Model, ModelError, Relation, Sense, VarKind};

/// Co-optimal assignments in lexicographic order (variables sorted by id,
/// values ascending), plus the optimal objective value. `best_value` is
/// `None` when no assignment satisfies the constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceSolution {
    pub optima: Vec<BTreeMap<VarId, f64>>,
    pub best_value: Option<f64>,
}

impl BruteForceSolution {
    pub fn is_feasible(&self) -> bool {
        self.best_value.is_some()
    }
}

/// Tolerance used only to collect ties on the objective; constraint
/// satisfaction is exact.
const TIE_TOLERANCE: f64 = 1e-9;

pub fn brute_force_solve(m: &Model, cap: u128) -> Result<BruteForceSolution, ModelError> {
    m.ensure_valid()?;

    let mut variables = m.variables.clone();
    variables.sort_by_key(|v| v.id);
    let mut sizes: Vec<u64> = Vec::with_capacity(variables.len());
    let mut space: u128 = 1;
    for v in &variables {
        let size = match v.kind {
            VarKind::Binary => 2,
            VarKind::Integer => (v.upper - v.lower) as u64 + 1,
            VarKind::Continuous => return Err(ModelError::ContinuousUnsupported(v.id)),
        };
        sizes.push(size);
        space = space.saturating_mul(u128::from(size));
        if space > cap {
            return Err(ModelError::SearchSpaceExceeded { size: space, cap });
        }
    }

    let satisfied = |assignment: &BTreeMap<VarId, f64>| -> bool {
        m.constraints.iter().all(|constraint| match constraint {
            Constraint::Algebraic { lhs, relation, rhs } => {
                let value = lhs.evaluate(assignment).expect("validated model");
                match relation {
                    Relation::Eq => value == *rhs,
                    Relation::Le => value <= *rhs,
                    Relation::Ge => value >= *rhs,
                }
            }
            Constraint::Sos1 { members } => {
                members.iter().filter(|&&v| assignment[&v] != 0.0).count() <= 1
            }
        })
    };

    let better = |candidate: f64, best: f64| -> bool {
        match m.sense {
            Sense::Min => candidate < best,
            Sense::Max => candidate > best,
        }
    };

    // Pass 1: find the optimum. Pass 2: collect every assignment within the
    // tie tolerance, in enumeration (lexicographic) order.
    let mut best: Option<f64> = None;
    for_each_assignment(&variables, &sizes, |assignment| {
        if satisfied(assignment) {
            let value = m.objective.evaluate(assignment).expect("validated model");
            if best.map_or(true, |b| better(value, b)) {
                best = Some(value);
            }
        }
    });

    let Some(best_value) = best else {
        return Ok(BruteForceSolution {
            optima: Vec::new(),
            best_value: None,
        });
    };

    let tolerance = TIE_TOLERANCE * best_value.abs().max(1.0);
    let mut optima = Vec::new();
    for_each_assignment(&variables, &sizes, |assignment| {
        if satisfied(assignment) {
            let value = m.objective.evaluate(assignment).expect("validated model");
            if (value - best_value).abs() <= tolerance {
                optima.push(assignment.clone());
            }
        }
    });

    Ok(BruteForceSolution {
        optima,
        best_value: Some(best_value),
    })
}

/// Walks the assignment grid in lexicographic order: variables ascending by
/// id, each ranging from its lower bound upward.
fn for_each_assignment<F>(
    variables: &[super::Variable],
    sizes: &[u64],
    mut visit: F,
) where
    F: FnMut(&BTreeMap<VarId, f64>),
{
    let mut counters = vec![0u64; variables.len()];
    let mut assignment: BTreeMap<VarId, f64> =
        variables.iter().map(|v| (v.id, v.lower)).collect();
    loop {
        visit(&assignment);
        // Odometer increment, least significant position last so the
        // visiting order is lexicographic over (v_0, v_1, ...).
        let mut position = variables.len();
        loop {
            if position == 0 {
                return;
            }
            position -= 1;
            counters[position] += 1;
            if counters[position] < sizes[position] {
                let v = &variables[position];
                assignment.insert(v.id, v.lower + counters[position] as f64);
                break;
            }
            counters[position] = 0;
            let v = &variables[position];
            assignment.insert(v.id, v.lower);
        }
    }
}

//! Constraint penalization: each constraint becomes a polynomial that is
//! zero exactly on its feasible set and positive elsewhere, so that adding
//! `rho * penalty` to the objective enforces it in the unconstrained
//! reformulation. Inequalities gain an integer slack witness first.

use crate::encoder::{IdAllocator, VariableEncoding};
use crate::model::Relation;
use crate::pbf::{PseudoBooleanFunction as Pbf, VarId};

use super::{encode_integer, CompileError, EncodingSpec};

/// How the penalty factor for one constraint is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PenaltyRule {
    /// One plus the sum of absolute objective coefficients: an upper bound
    /// on any objective improvement a violation could buy, provided the
    /// smallest nonzero penalty is at least one (true for integer-valued
    /// constraint data).
    Auto,
    Fixed(f64),
}

/// Penalty factor for a constraint given the (already encoded) objective.
pub fn estimate_penalty_factor(objective: &Pbf, rule: PenaltyRule) -> Result<f64, CompileError> {
    match rule {
        PenaltyRule::Auto => {
            let swing: f64 = objective
                .terms()
                .filter(|(key, _)| !key.is_empty())
                .map(|(_, c)| c.abs())
                .sum();
            Ok(swing + 1.0)
        }
        PenaltyRule::Fixed(rho) => {
            if rho > 0.0 {
                Ok(rho)
            } else {
                Err(CompileError::NonPositivePenalty(rho))
            }
        }
    }
}

/// Lower bound of a polynomial over the binary box: every non-constant term
/// contributes `min(0, c)`. Exact for affine polynomials.
fn box_lower_bound(g: &Pbf) -> f64 {
    g.terms()
        .map(|(key, c)| if key.is_empty() { c } else { c.min(0.0) })
        .sum()
}

/// Equality penalty for an affine constraint `g = 0`: the square `g^2`,
/// zero exactly on the feasible set.
pub fn penalize_linear_eq(g: &Pbf) -> Result<Pbf, CompileError> {
    if g.degree() > 1 {
        return Err(CompileError::NotAffine(g.degree()));
    }
    Ok(g.multiply(g))
}

/// Inequality penalty for an affine constraint. `g <= 0` (GE is negated
/// into this form) gains an integer slack `s` in `[0, -min g]` and becomes
/// `(g + s)^2`; minimizing over the slack vanishes exactly when the
/// constraint holds with an integer witness. Any structural penalty of the
/// slack encoding is folded in.
pub fn penalize_linear_ineq(
    g: &Pbf,
    relation: Relation,
    fresh: &mut IdAllocator,
    slack_spec: &EncodingSpec,
) -> Result<(Pbf, VariableEncoding), CompileError> {
    if g.degree() > 1 {
        return Err(CompileError::NotAffine(g.degree()));
    }
    slack_penalty(g, relation, fresh, slack_spec)
}

/// Penalty for a degree-two constraint: equalities square directly (degree
/// up to four, handed to quadratization); inequalities take the slack route
/// with bounds from interval arithmetic over the quadratic terms.
pub fn penalize_quadratic(
    g: &Pbf,
    relation: Relation,
    fresh: &mut IdAllocator,
    slack_spec: &EncodingSpec,
) -> Result<(Pbf, Option<VariableEncoding>), CompileError> {
    if g.degree() > 2 {
        return Err(CompileError::NotQuadratic(g.degree()));
    }
    match relation {
        Relation::Eq => Ok((g.multiply(g), None)),
        Relation::Le | Relation::Ge => {
            let (penalty, slack) = slack_penalty(g, relation, fresh, slack_spec)?;
            Ok((penalty, Some(slack)))
        }
    }
}

fn slack_penalty(
    g: &Pbf,
    relation: Relation,
    fresh: &mut IdAllocator,
    slack_spec: &EncodingSpec,
) -> Result<(Pbf, VariableEncoding), CompileError> {
    let normalized = match relation {
        Relation::Le => g.clone(),
        Relation::Ge => g.scaled(-1.0),
        Relation::Eq => return Err(CompileError::WrongRelation),
    };
    let lower_bound = box_lower_bound(&normalized);
    if lower_bound > 0.0 {
        return Err(CompileError::Infeasible {
            index: usize::MAX,
            min: lower_bound,
        });
    }
    if !lower_bound.is_finite() {
        return Err(CompileError::UnboundedSlack);
    }
    let slack_upper = (-lower_bound + 1e-9).floor() as i64;
    let slack_id = fresh.fresh();
    let slack = encode_integer(slack_spec, slack_id, 0, slack_upper, fresh)?;
    let shifted = Pbf::combine(1.0, &normalized, 1.0, &slack.value_polynomial());
    let mut penalty = shifted.multiply(&shifted);
    if !slack.penalty.is_zero() {
        penalty = Pbf::combine(1.0, &penalty, 1.0, &slack.penalty);
    }
    Ok((penalty, slack))
}

/// Exclusivity penalty for SOS1 over binary members: the sum of pairwise
/// products, zero iff at most one member is set.
pub fn penalize_sos1(members: &[VarId]) -> Result<Pbf, CompileError> {
    if members.is_empty() {
        return Err(CompileError::EmptySos1);
    }
    let mut sorted: Vec<VarId> = members.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut penalty = Pbf::zero();
    for (i, &a) in sorted.iter().enumerate() {
        for &b in &sorted[i + 1..] {
            penalty.add_term(&[a, b], 1.0);
        }
    }
    Ok(penalty)
}

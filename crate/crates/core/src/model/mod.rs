//! Constrained mixed-integer quadratic models: typed variables, a
//! degree-<=2 multilinear objective, and a list of relational or SOS1
//! constraints. Also home to the benchmark-problem generators, the random
//! instance generator and the exhaustive reference solver.

mod brute_force;
mod generators;
mod json;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::pbf::{PseudoBooleanFunction as Pbf, VarId};

pub use brute_force::{brute_force_solve, BruteForceSolution};
pub use generators::{npp_model, random_qubo, tsp_model};
pub use json::{read_model, write_model};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("a TSP needs at least 2 cities, got {0}")]
    TspTooSmall(usize),
    #[error("distance matrix must be square: row {row} has {found} entries, expected {expected}")]
    NonSquareMatrix {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("distances must be finite and non-negative; entry ({i}, {j}) is {value}")]
    BadDistance { i: usize, j: usize, value: f64 },
    #[error("a number-partitioning model needs at least one weight")]
    EmptyWeights,
    #[error("weight {index} is not finite")]
    BadWeight { index: usize },
    #[error("density must lie in (0, 1], got {0}")]
    InvalidDensity(f64),
    #[error("coefficient range is empty: {lo} > {hi}")]
    EmptyCoefficientRange { lo: f64, hi: f64 },
    #[error("instance needs at least one variable")]
    EmptyInstance,
    #[error("search space of {size} assignments exceeds the cap of {cap}")]
    SearchSpaceExceeded { size: u128, cap: u128 },
    #[error("variable {0} is continuous; exhaustive enumeration covers only binary and integer variables")]
    ContinuousUnsupported(VarId),
    #[error("model failed validation: {0:?}")]
    Invalid(Vec<Diagnostic>),
    #[error("json error at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown variable kind '{0}'")]
    UnknownKind(String),
    #[error("unknown constraint relation '{0}'")]
    UnknownRelation(String),
    #[error("unknown optimization sense '{0}'")]
    UnknownSense(String),
    #[error(transparent)]
    Format(#[from] crate::formats::FormatError),
}

/// What a variable ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Integer,
    Continuous,
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarKind::Binary => write!(f, "binary"),
            VarKind::Integer => write!(f, "integer"),
            VarKind::Continuous => write!(f, "continuous"),
        }
    }
}

/// A declared decision variable with its bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub id: VarId,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
    pub name: Option<String>,
}

impl Variable {
    pub fn binary(id: VarId) -> Self {
        Self {
            id,
            kind: VarKind::Binary,
            lower: 0.0,
            upper: 1.0,
            name: None,
        }
    }

    pub fn integer(id: VarId, lower: i64, upper: i64) -> Self {
        Self {
            id,
            kind: VarKind::Integer,
            lower: lower as f64,
            upper: upper as f64,
            name: None,
        }
    }

    pub fn continuous(id: VarId, lower: f64, upper: f64) -> Self {
        Self {
            id,
            kind: VarKind::Continuous,
            lower,
            upper,
            name: None,
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }
}

/// Relational operator of an algebraic constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Eq => write!(f, "eq"),
            Relation::Le => write!(f, "le"),
            Relation::Ge => write!(f, "ge"),
        }
    }
}

/// A model constraint: either `lhs REL rhs` with a degree-<=2 left side, or
/// a special-ordered-set of type 1 (at most one member nonzero).
#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    Algebraic {
        lhs: Pbf,
        relation: Relation,
        rhs: f64,
    },
    Sos1 { members: Vec<VarId> },
}

impl Constraint {
    pub fn eq(lhs: Pbf, rhs: f64) -> Self {
        Constraint::Algebraic {
            lhs,
            relation: Relation::Eq,
            rhs,
        }
    }

    pub fn le(lhs: Pbf, rhs: f64) -> Self {
        Constraint::Algebraic {
            lhs,
            relation: Relation::Le,
            rhs,
        }
    }

    pub fn ge(lhs: Pbf, rhs: f64) -> Self {
        Constraint::Algebraic {
            lhs,
            relation: Relation::Ge,
            rhs,
        }
    }

    pub fn sos1(members: Vec<VarId>) -> Self {
        Constraint::Sos1 { members }
    }
}

/// Optimization sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sense::Min => write!(f, "min"),
            Sense::Max => write!(f, "max"),
        }
    }
}

/// The model IR the compiler consumes. Structure is open; `validate` is the
/// gate every consumer runs first.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub variables: Vec<Variable>,
    pub objective: Pbf,
    pub sense: Sense,
    pub constraints: Vec<Constraint>,
    pub metadata: BTreeMap<String, String>,
}

impl Model {
    pub fn new(sense: Sense) -> Self {
        Self {
            variables: Vec::new(),
            objective: Pbf::zero(),
            sense,
            constraints: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn variable(&self, id: VarId) -> Option<&Variable> {
        self.variables.iter().find(|v| v.id == id)
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    /// Structured diagnostics; an empty list means the model is well formed.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diagnostics = Vec::new();
        let mut seen = BTreeSet::new();
        for v in &self.variables {
            if !seen.insert(v.id) {
                diagnostics.push(Diagnostic::DuplicateId(v.id));
            }
            if v.lower > v.upper {
                diagnostics.push(Diagnostic::EmptyBounds {
                    id: v.id,
                    lower: v.lower,
                    upper: v.upper,
                });
            }
            match v.kind {
                VarKind::Binary => {
                    if v.lower != 0.0 || v.upper != 1.0 {
                        diagnostics.push(Diagnostic::BinaryBounds(v.id));
                    }
                }
                VarKind::Integer => {
                    if !v.lower.is_finite() || !v.upper.is_finite() {
                        diagnostics.push(Diagnostic::InfiniteBounds(v.id));
                    } else if v.lower.fract() != 0.0 || v.upper.fract() != 0.0 {
                        diagnostics.push(Diagnostic::NonIntegralBounds(v.id));
                    }
                }
                VarKind::Continuous => {
                    if !v.lower.is_finite() || !v.upper.is_finite() {
                        diagnostics.push(Diagnostic::InfiniteBounds(v.id));
                    }
                }
            }
        }

        let check_polynomial = |what: Where, f: &Pbf, diagnostics: &mut Vec<Diagnostic>| {
            let degree = f.degree();
            if degree > 2 {
                diagnostics.push(Diagnostic::ExcessDegree { what, degree });
            }
            for v in f.variables() {
                if !seen.contains(&v) {
                    diagnostics.push(Diagnostic::UndeclaredVariable { what, id: v });
                }
            }
            for (key, c) in f.terms() {
                if !c.is_finite() {
                    diagnostics.push(Diagnostic::NonFiniteCoefficient {
                        what,
                        term: key.to_vec(),
                    });
                }
            }
        };

        check_polynomial(Where::Objective, &self.objective, &mut diagnostics);
        for (index, constraint) in self.constraints.iter().enumerate() {
            match constraint {
                Constraint::Algebraic { lhs, rhs, .. } => {
                    check_polynomial(Where::Constraint(index), lhs, &mut diagnostics);
                    if !rhs.is_finite() {
                        diagnostics.push(Diagnostic::NonFiniteCoefficient {
                            what: Where::Constraint(index),
                            term: Vec::new(),
                        });
                    }
                }
                Constraint::Sos1 { members } => {
                    if members.is_empty() {
                        diagnostics.push(Diagnostic::EmptySos1(index));
                    }
                    let mut member_set = BTreeSet::new();
                    for &m in members {
                        if !member_set.insert(m) {
                            diagnostics.push(Diagnostic::DuplicateSos1Member { index, id: m });
                        }
                        if !seen.contains(&m) {
                            diagnostics.push(Diagnostic::UndeclaredVariable {
                                what: Where::Constraint(index),
                                id: m,
                            });
                        }
                    }
                }
            }
        }
        diagnostics
    }

    /// Errors out with the collected diagnostics unless the model is clean.
    pub fn ensure_valid(&self) -> Result<(), ModelError> {
        let diagnostics = self.validate();
        if diagnostics.is_empty() {
            Ok(())
        } else {
            Err(ModelError::Invalid(diagnostics))
        }
    }
}

/// Location a diagnostic refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Where {
    Objective,
    Constraint(usize),
}

impl fmt::Display for Where {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Where::Objective => write!(f, "objective"),
            Where::Constraint(i) => write!(f, "constraint {i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    DuplicateId(VarId),
    EmptyBounds { id: VarId, lower: f64, upper: f64 },
    BinaryBounds(VarId),
    NonIntegralBounds(VarId),
    InfiniteBounds(VarId),
    UndeclaredVariable { what: Where, id: VarId },
    ExcessDegree { what: Where, degree: usize },
    NonFiniteCoefficient { what: Where, term: Vec<VarId> },
    EmptySos1(usize),
    DuplicateSos1Member { index: usize, id: VarId },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::DuplicateId(id) => write!(f, "duplicate variable id {id}"),
            Diagnostic::EmptyBounds { id, lower, upper } => {
                write!(f, "variable {id} has empty bounds [{lower}, {upper}]")
            }
            Diagnostic::BinaryBounds(id) => {
                write!(f, "binary variable {id} must have bounds (0, 1)")
            }
            Diagnostic::NonIntegralBounds(id) => {
                write!(f, "integer variable {id} has non-integral bounds")
            }
            Diagnostic::InfiniteBounds(id) => {
                write!(f, "variable {id} has infinite bounds")
            }
            Diagnostic::UndeclaredVariable { what, id } => {
                write!(f, "{what} mentions undeclared variable {id}")
            }
            Diagnostic::ExcessDegree { what, degree } => {
                write!(f, "{what} has degree {degree}, which exceeds the quadratic IR")
            }
            Diagnostic::NonFiniteCoefficient { what, term } => {
                write!(f, "{what} has a non-finite coefficient on term {term:?}")
            }
            Diagnostic::EmptySos1(index) => write!(f, "constraint {index}: SOS1 has no members"),
            Diagnostic::DuplicateSos1Member { index, id } => {
                write!(f, "constraint {index}: SOS1 member {id} repeated")
            }
        }
    }
}

//! The reformulation pipeline: normalize the sense, encode every variable
//! over fresh binaries, substitute, penalize constraints (plus the
//! structural penalties of the encodings themselves), quadratize, and emit
//! a normal-form instance together with the maps needed to pull solutions
//! back to the source model.

mod penalty;
mod quadratize;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::encoder::{
    self, EncoderError, EncodingMethod, IdAllocator, VariableEncoding,
};
use crate::formats::{Domain, FormatError, QuboInstance};
use crate::model::{Constraint, Model, ModelError, Relation, Sense, VarKind};
use crate::pbf::{PbfError, PseudoBooleanFunction as Pbf, VarId};

pub use penalty::{
    estimate_penalty_factor, penalize_linear_eq, penalize_linear_ineq, penalize_quadratic,
    penalize_sos1, PenaltyRule,
};
pub use quadratize::{
    quadratize, quadratize_ntr_kzfd, quadratize_ptr_bg, Quadratizer, QuadratizerRegistry,
    DEFAULT_QUADRATIZATION,
};

#[derive(Debug, Error)]
pub enum CompileError {
    #[error("constraint {index} is infeasible over the variable box (minimum violation {min})")]
    Infeasible { index: usize, min: f64 },
    #[error("penalty factor must be positive, got {0}")]
    NonPositivePenalty(f64),
    #[error("equality penalization expects an affine polynomial, got degree {0}")]
    NotAffine(usize),
    #[error("penalization expects degree <= 2, got degree {0}")]
    NotQuadratic(usize),
    #[error("inequality penalization applies to le/ge constraints only")]
    WrongRelation,
    #[error("slack range is unbounded")]
    UnboundedSlack,
    #[error("SOS1 needs at least one member")]
    EmptySos1,
    #[error("SOS1 member {0} must be a binary variable")]
    NonBinarySosMember(VarId),
    #[error("quadratization rule {rule} handles {expected} terms; term {term:?} has coefficient {coeff}")]
    WrongSignForRule {
        rule: &'static str,
        expected: &'static str,
        term: Vec<VarId>,
        coeff: f64,
    },
    #[error("unknown quadratization method '{name}'; registered: {available:?}")]
    UnknownQuadratization {
        name: String,
        available: Vec<String>,
    },
    #[error("a quadratization method named '{0}' is already registered")]
    DuplicateQuadratization(String),
    #[error("quadratization introduced {found} auxiliaries, above the budget of {budget}")]
    AuxiliaryBudgetExceeded { found: usize, budget: usize },
    #[error("{0} carries a structural penalty and cannot encode a continuous variable")]
    ContinuousEncoding(EncodingMethod),
    #[error("unknown encoding '{0}' (expected binary|unary|one-hot|domain-wall|bounded[:mu]|ap)")]
    UnknownEncoding(String),
    #[error(transparent)]
    Encoder(#[from] EncoderError),
    #[error(transparent)]
    Pbf(#[from] PbfError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Format(#[from] FormatError),
}

/// Which encoding non-binary variables (and slacks) receive.
///
/// `method = None` means the defaults: binary for integers and the
/// arithmetic-progression family for discretized continuous variables.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingSpec {
    pub method: Option<EncodingMethod>,
    /// Bounded-coefficient cap; integral values keep integer images exact.
    pub mu: f64,
    /// Base family the bounded-coefficient cap applies to.
    pub bounded_base: EncodingMethod,
    /// Bit budget for continuous variables. Unset picks the smallest budget
    /// whose quantization step is at most 1% of the range.
    pub bit_budget: Option<u32>,
}

impl Default for EncodingSpec {
    fn default() -> Self {
        Self {
            method: None,
            mu: 2.0,
            bounded_base: EncodingMethod::Binary,
            bit_budget: None,
        }
    }
}

impl FromStr for EncodingSpec {
    type Err = CompileError;

    /// Accepts the command-line vocabulary:
    /// `binary | unary | one-hot | domain-wall | bounded[:mu] | ap`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut spec = Self::default();
        spec.method = Some(match s {
            "binary" => EncodingMethod::Binary,
            "unary" => EncodingMethod::Unary,
            "one-hot" => EncodingMethod::OneHot,
            "domain-wall" => EncodingMethod::DomainWall,
            "ap" => EncodingMethod::ArithmeticProgression,
            "bounded" => EncodingMethod::BoundedCoefficient,
            other => match other.strip_prefix("bounded:") {
                Some(raw) => {
                    let mu: f64 = raw
                        .parse()
                        .map_err(|_| CompileError::UnknownEncoding(other.to_string()))?;
                    spec.mu = mu;
                    EncodingMethod::BoundedCoefficient
                }
                None => return Err(CompileError::UnknownEncoding(other.to_string())),
            },
        });
        Ok(spec)
    }
}

impl EncodingSpec {
    fn integer_method(&self) -> EncodingMethod {
        self.method.unwrap_or(EncodingMethod::Binary)
    }

    fn continuous_base(&self) -> Result<EncodingMethod, CompileError> {
        let base = self.method.unwrap_or(EncodingMethod::ArithmeticProgression);
        match base {
            EncodingMethod::OneHot | EncodingMethod::DomainWall => {
                Err(CompileError::ContinuousEncoding(base))
            }
            other => Ok(other),
        }
    }
}

/// Encodes one integer range with the spec's method.
pub(crate) fn encode_integer(
    spec: &EncodingSpec,
    source: VarId,
    lower: i64,
    upper: i64,
    fresh: &mut IdAllocator,
) -> Result<VariableEncoding, EncoderError> {
    match spec.integer_method() {
        EncodingMethod::Binary => encoder::encode_binary(source, lower, upper, fresh),
        EncodingMethod::Unary => encoder::encode_unary(source, lower, upper, fresh),
        EncodingMethod::OneHot => encoder::encode_one_hot(source, lower, upper, fresh),
        EncodingMethod::DomainWall => encoder::encode_domain_wall(source, lower, upper, fresh),
        EncodingMethod::BoundedCoefficient => encoder::encode_bounded_coefficient(
            source,
            lower,
            upper,
            spec.mu,
            spec.bounded_base,
            fresh,
        ),
        EncodingMethod::ArithmeticProgression => {
            encoder::encode_arithmetic_progression(source, lower, upper, fresh)
        }
    }
}

/// Smallest bit budget whose integer image makes the quantization step at
/// most 1% of the range.
fn default_continuous_budget(base: EncodingMethod, mu: f64) -> u32 {
    let mu = if base == EncodingMethod::BoundedCoefficient {
        Some(mu)
    } else {
        None
    };
    for budget in 1..=256u32 {
        if let Ok(coefficients) = encoder::budget_coefficients(base, budget, mu) {
            if coefficients.iter().sum::<f64>() >= 100.0 {
                return budget;
            }
        }
    }
    256
}

/// How penalty factors are chosen: one automatic bound, one global fixed
/// value, or a per-constraint map (missing indices fall back to auto).
#[derive(Debug, Clone, PartialEq)]
pub enum PenaltyMode {
    Auto,
    Fixed(f64),
    PerConstraint(BTreeMap<usize, f64>),
}

/// Settings for one compilation run.
#[derive(Clone)]
pub struct CompilationSettings {
    pub encoding: EncodingSpec,
    pub penalty: PenaltyMode,
    pub quadratization: String,
    pub target_domain: Domain,
    pub quadratizers: QuadratizerRegistry,
    /// Optional guard against runaway auxiliary introduction.
    pub max_auxiliaries: Option<usize>,
}

impl Default for CompilationSettings {
    fn default() -> Self {
        Self {
            encoding: EncodingSpec::default(),
            penalty: PenaltyMode::Auto,
            quadratization: DEFAULT_QUADRATIZATION.to_string(),
            target_domain: Domain::Boolean,
            quadratizers: QuadratizerRegistry::default(),
            max_auxiliaries: None,
        }
    }
}

/// Per-constraint record kept for decoding: the unweighted penalty
/// polynomial (pre-quadratization), its factor, and the slack encoding when
/// one was introduced.
#[derive(Debug, Clone, Serialize)]
pub struct ConstraintRecord {
    pub index: usize,
    pub rho: f64,
    pub penalty: Pbf,
    pub slack: Option<VariableEncoding>,
}

/// Bidirectional bookkeeping between the source model and the compiled
/// instance. Source ids, encoding bits, slack bits and quadratization
/// auxiliaries are pairwise disjoint id sets.
#[derive(Debug, Clone, Serialize)]
pub struct VariableMap {
    pub target_domain: Domain,
    pub encodings: BTreeMap<VarId, VariableEncoding>,
    /// Penalty factor applied to each structural encoding penalty.
    pub encoding_rho: BTreeMap<VarId, f64>,
    pub constraints: Vec<ConstraintRecord>,
    pub auxiliaries: Vec<VarId>,
}

impl VariableMap {
    /// All compiled bit ids, sorted: encoding bits, slack bits, auxiliaries.
    pub fn compiled_bits(&self) -> Vec<VarId> {
        let mut ids: Vec<VarId> = self
            .encodings
            .values()
            .flat_map(|e| e.bits.iter().copied())
            .chain(
                self.constraints
                    .iter()
                    .filter_map(|r| r.slack.as_ref())
                    .flat_map(|s| s.bits.iter().copied()),
            )
            .chain(self.auxiliaries.iter().copied())
            .collect();
        ids.sort_unstable();
        ids
    }

    pub fn to_json_string(&self) -> String {
        let value = serde_json::to_value(self).expect("variable map serializes");
        let mut text = value.to_string();
        text.push('\n');
        text
    }
}

/// Size and conditioning summary of one compilation.
#[derive(Debug, Clone, Serialize)]
pub struct CompilationReport {
    pub source_variables: usize,
    pub encoding_bits: usize,
    pub slack_bits: usize,
    pub auxiliary_variables: usize,
    pub qubo_variables: usize,
    pub linear_terms: usize,
    pub quadratic_terms: usize,
    /// Largest coefficient magnitude across the source objective and
    /// constraint polynomials.
    pub delta_before: f64,
    /// Largest coefficient magnitude of the emitted instance (offset
    /// included).
    pub delta_after: f64,
    /// Emitted max |c| over min nonzero |c|; 1 when there are no terms.
    pub coeff_ratio: f64,
    pub constraint_rho: Vec<f64>,
    pub encoding_rho: BTreeMap<VarId, f64>,
    pub sense_flipped: bool,
}

impl CompilationReport {
    pub fn to_json_string(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        let mut text = value.to_string();
        text.push('\n');
        text
    }
}

/// A compiled instance plus the map back to the source model and the run
/// report.
#[derive(Debug, Clone)]
pub struct CompilationResult {
    pub qubo: QuboInstance,
    pub map: VariableMap,
    pub report: CompilationReport,
}

pub fn compile(
    m: &Model,
    settings: &CompilationSettings,
) -> Result<CompilationResult, CompileError> {
    m.ensure_valid()?;
    match &settings.penalty {
        PenaltyMode::Fixed(rho) if *rho <= 0.0 => {
            return Err(CompileError::NonPositivePenalty(*rho))
        }
        PenaltyMode::PerConstraint(map) => {
            if let Some((_, &rho)) = map.iter().find(|(_, &rho)| rho <= 0.0) {
                return Err(CompileError::NonPositivePenalty(rho));
            }
        }
        _ => {}
    }

    // Stage 1: normalize the sense to minimization.
    let sense_flipped = m.sense == Sense::Max;
    let objective = if sense_flipped {
        m.objective.scaled(-1.0)
    } else {
        m.objective.clone()
    };

    // Stage 2: encode every variable over fresh binaries (binaries get a
    // one-bit pass-through so the id spaces stay disjoint).
    let first_fresh = m.variables.iter().map(|v| v.id + 1).max().unwrap_or(0);
    let mut fresh = IdAllocator::starting_at(first_fresh);
    let mut sorted_variables = m.variables.clone();
    sorted_variables.sort_by_key(|v| v.id);
    let mut encodings: BTreeMap<VarId, VariableEncoding> = BTreeMap::new();
    let mut substitution: BTreeMap<VarId, Pbf> = BTreeMap::new();
    for v in &sorted_variables {
        let encoding = match v.kind {
            VarKind::Binary => encoder::encode_binary(v.id, 0, 1, &mut fresh)?,
            VarKind::Integer => encode_integer(
                &settings.encoding,
                v.id,
                v.lower as i64,
                v.upper as i64,
                &mut fresh,
            )?,
            VarKind::Continuous => {
                let base = settings.encoding.continuous_base()?;
                let budget = settings
                    .encoding
                    .bit_budget
                    .unwrap_or_else(|| default_continuous_budget(base, settings.encoding.mu));
                let mu = (base == EncodingMethod::BoundedCoefficient)
                    .then_some(settings.encoding.mu);
                encoder::encode_continuous(v.id, v.lower, v.upper, budget, base, mu, &mut fresh)?
            }
        };
        substitution.insert(v.id, encoding.value_polynomial());
        encodings.insert(v.id, encoding);
    }

    // Stage 3: substitute the encodings into the objective.
    let encoded_objective = objective.substitute_all(&substitution)?;
    let auto_rho = estimate_penalty_factor(&encoded_objective, PenaltyRule::Auto)?;
    let resolve_rho = |index: Option<usize>| -> f64 {
        match (&settings.penalty, index) {
            (PenaltyMode::Auto, _) => auto_rho,
            (PenaltyMode::Fixed(rho), _) => *rho,
            (PenaltyMode::PerConstraint(map), Some(i)) => {
                map.get(&i).copied().unwrap_or(auto_rho)
            }
            (PenaltyMode::PerConstraint(_), None) => auto_rho,
        }
    };

    // Stage 4: structural penalties of the encodings themselves.
    let mut total = encoded_objective;
    let mut encoding_rho: BTreeMap<VarId, f64> = BTreeMap::new();
    for (&id, encoding) in &encodings {
        if !encoding.penalty.is_zero() {
            let rho = resolve_rho(None);
            encoding_rho.insert(id, rho);
            total = Pbf::combine(1.0, &total, rho, &encoding.penalty);
        }
    }

    // Stage 5: penalize the constraints in the encoded space.
    let mut records: Vec<ConstraintRecord> = Vec::with_capacity(m.constraints.len());
    for (index, constraint) in m.constraints.iter().enumerate() {
        let (penalty, slack) = match constraint {
            Constraint::Algebraic { lhs, relation, rhs } => {
                let mut g = lhs.substitute_all(&substitution)?;
                g.add_term(&[], -rhs);
                let result = match (relation, g.degree() <= 1) {
                    (Relation::Eq, true) => penalize_linear_eq(&g).map(|p| (p, None)),
                    (Relation::Eq, false) => {
                        penalize_quadratic(&g, Relation::Eq, &mut fresh, &settings.encoding)
                    }
                    (rel, true) => {
                        penalize_linear_ineq(&g, *rel, &mut fresh, &settings.encoding)
                            .map(|(p, s)| (p, Some(s)))
                    }
                    (rel, false) => {
                        penalize_quadratic(&g, *rel, &mut fresh, &settings.encoding)
                    }
                };
                result.map_err(|e| match e {
                    CompileError::Infeasible { min, .. } => {
                        CompileError::Infeasible { index, min }
                    }
                    other => other,
                })?
            }
            Constraint::Sos1 { members } => {
                let mut bits = Vec::with_capacity(members.len());
                for &member in members {
                    let is_binary = m
                        .variable(member)
                        .map(|v| v.kind == VarKind::Binary)
                        .unwrap_or(false);
                    if !is_binary {
                        return Err(CompileError::NonBinarySosMember(member));
                    }
                    bits.push(encodings[&member].bits[0]);
                }
                (penalize_sos1(&bits)?, None)
            }
        };
        let rho = resolve_rho(Some(index));
        total = Pbf::combine(1.0, &total, rho, &penalty);
        records.push(ConstraintRecord {
            index,
            rho,
            penalty,
            slack,
        });
    }

    // Stage 6: quadratize whatever degree-3+ terms penalization produced.
    let (reduced, auxiliaries) = quadratize(
        &total,
        &mut fresh,
        &settings.quadratization,
        &settings.quadratizers,
    )?;
    if let Some(budget) = settings.max_auxiliaries {
        if auxiliaries.len() > budget {
            return Err(CompileError::AuxiliaryBudgetExceeded {
                found: auxiliaries.len(),
                budget,
            });
        }
    }

    // Stage 7: emit the instance in the requested domain.
    let map = VariableMap {
        target_domain: settings.target_domain,
        encodings,
        encoding_rho: encoding_rho.clone(),
        constraints: records,
        auxiliaries,
    };
    let (linear, quadratic, constant) = reduced.to_qubo_form()?;
    let boolean = QuboInstance::new(
        Domain::Boolean,
        map.compiled_bits(),
        linear,
        quadratic,
        1.0,
        constant,
    )?;
    let qubo = boolean.with_domain(settings.target_domain);

    let delta_before = m
        .constraints
        .iter()
        .filter_map(|c| match c {
            Constraint::Algebraic { lhs, .. } => Some(lhs.delta()),
            Constraint::Sos1 { .. } => None,
        })
        .fold(m.objective.delta(), f64::max);
    let emitted = qubo.as_polynomial();
    let delta_after = emitted.delta();
    let coeff_ratio = emitted
        .min_abs_coefficient()
        .map_or(1.0, |min| delta_after / min);

    let report = CompilationReport {
        source_variables: m.num_variables(),
        encoding_bits: map.encodings.values().map(|e| e.num_bits()).sum(),
        slack_bits: map
            .constraints
            .iter()
            .filter_map(|r| r.slack.as_ref())
            .map(|s| s.num_bits())
            .sum(),
        auxiliary_variables: map.auxiliaries.len(),
        qubo_variables: qubo.num_variables(),
        linear_terms: qubo.linear().len(),
        quadratic_terms: qubo.quadratic().len(),
        delta_before,
        delta_after,
        coeff_ratio,
        constraint_rho: map.constraints.iter().map(|r| r.rho).collect(),
        encoding_rho,
        sense_flipped,
    };

    Ok(CompilationResult { qubo, map, report })
}

/// Why a decoded sample is not a feasible source solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Encoding { variable: VarId },
    Constraint { index: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ViolationKind::Encoding { variable } => {
                write!(f, "encoding of variable {variable} violated by {}", self.amount)
            }
            ViolationKind::Constraint { index } => {
                write!(f, "constraint {index} violated by {}", self.amount)
            }
        }
    }
}

/// A sample pulled back to the source model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecodedSolution {
    pub values: BTreeMap<VarId, f64>,
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

/// Threshold below which a penalty evaluation counts as zero; absorbs float
/// dust from real-coefficient constraints.
const VIOLATION_TOLERANCE: f64 = 1e-9;

/// Maps a compiled (boolean) bit assignment back to source-variable values
/// and checks every recorded penalty. Feasible means every structural and
/// constraint penalty evaluates to zero.
pub fn decode_solution(
    map: &VariableMap,
    bits: &BTreeMap<VarId, bool>,
) -> Result<DecodedSolution, CompileError> {
    let assignment: BTreeMap<VarId, f64> = bits
        .iter()
        .map(|(&id, &set)| (id, f64::from(u8::from(set))))
        .collect();

    let mut values = BTreeMap::new();
    let mut violations = Vec::new();
    for (&id, encoding) in &map.encodings {
        let (value, admissible) = encoder::decode(encoding, bits)?;
        values.insert(id, value);
        if !admissible {
            violations.push(Violation {
                kind: ViolationKind::Encoding { variable: id },
                amount: encoding.penalty.evaluate(&assignment)?,
            });
        }
    }
    for record in &map.constraints {
        let amount = record.penalty.evaluate(&assignment)?;
        if amount.abs() > VIOLATION_TOLERANCE {
            violations.push(Violation {
                kind: ViolationKind::Constraint {
                    index: record.index,
                },
                amount,
            });
        }
    }
    Ok(DecodedSolution {
        feasible: violations.is_empty(),
        values,
        violations,
    })
}

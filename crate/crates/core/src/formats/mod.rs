//! QUBO/Ising normal form, the exact boolean/spin bijection, and codecs for
//! the bqpjson, QUBO and Qubist file formats.

mod bqpjson;
mod qubo;
mod qubist;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pbf::{PbfError, PseudoBooleanFunction as Pbf, VarId};
use crate::samplers::SampleSet;

pub use bqpjson::{read_bqpjson, write_bqpjson};
pub use qubist::{read_qubist, write_qubist};
pub use qubo::{read_qubo, write_qubo};

/// Variable domain of an instance: `{0, 1}` or `{-1, +1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Boolean,
    Spin,
}

impl Domain {
    /// True when `value` is a legal state entry for this domain.
    pub fn admits(self, value: i8) -> bool {
        match self {
            Domain::Boolean => value == 0 || value == 1,
            Domain::Spin => value == -1 || value == 1,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Boolean => write!(f, "boolean"),
            Domain::Spin => write!(f, "spin"),
        }
    }
}

impl FromStr for Domain {
    type Err = FormatError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "boolean" => Ok(Domain::Boolean),
            "spin" => Ok(Domain::Spin),
            other => Err(FormatError::UnknownDomain(other.to_string())),
        }
    }
}

/// The interchange formats the codecs understand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Bqpjson,
    Qubo,
    Qubist,
}

impl Format {
    /// The domain the on-disk grammar is defined over, when it is fixed.
    pub fn required_domain(self) -> Option<Domain> {
        match self {
            Format::Bqpjson => None,
            Format::Qubo => Some(Domain::Boolean),
            Format::Qubist => Some(Domain::Spin),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Format::Bqpjson => write!(f, "bqpjson"),
            Format::Qubo => write!(f, "qubo"),
            Format::Qubist => write!(f, "qubist"),
        }
    }
}

impl FromStr for Format {
    type Err = FormatError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bqpjson" => Ok(Format::Bqpjson),
            "qubo" => Ok(Format::Qubo),
            "qubist" => Ok(Format::Qubist),
            other => Err(FormatError::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormatError {
    #[error("json error at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("variable ids must be sorted strictly ascending")]
    UnsortedVariableIds,
    #[error("duplicate variable id {0}")]
    DuplicateVariable(VarId),
    #[error("term references undeclared variable id {0}")]
    UndeclaredVariable(VarId),
    #[error("quadratic term ({head}, {tail}) must satisfy head < tail")]
    QuadraticOrder { head: VarId, tail: VarId },
    #[error("duplicate {kind} term for {key}")]
    DuplicateTerm { kind: &'static str, key: String },
    #[error("scale must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("coefficient for {0} is not finite")]
    NonFiniteCoefficient(String),
    #[error("unsupported version '{0}' (readers accept 1.x)")]
    UnsupportedVersion(String),
    #[error("unknown domain '{0}' (expected 'boolean' or 'spin')")]
    UnknownDomain(String),
    #[error("metadata values must be strings; key '{0}' is not")]
    MetadataValue(String),
    #[error("line {line}: malformed line '{content}'")]
    MalformedLine { line: usize, content: String },
    #[error("line {line}: negative index")]
    NegativeIndex { line: usize },
    #[error("header declares {declared} {kind} entries but the body has {found}")]
    CountMismatch {
        kind: &'static str,
        declared: usize,
        found: usize,
    },
    #[error("line {line}: index pair ({i}, {j}) is not upper triangular")]
    IndexOrder { line: usize, i: i64, j: i64 },
    #[error("line {line}: index {index} is out of range for {n} declared sites")]
    IndexRange { line: usize, index: i64, n: u64 },
    #[error("unknown format '{0}' (expected bqpjson, qubo or qubist)")]
    UnknownFormat(String),
    #[error("target domain {requested} conflicts with {format}, which is {required}-only")]
    DomainConflict {
        format: Format,
        required: Domain,
        requested: Domain,
    },
    #[error("state has {found} entries but the instance declares {expected} variables")]
    StateLength { expected: usize, found: usize },
    #[error("state value {value} is not valid in the {domain} domain")]
    DomainValue { domain: Domain, value: i8 },
    #[error("solution {index} evaluates to {computed} but declares {stated}")]
    EvaluationMismatch {
        index: usize,
        stated: f64,
        computed: f64,
    },
    #[error(transparent)]
    Pbf(#[from] PbfError),
}

impl FormatError {
    pub(crate) fn from_json(err: &serde_json::Error) -> Self {
        FormatError::Json {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}

/// A QUBO or Ising instance in normal form: energies are
/// `scale * (sum linear + sum quadratic + offset)` with the quadratic map
/// keyed by strictly ordered pairs, each unordered pair stored once.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboInstance {
    domain: Domain,
    variable_ids: Vec<VarId>,
    linear: BTreeMap<VarId, f64>,
    quadratic: BTreeMap<(VarId, VarId), f64>,
    scale: f64,
    offset: f64,
    metadata: BTreeMap<String, String>,
    solutions: Option<SampleSet>,
}

impl QuboInstance {
    pub fn new(
        domain: Domain,
        variable_ids: Vec<VarId>,
        linear: BTreeMap<VarId, f64>,
        quadratic: BTreeMap<(VarId, VarId), f64>,
        scale: f64,
        offset: f64,
    ) -> Result<Self, FormatError> {
        for pair in variable_ids.windows(2) {
            if pair[0] == pair[1] {
                return Err(FormatError::DuplicateVariable(pair[0]));
            }
            if pair[0] > pair[1] {
                return Err(FormatError::UnsortedVariableIds);
            }
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(FormatError::NonPositiveScale(scale));
        }
        if !offset.is_finite() {
            return Err(FormatError::NonFiniteCoefficient("offset".to_string()));
        }
        for (&v, &c) in &linear {
            if variable_ids.binary_search(&v).is_err() {
                return Err(FormatError::UndeclaredVariable(v));
            }
            if !c.is_finite() {
                return Err(FormatError::NonFiniteCoefficient(format!("variable {v}")));
            }
        }
        for (&(i, j), &c) in &quadratic {
            if i >= j {
                return Err(FormatError::QuadraticOrder { head: i, tail: j });
            }
            for v in [i, j] {
                if variable_ids.binary_search(&v).is_err() {
                    return Err(FormatError::UndeclaredVariable(v));
                }
            }
            if !c.is_finite() {
                return Err(FormatError::NonFiniteCoefficient(format!("pair ({i}, {j})")));
            }
        }
        Ok(Self {
            domain,
            variable_ids,
            linear,
            quadratic,
            scale,
            offset,
            metadata: BTreeMap::new(),
            solutions: None,
        })
    }

    /// Builds a boolean instance from a degree-<=2 polynomial; the constant
    /// term becomes the offset.
    pub fn from_polynomial(f: &Pbf) -> Result<Self, FormatError> {
        let (linear, quadratic, constant) = f.to_qubo_form()?;
        let ids: Vec<VarId> = f.variables().into_iter().collect();
        Self::new(Domain::Boolean, ids, linear, quadratic, 1.0, constant)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn variable_ids(&self) -> &[VarId] {
        &self.variable_ids
    }

    pub fn num_variables(&self) -> usize {
        self.variable_ids.len()
    }

    pub fn linear(&self) -> &BTreeMap<VarId, f64> {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(VarId, VarId), f64> {
        &self.quadratic
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn insert_metadata(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.metadata.insert(key.into(), value.into());
    }

    pub fn solutions(&self) -> Option<&SampleSet> {
        self.solutions.as_ref()
    }

    pub fn set_solutions(&mut self, solutions: Option<SampleSet>) {
        self.solutions = solutions;
    }

    /// Rebuilds the terms (linear, quadratic and offset, unscaled) as a
    /// polynomial; useful for conditioning statistics.
    pub fn as_polynomial(&self) -> Pbf {
        let mut f = Pbf::constant(self.offset);
        for (&v, &c) in &self.linear {
            f.add_term(&[v], c);
        }
        for (&(i, j), &c) in &self.quadratic {
            f.add_term(&[i, j], c);
        }
        f
    }

    /// Position of a variable id in the sorted id list.
    pub fn position(&self, v: VarId) -> Option<usize> {
        self.variable_ids.binary_search(&v).ok()
    }

    /// Terms re-keyed by position in `variable_ids`, for samplers that work
    /// on dense states.
    pub fn positional_terms(&self) -> PositionalTerms {
        let mut linear = vec![0.0; self.variable_ids.len()];
        for (&v, &c) in &self.linear {
            linear[self.position(v).expect("declared id")] = c;
        }
        let quadratic = self
            .quadratic
            .iter()
            .map(|(&(i, j), &c)| {
                (
                    self.position(i).expect("declared id"),
                    self.position(j).expect("declared id"),
                    c,
                )
            })
            .collect();
        PositionalTerms {
            linear,
            quadratic,
            scale: self.scale,
            offset: self.offset,
        }
    }

    fn check_state(&self, state: &[i8]) -> Result<(), FormatError> {
        if state.len() != self.variable_ids.len() {
            return Err(FormatError::StateLength {
                expected: self.variable_ids.len(),
                found: state.len(),
            });
        }
        for &value in state {
            if !self.domain.admits(value) {
                return Err(FormatError::DomainValue {
                    domain: self.domain,
                    value,
                });
            }
        }
        Ok(())
    }

    /// Energy of a dense state aligned with `variable_ids`.
    pub fn energy(&self, state: &[i8]) -> Result<f64, FormatError> {
        self.check_state(state)?;
        let mut total = self.offset;
        for (&v, &c) in &self.linear {
            total += c * f64::from(state[self.position(v).expect("declared id")]);
        }
        for (&(i, j), &c) in &self.quadratic {
            let si = f64::from(state[self.position(i).expect("declared id")]);
            let sj = f64::from(state[self.position(j).expect("declared id")]);
            total += c * si * sj;
        }
        Ok(self.scale * total)
    }

    /// Exact change of variables to the spin domain (`s = 2x - 1`); energies
    /// are preserved state-for-state under the bijection. A spin instance is
    /// returned unchanged.
    pub fn to_spin(&self) -> Self {
        if self.domain == Domain::Spin {
            return self.clone();
        }
        let mut h: BTreeMap<VarId, f64> = BTreeMap::new();
        let mut couplings: BTreeMap<(VarId, VarId), f64> = BTreeMap::new();
        let mut offset = self.offset;
        for (&v, &c) in &self.linear {
            *h.entry(v).or_insert(0.0) += c / 2.0;
            offset += c / 2.0;
        }
        for (&(i, j), &c) in &self.quadratic {
            couplings.insert((i, j), c / 4.0);
            *h.entry(i).or_insert(0.0) += c / 4.0;
            *h.entry(j).or_insert(0.0) += c / 4.0;
            offset += c / 4.0;
        }
        self.rebuilt(Domain::Spin, h, couplings, offset)
    }

    /// Inverse of [`QuboInstance::to_spin`] (`x = (s + 1) / 2`).
    pub fn to_boolean(&self) -> Self {
        if self.domain == Domain::Boolean {
            return self.clone();
        }
        let mut linear: BTreeMap<VarId, f64> = BTreeMap::new();
        let mut quadratic: BTreeMap<(VarId, VarId), f64> = BTreeMap::new();
        let mut offset = self.offset;
        for (&v, &c) in &self.linear {
            *linear.entry(v).or_insert(0.0) += 2.0 * c;
            offset -= c;
        }
        for (&(i, j), &c) in &self.quadratic {
            quadratic.insert((i, j), 4.0 * c);
            *linear.entry(i).or_insert(0.0) += -2.0 * c;
            *linear.entry(j).or_insert(0.0) += -2.0 * c;
            offset += c;
        }
        self.rebuilt(Domain::Boolean, linear, quadratic, offset)
    }

    /// Converts to the requested domain (no-op when already there).
    pub fn with_domain(&self, domain: Domain) -> Self {
        match domain {
            Domain::Boolean => self.to_boolean(),
            Domain::Spin => self.to_spin(),
        }
    }

    fn rebuilt(
        &self,
        domain: Domain,
        linear: BTreeMap<VarId, f64>,
        quadratic: BTreeMap<(VarId, VarId), f64>,
        offset: f64,
    ) -> Self {
        let linear = linear.into_iter().filter(|(_, c)| *c != 0.0).collect();
        let quadratic = quadratic.into_iter().filter(|(_, c)| *c != 0.0).collect();
        let mut out = Self {
            domain,
            variable_ids: self.variable_ids.clone(),
            linear,
            quadratic,
            scale: self.scale,
            offset,
            metadata: self.metadata.clone(),
            solutions: None,
        };
        out.solutions = self
            .solutions
            .as_ref()
            .map(|s| s.converted_to_domain(domain));
        out
    }
}

/// Instance terms re-keyed by dense position.
#[derive(Debug, Clone)]
pub struct PositionalTerms {
    pub linear: Vec<f64>,
    pub quadratic: Vec<(usize, usize, f64)>,
    pub scale: f64,
    pub offset: f64,
}

impl PositionalTerms {
    pub fn energy(&self, state: &[i8]) -> f64 {
        let mut total = self.offset;
        for (x, c) in state.iter().zip(&self.linear) {
            total += c * f64::from(*x);
        }
        for &(i, j, c) in &self.quadratic {
            total += c * f64::from(state[i]) * f64::from(state[j]);
        }
        self.scale * total
    }
}

/// Parses `text` in the named format.
pub fn read_instance(text: &str, format: Format) -> Result<QuboInstance, FormatError> {
    match format {
        Format::Bqpjson => read_bqpjson(text),
        Format::Qubo => read_qubo(text),
        Format::Qubist => read_qubist(text),
    }
}

/// Serializes deterministically in the named format. Domain conversion and
/// scale folding happen as required by the target grammar.
pub fn write_instance(q: &QuboInstance, format: Format) -> String {
    match format {
        Format::Bqpjson => write_bqpjson(q),
        Format::Qubo => write_qubo(q),
        Format::Qubist => write_qubist(q),
    }
}

/// What a write to `format` cannot represent; used to surface warnings.
pub fn lossiness_warnings(q: &QuboInstance, format: Format) -> Vec<String> {
    let mut warnings = Vec::new();
    if format == Format::Bqpjson {
        return warnings;
    }
    if !q.metadata().is_empty() || q.solutions().is_some() {
        warnings.push(format!(
            "metadata and solutions are not representable in the {format} format and were dropped"
        ));
    }
    let effective = q.with_domain(format.required_domain().unwrap_or(q.domain()));
    if effective.offset() != 0.0 {
        warnings.push(format!(
            "constant energy offset {} cannot be represented in the {format} format and was dropped",
            effective.offset() * effective.scale()
        ));
    }
    if effective.scale() != 1.0 {
        warnings.push(format!(
            "scale {} was folded into the coefficients",
            effective.scale()
        ));
    }
    warnings
}

/// Outcome of a file conversion: the serialized text plus any lossiness
/// warnings picked up along the way.
#[derive(Debug, Clone)]
pub struct Converted {
    pub text: String,
    pub warnings: Vec<String>,
}

/// Reads `input` as `from`, optionally converts the domain, and serializes
/// as `to`. The energy spectrum is preserved under the state bijection,
/// except for offsets the plain-text formats cannot carry (reported as
/// warnings).
pub fn convert(
    input: &str,
    from: Format,
    to: Format,
    target_domain: Option<Domain>,
) -> Result<Converted, FormatError> {
    let mut q = read_instance(input, from)?;
    if to == Format::Bqpjson && from != Format::Bqpjson {
        q.insert_metadata("converted_from", from.to_string());
    }
    if let (Some(requested), Some(required)) = (target_domain, to.required_domain()) {
        if requested != required {
            return Err(FormatError::DomainConflict {
                format: to,
                required,
                requested,
            });
        }
    }
    let desired = target_domain.or(to.required_domain()).unwrap_or(q.domain());
    if desired != q.domain() {
        let forced = target_domain.is_none();
        let was = q.domain();
        q = q.with_domain(desired);
        if forced && to == Format::Bqpjson {
            q.insert_metadata("domain_converted", format!("{was}_to_{desired}"));
        }
    }
    let warnings = lossiness_warnings(&q, to);
    let text = write_instance(&q, to);
    Ok(Converted { text, warnings })
}

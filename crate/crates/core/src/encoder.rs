//! Variable encodings: each bounded integer (or discretized continuous)
//! variable becomes an affine combination of fresh binary variables, plus a
//! structural penalty polynomial for the methods whose codeword set is a
//! strict subset of the hypercube (one-hot, domain-wall).

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::pbf::{PseudoBooleanFunction as Pbf, VarId};

/// Hands out fresh variable ids, monotonically increasing.
#[derive(Debug, Clone)]
pub struct IdAllocator {
    next: VarId,
}

impl IdAllocator {
    pub fn starting_at(next: VarId) -> Self {
        Self { next }
    }

    pub fn fresh(&mut self) -> VarId {
        let id = self.next;
        self.next += 1;
        id
    }

    /// The next id that would be handed out.
    pub fn watermark(&self) -> VarId {
        self.next
    }
}

/// The supported encoding families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EncodingMethod {
    Binary,
    Unary,
    OneHot,
    DomainWall,
    BoundedCoefficient,
    ArithmeticProgression,
}

impl std::fmt::Display for EncodingMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Self::Binary => "binary",
            Self::Unary => "unary",
            Self::OneHot => "one-hot",
            Self::DomainWall => "domain-wall",
            Self::BoundedCoefficient => "bounded-coefficient",
            Self::ArithmeticProgression => "arithmetic-progression",
        };
        write!(f, "{name}")
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EncoderError {
    #[error("invalid bounds: lower {lower} exceeds upper {upper}")]
    InvalidBounds { lower: f64, upper: f64 },
    #[error("bounded-coefficient cap mu must be >= 1, got {0}")]
    InvalidMu(f64),
    #[error("{0} cannot serve as a bounded-coefficient base")]
    InvalidBoundedBase(EncodingMethod),
    #[error("{0} carries a structural penalty and cannot discretize a continuous variable")]
    PenalizedContinuousBase(EncodingMethod),
    #[error("continuous encoding needs a bit budget of at least 1")]
    ZeroBitBudget,
    #[error("bit {0} of the encoding has no assigned value")]
    MissingBit(VarId),
    #[error("value {value} lies outside the encodable range [{lower}, {upper}]")]
    ValueOutOfRange { value: f64, lower: f64, upper: f64 },
}

/// One source variable rendered as `offset + sum(coefficients[i] * bits[i])`,
/// with `penalty == 0` exactly on the admissible codewords.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariableEncoding {
    pub source_id: VarId,
    pub method: EncodingMethod,
    pub bits: Vec<VarId>,
    pub coefficients: Vec<f64>,
    pub offset: f64,
    pub penalty: Pbf,
    /// False for discretized continuous variables, true otherwise.
    pub is_exact: bool,
}

impl VariableEncoding {
    fn penalty_free(
        source_id: VarId,
        method: EncodingMethod,
        bits: Vec<VarId>,
        coefficients: Vec<f64>,
        offset: f64,
        is_exact: bool,
    ) -> Self {
        Self {
            source_id,
            method,
            bits,
            coefficients,
            offset,
            penalty: Pbf::zero(),
            is_exact,
        }
    }

    /// The affine value polynomial `offset + sum(c_i * y_i)`.
    pub fn value_polynomial(&self) -> Pbf {
        let mut f = Pbf::constant(self.offset);
        for (bit, c) in self.bits.iter().zip(&self.coefficients) {
            f.add_term(&[*bit], *c);
        }
        f
    }

    pub fn num_bits(&self) -> usize {
        self.bits.len()
    }

    /// Largest coefficient magnitude of the affine expansion.
    pub fn max_coefficient(&self) -> f64 {
        self.coefficients.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

fn check_bounds(lower: i64, upper: i64) -> Result<u64, EncoderError> {
    if lower > upper {
        return Err(EncoderError::InvalidBounds {
            lower: lower as f64,
            upper: upper as f64,
        });
    }
    Ok((upper - lower) as u64)
}

/// Residual-coefficient binary encoding: powers of two, then one residual so
/// the codeword sums cover the range exactly.
pub fn encode_binary(
    source_id: VarId,
    lower: i64,
    upper: i64,
    fresh: &mut IdAllocator,
) -> Result<VariableEncoding, EncoderError> {
    let n = check_bounds(lower, upper)?;
    let coefficients = binary_coefficients(n);
    let bits = (0..coefficients.len()).map(|_| fresh.fresh()).collect();
    Ok(VariableEncoding::penalty_free(
        source_id,
        EncodingMethod::Binary,
        bits,
        coefficients,
        lower as f64,
        true,
    ))
}

fn binary_coefficients(n: u64) -> Vec<f64> {
    let mut coefficients = Vec::new();
    let mut covered = 0u64; // 2^k - 1 after k powers
    let mut power = 1u64;
    while covered + power <= n {
        coefficients.push(power as f64);
        covered += power;
        power *= 2;
    }
    let residual = n - covered;
    if residual > 0 {
        coefficients.push(residual as f64);
    }
    coefficients
}

/// Unary encoding: `n` coefficients all equal to one.
pub fn encode_unary(
    source_id: VarId,
    lower: i64,
    upper: i64,
    fresh: &mut IdAllocator,
) -> Result<VariableEncoding, EncoderError> {
    let n = check_bounds(lower, upper)?;
    let bits: Vec<VarId> = (0..n).map(|_| fresh.fresh()).collect();
    let coefficients = vec![1.0; bits.len()];
    Ok(VariableEncoding::penalty_free(
        source_id,
        EncodingMethod::Unary,
        bits,
        coefficients,
        lower as f64,
        true,
    ))
}

/// One-hot encoding: `n + 1` indicator bits with penalty `(sum(y) - 1)^2`.
pub fn encode_one_hot(
    source_id: VarId,
    lower: i64,
    upper: i64,
    fresh: &mut IdAllocator,
) -> Result<VariableEncoding, EncoderError> {
    let n = check_bounds(lower, upper)?;
    let bits: Vec<VarId> = (0..=n).map(|_| fresh.fresh()).collect();
    let coefficients: Vec<f64> = (0..=n).map(|k| (lower + k as i64) as f64).collect();
    let mut indicator_sum = Pbf::constant(-1.0);
    for &bit in &bits {
        indicator_sum.add_term(&[bit], 1.0);
    }
    let penalty = indicator_sum.multiply(&indicator_sum);
    Ok(VariableEncoding {
        source_id,
        method: EncodingMethod::OneHot,
        bits,
        coefficients,
        offset: 0.0,
        penalty,
        is_exact: true,
    })
}

/// Domain-wall encoding: `n` chain bits, value `lower + sum(y)`, penalty
/// `sum(y_{i+1} - y_i*y_{i+1})` which vanishes exactly on the monotone
/// non-increasing codewords `1..10..0`.
pub fn encode_domain_wall(
    source_id: VarId,
    lower: i64,
    upper: i64,
    fresh: &mut IdAllocator,
) -> Result<VariableEncoding, EncoderError> {
    let n = check_bounds(lower, upper)?;
    let bits: Vec<VarId> = (0..n).map(|_| fresh.fresh()).collect();
    let coefficients = vec![1.0; bits.len()];
    let mut penalty = Pbf::zero();
    for pair in bits.windows(2) {
        penalty.add_term(&[pair[1]], 1.0);
        penalty.add_term(&[pair[0], pair[1]], -1.0);
    }
    Ok(VariableEncoding {
        source_id,
        method: EncodingMethod::DomainWall,
        bits,
        coefficients,
        offset: lower as f64,
        penalty,
        is_exact: true,
    })
}

/// Base families accepted by the bounded-coefficient cap-and-fill rule.
fn base_coefficients(base: EncodingMethod, n: u64) -> Result<Vec<f64>, EncoderError> {
    match base {
        EncodingMethod::Binary => Ok(binary_coefficients(n)),
        EncodingMethod::Unary => Ok(vec![1.0; n as usize]),
        EncodingMethod::ArithmeticProgression => Ok(ap_coefficients(n)),
        other => Err(EncoderError::InvalidBoundedBase(other)),
    }
}

/// Bounded-coefficient encoding: the base coefficients truncated at the
/// first one exceeding `mu`, with the uncovered remainder filled by copies
/// of `mu` plus one residual. Keeps every coefficient at most `mu`.
///
/// Exactness of the integer image requires an integral `mu`; fractional caps
/// are accepted but then codeword sums need not hit every integer in range.
pub fn encode_bounded_coefficient(
    source_id: VarId,
    lower: i64,
    upper: i64,
    mu: f64,
    base: EncodingMethod,
    fresh: &mut IdAllocator,
) -> Result<VariableEncoding, EncoderError> {
    let n = check_bounds(lower, upper)?;
    if !(mu >= 1.0) {
        return Err(EncoderError::InvalidMu(mu));
    }
    let base_coeffs = base_coefficients(base, n)?;
    let mut coefficients: Vec<f64> = Vec::new();
    let mut covered = 0.0;
    for &c in &base_coeffs {
        if c > mu {
            break;
        }
        coefficients.push(c);
        covered += c;
    }
    let mut remainder = n as f64 - covered;
    while remainder >= mu {
        coefficients.push(mu);
        remainder -= mu;
    }
    if remainder > 0.0 {
        coefficients.push(remainder);
    }
    let bits = (0..coefficients.len()).map(|_| fresh.fresh()).collect();
    Ok(VariableEncoding::penalty_free(
        source_id,
        EncodingMethod::BoundedCoefficient,
        bits,
        coefficients,
        lower as f64,
        true,
    ))
}

/// Smallest `N` with `N*(N+1)/2 >= n`.
fn ap_bit_count(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    // Float estimate of (sqrt(1+8n)-1)/2, corrected to the exact integer.
    let mut bit_count = (((1.0 + 8.0 * n as f64).sqrt() - 1.0) / 2.0).ceil() as u64;
    while bit_count * (bit_count + 1) / 2 < n {
        bit_count += 1;
    }
    while bit_count > 1 && (bit_count - 1) * bit_count / 2 >= n {
        bit_count -= 1;
    }
    bit_count
}

fn ap_coefficients(n: u64) -> Vec<f64> {
    let count = ap_bit_count(n);
    if count == 0 {
        return Vec::new();
    }
    let mut coefficients: Vec<f64> = (1..count).map(|i| i as f64).collect();
    coefficients.push((n - count * (count - 1) / 2) as f64);
    coefficients
}

/// Arithmetic-progression encoding: coefficients `1, 2, ..., N-1` plus a
/// residual final coefficient, using about `sqrt(2n)` bits with every
/// coefficient bounded by the bit count.
pub fn encode_arithmetic_progression(
    source_id: VarId,
    lower: i64,
    upper: i64,
    fresh: &mut IdAllocator,
) -> Result<VariableEncoding, EncoderError> {
    let n = check_bounds(lower, upper)?;
    let coefficients = ap_coefficients(n);
    let bits = (0..coefficients.len()).map(|_| fresh.fresh()).collect();
    Ok(VariableEncoding::penalty_free(
        source_id,
        EncodingMethod::ArithmeticProgression,
        bits,
        coefficients,
        lower as f64,
        true,
    ))
}

/// Coefficients a penalty-free base produces when given a fixed bit budget
/// instead of a target range (the continuous/rescaling path).
pub fn budget_coefficients(
    base: EncodingMethod,
    bit_budget: u32,
    mu: Option<f64>,
) -> Result<Vec<f64>, EncoderError> {
    let n = u64::from(bit_budget);
    let coefficients = match base {
        EncodingMethod::Binary => (0..n).map(|i| (1u64 << i) as f64).collect(),
        EncodingMethod::Unary => vec![1.0; bit_budget as usize],
        EncodingMethod::ArithmeticProgression => (1..=n).map(|i| i as f64).collect(),
        EncodingMethod::BoundedCoefficient => {
            let cap = mu.unwrap_or(1.0);
            if !(cap >= 1.0) {
                return Err(EncoderError::InvalidMu(cap));
            }
            (0..n)
                .map(|i| {
                    let c = (1u64 << i.min(52)) as f64;
                    if c > cap {
                        cap
                    } else {
                        c
                    }
                })
                .collect()
        }
        other => return Err(EncoderError::PenalizedContinuousBase(other)),
    };
    Ok(coefficients)
}

/// Discretizes a continuous range onto the integer image of a penalty-free
/// base encoding with a fixed bit budget, rescaled so the codeword sums span
/// `[lower, upper]` with step `(upper - lower) / M`.
pub fn encode_continuous(
    source_id: VarId,
    lower: f64,
    upper: f64,
    bit_budget: u32,
    base: EncodingMethod,
    mu: Option<f64>,
    fresh: &mut IdAllocator,
) -> Result<VariableEncoding, EncoderError> {
    if lower > upper {
        return Err(EncoderError::InvalidBounds { lower, upper });
    }
    if bit_budget == 0 {
        return Err(EncoderError::ZeroBitBudget);
    }
    if upper == lower {
        return Ok(VariableEncoding::penalty_free(
            source_id,
            base,
            Vec::new(),
            Vec::new(),
            lower,
            false,
        ));
    }
    let base_coeffs = budget_coefficients(base, bit_budget, mu)?;
    let total: f64 = base_coeffs.iter().sum();
    let step = (upper - lower) / total;
    let coefficients = base_coeffs.iter().map(|c| c * step).collect();
    let bits = (0..base_coeffs.len()).map(|_| fresh.fresh()).collect();
    Ok(VariableEncoding::penalty_free(
        source_id,
        base,
        bits,
        coefficients,
        lower,
        false,
    ))
}

/// Reads the encoded value from a bit assignment and reports whether the
/// codeword is admissible (structural penalty exactly zero).
pub fn decode(
    encoding: &VariableEncoding,
    bits: &BTreeMap<VarId, bool>,
) -> Result<(f64, bool), EncoderError> {
    let mut value = encoding.offset;
    let mut assignment = BTreeMap::new();
    for (bit, c) in encoding.bits.iter().zip(&encoding.coefficients) {
        let set = *bits.get(bit).ok_or(EncoderError::MissingBit(*bit))?;
        if set {
            value += c;
        }
        assignment.insert(*bit, f64::from(u8::from(set)));
    }
    let violation = encoding
        .penalty
        .evaluate(&assignment)
        .map_err(|_| EncoderError::MissingBit(encoding.bits[0]))?;
    Ok((value, violation == 0.0))
}

/// The canonical admissible codeword for an in-range value: greedy
/// largest-coefficient-first for the subset-sum families, a filled prefix
/// for unary/domain-wall, and the matching unit vector for one-hot.
pub fn codeword(
    encoding: &VariableEncoding,
    value: f64,
) -> Result<BTreeMap<VarId, bool>, EncoderError> {
    let span: f64 = encoding.coefficients.iter().sum();
    let relative = value - encoding.offset;
    let out_of_range = || EncoderError::ValueOutOfRange {
        value,
        lower: encoding.offset,
        upper: encoding.offset + span,
    };
    let mut word: BTreeMap<VarId, bool> = encoding.bits.iter().map(|&b| (b, false)).collect();
    match encoding.method {
        EncodingMethod::OneHot => {
            let index = encoding
                .coefficients
                .iter()
                .position(|&c| c == value)
                .ok_or_else(|| EncoderError::ValueOutOfRange {
                    value,
                    lower: encoding.coefficients.first().copied().unwrap_or(0.0),
                    upper: encoding.coefficients.last().copied().unwrap_or(0.0),
                })?;
            word.insert(encoding.bits[index], true);
        }
        EncodingMethod::Unary | EncodingMethod::DomainWall => {
            if relative < 0.0 || relative > span || relative.fract() != 0.0 {
                return Err(out_of_range());
            }
            for bit in encoding.bits.iter().take(relative as usize) {
                word.insert(*bit, true);
            }
        }
        _ => {
            // Greedy on indices sorted by descending coefficient. Sound for
            // these families because the remaining coefficients always cover
            // a contiguous range.
            let mut order: Vec<usize> = (0..encoding.coefficients.len()).collect();
            order.sort_by(|&a, &b| {
                encoding.coefficients[b]
                    .total_cmp(&encoding.coefficients[a])
                    .then(a.cmp(&b))
            });
            let mut remaining = relative;
            if remaining < -1e-9 || remaining > span + 1e-9 {
                return Err(out_of_range());
            }
            for index in order {
                let c = encoding.coefficients[index];
                if c <= remaining + 1e-9 && remaining > 1e-9 {
                    word.insert(encoding.bits[index], true);
                    remaining -= c;
                }
            }
            if remaining.abs() > 1e-9 {
                return Err(out_of_range());
            }
        }
    }
    Ok(word)
}

//! Degree reduction to quadratic form. The contract is the minimization
//! identity: for every assignment of the original variables, minimizing the
//! emitted polynomial over its auxiliary variables recovers the original
//! value. Two single-term rules are built in (one per coefficient sign) and
//! further methods can be registered by name.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::encoder::IdAllocator;
use crate::pbf::{PseudoBooleanFunction as Pbf, VarId};

use super::CompileError;

/// Name of the built-in mixed dispatcher (negative terms via NTR-KZFD,
/// positive via PTR-BG).
pub const DEFAULT_QUADRATIZATION: &str = "ntr-ptr";

/// Rewrites one negative monomial `c * x_1...x_k` (`c < 0`, `k >= 3`) as
/// `|c| * ((k-1)w - sum_i x_i w)` with a single fresh auxiliary; minimizing
/// over `w` restores the term at every point. Terms that are already
/// quadratic pass through untouched.
pub fn quadratize_ntr_kzfd(
    term: &[VarId],
    coeff: f64,
    fresh: &mut IdAllocator,
) -> Result<Pbf, CompileError> {
    if term.len() < 3 {
        return Ok(Pbf::monomial(term, coeff));
    }
    if coeff >= 0.0 {
        return Err(CompileError::WrongSignForRule {
            rule: "ntr-kzfd",
            expected: "negative",
            term: term.to_vec(),
            coeff,
        });
    }
    let magnitude = coeff.abs();
    let w = fresh.fresh();
    let mut out = Pbf::zero();
    out.add_term(&[w], magnitude * (term.len() as f64 - 1.0));
    for &x in term {
        out.add_term(&[x, w], -magnitude);
    }
    Ok(out)
}

/// Rewrites one positive monomial `c * x_1...x_k` (`c > 0`, `k >= 3`) with
/// `k - 2` auxiliaries:
///
/// ```text
/// sum_{i=1}^{k-2} w_i * (k - i - 1 + x_i - sum_{j=i+1}^{k} x_j)  +  x_{k-1} x_k
/// ```
///
/// The minus sign on the trailing sum is what makes the minimization
/// identity hold; the variant with a plus sign fails it (see the
/// quadratization tests, which check both exhaustively).
pub fn quadratize_ptr_bg(
    term: &[VarId],
    coeff: f64,
    fresh: &mut IdAllocator,
) -> Result<Pbf, CompileError> {
    if term.len() < 3 {
        return Ok(Pbf::monomial(term, coeff));
    }
    if coeff <= 0.0 {
        return Err(CompileError::WrongSignForRule {
            rule: "ptr-bg",
            expected: "positive",
            term: term.to_vec(),
            coeff,
        });
    }
    let k = term.len();
    let mut out = Pbf::zero();
    out.add_term(&[term[k - 2], term[k - 1]], coeff);
    for i in 0..(k - 2) {
        let w = fresh.fresh();
        out.add_term(&[w], coeff * (k - i - 2) as f64);
        out.add_term(&[term[i], w], coeff);
        for &x in &term[i + 1..] {
            out.add_term(&[x, w], -coeff);
        }
    }
    Ok(out)
}

/// A whole-polynomial degree-reduction method.
pub trait Quadratizer: Send + Sync {
    fn quadratize(
        &self,
        f: &Pbf,
        fresh: &mut IdAllocator,
    ) -> Result<(Pbf, Vec<VarId>), CompileError>;
}

/// Which sign(s) of high-degree terms a term-wise pass handles.
#[derive(Debug, Clone, Copy)]
enum TermRule {
    Mixed,
    NegativeOnly,
    PositiveOnly,
}

struct TermwiseQuadratizer {
    rule: TermRule,
}

impl Quadratizer for TermwiseQuadratizer {
    fn quadratize(
        &self,
        f: &Pbf,
        fresh: &mut IdAllocator,
    ) -> Result<(Pbf, Vec<VarId>), CompileError> {
        let before = fresh.watermark();
        let mut out = Pbf::zero();
        for (term, coeff) in f.terms() {
            let reduced = if term.len() <= 2 {
                Pbf::monomial(term, coeff)
            } else {
                match (self.rule, coeff < 0.0) {
                    (TermRule::Mixed, true) | (TermRule::NegativeOnly, true) => {
                        quadratize_ntr_kzfd(term, coeff, fresh)?
                    }
                    (TermRule::Mixed, false) | (TermRule::PositiveOnly, false) => {
                        quadratize_ptr_bg(term, coeff, fresh)?
                    }
                    (TermRule::NegativeOnly, false) => {
                        return Err(CompileError::WrongSignForRule {
                            rule: "ntr-kzfd",
                            expected: "negative",
                            term: term.to_vec(),
                            coeff,
                        })
                    }
                    (TermRule::PositiveOnly, true) => {
                        return Err(CompileError::WrongSignForRule {
                            rule: "ptr-bg",
                            expected: "positive",
                            term: term.to_vec(),
                            coeff,
                        })
                    }
                }
            };
            out = Pbf::combine(1.0, &out, 1.0, &reduced);
        }
        let auxiliaries = (before..fresh.watermark()).collect();
        Ok((out, auxiliaries))
    }
}

/// Registry of quadratization methods, dispatched by name.
#[derive(Clone)]
pub struct QuadratizerRegistry {
    methods: BTreeMap<String, Arc<dyn Quadratizer>>,
}

impl Default for QuadratizerRegistry {
    fn default() -> Self {
        let mut registry = Self {
            methods: BTreeMap::new(),
        };
        registry
            .register(DEFAULT_QUADRATIZATION, Arc::new(TermwiseQuadratizer { rule: TermRule::Mixed }))
            .expect("fresh registry");
        registry
            .register("ntr-kzfd", Arc::new(TermwiseQuadratizer { rule: TermRule::NegativeOnly }))
            .expect("fresh registry");
        registry
            .register("ptr-bg", Arc::new(TermwiseQuadratizer { rule: TermRule::PositiveOnly }))
            .expect("fresh registry");
        registry
    }
}

impl QuadratizerRegistry {
    pub fn register(
        &mut self,
        name: &str,
        method: Arc<dyn Quadratizer>,
    ) -> Result<(), CompileError> {
        if self.methods.contains_key(name) {
            return Err(CompileError::DuplicateQuadratization(name.to_string()));
        }
        self.methods.insert(name.to_string(), method);
        Ok(())
    }

    pub fn names(&self) -> Vec<String> {
        self.methods.keys().cloned().collect()
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Quadratizer>, CompileError> {
        self.methods
            .get(name)
            .cloned()
            .ok_or_else(|| CompileError::UnknownQuadratization {
                name: name.to_string(),
                available: self.names(),
            })
    }
}

/// Reduces `f` to degree <= 2 with the named method; terms of degree <= 2
/// pass through untouched. Returns the reduced polynomial and the fresh
/// auxiliary ids it introduced.
pub fn quadratize(
    f: &Pbf,
    fresh: &mut IdAllocator,
    method: &str,
    registry: &QuadratizerRegistry,
) -> Result<(Pbf, Vec<VarId>), CompileError> {
    registry.get(method)?.quadratize(f, fresh)
}

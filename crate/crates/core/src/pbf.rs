//! Sparse pseudo-Boolean functions: real multilinear polynomials over binary
//! variables, stored as a map from canonical variable sets to coefficients.
//!
//! This is the working currency of the whole compilation pipeline. Keys are
//! duplicate-free, ascending id lists (the empty key is the constant term),
//! so `x*x = x` holds structurally and two functions that agree on every
//! binary assignment have identical term tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::de::{SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Identifier of a binary decision variable. Ids are assigned by the owning
/// model or compiler; this module never invents new ones.
pub type VarId = u32;

/// Errors raised by polynomial operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PbfError {
    #[error("variable {0} has no assigned value")]
    UnassignedVariable(VarId),
    #[error("substitution for variable {var} must be affine, got degree {degree}")]
    NonAffineSubstitution { var: VarId, degree: usize },
    #[error("substitution for variable {0} mentions the variable itself")]
    SelfReferentialSubstitution(VarId),
    #[error("term {term:?} has degree {degree}; only degree <= 2 fits a quadratic form")]
    NotQuadratic { term: Vec<VarId>, degree: usize },
}

/// Degree-two normal form extracted from a polynomial: linear coefficients,
/// strictly ordered quadratic coefficients, and the constant term.
pub type QuadraticForm = (BTreeMap<VarId, f64>, BTreeMap<(VarId, VarId), f64>, f64);

/// A real polynomial on binary variables in canonical multilinear form.
///
/// Invariants: every key is sorted and duplicate-free, and no stored
/// coefficient is exactly zero. Pruning uses `|c| == 0.0` only, so tiny
/// user-supplied coefficients survive and serialize bit-faithfully.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PseudoBooleanFunction {
    terms: BTreeMap<Vec<VarId>, f64>,
}

impl PseudoBooleanFunction {
    /// The zero polynomial.
    pub fn zero() -> Self {
        Self::default()
    }

    /// The constant polynomial `c`.
    pub fn constant(c: f64) -> Self {
        let mut f = Self::zero();
        f.add_term(&[], c);
        f
    }

    /// The polynomial consisting of the single variable `v`.
    pub fn variable(v: VarId) -> Self {
        Self::monomial(&[v], 1.0)
    }

    /// A single term `c * prod(vars)`; `vars` is canonicalized (sorted,
    /// deduplicated) on the way in.
    pub fn monomial(vars: &[VarId], c: f64) -> Self {
        let mut f = Self::zero();
        f.add_term(vars, c);
        f
    }

    /// Builds a polynomial from `(vars, coeff)` pairs, merging duplicates.
    pub fn from_terms<I, K>(terms: I) -> Self
    where
        I: IntoIterator<Item = (K, f64)>,
        K: AsRef<[VarId]>,
    {
        let mut f = Self::zero();
        for (key, c) in terms {
            f.add_term(key.as_ref(), c);
        }
        f
    }

    /// Adds `c * prod(vars)` in place, keeping canonical form.
    pub fn add_term(&mut self, vars: &[VarId], c: f64) {
        if c == 0.0 {
            return;
        }
        let key = canonical_key(vars);
        let entry = self.terms.entry(key).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            let key = canonical_key(vars);
            self.terms.remove(&key);
        }
    }

    /// Number of stored terms.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// True when no term is stored (the zero polynomial).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The coefficient of the empty term.
    pub fn constant_term(&self) -> f64 {
        self.terms.get(&Vec::new()).copied().unwrap_or(0.0)
    }

    /// Coefficient of an arbitrary term (zero when absent).
    pub fn coefficient(&self, vars: &[VarId]) -> f64 {
        self.terms.get(&canonical_key(vars)).copied().unwrap_or(0.0)
    }

    /// Iterates terms in canonical (lexicographic) key order.
    pub fn terms(&self) -> impl Iterator<Item = (&[VarId], f64)> {
        self.terms.iter().map(|(k, &c)| (k.as_slice(), c))
    }

    /// The set of variables mentioned by any term.
    pub fn variables(&self) -> BTreeSet<VarId> {
        self.terms.keys().flatten().copied().collect()
    }

    /// Evaluates `sum_w c_w * prod_{j in w} x_j` at the given assignment.
    ///
    /// This is plain multilinear evaluation, so it is also meaningful for
    /// integer-valued assignments (used by the model-level reference solver).
    pub fn evaluate(&self, assignment: &BTreeMap<VarId, f64>) -> Result<f64, PbfError> {
        let mut total = 0.0;
        for (key, &c) in &self.terms {
            let mut prod = c;
            for v in key {
                match assignment.get(v) {
                    Some(&x) => prod *= x,
                    None => return Err(PbfError::UnassignedVariable(*v)),
                }
            }
            total += prod;
        }
        Ok(total)
    }

    /// Linear combination `a*f + b*g` with exact term merging.
    pub fn combine(a: f64, f: &Self, b: f64, g: &Self) -> Self {
        let mut out = Self::zero();
        if a != 0.0 {
            for (key, c) in f.terms() {
                out.add_term(key, a * c);
            }
        }
        if b != 0.0 {
            for (key, c) in g.terms() {
                out.add_term(key, b * c);
            }
        }
        out
    }

    /// Scales every coefficient by `a`.
    pub fn scaled(&self, a: f64) -> Self {
        Self::combine(a, self, 0.0, &Self::zero())
    }

    /// Product polynomial with idempotent reduction `x*x = x` applied via
    /// set union of the term keys.
    pub fn multiply(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ka, ca) in self.terms() {
            for (kb, cb) in other.terms() {
                let mut key: Vec<VarId> = ka.to_vec();
                key.extend_from_slice(kb);
                out.add_term(&key, ca * cb);
            }
        }
        out
    }

    /// Replaces every occurrence of `v` by the affine polynomial `affine`,
    /// expanding and merging the result.
    ///
    /// The contract is formal polynomial substitution: idempotent reduction
    /// applies only to the (genuinely binary) variables appearing in the
    /// result, so replacements whose value ranges over integers are handled
    /// exactly as long as they never multiply themselves.
    pub fn substitute(&self, v: VarId, affine: &Self) -> Result<Self, PbfError> {
        let degree = affine.degree();
        if degree > 1 {
            return Err(PbfError::NonAffineSubstitution { var: v, degree });
        }
        if affine.variables().contains(&v) {
            return Err(PbfError::SelfReferentialSubstitution(v));
        }
        let mut out = Self::zero();
        for (key, c) in self.terms() {
            match key.iter().position(|&u| u == v) {
                None => out.add_term(key, c),
                Some(pos) => {
                    let mut rest = key.to_vec();
                    rest.remove(pos);
                    let expanded = Self::monomial(&rest, c).multiply(affine);
                    out = Self::combine(1.0, &out, 1.0, &expanded);
                }
            }
        }
        Ok(out)
    }

    /// Substitutes many variables in a single pass. Every replacement must be
    /// affine and must not mention any substituted variable.
    pub fn substitute_all(&self, map: &BTreeMap<VarId, Self>) -> Result<Self, PbfError> {
        for (&v, affine) in map {
            let degree = affine.degree();
            if degree > 1 {
                return Err(PbfError::NonAffineSubstitution { var: v, degree });
            }
            for u in affine.variables() {
                if map.contains_key(&u) {
                    return Err(PbfError::SelfReferentialSubstitution(u));
                }
            }
        }
        let mut out = Self::zero();
        for (key, c) in self.terms() {
            let (mapped, kept): (Vec<VarId>, Vec<VarId>) =
                key.iter().partition(|v| map.contains_key(v));
            let mut acc = Self::monomial(&kept, c);
            for v in mapped {
                acc = acc.multiply(&map[&v]);
            }
            out = Self::combine(1.0, &out, 1.0, &acc);
        }
        Ok(out)
    }

    /// Maximum term cardinality; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// Largest coefficient magnitude; 0 for the zero polynomial.
    pub fn delta(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// `(degree, delta)` in one scan.
    pub fn degree_and_delta(&self) -> (usize, f64) {
        (self.degree(), self.delta())
    }

    /// Smallest nonzero coefficient magnitude, if any term exists.
    pub fn min_abs_coefficient(&self) -> Option<f64> {
        self.terms
            .values()
            .map(|c| c.abs())
            .min_by(f64::total_cmp)
    }

    /// Splits a degree-<=2 polynomial into linear terms, strictly ordered
    /// quadratic terms and a constant.
    pub fn to_qubo_form(&self) -> Result<QuadraticForm, PbfError> {
        let mut linear = BTreeMap::new();
        let mut quadratic = BTreeMap::new();
        let mut constant = 0.0;
        for (key, c) in self.terms() {
            match key {
                [] => constant = c,
                [v] => {
                    linear.insert(*v, c);
                }
                [a, b] => {
                    quadratic.insert((*a, *b), c);
                }
                _ => {
                    return Err(PbfError::NotQuadratic {
                        term: key.to_vec(),
                        degree: key.len(),
                    })
                }
            }
        }
        Ok((linear, quadratic, constant))
    }
}

fn canonical_key(vars: &[VarId]) -> Vec<VarId> {
    let mut key = vars.to_vec();
    key.sort_unstable();
    key.dedup();
    key
}

impl fmt::Display for PseudoBooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (key, c)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " {} ", if c < 0.0 { "-" } else { "+" })?;
            } else if c < 0.0 {
                write!(f, "-")?;
            }
            let mag = c.abs();
            if key.is_empty() {
                write!(f, "{mag}")?;
            } else {
                if mag != 1.0 {
                    write!(f, "{mag}*")?;
                }
                let names: Vec<String> = key.iter().map(|v| format!("x{v}")).collect();
                write!(f, "{}", names.join("*"))?;
            }
        }
        Ok(())
    }
}

// Serialized as a list of [[ids...], coeff] pairs in canonical order, since
// JSON object keys cannot be id sets.
impl Serialize for PseudoBooleanFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (key, c) in self.terms() {
            seq.serialize_element(&(key, c))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for PseudoBooleanFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct TermsVisitor;
        impl<'de> Visitor<'de> for TermsVisitor {
            type Value = PseudoBooleanFunction;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "a list of [[variable ids], coefficient] pairs")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
                let mut out = PseudoBooleanFunction::zero();
                while let Some((key, c)) = seq.next_element::<(Vec<VarId>, f64)>()? {
                    out.add_term(&key, c);
                }
                Ok(out)
            }
        }
        deserializer.deserialize_seq(TermsVisitor)
    }
}

impl std::ops::Add for &PseudoBooleanFunction {
    type Output = PseudoBooleanFunction;
    fn add(self, rhs: Self) -> PseudoBooleanFunction {
        PseudoBooleanFunction::combine(1.0, self, 1.0, rhs)
    }
}

impl std::ops::Sub for &PseudoBooleanFunction {
    type Output = PseudoBooleanFunction;
    fn sub(self, rhs: Self) -> PseudoBooleanFunction {
        PseudoBooleanFunction::combine(1.0, self, -1.0, rhs)
    }
}

impl std::ops::Mul for &PseudoBooleanFunction {
    type Output = PseudoBooleanFunction;
    fn mul(self, rhs: Self) -> PseudoBooleanFunction {
        self.multiply(rhs)
    }
}

impl std::ops::Neg for &PseudoBooleanFunction {
    type Output = PseudoBooleanFunction;
    fn neg(self) -> PseudoBooleanFunction {
        self.scaled(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assign(pairs: &[(VarId, f64)]) -> BTreeMap<VarId, f64> {
        pairs.iter().copied().collect()
    }

    /// 1 - x1 - x2 + 2*x1*x2, the running example of the test suite.
    fn sample_quadratic() -> PseudoBooleanFunction {
        PseudoBooleanFunction::from_terms([
            (vec![], 1.0),
            (vec![1], -1.0),
            (vec![2], -1.0),
            (vec![1, 2], 2.0),
        ])
    }

    #[test]
    fn evaluate_empty_polynomial_is_zero() {
        let f = PseudoBooleanFunction::zero();
        assert_eq!(f.evaluate(&assign(&[(1, 1.0)])).unwrap(), 0.0);
        assert_eq!(f.evaluate(&BTreeMap::new()).unwrap(), 0.0);
    }

    #[test]
    fn evaluate_quadratic_over_full_table() {
        let f = sample_quadratic();
        // Expected values computed by direct arithmetic on each of the four
        // assignments of B^2.
        let table = [
            ((0.0, 0.0), 1.0),
            ((1.0, 0.0), 0.0),
            ((0.0, 1.0), 0.0),
            ((1.0, 1.0), 1.0),
        ];
        for ((x1, x2), want) in table {
            let got = f.evaluate(&assign(&[(1, x1), (2, x2)])).unwrap();
            assert_eq!(got, want, "at ({x1},{x2})");
        }
    }

    #[test]
    fn evaluate_absent_factor_annihilates_term() {
        let f = PseudoBooleanFunction::monomial(&[1, 2, 3], 3.0);
        let got = f
            .evaluate(&assign(&[(1, 1.0), (2, 1.0), (3, 0.0)]))
            .unwrap();
        assert_eq!(got, 0.0);
    }

    #[test]
    fn evaluate_missing_assignment_names_the_variable() {
        let f = PseudoBooleanFunction::variable(7);
        assert_eq!(
            f.evaluate(&BTreeMap::new()),
            Err(PbfError::UnassignedVariable(7))
        );
    }

    #[test]
    fn combine_cancellation_yields_zero() {
        let x1 = PseudoBooleanFunction::variable(1);
        let neg = x1.scaled(-1.0);
        let out = PseudoBooleanFunction::combine(1.0, &x1, 1.0, &neg);
        assert!(out.is_zero());
    }

    #[test]
    fn combine_zero_weight_drops_operand() {
        let f = PseudoBooleanFunction::from_terms([(vec![1], 1.0), (vec![2], 1.0)]);
        let junk = PseudoBooleanFunction::from_terms([(vec![9], 123.0)]);
        let out = PseudoBooleanFunction::combine(2.0, &f, 0.0, &junk);
        assert_eq!(out.coefficient(&[1]), 2.0);
        assert_eq!(out.coefficient(&[2]), 2.0);
        assert_eq!(out.num_terms(), 2);
    }

    #[test]
    fn combine_merges_shared_terms() {
        let f = PseudoBooleanFunction::from_terms([(vec![], 1.0), (vec![1, 2], 1.0)]);
        let g = PseudoBooleanFunction::monomial(&[1, 2], 1.0);
        let out = PseudoBooleanFunction::combine(1.0, &f, 1.0, &g);
        assert_eq!(out.coefficient(&[]), 1.0);
        assert_eq!(out.coefficient(&[1, 2]), 2.0);
        // Cross-check against evaluation on all of B^2.
        for x1 in [0.0, 1.0] {
            for x2 in [0.0, 1.0] {
                let a = assign(&[(1, x1), (2, x2)]);
                assert_eq!(
                    out.evaluate(&a).unwrap(),
                    f.evaluate(&a).unwrap() + g.evaluate(&a).unwrap()
                );
            }
        }
    }

    #[test]
    fn multiply_is_idempotent_on_repeated_variable() {
        let x1 = PseudoBooleanFunction::variable(1);
        let out = x1.multiply(&x1);
        assert_eq!(out, x1);
    }

    #[test]
    fn multiply_squares_affine_expression() {
        // (x1 + x2 - 1)^2 = 1 - x1 - x2 + 2*x1*x2 under idempotence.
        let g = PseudoBooleanFunction::from_terms([(vec![1], 1.0), (vec![2], 1.0), (vec![], -1.0)]);
        let sq = g.multiply(&g);
        assert_eq!(sq, sample_quadratic());
        for x1 in [0.0, 1.0] {
            for x2 in [0.0, 1.0] {
                let a = assign(&[(1, x1), (2, x2)]);
                let gv = g.evaluate(&a).unwrap();
                assert_eq!(sq.evaluate(&a).unwrap(), gv * gv);
            }
        }
    }

    #[test]
    fn multiply_takes_set_union_of_keys() {
        let a = PseudoBooleanFunction::monomial(&[1, 2], 1.0);
        let b = PseudoBooleanFunction::monomial(&[2, 3], 1.0);
        assert_eq!(a.multiply(&b), PseudoBooleanFunction::monomial(&[1, 2, 3], 1.0));
    }

    #[test]
    fn substitute_relabels_and_flips() {
        let x1 = PseudoBooleanFunction::variable(1);
        let flip = PseudoBooleanFunction::from_terms([(vec![], 1.0), (vec![10], -1.0)]);
        let out = x1.substitute(1, &flip).unwrap();
        assert_eq!(out, flip);
    }

    #[test]
    fn substitute_expands_products() {
        // x1*x2 with x2 := y1 + 2*y2 becomes x1*y1 + 2*x1*y2.
        let f = PseudoBooleanFunction::monomial(&[1, 2], 1.0);
        let affine = PseudoBooleanFunction::from_terms([(vec![10], 1.0), (vec![11], 2.0)]);
        let out = f.substitute(2, &affine).unwrap();
        assert_eq!(out.coefficient(&[1, 10]), 1.0);
        assert_eq!(out.coefficient(&[1, 11]), 2.0);
        assert_eq!(out.num_terms(), 2);
        // Evaluation agreement on every binary assignment of (x1, y1, y2).
        for bits in 0..8u32 {
            let x1 = f64::from(bits & 1);
            let y1 = f64::from((bits >> 1) & 1);
            let y2 = f64::from((bits >> 2) & 1);
            let a = assign(&[(1, x1), (10, y1), (11, y2)]);
            let x2 = affine.evaluate(&a).unwrap();
            let src = f
                .evaluate(&assign(&[(1, x1), (2, x2)]))
                .unwrap();
            assert_eq!(out.evaluate(&a).unwrap(), src);
        }
    }

    #[test]
    fn substitute_eliminates_with_zero() {
        let f = PseudoBooleanFunction::monomial(&[1], 2.0);
        let out = f.substitute(1, &PseudoBooleanFunction::zero()).unwrap();
        assert!(out.is_zero());
    }

    #[test]
    fn substitute_rejects_bad_replacements() {
        let f = PseudoBooleanFunction::variable(1);
        let quad = PseudoBooleanFunction::monomial(&[2, 3], 1.0);
        assert!(matches!(
            f.substitute(1, &quad),
            Err(PbfError::NonAffineSubstitution { var: 1, degree: 2 })
        ));
        let selfref = PseudoBooleanFunction::variable(1);
        assert!(matches!(
            f.substitute(1, &selfref),
            Err(PbfError::SelfReferentialSubstitution(1))
        ));
    }

    #[test]
    fn degree_and_delta_scan() {
        assert_eq!(PseudoBooleanFunction::zero().degree_and_delta(), (0, 0.0));
        assert_eq!(sample_quadratic().degree_and_delta(), (2, 2.0));
        let f = PseudoBooleanFunction::from_terms([(vec![1, 2, 3], 5.0), (vec![1], -1.0)]);
        assert_eq!(f.degree_and_delta(), (3, 5.0));
    }

    #[test]
    fn qubo_form_of_zero() {
        let (lin, quad, c) = PseudoBooleanFunction::zero().to_qubo_form().unwrap();
        assert!(lin.is_empty() && quad.is_empty());
        assert_eq!(c, 0.0);
    }

    #[test]
    fn qubo_form_splits_terms() {
        let (lin, quad, c) = sample_quadratic().to_qubo_form().unwrap();
        assert_eq!(lin.get(&1), Some(&-1.0));
        assert_eq!(lin.get(&2), Some(&-1.0));
        assert_eq!(quad.get(&(1, 2)), Some(&2.0));
        assert_eq!(c, 1.0);
        // Round trip: rebuilding from the parts gives the same polynomial.
        let mut rebuilt = PseudoBooleanFunction::constant(c);
        for (v, coeff) in lin {
            rebuilt.add_term(&[v], coeff);
        }
        for ((a, b), coeff) in quad {
            rebuilt.add_term(&[a, b], coeff);
        }
        assert_eq!(rebuilt, sample_quadratic());
    }

    #[test]
    fn qubo_form_rejects_cubic_terms() {
        let f = PseudoBooleanFunction::monomial(&[1, 2, 3], 1.0);
        assert_eq!(
            f.to_qubo_form(),
            Err(PbfError::NotQuadratic {
                term: vec![1, 2, 3],
                degree: 3
            })
        );
    }

    #[test]
    fn serde_round_trip() {
        let f = sample_quadratic();
        let text = serde_json::to_string(&f).unwrap();
        let back: PseudoBooleanFunction = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
    }

    /// Independent oracle: the unique multilinear coefficients of a function
    /// given by its truth table, via Moebius inversion over subsets.
    fn moebius_coefficients(n: u32, table: &[f64]) -> BTreeMap<Vec<VarId>, f64> {
        let mut out = BTreeMap::new();
        for omega in 0..(1u32 << n) {
            let mut c = 0.0;
            // Sum over subsets sigma of omega.
            let mut sigma = omega;
            loop {
                let sign = if (omega.count_ones() - sigma.count_ones()) % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                c += sign * table[sigma as usize];
                if sigma == 0 {
                    break;
                }
                sigma = (sigma - 1) & omega;
            }
            if c != 0.0 {
                let key: Vec<VarId> = (0..n).filter(|i| omega >> i & 1 == 1).collect();
                out.insert(key, c);
            }
        }
        out
    }

    fn truth_table(f: &PseudoBooleanFunction, n: u32) -> Vec<f64> {
        (0..(1u32 << n))
            .map(|bits| {
                let a: BTreeMap<VarId, f64> =
                    (0..n).map(|i| (i, f64::from(bits >> i & 1))).collect();
                f.evaluate(&a).unwrap()
            })
            .collect()
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        /// Integer-coefficient polynomials over a handful of variables keep
        /// every float operation exact, so the algebra checks below can use
        /// strict equality.
        fn arb_pbf(n_vars: u32, max_terms: usize) -> impl Strategy<Value = PseudoBooleanFunction> {
            prop::collection::vec(
                (
                    prop::collection::btree_set(0..n_vars, 0..=(n_vars as usize)),
                    -4i32..=4,
                ),
                0..=max_terms,
            )
            .prop_map(|terms| {
                PseudoBooleanFunction::from_terms(
                    terms
                        .into_iter()
                        .map(|(k, c)| (k.into_iter().collect::<Vec<_>>(), f64::from(c))),
                )
            })
        }

        proptest! {
            #[test]
            fn combine_matches_pointwise_arithmetic(
                f in arb_pbf(4, 6),
                g in arb_pbf(4, 6),
                a in -3i32..=3,
                b in -3i32..=3,
            ) {
                let out = PseudoBooleanFunction::combine(f64::from(a), &f, f64::from(b), &g);
                for bits in 0..16u32 {
                    let x: BTreeMap<VarId, f64> =
                        (0..4).map(|i| (i, f64::from(bits >> i & 1))).collect();
                    let want = f64::from(a) * f.evaluate(&x).unwrap()
                        + f64::from(b) * g.evaluate(&x).unwrap();
                    prop_assert_eq!(out.evaluate(&x).unwrap(), want);
                }
            }

            #[test]
            fn multiply_matches_pointwise_arithmetic(f in arb_pbf(4, 6), g in arb_pbf(4, 6)) {
                let out = f.multiply(&g);
                prop_assert!(out.degree() <= f.degree() + g.degree());
                for bits in 0..16u32 {
                    let x: BTreeMap<VarId, f64> =
                        (0..4).map(|i| (i, f64::from(bits >> i & 1))).collect();
                    let want = f.evaluate(&x).unwrap() * g.evaluate(&x).unwrap();
                    prop_assert_eq!(out.evaluate(&x).unwrap(), want);
                }
            }

            #[test]
            fn canonical_form_is_unique(f in arb_pbf(6, 10)) {
                // Interpolating the truth table recovers exactly the stored
                // term map: the multilinear representation is unique.
                let table = truth_table(&f, 6);
                let interp = moebius_coefficients(6, &table);
                let stored: BTreeMap<Vec<VarId>, f64> =
                    f.terms().map(|(k, c)| (k.to_vec(), c)).collect();
                prop_assert_eq!(interp, stored);
            }

            #[test]
            fn qubo_form_round_trips(f in arb_pbf(5, 8)) {
                prop_assume!(f.degree() <= 2);
                let (lin, quad, c) = f.to_qubo_form().unwrap();
                let mut rebuilt = PseudoBooleanFunction::constant(c);
                for (v, coeff) in lin {
                    rebuilt.add_term(&[v], coeff);
                }
                for ((a, b), coeff) in quad {
                    rebuilt.add_term(&[a, b], coeff);
                }
                prop_assert_eq!(rebuilt, f);
            }
        }
    }
}

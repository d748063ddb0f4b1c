//! The sampler contract: a single `sample` entry point per backend, typed
//! per-sampler attributes, a name-based registry, and the reference
//! backends (exact, random, identity, simulated annealing).

mod backends;
mod sampleset;

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::formats::{FormatError, QuboInstance};

pub use backends::{ExactSampler, IdentitySampler, RandomSampler, SimulatedAnnealingSampler};
pub use sampleset::{Sample, SampleSet, Timing};

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("instance has {variables} variables, above the exact-enumeration cap of {cap}")]
    CapacityExceeded { variables: usize, cap: u32 },
    #[error("sampler '{sampler}' does not accept attribute '{attribute}' (known: {known:?})")]
    UnknownAttribute {
        sampler: String,
        attribute: String,
        known: Vec<&'static str>,
    },
    #[error("attribute '{attribute}' expects a {expected} value")]
    AttributeType {
        attribute: String,
        expected: &'static str,
    },
    #[error("sampler '{sampler}' requires attribute '{attribute}'")]
    MissingAttribute {
        sampler: String,
        attribute: &'static str,
    },
    #[error("invalid sampler parameters: {0}")]
    InvalidParams(String),
    #[error("a sampler named '{0}' is already registered")]
    DuplicateSampler(String),
    #[error("unknown sampler '{name}'; registered samplers: {available:?}")]
    UnknownSampler { name: String, available: Vec<String> },
    #[error(transparent)]
    Format(#[from] FormatError),
}

/// A typed attribute value.
#[derive(Debug, Clone, PartialEq)]
pub enum AttrValue {
    Int(i64),
    Float(f64),
    IntList(Vec<i64>),
}

/// Expected type of a declared attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttrKind {
    Int,
    Float,
    IntList,
}

impl AttrKind {
    fn name(self) -> &'static str {
        match self {
            AttrKind::Int => "integer",
            AttrKind::Float => "float",
            AttrKind::IntList => "integer list",
        }
    }

    fn matches(self, value: &AttrValue) -> bool {
        matches!(
            (self, value),
            (AttrKind::Int, AttrValue::Int(_))
                | (AttrKind::Float, AttrValue::Float(_))
                | (AttrKind::Float, AttrValue::Int(_))
                | (AttrKind::IntList, AttrValue::IntList(_))
        )
    }
}

/// One entry of a sampler's attribute schema.
#[derive(Debug, Clone, Copy)]
pub struct AttributeSpec {
    pub name: &'static str,
    pub kind: AttrKind,
}

/// Parameters shared by every sampler plus the per-sampler attribute map.
/// Unknown attribute names are rejected when the sampler is invoked.
#[derive(Debug, Clone, Default)]
pub struct SamplerParams {
    pub num_reads: u64,
    pub seed: Option<u64>,
    pub attributes: BTreeMap<String, AttrValue>,
}

impl SamplerParams {
    pub fn new(num_reads: u64) -> Self {
        Self {
            num_reads,
            seed: None,
            attributes: BTreeMap::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_attr(mut self, name: &str, value: AttrValue) -> Self {
        self.attributes.insert(name.to_string(), value);
        self
    }

    /// An unset seed means the documented default stream (seed 0), keeping
    /// every run reproducible.
    pub fn effective_seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    fn get_int(&self, name: &str, default: i64) -> Result<i64, SamplerError> {
        match self.attributes.get(name) {
            None => Ok(default),
            Some(AttrValue::Int(v)) => Ok(*v),
            Some(_) => Err(SamplerError::AttributeType {
                attribute: name.to_string(),
                expected: AttrKind::Int.name(),
            }),
        }
    }

    fn get_float(&self, name: &str, default: f64) -> Result<f64, SamplerError> {
        match self.attributes.get(name) {
            None => Ok(default),
            Some(AttrValue::Float(v)) => Ok(*v),
            Some(AttrValue::Int(v)) => Ok(*v as f64),
            Some(_) => Err(SamplerError::AttributeType {
                attribute: name.to_string(),
                expected: AttrKind::Float.name(),
            }),
        }
    }
}

/// The interface every backend implements. `sample` must be deterministic
/// for a fixed seed and return a pool satisfying the `SampleSet` invariants.
pub trait Sampler: Send + Sync {
    fn name(&self) -> &'static str;

    /// Declared attribute schema; anything else is a configuration error.
    fn attributes(&self) -> &'static [AttributeSpec];

    fn sample(&self, q: &QuboInstance, params: &SamplerParams)
        -> Result<SampleSet, SamplerError>;

    /// Validates the common parameters and the attribute map against the
    /// declared schema. Backends call this before doing any work.
    fn validate_params(&self, params: &SamplerParams) -> Result<(), SamplerError> {
        if params.num_reads == 0 {
            return Err(SamplerError::InvalidParams(
                "num_reads must be at least 1".to_string(),
            ));
        }
        let schema = self.attributes();
        for (name, value) in &params.attributes {
            match schema.iter().find(|spec| spec.name == name) {
                None => {
                    return Err(SamplerError::UnknownAttribute {
                        sampler: self.name().to_string(),
                        attribute: name.clone(),
                        known: schema.iter().map(|s| s.name).collect(),
                    })
                }
                Some(spec) if !spec.kind.matches(value) => {
                    return Err(SamplerError::AttributeType {
                        attribute: name.clone(),
                        expected: spec.kind.name(),
                    })
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Name-based sampler registry. Starts empty; `with_builtins` pre-loads the
/// four reference backends.
#[derive(Clone, Default)]
pub struct SamplerRegistry {
    samplers: BTreeMap<String, Arc<dyn Sampler>>,
}

impl SamplerRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_builtins() -> Self {
        let mut registry = Self::new();
        registry
            .register(Arc::new(ExactSampler::default()))
            .expect("fresh registry");
        registry
            .register(Arc::new(RandomSampler))
            .expect("fresh registry");
        registry
            .register(Arc::new(IdentitySampler))
            .expect("fresh registry");
        registry
            .register(Arc::new(SimulatedAnnealingSampler))
            .expect("fresh registry");
        registry
    }

    /// Registers a sampler under its own name; duplicates are rejected.
    pub fn register(&mut self, sampler: Arc<dyn Sampler>) -> Result<(), SamplerError> {
        let name = sampler.name().to_string();
        if self.samplers.contains_key(&name) {
            return Err(SamplerError::DuplicateSampler(name));
        }
        self.samplers.insert(name, sampler);
        Ok(())
    }

    pub fn names(&self) -> Vec<String> {
        self.samplers.keys().cloned().collect()
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Sampler>, SamplerError> {
        self.samplers
            .get(name)
            .cloned()
            .ok_or_else(|| SamplerError::UnknownSampler {
                name: name.to_string(),
                available: self.names(),
            })
    }

    /// Dispatches `sample` to the named backend.
    pub fn sample(
        &self,
        name: &str,
        q: &QuboInstance,
        params: &SamplerParams,
    ) -> Result<SampleSet, SamplerError> {
        self.get(name)?.sample(q, params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::Domain;

    fn instance() -> QuboInstance {
        QuboInstance::new(
            Domain::Boolean,
            vec![0, 1],
            [(0, 1.0), (1, 1.0)].into(),
            BTreeMap::new(),
            1.0,
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn registry_dispatches_by_name() {
        let registry = SamplerRegistry::with_builtins();
        let set = registry
            .sample("exact", &instance(), &SamplerParams::new(1))
            .unwrap();
        assert_eq!(set.len(), 4);
        assert_eq!(set.best().unwrap().value, 0.0);
    }

    #[test]
    fn duplicate_registration_is_rejected() {
        let mut registry = SamplerRegistry::with_builtins();
        let err = registry.register(Arc::new(RandomSampler));
        assert!(matches!(err, Err(SamplerError::DuplicateSampler(name)) if name == "random"));
    }

    #[test]
    fn unknown_sampler_lists_registered_names() {
        let registry = SamplerRegistry::with_builtins();
        let Err(err) = registry.get("nosuch") else {
            panic!("lookup must fail");
        };
        match err {
            SamplerError::UnknownSampler { name, available } => {
                assert_eq!(name, "nosuch");
                assert_eq!(available, vec!["exact", "identity", "random", "sa"]);
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn unknown_attribute_names_the_attribute() {
        let registry = SamplerRegistry::with_builtins();
        let params = SamplerParams::new(1).with_attr("bogus", AttrValue::Int(1));
        let err = registry.sample("random", &instance(), &params).unwrap_err();
        match err {
            SamplerError::UnknownAttribute { attribute, .. } => assert_eq!(attribute, "bogus"),
            other => panic!("unexpected error: {other}"),
        }
    }
}

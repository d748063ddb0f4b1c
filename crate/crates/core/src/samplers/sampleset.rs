//! Aggregated, energy-sorted solution pools.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::formats::{Domain, FormatError, QuboInstance};

/// Wall-clock accounting for a sampling run. `effective_seconds` is
/// backend-defined (e.g. pure anneal time) and optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub total_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub effective_seconds: Option<f64>,
}

impl Timing {
    pub fn zero() -> Self {
        Self {
            total_seconds: 0.0,
            effective_seconds: None,
        }
    }

    pub fn total(total_seconds: f64) -> Self {
        Self {
            total_seconds,
            effective_seconds: None,
        }
    }
}

/// One aggregated state: the dense assignment, its energy, and how many
/// reads landed on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub state: Vec<i8>,
    pub value: f64,
    pub reads: u64,
}

/// A pool of samples sorted ascending by value, with identical states merged
/// and their read counts summed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    domain: Domain,
    samples: Vec<Sample>,
    timing: Timing,
    metadata: BTreeMap<String, String>,
}

impl SampleSet {
    /// Builds a pool from raw `(state, reads)` observations, computing each
    /// energy from the instance. Zero-read entries are dropped.
    pub fn from_states<I>(
        q: &QuboInstance,
        states: I,
        timing: Timing,
        metadata: BTreeMap<String, String>,
    ) -> Result<Self, FormatError>
    where
        I: IntoIterator<Item = (Vec<i8>, u64)>,
    {
        let mut aggregated: BTreeMap<Vec<i8>, u64> = BTreeMap::new();
        for (state, reads) in states {
            if reads == 0 {
                continue;
            }
            *aggregated.entry(state).or_insert(0) += reads;
        }
        let mut samples = Vec::with_capacity(aggregated.len());
        for (state, reads) in aggregated {
            let value = q.energy(&state)?;
            samples.push(Sample { state, value, reads });
        }
        sort_samples(&mut samples);
        Ok(Self {
            domain: q.domain(),
            samples,
            timing,
            metadata,
        })
    }

    /// Builds a pool from pre-evaluated samples, re-checking every stated
    /// value against the instance to one part in 1e9.
    pub fn from_samples_checked(
        q: &QuboInstance,
        samples: Vec<Sample>,
        timing: Timing,
        metadata: BTreeMap<String, String>,
    ) -> Result<Self, FormatError> {
        for (index, sample) in samples.iter().enumerate() {
            let computed = q.energy(&sample.state)?;
            if (computed - sample.value).abs() > 1e-9 * sample.value.abs().max(1.0) {
                return Err(FormatError::EvaluationMismatch {
                    index,
                    stated: sample.value,
                    computed,
                });
            }
        }
        Self::from_states(
            q,
            samples.into_iter().map(|s| (s.state, s.reads)),
            timing,
            metadata,
        )
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Lowest-energy sample, when any read occurred.
    pub fn best(&self) -> Option<&Sample> {
        self.samples.first()
    }

    pub fn total_reads(&self) -> u64 {
        self.samples.iter().map(|s| s.reads).sum()
    }

    pub fn timing(&self) -> &Timing {
        &self.timing
    }

    pub fn set_timing(&mut self, timing: Timing) {
        self.timing = timing;
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    /// Maps every state through the boolean/spin bijection; values are
    /// untouched because the bijection preserves energies.
    pub fn converted_to_domain(&self, domain: Domain) -> Self {
        if domain == self.domain {
            return self.clone();
        }
        let samples = self
            .samples
            .iter()
            .map(|s| Sample {
                state: s
                    .state
                    .iter()
                    .map(|&v| match domain {
                        Domain::Spin => 2 * v - 1,
                        Domain::Boolean => (v + 1) / 2,
                    })
                    .collect(),
                value: s.value,
                reads: s.reads,
            })
            .collect();
        let mut out = Self {
            domain,
            samples,
            timing: self.timing.clone(),
            metadata: self.metadata.clone(),
        };
        sort_samples(&mut out.samples);
        out
    }

    /// Deterministic JSON serialization (sorted keys, newline-terminated).
    pub fn to_json_string(&self) -> String {
        let value = serde_json::to_value(self).expect("sample set serializes");
        let mut text = value.to_string();
        text.push('\n');
        text
    }

    /// Parses and normalizes (aggregates, sorts) a sample-set document.
    pub fn from_json_str(text: &str) -> Result<Self, FormatError> {
        let raw: SampleSet =
            serde_json::from_str(text).map_err(|e| FormatError::from_json(&e))?;
        let mut width: Option<usize> = None;
        for sample in &raw.samples {
            if sample.reads == 0 {
                return Err(FormatError::MalformedLine {
                    line: 0,
                    content: "sample with zero reads".to_string(),
                });
            }
            match width {
                None => width = Some(sample.state.len()),
                Some(w) if w != sample.state.len() => {
                    return Err(FormatError::StateLength {
                        expected: w,
                        found: sample.state.len(),
                    })
                }
                _ => {}
            }
            for &v in &sample.state {
                if !raw.domain.admits(v) {
                    return Err(FormatError::DomainValue {
                        domain: raw.domain,
                        value: v,
                    });
                }
            }
        }
        let mut aggregated: BTreeMap<Vec<i8>, (f64, u64)> = BTreeMap::new();
        for sample in raw.samples {
            let entry = aggregated
                .entry(sample.state)
                .or_insert((sample.value, 0));
            entry.1 += sample.reads;
        }
        let mut samples: Vec<Sample> = aggregated
            .into_iter()
            .map(|(state, (value, reads))| Sample { state, value, reads })
            .collect();
        sort_samples(&mut samples);
        Ok(Self {
            domain: raw.domain,
            samples,
            timing: raw.timing,
            metadata: raw.metadata,
        })
    }
}

fn sort_samples(samples: &mut [Sample]) {
    samples.sort_by(|a, b| a.value.total_cmp(&b.value).then_with(|| a.state.cmp(&b.state)));
}

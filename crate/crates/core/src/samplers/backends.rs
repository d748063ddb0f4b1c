//! The four reference backends. Every backend draws randomness from a
//! seeded ChaCha8 stream (one stream per read, keyed by `seed + read`), so
//! results are reproducible across platforms.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formats::{Domain, QuboInstance};

use super::{
    AttrKind, AttrValue, AttributeSpec, Sampler, SamplerError, SamplerParams, SampleSet, Timing,
};

fn run_metadata(name: &str, params: &SamplerParams) -> BTreeMap<String, String> {
    [
        ("sampler".to_string(), name.to_string()),
        ("num_reads".to_string(), params.num_reads.to_string()),
        ("seed".to_string(), params.effective_seed().to_string()),
    ]
    .into()
}

fn domain_values(domain: Domain) -> [i8; 2] {
    match domain {
        Domain::Boolean => [0, 1],
        Domain::Spin => [-1, 1],
    }
}

/// Enumerates the full state space and returns every state once, so the
/// pool is the complete, sorted spectrum of the instance.
pub struct ExactSampler {
    /// Refuses instances above this many variables unless overridden by the
    /// `cap` attribute.
    pub default_cap: u32,
}

impl Default for ExactSampler {
    fn default() -> Self {
        Self { default_cap: 24 }
    }
}

const EXACT_ATTRS: &[AttributeSpec] = &[AttributeSpec {
    name: "cap",
    kind: AttrKind::Int,
}];

impl Sampler for ExactSampler {
    fn name(&self) -> &'static str {
        "exact"
    }

    fn attributes(&self) -> &'static [AttributeSpec] {
        EXACT_ATTRS
    }

    fn sample(
        &self,
        q: &QuboInstance,
        params: &SamplerParams,
    ) -> Result<SampleSet, SamplerError> {
        self.validate_params(params)?;
        let cap = params.get_int("cap", i64::from(self.default_cap))?;
        let cap = u32::try_from(cap.max(0)).unwrap_or(0);
        let n = q.num_variables();
        if n as u64 > u64::from(cap) {
            return Err(SamplerError::CapacityExceeded { variables: n, cap });
        }
        let start = Instant::now();
        let values = domain_values(q.domain());
        let mut states = Vec::with_capacity(1usize << n);
        for word in 0..(1u64 << n) {
            let state: Vec<i8> = (0..n).map(|i| values[(word >> i & 1) as usize]).collect();
            states.push((state, 1));
        }
        let timing = Timing::total(start.elapsed().as_secs_f64());
        Ok(SampleSet::from_states(
            q,
            states,
            timing,
            run_metadata(self.name(), params),
        )?)
    }
}

/// Draws `num_reads` independent uniform states.
pub struct RandomSampler;

impl Sampler for RandomSampler {
    fn name(&self) -> &'static str {
        "random"
    }

    fn attributes(&self) -> &'static [AttributeSpec] {
        &[]
    }

    fn sample(
        &self,
        q: &QuboInstance,
        params: &SamplerParams,
    ) -> Result<SampleSet, SamplerError> {
        self.validate_params(params)?;
        let start = Instant::now();
        let values = domain_values(q.domain());
        let n = q.num_variables();
        let seed = params.effective_seed();
        let mut states = Vec::with_capacity(params.num_reads as usize);
        for read in 0..params.num_reads {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(read));
            let state: Vec<i8> = (0..n).map(|_| values[usize::from(rng.gen::<bool>())]).collect();
            states.push((state, 1));
        }
        let timing = Timing::total(start.elapsed().as_secs_f64());
        Ok(SampleSet::from_states(
            q,
            states,
            timing,
            run_metadata(self.name(), params),
        )?)
    }
}

/// Echoes a caller-provided state, useful for warm starts and for pushing a
/// known assignment through the decode pipeline.
pub struct IdentitySampler;

const IDENTITY_ATTRS: &[AttributeSpec] = &[AttributeSpec {
    name: "initial_state",
    kind: AttrKind::IntList,
}];

impl Sampler for IdentitySampler {
    fn name(&self) -> &'static str {
        "identity"
    }

    fn attributes(&self) -> &'static [AttributeSpec] {
        IDENTITY_ATTRS
    }

    fn sample(
        &self,
        q: &QuboInstance,
        params: &SamplerParams,
    ) -> Result<SampleSet, SamplerError> {
        self.validate_params(params)?;
        let raw = match params.attributes.get("initial_state") {
            Some(AttrValue::IntList(values)) => values,
            _ => {
                return Err(SamplerError::MissingAttribute {
                    sampler: self.name().to_string(),
                    attribute: "initial_state",
                })
            }
        };
        let state: Vec<i8> = raw
            .iter()
            .map(|&v| {
                i8::try_from(v).map_err(|_| SamplerError::InvalidParams(
                    format!("initial_state entry {v} is out of range"),
                ))
            })
            .collect::<Result<_, _>>()?;
        let start = Instant::now();
        let states = vec![(state, params.num_reads)];
        let timing = Timing::total(start.elapsed().as_secs_f64());
        Ok(SampleSet::from_states(
            q,
            states,
            timing,
            run_metadata(self.name(), params),
        )?)
    }
}

/// Single-flip Metropolis annealing on a geometric inverse-temperature
/// schedule. Each read starts from a fresh random state and records the
/// state left standing after the final sweep; flip costs are evaluated
/// incrementally through an adjacency list.
pub struct SimulatedAnnealingSampler;

const SA_ATTRS: &[AttributeSpec] = &[
    AttributeSpec {
        name: "sweeps",
        kind: AttrKind::Int,
    },
    AttributeSpec {
        name: "beta_min",
        kind: AttrKind::Float,
    },
    AttributeSpec {
        name: "beta_max",
        kind: AttrKind::Float,
    },
];

impl Sampler for SimulatedAnnealingSampler {
    fn name(&self) -> &'static str {
        "sa"
    }

    fn attributes(&self) -> &'static [AttributeSpec] {
        SA_ATTRS
    }

    fn sample(
        &self,
        q: &QuboInstance,
        params: &SamplerParams,
    ) -> Result<SampleSet, SamplerError> {
        self.validate_params(params)?;
        let sweeps = params.get_int("sweeps", 1000)?;
        let beta_min = params.get_float("beta_min", 0.1)?;
        let beta_max = params.get_float("beta_max", 10.0)?;
        if sweeps < 1 {
            return Err(SamplerError::InvalidParams(
                "sweeps must be at least 1".to_string(),
            ));
        }
        if !(beta_min > 0.0) || !(beta_min <= beta_max) || !beta_max.is_finite() {
            return Err(SamplerError::InvalidParams(format!(
                "schedule requires 0 < beta_min <= beta_max, got [{beta_min}, {beta_max}]"
            )));
        }

        let start = Instant::now();
        let positional = q.positional_terms();
        let n = positional.linear.len();
        let domain = q.domain();
        let values = domain_values(domain);
        // Energy-unit fields: scale folded in once so flip costs come out in
        // the same units the pool reports.
        let linear: Vec<f64> = positional.linear.iter().map(|c| c * positional.scale).collect();
        let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(i, j, c) in &positional.quadratic {
            let c = c * positional.scale;
            adjacency[i].push((j, c));
            adjacency[j].push((i, c));
        }
        let betas: Vec<f64> = if sweeps == 1 {
            vec![beta_max]
        } else {
            let ratio = beta_max / beta_min;
            (0..sweeps)
                .map(|t| beta_min * ratio.powf(t as f64 / (sweeps - 1) as f64))
                .collect()
        };

        let seed = params.effective_seed();
        let mut states = Vec::with_capacity(params.num_reads as usize);
        for read in 0..params.num_reads {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(read));
            let mut state: Vec<i8> =
                (0..n).map(|_| values[usize::from(rng.gen::<bool>())]).collect();
            for &beta in &betas {
                for i in 0..n {
                    let mut local = linear[i];
                    for &(j, c) in &adjacency[i] {
                        local += c * f64::from(state[j]);
                    }
                    let (delta, flipped) = match domain {
                        Domain::Boolean => {
                            let flipped = 1 - state[i];
                            (f64::from(flipped - state[i]) * local, flipped)
                        }
                        Domain::Spin => (-2.0 * f64::from(state[i]) * local, -state[i]),
                    };
                    if delta <= 0.0 || rng.gen::<f64>() < (-beta * delta).exp() {
                        state[i] = flipped;
                    }
                }
            }
            states.push((state, 1));
        }
        let timing = Timing::total(start.elapsed().as_secs_f64());
        let mut metadata = run_metadata(self.name(), params);
        metadata.insert("sweeps".to_string(), sweeps.to_string());
        Ok(SampleSet::from_states(
            q,
            states,
            timing,
            metadata,
        )?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn instance(
        domain: Domain,
        n: u32,
        linear: &[(u32, f64)],
        quadratic: &[(u32, u32, f64)],
        scale: f64,
        offset: f64,
    ) -> QuboInstance {
        QuboInstance::new(
            domain,
            (0..n).collect(),
            linear.iter().copied().collect(),
            quadratic.iter().map(|&(i, j, c)| ((i, j), c)).collect(),
            scale,
            offset,
        )
        .unwrap()
    }

    /// Straight-line energy recomputation, independent of the instance's
    /// own evaluation path.
    fn naive_energy(
        state: &[i8],
        linear: &[(u32, f64)],
        quadratic: &[(u32, u32, f64)],
        scale: f64,
        offset: f64,
    ) -> f64 {
        let mut total = offset;
        for &(v, c) in linear {
            total += c * f64::from(state[v as usize]);
        }
        for &(i, j, c) in quadratic {
            total += c * f64::from(state[i as usize]) * f64::from(state[j as usize]);
        }
        scale * total
    }

    #[test]
    fn exact_on_empty_instance_yields_scaled_offset() {
        let q = instance(Domain::Boolean, 0, &[], &[], 2.0, 3.0);
        let set = ExactSampler::default()
            .sample(&q, &SamplerParams::new(1))
            .unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.best().unwrap().value, 6.0);
    }

    #[test]
    fn exact_orders_the_four_state_table() {
        // 1 - x0 - x1 + 2*x0*x1: minima at (1,0) and (0,1).
        let q = instance(
            Domain::Boolean,
            2,
            &[(0, -1.0), (1, -1.0)],
            &[(0, 1, 2.0)],
            1.0,
            1.0,
        );
        let set = ExactSampler::default()
            .sample(&q, &SamplerParams::new(1))
            .unwrap();
        let table: Vec<(Vec<i8>, f64)> = set
            .samples()
            .iter()
            .map(|s| (s.state.clone(), s.value))
            .collect();
        assert_eq!(
            table,
            vec![
                (vec![0, 1], 0.0),
                (vec![1, 0], 0.0),
                (vec![0, 0], 1.0),
                (vec![1, 1], 1.0),
            ]
        );
        assert_eq!(set.total_reads(), 4);
    }

    #[test]
    fn exact_first_sample_matches_independent_minimum() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 12u32;
        let mut linear = Vec::new();
        let mut quadratic = Vec::new();
        for i in 0..n {
            linear.push((i, rng.gen_range(-1.0..1.0)));
            for j in (i + 1)..n {
                if rng.gen_bool(0.3) {
                    quadratic.push((i, j, rng.gen_range(-1.0..1.0)));
                }
            }
        }
        let q = instance(Domain::Boolean, n, &linear, &quadratic, 1.0, 0.0);
        let set = ExactSampler::default()
            .sample(&q, &SamplerParams::new(1))
            .unwrap();
        let mut best = f64::INFINITY;
        for word in 0..(1u32 << n) {
            let state: Vec<i8> = (0..n).map(|i| i8::from(word >> i & 1 == 1)).collect();
            best = best.min(naive_energy(&state, &linear, &quadratic, 1.0, 0.0));
        }
        assert!((set.best().unwrap().value - best).abs() < 1e-9);
    }

    #[test]
    fn exact_refuses_above_cap() {
        let q = instance(Domain::Boolean, 8, &[], &[], 1.0, 0.0);
        let params = SamplerParams::new(1).with_attr("cap", AttrValue::Int(4));
        let err = ExactSampler::default().sample(&q, &params).unwrap_err();
        assert!(matches!(
            err,
            SamplerError::CapacityExceeded { variables: 8, cap: 4 }
        ));
    }

    #[test]
    fn random_conserves_reads_and_recomputes_energies() {
        let q = instance(Domain::Boolean, 1, &[(0, 1.0)], &[], 1.0, 0.0);
        let params = SamplerParams::new(1000).with_seed(42);
        let set = RandomSampler.sample(&q, &params).unwrap();
        assert_eq!(set.total_reads(), 1000);
        assert_eq!(set.len(), 2);
        // Seeded split frozen from the documented stream; both sides stay
        // well inside [400, 600].
        let reads: Vec<u64> = set.samples().iter().map(|s| s.reads).collect();
        assert_eq!(reads.iter().sum::<u64>(), 1000);
        assert!(reads.iter().all(|&r| (400..=600).contains(&r)), "{reads:?}");
        for sample in set.samples() {
            assert_eq!(sample.value, q.energy(&sample.state).unwrap());
        }
    }

    #[test]
    fn random_on_empty_instance_repeats_one_state() {
        let q = instance(Domain::Boolean, 0, &[], &[], 1.0, 0.0);
        let set = RandomSampler.sample(&q, &SamplerParams::new(7)).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.total_reads(), 7);
    }

    #[test]
    fn random_is_deterministic_per_seed() {
        let q = instance(Domain::Spin, 6, &[(0, 0.5)], &[(0, 3, -1.0)], 1.0, 0.0);
        let params = SamplerParams::new(100).with_seed(9);
        let a = RandomSampler.sample(&q, &params).unwrap();
        let b = RandomSampler.sample(&q, &params).unwrap();
        assert_eq!(a.samples(), b.samples());
    }

    #[test]
    fn identity_echoes_the_state() {
        let q = instance(Domain::Boolean, 3, &[(0, 1.0)], &[], 2.0, 1.0);
        let params = SamplerParams::new(5)
            .with_attr("initial_state", AttrValue::IntList(vec![0, 0, 0]));
        let set = IdentitySampler.sample(&q, &params).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.best().unwrap().reads, 5);
        assert_eq!(set.best().unwrap().value, 2.0); // scale * offset
    }

    #[test]
    fn identity_rejects_bad_states() {
        let q = instance(Domain::Boolean, 2, &[], &[], 1.0, 0.0);
        let missing = SamplerParams::new(1);
        assert!(matches!(
            IdentitySampler.sample(&q, &missing),
            Err(SamplerError::MissingAttribute { .. })
        ));
        let short = SamplerParams::new(1).with_attr("initial_state", AttrValue::IntList(vec![1]));
        assert!(IdentitySampler.sample(&q, &short).is_err());
        let out_of_domain =
            SamplerParams::new(1).with_attr("initial_state", AttrValue::IntList(vec![1, -1]));
        assert!(IdentitySampler.sample(&q, &out_of_domain).is_err());
    }

    #[test]
    fn sa_zero_coupling_reports_scaled_offset() {
        let q = instance(Domain::Boolean, 4, &[], &[], 3.0, 2.0);
        let params = SamplerParams::new(3).with_seed(1);
        let set = SimulatedAnnealingSampler.sample(&q, &params).unwrap();
        assert_eq!(set.total_reads(), 3);
        for sample in set.samples() {
            assert_eq!(sample.value, 6.0);
        }
    }

    #[test]
    fn sa_aligns_a_ferromagnetic_pair() {
        // J = -1 on a spin pair: ground states are the two aligned ones at
        // energy -1.
        let q = instance(Domain::Spin, 2, &[], &[(0, 1, -1.0)], 1.0, 0.0);
        let params = SamplerParams::new(20).with_seed(3);
        let set = SimulatedAnnealingSampler.sample(&q, &params).unwrap();
        assert_eq!(set.best().unwrap().value, -1.0);
        for sample in set.samples() {
            if sample.value == -1.0 {
                assert_eq!(sample.state[0], sample.state[1]);
            }
        }
        let aligned_reads: u64 = set
            .samples()
            .iter()
            .filter(|s| s.value == -1.0)
            .map(|s| s.reads)
            .sum();
        assert_eq!(aligned_reads, 20, "annealing must settle the pair");
    }

    #[test]
    fn sa_is_deterministic_per_seed() {
        let q = instance(Domain::Boolean, 8, &[(0, -1.0), (5, 2.0)], &[(0, 5, -3.0)], 1.0, 0.0);
        let params = SamplerParams::new(10)
            .with_seed(7)
            .with_attr("sweeps", AttrValue::Int(50));
        let a = SimulatedAnnealingSampler.sample(&q, &params).unwrap();
        let b = SimulatedAnnealingSampler.sample(&q, &params).unwrap();
        assert_eq!(a.samples(), b.samples());
    }

    #[test]
    fn sa_single_variable_freezes_to_the_greedy_minimum() {
        // One boolean variable with a strong downhill pull: by the cold end
        // of the schedule every read sits in the minimum.
        let q = instance(Domain::Boolean, 1, &[(0, -5.0)], &[], 1.0, 0.0);
        let params = SamplerParams::new(50)
            .with_seed(11)
            .with_attr("beta_max", AttrValue::Float(30.0));
        let set = SimulatedAnnealingSampler.sample(&q, &params).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.best().unwrap().state, vec![1]);
        assert_eq!(set.best().unwrap().reads, 50);
    }

    #[test]
    fn sa_rejects_bad_schedules() {
        let q = instance(Domain::Boolean, 1, &[], &[], 1.0, 0.0);
        for (min, max) in [(0.0, 1.0), (-1.0, 1.0), (2.0, 1.0)] {
            let params = SamplerParams::new(1)
                .with_attr("beta_min", AttrValue::Float(min))
                .with_attr("beta_max", AttrValue::Float(max));
            assert!(SimulatedAnnealingSampler.sample(&q, &params).is_err());
        }
        let params = SamplerParams::new(1).with_attr("sweeps", AttrValue::Int(0));
        assert!(SimulatedAnnealingSampler.sample(&q, &params).is_err());
    }
}

//! Problem generators: cyclic-tour TSP, number partitioning, and random
//! QUBO instances.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formats::{Domain, QuboInstance};
use crate::pbf::{PseudoBooleanFunction as Pbf, VarId};

use super::{Constraint, Model, ModelError, Sense, Variable};

/// Builds the assignment-matrix model of a traveling-salesperson tour:
/// binary `x[i][k]` puts city `i` at slot `k`, the objective sums
/// `D[i][j] * x[i][k] * x[j][(k+1) mod n]` over the cyclic slots, and each
/// city and each slot must be used exactly once.
pub fn tsp_model(n: usize, distances: &[Vec<f64>]) -> Result<Model, ModelError> {
    if n < 2 {
        return Err(ModelError::TspTooSmall(n));
    }
    if distances.len() != n {
        return Err(ModelError::NonSquareMatrix {
            row: 0,
            found: distances.len(),
            expected: n,
        });
    }
    for (i, row) in distances.iter().enumerate() {
        if row.len() != n {
            return Err(ModelError::NonSquareMatrix {
                row: i,
                found: row.len(),
                expected: n,
            });
        }
        for (j, &value) in row.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(ModelError::BadDistance { i, j, value });
            }
        }
    }

    let mut model = Model::new(Sense::Min);
    let id = |i: usize, k: usize| -> VarId { (i * n + k) as VarId };
    for i in 0..n {
        for k in 0..n {
            model
                .variables
                .push(Variable::binary(id(i, k)).named(format!("x[{i},{k}]")));
        }
    }

    let mut objective = Pbf::zero();
    for k in 0..n {
        let next = (k + 1) % n;
        for i in 0..n {
            for j in 0..n {
                let d = distances[i][j];
                if d != 0.0 {
                    objective.add_term(&[id(i, k), id(j, next)], d);
                }
            }
        }
    }
    model.objective = objective;

    for i in 0..n {
        let mut row = Pbf::zero();
        for k in 0..n {
            row.add_term(&[id(i, k)], 1.0);
        }
        model.constraints.push(Constraint::eq(row, 1.0));
    }
    for k in 0..n {
        let mut column = Pbf::zero();
        for i in 0..n {
            column.add_term(&[id(i, k)], 1.0);
        }
        model.constraints.push(Constraint::eq(column, 1.0));
    }

    model.metadata.insert("problem".to_string(), "tsp".to_string());
    model.metadata.insert("cities".to_string(), n.to_string());
    Ok(model)
}

/// Number partitioning in spin-balance form: minimize the squared signed
/// imbalance `(sum_i w_i * (2 x_i - 1))^2`, expanded to degree two. No
/// constraints; the two halves of a perfect partition score zero.
pub fn npp_model(weights: &[f64]) -> Result<Model, ModelError> {
    if weights.is_empty() {
        return Err(ModelError::EmptyWeights);
    }
    for (index, w) in weights.iter().enumerate() {
        if !w.is_finite() {
            return Err(ModelError::BadWeight { index });
        }
    }
    let mut model = Model::new(Sense::Min);
    let total: f64 = weights.iter().sum();
    let mut imbalance = Pbf::constant(-total);
    for (i, &w) in weights.iter().enumerate() {
        model.variables.push(Variable::binary(i as VarId));
        imbalance.add_term(&[i as VarId], 2.0 * w);
    }
    model.objective = imbalance.multiply(&imbalance);
    model.metadata.insert("problem".to_string(), "npp".to_string());
    Ok(model)
}

/// Deterministic random QUBO: each of the `n*(n+1)/2` candidate terms is
/// present with probability `density`, with coefficients uniform in
/// `[lo, hi]`.
pub fn random_qubo(
    n: usize,
    density: f64,
    seed: u64,
    coeff_range: (f64, f64),
) -> Result<QuboInstance, ModelError> {
    if n == 0 {
        return Err(ModelError::EmptyInstance);
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(ModelError::InvalidDensity(density));
    }
    let (lo, hi) = coeff_range;
    if lo > hi || !lo.is_finite() || !hi.is_finite() {
        return Err(ModelError::EmptyCoefficientRange { lo, hi });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut linear = BTreeMap::new();
    let mut quadratic = BTreeMap::new();
    let draw = |rng: &mut ChaCha8Rng| -> f64 {
        if lo == hi {
            lo
        } else {
            rng.gen_range(lo..=hi)
        }
    };
    for i in 0..n {
        for j in i..n {
            if rng.gen::<f64>() < density {
                let coeff = draw(&mut rng);
                if coeff != 0.0 {
                    if i == j {
                        linear.insert(i as VarId, coeff);
                    } else {
                        quadratic.insert((i as VarId, j as VarId), coeff);
                    }
                }
            }
        }
    }
    Ok(QuboInstance::new(
        Domain::Boolean,
        (0..n as VarId).collect(),
        linear,
        quadratic,
        1.0,
        0.0,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::brute_force_solve;

    #[test]
    fn tsp_dimensions_match_city_count() {
        let d = vec![vec![0.0; 5]; 5];
        let m = tsp_model(5, &d).unwrap();
        assert_eq!(m.num_variables(), 25);
        assert_eq!(m.constraints.len(), 10);
        assert!(m.validate().is_empty());
    }

    #[test]
    fn tsp_two_cities_costs_a_round_trip() {
        let d = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let m = tsp_model(2, &d).unwrap();
        let solution = brute_force_solve(&m, 1 << 10).unwrap();
        assert_eq!(solution.best_value, Some(2.0));
    }

    #[test]
    fn tsp_zero_distances_make_every_tour_free() {
        let d = vec![vec![0.0; 3]; 3];
        let m = tsp_model(3, &d).unwrap();
        let solution = brute_force_solve(&m, 1 << 12).unwrap();
        assert_eq!(solution.best_value, Some(0.0));
        // Feasible assignments are exactly the 3! permutation matrices, and
        // with zero distances all of them are optimal.
        assert_eq!(solution.optima.len(), 6);
    }

    #[test]
    fn tsp_feasible_set_is_the_permutation_matrices() {
        for n in 2..=4usize {
            let d = vec![vec![0.0; n]; n];
            let m = tsp_model(n, &d).unwrap();
            let solution = brute_force_solve(&m, 1 << 17).unwrap();
            let expected: usize = (1..=n).product();
            assert_eq!(solution.optima.len(), expected, "n={n}");
        }
    }

    #[test]
    fn tsp_input_validation() {
        assert!(matches!(tsp_model(1, &[vec![0.0]]), Err(ModelError::TspTooSmall(1))));
        assert!(matches!(
            tsp_model(2, &[vec![0.0, 1.0]]),
            Err(ModelError::NonSquareMatrix { .. })
        ));
        assert!(matches!(
            tsp_model(2, &[vec![0.0, -1.0], vec![1.0, 0.0]]),
            Err(ModelError::BadDistance { .. })
        ));
    }

    #[test]
    fn npp_even_pair_partitions_perfectly() {
        let m = npp_model(&[1.0, 1.0]).unwrap();
        let solution = brute_force_solve(&m, 16).unwrap();
        assert_eq!(solution.best_value, Some(0.0));
        let optima: Vec<Vec<f64>> = solution
            .optima
            .iter()
            .map(|a| a.values().copied().collect())
            .collect();
        assert_eq!(optima, vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn npp_single_weight_cannot_balance() {
        let m = npp_model(&[3.0]).unwrap();
        let solution = brute_force_solve(&m, 4).unwrap();
        assert_eq!(solution.best_value, Some(9.0));
        assert_eq!(solution.optima.len(), 2);
    }

    #[test]
    fn npp_three_weights_split_as_three_vs_one_plus_two() {
        let m = npp_model(&[1.0, 2.0, 3.0]).unwrap();
        let solution = brute_force_solve(&m, 16).unwrap();
        assert_eq!(solution.best_value, Some(0.0));
        for optimum in &solution.optima {
            let side: f64 = (0..3)
                .map(|i| optimum[&(i as VarId)] * [1.0, 2.0, 3.0][i])
                .sum();
            assert_eq!(side, 3.0);
        }
    }

    #[test]
    fn npp_objective_is_bit_flip_symmetric() {
        let weights: Vec<f64> = (1..=10).map(f64::from).collect();
        let m = npp_model(&weights).unwrap();
        for bits in 0..(1u32 << 10) {
            let x: BTreeMap<VarId, f64> =
                (0..10).map(|i| (i, f64::from(bits >> i & 1))).collect();
            let flipped: BTreeMap<VarId, f64> =
                x.iter().map(|(&v, &b)| (v, 1.0 - b)).collect();
            assert_eq!(
                m.objective.evaluate(&x).unwrap(),
                m.objective.evaluate(&flipped).unwrap()
            );
        }
    }

    #[test]
    fn random_qubo_full_density_single_variable() {
        let q = random_qubo(1, 1.0, 0, (1.0, 2.0)).unwrap();
        assert_eq!(q.linear().len(), 1);
        assert!(q.quadratic().is_empty());
    }

    #[test]
    fn random_qubo_is_deterministic() {
        let a = random_qubo(20, 0.4, 123, (-1.0, 1.0)).unwrap();
        let b = random_qubo(20, 0.4, 123, (-1.0, 1.0)).unwrap();
        assert_eq!(a, b);
        let c = random_qubo(20, 0.4, 124, (-1.0, 1.0)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn random_qubo_term_count_tracks_density() {
        // Mean over many seeds approaches density * n(n+1)/2; 5% slack.
        let n = 50;
        let candidates = (n * (n + 1) / 2) as f64;
        let mut total = 0usize;
        let seeds = 1000u64;
        for seed in 0..seeds {
            let q = random_qubo(n, 0.5, seed, (1.0, 2.0)).unwrap();
            total += q.linear().len() + q.quadratic().len();
        }
        let mean = total as f64 / seeds as f64;
        let expected = 0.5 * candidates;
        assert!(
            (mean - expected).abs() < 0.05 * expected,
            "mean {mean} vs expected {expected}"
        );
    }

    #[test]
    fn random_qubo_input_validation() {
        assert!(matches!(random_qubo(0, 0.5, 0, (0.0, 1.0)), Err(ModelError::EmptyInstance)));
        assert!(matches!(
            random_qubo(3, 0.0, 0, (0.0, 1.0)),
            Err(ModelError::InvalidDensity(_))
        ));
        assert!(matches!(
            random_qubo(3, 1.5, 0, (0.0, 1.0)),
            Err(ModelError::InvalidDensity(_))
        ));
        assert!(matches!(
            random_qubo(3, 0.5, 0, (2.0, 1.0)),
            Err(ModelError::EmptyCoefficientRange { .. })
        ));
    }
}

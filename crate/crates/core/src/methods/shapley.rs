//! Shapley values of subset value functions, exact or by sampled
//! permutations.

use rand::seq::SliceRandom;

use crate::oracle::{MixtureOracle, SubsetValues};
use crate::seed::Rng;
use crate::subset::FeatureSet;

/// Dimension up to which every subset value is tabulated up front.
const TABLE_MAX_DIM: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShapleyMode {
    /// Subset-weighted formula over all `2^n` coalitions.
    Exact,
    /// Average over this many uniformly random permutations.
    Permutations(usize),
}

impl ShapleyMode {
    /// Exact when `2^n` fits in the sample budget, sampled otherwise.
    pub fn for_budget(n: usize, max_samples: usize) -> Self {
        if n < usize::BITS as usize - 1 && 1usize << n <= max_samples {
            Self::Exact
        } else {
            Self::Permutations(max_samples)
        }
    }
}

/// Signed Shapley values of `value` over `[n]`.
pub fn shapley_values(n: usize, mut value: impl FnMut(FeatureSet) -> f64, mode: ShapleyMode, rng: &mut Rng) -> Vec<f64> {
    let mut phi = vec![0.0; n];
    match mode {
        ShapleyMode::Exact => {
            let v: Vec<f64> = (0..1u32 << n).map(|b| value(FeatureSet::from_bits(n, b).expect("mask below 2^n"))).collect();
            // weight[s] = s! (n - s - 1)! / n!
            let mut weight = vec![0.0; n];
            for (s, w) in weight.iter_mut().enumerate() {
                let mut x = 1.0 / n as f64;
                for t in 1..=s {
                    x *= t as f64 / (n - t) as f64;
                }
                *w = x;
            }
            for bits in 0..1u32 << n {
                let size = bits.count_ones() as usize;
                for (i, p) in phi.iter_mut().enumerate() {
                    if bits & 1 << i == 0 {
                        *p += weight[size] * (v[(bits | 1 << i) as usize] - v[bits as usize]);
                    }
                }
            }
        }
        ShapleyMode::Permutations(count) => {
            let mut order: Vec<usize> = (0..n).collect();
            for _ in 0..count {
                order.shuffle(rng);
                let mut prefix = FeatureSet::empty(n);
                let mut prev = value(prefix);
                for &i in &order {
                    prefix = prefix.with(i);
                    let cur = value(prefix);
                    phi[i] += cur - prev;
                    prev = cur;
                }
            }
            phi.iter_mut().for_each(|p| *p /= count as f64);
        }
    }
    phi
}

fn dense(table: &SubsetValues) -> Vec<f64> {
    let mut v = vec![f64::NAN; 1 << table.dim()];
    for &(s, p) in table.entries() {
        v[s.bits() as usize] = p;
    }
    v
}

/// Shapley values of the conditional expectation `v(I) = P(Y = 1 | X_I = x_I)`.
pub fn shapley_expectation(oracle: &MixtureOracle, x: &[f64], max_samples: usize, rng: &mut Rng) -> Vec<f64> {
    let n = oracle.dim();
    let mode = ShapleyMode::for_budget(n, max_samples);
    if n <= TABLE_MAX_DIM {
        let v = dense(&oracle.subset_posteriors(x, n));
        shapley_values(n, |s| v[s.bits() as usize], mode, rng)
    } else {
        shapley_values(n, |s| oracle.posterior(x, s), mode, rng)
    }
}

/// Shapley values of the baseline game `v(I) = f'(x_I, mean_{not I})`.
pub fn shap_baseline(oracle: &MixtureOracle, x: &[f64], max_samples: usize, rng: &mut Rng) -> Vec<f64> {
    let n = oracle.dim();
    let mode = ShapleyMode::for_budget(n, max_samples);
    let mean = oracle.mean().to_vec();
    if n <= TABLE_MAX_DIM {
        let v = dense(&oracle.baseline_predictions(x, &mean, n));
        shapley_values(n, |s| v[s.bits() as usize], mode, rng)
    } else {
        shapley_values(
            n,
            |s| {
                let z: Vec<f64> = (0..n).map(|i| if s.contains(i) { x[i] } else { mean[i] }).collect();
                oracle.predict(&z)
            },
            mode,
            rng,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;

    fn three_dim() -> MixtureOracle {
        MixtureOracle::from_parts(
            3,
            vec![
                vec![-0.125, 0.125, 0.0],
                vec![0.125, 0.125, 0.0],
                vec![0.125, -0.125, 0.0],
                vec![0.375, 0.375, 0.25],
                vec![0.375, 0.375, -0.25],
            ],
            vec![0, 1, 0, 1, 0],
            0.125,
        )
        .unwrap()
    }

    #[test]
    fn efficiency_in_exact_mode() {
        let o = three_dim();
        let mut rng = rng_from_seed(0);
        for x in [[0.125, 0.125, 0.0], [0.375, 0.375, 0.25], [0.0, 0.1, -0.1]] {
            let phi = shapley_expectation(&o, &x, 128, &mut rng);
            let total: f64 = phi.iter().sum();
            let expected = o.predict(&x) - o.posterior(&x, FeatureSet::empty(3));
            assert!((total - expected).abs() < 1e-9);
            let phi = shap_baseline(&o, &x, 128, &mut rng);
            let total: f64 = phi.iter().sum();
            assert!((total - (o.predict(&x) - o.predict(o.mean()))).abs() < 1e-9);
        }
    }

    #[test]
    fn duplicated_features_share_credit() {
        let o = MixtureOracle::from_parts(
            3,
            vec![vec![0.0, 0.0, 0.1], vec![0.25, 0.25, 0.1], vec![0.5, 0.5, -0.1]],
            vec![0, 1, 0],
            0.1,
        )
        .unwrap();
        let phi = shapley_expectation(&o, &[0.25, 0.25, 0.1], 128, &mut rng_from_seed(1));
        assert!((phi[0] - phi[1]).abs() < 1e-9);
    }

    #[test]
    fn mean_point_has_zero_baseline_values() {
        let o = three_dim();
        let x = o.mean().to_vec();
        let phi = shap_baseline(&o, &x, 128, &mut rng_from_seed(2));
        assert!(phi.iter().all(|p| p.abs() < 1e-15));
    }

    #[test]
    fn sampled_estimate_agrees_with_exact() {
        let o = three_dim();
        let x = [0.125, 0.125, 0.0];
        let exact = shapley_values(3, |s| o.posterior(&x, s), ShapleyMode::Exact, &mut rng_from_seed(3));
        let count = 10_000;
        // per-permutation marginal contributions give the standard error
        let mut rng = rng_from_seed(4);
        let mut samples: Vec<Vec<f64>> = (0..3).map(|_| Vec::with_capacity(count)).collect();
        for _ in 0..count {
            let one = shapley_values(3, |s| o.posterior(&x, s), ShapleyMode::Permutations(1), &mut rng);
            for i in 0..3 {
                samples[i].push(one[i]);
            }
        }
        for i in 0..3 {
            let mean = samples[i].iter().sum::<f64>() / count as f64;
            let var = samples[i].iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
            let se = (var / count as f64).sqrt();
            assert!((mean - exact[i]).abs() <= 3.0 * se + 1e-12, "feature {i}: {mean} vs {}", exact[i]);
        }
    }

    #[test]
    fn budget_switch() {
        assert_eq!(ShapleyMode::for_budget(7, 128), ShapleyMode::Exact);
        assert_eq!(ShapleyMode::for_budget(8, 128), ShapleyMode::Permutations(128));
    }
}

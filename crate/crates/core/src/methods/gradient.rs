//! Gradient-based feature attributions, as magnitudes.

use rand::Rng as _;

use super::MethodConfig;
use crate::oracle::MixtureOracle;
use crate::seed::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GradientVariant {
    Grad,
    GradInput,
    /// Midpoint rule along the straight path from the centroid mean.
    Integrated,
    /// Random path positions and centroid backgrounds.
    Expected,
}

/// Signed integrated gradients `(x - b) * mean_t grad f'(b + t (x - b))`
/// with `t` at the midpoints of `steps` equal intervals.
pub(crate) fn integrated_signed(oracle: &MixtureOracle, x: &[f64], baseline: &[f64], steps: usize) -> Vec<f64> {
    let n = x.len();
    let mut acc = vec![0.0; n];
    let mut z = vec![0.0; n];
    for s in 0..steps {
        let t = (s as f64 + 0.5) / steps as f64;
        for i in 0..n {
            z[i] = baseline[i] + t * (x[i] - baseline[i]);
        }
        for (a, g) in acc.iter_mut().zip(oracle.gradient(&z)) {
            *a += g;
        }
    }
    (0..n).map(|i| (x[i] - baseline[i]) * acc[i] / steps as f64).collect()
}

pub fn gradient_family(
    oracle: &MixtureOracle,
    x: &[f64],
    variant: GradientVariant,
    config: &MethodConfig,
    rng: &mut Rng,
) -> Vec<f64> {
    let n = x.len();
    let signed = match variant {
        GradientVariant::Grad => oracle.gradient(x),
        GradientVariant::GradInput => oracle.gradient(x).iter().zip(x).map(|(g, xi)| g * xi).collect(),
        GradientVariant::Integrated => integrated_signed(oracle, x, oracle.mean(), config.ig_steps),
        GradientVariant::Expected => {
            let mut acc = vec![0.0; n];
            let mut z = vec![0.0; n];
            for _ in 0..config.eg_samples {
                let alpha: f64 = rng.random();
                let b = &oracle.centroids()[rng.random_range(0..oracle.m())];
                for i in 0..n {
                    z[i] = b[i] + alpha * (x[i] - b[i]);
                }
                for ((a, g), (xi, bi)) in acc.iter_mut().zip(oracle.gradient(&z)).zip(x.iter().zip(b)) {
                    *a += (xi - bi) * g;
                }
            }
            acc.iter().map(|a| a / config.eg_samples as f64).collect()
        }
    };
    signed.iter().map(|v| v.abs()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;

    fn xor_minus_corner() -> MixtureOracle {
        MixtureOracle::from_parts(
            2,
            vec![vec![-0.125, 0.125], vec![0.125, 0.125], vec![0.125, -0.125]],
            vec![0, 1, 0],
            0.125,
        )
        .unwrap()
    }

    #[test]
    fn constant_posterior_gives_zeros() {
        let o = MixtureOracle::from_parts(2, vec![vec![0.0, 0.0], vec![0.5, 0.5]], vec![0, 0], 0.1).unwrap();
        let cfg = MethodConfig::default();
        for v in [GradientVariant::Grad, GradientVariant::GradInput, GradientVariant::Integrated, GradientVariant::Expected] {
            let a = gradient_family(&o, &[0.3, -0.2], v, &cfg, &mut rng_from_seed(0));
            assert_eq!(a, vec![0.0, 0.0]);
        }
    }

    #[test]
    fn integrated_is_zero_at_the_baseline() {
        let o = xor_minus_corner();
        let b = o.mean().to_vec();
        let a = gradient_family(&o, &b, GradientVariant::Integrated, &MethodConfig::default(), &mut rng_from_seed(0));
        assert_eq!(a, vec![0.0, 0.0]);
    }

    #[test]
    fn integrated_completeness_with_fifty_steps() {
        let o = xor_minus_corner();
        let b = o.mean().to_vec();
        for x in [[0.125, 0.125], [-0.125, 0.125], [0.125, -0.125], [0.05, 0.2]] {
            let ig = integrated_signed(&o, &x, &b, 50);
            let total: f64 = ig.iter().sum();
            let expected = o.predict(&x) - o.predict(&b);
            assert!((total - expected).abs() <= 0.02 * expected.abs().max(1e-3), "{total} vs {expected}");
        }
    }

    #[test]
    fn expected_gradient_is_seeded() {
        let o = xor_minus_corner();
        let cfg = MethodConfig::default();
        let a = gradient_family(&o, &[0.1, 0.1], GradientVariant::Expected, &cfg, &mut rng_from_seed(8));
        let b = gradient_family(&o, &[0.1, 0.1], GradientVariant::Expected, &cfg, &mut rng_from_seed(8));
        assert_eq!(a, b);
    }
}

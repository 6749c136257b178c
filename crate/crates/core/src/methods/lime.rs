//! Local surrogate: weighted ridge regression of `f'` on perturbations.

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use crate::oracle::MixtureOracle;
use crate::seed::Rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LimeMode {
    /// Gaussian perturbations scaled per axis by the centroid spread.
    Continuous,
    /// Per-axis indicator "same grid cell as `x`", coordinates resampled
    /// from the centroids.
    Categorical { cell_width: f64 },
}

/// Kernel width `0.75 sqrt(n)` of the exponential proximity kernel.
pub fn kernel_width(n: usize) -> f64 {
    0.75 * (n as f64).sqrt()
}

/// Ridge fit with an unpenalised intercept: rows are centred by their
/// weighted mean before solving `(X^T W X + ridge I) b = X^T W y`.
pub(crate) fn weighted_ridge(rows: &DMatrix<f64>, targets: &[f64], weights: &[f64], ridge: f64) -> Vec<f64> {
    let (s, n) = rows.shape();
    let total: f64 = weights.iter().sum();
    let x_mean: Vec<f64> = (0..n).map(|c| (0..s).map(|r| weights[r] * rows[(r, c)]).sum::<f64>() / total).collect();
    let y_mean = targets.iter().zip(weights).map(|(y, w)| y * w).sum::<f64>() / total;
    let mut gram = DMatrix::<f64>::identity(n, n) * ridge;
    let mut rhs = DVector::<f64>::zeros(n);
    let mut centred = vec![0.0; n];
    for r in 0..s {
        for c in 0..n {
            centred[c] = rows[(r, c)] - x_mean[c];
        }
        let w = weights[r];
        let dy = targets[r] - y_mean;
        for a in 0..n {
            rhs[a] += w * centred[a] * dy;
            for b in 0..=a {
                gram[(a, b)] += w * centred[a] * centred[b];
            }
        }
    }
    for a in 0..n {
        for b in 0..a {
            gram[(b, a)] = gram[(a, b)];
        }
    }
    let chol = gram.cholesky().expect("ridge term keeps the system positive definite");
    chol.solve(&rhs).iter().copied().collect()
}

/// Absolute surrogate coefficients. The first sample is `x` itself.
pub fn lime(oracle: &MixtureOracle, x: &[f64], mode: LimeMode, samples: usize, ridge: f64, rng: &mut Rng) -> Vec<f64> {
    let n = x.len();
    let width = kernel_width(n);
    let mut rows = DMatrix::<f64>::zeros(samples, n);
    let mut targets = Vec::with_capacity(samples);
    let mut weights = Vec::with_capacity(samples);
    let mut z = vec![0.0; n];
    match mode {
        LimeMode::Continuous => {
            let m = oracle.m() as f64;
            let scale: Vec<f64> = (0..n)
                .map(|i| {
                    let mu = oracle.mean()[i];
                    let sd = (oracle.centroids().iter().map(|c| (c[i] - mu).powi(2)).sum::<f64>() / m).sqrt();
                    if sd > 0.0 { sd } else { 1.0 }
                })
                .collect();
            for r in 0..samples {
                let mut d2 = 0.0;
                for i in 0..n {
                    let u: f64 = if r == 0 { 0.0 } else { StandardNormal.sample(rng) };
                    rows[(r, i)] = u;
                    z[i] = x[i] + u * scale[i];
                    d2 += u * u;
                }
                targets.push(oracle.predict(&z));
                weights.push((-d2 / (width * width)).exp());
            }
        }
        LimeMode::Categorical { cell_width } => {
            for r in 0..samples {
                let mut d2 = 0.0;
                for i in 0..n {
                    z[i] = if r == 0 { x[i] } else { oracle.centroids()[rng.random_range(0..oracle.m())][i] };
                    let same = (z[i] - x[i]).abs() < 0.5 * cell_width;
                    rows[(r, i)] = if same { 1.0 } else { 0.0 };
                    if !same {
                        d2 += 1.0;
                    }
                }
                targets.push(oracle.predict(&z));
                weights.push((-d2 / (width * width)).exp());
            }
        }
    }
    weighted_ridge(&rows, &targets, &weights, ridge).iter().map(|c| c.abs()).collect()
}

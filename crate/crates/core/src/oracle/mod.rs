//! The analytic Gaussian-mixture view of a task.
//!
//! Every centroid carries weight `1/m` and an isotropic Gaussian of standard
//! deviation `noise_std`. Marginalising an isotropic Gaussian onto the
//! coordinates `I` leaves an isotropic Gaussian on those coordinates, so the
//! class posterior given `X_I` only needs squared distances over `I`.

mod variance;

pub use variance::{adaptive_simpson, conditional_variance, conditional_variance_quadrature, DemoDensity};

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use crate::dependence::Point;
use crate::error::{invalid, Error, Result};
use crate::seed::Rng;
use crate::subset::FeatureSet;
use crate::taskgen::Task;

/// `max(p, 1 - p)`: probability of the most likely class.
pub fn prob_attr(p: f64) -> f64 {
    p.max(1.0 - p)
}

/// One minus the binary entropy in bits; 1 for a deterministic label, 0 for
/// a fair coin. `0 ln 0 = 0`.
pub fn entropy_attr(p: f64) -> f64 {
    let h = |q: f64| if q <= 0.0 { 0.0 } else { q * q.ln() };
    (1.0 - (h(p) + h(1.0 - p)) / 0.5f64.ln()).clamp(0.0, 1.0)
}

#[derive(Clone, Debug)]
pub struct MixtureOracle {
    n: usize,
    centroids: Vec<Vec<f64>>,
    labels: Vec<u8>,
    std: f64,
    mean: Vec<f64>,
}

/// Posterior of class 1 from per-centroid scaled squared distances
/// `a_j = |P_I x - P_I c_j|^2 / (2 s^2)`, shifted by the minimum so the
/// nearest centroid has weight 1.
fn posterior_from_energies(energies: &[f64], labels: &[u8]) -> f64 {
    let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let (mut s0, mut s1) = (0.0, 0.0);
    for (&a, &y) in energies.iter().zip(labels) {
        let w = (min - a).exp();
        if y == 1 {
            s1 += w;
        } else {
            s0 += w;
        }
    }
    s1 / (s0 + s1)
}

impl MixtureOracle {
    pub fn new(task: &Task) -> Result<Self> {
        Self::from_parts(
            task.n,
            task.centroids.iter().map(|c| c.coords.coords().to_vec()).collect(),
            task.centroids.iter().map(|c| c.label).collect(),
            task.noise_std,
        )
    }

    pub fn from_parts(n: usize, centroids: Vec<Vec<f64>>, labels: Vec<u8>, std: f64) -> Result<Self> {
        if centroids.is_empty() {
            return Err(invalid("mixture needs at least one centroid"));
        }
        if centroids.len() != labels.len() {
            return Err(invalid(format!("{} centroids but {} labels", centroids.len(), labels.len())));
        }
        if let Some(c) = centroids.iter().find(|c| c.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, actual: c.len() });
        }
        if labels.iter().any(|&y| y > 1) {
            return Err(invalid("labels must be 0 or 1"));
        }
        if !(std > 0.0 && std.is_finite()) {
            return Err(invalid(format!("mixture std must be positive, got {std}")));
        }
        let m = centroids.len() as f64;
        let mean = (0..n).map(|i| centroids.iter().map(|c| c[i]).sum::<f64>() / m).collect();
        Ok(Self { n, centroids, labels, std, mean })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.centroids.len()
    }

    pub fn std(&self) -> f64 {
        self.std
    }

    pub fn centroids(&self) -> &[Vec<f64>] {
        &self.centroids
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Average of the centroids, which is also the mixture mean.
    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    fn check_point(&self, x: &[f64]) {
        assert_eq!(x.len(), self.n, "point dimension");
    }

    /// `P(Y = 1 | X_I = x_I)`.
    pub fn posterior(&self, x: &[f64], subset: FeatureSet) -> f64 {
        self.check_point(x);
        assert_eq!(subset.dim(), self.n, "subset dimension");
        let scale = 0.5 / (self.std * self.std);
        let energies: Vec<f64> = self
            .centroids
            .iter()
            .map(|c| subset.iter().map(|i| (x[i] - c[i]).powi(2)).sum::<f64>() * scale)
            .collect();
        posterior_from_energies(&energies, &self.labels)
    }

    /// The model output `f'(x)`, the posterior given all coordinates.
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.posterior(x, FeatureSet::full(self.n))
    }

    pub fn attr_prob(&self, x: &[f64], subset: FeatureSet) -> f64 {
        prob_attr(self.posterior(x, subset))
    }

    pub fn attr_entropy(&self, x: &[f64], subset: FeatureSet) -> f64 {
        entropy_attr(self.posterior(x, subset))
    }

    /// Analytic gradient of `f'` at `x`:
    /// `sum_j r_j (y_j - f') (c_j - x) / s^2` with `r_j` the responsibilities.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.check_point(x);
        let scale = 0.5 / (self.std * self.std);
        let energies: Vec<f64> = self
            .centroids
            .iter()
            .map(|c| c.iter().zip(x).map(|(ci, xi)| (xi - ci).powi(2)).sum::<f64>() * scale)
            .collect();
        let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
        let weights: Vec<f64> = energies.iter().map(|a| (min - a).exp()).collect();
        let total: f64 = weights.iter().sum();
        let f: f64 = weights.iter().zip(&self.labels).filter(|(_, &y)| y == 1).map(|(w, _)| w).sum::<f64>() / total;
        let inv_var = 1.0 / (self.std * self.std);
        let mut grad = vec![0.0; self.n];
        for ((w, &y), c) in weights.iter().zip(&self.labels).zip(&self.centroids) {
            let coef = w / total * (f64::from(y) - f) * inv_var;
            for ((g, ci), xi) in grad.iter_mut().zip(c).zip(x) {
                *g += coef * (ci - xi);
            }
        }
        grad
    }

    /// Posteriors for every subset of size at most `max_order`.
    pub fn subset_posteriors(&self, x: &[f64], max_order: usize) -> SubsetValues {
        self.check_point(x);
        let scale = 0.5 / (self.std * self.std);
        let terms: Vec<Vec<f64>> = (0..self.n)
            .map(|i| self.centroids.iter().map(|c| (x[i] - c[i]).powi(2) * scale).collect())
            .collect();
        self.subset_table(vec![0.0; self.m()], &terms, max_order)
    }

    /// `f'` at the points taking coordinates `I` from `x` and the rest from
    /// `baseline`, for every `|I| <= max_order`.
    pub fn baseline_predictions(&self, x: &[f64], baseline: &[f64], max_order: usize) -> SubsetValues {
        self.check_point(x);
        self.check_point(baseline);
        let scale = 0.5 / (self.std * self.std);
        let base: Vec<f64> = self
            .centroids
            .iter()
            .map(|c| c.iter().zip(baseline).map(|(ci, bi)| (bi - ci).powi(2)).sum::<f64>() * scale)
            .collect();
        let terms: Vec<Vec<f64>> = (0..self.n)
            .map(|i| {
                self.centroids
                    .iter()
                    .map(|c| ((x[i] - c[i]).powi(2) - (baseline[i] - c[i]).powi(2)) * scale)
                    .collect()
            })
            .collect();
        self.subset_table(base, &terms, max_order)
    }

    /// Depth-first walk over subsets of size at most `max_order`, extending
    /// the per-centroid energies one axis at a time so each subset costs
    /// `O(m)`. Energies of `I` are `base + sum_{i in I} terms[i]`.
    fn subset_table(&self, base: Vec<f64>, terms: &[Vec<f64>], max_order: usize) -> SubsetValues {
        let n = self.n;
        let k = max_order.min(n);
        let m = self.m();
        let mut entries = Vec::new();
        let mut stack: Vec<Vec<f64>> = vec![vec![0.0; m]; k + 1];
        stack[0] = base;
        entries.push((0u32, posterior_from_energies(&stack[0], &self.labels)));
        // frames are (depth, next axis, bits)
        let mut frames = vec![(0usize, 0usize, 0u32)];
        while let Some((depth, next, bits)) = frames.pop() {
            if depth == k || next >= n {
                continue;
            }
            frames.push((depth, next + 1, bits));
            let child = bits | 1 << next;
            let (lower, upper) = stack.split_at_mut(depth + 1);
            for ((dst, src), t) in upper[0].iter_mut().zip(&lower[depth]).zip(&terms[next]) {
                *dst = src + t;
            }
            entries.push((child, posterior_from_energies(&stack[depth + 1], &self.labels)));
            frames.push((depth + 1, next + 1, child));
        }
        entries.sort_unstable_by_key(|&(b, _)| (b.count_ones(), b));
        SubsetValues {
            n,
            max_order: k,
            entries: entries
                .into_iter()
                .map(|(b, p)| (FeatureSet::from_bits(n, b).expect("bits within dimension"), p))
                .collect(),
        }
    }

    /// Draws `count` labelled points: a uniform centroid, then Gaussian noise.
    pub fn sample(&self, rng: &mut Rng, count: usize) -> Vec<(Point, u8)> {
        (0..count)
            .map(|_| {
                let j = rng.random_range(0..self.m());
                let coords = self.centroids[j]
                    .iter()
                    .map(|&c| {
                        let z: f64 = StandardNormal.sample(rng);
                        c + self.std * z
                    })
                    .collect();
                (Point::new(coords), self.labels[j])
            })
            .collect()
    }
}

/// Class-1 posteriors for all subsets up to some order, in lattice order
/// (cardinality, then bitmask).
#[derive(Clone, Debug, PartialEq)]
pub struct SubsetValues {
    n: usize,
    max_order: usize,
    entries: Vec<(FeatureSet, f64)>,
}

impl SubsetValues {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(FeatureSet, f64)] {
        &self.entries
    }

    pub fn get(&self, subset: FeatureSet) -> Option<f64> {
        let key = (subset.len(), subset.bits());
        self.entries
            .binary_search_by_key(&key, |(s, _)| (s.len(), s.bits()))
            .ok()
            .map(|i| self.entries[i].1)
    }

    /// Applies `measure` (e.g. [`prob_attr`]) to every stored posterior.
    pub fn map(&self, measure: impl Fn(f64) -> f64) -> Vec<(FeatureSet, f64)> {
        self.entries.iter().map(|&(s, p)| (s, measure(p))).collect()
    }
}

/// An attribution for one point: either one value per feature or one value
/// per feature subset.
#[derive(Clone, Debug, PartialEq)]
pub enum AttributionMap {
    Features(Vec<f64>),
    Subsets(Vec<(FeatureSet, f64)>),
}

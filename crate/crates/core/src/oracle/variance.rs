//! Conditional variance `Var[Y | X_I = x_I]` for small regression demos
//! with `X` uniform on a box.

use crate::error::{invalid, Result};
use crate::subset::FeatureSet;

/// Most free coordinates the quadrature path integrates over.
const MAX_FREE_DIMS: usize = 2;

#[derive(Clone, Debug)]
pub enum DemoDensity {
    /// `Y = w . X`, `X` uniform on `[lo, hi]^n`.
    UniformLinear { weights: Vec<f64>, lo: f64, hi: f64 },
    /// `Y = w . X + e`, `e ~ N(0, noise_std^2)` independent of `X`.
    UniformLinearNoise { weights: Vec<f64>, lo: f64, hi: f64, noise_std: f64 },
    /// `Y = g(X)` for an arbitrary map; quadrature only.
    UniformMap { n: usize, map: fn(&[f64]) -> f64, lo: f64, hi: f64 },
}

impl DemoDensity {
    pub fn dim(&self) -> usize {
        match self {
            Self::UniformLinear { weights, .. } | Self::UniformLinearNoise { weights, .. } => weights.len(),
            Self::UniformMap { n, .. } => *n,
        }
    }

    fn bounds(&self) -> (f64, f64) {
        match *self {
            Self::UniformLinear { lo, hi, .. }
            | Self::UniformLinearNoise { lo, hi, .. }
            | Self::UniformMap { lo, hi, .. } => (lo, hi),
        }
    }

    fn noise_var(&self) -> f64 {
        match self {
            Self::UniformLinearNoise { noise_std, .. } => noise_std * noise_std,
            _ => 0.0,
        }
    }

    /// Noise-free part of `Y` at `x`.
    fn signal(&self, x: &[f64]) -> f64 {
        match self {
            Self::UniformLinear { weights, .. } | Self::UniformLinearNoise { weights, .. } => {
                weights.iter().zip(x).map(|(w, v)| w * v).sum()
            }
            Self::UniformMap { map, .. } => map(x),
        }
    }

    fn check(&self, x: &[f64], subset: FeatureSet) -> Result<()> {
        let (lo, hi) = self.bounds();
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err(invalid(format!("box [{lo}, {hi}] is empty or unbounded")));
        }
        if let Self::UniformLinearNoise { noise_std, .. } = self {
            if !(*noise_std >= 0.0 && noise_std.is_finite()) {
                return Err(invalid(format!("noise std {noise_std} must be finite and >= 0")));
            }
        }
        if x.len() != self.dim() || subset.dim() != self.dim() {
            return Err(invalid(format!(
                "density has dimension {}, point {} and subset {}",
                self.dim(),
                x.len(),
                subset.dim()
            )));
        }
        Ok(())
    }
}

/// Closed form for the linear densities; quadrature for maps.
pub fn conditional_variance(density: &DemoDensity, x: &[f64], subset: FeatureSet) -> Result<f64> {
    density.check(x, subset)?;
    match density {
        DemoDensity::UniformLinear { weights, lo, hi } | DemoDensity::UniformLinearNoise { weights, lo, hi, .. } => {
            let box_var = (hi - lo).powi(2) / 12.0;
            let free: f64 = (0..weights.len()).filter(|&i| !subset.contains(i)).map(|i| weights[i].powi(2)).sum();
            Ok(free * box_var + density.noise_var())
        }
        DemoDensity::UniformMap { .. } => conditional_variance_quadrature(density, x, subset, 1e-12),
    }
}

/// Variance over the free coordinates by nested adaptive Simpson, with the
/// noise variance added by the law of total variance.
pub fn conditional_variance_quadrature(density: &DemoDensity, x: &[f64], subset: FeatureSet, tol: f64) -> Result<f64> {
    density.check(x, subset)?;
    let free: Vec<usize> = subset.complement().iter().collect();
    if free.len() > MAX_FREE_DIMS {
        return Err(invalid(format!(
            "quadrature supports at most {MAX_FREE_DIMS} free coordinates, got {}",
            free.len()
        )));
    }
    let (lo, hi) = density.bounds();
    let volume = (hi - lo).powi(free.len() as i32);
    let integrate = |h: &dyn Fn(&[f64]) -> f64| -> f64 {
        let mut z = x.to_vec();
        match free.as_slice() {
            [] => h(&z),
            &[a] => {
                adaptive_simpson(
                    |t| {
                        z[a] = t;
                        h(&z)
                    },
                    lo,
                    hi,
                    tol,
                ) / volume
            }
            &[a, b] => {
                let inner = |s: f64| {
                    let mut z = z.clone();
                    z[a] = s;
                    adaptive_simpson(
                        |t| {
                            z[b] = t;
                            h(&z)
                        },
                        lo,
                        hi,
                        tol,
                    )
                };
                adaptive_simpson(inner, lo, hi, tol * (hi - lo)) / volume
            }
            _ => unreachable!("free dimension count checked above"),
        }
    };
    let mean = integrate(&|z| density.signal(z));
    let var = integrate(&|z| (density.signal(z) - mean).powi(2));
    Ok(var.max(0.0) + density.noise_var())
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &mut dyn FnMut(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = simpson(fa, fm, fb, a, b);
    recurse(&mut f, a, b, fa, fm, fb, whole, tol, 48)
}

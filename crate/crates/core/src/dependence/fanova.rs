//! Functional ANOVA on a finite product grid with uniform weights.
//!
//! Produces the unique decomposition `f = Σ_I f_I` in which every `f_I`
//! depends only on the coordinates in `I` and every non-constant component
//! averages to zero along each of its own axes.

use std::collections::{BTreeMap, HashMap};

use crate::error::{invalid, Result};
use crate::subset::FeatureSet;

pub const FANOVA_MAX_DIM: usize = 4;
pub const FANOVA_MAX_LEVELS: usize = 4;

/// Axis levels of a full Cartesian grid. Values are stored row-major with
/// the first axis varying slowest.
#[derive(Clone, Debug)]
pub struct ProductGrid {
    levels: Vec<Vec<f64>>,
}

impl ProductGrid {
    pub fn new(levels: Vec<Vec<f64>>) -> Result<Self> {
        let n = levels.len();
        if n == 0 || n > FANOVA_MAX_DIM {
            return Err(invalid(format!("fANOVA supports 1..={FANOVA_MAX_DIM} axes, got {n}")));
        }
        for (axis, lv) in levels.iter().enumerate() {
            if lv.is_empty() || lv.len() > FANOVA_MAX_LEVELS {
                return Err(invalid(format!(
                    "axis {} has {} levels, expected 1..={FANOVA_MAX_LEVELS}",
                    axis + 1,
                    lv.len()
                )));
            }
            for (a, x) in lv.iter().enumerate() {
                if lv[..a].contains(x) {
                    return Err(invalid(format!("axis {} repeats level {x}", axis + 1)));
                }
            }
        }
        Ok(Self { levels })
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    /// Per-axis level indices of flat cell `flat`.
    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for axis in (0..self.dim()).rev() {
            let size = self.levels[axis].len();
            idx[axis] = flat % size;
            flat /= size;
        }
        idx
    }

    pub fn coords(&self, flat: usize) -> Vec<f64> {
        self.unravel(flat).iter().enumerate().map(|(a, &k)| self.levels[a][k]).collect()
    }
}

#[derive(Clone, Debug)]
pub struct FanovaDecomposition {
    grid: ProductGrid,
    /// Each component evaluated on every grid cell.
    components: BTreeMap<FeatureSet, Vec<f64>>,
}

impl FanovaDecomposition {
    pub fn grid(&self) -> &ProductGrid {
        &self.grid
    }

    pub fn components(&self) -> &BTreeMap<FeatureSet, Vec<f64>> {
        &self.components
    }

    pub fn component(&self, subset: FeatureSet) -> &[f64] {
        &self.components[&subset]
    }

    pub fn reconstruct(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.len()];
        for comp in self.components.values() {
            for (o, v) in out.iter_mut().zip(comp) {
                *o += v;
            }
        }
        out
    }
}

/// `f_I = E[f | X_I] - Σ_{J ⊊ I} f_J`, visiting subsets by cardinality.
pub fn fanova_decompose(grid: &ProductGrid, values: &[f64]) -> Result<FanovaDecomposition> {
    if values.len() != grid.len() {
        return Err(invalid(format!(
            "{} values for a product grid of {} cells",
            values.len(),
            grid.len()
        )));
    }
    let n = grid.dim();
    let cells: Vec<Vec<usize>> = (0..grid.len()).map(|c| grid.unravel(c)).collect();
    let mut components: BTreeMap<FeatureSet, Vec<f64>> = BTreeMap::new();
    for subset in FeatureSet::lattice(n) {
        let key = |c: &[usize]| subset.iter().map(|a| c[a]).collect::<Vec<_>>();
        let mut sums: HashMap<Vec<usize>, (f64, usize)> = HashMap::new();
        for (c, v) in cells.iter().zip(values) {
            let e = sums.entry(key(c)).or_insert((0.0, 0));
            e.0 += v;
            e.1 += 1;
        }
        let mut comp: Vec<f64> = cells
            .iter()
            .map(|c| {
                let (s, k) = sums[&key(c)];
                s / k as f64
            })
            .collect();
        for (lower, lower_vals) in &components {
            if lower.is_subset(subset) && *lower != subset {
                for (x, l) in comp.iter_mut().zip(lower_vals) {
                    *x -= l;
                }
            }
        }
        components.insert(subset, comp);
    }
    Ok(FanovaDecomposition { grid: grid.clone(), components })
}

use std::collections::{BTreeSet, HashMap};
use std::ops::Deref;

use crate::error::{invalid, Error, Result};
use crate::subset::{FeatureSet, MAX_DIM};

/// A point of `R^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Canonical projection: keeps the coordinates indexed by `subset` and zeroes
/// the rest.
pub fn project(x: &[f64], subset: FeatureSet) -> Result<Point> {
    if subset.dim() != x.len() {
        return Err(Error::DimensionMismatch { expected: subset.dim(), actual: x.len() });
    }
    Ok(Point(
        x.iter()
            .enumerate()
            .map(|(i, &v)| if subset.contains(i) { v } else { 0.0 })
            .collect(),
    ))
}

// -0.0 and 0.0 must land in the same group.
#[inline]
fn coord_key(v: f64) -> u64 {
    if v == 0.0 {
        0
    } else {
        v.to_bits()
    }
}

/// Grouping key of a point projected onto `subset`.
pub(crate) fn projection_key(x: &[f64], subset: FeatureSet) -> Vec<u64> {
    subset.iter().map(|i| coord_key(x[i])).collect()
}

#[inline]
pub(crate) fn same_projection(a: &[f64], b: &[f64], subset: FeatureSet) -> bool {
    subset.iter().all(|i| coord_key(a[i]) == coord_key(b[i]))
}

/// A finite binary relation between points of `R^n` and labels.
///
/// Points are compared with exact floating-point equality; noisy data has to
/// be quantised before it is wrapped in a relation.
#[derive(Clone, Debug)]
pub struct LabeledRelation {
    n: usize,
    points: Vec<Point>,
    labels: Vec<u32>,
}

impl LabeledRelation {
    /// Builds a relation, dropping repeated `(point, label)` pairs. A point
    /// listed with two different labels is kept twice.
    pub fn new(n: usize, points: Vec<Point>, labels: Vec<u32>) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&n) {
            return Err(invalid(format!("dimension {n} outside [1, {MAX_DIM}]")));
        }
        if points.len() != labels.len() {
            return Err(invalid(format!(
                "{} points but {} labels",
                points.len(),
                labels.len()
            )));
        }
        let full = FeatureSet::full(n);
        let mut seen = std::collections::HashSet::new();
        let mut rel = Self { n, points: Vec::new(), labels: Vec::new() };
        for (p, y) in points.into_iter().zip(labels) {
            if p.len() != n {
                return Err(Error::DimensionMismatch { expected: n, actual: p.len() });
            }
            if seen.insert((projection_key(&p, full), y)) {
                rel.points.push(p);
                rel.labels.push(y);
            }
        }
        Ok(rel)
    }

    /// Convenience constructor from plain coordinate rows.
    pub fn from_rows(n: usize, rows: &[(&[f64], u32)]) -> Result<Self> {
        let (points, labels) = rows.iter().map(|(p, y)| (Point::new(p.to_vec()), *y)).unzip();
        Self::new(n, points, labels)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn point(&self, j: usize) -> &Point {
        &self.points[j]
    }

    pub fn label(&self, j: usize) -> u32 {
        self.labels[j]
    }

    pub(crate) fn check_subset(&self, subset: FeatureSet) -> Result<()> {
        if subset.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: subset.dim() });
        }
        Ok(())
    }

    /// Membership mask of `A_I(R)`: entry `j` is true iff every point sharing
    /// point `j`'s projection onto `subset` carries the same label.
    pub fn domain_mask(&self, subset: FeatureSet) -> Result<Vec<bool>> {
        self.check_subset(subset)?;
        if self.is_empty() {
            return Err(invalid("relation is empty"));
        }
        // key -> (label of first member, whether a second label was seen)
        let mut groups: HashMap<Vec<u64>, (u32, bool)> = HashMap::new();
        let keys: Vec<Vec<u64>> =
            self.points.iter().map(|p| projection_key(p, subset)).collect();
        for (key, &y) in keys.iter().zip(&self.labels) {
            groups
                .entry(key.clone())
                .and_modify(|(first, mixed)| *mixed |= *first != y)
                .or_insert((y, false));
        }
        Ok(keys.iter().map(|k| !groups[k].1).collect())
    }

    /// Whether point `j` lies in `A_I(R)`; scans only the points sharing its
    /// projection.
    pub fn depends_on(&self, j: usize, subset: FeatureSet) -> Result<bool> {
        self.check_subset(subset)?;
        if j >= self.len() {
            return Err(invalid(format!("point index {j} out of range ({} points)", self.len())));
        }
        let x = &self.points[j];
        let y = self.labels[j];
        Ok(self
            .points
            .iter()
            .zip(&self.labels)
            .all(|(p, &l)| l == y || !same_projection(x, p, subset)))
    }

    /// True iff the relation is single-valued (every point has exactly one label).
    pub fn is_function(&self) -> bool {
        self.first_non_functional().is_none()
    }

    pub(crate) fn first_non_functional(&self) -> Option<usize> {
        let mask = self.domain_mask(FeatureSet::full(self.n)).ok()?;
        mask.iter().position(|&ok| !ok)
    }
}

/// `A_I(R)` as a set of point indices.
pub fn functional_domain(relation: &LabeledRelation, subset: FeatureSet) -> Result<BTreeSet<usize>> {
    Ok(relation
        .domain_mask(subset)?
        .into_iter()
        .enumerate()
        .filter_map(|(j, ok)| ok.then_some(j))
        .collect())
}

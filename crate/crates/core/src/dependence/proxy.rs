//! Proxy sets bounding non-functionality on a finite function.
//!
//! Both sets describe what happens when the features in `I` are released
//! and the complement `Ī` is held fixed:
//!
//! * `B_I`: points for which some other point with the same `Ī`
//!   coordinates has a different value (`B_I` is the complement of `A_Ī`).
//! * `C_I`: points whose value differs from the baseline, the mean value
//!   over all points sharing their `Ī` coordinates.
//!
//! Every point of `C_I` has a differing partner, so `C_I ⊆ B_I`.

use std::collections::{BTreeSet, HashMap};

use crate::dependence::relation::{projection_key, same_projection, LabeledRelation};
use crate::error::{Error, Result};
use crate::subset::FeatureSet;

/// Absolute tolerance of the mean comparison defining `C_I`.
pub const BASELINE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProxySets {
    pub alternate_value: BTreeSet<usize>,
    pub baseline_deviation: BTreeSet<usize>,
}

/// Returns `(B_I, C_I)` as point-index sets.
pub fn proxy_sets(relation: &LabeledRelation, subset: FeatureSet) -> Result<ProxySets> {
    relation.check_subset(subset)?;
    if let Some(point) = relation.first_non_functional() {
        return Err(Error::NotFunctional { point });
    }
    let points = relation.points();
    let labels = relation.labels();
    let fixed = subset.complement();

    // B_I by direct enumeration of alternates x'.
    let alternate_value = (0..points.len())
        .filter(|&j| {
            (0..points.len())
                .any(|k| labels[k] != labels[j] && same_projection(&points[j], &points[k], fixed))
        })
        .collect();

    let mut sums: HashMap<Vec<u64>, (f64, usize)> = HashMap::new();
    let keys: Vec<Vec<u64>> = points.iter().map(|p| projection_key(p, fixed)).collect();
    for (key, &y) in keys.iter().zip(labels) {
        let e = sums.entry(key.clone()).or_insert((0.0, 0));
        e.0 += f64::from(y);
        e.1 += 1;
    }
    let baseline_deviation = keys
        .iter()
        .zip(labels)
        .enumerate()
        .filter(|(_, (key, &y))| {
            let (sum, count) = sums[*key];
            (f64::from(y) - sum / count as f64).abs() > BASELINE_TOLERANCE
        })
        .map(|(j, _)| j)
        .collect();

    Ok(ProxySets { alternate_value, baseline_deviation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dependence::{and_grid, functional_domain};

    #[test]
    fn and_grid_proxies() {
        let r = and_grid();
        let first = FeatureSet::from_one_based(2, [1]).unwrap();
        let second = FeatureSet::from_one_based(2, [2]).unwrap();
        for s in [first, second] {
            let p = proxy_sets(&r, s).unwrap();
            assert!(p.baseline_deviation.is_subset(&p.alternate_value));
            let dom = functional_domain(&r, s.complement()).unwrap();
            let complement: BTreeSet<usize> = (0..4).filter(|j| !dom.contains(j)).collect();
            assert_eq!(p.alternate_value, complement);
        }
        // (1,0) is index 2. B_{2} frees x2 with x1 = 1 held: (1,1) has f = 1.
        // B_{1} frees x1 with x2 = 0 held: (0,0) has f = 0.
        let b1 = proxy_sets(&r, first).unwrap().alternate_value;
        let b2 = proxy_sets(&r, second).unwrap().alternate_value;
        assert!(!b1.contains(&2));
        assert!(b2.contains(&2));
    }

    #[test]
    fn rejects_relations_that_are_not_functions() {
        let r = LabeledRelation::from_rows(1, &[(&[0.0], 0), (&[0.0], 1)]).unwrap();
        assert!(matches!(
            proxy_sets(&r, FeatureSet::full(1)),
            Err(Error::NotFunctional { .. })
        ));
    }
}

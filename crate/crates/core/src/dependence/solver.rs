//! Exact minimal-selection solvers.
//!
//! Both problems are solved by walking the subset lattice one cardinality
//! level at a time. Dependence is monotone in the subset (a point depending
//! on `I` depends on every superset of `I`), so the first level containing a
//! feasible subset is the minimal cardinality and the walk stops there. Every
//! feasible subset of that level is reported.

use crate::dependence::relation::LabeledRelation;
use crate::error::{invalid, Error, Result};
use crate::subset::FeatureSet;

/// All minimal-cardinality subsets solving a selection problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectionSolution {
    pub minimal_sets: Vec<FeatureSet>,
    pub cardinality: usize,
}

impl SelectionSolution {
    pub fn is_unique(&self) -> bool {
        self.minimal_sets.len() == 1
    }

    /// The single minimum, if there is exactly one.
    pub fn unique(&self) -> Option<FeatureSet> {
        match self.minimal_sets.as_slice() {
            [s] => Some(*s),
            _ => None,
        }
    }
}

/// Minimal subsets `I` with point `j` in `A_I(R)`.
pub fn solve_instance_selection(relation: &LabeledRelation, j: usize) -> Result<SelectionSolution> {
    let n = relation.dim();
    if !relation.depends_on(j, FeatureSet::full(n))? {
        return Err(Error::NotFunctional { point: j });
    }
    for k in 0..=n {
        let mut hits = Vec::new();
        for subset in FeatureSet::subsets_of_size(n, k) {
            if relation.depends_on(j, subset)? {
                hits.push(subset);
            }
        }
        if !hits.is_empty() {
            return Ok(SelectionSolution { minimal_sets: hits, cardinality: k });
        }
    }
    unreachable!("the full set is feasible once the functionality check passed")
}

/// Instance-wise solutions for every point at once. Each lattice level's
/// domains are computed a single time and shared by all unresolved points.
pub fn solve_all_instance_selections(relation: &LabeledRelation) -> Result<Vec<SelectionSolution>> {
    if let Some(point) = relation.first_non_functional() {
        return Err(Error::NotFunctional { point });
    }
    if relation.is_empty() {
        return Err(invalid("relation is empty"));
    }
    let n = relation.dim();
    let m = relation.len();
    let mut solutions: Vec<Option<SelectionSolution>> = vec![None; m];
    let mut unresolved = m;
    for k in 0..=n {
        let mut level: Vec<Vec<FeatureSet>> = vec![Vec::new(); m];
        for subset in FeatureSet::subsets_of_size(n, k) {
            let mask = relation.domain_mask(subset)?;
            for (j, inside) in mask.into_iter().enumerate() {
                if inside && solutions[j].is_none() {
                    level[j].push(subset);
                }
            }
        }
        for (j, hits) in level.into_iter().enumerate() {
            if !hits.is_empty() {
                solutions[j] = Some(SelectionSolution { minimal_sets: hits, cardinality: k });
                unresolved -= 1;
            }
        }
        if unresolved == 0 {
            break;
        }
    }
    Ok(solutions.into_iter().map(|s| s.expect("full set resolves every point")).collect())
}

/// Minimal subsets `J` with every point of `R` in `A_J(R)`.
pub fn solve_global_selection(relation: &LabeledRelation) -> Result<SelectionSolution> {
    if let Some(point) = relation.first_non_functional() {
        return Err(Error::NotFunctional { point });
    }
    let n = relation.dim();
    for k in 0..=n {
        let mut hits = Vec::new();
        for subset in FeatureSet::subsets_of_size(n, k) {
            if relation.domain_mask(subset)?.iter().all(|&ok| ok) {
                hits.push(subset);
            }
        }
        if !hits.is_empty() {
            return Ok(SelectionSolution { minimal_sets: hits, cardinality: k });
        }
    }
    unreachable!("the full set is globally feasible for a function")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dependence::{and_grid, LabeledRelation};

    fn set(n: usize, idx: &[usize]) -> FeatureSet {
        FeatureSet::from_one_based(n, idx.iter().copied()).unwrap()
    }

    #[test]
    fn and_grid_instance_solutions() {
        let r = and_grid();
        // points: (0,0), (0,1), (1,0), (1,1)
        let s00 = solve_instance_selection(&r, 0).unwrap();
        assert_eq!(s00.minimal_sets, vec![set(2, &[1]), set(2, &[2])]);
        assert_eq!(s00.cardinality, 1);
        let s11 = solve_instance_selection(&r, 3).unwrap();
        assert_eq!(s11.minimal_sets, vec![set(2, &[1, 2])]);
        // (0,1): label 0 fixed by x1 = 0
        assert_eq!(solve_instance_selection(&r, 1).unwrap().minimal_sets, vec![set(2, &[1])]);
        assert_eq!(solve_instance_selection(&r, 2).unwrap().minimal_sets, vec![set(2, &[2])]);

        let all = solve_all_instance_selections(&r).unwrap();
        for (j, sol) in all.iter().enumerate() {
            assert_eq!(sol, &solve_instance_selection(&r, j).unwrap());
        }
    }

    #[test]
    fn single_point_needs_nothing() {
        let r = LabeledRelation::from_rows(2, &[(&[5.0, 5.0], 1)]).unwrap();
        let s = solve_instance_selection(&r, 0).unwrap();
        assert_eq!(s.minimal_sets, vec![FeatureSet::empty(2)]);
        assert_eq!(s.cardinality, 0);
    }

    #[test]
    fn contradicting_point_errors() {
        let r = LabeledRelation::from_rows(2, &[(&[0.0, 0.0], 0), (&[0.0, 0.0], 1), (&[1.0, 0.0], 1)])
            .unwrap();
        assert!(matches!(solve_instance_selection(&r, 0), Err(Error::NotFunctional { point: 0 })));
        assert!(solve_instance_selection(&r, 2).is_ok());
        assert!(matches!(solve_global_selection(&r), Err(Error::NotFunctional { .. })));
        assert!(matches!(solve_all_instance_selections(&r), Err(Error::NotFunctional { .. })));
    }

    #[test]
    fn global_examples() {
        assert_eq!(solve_global_selection(&and_grid()).unwrap().minimal_sets, vec![set(2, &[1, 2])]);

        let constant = LabeledRelation::from_rows(2, &[(&[0.0, 1.0], 1), (&[3.0, 2.0], 1)]).unwrap();
        assert_eq!(
            solve_global_selection(&constant).unwrap().minimal_sets,
            vec![FeatureSet::empty(2)]
        );

        // x2 duplicates x1, label thresholds x1
        let rows: Vec<(Vec<f64>, u32)> =
            (0..6).map(|k| (vec![k as f64, k as f64], u32::from(k >= 3))).collect();
        let refs: Vec<(&[f64], u32)> = rows.iter().map(|(p, y)| (p.as_slice(), *y)).collect();
        let dup = LabeledRelation::from_rows(2, &refs).unwrap();
        let sol = solve_global_selection(&dup).unwrap();
        assert_eq!(sol.minimal_sets, vec![set(2, &[1]), set(2, &[2])]);
        assert!(!sol.is_unique());
    }
}

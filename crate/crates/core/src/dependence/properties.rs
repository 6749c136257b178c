//! Structural checks every instance-wise selection must pass.

use crate::dependence::relation::{same_projection, LabeledRelation};
use crate::error::{invalid, Result};
use crate::subset::FeatureSet;

/// Largest dimension accepted by the exhaustive hierarchy check.
pub const PROPERTY2_MAX_DIM: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct Property1Report {
    pub verified: Vec<bool>,
    pub rate: f64,
}

impl Property1Report {
    pub fn verified_count(&self) -> usize {
        self.verified.iter().filter(|&&v| v).count()
    }
}

/// Complementary-dependence check on predicted selections.
///
/// Point `j` passes iff every point `k` sharing `j`'s projection onto
/// `predicted[j]` has `predicted[k] ⊆ predicted[j]`. Needs no ground truth.
pub fn check_property1(relation: &LabeledRelation, predicted: &[FeatureSet]) -> Result<Property1Report> {
    if predicted.len() != relation.len() {
        return Err(invalid(format!(
            "{} predictions for {} points",
            predicted.len(),
            relation.len()
        )));
    }
    if let Some(bad) = predicted.iter().find(|s| s.dim() != relation.dim()) {
        return Err(invalid(format!("prediction {bad} has dimension {} != {}", bad.dim(), relation.dim())));
    }
    let points = relation.points();
    let verified: Vec<bool> = (0..points.len())
        .map(|j| {
            let sel = predicted[j];
            points
                .iter()
                .zip(predicted)
                .all(|(p, other)| !same_projection(&points[j], p, sel) || other.is_subset(sel))
        })
        .collect();
    let rate = if verified.is_empty() {
        1.0
    } else {
        verified.iter().filter(|&&v| v).count() as f64 / verified.len() as f64
    };
    Ok(Property1Report { verified, rate })
}

/// Exhaustive dependence-hierarchy check: `I ⊆ J` implies
/// `A_I(R) ⊆ A_J(R)`, for every pair in the lattice.
pub fn check_property2(relation: &LabeledRelation) -> Result<bool> {
    check_property2_with(relation, |r, s| r.domain_mask(s))
}

/// Same check against an arbitrary domain function, so that a faulty
/// implementation can be shown to fail it.
pub fn check_property2_with<F>(relation: &LabeledRelation, domain: F) -> Result<bool>
where
    F: Fn(&LabeledRelation, FeatureSet) -> Result<Vec<bool>>,
{
    let n = relation.dim();
    if n > PROPERTY2_MAX_DIM {
        return Err(invalid(format!("exhaustive check limited to n <= {PROPERTY2_MAX_DIM}, got {n}")));
    }
    let masks: Vec<Vec<bool>> = (0..1u32 << n)
        .map(|bits| domain(relation, FeatureSet::from_bits(n, bits)?))
        .collect::<Result<_>>()?;
    // Checking each J against its one-element-smaller subsets covers all
    // pairs I ⊆ J by transitivity.
    for (bits, dom_j) in masks.iter().enumerate() {
        let mut rest = bits;
        while rest != 0 {
            let low = rest & rest.wrapping_neg();
            rest &= rest - 1;
            let dom_i = &masks[bits ^ low];
            if dom_i.iter().zip(dom_j).any(|(&in_i, &in_j)| in_i && !in_j) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dependence::{and_grid, solve_all_instance_selections, LabeledRelation};

    #[test]
    fn trivial_selections_are_structured() {
        let r = and_grid();
        let full = vec![FeatureSet::full(2); 4];
        let none = vec![FeatureSet::empty(2); 4];
        assert_eq!(check_property1(&r, &full).unwrap().rate, 1.0);
        assert_eq!(check_property1(&r, &none).unwrap().rate, 1.0);
        assert!(check_property1(&r, &full[..3]).is_err());
    }

    #[test]
    fn unique_exact_selections_pass_property1() {
        // XOR square with (-,-) erased: minima {1}, {1,2}, {2}
        let r = LabeledRelation::from_rows(
            2,
            &[(&[-0.125, 0.125], 0), (&[0.125, 0.125], 1), (&[0.125, -0.125], 0)],
        )
        .unwrap();
        let pred: Vec<FeatureSet> = solve_all_instance_selections(&r)
            .unwrap()
            .iter()
            .map(|s| s.unique().unwrap())
            .collect();
        assert_eq!(check_property1(&r, &pred).unwrap().rate, 1.0);
    }

    #[test]
    fn picking_one_of_several_minima_can_fail_the_check() {
        // (0,0) on the AND grid has minima {1} and {2}; the check compares
        // whole selections, so either pick clashes with a neighbour.
        let r = and_grid();
        let sols = solve_all_instance_selections(&r).unwrap();
        for pick in 0..2 {
            let pred: Vec<FeatureSet> = sols
                .iter()
                .map(|s| s.minimal_sets[pick.min(s.minimal_sets.len() - 1)])
                .collect();
            assert!(check_property1(&r, &pred).unwrap().rate < 1.0);
        }
    }

    #[test]
    fn detects_unstructured_selection() {
        let r = and_grid();
        let one = FeatureSet::from_one_based(2, [1]).unwrap();
        let both = FeatureSet::full(2);
        // (0,0) -> {1} but (0,1) shares x1 = 0 and claims {1,2}
        let pred = vec![one, both, one, both];
        let rep = check_property1(&r, &pred).unwrap();
        assert_eq!(rep.verified, vec![false, true, false, true]);
        assert_eq!(rep.rate, 0.5);
    }

    #[test]
    fn hierarchy_holds_and_mutation_breaks_it() {
        let r = and_grid();
        assert!(check_property2(&r).unwrap());
        let full = FeatureSet::full(2).bits();
        let mutated = check_property2_with(&r, |rel, s| {
            let mut m = rel.domain_mask(s)?;
            if s.bits() == full {
                m[0] = false;
            }
            Ok(m)
        })
        .unwrap();
        assert!(!mutated);
    }
}

//! Methods scoring feature subsets directly through the subset posteriors.

use super::ThresholdPath;
use crate::oracle::{prob_attr, MixtureOracle};
use crate::subset::FeatureSet;

/// Singleton attributions rescaled to `[0, 1]`: `2 max(p_i, 1 - p_i) - 1`.
pub(crate) fn gam_values(oracle: &MixtureOracle, x: &[f64]) -> Vec<f64> {
    let n = oracle.dim();
    (0..n)
        .map(|i| 2.0 * oracle.attr_prob(x, FeatureSet::from_indices(n, [i]).expect("index below n")) - 1.0)
        .collect()
}

/// Additive model over all subsets of size at most `max_order`.
///
/// Steps are the subsets, in lattice order (cardinality then bitmask), whose
/// attribution beats every earlier one; the first step clearing `eta` is
/// therefore the lowest-cardinality, lowest-mask subset with
/// `attr >= eta`. The fallback is the argmax among subsets of size exactly
/// `max_order`.
pub fn attr_gakm(oracle: &MixtureOracle, x: &[f64], max_order: usize) -> ThresholdPath {
    let table = oracle.subset_posteriors(x, max_order);
    let k = table.max_order();
    let mut steps: Vec<(FeatureSet, f64)> = Vec::new();
    let mut fallback: Option<(FeatureSet, f64)> = None;
    for (set, attr) in table.map(prob_attr) {
        if steps.last().is_none_or(|&(_, best)| attr > best) {
            steps.push((set, attr));
        }
        if set.len() == k && fallback.is_none_or(|(_, best)| attr > best) {
            fallback = Some((set, attr));
        }
    }
    let fallback = fallback.expect("some subset has size max_order").0;
    ThresholdPath { steps, fallback }
}

/// Disjoint feature groups from pairwise merges.
///
/// `{i, j}` is merged when its attribution exceeds both singleton
/// attributions by more than `margin`. Groups come out ordered by their
/// smallest index.
pub fn archipelago_groups(oracle: &MixtureOracle, x: &[f64], margin: f64) -> Vec<FeatureSet> {
    let n = oracle.dim();
    let single: Vec<f64> =
        (0..n).map(|i| oracle.attr_prob(x, FeatureSet::from_indices(n, [i]).expect("index below n"))).collect();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            let pair = oracle.attr_prob(x, FeatureSet::from_indices(n, [i, j]).expect("indices below n"));
            if pair > single[i].max(single[j]) + margin {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<FeatureSet> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(FeatureSet::empty(n));
        }
        groups[slot[root]] = groups[slot[root]].with(i);
    }
    groups
}

/// Pairwise-merge selection: groups are added greedily by descending group
/// attribution and the threshold picks the first cumulative union clearing
/// it, starting from the empty set. The fallback is the best single group.
pub fn archipelago_style(oracle: &MixtureOracle, x: &[f64], margin: f64) -> ThresholdPath {
    let n = oracle.dim();
    let mut scored: Vec<(FeatureSet, f64)> =
        archipelago_groups(oracle, x, margin).into_iter().map(|g| (g, oracle.attr_prob(x, g))).collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.bits().cmp(&b.0.bits())));
    let empty = FeatureSet::empty(n);
    let mut steps = vec![(empty, oracle.attr_prob(x, empty))];
    let mut union = empty;
    for (g, _) in &scored {
        union = union.union(*g);
        steps.push((union, oracle.attr_prob(x, union)));
    }
    ThresholdPath { steps, fallback: scored[0].0 }
}

/// `4 (p - 1/2)^2`, in `[0, 1]`.
pub fn interpretable_nn_score(p: f64) -> f64 {
    4.0 * (p - 0.5).powi(2)
}

/// Greedy forward path: from the empty set, repeatedly add the index whose
/// addition gives the highest score (lowest index on ties), for at most
/// `max_order` additions. The fallback is the best visited subset.
pub fn interpretable_nn_measure(oracle: &MixtureOracle, x: &[f64], max_order: usize) -> ThresholdPath {
    let n = oracle.dim();
    let score = |s: FeatureSet| interpretable_nn_score(oracle.posterior(x, s));
    let mut current = FeatureSet::empty(n);
    let mut steps = vec![(current, score(current))];
    for _ in 0..max_order.min(n) {
        let mut best: Option<(FeatureSet, f64)> = None;
        for i in (0..n).filter(|&i| !current.contains(i)) {
            let cand = current.with(i);
            let g = score(cand);
            if best.is_none_or(|(_, b)| g > b) {
                best = Some((cand, g));
            }
        }
        let Some(step) = best else { break };
        current = step.0;
        steps.push(step);
    }
    let mut fallback = steps[0];
    for &s in &steps {
        if s.1 > fallback.1 {
            fallback = s;
        }
    }
    ThresholdPath { steps, fallback: fallback.0 }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xor_minus_corner(std: f64) -> MixtureOracle {
        MixtureOracle::from_parts(
            2,
            vec![vec![-0.125, 0.125], vec![0.125, 0.125], vec![0.125, -0.125]],
            vec![0, 1, 0],
            std,
        )
        .unwrap()
    }

    fn pure_xor(std: f64) -> MixtureOracle {
        MixtureOracle::from_parts(
            2,
            vec![vec![-0.125, -0.125], vec![-0.125, 0.125], vec![0.125, 0.125], vec![0.125, -0.125]],
            vec![0, 1, 0, 1],
            std,
        )
        .unwrap()
    }

    fn set(ix: &[usize]) -> FeatureSet {
        FeatureSet::from_one_based(2, ix.iter().copied()).unwrap()
    }

    #[test]
    fn eroded_square_is_recovered() {
        let o = xor_minus_corner(0.125);
        let cases = [([0.125, 0.125], set(&[1, 2])), ([-0.125, 0.125], set(&[1])), ([0.125, -0.125], set(&[2]))];
        for eta in [0.7, 0.76, 0.8] {
            for (x, truth) in &cases {
                assert_eq!(attr_gakm(&o, x, 2).select(eta), *truth, "eta {eta} at {x:?}");
            }
        }
    }

    #[test]
    fn single_class_selects_nothing() {
        let o = MixtureOracle::from_parts(2, vec![vec![0.0, 0.0], vec![0.25, 0.0]], vec![1, 1], 0.1).unwrap();
        let x = [0.0, 0.0];
        assert_eq!(attr_gakm(&o, &x, 2).select(1.0), FeatureSet::empty(2));
        assert_eq!(archipelago_style(&o, &x, 0.0).select(1.0), FeatureSet::empty(2));
        assert_eq!(interpretable_nn_measure(&o, &x, 2).select(1.0), FeatureSet::empty(2));
    }

    #[test]
    fn order_cap_falls_back_to_a_singleton() {
        let o = pure_xor(0.125);
        let path = attr_gakm(&o, &[0.125, 0.125], 1);
        let s = path.select(0.9);
        assert_eq!(s.len(), 1);
        assert_eq!(path.select(1.0), s);
        assert_eq!(attr_gakm(&o, &[0.125, 0.125], 2).select(0.9), FeatureSet::full(2));
    }

    #[test]
    fn path_steps_are_strict_records_in_lattice_order() {
        let o = xor_minus_corner(0.2);
        let p = attr_gakm(&o, &[0.1, 0.05], 2);
        for w in p.steps.windows(2) {
            assert!(w[1].1 > w[0].1);
            assert!((w[0].0.len(), w[0].0.bits()) < (w[1].0.len(), w[1].0.bits()));
        }
        assert_eq!(p.fallback, FeatureSet::full(2));
    }

    #[test]
    fn xor_merges_into_one_group() {
        let o = pure_xor(0.1);
        let x = [0.125, 0.125];
        assert_eq!(archipelago_groups(&o, &x, 0.0), vec![set(&[1, 2])]);
        assert_eq!(archipelago_style(&o, &x, 0.0).select(0.9), set(&[1, 2]));
    }

    #[test]
    fn additive_task_keeps_singletons() {
        // label depends on x1 only; x2 carries nothing
        let o = MixtureOracle::from_parts(
            2,
            vec![vec![-0.125, -0.125], vec![-0.125, 0.125], vec![0.125, -0.125], vec![0.125, 0.125]],
            vec![0, 0, 1, 1],
            0.05,
        )
        .unwrap();
        let x = [0.125, 0.125];
        assert_eq!(archipelago_groups(&o, &x, 0.0).len(), 2);
        assert_eq!(archipelago_style(&o, &x, 0.0).select(0.9), set(&[1]));
        assert_eq!(attr_gakm(&o, &x, 2).select(0.9), set(&[1]));
    }

    #[test]
    fn interpretable_nn_greedy_trace_on_xor() {
        assert_eq!(interpretable_nn_score(1.0), 1.0);
        assert_eq!(interpretable_nn_score(0.5), 0.0);
        let o = pure_xor(0.05);
        let p = interpretable_nn_measure(&o, &[0.125, 0.125], 2);
        assert_eq!(p.steps.len(), 3);
        assert!(p.steps[1].1 < 1e-9);
        assert!(p.steps[2].1 > 0.99);
        assert_eq!(p.select(0.26), FeatureSet::full(2));
    }

    #[test]
    fn gam_values_are_unit_scaled() {
        let o = xor_minus_corner(0.125);
        let v = gam_values(&o, &[-0.125, 0.125]);
        assert!(v.iter().all(|&a| (0.0..=1.0).contains(&a)));
        assert!(v[0] > v[1]);
    }
}

mod common;

use attrbench::dependence::check_property1;
use attrbench::methods::{shap_baseline, shapley_expectation};
use attrbench::oracle::{prob_attr, MixtureOracle};
use attrbench::seed::rng_from_seed;
use attrbench::taskgen::{generate_task, task_from_json, task_to_json, task_to_relation, validate_task, GeneratorConfig};
use attrbench::FeatureSet;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dependence_is_monotone_in_the_subset(seed in any::<u64>()) {
        prop_assert!(common::property2_holds(&common::random_relation(seed)));
    }

    #[test]
    fn proxy_sets_are_dual_and_nested(seed in any::<u64>()) {
        let r = common::random_relation(seed);
        prop_assert_eq!(common::proxy_duality_holds(&r), Ok(()));
    }

    #[test]
    fn solver_agrees_with_brute_force(seed in any::<u64>()) {
        let r = common::random_relation(seed);
        prop_assert_eq!(common::solver_matches_brute_force(&r), Ok(()));
    }

    #[test]
    fn shapley_axioms(n in 2usize..=7, seed in any::<u64>()) {
        prop_assert_eq!(common::shapley_axioms_hold(n, seed, 1e-9), Ok(()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_tasks_meet_their_contract(n in 2usize..=6, seed in any::<u64>(), univariate in any::<bool>()) {
        let cfg = if univariate { GeneratorConfig::univariate(n) } else { GeneratorConfig::multivariate(n) };
        let task = generate_task(n, &cfg, seed).unwrap();
        prop_assert_eq!(&generate_task(n, &cfg, seed).unwrap(), &task);
        validate_task(&task).unwrap();
        prop_assert_eq!(&task_from_json(&task_to_json(&task)).unwrap(), &task);
        if univariate {
            prop_assert!(task.is_univariate());
        }
        // coordinates of different cubes never share an axis value, and
        // distinct values sit at least sigma apart
        for axis in 0..n {
            let mut values: Vec<(f64, usize)> = task.centroids.iter().map(|c| (c.coords[axis], c.hypercube)).collect();
            values.sort_by(|a, b| a.0.total_cmp(&b.0));
            for w in values.windows(2) {
                if w[0].1 != w[1].1 {
                    prop_assert!(w[0].0 != w[1].0);
                }
                if w[0].0 != w[1].0 {
                    prop_assert!(w[1].0 - w[0].0 >= task.sigma - 1e-12);
                }
            }
        }
        // every selected axis is witnessed by an opposite-label neighbour of the same cube
        for c in &task.centroids {
            for axis in c.selection.iter() {
                let witnessed = task.centroids.iter().any(|d| {
                    d.hypercube == c.hypercube
                        && d.label != c.label
                        && (0..n).all(|i| (i == axis) != (d.coords[i] == c.coords[i]))
                });
                prop_assert!(witnessed, "axis {} of {:?}", axis, c.coords.coords());
            }
        }
        // ground truth is structurally consistent
        let rep = check_property1(&task_to_relation(&task), &task.selections()).unwrap();
        prop_assert_eq!(rep.rate, 1.0);
    }

    #[test]
    fn oracle_posteriors_are_consistent(n in 2usize..=5, seed in any::<u64>()) {
        let task = generate_task(n, &GeneratorConfig::multivariate(n), seed).unwrap();
        let o = MixtureOracle::new(&task).unwrap();
        let ones = task.centroids.iter().filter(|c| c.label == 1).count() as f64;
        let mut rng = rng_from_seed(seed);
        for (x, _) in o.sample(&mut rng, 8) {
            let empty = o.posterior(&x, FeatureSet::empty(n));
            prop_assert!((empty - ones / task.m() as f64).abs() < 1e-12);
            let table = o.subset_posteriors(&x, n);
            prop_assert_eq!(table.len(), 1 << n);
            for &(s, p) in table.entries() {
                prop_assert!((0.0..=1.0).contains(&p));
                prop_assert!((p - o.posterior(&x, s)).abs() < 1e-9);
                prop_assert!(prob_attr(p) >= 0.5);
                prop_assert!((o.attr_prob(&x, s) - prob_attr(p)).abs() < 1e-9);
            }
            let total: f64 = shapley_expectation(&o, &x, 1 << n, &mut rng).iter().sum();
            prop_assert!((total - (o.predict(&x) - empty)).abs() < 1e-9);
            let total: f64 = shap_baseline(&o, &x, 1 << n, &mut rng).iter().sum();
            prop_assert!((total - (o.predict(&x) - o.predict(o.mean()))).abs() < 1e-9);
        }
    }
}

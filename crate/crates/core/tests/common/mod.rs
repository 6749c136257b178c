#![allow(dead_code)]

use attrbench::dependence::{
    check_property2, functional_domain, proxy_sets, solve_instance_selection, LabeledRelation, Point,
};
use attrbench::methods::{shapley_values, ShapleyMode};
use attrbench::seed::{rng_from_seed, Rng};
use attrbench::FeatureSet;
use rand::seq::SliceRandom;
use rand::Rng as _;

/// Random functional relation: distinct points of `{0, 1, 2}^n`, labels in
/// `{0, 1, 2}`, `n` in `1..=4`.
pub fn random_relation(seed: u64) -> LabeledRelation {
    let mut rng = rng_from_seed(seed);
    let n = rng.random_range(1..=4usize);
    let mut grid: Vec<Vec<f64>> = (0..3usize.pow(n as u32))
        .map(|mut code| {
            (0..n)
                .map(|_| {
                    let v = (code % 3) as f64;
                    code /= 3;
                    v
                })
                .collect()
        })
        .collect();
    grid.shuffle(&mut rng);
    let size = rng.random_range(1..=grid.len().min(24));
    grid.truncate(size);
    let labels: Vec<u32> = (0..size).map(|_| rng.random_range(0..3)).collect();
    LabeledRelation::new(n, grid.into_iter().map(Point::new).collect(), labels).unwrap()
}

/// `B_I = complement(A_Ī)`, `C_I ⊆ B_I` and `A_I ∩ C_Ī = ∅` for every `I`.
pub fn proxy_duality_holds(r: &LabeledRelation) -> Result<(), String> {
    let n = r.dim();
    for subset in FeatureSet::lattice(n) {
        let p = proxy_sets(r, subset).map_err(|e| e.to_string())?;
        let dual = functional_domain(r, subset.complement()).map_err(|e| e.to_string())?;
        for j in 0..r.len() {
            if p.alternate_value.contains(&j) == dual.contains(&j) {
                return Err(format!("B_{subset} disagrees with the dual domain at point {j}"));
            }
        }
        if !p.baseline_deviation.is_subset(&p.alternate_value) {
            return Err(format!("C_{subset} not inside B_{subset}"));
        }
        let own = functional_domain(r, subset).map_err(|e| e.to_string())?;
        let dual_c = proxy_sets(r, subset.complement()).map_err(|e| e.to_string())?.baseline_deviation;
        if own.iter().any(|j| dual_c.contains(j)) {
            return Err(format!("A_{subset} meets C of the complement"));
        }
    }
    Ok(())
}

/// Solver output equals the minimal feasible subsets found by brute force.
pub fn solver_matches_brute_force(r: &LabeledRelation) -> Result<(), String> {
    let n = r.dim();
    for j in 0..r.len() {
        let sol = solve_instance_selection(r, j).map_err(|e| e.to_string())?;
        let feasible: Vec<FeatureSet> =
            FeatureSet::lattice(n).filter(|&s| functional_domain(r, s).unwrap().contains(&j)).collect();
        let k = feasible.iter().map(|s| s.len()).min().unwrap();
        let mut minimal: Vec<FeatureSet> = feasible.into_iter().filter(|s| s.len() == k).collect();
        let mut got = sol.minimal_sets.clone();
        minimal.sort();
        got.sort();
        if got != minimal || sol.cardinality != k {
            return Err(format!("point {j}: solver {got:?} vs brute force {minimal:?}"));
        }
    }
    Ok(())
}

pub fn property2_holds(r: &LabeledRelation) -> bool {
    check_property2(r).unwrap()
}

/// Random game on `n` players where players 0 and 1 are interchangeable and
/// the last player is a dummy.
pub fn random_game(n: usize, rng: &mut Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..1u32 << n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let dummy = 1u32 << (n - 1);
    (0..1u32 << n)
        .map(|b| {
            let mut key = b & !dummy;
            // swap bits 0 and 1 into a canonical order
            if key & 1 == 1 && key & 2 == 0 {
                key = (key & !1) | 2;
            }
            raw[key as usize]
        })
        .collect()
}

/// Efficiency, symmetry, dummy and linearity in exact mode, to `tol`.
pub fn shapley_axioms_hold(n: usize, seed: u64, tol: f64) -> Result<(), String> {
    let mut rng = rng_from_seed(seed);
    let v = random_game(n, &mut rng);
    let w = random_game(n, &mut rng);
    let phi = shapley_values(n, |s| v[s.bits() as usize], ShapleyMode::Exact, &mut rng);
    let psi = shapley_values(n, |s| w[s.bits() as usize], ShapleyMode::Exact, &mut rng);
    let sum = shapley_values(n, |s| v[s.bits() as usize] + 2.0 * w[s.bits() as usize], ShapleyMode::Exact, &mut rng);
    let total: f64 = phi.iter().sum();
    let full = (1usize << n) - 1;
    if (total - (v[full] - v[0])).abs() > tol {
        return Err(format!("efficiency: {total} vs {}", v[full] - v[0]));
    }
    if n >= 3 && (phi[0] - phi[1]).abs() > tol {
        return Err(format!("symmetry: {} vs {}", phi[0], phi[1]));
    }
    if phi[n - 1].abs() > tol {
        return Err(format!("dummy player got {}", phi[n - 1]));
    }
    for i in 0..n {
        if (sum[i] - phi[i] - 2.0 * psi[i]).abs() > tol {
            return Err(format!("linearity fails for player {i}"));
        }
    }
    Ok(())
}

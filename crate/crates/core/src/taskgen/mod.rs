//! Synthetic binary classification tasks with known instance-wise
//! selections.
//!
//! A task is a superposition of labelled hypercubes placed on disjoint grid
//! coordinates. Each cube is eroded at random; a surviving vertex's
//! ground-truth selection is the set of axes along which a neighbour
//! survived. Every cube is checked against the exact solver before it is
//! accepted, and the assembled task is checked once more as a whole.

mod hypercube;
mod io;

pub use hypercube::{build_hypercube, erode, CubeVertex, ErodedVertex, Hypercube, Occupancy};
pub use io::{load_task, save_task, task_from_json, task_to_json, TaskFile};

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng as _;

use crate::dependence::{
    check_property1, solve_all_instance_selections, solve_instance_selection, LabeledRelation,
    Point,
};
use crate::error::{invalid, Error, Result};
use crate::seed::{rng_from_seed, Rng};
use crate::subset::{FeatureSet, MAX_DIM};

pub const GENERATOR_VERSION: &str = "attrbench-taskgen/1";

/// Erosion draws tried per cube before the cube itself is redrawn.
pub const EROSION_RETRIES: usize = 32;
/// Fresh cubes (new dimension and axes) tried for one cube slot.
pub const CUBE_REDRAWS: usize = 16;
/// Whole-task resamples before generation gives up.
pub const TASK_RESAMPLES: usize = 16;

pub const DEFAULT_SIGMA: f64 = 0.25;
pub const DEFAULT_NOISE_RATIO: f64 = 0.5;
pub const DEFAULT_EROSION: f64 = 0.3;

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub max_cubes: usize,
    pub max_cube_dim: usize,
    pub erosion_prob: f64,
    pub sigma: f64,
    pub noise_ratio: f64,
}

impl GeneratorConfig {
    /// Cubes of any dimension up to `n`, `n + 2` cubes at most.
    pub fn multivariate(n: usize) -> Self {
        Self {
            max_cubes: n + 2,
            max_cube_dim: n,
            erosion_prob: DEFAULT_EROSION,
            sigma: DEFAULT_SIGMA,
            noise_ratio: DEFAULT_NOISE_RATIO,
        }
    }

    /// Segments only, so every ground truth is a singleton.
    pub fn univariate(n: usize) -> Self {
        Self { max_cube_dim: 1, ..Self::multivariate(n) }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if !(2..=MAX_DIM).contains(&n) {
            return Err(invalid(format!("task dimension {n} outside [2, {MAX_DIM}]")));
        }
        if self.max_cubes == 0 || self.max_cube_dim == 0 {
            return Err(invalid("max_cubes and max_cube_dim must be >= 1"));
        }
        if !(0.0..1.0).contains(&self.erosion_prob) {
            return Err(invalid(format!("erosion probability {} outside [0, 1)", self.erosion_prob)));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(invalid(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !(self.noise_ratio > 0.0 && self.noise_ratio.is_finite()) {
            return Err(invalid(format!("noise ratio must be positive, got {}", self.noise_ratio)));
        }
        Ok(())
    }

    /// Grid slots per axis: each cube claims at most two per axis.
    pub fn slots_per_axis(&self) -> usize {
        2 * self.max_cubes
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Centroid {
    pub coords: Point,
    pub label: u8,
    pub selection: FeatureSet,
    pub hypercube: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Task {
    pub id: String,
    pub n: usize,
    pub sigma: f64,
    pub noise_std: f64,
    pub seed: u64,
    pub generator_version: String,
    pub centroids: Vec<Centroid>,
}

impl Task {
    pub fn m(&self) -> usize {
        self.centroids.len()
    }

    pub fn selections(&self) -> Vec<FeatureSet> {
        self.centroids.iter().map(|c| c.selection).collect()
    }

    pub fn centroid_mean(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.n];
        for c in &self.centroids {
            for (m, x) in mean.iter_mut().zip(c.coords.iter()) {
                *m += x;
            }
        }
        let m = self.m() as f64;
        mean.iter_mut().for_each(|v| *v /= m);
        mean
    }

    pub fn is_univariate(&self) -> bool {
        self.centroids.iter().all(|c| c.selection.len() == 1)
    }
}

/// The centroids with their labels, as a finite relation.
pub fn task_to_relation(task: &Task) -> LabeledRelation {
    LabeledRelation::new(
        task.n,
        task.centroids.iter().map(|c| c.coords.clone()).collect(),
        task.centroids.iter().map(|c| u32::from(c.label)).collect(),
    )
    .expect("task centroids form a well-formed relation")
}

/// Checks one eroded cube in isolation: every survivor must have a unique
/// minimal selection equal to its neighbour axes.
fn cube_is_valid(n: usize, survivors: &[ErodedVertex]) -> bool {
    if survivors.is_empty() || survivors.iter().any(ErodedVertex::is_isolated) {
        return false;
    }
    let relation = LabeledRelation::new(
        n,
        survivors.iter().map(|s| Point::new(s.vertex.coords.clone())).collect(),
        survivors.iter().map(|s| u32::from(s.vertex.label)).collect(),
    )
    .expect("cube vertices are well formed");
    // Cheap necessary condition first: the point must depend on its
    // neighbour axes at all.
    for (j, s) in survivors.iter().enumerate() {
        if !relation.depends_on(j, s.neighbor_axes).unwrap_or(false) {
            return false;
        }
    }
    survivors.iter().enumerate().all(|(j, s)| {
        solve_instance_selection(&relation, j)
            .map(|sol| sol.unique() == Some(s.neighbor_axes))
            .unwrap_or(false)
    })
}

/// Checks every stored invariant of a task: dimensions, label alphabet,
/// coordinate spacing, per-axis occupancy disjointness across cubes, and
/// that each stored selection is the unique exact minimum.
pub fn validate_task(task: &Task) -> Result<()> {
    let n = task.n;
    if task.centroids.is_empty() {
        return Err(invalid("task has no centroids"));
    }
    for (j, c) in task.centroids.iter().enumerate() {
        if c.coords.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: c.coords.len() });
        }
        if c.label > 1 {
            return Err(invalid(format!("centroid {j} has non-binary label {}", c.label)));
        }
        if c.selection.dim() != n {
            return Err(invalid(format!("centroid {j} selection has dimension {}", c.selection.dim())));
        }
    }
    // per axis: value -> owning cube
    let tol = task.sigma * 1e-9;
    for axis in 0..n {
        let mut owner: BTreeMap<u64, usize> = BTreeMap::new();
        for c in &task.centroids {
            let v = c.coords[axis];
            if let Some(&other) = owner.get(&v.to_bits()) {
                if other != c.hypercube {
                    return Err(invalid(format!(
                        "axis {}: value {v} shared by cubes {other} and {}",
                        axis + 1,
                        c.hypercube
                    )));
                }
            }
            owner.insert(v.to_bits(), c.hypercube);
        }
        let mut values: Vec<f64> = owner.keys().map(|&b| f64::from_bits(b)).collect();
        values.sort_by(f64::total_cmp);
        if let Some(w) = values.windows(2).find(|w| w[1] - w[0] < task.sigma - tol) {
            return Err(invalid(format!(
                "axis {}: values {} and {} closer than sigma = {}",
                axis + 1,
                w[0],
                w[1],
                task.sigma
            )));
        }
    }
    let labels: BTreeSet<u8> = task.centroids.iter().map(|c| c.label).collect();
    if task.m() > 1 && labels.len() < 2 {
        return Err(invalid("task has a single class"));
    }
    let relation = task_to_relation(task);
    let solutions = solve_all_instance_selections(&relation)?;
    for (j, (c, sol)) in task.centroids.iter().zip(&solutions).enumerate() {
        if sol.unique() != Some(c.selection) {
            return Err(invalid(format!(
                "centroid {j}: stored selection {} but exact minima are {:?}",
                c.selection, sol.minimal_sets
            )));
        }
    }
    let p1 = check_property1(&relation, &task.selections())?;
    if p1.rate != 1.0 {
        return Err(invalid(format!("ground truth fails complementary dependence (rate {})", p1.rate)));
    }
    Ok(())
}

/// Draws one cube for a free slot of the task and erodes it until it
/// validates. Returns `Ok(None)` when every redraw was exhausted.
fn place_cube(
    n: usize,
    config: &GeneratorConfig,
    occupancy: &mut Occupancy,
    rng: &mut Rng,
) -> Result<Option<(Hypercube, Vec<ErodedVertex>)>> {
    let max_dim = config.max_cube_dim.min(n);
    for _ in 0..CUBE_REDRAWS {
        let dim = rng.random_range(1..=max_dim);
        let axes = hypercube::random_axes(n, dim, rng);
        let (cube, vertices) = build_hypercube(n, axes, occupancy, rng)?;
        for _ in 0..EROSION_RETRIES {
            let survivors = erode(&cube, &vertices, config.erosion_prob, rng);
            if cube_is_valid(n, &survivors) {
                return Ok(Some((cube, survivors)));
            }
        }
        occupancy.release(&cube);
    }
    Ok(None)
}

fn sample_task(n: usize, config: &GeneratorConfig, rng: &mut Rng) -> Result<Option<Vec<Centroid>>> {
    let cube_count = rng.random_range(1..=config.max_cubes);
    let mut occupancy = Occupancy::new(n, config.slots_per_axis(), config.sigma);
    let mut centroids = Vec::new();
    for cube_id in 0..cube_count {
        match place_cube(n, config, &mut occupancy, rng) {
            Ok(Some((_, survivors))) => {
                centroids.extend(survivors.into_iter().map(|s| Centroid {
                    coords: Point::new(s.vertex.coords),
                    label: s.vertex.label,
                    selection: s.neighbor_axes,
                    hypercube: cube_id,
                }));
            }
            Ok(None) => return Ok(None),
            // Grid full: keep the cubes placed so far.
            Err(Error::Capacity { .. }) if cube_id > 0 => break,
            Err(e) => return Err(e),
        }
    }
    Ok(Some(centroids))
}

/// Generates a validated task; identical `(n, config, seed)` always yield
/// the identical task.
pub fn generate_task(n: usize, config: &GeneratorConfig, seed: u64) -> Result<Task> {
    config.validate(n)?;
    let mut rng = rng_from_seed(seed);
    let mut last_failure = String::from("no attempt made");
    for attempt in 0..TASK_RESAMPLES {
        let centroids = match sample_task(n, config, &mut rng)? {
            Some(c) => c,
            None => {
                last_failure = format!(
                    "attempt {attempt}: a cube slot failed {CUBE_REDRAWS} redraws x {EROSION_RETRIES} erosions"
                );
                continue;
            }
        };
        let task = Task {
            id: format!("task_{n}_{seed}"),
            n,
            sigma: config.sigma,
            noise_std: config.sigma * config.noise_ratio,
            seed,
            generator_version: GENERATOR_VERSION.to_string(),
            centroids,
        };
        match validate_task(&task) {
            Ok(()) => return Ok(task),
            Err(e) => last_failure = format!("attempt {attempt}: {e}"),
        }
    }
    Err(Error::Generation(format!(
        "n = {n}, seed = {seed}: {TASK_RESAMPLES} resamples exhausted; last failure: {last_failure}"
    )))
}

//! Selection scoring, threshold tuning and report aggregation.

mod report;

pub use report::{write_csv, write_json, ReportFile, CSV_HEADER};

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dependence::check_property1;
use crate::error::{invalid, Result};
use crate::methods::{run_method, MethodConfig, MethodId, MethodOutput};
use crate::oracle::MixtureOracle;
use crate::subset::FeatureSet;
use crate::taskgen::{task_to_relation, Task};

pub const Z_95: f64 = 1.96;

/// Confidence interval construction for a binomial proportion.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CiMethod {
    #[default]
    Normal,
    Wilson,
}

/// 95% half-width for proportion `p` over `count` trials.
pub fn ci_half_width(p: f64, count: usize, method: CiMethod) -> f64 {
    if count == 0 {
        return 0.0;
    }
    let n = count as f64;
    match method {
        CiMethod::Normal => Z_95 * (p * (1.0 - p) / n).sqrt(),
        CiMethod::Wilson => {
            let z2 = Z_95 * Z_95;
            Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: MethodId,
    pub family: String,
    pub accuracy: f64,
    /// Accuracy of the single most responsible feature; univariate families
    /// and feature methods only.
    pub acc_star: Option<f64>,
    pub prop1_rate: f64,
    pub ci: f64,
    pub centroids: usize,
    pub wall_time_s: f64,
    pub threshold: f64,
}

/// Raw outputs of one method over a task batch, `outputs[t][j]` for
/// centroid `j` of task `t`.
#[derive(Clone, Debug)]
pub struct MethodRun {
    pub method: MethodId,
    pub outputs: Vec<Vec<MethodOutput>>,
    pub wall_time_s: f64,
}

impl MethodRun {
    pub fn select(&self, threshold: f64) -> Vec<Vec<FeatureSet>> {
        self.outputs.iter().map(|task| task.iter().map(|o| o.select(threshold)).collect()).collect()
    }

    pub fn top_features(&self) -> Vec<Vec<Option<usize>>> {
        self.outputs.iter().map(|task| task.iter().map(MethodOutput::top_feature).collect()).collect()
    }
}

/// Runs `method` on every centroid of every task. Tasks run in parallel on
/// the current rayon pool; results keep task order.
pub fn run_batch(method: MethodId, tasks: &[Task], config: &MethodConfig) -> Result<MethodRun> {
    let start = Instant::now();
    let outputs = tasks
        .par_iter()
        .map(|task| {
            let oracle = MixtureOracle::new(task)?;
            Ok(task
                .centroids
                .iter()
                .enumerate()
                .map(|(j, c)| run_method(method, &oracle, &c.coords, task.sigma, config, &[task.seed, j as u64]))
                .collect())
        })
        .collect::<Result<Vec<Vec<MethodOutput>>>>()?;
    Ok(MethodRun { method, outputs, wall_time_s: start.elapsed().as_secs_f64() })
}

fn check_coverage<T>(tasks: &[Task], per_task: &[Vec<T>]) -> Result<()> {
    if per_task.len() != tasks.len() {
        return Err(invalid(format!("{} prediction lists for {} tasks", per_task.len(), tasks.len())));
    }
    for (t, (task, p)) in tasks.iter().zip(per_task).enumerate() {
        if p.len() != task.m() {
            return Err(invalid(format!("task {t}: {} predictions for {} centroids", p.len(), task.m())));
        }
    }
    Ok(())
}

/// Fraction of centroids whose predicted selection equals the ground truth.
pub fn selection_accuracy(tasks: &[Task], predictions: &[Vec<FeatureSet>]) -> Result<f64> {
    check_coverage(tasks, predictions)?;
    let mut correct = 0usize;
    let mut total = 0usize;
    for (task, preds) in tasks.iter().zip(predictions) {
        for (c, p) in task.centroids.iter().zip(preds) {
            correct += usize::from(c.selection == *p);
            total += 1;
        }
    }
    Ok(if total == 0 { 0.0 } else { correct as f64 / total as f64 })
}

/// Centroid-weighted complementary-dependence rate of the predictions.
pub fn property1_rate(tasks: &[Task], predictions: &[Vec<FeatureSet>]) -> Result<f64> {
    check_coverage(tasks, predictions)?;
    let mut verified = 0usize;
    let mut total = 0usize;
    for (task, preds) in tasks.iter().zip(predictions) {
        let rep = check_property1(&task_to_relation(task), preds)?;
        verified += rep.verified_count();
        total += preds.len();
    }
    Ok(if total == 0 { 1.0 } else { verified as f64 / total as f64 })
}

/// Fraction of centroids whose top feature is their singleton ground truth.
pub fn singleton_accuracy(tasks: &[Task], top: &[Vec<Option<usize>>]) -> Result<f64> {
    check_coverage(tasks, top)?;
    let mut correct = 0usize;
    let mut total = 0usize;
    for (task, tops) in tasks.iter().zip(top) {
        for (c, t) in task.centroids.iter().zip(tops) {
            let hit = match (*t, c.selection.len()) {
                (Some(i), 1) => c.selection.contains(i),
                _ => false,
            };
            correct += usize::from(hit);
            total += 1;
        }
    }
    Ok(if total == 0 { 0.0 } else { correct as f64 / total as f64 })
}

pub struct ScoreInput<'a> {
    pub method: MethodId,
    pub family: &'a str,
    pub tasks: &'a [Task],
    pub predictions: &'a [Vec<FeatureSet>],
    /// Top features, when the singleton-prior score applies.
    pub top: Option<&'a [Vec<Option<usize>>]>,
    pub wall_time_s: f64,
    pub threshold: f64,
    pub ci_method: CiMethod,
}

pub fn score(input: ScoreInput<'_>) -> Result<EvalReport> {
    let accuracy = selection_accuracy(input.tasks, input.predictions)?;
    let prop1_rate = property1_rate(input.tasks, input.predictions)?;
    let acc_star = input.top.map(|t| singleton_accuracy(input.tasks, t)).transpose()?;
    let centroids: usize = input.tasks.iter().map(Task::m).sum();
    Ok(EvalReport {
        method: input.method,
        family: input.family.to_string(),
        accuracy,
        acc_star,
        prop1_rate,
        ci: ci_half_width(accuracy, centroids, input.ci_method),
        centroids,
        wall_time_s: input.wall_time_s,
        threshold: input.threshold,
    })
}

/// Scores a finished run at `threshold`.
pub fn score_run(run: &MethodRun, tasks: &[Task], family: &str, threshold: f64, ci_method: CiMethod) -> Result<EvalReport> {
    let predictions = run.select(threshold);
    let univariate = tasks.iter().all(Task::is_univariate);
    let top = (univariate && run.method.is_feature_method()).then(|| run.top_features());
    score(ScoreInput {
        method: run.method,
        family,
        tasks,
        predictions: &predictions,
        top: top.as_deref(),
        wall_time_s: run.wall_time_s,
        threshold,
        ci_method,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TuneResult {
    pub method: MethodId,
    pub threshold: f64,
    pub accuracy: f64,
    /// `(threshold, accuracy)` for every grid value, ascending.
    pub curve: Vec<(f64, f64)>,
}

/// Grid search of the selection threshold: the most accurate grid value,
/// the smallest one among ties.
pub fn tune_run(run: &MethodRun, tasks: &[Task], grid: &[f64]) -> Result<TuneResult> {
    if grid.is_empty() {
        return Err(invalid("empty threshold grid"));
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let curve = sorted
        .iter()
        .map(|&t| Ok((t, selection_accuracy(tasks, &run.select(t))?)))
        .collect::<Result<Vec<_>>>()?;
    let mut best = curve[0];
    for &point in &curve[1..] {
        if point.1 > best.1 {
            best = point;
        }
    }
    Ok(TuneResult { method: run.method, threshold: best.0, accuracy: best.1, curve })
}

pub fn tune(method: MethodId, tasks: &[Task], config: &MethodConfig, grid: &[f64]) -> Result<TuneResult> {
    tune_run(&run_batch(method, tasks, config)?, tasks, grid)
}

/// Ranks from 1, ties sharing their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(invalid("rank correlation needs paired samples"));
    }
    let (ra, rb) = (average_ranks(a), average_ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    if va == 0.0 || vb == 0.0 {
        return Err(invalid("rank correlation undefined for constant input"));
    }
    Ok(cov / (va * vb).sqrt())
}

/// Minimum number of method reports for a rank correlation.
pub const MIN_CORRELATE_METHODS: usize = 5;

/// Spearman correlation between Property-1 rate and accuracy across methods.
pub fn correlate(reports: &[EvalReport]) -> Result<f64> {
    if reports.len() < MIN_CORRELATE_METHODS {
        return Err(invalid(format!(
            "rank correlation needs at least {MIN_CORRELATE_METHODS} methods, got {}",
            reports.len()
        )));
    }
    let p1: Vec<f64> = reports.iter().map(|r| r.prop1_rate).collect();
    let acc: Vec<f64> = reports.iter().map(|r| r.accuracy).collect();
    spearman(&p1, &acc)
}

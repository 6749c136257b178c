//! JSON task files: one task per file, selections stored 1-based.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Centroid, Task, GENERATOR_VERSION};
use crate::dependence::Point;
use crate::error::{Error, Result};
use crate::subset::FeatureSet;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CentroidFile {
    pub coords: Vec<f64>,
    pub label: u8,
    pub selection: Vec<usize>,
    pub hypercube: usize,
}

/// Wire form of a [`Task`]. The seed is a decimal string so that 64-bit
/// values survive JSON readers limited to doubles.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskFile {
    pub id: String,
    pub n: usize,
    pub sigma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_std: Option<f64>,
    pub seed: String,
    pub generator_version: String,
    pub centroids: Vec<CentroidFile>,
}

impl From<&Task> for TaskFile {
    fn from(task: &Task) -> Self {
        Self {
            id: task.id.clone(),
            n: task.n,
            sigma: task.sigma,
            noise_std: Some(task.noise_std),
            seed: task.seed.to_string(),
            generator_version: task.generator_version.clone(),
            centroids: task
                .centroids
                .iter()
                .map(|c| CentroidFile {
                    coords: c.coords.coords().to_vec(),
                    label: c.label,
                    selection: c.selection.to_one_based(),
                    hypercube: c.hypercube,
                })
                .collect(),
        }
    }
}

impl TryFrom<TaskFile> for Task {
    type Error = Error;

    fn try_from(file: TaskFile) -> Result<Self> {
        let n = file.n;
        let seed = file
            .seed
            .parse::<u64>()
            .map_err(|e| Error::Parse(format!("seed {:?}: {e}", file.seed)))?;
        if file.generator_version != GENERATOR_VERSION {
            log::warn!(
                "task {} was written by {:?}, reading with {:?}",
                file.id,
                file.generator_version,
                GENERATOR_VERSION
            );
        }
        let mut centroids = Vec::with_capacity(file.centroids.len());
        for (j, c) in file.centroids.into_iter().enumerate() {
            if c.coords.len() != n {
                return Err(Error::Parse(format!("centroid {j}: {} coords, expected {n}", c.coords.len())));
            }
            if c.label > 1 {
                return Err(Error::Parse(format!("centroid {j}: label {} is not 0 or 1", c.label)));
            }
            if c.selection.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Parse(format!("centroid {j}: selection not strictly ascending")));
            }
            let selection = FeatureSet::from_one_based(n, c.selection.iter().copied())
                .map_err(|e| Error::Parse(format!("centroid {j}: {e}")))?;
            centroids.push(Centroid {
                coords: Point::new(c.coords),
                label: c.label,
                selection,
                hypercube: c.hypercube,
            });
        }
        Ok(Task {
            id: file.id,
            n,
            sigma: file.sigma,
            noise_std: file.noise_std.unwrap_or(file.sigma / 2.0),
            seed,
            generator_version: file.generator_version,
            centroids,
        })
    }
}

pub fn task_to_json(task: &Task) -> String {
    let mut s = serde_json::to_string_pretty(&TaskFile::from(task)).expect("task serialises");
    s.push('\n');
    s
}

pub fn task_from_json(text: &str) -> Result<Task> {
    let file: TaskFile = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
    Task::try_from(file)
}

pub fn save_task(task: &Task, path: &Path) -> Result<()> {
    fs::write(path, task_to_json(task))?;
    Ok(())
}

pub fn load_task(path: &Path) -> Result<Task> {
    let text = fs::read_to_string(path)?;
    task_from_json(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

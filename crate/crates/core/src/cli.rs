//! `gen`, `tune` and `run` commands.
//!
//! Every failure surfaces as one `error: ...` line on stderr and a nonzero
//! exit code: 2 usage, 3 IO or malformed input, 4 generation failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::eval::{self, CiMethod, EvalReport, ReportFile, TuneResult};
use crate::methods::{MethodConfig, MethodId};
use crate::seed::derive_seed;
use crate::subset::MAX_DIM;
use crate::taskgen::{self, GeneratorConfig, Task, GENERATOR_VERSION};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const THRESHOLDS_FILE: &str = "thresholds.json";
pub const REPORT_CSV: &str = "report.csv";
pub const REPORT_JSON: &str = "report.json";

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_GENERATION: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "attrbench", version, about = "Synthetic ground-truth benchmark for instance-wise feature selection")]
pub struct Cli {
    #[command(flatten)]
    pub shared: Shared,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Shared {
    /// Master seed; every task and method stream derives from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a family of tasks.
    Gen(GenArgs),
    /// Grid-search selection thresholds on a task directory.
    Tune(TuneArgs),
    /// Score methods at fixed thresholds.
    Run(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Univariate,
    Multivariate,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Univariate => "univariate",
            Self::Multivariate => "multivariate",
        }
    }

    pub fn config(self, n: usize) -> GeneratorConfig {
        match self {
            Self::Univariate => GeneratorConfig::univariate(n),
            Self::Multivariate => GeneratorConfig::multivariate(n),
        }
    }
}

/// Inclusive dimension range written `a..b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimRange {
    pub lo: usize,
    pub hi: usize,
}

impl DimRange {
    /// Dimension of the task at `index`, cycling through the range.
    pub fn dim_at(self, index: usize) -> usize {
        self.lo + index % (self.hi - self.lo + 1)
    }
}

impl std::str::FromStr for DimRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
            None => (s, s),
        };
        let lo: usize = lo.trim().parse().map_err(|_| format!("bad dimension range {s:?}, expected a..b"))?;
        let hi: usize = hi.trim().parse().map_err(|_| format!("bad dimension range {s:?}, expected a..b"))?;
        if lo < 2 || hi > MAX_DIM || lo > hi {
            return Err(format!("dimension range {lo}..{hi} must lie within 2..{MAX_DIM} and be nonempty"));
        }
        Ok(Self { lo, hi })
    }
}

fn positive_count(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("count must be at least 1".into()),
        Ok(c) => Ok(c),
        Err(e) => Err(format!("bad count {s:?}: {e}")),
    }
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long, value_parser = positive_count)]
    pub count: usize,
    #[arg(long, default_value = "2..11")]
    pub dims: DimRange,
    /// Vertex erosion probability.
    #[arg(long, default_value_t = taskgen::DEFAULT_EROSION)]
    pub pe: f64,
    /// Grid spacing between hypercube coordinates.
    #[arg(long, default_value_t = taskgen::DEFAULT_SIGMA)]
    pub sigma: f64,
    /// Component standard deviation as a fraction of the spacing.
    #[arg(long, default_value_t = taskgen::DEFAULT_NOISE_RATIO)]
    pub noise_ratio: f64,
}

#[derive(Debug, Clone, Args)]
pub struct TuneArgs {
    #[arg(long)]
    pub tasks: PathBuf,
    /// Comma-separated method ids (default: all).
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<MethodId>>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub tasks: PathBuf,
    /// Thresholds file written by `tune`.
    #[arg(long)]
    pub thresholds: PathBuf,
    /// Comma-separated method ids (default: all).
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<MethodId>>,
    /// Add the rank correlation between Property-1 rate and accuracy.
    #[arg(long)]
    pub props: bool,
    /// Report zero wall time so reruns are byte-identical.
    #[arg(long)]
    pub no_timing: bool,
    /// Wilson score intervals instead of the normal approximation.
    #[arg(long)]
    pub wilson: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub n: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub family: Family,
    pub master_seed: u64,
    pub generator_version: String,
    pub config: GenSnapshot,
    pub tasks: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSnapshot {
    pub dims: DimRange,
    pub count: usize,
    pub erosion_prob: f64,
    pub sigma: f64,
    pub noise_ratio: f64,
}

/// Failure with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) | Error::Parse(_) => EXIT_IO,
            Error::Generation(_) | Error::Capacity { .. } => EXIT_GENERATION,
            Error::InvalidArgument(_) | Error::DimensionMismatch { .. } => EXIT_USAGE,
            Error::NotFunctional { .. } => 1,
        };
        Self { code, message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn io_at(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError { code: EXIT_IO, message: format!("{}: {e}", path.display()) }
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(io_at(path))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serialises");
    s.push('\n');
    s
}

fn pool(threads: Option<usize>) -> CliResult<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(CliError::usage("--threads must be at least 1"));
        }
        b = b.num_threads(t);
    }
    b.build().map_err(|e| CliError::usage(format!("thread pool: {e}")))
}

pub fn cmd_gen(shared: &Shared, args: &GenArgs) -> CliResult<Manifest> {
    for n in [args.dims.lo, args.dims.hi] {
        let mut cfg = args.family.config(n);
        cfg.erosion_prob = args.pe;
        cfg.sigma = args.sigma;
        cfg.noise_ratio = args.noise_ratio;
        cfg.validate(n)?;
    }
    fs::create_dir_all(&shared.out).map_err(io_at(&shared.out))?;
    let generated: Vec<CliResult<Task>> = pool(shared.threads)?.install(|| {
        (0..args.count)
            .into_par_iter()
            .map(|index| {
                let n = args.dims.dim_at(index);
                let mut cfg = args.family.config(n);
                cfg.erosion_prob = args.pe;
                cfg.sigma = args.sigma;
                cfg.noise_ratio = args.noise_ratio;
                taskgen::generate_task(n, &cfg, derive_seed(shared.seed, index as u64)).map_err(|e| {
                    let mut err = CliError::from(e);
                    err.message = format!("task {index}: {}", err.message);
                    err
                })
            })
            .collect()
    });
    let mut entries = Vec::with_capacity(args.count);
    for (index, task) in generated.into_iter().enumerate() {
        let task = task?;
        let file = format!("{}_{index}.json", args.family.as_str());
        write_text(&shared.out.join(&file), &taskgen::task_to_json(&task))?;
        entries.push(ManifestEntry { file, n: task.n, seed: task.seed });
    }
    let manifest = Manifest {
        family: args.family,
        master_seed: shared.seed,
        generator_version: GENERATOR_VERSION.to_string(),
        config: GenSnapshot {
            dims: args.dims,
            count: args.count,
            erosion_prob: args.pe,
            sigma: args.sigma,
            noise_ratio: args.noise_ratio,
        },
        tasks: entries,
    };
    write_text(&shared.out.join(MANIFEST_FILE), &to_json(&manifest))?;
    log::info!("wrote {} {} tasks to {}", args.count, args.family.as_str(), shared.out.display());
    Ok(manifest)
}

/// Tasks of a directory in manifest order, with the family name.
pub fn load_task_dir(dir: &Path) -> CliResult<(String, Vec<Task>)> {
    let manifest_path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&manifest_path).map_err(io_at(&manifest_path))?;
    let manifest: Manifest = serde_json::from_str(&text)
        .map_err(|e| CliError { code: EXIT_IO, message: format!("{}: {e}", manifest_path.display()) })?;
    if manifest.tasks.is_empty() {
        return Err(CliError { code: EXIT_IO, message: format!("{}: no tasks listed", manifest_path.display()) });
    }
    let tasks = manifest
        .tasks
        .iter()
        .map(|e| taskgen::load_task(&dir.join(&e.file)).map_err(CliError::from))
        .collect::<CliResult<Vec<_>>>()?;
    Ok((manifest.family.as_str().to_string(), tasks))
}

fn method_config(shared: &Shared) -> MethodConfig {
    MethodConfig { seed: shared.seed, ..MethodConfig::default() }
}

pub fn cmd_tune(shared: &Shared, args: &TuneArgs) -> CliResult<BTreeMap<String, TuneResult>> {
    let (_, tasks) = load_task_dir(&args.tasks)?;
    let methods = args.methods.clone().unwrap_or_else(|| MethodId::ALL.to_vec());
    let config = method_config(shared);
    fs::create_dir_all(&shared.out).map_err(io_at(&shared.out))?;
    let pool = pool(shared.threads)?;
    let mut out = BTreeMap::new();
    for m in methods {
        let result = pool.install(|| eval::tune(m, &tasks, &config, &m.threshold_kind().grid()))?;
        log::info!("{m}: threshold {} accuracy {:.4}", result.threshold, result.accuracy);
        out.insert(m.as_str().to_string(), result);
    }
    write_text(&shared.out.join(THRESHOLDS_FILE), &to_json(&out))?;
    Ok(out)
}

pub fn load_thresholds(path: &Path) -> CliResult<BTreeMap<String, TuneResult>> {
    let text = fs::read_to_string(path).map_err(io_at(path))?;
    serde_json::from_str(&text).map_err(|e| CliError { code: EXIT_IO, message: format!("{}: {e}", path.display()) })
}

pub fn cmd_run(shared: &Shared, args: &RunArgs) -> CliResult<ReportFile> {
    let (family, tasks) = load_task_dir(&args.tasks)?;
    let thresholds = load_thresholds(&args.thresholds)?;
    let methods = args.methods.clone().unwrap_or_else(|| MethodId::ALL.to_vec());
    let mut chosen = Vec::with_capacity(methods.len());
    for m in &methods {
        let t = thresholds.get(m.as_str()).ok_or_else(|| {
            CliError::usage(format!("no threshold for {m} in {}", args.thresholds.display()))
        })?;
        if !m.threshold_kind().contains(t.threshold) {
            return Err(CliError::usage(format!("threshold {} for {m} is outside its grid", t.threshold)));
        }
        chosen.push((*m, t.threshold));
    }
    let config = method_config(shared);
    let ci = if args.wilson { CiMethod::Wilson } else { CiMethod::Normal };
    let pool = pool(shared.threads)?;
    let mut reports: Vec<EvalReport> = Vec::with_capacity(chosen.len());
    for (m, threshold) in chosen {
        let run = pool.install(|| eval::run_batch(m, &tasks, &config))?;
        let mut report = eval::score_run(&run, &tasks, &family, threshold, ci)?;
        if args.no_timing {
            report.wall_time_s = 0.0;
        }
        log::info!("{m}: accuracy {:.4} +- {:.4}", report.accuracy, report.ci);
        reports.push(report);
    }
    let spearman = if args.props {
        if reports.len() >= eval::MIN_CORRELATE_METHODS {
            Some(eval::correlate(&reports)?)
        } else {
            log::warn!("rank correlation needs at least {} methods; omitted", eval::MIN_CORRELATE_METHODS);
            None
        }
    } else {
        None
    };
    let snapshot = serde_json::json!({
        "command": "run",
        "seed": shared.seed,
        "tasks": args.tasks.display().to_string(),
        "thresholds": args.thresholds.display().to_string(),
        "family": family,
        "methods": methods.iter().map(|m| m.as_str()).collect::<Vec<_>>(),
        "ci": ci,
        "props": args.props,
        "method_config": config,
    });
    let file = ReportFile { config: snapshot, reports, spearman };
    fs::create_dir_all(&shared.out).map_err(io_at(&shared.out))?;
    eval::write_csv(&file.reports, &shared.out.join(REPORT_CSV))?;
    eval::write_json(&file, &shared.out.join(REPORT_JSON))?;
    Ok(file)
}

pub fn execute(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(&cli.shared, a).map(drop),
        Command::Tune(a) => cmd_tune(&cli.shared, a).map(drop),
        Command::Run(a) => cmd_run(&cli.shared, a).map(drop),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Errors are printed to stderr as a single line.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid usage");
            eprintln!("error: {}", first.strip_prefix("error: ").unwrap_or(first));
            return EXIT_USAGE;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message.replace('\n', " "));
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_parse() {
        assert_eq!("2..11".parse::<DimRange>().unwrap(), DimRange { lo: 2, hi: 11 });
        assert_eq!("3..=3".parse::<DimRange>().unwrap(), DimRange { lo: 3, hi: 3 });
        assert!("1..4".parse::<DimRange>().is_err());
        assert!("2..33".parse::<DimRange>().is_err());
        assert!("5..4".parse::<DimRange>().is_err());
        let r = DimRange { lo: 2, hi: 4 };
        assert_eq!((0..5).map(|i| r.dim_at(i)).collect::<Vec<_>>(), vec![2, 3, 4, 2, 3]);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(main_with(["attrbench", "gen", "--family", "univariate", "--count", "0"]), EXIT_USAGE);
        assert_eq!(main_with(["attrbench", "frobnicate"]), EXIT_USAGE);
        assert_eq!(
            main_with(["attrbench", "run", "--tasks", ".", "--thresholds", "t.json", "--methods", "nope"]),
            EXIT_USAGE
        );
    }

    #[test]
    fn missing_task_dir_is_an_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("absent");
        let code = main_with([
            "attrbench".into(),
            "tune".into(),
            "--tasks".into(),
            missing.into_os_string(),
            "--out".into(),
            dir.path().as_os_str().to_owned(),
        ]);
        assert_eq!(code, EXIT_IO);
    }

    #[test]
    fn gen_tune_run_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let tasks = dir.path().join("tasks");
        let shared = Shared { seed: 9, threads: Some(1), out: tasks.clone() };
        let gen = GenArgs {
            family: Family::Multivariate,
            count: 3,
            dims: DimRange { lo: 2, hi: 3 },
            pe: 0.3,
            sigma: 0.25,
            noise_ratio: 0.5,
        };
        let manifest = cmd_gen(&shared, &gen).unwrap();
        assert_eq!(manifest.tasks.iter().map(|e| e.n).collect::<Vec<_>>(), vec![2, 3, 2]);
        assert_eq!(manifest.tasks[1].seed, derive_seed(9, 1));
        assert!(tasks.join("multivariate_2.json").exists());

        let out = dir.path().join("out");
        let shared = Shared { out: out.clone(), ..shared };
        let methods = Some(vec![MethodId::GaInf, MethodId::ShapleyE]);
        let tuned = cmd_tune(&shared, &TuneArgs { tasks: tasks.clone(), methods: methods.clone() }).unwrap();
        assert_eq!(tuned["gainf"].curve.len(), MethodId::GaInf.threshold_kind().grid().len());
        let run = RunArgs {
            tasks,
            thresholds: out.join(THRESHOLDS_FILE),
            methods,
            props: false,
            no_timing: true,
            wilson: false,
        };
        let report = cmd_run(&shared, &run).unwrap();
        assert_eq!(report.reports.len(), 2);
        let csv = fs::read_to_string(out.join(REPORT_CSV)).unwrap();
        assert_eq!(csv.lines().count(), 3);
    }
}

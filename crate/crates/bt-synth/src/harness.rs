//! Multi-seed experiments: learning-curve CSVs, summaries and DOT exports.

use std::fs;
use std::io;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use bt_synth_core::bt::{serialize, to_dot};
use bt_synth_core::gp::{run_evolution, EvolutionTrace, GpError, GpParams, Variant};
use bt_synth_core::planner::{plan_task, PlanError};
use bt_synth_core::sim::{compute_fitness, EpisodeResult, SimError, Simulator, TaskError, TaskSpec};
use bt_synth_core::BehaviorTree;

use crate::parallel::ParallelEvaluator;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "BT_SYNTH_OUT";

pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("results"))
}

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error("task {task} has no planning section")]
    NoPlanning { task: String },
    #[error("planning {task}: {source}")]
    Plan { task: String, source: PlanError },
    #[error("{task} {variant} seed {seed}: {source}")]
    Evolution { task: String, variant: Variant, seed: u64, source: GpError<SimError> },
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("writing {path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("invalid experiment: {0}")]
    InvalidPlan(&'static str),
}

/// Planner tree for a task.
pub fn plan_baseline(task: &TaskSpec) -> Result<BehaviorTree, HarnessError> {
    if task.planning.is_none() {
        return Err(HarnessError::NoPlanning { task: task.name.clone() });
    }
    let sim = Simulator::new(task.clone())?;
    plan_task(&sim).map_err(|source| HarnessError::Plan { task: task.name.clone(), source })
}

/// One episode of `tree` and its fitness.
pub fn evaluate_tree(task: &TaskSpec, tree: &BehaviorTree) -> Result<(EpisodeResult, f64), HarnessError> {
    let sim = Simulator::new(task.clone())?;
    let result = sim.run_episode(tree)?;
    let fitness = compute_fitness(&result, tree, task);
    Ok((result, fitness))
}

#[derive(Clone, Debug)]
pub struct ExperimentPlan {
    pub task: TaskSpec,
    pub variants: Vec<Variant>,
    pub seeds: Vec<u64>,
    /// Overrides the task's generations for the unboosted variants.
    pub generations: Option<u32>,
    /// Overrides the task's generations for the boosted variants.
    pub boosted_generations: Option<u32>,
    pub params: GpParams,
    pub out_dir: PathBuf,
    pub jobs: NonZeroUsize,
}

impl ExperimentPlan {
    /// All four variants over the task's default seeds `0..runs`.
    pub fn for_task(task: TaskSpec, out_dir: PathBuf, jobs: NonZeroUsize) -> Self {
        ExperimentPlan {
            seeds: (0..task.runs as u64).collect(),
            task,
            variants: Variant::ALL.to_vec(),
            generations: None,
            boosted_generations: None,
            params: GpParams::default(),
            out_dir,
            jobs,
        }
    }

    pub fn generations_for(&self, variant: Variant) -> u32 {
        let default = self.task.generations_for(variant.is_boosted());
        if variant.is_boosted() {
            self.boosted_generations.or(self.generations).unwrap_or(default)
        } else {
            self.generations.unwrap_or(default)
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.variants.is_empty() {
            return Err(HarnessError::InvalidPlan("no variants"));
        }
        if self.seeds.is_empty() {
            return Err(HarnessError::InvalidPlan("no seeds"));
        }
        let mut seeds = self.seeds.clone();
        seeds.sort_unstable();
        seeds.dedup();
        if seeds.len() != self.seeds.len() {
            return Err(HarnessError::InvalidPlan("seeds must be distinct"));
        }
        if self.variants.iter().any(|&v| self.generations_for(v) == 0) {
            return Err(HarnessError::InvalidPlan("generations must be positive"));
        }
        self.params.validate().map_err(|e| HarnessError::InvalidPlan(e.0))?;
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct RunRecord {
    pub task: String,
    pub variant: Variant,
    pub seed: u64,
    pub generations: u32,
    pub trace: EvolutionTrace,
    pub elapsed: Duration,
    /// Unique episodes after generation 0 over 32 per generation.
    pub unique_ratio: f64,
}

/// One evolution run, without writing files.
#[allow(clippy::too_many_arguments)]
pub fn run_single(
    task: &TaskSpec,
    variant: Variant,
    seed: u64,
    generations: u32,
    params: GpParams,
    baseline: Option<&BehaviorTree>,
    jobs: NonZeroUsize,
) -> Result<RunRecord, HarnessError> {
    let evaluator = ParallelEvaluator::new(Simulator::new(task.clone())?, jobs);
    let start = Instant::now();
    let base = if variant.uses_baseline() { baseline } else { None };
    let trace = run_evolution(params, &task.behavior_pool, base, variant, seed, generations, &evaluator)
        .map_err(|source| HarnessError::Evolution { task: task.name.clone(), variant, seed, source })?;
    Ok(RunRecord {
        task: task.name.clone(),
        variant,
        seed,
        generations,
        unique_ratio: trace.unique_episode_ratio(&params),
        trace,
        elapsed: start.elapsed(),
    })
}

pub fn curve_file_name(task: &str, variant: Variant, seed: u64) -> String {
    format!("{task}_{variant}_{seed}.csv")
}

pub fn best_dot_file_name(task: &str, variant: Variant, seed: u64) -> String {
    format!("best_{task}_{variant}_{seed}.dot")
}

pub fn planned_dot_file_name(task: &str) -> String {
    format!("planned_{task}.dot")
}

pub fn summary_file_name(task: &str) -> String {
    format!("{task}_summary.csv")
}

/// Runs every (variant, seed) pair in order and writes the outputs.
/// `progress` is called after each run.
pub fn run_experiment(
    plan: &ExperimentPlan,
    mut progress: impl FnMut(&RunRecord),
) -> Result<Vec<RunRecord>, HarnessError> {
    plan.validate()?;
    let out = &plan.out_dir;
    fs::create_dir_all(out).map_err(|source| HarnessError::Io { path: out.clone(), source })?;
    let name = &plan.task.name;
    let baseline = if plan.variants.iter().any(|v| v.uses_baseline()) {
        let tree = plan_baseline(&plan.task)?;
        write_file(&out.join(planned_dot_file_name(name)), &to_dot(&tree))?;
        Some(tree)
    } else {
        None
    };
    let mut records = Vec::new();
    for &variant in &plan.variants {
        for &seed in &plan.seeds {
            let record = run_single(
                &plan.task,
                variant,
                seed,
                plan.generations_for(variant),
                plan.params,
                baseline.as_ref(),
                plan.jobs,
            )?;
            write_curve_csv(&out.join(curve_file_name(name, variant, seed)), &record.trace)?;
            write_file(&out.join(best_dot_file_name(name, variant, seed)), &to_dot(&record.trace.best.tree))?;
            progress(&record);
            records.push(record);
        }
    }
    write_summary_csv(&out.join(summary_file_name(name)), &records)?;
    Ok(records)
}

fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    fs::write(path, contents).map_err(|source| HarnessError::Io { path: path.into(), source })
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>, HarnessError> {
    csv::Writer::from_path(path).map_err(|source| HarnessError::Csv { path: path.into(), source })
}

fn fixed(v: f64) -> String {
    format!("{v:.6}")
}

/// Header `generation,episodes,best_fitness,mean_fitness,best_tree`, one row
/// per generation including generation 0.
pub fn write_curve_csv(path: &Path, trace: &EvolutionTrace) -> Result<(), HarnessError> {
    let err = |source| HarnessError::Csv { path: path.into(), source };
    let mut w = csv_writer(path)?;
    w.write_record(["generation", "episodes", "best_fitness", "mean_fitness", "best_tree"]).map_err(err)?;
    for r in &trace.records {
        w.write_record([
            r.generation.to_string(),
            r.episodes.to_string(),
            fixed(r.best_fitness),
            fixed(r.mean_fitness),
            r.best_tree.clone(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|source| HarnessError::Io { path: path.into(), source })
}

/// Mean and population standard deviation across runs of equal length.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Per variant and generation: mean episodes and the mean and standard
/// deviation of best fitness across seeds.
pub fn write_summary_csv(path: &Path, records: &[RunRecord]) -> Result<(), HarnessError> {
    let err = |source| HarnessError::Csv { path: path.into(), source };
    let mut w = csv_writer(path)?;
    w.write_record(["variant", "generation", "runs", "mean_episodes", "mean_best_fitness", "std_best_fitness"])
        .map_err(err)?;
    let mut variants: Vec<Variant> = records.iter().map(|r| r.variant).collect();
    variants.dedup();
    for variant in variants {
        let runs: Vec<&RunRecord> = records.iter().filter(|r| r.variant == variant).collect();
        let len = runs.iter().map(|r| r.trace.records.len()).min().unwrap_or(0);
        for g in 0..len {
            let best: Vec<f64> = runs.iter().map(|r| r.trace.records[g].best_fitness).collect();
            let episodes: Vec<f64> = runs.iter().map(|r| r.trace.records[g].episodes as f64).collect();
            let (mean, std) = mean_std(&best);
            w.write_record([
                variant.to_string(),
                g.to_string(),
                runs.len().to_string(),
                fixed(mean_std(&episodes).0),
                fixed(mean),
                fixed(std),
            ])
            .map_err(err)?;
        }
    }
    w.flush().map_err(|source| HarnessError::Io { path: path.into(), source })
}

/// One line per run for terminal output.
pub fn describe_run(r: &RunRecord) -> String {
    let last = r.trace.records.last().expect("traces include generation 0");
    format!(
        "{} {} seed {}: best {:.6} ({} nodes) after {} episodes, unique ratio {:.3}, {:.2}s\n  {}",
        r.task,
        r.variant,
        r.seed,
        last.best_fitness,
        r.trace.best.tree.node_count(),
        last.episodes,
        r.unique_ratio,
        r.elapsed.as_secs_f64(),
        serialize(&r.trace.best.tree),
    )
}

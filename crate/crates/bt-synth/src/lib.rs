//! Std companion of `bt-synth-core`: the shipped task configs, a threaded
//! evaluator, the experiment harness and the `bt-synth` command line.

pub mod config;
pub mod harness;
pub mod parallel;

pub use config::{builtin_task, load_task, resolve_task, ConfigError, BUILTIN_TASKS};
pub use harness::{run_experiment, run_single, ExperimentPlan, HarnessError, RunRecord};
pub use parallel::ParallelEvaluator;

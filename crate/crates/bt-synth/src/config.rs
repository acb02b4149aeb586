//! Task configuration files.

use std::fs;
use std::path::{Path, PathBuf};

use bt_synth_core::gp::{GpParams, Variant};
use bt_synth_core::sim::{TaskError, TaskSpec};
use serde::Deserialize;

/// Names of the tasks compiled into the binary.
pub const BUILTIN_TASKS: [&str; 4] = ["task1", "task2", "task3", "task4"];

const TASK1: &str = include_str!("../tasks/task1.json");
const TASK2: &str = include_str!("../tasks/task2.json");
const TASK3: &str = include_str!("../tasks/task3.json");
const TASK4: &str = include_str!("../tasks/task4.json");

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{origin}: {source}")]
    Parse { origin: String, source: serde_json::Error },
    #[error("{origin}: {source}")]
    Invalid { origin: String, source: TaskError },
    #[error("unknown task {0:?}: expected task1..task4 or a path to a task file")]
    UnknownTask(String),
    #[error("{0}")]
    Plan(String),
}

fn parse_task(text: &str, origin: &str) -> Result<TaskSpec, ConfigError> {
    let task: TaskSpec =
        serde_json::from_str(text).map_err(|source| ConfigError::Parse { origin: origin.into(), source })?;
    task.validate().map_err(|source| ConfigError::Invalid { origin: origin.into(), source })?;
    Ok(task)
}

pub fn builtin_task(name: &str) -> Result<TaskSpec, ConfigError> {
    let text = match name {
        "task1" => TASK1,
        "task2" => TASK2,
        "task3" => TASK3,
        "task4" => TASK4,
        _ => return Err(ConfigError::UnknownTask(name.into())),
    };
    parse_task(text, name)
}

pub fn load_task(path: &Path) -> Result<TaskSpec, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
    parse_task(&text, &path.display().to_string())
}

/// A builtin task name, or else a path to a task file.
pub fn resolve_task(name_or_path: &str) -> Result<TaskSpec, ConfigError> {
    if BUILTIN_TASKS.contains(&name_or_path) {
        return builtin_task(name_or_path);
    }
    let path = Path::new(name_or_path);
    if path.exists() {
        load_task(path)
    } else {
        Err(ConfigError::UnknownTask(name_or_path.into()))
    }
}

/// An experiment file as read by `bt-synth experiment`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    /// Builtin task name or path, relative paths resolved against the file.
    pub task: String,
    #[serde(default)]
    pub variants: Option<Vec<Variant>>,
    #[serde(default)]
    pub seeds: Option<Vec<u64>>,
    #[serde(default)]
    pub generations: Option<u32>,
    #[serde(default)]
    pub boosted_generations: Option<u32>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub params: Option<GpParams>,
}

pub fn load_experiment(path: &Path) -> Result<ExperimentFile, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
    let mut file: ExperimentFile = serde_json::from_str(&text)
        .map_err(|source| ConfigError::Parse { origin: path.display().to_string(), source })?;
    if !BUILTIN_TASKS.contains(&file.task.as_str()) && Path::new(&file.task).is_relative() {
        if let Some(dir) = path.parent() {
            file.task = dir.join(&file.task).display().to_string();
        }
    }
    Ok(file)
}

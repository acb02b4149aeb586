use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::geometry::{Point3, Size};
use crate::bt::{is_valid_identifier, BehaviorId};
use crate::planner::Planning;

/// A brick as declared in a task: geometry and start pose.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BrickSpec {
    pub id: String,
    pub size: Size,
    pub pose: Point3,
    /// Lateral offset of the center of mass along x, in mm.
    #[serde(default)]
    pub com_offset_x: f64,
    /// Nothing may be stacked on this brick, and it may not be stacked
    /// on anything (only enforced when `rules.red_no_stack` is set).
    #[serde(default)]
    pub no_stack: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Goal {
    pub brick: String,
    pub target: Point3,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Rules {
    pub collision_corridor_check: bool,
    pub balance_check: bool,
    pub press_fit_residual: bool,
    pub red_no_stack: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Limits {
    pub max_ticks: u32,
    pub max_action_ticks: u32,
    /// Abort the episode once this many leaf ticks have been spent.
    pub evaluation_budget: Option<u64>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_ticks: 200, max_action_ticks: 50, evaluation_budget: None }
    }
}

/// Constants of the fitness function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitnessParams {
    /// Goal distance tolerance δ in mm.
    pub delta: f64,
    /// λ, per node.
    pub length_penalty: f64,
    /// τ, applied when the episode times out.
    pub timeout_penalty: f64,
    /// φ, applied when the root returns Failure.
    pub failure_penalty: f64,
    /// η, applied when a brick is held at the end.
    pub hold_penalty: f64,
}

impl Default for FitnessParams {
    fn default() -> Self {
        FitnessParams {
            delta: 0.4,
            length_penalty: 0.1,
            timeout_penalty: 10.0,
            failure_penalty: 50.0,
            hold_penalty: 0.0,
        }
    }
}

fn default_runs() -> u32 {
    10
}

/// Everything needed to run episodes of one assembly task.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub name: String,
    pub bricks: Vec<BrickSpec>,
    /// Named target positions (base center of a brick placed there).
    pub positions: BTreeMap<String, Point3>,
    /// Table positions (z = 0) the pool may refer to. Elevated positions
    /// are not restricted.
    #[serde(default)]
    pub allowed_positions: Option<Vec<String>>,
    pub goals: Vec<Goal>,
    #[serde(default)]
    pub rules: Rules,
    pub behavior_pool: Vec<BehaviorId>,
    /// Expected pool size, checked on load.
    #[serde(default)]
    pub pool_size: Option<usize>,
    #[serde(default)]
    pub limits: Limits,
    #[serde(default)]
    pub fitness: FitnessParams,
    /// Generations for the scratch and baseline variants.
    pub generations: u32,
    /// Generations for the boosted variants, when different.
    #[serde(default)]
    pub boosted_generations: Option<u32>,
    /// Default number of seeds in an experiment.
    #[serde(default = "default_runs")]
    pub runs: u32,
    #[serde(default)]
    pub planning: Option<Planning>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TaskError {
    #[error("task has no bricks")]
    NoBricks,
    #[error("invalid brick id {0:?}")]
    InvalidBrickId(String),
    #[error("duplicate brick id {0:?}")]
    DuplicateBrick(String),
    #[error("brick {0:?} has non-positive size or negative z")]
    BadGeometry(String),
    #[error("invalid position id {0:?}")]
    InvalidPositionId(String),
    #[error("task has no goals")]
    NoGoals,
    #[error("goal references unknown brick {0:?}")]
    UnknownGoalBrick(String),
    #[error("behavior {behavior:?} references unknown brick {brick:?}")]
    UnknownBrick { behavior: String, brick: String },
    #[error("behavior {behavior:?} references unknown position {position:?}")]
    UnknownPosition { behavior: String, position: String },
    #[error("behavior {behavior:?} references table position {position:?} outside allowed_positions")]
    DisallowedPosition { behavior: String, position: String },
    #[error("behavior {behavior:?} stacks a brick on itself")]
    SelfReference { behavior: String },
    #[error("allowed position {0:?} is not a declared position")]
    UnknownAllowedPosition(String),
    #[error("duplicate behavior {0:?} in pool")]
    DuplicateBehavior(String),
    #[error("behavior pool has {actual} entries, expected {expected}")]
    PoolSize { expected: usize, actual: usize },
    #[error("fitness parameter {0} must be finite and non-negative")]
    BadFitnessParam(&'static str),
    #[error("limits must be positive")]
    BadLimits,
    #[error("generations must be positive")]
    BadGenerations,
    #[error("planning: {0}")]
    Planning(String),
}

impl TaskSpec {
    pub fn brick_index(&self, id: &str) -> Option<usize> {
        self.bricks.iter().position(|b| b.id == id)
    }

    /// Generations for a run, boosted or not.
    pub fn generations_for(&self, boosted: bool) -> u32 {
        if boosted {
            self.boosted_generations.unwrap_or(self.generations)
        } else {
            self.generations
        }
    }

    /// Checks that a behavior only references declared bricks and positions.
    pub fn check_behavior(&self, b: &BehaviorId) -> Result<(), TaskError> {
        let name = || alloc::format!("{b}");
        for brick in b.bricks() {
            if self.brick_index(brick).is_none() {
                return Err(TaskError::UnknownBrick { behavior: name(), brick: brick.into() });
            }
        }
        if let BehaviorId::On { upper, lower } | BehaviorId::PutOn { brick: upper, support: lower } = b {
            if upper == lower {
                return Err(TaskError::SelfReference { behavior: name() });
            }
        }
        if let Some(p) = b.position() {
            let Some(point) = self.positions.get(p) else {
                return Err(TaskError::UnknownPosition { behavior: name(), position: p.into() });
            };
            if let Some(allowed) = &self.allowed_positions {
                if point.z.abs() < 1e-9 && !allowed.iter().any(|a| a == p) {
                    return Err(TaskError::DisallowedPosition { behavior: name(), position: p.into() });
                }
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), TaskError> {
        if self.bricks.is_empty() {
            return Err(TaskError::NoBricks);
        }
        let mut ids = BTreeSet::new();
        for b in &self.bricks {
            if !is_valid_identifier(&b.id) {
                return Err(TaskError::InvalidBrickId(b.id.clone()));
            }
            if !ids.insert(b.id.as_str()) {
                return Err(TaskError::DuplicateBrick(b.id.clone()));
            }
            let s = b.size;
            let finite = [s.width, s.depth, s.height, b.pose.x, b.pose.y, b.pose.z, b.com_offset_x]
                .iter()
                .all(|v| v.is_finite());
            if !finite || s.width <= 0.0 || s.depth <= 0.0 || s.height <= 0.0 || b.pose.z < 0.0 {
                return Err(TaskError::BadGeometry(b.id.clone()));
            }
        }
        for p in self.positions.keys() {
            if !is_valid_identifier(p) {
                return Err(TaskError::InvalidPositionId(p.clone()));
            }
        }
        if let Some(allowed) = &self.allowed_positions {
            for a in allowed {
                if !self.positions.contains_key(a) {
                    return Err(TaskError::UnknownAllowedPosition(a.clone()));
                }
            }
        }
        if self.goals.is_empty() {
            return Err(TaskError::NoGoals);
        }
        for g in &self.goals {
            if self.brick_index(&g.brick).is_none() {
                return Err(TaskError::UnknownGoalBrick(g.brick.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for b in &self.behavior_pool {
            self.check_behavior(b)?;
            if !seen.insert(b) {
                return Err(TaskError::DuplicateBehavior(alloc::format!("{b}")));
            }
        }
        if let Some(expected) = self.pool_size {
            if expected != self.behavior_pool.len() {
                return Err(TaskError::PoolSize { expected, actual: self.behavior_pool.len() });
            }
        }
        let f = &self.fitness;
        for (name, v) in [
            ("delta", f.delta),
            ("length_penalty", f.length_penalty),
            ("timeout_penalty", f.timeout_penalty),
            ("failure_penalty", f.failure_penalty),
            ("hold_penalty", f.hold_penalty),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(TaskError::BadFitnessParam(name));
            }
        }
        if self.limits.max_ticks == 0 || self.limits.max_action_ticks == 0 {
            return Err(TaskError::BadLimits);
        }
        if self.generations == 0 || self.boosted_generations == Some(0) {
            return Err(TaskError::BadGenerations);
        }
        if let Some(planning) = &self.planning {
            planning.validate(self).map_err(|e| TaskError::Planning(alloc::format!("{e}")))?;
        }
        Ok(())
    }
}

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::behaviors::{condition_holds, resolve, step_action, Resolved, SimError};
use super::task::{TaskError, TaskSpec};
use super::world::WorldState;
use crate::bt::{tick, BehaviorId, BehaviorTree, LeafExecutor, NodeKind, Status, TickError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EndReason {
    SolvedDoubleSuccess,
    RootFailure,
    TickTimeout,
    BudgetAbort,
}

impl EndReason {
    pub fn as_str(self) -> &'static str {
        match self {
            EndReason::SolvedDoubleSuccess => "solved-double-success",
            EndReason::RootFailure => "root-failure",
            EndReason::TickTimeout => "tick-timeout",
            EndReason::BudgetAbort => "budget-abort",
        }
    }
}

impl core::fmt::Display for EndReason {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub final_world: WorldState,
    pub ticks_used: u32,
    pub end_reason: EndReason,
    pub held_at_end: bool,
    /// Leaf evaluations performed, for budgets and diagnostics.
    pub leaf_ticks: u64,
}

/// A validated task ready to run episodes.
#[derive(Clone, Debug)]
pub struct Simulator {
    task: TaskSpec,
    pool: BTreeSet<BehaviorId>,
    initial: WorldState,
}

impl Simulator {
    pub fn new(task: TaskSpec) -> Result<Self, TaskError> {
        task.validate()?;
        let pool = task.behavior_pool.iter().cloned().collect();
        let initial = WorldState::from_task(&task);
        Ok(Simulator { task, pool, initial })
    }

    pub fn task(&self) -> &TaskSpec {
        &self.task
    }

    pub fn initial_world(&self) -> &WorldState {
        &self.initial
    }

    /// Evaluates a condition against `world`.
    pub fn eval_condition(&self, behavior: &BehaviorId, world: &WorldState) -> Result<Status, SimError> {
        if !behavior.is_condition() {
            return Err(SimError::NotACondition(alloc::format!("{behavior}")));
        }
        let r = resolve(&self.task, behavior)?;
        Ok(if condition_holds(world, &r) { Status::Success } else { Status::Failure })
    }

    /// Advances an action by one tick. A different action in flight is
    /// halted once this one starts running.
    pub fn step_action(&self, behavior: &BehaviorId, world: &mut WorldState) -> Result<Status, SimError> {
        if !behavior.is_action() {
            return Err(SimError::NotAnAction(alloc::format!("{behavior}")));
        }
        let r = resolve(&self.task, behavior)?;
        Ok(step_action(world, &self.task.rules, self.task.limits.max_action_ticks, behavior, &r))
    }

    /// Runs one episode of `tree` from the task's initial state.
    pub fn run_episode(&self, tree: &BehaviorTree) -> Result<EpisodeResult, SimError> {
        let mut leaves = LeafRunner { sim: self, resolved: Vec::with_capacity(tree.node_count()), leaf_ticks: 0 };
        for node in tree.nodes() {
            leaves.resolved.push(match node.kind() {
                NodeKind::Leaf(b) => {
                    if !self.pool.contains(b) {
                        return Err(SimError::NotInPool(alloc::format!("{b}")));
                    }
                    Some(resolve(&self.task, b)?)
                }
                NodeKind::Control(_) => None,
            });
        }

        let limits = self.task.limits;
        let mut world = self.initial.clone();
        let mut previous_success = false;
        let mut end_reason = EndReason::TickTimeout;
        while world.tick_count < limits.max_ticks {
            world.tick_count += 1;
            if let Some(active) = &mut world.active_action {
                active.touched = false;
            }
            let status = match tick(tree, &mut world, &mut leaves) {
                Ok(s) => s,
                Err(TickError::Leaf(e)) => return Err(e),
                Err(TickError::ConditionRunning { node }) => return Err(SimError::ConditionRunning(node)),
            };
            if world.active_action.as_ref().is_some_and(|a| !a.touched) {
                world.active_action = None;
            }
            match status {
                Status::Failure => {
                    end_reason = EndReason::RootFailure;
                    break;
                }
                Status::Success if previous_success => {
                    end_reason = EndReason::SolvedDoubleSuccess;
                    break;
                }
                Status::Success => previous_success = true,
                Status::Running => previous_success = false,
            }
            if limits.evaluation_budget.is_some_and(|b| leaves.leaf_ticks >= b) {
                end_reason = EndReason::BudgetAbort;
                break;
            }
        }
        Ok(EpisodeResult {
            held_at_end: world.gripper.held.is_some(),
            ticks_used: world.tick_count,
            end_reason,
            final_world: world,
            leaf_ticks: leaves.leaf_ticks,
        })
    }
}

/// Runs one episode of `tree` on `task`.
pub fn run_episode(tree: &BehaviorTree, task: &TaskSpec) -> Result<EpisodeResult, SimError> {
    let sim = Simulator::new(task.clone())?;
    sim.run_episode(tree)
}

struct LeafRunner<'a> {
    sim: &'a Simulator,
    resolved: Vec<Option<Resolved>>,
    leaf_ticks: u64,
}

impl LeafExecutor<WorldState> for LeafRunner<'_> {
    type Error = SimError;

    fn tick_leaf(&mut self, node: usize, behavior: &BehaviorId, world: &mut WorldState) -> Result<Status, SimError> {
        self.leaf_ticks += 1;
        let r = self.resolved[node].as_ref().expect("leaves are resolved before the episode");
        Ok(if behavior.is_condition() {
            if condition_holds(world, r) {
                Status::Success
            } else {
                Status::Failure
            }
        } else {
            let task = &self.sim.task;
            step_action(world, &task.rules, task.limits.max_action_ticks, behavior, r)
        })
    }
}

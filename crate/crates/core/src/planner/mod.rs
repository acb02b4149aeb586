//! Backchaining over pre- and postconditions.
//!
//! Planning starts from a Sequence of the goal conditions and runs the tree
//! symbolically. The first condition responsible for a Failure is replaced
//! by `Fallback(condition, Sequence(preconditions..., action))` using the
//! first declared model that lists the condition among its postconditions.
//! This repeats until the symbolic run succeeds.
//!
//! The planner only knows the symbolic models. It has no notion of
//! collisions or balance, so its trees can fail in the block world.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::bt::{validate, BehaviorId, BehaviorTree, NodeKind, Status, TreeNode};
use crate::sim::{Simulator, TaskSpec};

/// A symbolic fact: a condition behavior.
pub type SymbolicFact = BehaviorId;

/// Set of true facts; anything absent is false.
pub type SymbolicState = BTreeSet<SymbolicFact>;

pub const DEFAULT_MAX_ITERATIONS: usize = 50;

/// Symbolic effect of an action.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionModel {
    pub behavior: BehaviorId,
    #[serde(default)]
    pub pre: Vec<SymbolicFact>,
    pub post: Vec<SymbolicFact>,
    #[serde(default)]
    pub delete: Vec<SymbolicFact>,
}

impl ActionModel {
    fn applicable(&self, state: &SymbolicState) -> bool {
        self.pre.iter().all(|f| state.contains(f))
    }

    fn apply(&self, state: &mut SymbolicState) {
        for f in &self.delete {
            state.remove(f);
        }
        state.extend(self.post.iter().cloned());
    }
}

/// Goals and action models of a task.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Planning {
    pub goals: Vec<SymbolicFact>,
    pub models: Vec<ActionModel>,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
}

fn default_max_iterations() -> usize {
    DEFAULT_MAX_ITERATIONS
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PlanError {
    #[error("no action model achieves {0:?}")]
    UnachievableGoal(String),
    #[error("plan not found within {0} expansions")]
    PlanDepthExceeded(usize),
    #[error("an action failed without a failing condition to expand")]
    Stuck,
    #[error("{0}")]
    Invalid(String),
}

impl Planning {
    pub fn validate(&self, task: &TaskSpec) -> Result<(), PlanError> {
        let invalid = |msg: String| Err(PlanError::Invalid(msg));
        if self.goals.is_empty() {
            return invalid("no goal conditions".into());
        }
        let check_fact = |f: &BehaviorId| -> Result<(), PlanError> {
            if !f.is_condition() {
                return invalid(alloc::format!("{f:?} is not a condition"));
            }
            task.check_behavior(f).map_err(|e| PlanError::Invalid(alloc::format!("{e}")))
        };
        for g in &self.goals {
            check_fact(g)?;
        }
        for m in &self.models {
            if !m.behavior.is_action() {
                return invalid(alloc::format!("model behavior {:?} is not an action", m.behavior.to_string()));
            }
            if !task.behavior_pool.contains(&m.behavior) {
                return invalid(alloc::format!("model behavior {:?} is not in the pool", m.behavior.to_string()));
            }
            if m.post.is_empty() {
                return invalid(alloc::format!("model {:?} has no postconditions", m.behavior.to_string()));
            }
            for f in m.pre.iter().chain(&m.post).chain(&m.delete) {
                check_fact(f)?;
            }
        }
        if self.max_iterations == 0 {
            return invalid("max_iterations must be positive".into());
        }
        Ok(())
    }

    /// Every fact mentioned by the goals or the models.
    pub fn facts(&self) -> SymbolicState {
        let mut out: SymbolicState = self.goals.iter().cloned().collect();
        for m in &self.models {
            out.extend(m.pre.iter().chain(&m.post).chain(&m.delete).cloned());
        }
        out
    }
}

/// The facts of `planning` that hold in the simulator's initial world.
pub fn initial_state(sim: &Simulator, planning: &Planning) -> SymbolicState {
    planning.facts().into_iter().filter(|f| sim.eval_condition(f, sim.initial_world()) == Ok(Status::Success)).collect()
}

/// Plans the task's configured goals from its initial world.
pub fn plan_task(sim: &Simulator) -> Result<BehaviorTree, PlanError> {
    let planning =
        sim.task().planning.as_ref().ok_or_else(|| PlanError::Invalid("task has no planning section".into()))?;
    plan(&planning.goals, &planning.models, &initial_state(sim, planning), planning.max_iterations)
}

/// Expands a tree from `goals` until it succeeds symbolically from `initial`.
pub fn plan(
    goals: &[SymbolicFact],
    models: &[ActionModel],
    initial: &SymbolicState,
    max_iterations: usize,
) -> Result<BehaviorTree, PlanError> {
    if goals.is_empty() {
        return Err(PlanError::Invalid("no goal conditions".into()));
    }
    let mut tree = BehaviorTree::new(&TreeNode::sequence(goals.iter().cloned().map(TreeNode::leaf).collect()));
    for _ in 0..=max_iterations {
        let mut state = initial.clone();
        match symbolic_tick(&tree, &mut state, models) {
            (Status::Success, _) => {
                let violations = validate(&tree);
                if let Some(v) = violations.first() {
                    return Err(PlanError::Invalid(alloc::format!("planned tree is invalid: {v}")));
                }
                return Ok(tree);
            }
            (_, Some(failing)) => tree = expand(&tree, failing, models)?,
            (_, None) => return Err(PlanError::Stuck),
        }
    }
    Err(PlanError::PlanDepthExceeded(max_iterations))
}

/// Runs the tree once over `state`. Conditions test membership; an action
/// succeeds, applying its effects, when the first model for it whose
/// preconditions hold exists, and fails otherwise.
///
/// On Failure, also returns the condition to expand: the failing child's
/// for a Sequence, the last child's for a Fallback (the one that was
/// supposed to achieve the earlier conditions).
pub fn symbolic_tick(
    tree: &BehaviorTree,
    state: &mut SymbolicState,
    models: &[ActionModel],
) -> (Status, Option<usize>) {
    tick_node(tree, BehaviorTree::ROOT, state, models)
}

fn tick_node(
    tree: &BehaviorTree,
    i: usize,
    state: &mut SymbolicState,
    models: &[ActionModel],
) -> (Status, Option<usize>) {
    match tree.kind(i) {
        NodeKind::Leaf(b) if b.is_condition() => {
            if state.contains(b) {
                (Status::Success, None)
            } else {
                (Status::Failure, Some(i))
            }
        }
        NodeKind::Leaf(b) => match models.iter().find(|m| m.behavior == *b && m.applicable(state)) {
            Some(m) => {
                m.apply(state);
                (Status::Success, None)
            }
            None => (Status::Failure, None),
        },
        NodeKind::Control(crate::bt::ControlKind::Sequence) => {
            for &c in tree.children(i) {
                let r = tick_node(tree, c, state, models);
                if r.0 != Status::Success {
                    return r;
                }
            }
            (Status::Success, None)
        }
        NodeKind::Control(crate::bt::ControlKind::Fallback) => {
            let mut cause = None;
            for &c in tree.children(i) {
                let r = tick_node(tree, c, state, models);
                if r.0 != Status::Failure {
                    return r;
                }
                cause = r.1.or(cause);
            }
            (Status::Failure, cause)
        }
    }
}

/// Replaces the condition at `failing` with its backchained subtree.
pub fn expand(tree: &BehaviorTree, failing: usize, models: &[ActionModel]) -> Result<BehaviorTree, PlanError> {
    let NodeKind::Leaf(fact) = tree.kind(failing) else {
        return Err(PlanError::Invalid(alloc::format!("node {failing} is not a condition")));
    };
    if !fact.is_condition() {
        return Err(PlanError::Invalid(alloc::format!("node {failing} is not a condition")));
    }
    let model =
        models.iter().find(|m| m.post.contains(fact)).ok_or_else(|| PlanError::UnachievableGoal(fact.to_string()))?;
    let action = TreeNode::leaf(model.behavior.clone());
    let achieve = if model.pre.is_empty() {
        action
    } else {
        let mut seq: Vec<TreeNode> = model.pre.iter().cloned().map(TreeNode::leaf).collect();
        seq.push(action);
        TreeNode::sequence(seq)
    };
    Ok(tree.with_replaced(failing, &TreeNode::fallback(alloc::vec![TreeNode::leaf(fact.clone()), achieve])))
}

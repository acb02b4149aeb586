use alloc::vec::Vec;

use super::episode::{EndReason, EpisodeResult};
use super::task::TaskSpec;
use super::world::WorldState;
use crate::bt::BehaviorTree;

/// Fitness of an episode (higher is better, at most 0):
///
/// ```text
/// F = -Σ_goals max(0, |o - g| - δ) - λL - τT - φF - ηH
/// ```
///
/// `L` is the node count, `T` and `F` flag a timeout or a root Failure,
/// `H` flags a brick still held at the end.
pub fn compute_fitness(result: &EpisodeResult, tree: &BehaviorTree, task: &TaskSpec) -> f64 {
    let p = &task.fitness;
    let distance: f64 = goal_distances(&result.final_world, task).iter().map(|d| (d - p.delta).max(0.0)).sum();
    let mut f = -distance - p.length_penalty * tree.node_count() as f64;
    match result.end_reason {
        EndReason::TickTimeout => f -= p.timeout_penalty,
        EndReason::RootFailure => f -= p.failure_penalty,
        EndReason::SolvedDoubleSuccess | EndReason::BudgetAbort => {}
    }
    if result.held_at_end && p.hold_penalty > 0.0 {
        f -= p.hold_penalty;
    }
    f
}

/// Distance of each goal brick from its target, in goal order.
pub fn goal_distances(world: &WorldState, task: &TaskSpec) -> Vec<f64> {
    task.goals
        .iter()
        .map(|goal| world.brick(&goal.brick).expect("goal bricks exist in validated tasks").pose.distance(&goal.target))
        .collect()
}

/// Whether every goal brick is within δ of its target.
pub fn goals_met(world: &WorldState, task: &TaskSpec) -> bool {
    goal_distances(world, task).iter().all(|&d| d <= task.fitness.delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bt::{BehaviorTree, TreeNode};
    use crate::sim::task_fixtures::small_task;
    use crate::sim::{Point3, WorldState};
    use alloc::vec::Vec;

    fn tree_of(n: usize) -> BehaviorTree {
        let leaves: Vec<_> = (0..n - 1).map(|_| TreeNode::leaf("pick a!".parse().unwrap())).collect();
        BehaviorTree::new(&TreeNode::sequence(leaves))
    }

    fn result(task: &TaskSpec, a: Point3, end_reason: EndReason, held: bool) -> EpisodeResult {
        let mut w = WorldState::from_task(task);
        w.bricks[0].pose = a;
        EpisodeResult { final_world: w, ticks_used: 1, end_reason, held_at_end: held, leaf_ticks: 1 }
    }

    #[test]
    fn five_mm_off_ten_nodes() {
        let task = small_task();
        let r = result(&task, Point3::new(3.0, 4.0, 0.0), EndReason::SolvedDoubleSuccess, false);
        assert!((compute_fitness(&r, &tree_of(10), &task) - -5.6).abs() < 1e-12);
    }

    #[test]
    fn within_delta_is_length_only() {
        let task = small_task();
        let r = result(&task, Point3::new(0.3, 0.0, 0.0), EndReason::SolvedDoubleSuccess, false);
        assert_eq!(compute_fitness(&r, &tree_of(7), &task), -0.1 * 7.0);
    }

    #[test]
    fn penalties() {
        let mut task = small_task();
        let at_goal = Point3::new(0.0, 0.0, 0.0);
        let t = tree_of(2);
        let f = |task: &TaskSpec, reason, held| compute_fitness(&result(task, at_goal, reason, held), &t, task);
        assert!((f(&task, EndReason::TickTimeout, false) - -10.2).abs() < 1e-12);
        assert!((f(&task, EndReason::RootFailure, false) - -50.2).abs() < 1e-12);
        assert!((f(&task, EndReason::BudgetAbort, true) - -0.2).abs() < 1e-12);
        task.fitness.hold_penalty = 100.0;
        assert!((f(&task, EndReason::SolvedDoubleSuccess, true) - -100.2).abs() < 1e-12);
    }
}

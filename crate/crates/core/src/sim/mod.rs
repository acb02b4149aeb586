//! Deterministic rule-based block world.
//!
//! Bricks are axis-aligned boxes with poses in millimetres. Leaf behaviors
//! move them through a single gripper; [`Simulator::run_episode`] ticks a
//! tree until it succeeds twice in a row, fails, or runs out of ticks, and
//! [`compute_fitness`] scores the result.

mod behaviors;
mod episode;
mod fitness;
mod geometry;
mod placement;
mod task;
mod world;

pub use behaviors::{
    SimError, APPLY_FORCE_TICKS, AT_POS_TOLERANCE, LIFT, LOWER_CLEARANCE, ON_ALIGN_TOLERANCE, ON_MAX_GAP, PICK_TICKS,
    PLACE_TICKS, PUT_TICKS,
};
pub use episode::{run_episode, EndReason, EpisodeResult, Simulator};
pub use fitness::{compute_fitness, goal_distances, goals_met};
pub use geometry::{Point3, Size};
pub use placement::{place_outcome, PlaceOutcome, PRESS_FIT_RESIDUAL};
pub use task::{BrickSpec, FitnessParams, Goal, Limits, Rules, TaskError, TaskSpec};
pub use world::{ActiveAction, Brick, Gripper, Placement, WorldState, GRIPPER_HOME};

#[cfg(test)]
pub(crate) use task::tests as task_fixtures;

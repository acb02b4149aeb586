//! Leaf behaviors over a [`WorldState`].
//!
//! Actions run as phase machines, one phase step per tick. Durations:
//!
//! | action          | phases                                  | ticks |
//! |-----------------|-----------------------------------------|-------|
//! | pick            | approach 4, grasp 2, lift 4             | 10    |
//! | place on / at   | transit 6, lower 3, release 1           | 10    |
//! | put on / at     | pick phases then place phases           | 20    |
//! | apply force     | approach 4, press 2                     | 6     |
//!
//! An action reports Running on each of its phase ticks and Success on the
//! tick after the last one. Lowering stops [`LOWER_CLEARANCE`] above the
//! release point; the brick only reaches it when released.

use super::geometry::Point3;
use super::placement::{place_outcome, PlaceOutcome};
use super::task::{Rules, TaskSpec};
use super::world::{ActiveAction, Placement, WorldState};
use crate::bt::{BehaviorId, Status};

/// Height the gripper lifts a brick after grasping, mm.
pub const LIFT: f64 = 50.0;
/// Height above the release point where lowering stops, mm.
pub const LOWER_CLEARANCE: f64 = 2.0;

pub const PICK_TICKS: u32 = 10;
pub const PLACE_TICKS: u32 = 10;
pub const PUT_TICKS: u32 = PICK_TICKS + PLACE_TICKS;
pub const APPLY_FORCE_TICKS: u32 = 6;

/// Distance within which `a at pos p?` holds, mm.
pub const AT_POS_TOLERANCE: f64 = 1.0;
/// Horizontal alignment for `a on b?`, mm.
pub const ON_ALIGN_TOLERANCE: f64 = 1.0;
/// Largest gap between `a`'s base and `b`'s top for `a on b?`, mm.
pub const ON_MAX_GAP: f64 = 10.0;

/// A behavior with its bricks and positions looked up.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Resolved {
    Picked(usize),
    AtPos(usize, Point3),
    On(usize, usize),
    GripperEmpty,
    Pick(usize),
    PlaceOn(usize),
    PlaceAt(Point3),
    PutOn(usize, usize),
    PutAt(usize, Point3),
    ApplyForce(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("invalid task: {0}")]
    InvalidTask(#[from] super::task::TaskError),
    #[error("behavior {0:?} references an unknown brick or position")]
    Unresolved(alloc::string::String),
    #[error("behavior {0:?} is not in the task's behavior pool")]
    NotInPool(alloc::string::String),
    #[error("behavior {0:?} is not a condition")]
    NotACondition(alloc::string::String),
    #[error("behavior {0:?} is not an action")]
    NotAnAction(alloc::string::String),
    #[error("condition at node {0} returned Running")]
    ConditionRunning(usize),
}

pub(crate) fn resolve(task: &TaskSpec, b: &BehaviorId) -> Result<Resolved, SimError> {
    let unresolved = || SimError::Unresolved(alloc::format!("{b}"));
    let brick = |id: &str| task.brick_index(id).ok_or_else(unresolved);
    let pos = |id: &str| task.positions.get(id).copied().ok_or_else(unresolved);
    Ok(match b {
        BehaviorId::Picked { brick: a } => Resolved::Picked(brick(a)?),
        BehaviorId::AtPos { brick: a, position } => Resolved::AtPos(brick(a)?, pos(position)?),
        BehaviorId::On { upper, lower } => Resolved::On(brick(upper)?, brick(lower)?),
        BehaviorId::GripperEmpty => Resolved::GripperEmpty,
        BehaviorId::Pick { brick: a } => Resolved::Pick(brick(a)?),
        BehaviorId::PlaceOn { support } => Resolved::PlaceOn(brick(support)?),
        BehaviorId::PlaceAt { position } => Resolved::PlaceAt(pos(position)?),
        BehaviorId::PutOn { brick: a, support } => Resolved::PutOn(brick(a)?, brick(support)?),
        BehaviorId::PutAt { brick: a, position } => Resolved::PutAt(brick(a)?, pos(position)?),
        BehaviorId::ApplyForce { brick: a } => Resolved::ApplyForce(brick(a)?),
    })
}

/// Condition semantics. Non-conditions evaluate to Failure.
pub(crate) fn condition_holds(world: &WorldState, c: &Resolved) -> bool {
    match *c {
        Resolved::Picked(a) => world.is_held(a),
        Resolved::AtPos(a, p) => world.bricks[a].pose.distance(&p) < AT_POS_TOLERANCE,
        Resolved::On(a, b) => {
            if world.is_held(a) || world.is_held(b) {
                return false;
            }
            let (u, l) = (&world.bricks[a], &world.bricks[b]);
            let gap = u.pose.z - l.top();
            (u.pose.x - l.pose.x).abs() < ON_ALIGN_TOLERANCE
                && (u.pose.y - l.pose.y).abs() < ON_ALIGN_TOLERANCE
                && (-super::geometry::EPS..=ON_MAX_GAP).contains(&gap)
        }
        Resolved::GripperEmpty => world.gripper.held.is_none(),
        _ => false,
    }
}

enum Release {
    On(usize),
    At(Point3),
}

/// Advances the action `behavior` by one tick.
pub(crate) fn step_action(
    world: &mut WorldState,
    rules: &Rules,
    max_ticks: u32,
    behavior: &BehaviorId,
    action: &Resolved,
) -> Status {
    let t = match &mut world.active_action {
        Some(active) if active.behavior == *behavior => {
            active.touched = true;
            if active.finished {
                world.active_action = None;
                return Status::Success;
            }
            active.elapsed += 1;
            active.elapsed
        }
        _ => {
            // An action decided at start never runs, so it leaves any
            // running action in place.
            if let Some(status) = start_check(world, action) {
                return status;
            }
            world.active_action =
                Some(ActiveAction { behavior: behavior.clone(), elapsed: 1, finished: false, touched: true });
            1
        }
    };
    if t > max_ticks {
        world.active_action = None;
        return Status::Failure;
    }
    let done = match *action {
        Resolved::Pick(a) => pick_phase(world, a, t),
        Resolved::PlaceOn(s) => match place_phase(world, rules, Release::On(s), t) {
            Some(ok) => ok,
            None => return fail(world),
        },
        Resolved::PlaceAt(p) => match place_phase(world, rules, Release::At(p), t) {
            Some(ok) => ok,
            None => return fail(world),
        },
        Resolved::PutOn(a, s) => match put_phase(world, rules, a, Release::On(s), t) {
            Some(ok) => ok,
            None => return fail(world),
        },
        Resolved::PutAt(a, p) => match put_phase(world, rules, a, Release::At(p), t) {
            Some(ok) => ok,
            None => return fail(world),
        },
        Resolved::ApplyForce(a) => {
            if t == 4 {
                let b = &world.bricks[a];
                world.move_gripper(b.pose.with_z(b.top()));
            } else if t == APPLY_FORCE_TICKS {
                world.press(a);
            }
            t == APPLY_FORCE_TICKS
        }
        _ => unreachable!("conditions are not stepped"),
    };
    if done {
        if let Some(active) = &mut world.active_action {
            active.finished = true;
        }
    }
    Status::Running
}

fn fail(world: &mut WorldState) -> Status {
    world.active_action = None;
    Status::Failure
}

/// Checks made on the first tick. `Some` ends the action immediately.
fn start_check(world: &WorldState, action: &Resolved) -> Option<Status> {
    let held = world.gripper.held;
    match *action {
        Resolved::Pick(a) => (held.is_some() || world.is_covered(a)).then_some(Status::Failure),
        Resolved::PlaceOn(s) => (held.is_none() || held == Some(s)).then_some(Status::Failure),
        Resolved::PlaceAt(_) => held.is_none().then_some(Status::Failure),
        Resolved::PutOn(a, s) => {
            if condition_holds(world, &Resolved::On(a, s)) {
                Some(Status::Success)
            } else {
                put_blocked(world, a).then_some(Status::Failure)
            }
        }
        Resolved::PutAt(a, p) => {
            if condition_holds(world, &Resolved::AtPos(a, p)) {
                Some(Status::Success)
            } else {
                put_blocked(world, a).then_some(Status::Failure)
            }
        }
        Resolved::ApplyForce(_) => held.is_some().then_some(Status::Failure),
        _ => None,
    }
}

fn put_blocked(world: &WorldState, a: usize) -> bool {
    match world.gripper.held {
        Some(h) => h != a,
        None => world.is_covered(a),
    }
}

/// Returns whether the last pick phase just finished.
fn pick_phase(world: &mut WorldState, a: usize, t: u32) -> bool {
    match t {
        4 => {
            if !world.is_held(a) {
                world.move_gripper(world.bricks[a].pose);
            }
        }
        6 => world.grasp(a),
        PICK_TICKS => {
            let p = world.gripper.position;
            world.move_gripper(p.with_z(p.z + LIFT));
        }
        _ => {}
    }
    t == PICK_TICKS
}

/// `None` means the placement failed. Otherwise whether the last place
/// phase just finished.
fn place_phase(world: &mut WorldState, rules: &Rules, target: Release, t: u32) -> Option<bool> {
    let held = world.gripper.held?;
    let release = match target {
        Release::On(s) => {
            if s == held {
                return None;
            }
            let b = &world.bricks[s];
            b.pose.with_z(b.top())
        }
        Release::At(p) => p,
    };
    match t {
        6 => world.move_gripper(release.with_z(release.z + LIFT)),
        9 => world.move_gripper(release.with_z(release.z + LOWER_CLEARANCE)),
        PLACE_TICKS => match place_outcome(world, rules, held, release) {
            PlaceOutcome::CollisionBlocked => {
                world.move_gripper(release.with_z(release.z + LIFT));
                return None;
            }
            PlaceOutcome::Placed { pose, residual } => release_at(world, held, pose, residual, false),
            PlaceOutcome::Toppled { pose } => release_at(world, held, pose, 0.0, true),
        },
        _ => {}
    }
    Some(t == PLACE_TICKS)
}

fn release_at(world: &mut WorldState, brick: usize, pose: Point3, residual: f64, toppled: bool) {
    world.gripper.held = None;
    let b = &mut world.bricks[brick];
    b.seat_gap = residual;
    b.pose = pose;
    b.fitted = false;
    let tick = world.tick_count;
    world.placements.push(Placement { tick, brick, pose, toppled });
    world.gripper.position = pose.with_z(pose.z + LIFT);
}

fn put_phase(world: &mut WorldState, rules: &Rules, a: usize, target: Release, t: u32) -> Option<bool> {
    if t <= PICK_TICKS {
        pick_phase(world, a, t);
        Some(false)
    } else {
        place_phase(world, rules, target, t - PICK_TICKS)
    }
}

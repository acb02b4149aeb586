use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::geometry::{footprints_overlap, Point3, Size, EPS};
use super::task::TaskSpec;
use crate::bt::BehaviorId;

/// Largest gap between a brick's base and the top of the brick below for
/// the upper one to count as resting on it. Covers the press-fit residual.
pub(crate) const SEAT_TOL: f64 = 1.0;

/// Where the gripper waits before the first action.
pub const GRIPPER_HOME: Point3 = Point3::new(0.0, -200.0, 150.0);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Brick {
    pub id: String,
    pub size: Size,
    /// Base center, mm.
    pub pose: Point3,
    pub com_offset_x: f64,
    pub no_stack: bool,
    /// Press fit applied to the joint beneath this brick.
    pub fitted: bool,
    /// Residual vertical offset above its support left by placement.
    pub seat_gap: f64,
}

impl Brick {
    pub fn top(&self) -> f64 {
        self.pose.z + self.size.height
    }

    pub fn on_table(&self) -> bool {
        self.pose.z.abs() < EPS
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gripper {
    /// Index into `WorldState::bricks`.
    pub held: Option<usize>,
    /// Grasp point; a held brick's base center.
    pub position: Point3,
}

/// The action currently in flight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActiveAction {
    pub behavior: BehaviorId,
    /// Ticks spent so far, including the current one.
    pub elapsed: u32,
    /// All phases are done; the next tick reports Success.
    pub finished: bool,
    /// Ticked during the current root tick.
    #[serde(skip)]
    pub(crate) touched: bool,
}

/// A completed release of a brick.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub tick: u32,
    pub brick: usize,
    pub pose: Point3,
    pub toppled: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub bricks: Vec<Brick>,
    pub gripper: Gripper,
    pub tick_count: u32,
    pub active_action: Option<ActiveAction>,
    pub placements: Vec<Placement>,
}

impl WorldState {
    pub fn from_task(task: &TaskSpec) -> Self {
        WorldState {
            bricks: task
                .bricks
                .iter()
                .map(|b| Brick {
                    id: b.id.clone(),
                    size: b.size,
                    pose: b.pose,
                    com_offset_x: b.com_offset_x,
                    no_stack: b.no_stack,
                    fitted: false,
                    seat_gap: 0.0,
                })
                .collect(),
            gripper: Gripper { held: None, position: GRIPPER_HOME },
            tick_count: 0,
            active_action: None,
            placements: Vec::new(),
        }
    }

    pub fn brick(&self, id: &str) -> Option<&Brick> {
        self.bricks.iter().find(|b| b.id == id)
    }

    pub fn is_held(&self, i: usize) -> bool {
        self.gripper.held == Some(i)
    }

    /// Whether `upper` rests on `lower`.
    pub fn rests_on(&self, upper: usize, lower: usize) -> bool {
        if upper == lower || self.is_held(upper) || self.is_held(lower) {
            return false;
        }
        let (u, l) = (&self.bricks[upper], &self.bricks[lower]);
        let gap = u.pose.z - l.top();
        (-EPS..=SEAT_TOL).contains(&gap) && footprints_overlap(&u.pose, &u.size, &l.pose, &l.size)
    }

    pub fn supporters(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.bricks.len()).filter(move |&s| self.rests_on(i, s))
    }

    /// Whether another brick rests on `i`.
    pub fn is_covered(&self, i: usize) -> bool {
        (0..self.bricks.len()).any(|c| self.rests_on(c, i))
    }

    /// Every brick resting on `i`, directly or through others.
    pub fn stack_above(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        let mut frontier = alloc::vec![i];
        while let Some(b) = frontier.pop() {
            for c in 0..self.bricks.len() {
                if c != i && !out.contains(&c) && self.rests_on(c, b) {
                    out.push(c);
                    frontier.push(c);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Moves the gripper, carrying the held brick.
    pub(crate) fn move_gripper(&mut self, to: Point3) {
        self.gripper.position = to;
        if let Some(h) = self.gripper.held {
            self.bricks[h].pose = to;
        }
    }

    pub(crate) fn grasp(&mut self, i: usize) {
        self.gripper.held = Some(i);
        let b = &mut self.bricks[i];
        b.seat_gap = 0.0;
        b.fitted = false;
        self.move_gripper(self.bricks[i].pose);
    }

    /// Removes seat gaps under `i` and along its support chain, lowering
    /// everything above each closed gap.
    pub(crate) fn press(&mut self, i: usize) {
        let mut chain = alloc::vec![i];
        let mut k = 0;
        while k < chain.len() {
            let b = chain[k];
            for s in self.supporters(b).collect::<Vec<_>>() {
                if !chain.contains(&s) {
                    chain.push(s);
                }
            }
            k += 1;
        }
        chain.sort_by(|&a, &b| self.bricks[a].pose.z.total_cmp(&self.bricks[b].pose.z).then(a.cmp(&b)));
        for b in chain {
            let gap = self.bricks[b].seat_gap;
            if gap > 0.0 {
                let above = self.stack_above(b);
                self.bricks[b].pose.z -= gap;
                self.bricks[b].seat_gap = 0.0;
                for a in above {
                    self.bricks[a].pose.z -= gap;
                }
            }
        }
        if self.supporters(i).next().is_some() {
            self.bricks[i].fitted = true;
        }
    }
}

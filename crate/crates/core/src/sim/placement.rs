use alloc::vec::Vec;

use super::geometry::{footprint_contains, footprints_overlap, Point3, EPS};
use super::task::Rules;
use super::world::WorldState;

/// Vertical offset left by stacking without pressing, when
/// `rules.press_fit_residual` is set.
pub const PRESS_FIT_RESIDUAL: f64 = 0.8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PlaceOutcome {
    /// The brick settles at `pose`, `residual` above its support.
    Placed { pose: Point3, residual: f64 },
    /// Something is in the way; the brick stays in the gripper.
    CollisionBlocked,
    /// The brick falls off its support and lands at `pose`.
    Toppled { pose: Point3 },
}

/// Resolves releasing the held brick with its base center at `release`.
///
/// The brick settles on the highest brick top under its footprint that is
/// not above the release height, or on the table if there is none.
pub fn place_outcome(world: &WorldState, rules: &Rules, held: usize, release: Point3) -> PlaceOutcome {
    let brick = &world.bricks[held];
    let others: Vec<usize> = (0..world.bricks.len())
        .filter(|&i| i != held && !world.is_held(i))
        .filter(|&i| footprints_overlap(&release, &brick.size, &world.bricks[i].pose, &world.bricks[i].size))
        .collect();

    let below = |i: &usize| world.bricks[*i].top() <= release.z + EPS;
    let release_z = others.iter().copied().filter(below).map(|i| world.bricks[i].top()).fold(0.0, f64::max);
    let supports: Vec<usize> = if release_z > EPS {
        others.iter().copied().filter(|&i| (world.bricks[i].top() - release_z).abs() <= EPS).collect()
    } else {
        Vec::new()
    };

    let upper = release_z + brick.size.height;
    for &i in &others {
        let o = &world.bricks[i];
        let intersects = o.pose.z < upper - EPS && o.top() > release_z + EPS;
        let in_corridor = rules.collision_corridor_check && o.top() > release_z + EPS;
        if intersects || in_corridor {
            return PlaceOutcome::CollisionBlocked;
        }
    }

    if rules.red_no_stack
        && !supports.is_empty()
        && (brick.no_stack || supports.iter().any(|&s| world.bricks[s].no_stack))
    {
        return PlaceOutcome::CollisionBlocked;
    }

    if rules.balance_check && !supports.is_empty() {
        let com_x = release.x + brick.com_offset_x;
        let balanced = supports.iter().any(|&s| {
            let s = &world.bricks[s];
            footprint_contains(&s.pose, &s.size, com_x, release.y)
        });
        if !balanced {
            let s = &world.bricks[supports[0]];
            let dir = if brick.com_offset_x < 0.0 { -1.0 } else { 1.0 };
            let x = s.pose.x + dir * (s.size.width + brick.size.width) / 2.0;
            let landing = Point3::new(x, release.y, 0.0);
            let z = (0..world.bricks.len())
                .filter(|&i| i != held && !world.is_held(i))
                .filter(|&i| footprints_overlap(&landing, &brick.size, &world.bricks[i].pose, &world.bricks[i].size))
                .map(|i| world.bricks[i].top())
                .fold(0.0, f64::max);
            return PlaceOutcome::Toppled { pose: landing.with_z(z) };
        }
    }

    let residual = if rules.press_fit_residual && !supports.is_empty() { PRESS_FIT_RESIDUAL } else { 0.0 };
    PlaceOutcome::Placed { pose: Point3::new(release.x, release.y, release_z + residual), residual }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::geometry::Size;
    use crate::sim::task::tests::{brick, small_task, BRICK_2X2, BRICK_2X4};
    use alloc::vec;

    fn world(bricks: Vec<(&str, Size, Point3)>) -> WorldState {
        let mut t = small_task();
        t.bricks = bricks.into_iter().map(|(id, s, p)| brick(id, s, p)).collect();
        let mut w = WorldState::from_task(&t);
        w.grasp(0);
        w
    }

    #[test]
    fn table_placement_is_unobstructed() {
        let w = world(vec![("a", BRICK_2X2, Point3::new(-80.0, 0.0, 0.0))]);
        let out = place_outcome(&w, &Rules::default(), 0, Point3::new(0.0, 0.0, 0.0));
        assert_eq!(out, PlaceOutcome::Placed { pose: Point3::new(0.0, 0.0, 0.0), residual: 0.0 });
    }

    #[test]
    fn stacking_leaves_residual_only_when_enabled() {
        let w =
            world(vec![("a", BRICK_2X2, Point3::new(-80.0, 0.0, 0.0)), ("b", BRICK_2X2, Point3::new(0.0, 0.0, 0.0))]);
        let release = Point3::new(0.0, 0.0, 19.2);
        assert_eq!(
            place_outcome(&w, &Rules::default(), 0, release),
            PlaceOutcome::Placed { pose: release, residual: 0.0 }
        );
        let rules = Rules { press_fit_residual: true, ..Rules::default() };
        let PlaceOutcome::Placed { pose, .. } = place_outcome(&w, &rules, 0, release) else { panic!() };
        assert!((pose.z - 20.0).abs() < 1e-12);
    }

    #[test]
    fn drops_to_support_and_no_intersection() {
        let w =
            world(vec![("a", BRICK_2X2, Point3::new(-80.0, 0.0, 0.0)), ("b", BRICK_2X2, Point3::new(0.0, 0.0, 0.0))]);
        // Mid-air release with nothing underneath lands on the table.
        let out = place_outcome(&w, &Rules::default(), 0, Point3::new(80.0, 0.0, 19.2));
        assert_eq!(out, PlaceOutcome::Placed { pose: Point3::new(80.0, 0.0, 0.0), residual: 0.0 });
        // Released high above b, it lands on b.
        let rules = Rules { press_fit_residual: true, ..Rules::default() };
        let out = place_outcome(&w, &rules, 0, Point3::new(0.0, 0.0, 60.0));
        assert_eq!(
            out,
            PlaceOutcome::Placed {
                pose: Point3::new(0.0, 0.0, 19.2 + PRESS_FIT_RESIDUAL),
                residual: PRESS_FIT_RESIDUAL
            }
        );
        // Release into an occupied table spot.
        assert_eq!(
            place_outcome(&w, &Rules::default(), 0, Point3::new(10.0, 0.0, 0.0)),
            PlaceOutcome::CollisionBlocked
        );
    }

    #[test]
    fn corridor_blocks_under_overhang() {
        // Long brick on a middle brick; side brick goes under the overhang.
        let w = world(vec![
            ("left", BRICK_2X2, Point3::new(-150.0, 0.0, 0.0)),
            ("mid", BRICK_2X2, Point3::new(0.0, 0.0, 0.0)),
            ("long", BRICK_2X4, Point3::new(0.0, 0.0, 19.2)),
        ]);
        let target = Point3::new(-32.0, 16.0, 0.0);
        assert!(matches!(place_outcome(&w, &Rules::default(), 0, target), PlaceOutcome::Placed { .. }));
        let rules = Rules { collision_corridor_check: true, ..Rules::default() };
        assert_eq!(place_outcome(&w, &rules, 0, target), PlaceOutcome::CollisionBlocked);
    }

    #[test]
    fn unbalanced_brick_topples_off_narrow_support() {
        let mut w = world(vec![
            ("green", BRICK_2X4, Point3::new(-150.0, 0.0, 0.0)),
            ("red", BRICK_2X2, Point3::new(0.0, 0.0, 0.0)),
        ]);
        w.bricks[0].com_offset_x = 20.0;
        let rules = Rules { balance_check: true, ..Rules::default() };
        let release = Point3::new(0.0, 0.0, 19.2);
        let out = place_outcome(&w, &rules, 0, release);
        assert_eq!(out, PlaceOutcome::Toppled { pose: Point3::new((31.8 + 63.8) / 2.0, 0.0, 0.0) });
        // A wide support carries it.
        w.bricks[1].size = BRICK_2X4;
        assert_eq!(place_outcome(&w, &rules, 0, release), PlaceOutcome::Placed { pose: release, residual: 0.0 });
    }

    #[test]
    fn no_stack_brick_blocks_both_ways() {
        let mut w = world(vec![
            ("green", BRICK_2X2, Point3::new(-150.0, 0.0, 0.0)),
            ("red", BRICK_2X2, Point3::new(0.0, 0.0, 0.0)),
        ]);
        w.bricks[1].no_stack = true;
        let rules = Rules { red_no_stack: true, ..Rules::default() };
        assert_eq!(place_outcome(&w, &rules, 0, Point3::new(0.0, 0.0, 19.2)), PlaceOutcome::CollisionBlocked);
        w.bricks[1].no_stack = false;
        w.bricks[0].no_stack = true;
        assert_eq!(place_outcome(&w, &rules, 0, Point3::new(0.0, 0.0, 19.2)), PlaceOutcome::CollisionBlocked);
        assert!(matches!(place_outcome(&w, &rules, 0, Point3::new(80.0, 0.0, 0.0)), PlaceOutcome::Placed { .. }));
    }
}

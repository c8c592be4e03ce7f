//! Drift cycles: relative motion between wall-pinned and free robots.
//!
//! One cycle is three commands. The first two form a shallow tent, moving
//! `b_step` along the wall while stepping off it and back by `wiggle`. The
//! third pulls back by `slip` parallel to the wall. A robot on the wall is
//! pinned during the pull-back and nets `b_step`; a free robot nets
//! `b_step - slip`.

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::kinematic::{MoveCommand, MoveSequence, Wall};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftMoveSpec {
    slip: f64,
    b_step: f64,
    wiggle: f64,
    wall: Wall,
    direction: f64,
}

impl DriftMoveSpec {
    /// `direction` picks the sense along the wall: positive is toward
    /// increasing x on the floor and ceiling, increasing y on the sides.
    pub fn new(slip: f64, b_step: f64, wiggle: f64, wall: Wall, direction: f64) -> Result<Self> {
        if !(slip > 0.0 && slip <= b_step && b_step.is_finite()) {
            return Err(Error::Domain(format!(
                "drift needs 0 < slip <= step, got slip {slip}, step {b_step}"
            )));
        }
        if !(wiggle > 0.0 && wiggle.is_finite()) {
            return Err(Error::Domain(format!("wiggle {wiggle} must be > 0")));
        }
        if direction == 0.0 || !direction.is_finite() {
            return Err(Error::Domain("drift direction must be nonzero".into()));
        }
        Ok(DriftMoveSpec {
            slip,
            b_step,
            wiggle,
            wall,
            direction: direction.signum(),
        })
    }

    pub fn slip(&self) -> f64 {
        self.slip
    }

    pub fn b_step(&self) -> f64 {
        self.b_step
    }

    pub fn wiggle(&self) -> f64 {
        self.wiggle
    }

    pub fn wall(&self) -> Wall {
        self.wall
    }

    /// Unit vector of the drift along the wall.
    pub fn tangent(&self) -> Point {
        let t = match self.wall {
            Wall::Bottom | Wall::Top => Point::new(1.0, 0.0),
            Wall::Left | Wall::Right => Point::new(0.0, 1.0),
        };
        t * self.direction
    }
}

fn command(v: Point) -> MoveCommand {
    MoveCommand::new(v.x, v.y).expect("drift commands are finite")
}

/// One drift cycle.
pub fn drift_move(spec: &DriftMoveSpec) -> MoveSequence {
    let t = spec.tangent();
    let n = spec.wall.inward_normal();
    MoveSequence::from_commands(vec![
        command(t * (spec.b_step / 2.0) + n * spec.wiggle),
        command(t * (spec.b_step / 2.0) - n * spec.wiggle),
        command(t * -spec.slip),
    ])
}

/// `cycles` repetitions of [`drift_move`].
pub fn drift_cycles(spec: &DriftMoveSpec, cycles: usize) -> MoveSequence {
    let one = drift_move(spec);
    let mut seq = MoveSequence::new();
    for _ in 0..cycles {
        seq.extend(&one);
    }
    seq
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematic::{replay, RobotState, Workspace};

    fn run(spec: &DriftMoveSpec, cycles: usize, start: Vec<Point>) -> Vec<Point> {
        let ws = Workspace::square(10.0).unwrap();
        let s = RobotState::new(&ws, start).unwrap();
        replay(&ws, &s, &drift_cycles(spec, cycles))
            .unwrap()
            .positions()
            .to_vec()
    }

    #[test]
    fn pinned_and_free_robots_separate() {
        let spec = DriftMoveSpec::new(0.3, 1.0, 0.1, Wall::Top, 1.0).unwrap();
        assert_eq!(drift_move(&spec).len(), 3);
        let end = run(&spec, 1, vec![Point::new(2.0, 10.0), Point::new(2.0, 5.0)]);
        assert!((end[0] - Point::new(3.0, 10.0)).norm() < 1e-12);
        assert!((end[1] - Point::new(2.7, 5.0)).norm() < 1e-12);
    }

    #[test]
    fn full_slip_cancels_free_motion() {
        let spec = DriftMoveSpec::new(1.0, 1.0, 0.1, Wall::Left, -1.0).unwrap();
        let end = run(&spec, 3, vec![Point::new(0.0, 8.0), Point::new(5.0, 5.0)]);
        assert!((end[0] - Point::new(0.0, 5.0)).norm() < 1e-12);
        assert!((end[1] - Point::new(5.0, 5.0)).norm() < 1e-12);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(DriftMoveSpec::new(0.0, 1.0, 0.1, Wall::Top, 1.0).is_err());
        assert!(DriftMoveSpec::new(2.0, 1.0, 0.1, Wall::Top, 1.0).is_err());
        assert!(DriftMoveSpec::new(0.5, 1.0, 0.0, Wall::Top, 1.0).is_err());
        assert!(DriftMoveSpec::new(0.5, 1.0, 0.1, Wall::Top, 0.0).is_err());
    }
}

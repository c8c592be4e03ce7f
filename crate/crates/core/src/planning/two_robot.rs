//! Exact positioning of two point robots in a square workspace.
//!
//! Both robots receive every command. To change their relative position,
//! one robot is pressed against a wall, where friction holds it, while the
//! other slides freely. Each spacing round:
//!
//! 1. shifts both robots along the active axis to give the free robot room,
//! 2. presses the robot nearer the pinning wall onto it,
//! 3. slides along the wall, moving only the free robot,
//! 4. hops off the wall by the clearance `eps`.
//!
//! The x spacing is fixed against the bottom wall and the y spacing against
//! the left wall; a final translation then carries both robots to their goals.
//! A round can be cut short by a side wall, in which case another round runs.

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::kinematic::{apply_move, replay, MoveCommand, MoveSequence, RobotState, Workspace};

/// Smallest wall clearance and robot separation a task may have.
pub const MIN_SEPARATION: f64 = 1e-6;

/// Goal tolerance checked on the replayed plan.
pub const GOAL_TOL: f64 = 1e-9;

const SPACING_TOL: f64 = 1e-12;
const MAX_ROUNDS: usize = 16;

/// Start and goal positions of two robots in a square of side `side`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoRobotTask {
    pub s1: Point,
    pub s2: Point,
    pub e1: Point,
    pub e2: Point,
    pub side: f64,
}

impl TwoRobotTask {
    pub fn new(s1: Point, s2: Point, e1: Point, e2: Point, side: f64) -> Result<Self> {
        if !(side > 0.0 && side.is_finite()) {
            return Err(Error::Task(format!("wall length {side} must be positive")));
        }
        let task = TwoRobotTask {
            s1,
            s2,
            e1,
            e2,
            side,
        };
        for (name, p) in [("s1", s1), ("s2", s2), ("e1", e1), ("e2", e2)] {
            if !p.is_finite() || clearance(p, side) < MIN_SEPARATION {
                return Err(Error::Task(format!(
                    "{name} = ({}, {}) is not strictly inside the workspace",
                    p.x, p.y
                )));
            }
        }
        for (name, a, b) in [("starts", s1, s2), ("goals", e1, e2)] {
            let d = a - b;
            if d.x.abs().max(d.y.abs()) < MIN_SEPARATION {
                return Err(Error::Task(format!("{name} coincide")));
            }
        }
        Ok(task)
    }

    /// Clearance used for pre-shifts and hops off the wall.
    fn eps(&self) -> f64 {
        let c = [self.s1, self.s2, self.e1, self.e2]
            .iter()
            .map(|p| clearance(*p, self.side))
            .fold(f64::INFINITY, f64::min);
        (0.01 * self.side).min(0.5 * c)
    }

    fn workspace(&self) -> Workspace {
        Workspace::square(self.side).expect("side validated")
    }
}

fn clearance(p: Point, side: f64) -> f64 {
    p.x.min(side - p.x).min(p.y).min(side - p.y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Axis {
    X,
    Y,
}

impl Axis {
    fn along(self, p: Point) -> f64 {
        match self {
            Axis::X => p.x,
            Axis::Y => p.y,
        }
    }

    fn across(self, p: Point) -> f64 {
        match self {
            Axis::X => p.y,
            Axis::Y => p.x,
        }
    }

    fn vector(self, along: f64, across: f64) -> (f64, f64) {
        match self {
            Axis::X => (along, across),
            Axis::Y => (across, along),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
        }
    }
}

/// A finished two-robot plan and the rounds each spacing phase used.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoRobotPlan {
    pub sequence: MoveSequence,
    pub final_state: RobotState,
    pub x_rounds: Vec<usize>,
    pub y_rounds: Vec<usize>,
}

struct Planner {
    ws: Workspace,
    side: f64,
    eps: f64,
    state: RobotState,
    seq: MoveSequence,
    x_rounds: Vec<usize>,
    y_rounds: Vec<usize>,
}

impl Planner {
    fn new(task: &TwoRobotTask) -> Result<Self> {
        let ws = task.workspace();
        let state = RobotState::new(&ws, vec![task.s1, task.s2])?;
        Ok(Planner {
            ws,
            side: task.side,
            eps: task.eps(),
            state,
            seq: MoveSequence::new(),
            x_rounds: Vec::new(),
            y_rounds: Vec::new(),
        })
    }

    fn pos(&self) -> [Point; 2] {
        [self.state.positions()[0], self.state.positions()[1]]
    }

    fn spacing(&self, axis: Axis) -> f64 {
        let [a, b] = self.pos();
        axis.along(a) - axis.along(b)
    }

    fn push(&mut self, (dx, dy): (f64, f64)) -> Result<()> {
        if dx == 0.0 && dy == 0.0 {
            return Ok(());
        }
        let m = MoveCommand::new(dx, dy)?;
        self.state = apply_move(&self.ws, &self.state, m)?;
        self.seq.push(m);
        Ok(())
    }

    /// Drives `r1 - r2` along `axis` to `target`, keeping the other
    /// component of the spacing unchanged.
    fn fix_spacing(&mut self, axis: Axis, target: f64) -> Result<()> {
        let other = match axis {
            Axis::X => Axis::Y,
            Axis::Y => Axis::X,
        };
        if self.spacing(other).abs() < MIN_SEPARATION {
            return Err(Error::Task(format!(
                "robots are level in {}; cannot pin one without the other",
                other.name()
            )));
        }
        let (lo, hi) = (0.0, self.side);
        let eps = self.eps;
        let mut rounds = 0;
        loop {
            let need = target - self.spacing(axis);
            if need.abs() <= SPACING_TOL {
                break;
            }
            if rounds == MAX_ROUNDS {
                return Err(Error::Task(format!(
                    "{}-spacing did not converge in {MAX_ROUNDS} rounds",
                    axis.name()
                )));
            }
            rounds += 1;
            self.seq
                .annotate(format!("{}-spacing round {rounds}", axis.name()));

            let p = self.pos();
            let pinned = if axis.across(p[0]) < axis.across(p[1]) { 0 } else { 1 };
            let free = 1 - pinned;
            let d = if free == 0 { need } else { -need };

            let along = [axis.along(p[0]), axis.along(p[1])];
            let shift = if d > 0.0 {
                lo + eps - along[0].min(along[1])
            } else {
                hi - eps - along[0].max(along[1])
            };
            self.push(axis.vector(shift, 0.0))?;

            let across_min = axis.across(p[0]).min(axis.across(p[1]));
            self.push(axis.vector(0.0, lo - across_min))?;

            let q = axis.along(self.pos()[free]);
            let room = if d > 0.0 { hi - eps - q } else { q - lo - eps };
            if room <= 0.0 {
                return Err(Error::Task("free robot has no room to slide".into()));
            }
            self.push(axis.vector(d.signum() * d.abs().min(room), 0.0))?;
            self.push(axis.vector(0.0, eps))?;
        }
        match axis {
            Axis::X => self.x_rounds.push(rounds),
            Axis::Y => self.y_rounds.push(rounds),
        }
        Ok(())
    }

    /// Carries robot 1 to `e1` with two axis-aligned moves.
    fn translate(&mut self, e1: Point) -> Result<()> {
        self.seq.annotate("translate");
        let d = e1 - self.pos()[0];
        self.push((d.x, 0.0))?;
        self.push((0.0, d.y))
    }

    fn finish(self, task: &TwoRobotTask) -> Result<TwoRobotPlan> {
        let start = RobotState::new(&self.ws, vec![task.s1, task.s2])?;
        let end = replay(&self.ws, &start, &self.seq)?;
        for (i, goal) in [task.e1, task.e2].iter().enumerate() {
            let err = (end.positions()[i] - *goal).norm();
            if err > GOAL_TOL {
                return Err(Error::Task(format!(
                    "replay leaves robot {} {err:e} from its goal",
                    i + 1
                )));
            }
        }
        Ok(TwoRobotPlan {
            sequence: self.seq,
            final_state: end,
            x_rounds: self.x_rounds,
            y_rounds: self.y_rounds,
        })
    }
}

/// Sets `r1x - r2x` to `e1x - e2x` while preserving `r1y - r2y`.
pub fn x_spacing(task: &TwoRobotTask) -> Result<(MoveSequence, RobotState)> {
    let mut planner = Planner::new(task)?;
    planner.fix_spacing(Axis::X, task.e1.x - task.e2.x)?;
    Ok((planner.seq, planner.state))
}

/// Sets `r1y - r2y` to `e1y - e2y` while preserving `r1x - r2x`, then
/// translates both robots onto their goals. The starts must already have
/// the goal x spacing.
pub fn y_spacing(task: &TwoRobotTask) -> Result<(MoveSequence, RobotState)> {
    let dx = (task.s1.x - task.s2.x) - (task.e1.x - task.e2.x);
    if dx.abs() > GOAL_TOL {
        return Err(Error::Task(format!("x spacing is off by {dx:e}")));
    }
    let mut planner = Planner::new(task)?;
    planner.fix_spacing(Axis::Y, task.e1.y - task.e2.y)?;
    planner.translate(task.e1)?;
    let plan = planner.finish(task)?;
    Ok((plan.sequence, plan.final_state))
}

/// Full plan with round counts, verified by replay.
pub fn plan_two_robots(task: &TwoRobotTask) -> Result<TwoRobotPlan> {
    let mut planner = Planner::new(task)?;
    let (gx, gy) = (task.e1.x - task.e2.x, task.e1.y - task.e2.y);
    let spare = 0.25 * task.side;
    // x spacing is fixed by pinning on the floor, which needs the robots at
    // different heights, and symmetrically for y
    if planner.spacing(Axis::Y).abs() < MIN_SEPARATION {
        let y = if gy.abs() >= MIN_SEPARATION { gy } else { spare };
        planner.fix_spacing(Axis::Y, y)?;
    }
    if gx.abs() >= MIN_SEPARATION {
        planner.fix_spacing(Axis::X, gx)?;
        planner.fix_spacing(Axis::Y, gy)?;
    } else {
        if planner.spacing(Axis::X).abs() < MIN_SEPARATION {
            planner.fix_spacing(Axis::X, spare)?;
        }
        planner.fix_spacing(Axis::Y, gy)?;
        planner.fix_spacing(Axis::X, gx)?;
    }
    planner.translate(task.e1)?;
    planner.finish(task)
}

/// Commands that move robot `i` from `s_i` to `e_i`.
pub fn arrange_two_robots(task: &TwoRobotTask) -> Result<MoveSequence> {
    Ok(plan_two_robots(task)?.sequence)
}

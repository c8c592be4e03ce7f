//! Closed-loop variance and covariance control of a disc swarm.
//!
//! The controller squeezes the swarm against the left wall, centers it,
//! squeezes it against the floor, shears it along the floor with wall
//! friction until the covariance reaches its goal, and centers it again.

use std::fmt;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::geometry::{Moments, Point};
use crate::physics::{step, swarm_stats, ControlInput, DiscSwarm, SimParams, StatsSample};

/// Target second moments and the factor applied to the x-variance goal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceGoal {
    var_x: f64,
    var_y: f64,
    cov: f64,
    c1: f64,
}

impl CovarianceGoal {
    pub fn new(var_x: f64, var_y: f64, cov: f64, c1: f64) -> Result<Self> {
        if !(var_x > 0.0 && var_x.is_finite() && var_y > 0.0 && var_y.is_finite()) {
            return Err(Error::Goal(format!(
                "goal variances ({var_x}, {var_y}) must be finite and > 0"
            )));
        }
        if !cov.is_finite() || cov.abs() > (var_x * var_y).sqrt() {
            return Err(Error::Goal(format!(
                "goal covariance {cov} exceeds sqrt({var_x} * {var_y})"
            )));
        }
        if !(c1 > 0.0 && c1 < 1.0) {
            return Err(Error::Goal(format!("c1 {c1} must lie in (0, 1)")));
        }
        Ok(CovarianceGoal {
            var_x,
            var_y,
            cov,
            c1,
        })
    }

    pub fn var_x(&self) -> f64 {
        self.var_x
    }

    pub fn var_y(&self) -> f64 {
        self.var_y
    }

    pub fn cov(&self) -> f64 {
        self.cov
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    /// Half-width of the band around the covariance goal that counts as
    /// reached: 10% of the goal, at least 50.
    pub fn band(&self) -> f64 {
        (0.1 * self.cov.abs()).max(50.0)
    }

    pub fn in_band(&self, cov: f64) -> bool {
        (cov - self.cov).abs() <= self.band()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    CompressX,
    Center1,
    CompressY,
    Shear,
    Center2,
    Done,
}

impl Phase {
    pub fn next(self) -> Phase {
        match self {
            Phase::CompressX => Phase::Center1,
            Phase::Center1 => Phase::CompressY,
            Phase::CompressY => Phase::Shear,
            Phase::Shear => Phase::Center2,
            Phase::Center2 | Phase::Done => Phase::Done,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Phase::CompressX => "compress_x",
            Phase::Center1 => "center_1",
            Phase::CompressY => "compress_y",
            Phase::Shear => "shear",
            Phase::Center2 => "center_2",
            Phase::Done => "done",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Slide direction along the floor while shearing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shear {
    Right,
    Left,
}

impl Shear {
    fn for_goal(goal: &CovarianceGoal) -> Shear {
        if goal.cov >= 0.0 {
            Shear::Right
        } else {
            Shear::Left
        }
    }

    /// Force angle: 45 degrees into the floor.
    pub fn angle(self) -> f64 {
        match self {
            Shear::Right => -std::f64::consts::FRAC_PI_4,
            Shear::Left => -3.0 * std::f64::consts::FRAC_PI_4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerConfig {
    force: f64,
    center: Point,
    center_tol: f64,
    dt: f64,
}

impl ControllerConfig {
    /// `center_tol` is the distance from `center` at which the mean counts
    /// as centered; `dt` is the time one controller step covers.
    pub fn new(force: f64, center: Point, center_tol: f64, dt: f64) -> Result<Self> {
        if !(force > 0.0 && force.is_finite()) {
            return Err(Error::Param(format!("control force {force} must be > 0")));
        }
        if !center.is_finite() {
            return Err(Error::Param("workspace center is not finite".into()));
        }
        if !(center_tol > 0.0 && center_tol.is_finite()) {
            return Err(Error::Param(format!("centering tolerance {center_tol} must be > 0")));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Param(format!("controller step {dt} must be > 0")));
        }
        Ok(ControllerConfig {
            force,
            center,
            center_tol,
            dt,
        })
    }

    /// Config for `swarm` under `params`: centering to within one radius of
    /// the workspace center.
    pub fn for_swarm(swarm: &DiscSwarm, params: &SimParams, force: f64) -> Result<Self> {
        ControllerConfig::new(force, swarm.center(), swarm.radius(), params.dt())
    }

    pub fn force(&self) -> f64 {
        self.force
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn center_tol(&self) -> f64 {
        self.center_tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerState {
    phase: Phase,
    phase_time: f64,
    shear: Option<Shear>,
    goal: CovarianceGoal,
}

impl ControllerState {
    pub fn new(goal: CovarianceGoal) -> Self {
        ControllerState {
            phase: Phase::CompressX,
            phase_time: 0.0,
            shear: None,
            goal,
        }
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// Time spent in the current phase.
    pub fn phase_time(&self) -> f64 {
        self.phase_time
    }

    /// Slide direction chosen on entry to the shear phase.
    pub fn shear(&self) -> Option<Shear> {
        self.shear
    }

    pub fn goal(&self) -> &CovarianceGoal {
        &self.goal
    }

    fn enter(&mut self, phase: Phase) {
        self.phase = phase;
        self.phase_time = 0.0;
        if phase == Phase::Shear {
            self.shear = Some(Shear::for_goal(&self.goal));
        }
    }
}

/// Whether the exit condition of `phase` holds for `m`.
pub fn exit_holds(
    phase: Phase,
    m: &Moments,
    goal: &CovarianceGoal,
    shear: Option<Shear>,
    cfg: &ControllerConfig,
) -> bool {
    match phase {
        Phase::CompressX => m.var_x < goal.c1 * goal.var_x,
        Phase::Center1 | Phase::Center2 => (m.mean() - cfg.center).norm() <= cfg.center_tol,
        Phase::CompressY => m.var_y <= goal.var_y,
        Phase::Shear => match shear.unwrap_or_else(|| Shear::for_goal(goal)) {
            Shear::Right => m.cov_xy >= goal.cov,
            Shear::Left => m.cov_xy <= goal.cov,
        },
        Phase::Done => false,
    }
}

/// Result of one controller update.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerOutput {
    pub input: ControlInput,
    pub state: ControllerState,
    /// Phases left during this update, in order.
    pub exited: Vec<Phase>,
    /// True when a new goal sent the controller back to the first phase.
    pub restarted: bool,
}

fn phase_input(phase: Phase, m: &Moments, cs: &ControllerState, cfg: &ControllerConfig) -> Result<ControlInput> {
    use std::f64::consts::{FRAC_PI_2, PI};
    match phase {
        Phase::CompressX => ControlInput::new(cfg.force, PI, cfg.dt),
        Phase::CompressY => ControlInput::new(cfg.force, -FRAC_PI_2, cfg.dt),
        Phase::Shear => {
            let dir = cs.shear.expect("shear direction is set on entry");
            ControlInput::new(cfg.force, dir.angle(), cfg.dt)
        }
        Phase::Center1 | Phase::Center2 => {
            let to = cfg.center - m.mean();
            ControlInput::new(cfg.force, to.y.atan2(to.x), cfg.dt)
        }
        Phase::Done => ControlInput::idle(cfg.dt),
    }
}

/// Chooses the input for the current statistics. Phases whose exit
/// condition already holds are passed through in the same update. A goal
/// different from the one in `cs` restarts the sequence.
pub fn controller_step(
    stats: &Moments,
    goal: &CovarianceGoal,
    cs: &ControllerState,
    cfg: &ControllerConfig,
) -> Result<ControllerOutput> {
    let m = stats;
    if m.fields().iter().any(|v| !v.is_finite()) {
        return Err(Error::Stats("swarm statistics are not finite".into()));
    }
    let mut state = *cs;
    let restarted = state.goal != *goal;
    if restarted {
        state = ControllerState::new(*goal);
    }
    let mut exited = Vec::new();
    while state.phase != Phase::Done && exit_holds(state.phase, m, &state.goal, state.shear, cfg) {
        exited.push(state.phase);
        state.enter(state.phase.next());
    }
    let input = phase_input(state.phase, m, &state, cfg)?;
    state.phase_time += cfg.dt;
    Ok(ControllerOutput {
        input,
        state,
        exited,
        restarted,
    })
}

/// Goal in force from `start` onward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduledGoal {
    pub start: f64,
    pub goal: CovarianceGoal,
}

/// One phase change with the statistics that triggered it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseEvent {
    pub t: f64,
    pub from: Phase,
    pub to: Phase,
    /// True when the change came from a new goal rather than an exit
    /// condition.
    pub restart: bool,
    pub shear: Option<Shear>,
    pub moments: Moments,
    pub goal: CovarianceGoal,
}

/// Whether and when the covariance band of one goal was reached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochReport {
    pub start: f64,
    pub end: f64,
    pub goal: CovarianceGoal,
    pub reached_at: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLoopRun {
    pub samples: Vec<StatsSample>,
    pub phases: Vec<Phase>,
    pub events: Vec<PhaseEvent>,
    pub epochs: Vec<EpochReport>,
    pub final_swarm: DiscSwarm,
}

/// Simulates the controller from `initial` for `duration` seconds,
/// switching goals at the scheduled times.
pub fn run_closed_loop(
    initial: &DiscSwarm,
    schedule: &[ScheduledGoal],
    params: &SimParams,
    cfg: &ControllerConfig,
    duration: f64,
) -> Result<ClosedLoopRun> {
    let first = schedule
        .first()
        .ok_or_else(|| Error::Goal("goal schedule is empty".into()))?;
    if first.start != 0.0 {
        return Err(Error::Goal(format!("first goal starts at {} instead of 0", first.start)));
    }
    if schedule.windows(2).any(|w| w[1].start.partial_cmp(&w[0].start) != Some(std::cmp::Ordering::Greater)) {
        return Err(Error::Goal("goal schedule times must increase".into()));
    }
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::Param(format!("duration {duration} must be > 0")));
    }
    let cfg = ControllerConfig { dt: params.dt(), ..*cfg };
    let steps = crate::physics::steps_for(duration, params.dt());
    let mut epochs: Vec<EpochReport> = schedule
        .iter()
        .enumerate()
        .filter(|(_, g)| g.start < duration)
        .map(|(i, g)| EpochReport {
            start: g.start,
            end: schedule.get(i + 1).map_or(duration, |n| n.start.min(duration)),
            goal: g.goal,
            reached_at: None,
        })
        .collect();

    let mut swarm = initial.clone();
    let mut state = ControllerState::new(first.goal);
    let mut samples = Vec::with_capacity(steps + 1);
    let mut phases = Vec::with_capacity(steps + 1);
    let mut events = Vec::new();
    let mut epoch = 0usize;
    for k in 0..=steps {
        let t = k as f64 * params.dt();
        while epoch + 1 < epochs.len() && t >= epochs[epoch + 1].start {
            epoch += 1;
        }
        let m = swarm_stats(&swarm)?.moments;
        let goal = epochs[epoch].goal;
        if epochs[epoch].reached_at.is_none() && goal.in_band(m.cov_xy) {
            epochs[epoch].reached_at = Some(t);
        }
        let out = controller_step(&m, &goal, &state, &cfg)?;
        if out.restarted {
            events.push(PhaseEvent {
                t,
                from: state.phase,
                to: Phase::CompressX,
                restart: true,
                shear: None,
                moments: m,
                goal,
            });
        }
        let mut from_state = if out.restarted {
            ControllerState::new(goal)
        } else {
            state
        };
        for &phase in &out.exited {
            let to = phase.next();
            let mut after = from_state;
            after.enter(to);
            events.push(PhaseEvent {
                t,
                from: phase,
                to,
                restart: false,
                shear: from_state.shear,
                moments: m,
                goal,
            });
            from_state = after;
        }
        samples.push(StatsSample { t, moments: m });
        phases.push(out.state.phase);
        state = out.state;
        if k < steps {
            swarm = step(&swarm, &out.input, params)?;
        }
    }
    Ok(ClosedLoopRun {
        samples,
        phases,
        events,
        epochs,
        final_swarm: swarm,
    })
}

/// Writes `t,phase,var_x,var_y,cov_xy,goal_var_x,goal_var_y,goal_cov`
/// rows, one per phase entered.
pub fn write_phase_log_csv<W: Write>(mut out: W, events: &[PhaseEvent]) -> io::Result<()> {
    writeln!(out, "t,phase,var_x,var_y,cov_xy,goal_var_x,goal_var_y,goal_cov")?;
    for e in events {
        let m = &e.moments;
        writeln!(
            out,
            "{:.6},{},{:.9},{:.9},{:.9},{:.9},{:.9},{:.9}",
            e.t, e.to, m.var_x, m.var_y, m.cov_xy, e.goal.var_x, e.goal.var_y, e.goal.cov
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematic::Workspace;

    fn cfg() -> ControllerConfig {
        ControllerConfig::new(1.0, Point::new(50.0, 50.0), 1.0, 0.01).unwrap()
    }

    fn stats(mean: Point, vx: f64, vy: f64, c: f64) -> Moments {
        Moments::from_covariance(mean, vx, vy, c)
    }

    #[test]
    fn goal_validation() {
        assert!(CovarianceGoal::new(100.0, 100.0, 100.0, 0.1).is_ok());
        assert!(matches!(CovarianceGoal::new(100.0, 100.0, 101.0, 0.1), Err(Error::Goal(_))));
        assert!(CovarianceGoal::new(0.0, 100.0, 0.0, 0.1).is_err());
        assert!(CovarianceGoal::new(100.0, 100.0, 0.0, 1.0).is_err());
        let g = CovarianceGoal::new(1000.0, 1000.0, -800.0, 0.1).unwrap();
        assert_eq!(g.band(), 80.0);
        assert!(g.in_band(-730.0) && !g.in_band(-700.0));
        assert_eq!(CovarianceGoal::new(1000.0, 100.0, 10.0, 0.1).unwrap().band(), 50.0);
    }

    #[test]
    fn satisfied_goal_passes_straight_to_done() {
        let g = CovarianceGoal::new(1000.0, 100.0, 20.0, 0.1).unwrap();
        let m = stats(Point::new(50.0, 50.0), 50.0, 80.0, 30.0);
        let out = controller_step(&m, &g, &ControllerState::new(g), &cfg()).unwrap();
        assert_eq!(
            out.exited,
            vec![Phase::CompressX, Phase::Center1, Phase::CompressY, Phase::Shear, Phase::Center2]
        );
        assert_eq!(out.state.phase(), Phase::Done);
        assert_eq!(out.input.force(), 0.0);
    }

    #[test]
    fn only_centering_moves_when_shape_goals_hold() {
        let g = CovarianceGoal::new(1000.0, 100.0, 20.0, 0.1).unwrap();
        let m = stats(Point::new(20.0, 50.0), 50.0, 80.0, 30.0);
        let out = controller_step(&m, &g, &ControllerState::new(g), &cfg()).unwrap();
        assert_eq!(out.state.phase(), Phase::Center1);
        assert!(out.input.direction().abs() < 1e-12);
    }

    #[test]
    fn shear_direction_follows_goal_sign() {
        let m = stats(Point::new(50.0, 50.0), 50.0, 80.0, 0.0);
        for (c, dir) in [(60.0, Shear::Right), (-60.0, Shear::Left)] {
            let g = CovarianceGoal::new(1000.0, 100.0, c, 0.1).unwrap();
            let out = controller_step(&m, &g, &ControllerState::new(g), &cfg()).unwrap();
            assert_eq!(out.state.phase(), Phase::Shear);
            assert_eq!(out.state.shear(), Some(dir));
            assert_eq!(out.input.direction(), dir.angle());
        }
    }

    #[test]
    fn goal_change_restarts() {
        let g = CovarianceGoal::new(1000.0, 100.0, 60.0, 0.1).unwrap();
        let m = stats(Point::new(50.0, 50.0), 500.0, 80.0, 0.0);
        let mut cs = ControllerState::new(g);
        cs.enter(Phase::Shear);
        let flipped = CovarianceGoal::new(1000.0, 100.0, -60.0, 0.1).unwrap();
        let out = controller_step(&m, &flipped, &cs, &cfg()).unwrap();
        assert!(out.restarted);
        assert_eq!(out.state.phase(), Phase::CompressX);
        assert_eq!(out.input.direction(), std::f64::consts::PI);
        let same = controller_step(&m, &g, &cs, &cfg()).unwrap();
        assert!(!same.restarted && same.state.phase() == Phase::Shear);
    }

    #[test]
    fn phase_time_accumulates_and_resets() {
        let g = CovarianceGoal::new(1000.0, 100.0, 60.0, 0.1).unwrap();
        let wide = stats(Point::new(50.0, 50.0), 500.0, 80.0, 0.0);
        let mut cs = ControllerState::new(g);
        for _ in 0..3 {
            cs = controller_step(&wide, &g, &cs, &cfg()).unwrap().state;
        }
        assert!((cs.phase_time() - 0.03).abs() < 1e-12);
        let narrow = stats(Point::new(10.0, 50.0), 50.0, 80.0, 0.0);
        cs = controller_step(&narrow, &g, &cs, &cfg()).unwrap().state;
        assert_eq!(cs.phase(), Phase::Center1);
        assert!((cs.phase_time() - 0.01).abs() < 1e-12);
    }

    #[test]
    fn static_goal_matching_start_succeeds_immediately() {
        let ws = Workspace::new(120.0, 120.0, 0.0).unwrap();
        let swarm = DiscSwarm::hex_block(ws, 16, 2.0, Point::new(60.0, 60.0), 0.0, 1).unwrap();
        let params = SimParams::new(crate::physics::DEFAULT_DT, 10.0, 1.0, 100.0, 1).unwrap();
        let m = swarm_stats(&swarm).unwrap().moments;
        let g = CovarianceGoal::new(m.var_x * 20.0, m.var_y, m.cov_xy, 0.1).unwrap();
        let cfg = ControllerConfig::for_swarm(&swarm, &params, 1.0).unwrap();
        let run = run_closed_loop(&swarm, &[ScheduledGoal { start: 0.0, goal: g }], &params, &cfg, 0.1).unwrap();
        assert_eq!(run.epochs[0].reached_at, Some(0.0));
        assert_eq!(run.phases[0], Phase::Done);
        assert_eq!(run.events.len(), 5);
        assert_eq!(run.final_swarm, swarm);
    }

    #[test]
    fn schedule_validation() {
        let ws = Workspace::new(120.0, 120.0, 0.0).unwrap();
        let swarm = DiscSwarm::hex_block(ws, 4, 2.0, Point::new(60.0, 60.0), 0.0, 1).unwrap();
        let params = SimParams::new(0.01, 1.0, 0.0, 1.0, 1).unwrap();
        let cfg = ControllerConfig::for_swarm(&swarm, &params, 1.0).unwrap();
        let g = CovarianceGoal::new(10.0, 10.0, 0.0, 0.1).unwrap();
        assert!(run_closed_loop(&swarm, &[], &params, &cfg, 1.0).is_err());
        let late = [ScheduledGoal { start: 1.0, goal: g }];
        assert!(run_closed_loop(&swarm, &late, &params, &cfg, 1.0).is_err());
        let back = [ScheduledGoal { start: 0.0, goal: g }, ScheduledGoal { start: 0.0, goal: g }];
        assert!(run_closed_loop(&swarm, &back, &params, &cfg, 1.0).is_err());
    }

    #[test]
    fn phase_log_csv() {
        let g = CovarianceGoal::new(10.0, 10.0, 1.0, 0.1).unwrap();
        let e = PhaseEvent {
            t: 1.5,
            from: Phase::CompressX,
            to: Phase::Center1,
            restart: false,
            shear: None,
            moments: stats(Point::new(0.0, 0.0), 0.5, 2.0, 0.25),
            goal: g,
        };
        let mut buf = Vec::new();
        write_phase_log_csv(&mut buf, &[e]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,phase,var_x,var_y,cov_xy,goal_var_x,goal_var_y,goal_cov");
        assert!(lines[1].starts_with("1.500000,center_1,0.500000000,2.000000000,0.250000000,10.0"));
    }
}

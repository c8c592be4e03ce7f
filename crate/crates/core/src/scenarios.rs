//! Default swarm setups for the friction sweep and covariance tracking runs.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::covariance::{ControllerConfig, CovarianceGoal, ScheduledGoal};
use crate::error::Result;
use crate::friction::mu_for_force_fraction;
use crate::geometry::{Point, Rect};
use crate::kinematic::Workspace;
use crate::physics::{ControlInput, DiscSwarm, SimParams, DEFAULT_DT};

/// Wall friction levels whose largest friction force is 0, 1/3, 2/3 and 1
/// times the drive force for a push at 45 degrees into a wall.
pub fn friction_sweep() -> Vec<f64> {
    [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]
        .iter()
        .map(|&f| mu_for_force_fraction(f).expect("fractions are non-negative"))
        .collect()
}

/// Swarm size, workspace and simulation constants shared by the runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwarmSetup {
    pub n: usize,
    pub radius: f64,
    pub width: f64,
    pub height: f64,
    pub mobility: f64,
    pub stiffness: f64,
    pub force: f64,
    pub dt: f64,
}

impl Default for SwarmSetup {
    fn default() -> Self {
        SwarmSetup {
            n: 144,
            radius: 4.0,
            width: 240.0,
            height: 240.0,
            mobility: 40.0,
            stiffness: 200.0,
            force: 1.0,
            dt: DEFAULT_DT,
        }
    }
}

impl SwarmSetup {
    /// Open-loop setup: twice as wide so a sliding pile stays clear of the
    /// side walls.
    pub fn open_loop() -> Self {
        SwarmSetup {
            width: 480.0,
            ..SwarmSetup::default()
        }
    }

    pub fn workspace(&self) -> Result<Workspace> {
        Workspace::new(self.width, self.height, 0.0)
    }

    pub fn params(&self, mu_f: f64, seed: u64) -> Result<SimParams> {
        SimParams::new(self.dt, self.mobility, mu_f, self.stiffness, seed)
    }

    /// Jittered hexagonal block centered at `center`.
    pub fn hex(&self, center: Point, seed: u64) -> Result<DiscSwarm> {
        DiscSwarm::hex_block(self.workspace()?, self.n, self.radius, center, 0.3, seed)
    }

    /// Block resting a little above the floor, centered left to right.
    pub fn open_loop_start(&self, seed: u64) -> Result<DiscSwarm> {
        self.hex(Point::new(self.width / 2.0, self.height / 4.0), seed)
    }

    /// Three distinct starts: a centered block, an off-center block and a
    /// random scatter over the whole workspace.
    pub fn closed_loop_starts(&self, seed: u64) -> Result<Vec<DiscSwarm>> {
        let whole = Rect::new(Point::new(0.0, 0.0), Point::new(self.width, self.height))?;
        Ok(vec![
            self.hex(Point::new(self.width / 2.0, self.height / 2.0), seed)?,
            self.hex(Point::new(0.7 * self.width, 0.35 * self.height), seed.wrapping_add(1))?,
            DiscSwarm::scattered(self.workspace()?, self.n, self.radius, whole, seed.wrapping_add(2))?,
        ])
    }

    pub fn controller(&self, swarm: &DiscSwarm) -> Result<ControllerConfig> {
        ControllerConfig::new(self.force, swarm.center(), self.radius, self.dt)
    }
}

/// Settle onto the floor for `settle` seconds, then slide along it at 45
/// degrees, right for `slide` seconds and then alternately left and right
/// for `2 * slide` seconds, `slides` slides in all.
pub fn open_loop_program(force: f64, settle: f64, slide: f64, slides: usize) -> Result<Vec<ControlInput>> {
    let mut program = vec![ControlInput::new(force, -FRAC_PI_2, settle)?];
    for i in 0..slides {
        let dir = if i % 2 == 0 { -FRAC_PI_4 } else { -3.0 * FRAC_PI_4 };
        let dur = if i == 0 { slide } else { 2.0 * slide };
        program.push(ControlInput::new(force, dir, dur)?);
    }
    Ok(program)
}

/// Default open-loop program: 2 s settle, four slides.
pub fn default_open_loop_program(force: f64) -> Result<Vec<ControlInput>> {
    open_loop_program(force, 2.0, 1.0, 4)
}

/// Goals with fixed variances whose covariance flips sign every `epoch`
/// seconds, starting positive.
pub fn alternating_schedule(
    var_x: f64,
    var_y: f64,
    cov: f64,
    c1: f64,
    epoch: f64,
    epochs: usize,
) -> Result<Vec<ScheduledGoal>> {
    (0..epochs)
        .map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            Ok(ScheduledGoal {
                start: i as f64 * epoch,
                goal: CovarianceGoal::new(var_x, var_y, sign * cov, c1)?,
            })
        })
        .collect()
}

/// Default tracking schedule for [`SwarmSetup::default`]: four 30 s epochs
/// with goal variances (6000, 600) and covariance ±300.
pub fn default_schedule() -> Result<Vec<ScheduledGoal>> {
    alternating_schedule(6000.0, 600.0, 300.0, 0.1, 30.0, 4)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_levels() {
        let s = friction_sweep();
        assert_eq!(s.len(), 4);
        assert_eq!(s[0], 0.0);
        assert!((s[3] - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn program_shape() {
        let p = default_open_loop_program(1.0).unwrap();
        let total: f64 = p.iter().map(|u| u.duration()).sum();
        assert_eq!(p.len(), 5);
        assert_eq!(total, 9.0);
        assert_eq!(p[1].direction(), -FRAC_PI_4);
        assert_eq!(p[2].direction(), -3.0 * FRAC_PI_4);
    }

    #[test]
    fn schedule_alternates() {
        let s = default_schedule().unwrap();
        let covs: Vec<f64> = s.iter().map(|g| g.goal.cov()).collect();
        assert_eq!(covs, vec![300.0, -300.0, 300.0, -300.0]);
        assert_eq!(s[3].start, 90.0);
    }

    #[test]
    fn starts_are_valid_and_distinct() {
        let setup = SwarmSetup::default();
        let starts = setup.closed_loop_starts(1).unwrap();
        assert_eq!(starts.len(), 3);
        assert!(starts.iter().all(|s| s.len() == 144));
        assert_ne!(starts[0], starts[1]);
        let ol = SwarmSetup::open_loop().open_loop_start(7).unwrap();
        assert!(ol.positions().iter().all(|p| p.y > 0.0 && p.y < 120.0));
    }
}

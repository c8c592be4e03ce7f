//! Fixed workloads shared by the benchmarks.

use swarmshape_core::physics::{ControlInput, DiscSwarm, SimParams};
use swarmshape_core::planning::grid::{random_zones, Zones};
use swarmshape_core::planning::two_robot::TwoRobotTask;
use swarmshape_core::scenarios::{friction_sweep, SwarmSetup};
use swarmshape_core::{Point, Polygon, Result};

/// Irregular convex hexagon.
pub fn hexagon() -> Result<Polygon> {
    Polygon::new(vec![
        Point::new(0.0, 0.0),
        Point::new(2.0, -0.5),
        Point::new(3.5, 0.8),
        Point::new(3.2, 2.6),
        Point::new(1.0, 3.0),
        Point::new(-0.6, 1.4),
    ])
}

pub fn two_robot_task() -> Result<TwoRobotTask> {
    TwoRobotTask::new(
        Point::new(0.15, 0.8),
        Point::new(0.7, 0.25),
        Point::new(0.9, 0.6),
        Point::new(0.1, 0.05),
        1.0,
    )
}

pub fn grid_layout(n: usize) -> Result<Zones> {
    random_zones(n, 2, 0.7, 11)
}

/// Default 144-disc swarm settling onto the floor at the highest friction
/// level.
pub fn settling_swarm() -> Result<(DiscSwarm, ControlInput, SimParams)> {
    let setup = SwarmSetup::default();
    let swarm = setup.hex(Point::new(120.0, 60.0), 3)?;
    let down = ControlInput::new(setup.force, -std::f64::consts::FRAC_PI_2, setup.dt)?;
    let params = setup.params(*friction_sweep().last().expect("sweep is non-empty"), 3)?;
    Ok((swarm, down, params))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn workloads_build() {
        assert!(hexagon().unwrap().is_simple());
        two_robot_task().unwrap();
        assert_eq!(grid_layout(20).unwrap().len(), 20);
        assert_eq!(settling_swarm().unwrap().0.len(), 144);
    }
}

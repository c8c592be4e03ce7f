//! Shaping a swarm of robots that all receive the same control input.
//!
//! Robots move together under a shared command; the walls of the workspace
//! are what break the symmetry. This crate computes where a settled swarm
//! ends up, models wall friction, plans exact moves for point robots and
//! simulates and steers a swarm of discs.

pub mod covariance;
pub mod error;
pub mod friction;
pub mod geometry;
pub mod kinematic;
pub mod physics;
pub mod planning;
pub mod scenarios;
pub mod settle;

pub use covariance::{
    controller_step, run_closed_loop, ClosedLoopRun, ControllerConfig, ControllerState, CovarianceGoal, Phase,
    ScheduledGoal,
};
pub use error::{Error, Result};
pub use friction::{boundary_layer_velocity, forward_force, BoundaryLayerSpec, FrictionParams};
pub use geometry::{monte_carlo_moments, polygon_area, polygon_moments, Moments, Point, Polygon, Rect};
pub use kinematic::{MoveCommand, MoveSequence, RobotState, Workspace};
pub use physics::{run_open_loop, step, swarm_stats, ControlInput, DiscSwarm, SampleMoments, SimParams};
pub use settle::{CircleFillSpec, SquareFillSpec};

//! Move planners for robots that share one control input.

pub mod drift;
pub mod grid;
pub mod plan_io;
pub mod two_robot;

pub use drift::{drift_cycles, drift_move, DriftMoveSpec};
pub use grid::{
    arrange_n_robots, grid_replay, random_zones, total_distance, Cell, GridRect, GridState, Zones,
};
pub use plan_io::{parse_plan, write_plan};
pub use two_robot::{
    arrange_two_robots, plan_two_robots, x_spacing, y_spacing, TwoRobotPlan, TwoRobotTask,
};

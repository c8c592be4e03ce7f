//! Plans survive a round trip through plan text and still reach their goals.

use swarmshape_core::kinematic::{replay, RobotState, Workspace};
use swarmshape_core::planning::grid::{arrange_n_robots, grid_replay, random_zones, GridState};
use swarmshape_core::planning::plan_io::{parse_plan, write_plan};
use swarmshape_core::planning::two_robot::{arrange_two_robots, TwoRobotTask};
use swarmshape_core::Point;

#[test]
fn two_robot_plan_text_round_trip() {
    let task = TwoRobotTask::new(
        Point::new(1.2, 3.1),
        Point::new(4.4, 0.9),
        Point::new(3.7, 2.2),
        Point::new(0.6, 4.5),
        5.0,
    )
    .unwrap();
    let seq = arrange_two_robots(&task).unwrap();
    let parsed = parse_plan(&write_plan(&seq)).unwrap();
    assert_eq!(parsed.len(), seq.len());
    assert_eq!(parsed.annotations(), seq.annotations());
    let ws = Workspace::square(5.0).unwrap();
    let start = RobotState::new(&ws, vec![task.s1, task.s2]).unwrap();
    let end = replay(&ws, &start, &parsed).unwrap();
    assert!((end.positions()[0] - task.e1).norm() < 1e-9);
    assert!((end.positions()[1] - task.e2).norm() < 1e-9);
}

#[test]
fn grid_plan_text_round_trip() {
    let z = random_zones(12, 3, 0.6, 8).unwrap();
    let seq = arrange_n_robots(&z).unwrap();
    let parsed = parse_plan(&write_plan(&seq)).unwrap();
    assert_eq!(parsed, seq);
    let start = GridState::new(z.width(), z.height(), z.starts().to_vec()).unwrap();
    assert_eq!(grid_replay(&start, &parsed).unwrap().cells(), z.goals());
}

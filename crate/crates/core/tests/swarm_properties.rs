//! Properties of the disc simulator and the covariance controller at the
//! default 144-disc scale.

use std::f64::consts::PI;

use swarmshape_core::covariance::{run_closed_loop, Phase, Shear};
use swarmshape_core::physics::{run_program, swarm_stats, ControlInput, DiscSwarm};
use swarmshape_core::scenarios::{default_schedule, friction_sweep, SwarmSetup};
use swarmshape_core::{monte_carlo_moments, Point, Rect};

fn max_mu() -> f64 {
    *friction_sweep().last().unwrap()
}

#[test]
fn shear_moves_covariance_toward_goal() {
    let setup = SwarmSetup::default();
    let start = setup.hex(Point::new(120.0, 120.0), 1).unwrap();
    let params = setup.params(max_mu(), 1).unwrap();
    let cfg = setup.controller(&start).unwrap();
    let schedule = default_schedule().unwrap();
    let run = run_closed_loop(&start, &schedule[..2], &params, &cfg, 60.0).unwrap();
    let window = (1.0 / setup.dt).round() as usize;
    let mut windows = 0;
    let mut i = 0;
    while i < run.phases.len() {
        if run.phases[i] != Phase::Shear {
            i += 1;
            continue;
        }
        let end = (i..run.phases.len()).find(|&j| run.phases[j] != Phase::Shear).unwrap_or(run.phases.len());
        let goal = schedule[if run.samples[i].t < 30.0 { 0 } else { 1 }].goal;
        let sign = goal.cov().signum();
        for a in i..end.saturating_sub(window) {
            let gain = sign * (run.samples[a + window].moments.cov_xy - run.samples[a].moments.cov_xy);
            assert!(gain >= -0.05 * goal.cov().abs(), "t {} gain {gain}", run.samples[a].t);
            windows += 1;
        }
        i = end;
    }
    assert!(windows > 0);
}

fn touches_side(s: &DiscSwarm) -> bool {
    let w = s.workspace().width();
    s.positions().iter().any(|p| p.x <= s.radius() + 1e-6 || p.x >= w - s.radius() - 1e-6)
}

#[test]
fn friction_drives_shear() {
    let setup = SwarmSetup::default();
    let start = setup.hex(Point::new(120.0, 120.0), 1).unwrap();
    let params = setup.params(max_mu(), 1).unwrap();
    let cfg = setup.controller(&start).unwrap();
    let schedule = default_schedule().unwrap();
    let probe = run_closed_loop(&start, &schedule[..1], &params, &cfg, 20.0).unwrap();
    let entry = probe.events.iter().find(|e| e.to == Phase::Shear).unwrap();
    let at = run_closed_loop(&start, &schedule[..1], &params, &cfg, entry.t).unwrap().final_swarm;
    let c0 = swarm_stats(&at).unwrap().moments.cov_xy;
    let push = ControlInput::new(setup.force, Shear::Right.angle(), 1.0).unwrap();
    let mut change = Vec::new();
    for mu in [0.0, max_mu()] {
        let mut side = false;
        let end = run_program(&at, &[push], &params.with_mu_f(mu).unwrap(), |_, s| side |= touches_side(s)).unwrap();
        assert!(!side, "mu {mu} reached a side wall");
        change.push(swarm_stats(&end).unwrap().moments.cov_xy - c0);
    }
    assert!(change[1] > 0.0);
    assert!(change[1] >= 1.5 * change[0].abs(), "{change:?}");
}

#[test]
fn centering_phases_end_near_center() {
    let setup = SwarmSetup::default();
    let start = setup.hex(Point::new(60.0, 180.0), 4).unwrap();
    let params = setup.params(max_mu(), 4).unwrap();
    let cfg = setup.controller(&start).unwrap();
    let run = run_closed_loop(&start, &default_schedule().unwrap()[..1], &params, &cfg, 30.0).unwrap();
    let centered: Vec<_> = run
        .events
        .iter()
        .filter(|e| matches!(e.from, Phase::Center1 | Phase::Center2))
        .collect();
    assert_eq!(centered.len(), 2);
    for e in centered {
        assert!((e.moments.mean() - start.center()).norm() <= setup.radius);
    }
    assert_eq!(*run.phases.last().unwrap(), Phase::Done);
}

#[test]
fn closed_loop_is_deterministic() {
    let setup = SwarmSetup::default();
    let start = setup.closed_loop_starts(9).unwrap().remove(2);
    let params = setup.params(max_mu(), 9).unwrap();
    let cfg = setup.controller(&start).unwrap();
    let schedule = default_schedule().unwrap();
    let a = run_closed_loop(&start, &schedule[..1], &params, &cfg, 5.0).unwrap();
    let b = run_closed_loop(&start, &schedule[..1], &params, &cfg, 5.0).unwrap();
    assert_eq!(a, b);
}

#[test]
fn hex_block_matches_its_region() {
    let setup = SwarmSetup::default();
    let ws = setup.workspace().unwrap();
    let r = setup.radius;
    let block = DiscSwarm::hex_block(ws, 144, r, Point::new(120.0, 120.0), 0.0, 0).unwrap();
    let m = swarm_stats(&block).unwrap().moments;
    // each disc center stands for a hexagonal cell of width 2r and height
    // sqrt(3) r; rows alternate in offset
    let xs: Vec<f64> = block.positions().iter().map(|p| p.x).collect();
    let ys: Vec<f64> = block.positions().iter().map(|p| p.y).collect();
    let lo = Point::new(xs.iter().cloned().fold(f64::INFINITY, f64::min) - r, ys.iter().cloned().fold(f64::INFINITY, f64::min) - 0.5 * 3f64.sqrt() * r);
    let hi = Point::new(xs.iter().cloned().fold(0.0, f64::max) + r, ys.iter().cloned().fold(0.0, f64::max) + 0.5 * 3f64.sqrt() * r);
    let region = Rect::new(lo, hi).unwrap();
    let mc = monte_carlo_moments(|_| true, region, 200_000, 3).unwrap();
    assert!((m.mean() - mc.mean()).norm() < 1.0);
    assert!((m.var_x / mc.var_x - 1.0).abs() < 0.1, "{} {}", m.var_x, mc.var_x);
    assert!((m.var_y / mc.var_y - 1.0).abs() < 0.1, "{} {}", m.var_y, mc.var_y);
    assert!(m.cov_xy.abs() < 0.02 * m.var_x && mc.cov_xy.abs() < 0.02 * mc.var_x);
}

#[test]
fn settled_pile_respects_overlap_bound() {
    let setup = SwarmSetup::default();
    let start = setup.hex(Point::new(120.0, 120.0), 2).unwrap();
    let params = setup.params(max_mu(), 2).unwrap();
    let down = ControlInput::new(setup.force, -PI / 2.0, 8.0).unwrap();
    let end = run_program(&start, &[down], &params, |_, _| {}).unwrap();
    assert!(end.max_overlap() <= 0.05, "{}", end.max_overlap());
}

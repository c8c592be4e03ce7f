//! Scenario kinds, their parameters and the artifacts each one writes.
//!
//! Every scenario first reads and checks all of its parameters, then runs.
//! Parameter problems surface before any computation starts.

use std::fmt::Write as _;

use clap::ValueEnum;
use swarmshape_core::covariance::{run_closed_loop, write_phase_log_csv, ScheduledGoal};
use swarmshape_core::friction::mu_for_force_fraction;
use swarmshape_core::kinematic::{apply_sequence, RobotState, Workspace};
use swarmshape_core::physics::{
    run_program, swarm_stats, write_stats_csv, write_trajectory_csv, ControlInput, DiscSwarm, StatsSample,
};
use swarmshape_core::planning::grid::{arrange_n_robots, random_zones, total_distance, GridState, Zones};
use swarmshape_core::planning::plan_io::write_plan;
use swarmshape_core::planning::two_robot::{plan_two_robots, TwoRobotTask};
use swarmshape_core::scenarios::{alternating_schedule, open_loop_program, SwarmSetup};
use swarmshape_core::settle::{sweep_statistics, CircleFillSpec, SquareFillSpec, SweepWorkspace};
use swarmshape_core::{Error as CoreError, Moments, Point};

use crate::config::{Config, ValidationError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    SquareSweep,
    CircleSweep,
    TwoRobot,
    NRobot,
    OpenLoopFriction,
    ClosedLoopCov,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::SquareSweep => "square-sweep",
            Kind::CircleSweep => "circle-sweep",
            Kind::TwoRobot => "two-robot",
            Kind::NRobot => "n-robot",
            Kind::OpenLoopFriction => "open-loop-friction",
            Kind::ClosedLoopCov => "closed-loop-cov",
        }
    }
}

/// One output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    fn new(name: impl Into<String>, bytes: Vec<u8>) -> Self {
        Artifact {
            name: name.into(),
            bytes,
        }
    }
}

/// Files to write and a summary table for the terminal.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Output {
    pub artifacts: Vec<Artifact>,
    pub summary: Vec<(String, String)>,
}

impl Output {
    fn note(&mut self, key: impl Into<String>, value: impl ToString) {
        self.summary.push((key.into(), value.to_string()));
    }
}

/// Checked parameters, ready to run.
#[derive(Debug, Clone)]
pub enum Prepared {
    Sweep {
        workspace: SweepWorkspace,
        fills: Vec<f64>,
        beta_samples: usize,
    },
    TwoRobot(TwoRobotTask),
    NRobot(Zones),
    OpenLoop {
        start: DiscSwarm,
        setup: SwarmSetup,
        program: Vec<ControlInput>,
        fractions: Vec<f64>,
        stride: usize,
        seed: u64,
    },
    ClosedLoop {
        setup: SwarmSetup,
        starts: Vec<(String, DiscSwarm)>,
        schedule: Vec<ScheduledGoal>,
        duration: f64,
        mu_f: f64,
        seed: u64,
    },
}

fn invalid(e: CoreError) -> ValidationError {
    ValidationError(e.to_string())
}

fn positive(key: &str, v: f64) -> Result<f64, ValidationError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(ValidationError(format!("{key} = {v} must be finite and > 0")))
    }
}

fn swarm_setup(cfg: &mut Config, base: SwarmSetup) -> Result<SwarmSetup, ValidationError> {
    let setup = SwarmSetup {
        n: cfg.get_or("n", base.n)?,
        radius: positive("radius", cfg.get_or("radius", base.radius)?)?,
        width: positive("width", cfg.get_or("width", base.width)?)?,
        height: positive("height", cfg.get_or("height", base.height)?)?,
        mobility: positive("mobility", cfg.get_or("mobility", base.mobility)?)?,
        stiffness: positive("stiffness", cfg.get_or("stiffness", base.stiffness)?)?,
        force: positive("force", cfg.get_or("force", base.force)?)?,
        dt: positive("dt", cfg.get_or("dt", base.dt)?)?,
    };
    if setup.n < 2 {
        return Err(ValidationError(format!("n = {} must be at least 2", setup.n)));
    }
    setup.params(0.0, 0).map_err(invalid)?;
    Ok(setup)
}

fn beta_samples(cfg: &mut Config) -> Result<usize, ValidationError> {
    let n: usize = cfg.get_or("beta_samples", 360)?;
    if n == 0 {
        return Err(ValidationError("beta_samples must be at least 1".into()));
    }
    Ok(n)
}

/// Reads and checks every parameter of `kind`, then rejects unknown keys.
pub fn prepare(kind: Kind, cfg: &mut Config, seed: u64) -> Result<Prepared, ValidationError> {
    let prepared = match kind {
        Kind::SquareSweep => {
            let fills = cfg.list_or("A", &[0.1, 0.3, 0.5, 0.7, 0.9])?;
            for &a in &fills {
                SquareFillSpec::new(0.0, a).map_err(invalid)?;
            }
            Prepared::Sweep {
                workspace: SweepWorkspace::Square,
                fills,
                beta_samples: beta_samples(cfg)?,
            }
        }
        Kind::CircleSweep => {
            let fills = cfg.list_or("h", &[0.25, 0.5, 1.0, 1.5, 1.75])?;
            for &h in &fills {
                CircleFillSpec::new(0.0, h).map_err(invalid)?;
            }
            Prepared::Sweep {
                workspace: SweepWorkspace::Circle,
                fills,
                beta_samples: beta_samples(cfg)?,
            }
        }
        Kind::TwoRobot => {
            let side = cfg.get_or("side", 1.0)?;
            let mut pt = |k: &str| cfg.point(k).map(|(x, y)| Point::new(x, y));
            let (s1, s2, e1, e2) = (pt("s1")?, pt("s2")?, pt("e1")?, pt("e2")?);
            Prepared::TwoRobot(TwoRobotTask::new(s1, s2, e1, e2, side).map_err(invalid)?)
        }
        Kind::NRobot => {
            let n: usize = cfg.require("n")?;
            let shape: String = cfg.get_or("shape", "grid".to_string())?;
            if shape != "grid" {
                return Err(ValidationError(format!("shape = {shape:?}: only grid is supported")));
            }
            let eps: i64 = cfg.get_or("eps", 2)?;
            let fill: f64 = cfg.get_or("fill", 0.7)?;
            Prepared::NRobot(random_zones(n, eps, fill, seed).map_err(invalid)?)
        }
        Kind::OpenLoopFriction => {
            let setup = swarm_setup(cfg, SwarmSetup::open_loop())?;
            let settle = cfg.get_or("settle", 2.0)?;
            let slide = cfg.get_or("slide", 1.0)?;
            let slides = cfg.get_or("slides", 4usize)?;
            let fractions = cfg.list_or("friction_fractions", &[0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0])?;
            for &f in &fractions {
                mu_for_force_fraction(f).map_err(invalid)?;
            }
            let stride = cfg.get_or("trajectory_stride", 24usize)?;
            let program = open_loop_program(setup.force, settle, slide, slides).map_err(invalid)?;
            let start = setup.open_loop_start(seed).map_err(invalid)?;
            Prepared::OpenLoop {
                start,
                setup,
                program,
                fractions,
                stride,
                seed,
            }
        }
        Kind::ClosedLoopCov => {
            let setup = swarm_setup(cfg, SwarmSetup::default())?;
            let gx = cfg.get_or("goal_var_x", 6000.0)?;
            let gy = cfg.get_or("goal_var_y", 600.0)?;
            let gc = cfg.get_or("goal_cov", 300.0)?;
            let c1 = cfg.get_or("c1", 0.1)?;
            let epoch = positive("epoch", cfg.get_or("epoch", 30.0)?)?;
            let epochs = cfg.get_or("epochs", 4usize)?;
            if epochs == 0 {
                return Err(ValidationError("epochs must be at least 1".into()));
            }
            let fraction = cfg.get_or("friction_fraction", 1.0)?;
            let mu_f = mu_for_force_fraction(fraction).map_err(invalid)?;
            let names: String = cfg.get_or("starts", "center,offset,scatter".to_string())?;
            let all = setup.closed_loop_starts(seed).map_err(invalid)?;
            let mut starts = Vec::new();
            for name in names.split(',').map(str::trim) {
                let i = ["center", "offset", "scatter"]
                    .iter()
                    .position(|&n| n == name)
                    .ok_or_else(|| ValidationError(format!("unknown start {name:?}")))?;
                starts.push((name.to_string(), all[i].clone()));
            }
            let schedule = alternating_schedule(gx, gy, gc, c1, epoch, epochs).map_err(invalid)?;
            Prepared::ClosedLoop {
                setup,
                starts,
                schedule,
                duration: epoch * epochs as f64,
                mu_f,
                seed,
            }
        }
    };
    cfg.finish()?;
    Ok(prepared)
}

fn moments_row(out: &mut String, m: &Moments) {
    let _ = write!(
        out,
        "{:.12},{:.12},{:.12},{:.12},{:.12},{:.12}",
        m.mean_x, m.mean_y, m.var_x, m.var_y, m.cov_xy, m.corr
    );
}

fn run_sweep(workspace: SweepWorkspace, fills: &[f64], samples: usize) -> Result<Output, CoreError> {
    let rows = sweep_statistics(workspace, fills, samples)?;
    let (label, file) = match workspace {
        SweepWorkspace::Square => ("A", "square_sweep.csv"),
        SweepWorkspace::Circle => ("h", "circle_sweep.csv"),
    };
    let mut csv = format!("{label},beta,mean_x,mean_y,var_x,var_y,cov_xy,corr\n");
    for r in &rows {
        let _ = write!(csv, "{},{:.12},", r.fill, r.beta);
        moments_row(&mut csv, &r.moments);
        csv.push('\n');
    }
    let mut out = Output::default();
    out.note("rows", rows.len());
    for &f in fills {
        let sel = rows.iter().filter(|r| r.fill == f);
        let (lo, hi) = sel.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r.moments.cov_xy), hi.max(r.moments.cov_xy))
        });
        out.note(format!("{label}={f} cov_xy range"), format!("[{lo:.6}, {hi:.6}]"));
    }
    out.artifacts.push(Artifact::new(file, csv.into_bytes()));
    Ok(out)
}

fn run_two_robot(task: &TwoRobotTask) -> Result<Output, CoreError> {
    let plan = plan_two_robots(task)?;
    let ws = Workspace::square(task.side)?;
    let start = RobotState::new(&ws, vec![task.s1, task.s2])?;
    let states = apply_sequence(&ws, &start, &plan.sequence)?;
    let mut csv = String::from("step,robot_id,x,y\n");
    for (k, s) in states.iter().enumerate() {
        for (i, p) in s.positions().iter().enumerate() {
            let _ = writeln!(csv, "{k},{i},{:.12},{:.12}", p.x, p.y);
        }
    }
    let end = states.last().expect("replay includes the start");
    let err = (end.positions()[0] - task.e1).norm().max((end.positions()[1] - task.e2).norm());
    let mut out = Output::default();
    out.note("commands", plan.sequence.len());
    out.note("total length", format!("{:.9}", plan.sequence.total_length()));
    out.note("x rounds", format!("{:?}", plan.x_rounds));
    out.note("y rounds", format!("{:?}", plan.y_rounds));
    out.note("goal error", format!("{err:.3e}"));
    out.artifacts.push(Artifact::new("plan.txt", write_plan(&plan.sequence).into_bytes()));
    out.artifacts.push(Artifact::new("trajectory.csv", csv.into_bytes()));
    Ok(out)
}

fn run_n_robot(zones: &Zones) -> Result<Output, CoreError> {
    let seq = arrange_n_robots(zones)?;
    let mut state = GridState::new(zones.width(), zones.height(), zones.starts().to_vec())?;
    let mut csv = String::from("step,label,robot_id,x,y\n");
    let snapshot = |csv: &mut String, step: usize, label: &str, s: &GridState| {
        for (i, (x, y)) in s.cells().iter().enumerate() {
            let _ = writeln!(csv, "{step},{label},{i},{x},{y}");
        }
    };
    let mut labels = seq.annotations().iter().peekable();
    for (k, &c) in seq.commands().iter().enumerate() {
        while let Some((_, label)) = labels.next_if(|(at, _)| *at == k) {
            snapshot(&mut csv, k, label, &state);
        }
        state.apply(c)?;
    }
    snapshot(&mut csv, seq.len(), "end", &state);
    let mut out = Output::default();
    out.note("robots", zones.len());
    out.note("commands", seq.len());
    out.note("total distance", total_distance(&seq));
    out.note("goals reached", state.cells() == zones.goals());
    out.artifacts.push(Artifact::new("plan.txt", write_plan(&seq).into_bytes()));
    out.artifacts.push(Artifact::new("replay.csv", csv.into_bytes()));
    Ok(out)
}

fn run_open_loop(
    start: &DiscSwarm,
    setup: &SwarmSetup,
    program: &[ControlInput],
    fractions: &[f64],
    stride: usize,
    seed: u64,
) -> Result<Output, CoreError> {
    let mut out = Output::default();
    let mut summary = String::from("friction_fraction,mu_f,cov_excursion\n");
    for (i, &frac) in fractions.iter().enumerate() {
        let mu_f = mu_for_force_fraction(frac)?;
        let params = setup.params(mu_f, seed)?;
        let mut samples = Vec::new();
        let mut frames = Vec::new();
        let mut k = 0usize;
        run_program(start, program, &params, |t, s| {
            samples.push(StatsSample {
                t,
                moments: swarm_stats(s).expect("swarm has two or more discs").moments,
            });
            if stride > 0 && k.is_multiple_of(stride) {
                frames.push((t, s.clone()));
            }
            k += 1;
        })?;
        let (lo, hi) = samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
            (lo.min(s.moments.cov_xy), hi.max(s.moments.cov_xy))
        });
        let _ = writeln!(summary, "{frac},{mu_f:.12},{:.9}", hi - lo);
        out.note(format!("mu_f={mu_f:.4} cov excursion"), format!("{:.3}", hi - lo));
        let mut stats = Vec::new();
        write_stats_csv(&mut stats, &samples).expect("writing to memory");
        out.artifacts.push(Artifact::new(format!("stats_mu{i}.csv"), stats));
        if stride > 0 {
            let mut traj = Vec::new();
            write_trajectory_csv(&mut traj, frames.iter().map(|(t, s)| (*t, s))).expect("writing to memory");
            out.artifacts.push(Artifact::new(format!("trajectory_mu{i}.csv"), traj));
        }
    }
    out.artifacts.push(Artifact::new("excursions.csv", summary.into_bytes()));
    Ok(out)
}

fn run_closed(
    setup: &SwarmSetup,
    starts: &[(String, DiscSwarm)],
    schedule: &[ScheduledGoal],
    duration: f64,
    mu_f: f64,
    seed: u64,
) -> Result<Output, CoreError> {
    let params = setup.params(mu_f, seed)?;
    let mut out = Output::default();
    let mut epochs = String::from("start,epoch_start,epoch_end,goal_cov,reached_at\n");
    for (name, swarm) in starts {
        let cfg = setup.controller(swarm)?;
        let run = run_closed_loop(swarm, schedule, &params, &cfg, duration)?;
        let mut stats = Vec::new();
        write_stats_csv(&mut stats, &run.samples).expect("writing to memory");
        let mut phases = Vec::new();
        write_phase_log_csv(&mut phases, &run.events).expect("writing to memory");
        out.artifacts.push(Artifact::new(format!("stats_{name}.csv"), stats));
        out.artifacts.push(Artifact::new(format!("phases_{name}.csv"), phases));
        let mut reached = Vec::new();
        for e in &run.epochs {
            let at = e.reached_at.map_or(String::from("never"), |t| format!("{t:.6}"));
            let _ = writeln!(epochs, "{name},{},{},{},{at}", e.start, e.end, e.goal.cov());
            reached.push(e.reached_at.map_or("-".into(), |t| format!("{:.1}s", t - e.start)));
        }
        out.note(format!("{name} band reached after"), reached.join(" "));
    }
    out.artifacts.push(Artifact::new("epochs.csv", epochs.into_bytes()));
    Ok(out)
}

pub fn run(p: &Prepared) -> Result<Output, CoreError> {
    match p {
        Prepared::Sweep {
            workspace,
            fills,
            beta_samples,
        } => run_sweep(*workspace, fills, *beta_samples),
        Prepared::TwoRobot(task) => run_two_robot(task),
        Prepared::NRobot(zones) => run_n_robot(zones),
        Prepared::OpenLoop {
            start,
            setup,
            program,
            fractions,
            stride,
            seed,
        } => run_open_loop(start, setup, program, fractions, *stride, *seed),
        Prepared::ClosedLoop {
            setup,
            starts,
            schedule,
            duration,
            mu_f,
            seed,
        } => run_closed(setup, starts, schedule, *duration, *mu_f, *seed),
    }
}

//! Overdamped disc swarm with penalty contacts and Coulomb wall friction.
//!
//! Each disc moves with velocity `mobility * force`. The force is the shared
//! input plus linear springs between overlapping discs. A disc touching a
//! wall cannot move into it; the force along the wall is reduced by
//! [`forward_force`] using the component pressing into the wall as the
//! normal load. Disc-disc contacts are frictionless.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::friction::{forward_force, FrictionParams};
use crate::geometry::{Moments, Point, Rect};
use crate::kinematic::{Wall, Workspace};

/// Largest `dt * mobility * stiffness` per substep. Explicit updates of a
/// hexagonal contact network stay stable below 1/6.
const STABLE_GAIN: f64 = 0.15;

/// Distance from a wall within which a disc counts as touching it.
const WALL_TOL: f64 = 1e-9;

/// Default timestep in seconds.
pub const DEFAULT_DT: f64 = 1.0 / 240.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    dt: f64,
    mobility: f64,
    mu_f: f64,
    stiffness: f64,
    seed: u64,
}

impl SimParams {
    pub fn new(dt: f64, mobility: f64, mu_f: f64, stiffness: f64, seed: u64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Param(format!("timestep {dt} must be > 0")));
        }
        if !(mobility > 0.0 && mobility.is_finite()) {
            return Err(Error::Param(format!("mobility {mobility} must be > 0")));
        }
        if mu_f.is_nan() || mu_f < 0.0 {
            return Err(Error::Param(format!("wall friction {mu_f} must be >= 0")));
        }
        if !(stiffness > 0.0 && stiffness.is_finite()) {
            return Err(Error::Param(format!("contact stiffness {stiffness} must be > 0")));
        }
        Ok(SimParams {
            dt,
            mobility,
            mu_f,
            stiffness,
            seed,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn mobility(&self) -> f64 {
        self.mobility
    }

    pub fn mu_f(&self) -> f64 {
        self.mu_f
    }

    pub fn stiffness(&self) -> f64 {
        self.stiffness
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_mu_f(&self, mu_f: f64) -> Result<Self> {
        SimParams::new(self.dt, self.mobility, mu_f, self.stiffness, self.seed)
    }

    /// Substeps per `dt` needed for a stable explicit contact update.
    pub fn substeps(&self) -> usize {
        (self.dt * self.mobility * self.stiffness / STABLE_GAIN).ceil().max(1.0) as usize
    }
}

/// Shared input: a force of magnitude `force` along `direction`, held for
/// `duration` seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlInput {
    force: f64,
    direction: f64,
    duration: f64,
}

impl ControlInput {
    pub fn new(force: f64, direction: f64, duration: f64) -> Result<Self> {
        if force.is_nan() || force < 0.0 || force.is_infinite() {
            return Err(Error::Param(format!("input force {force} must be finite and >= 0")));
        }
        if !direction.is_finite() {
            return Err(Error::Param(format!("input direction {direction} is not finite")));
        }
        if duration.is_nan() || duration < 0.0 {
            return Err(Error::Param(format!("input duration {duration} must be >= 0")));
        }
        Ok(ControlInput {
            force,
            direction,
            duration,
        })
    }

    pub fn idle(duration: f64) -> Result<Self> {
        ControlInput::new(0.0, 0.0, duration)
    }

    pub fn force(&self) -> f64 {
        self.force
    }

    pub fn direction(&self) -> f64 {
        self.direction
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn vector(&self) -> Point {
        Point::from_angle(self.direction) * self.force
    }
}

/// Equal discs inside a rectangular workspace.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscSwarm {
    positions: Vec<Point>,
    radius: f64,
    workspace: Workspace,
}

impl DiscSwarm {
    /// Overlap allowed between discs when a swarm is built.
    pub const OVERLAP_TOL: f64 = 0.05;

    pub fn new(workspace: Workspace, radius: f64, positions: Vec<Point>) -> Result<Self> {
        let ws = Workspace::new(workspace.width(), workspace.height(), radius)?;
        for (i, p) in positions.iter().enumerate() {
            if !ws.admits(*p) {
                return Err(Error::State(format!(
                    "disc {i} at ({}, {}) is outside the workspace",
                    p.x, p.y
                )));
            }
        }
        let min_gap = 2.0 * radius - Self::OVERLAP_TOL * radius;
        let swarm = DiscSwarm {
            positions,
            radius,
            workspace: ws,
        };
        if let Some(d) = swarm.min_pair_distance() {
            if d < min_gap {
                return Err(Error::State(format!(
                    "discs overlap: center distance {d} below {min_gap}"
                )));
            }
        }
        Ok(swarm)
    }

    /// Hexagonal block of `n` discs centered at `center`, each shifted by up
    /// to `jitter` along both axes.
    pub fn hex_block(
        workspace: Workspace,
        n: usize,
        radius: f64,
        center: Point,
        jitter: f64,
        seed: u64,
    ) -> Result<Self> {
        if !(jitter >= 0.0 && jitter.is_finite()) {
            return Err(Error::Param(format!("jitter {jitter} must be >= 0")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let per_row = (n as f64).sqrt().ceil().max(1.0) as usize;
        let rows = n.div_ceil(per_row);
        let dx = 2.0 * radius + 2.0 * jitter;
        let dy = dx * 3f64.sqrt() / 2.0;
        let width = (per_row as f64 - 0.5) * dx;
        let height = (rows as f64 - 1.0) * dy;
        let origin = center - Point::new(width / 2.0, height / 2.0);
        let positions = (0..n)
            .map(|i| {
                let (r, c) = (i / per_row, i % per_row);
                let shift = if r % 2 == 1 { dx / 2.0 } else { 0.0 };
                let mut p = origin + Point::new(c as f64 * dx + shift, r as f64 * dy);
                if jitter > 0.0 {
                    p = p + Point::new(rng.gen_range(-jitter..jitter), rng.gen_range(-jitter..jitter));
                }
                p
            })
            .collect();
        DiscSwarm::new(workspace, radius, positions)
    }

    /// `n` non-overlapping discs placed uniformly at random in `region`.
    pub fn scattered(workspace: Workspace, n: usize, radius: f64, region: Rect, seed: u64) -> Result<Self> {
        let ws = Workspace::new(workspace.width(), workspace.height(), radius)?;
        let lo = Point::new(region.min.x.max(radius), region.min.y.max(radius));
        let hi = Point::new(
            region.max.x.min(ws.width() - radius),
            region.max.y.min(ws.height() - radius),
        );
        if lo.x >= hi.x || lo.y >= hi.y {
            return Err(Error::Param("scatter region leaves no room for discs".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut positions: Vec<Point> = Vec::with_capacity(n);
        let min_sq = (2.0 * radius).powi(2);
        let mut attempts = 0usize;
        while positions.len() < n {
            attempts += 1;
            if attempts > 10_000 * n.max(1) {
                return Err(Error::Param(format!(
                    "could not scatter {n} discs in the region"
                )));
            }
            let p = Point::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
            if positions.iter().all(|q| {
                let d = *q - p;
                d.dot(d) >= min_sq
            }) {
                positions.push(p);
            }
        }
        DiscSwarm::new(ws, radius, positions)
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn workspace(&self) -> &Workspace {
        &self.workspace
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn center(&self) -> Point {
        Point::new(self.workspace.width() / 2.0, self.workspace.height() / 2.0)
    }

    /// Smallest center distance over all pairs.
    pub fn min_pair_distance(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        let grid = CellGrid::build(self);
        grid.for_each_pair(|i, j| {
            let d = (self.positions[i] - self.positions[j]).norm();
            best = Some(best.map_or(d, |b| b.min(d)));
        });
        // pairs further apart than a grid cell are never closest unless
        // there are fewer than two discs per neighborhood
        if best.is_none() && self.positions.len() >= 2 {
            for i in 0..self.positions.len() {
                for j in i + 1..self.positions.len() {
                    let d = (self.positions[i] - self.positions[j]).norm();
                    best = Some(best.map_or(d, |b| b.min(d)));
                }
            }
        }
        best
    }

    /// Largest overlap between two discs, as a fraction of the radius.
    pub fn max_overlap(&self) -> f64 {
        let mut worst = 0.0_f64;
        let grid = CellGrid::build(self);
        grid.for_each_pair(|i, j| {
            let d = (self.positions[i] - self.positions[j]).norm();
            worst = worst.max(2.0 * self.radius - d);
        });
        worst / self.radius
    }

    /// Walls each disc touches.
    pub fn wall_contacts(&self, i: usize) -> impl Iterator<Item = Wall> + '_ {
        let p = self.positions[i];
        let (lo, hi) = (self.workspace.center_min(), self.workspace.center_max());
        Wall::ALL.into_iter().filter(move |w| match w {
            Wall::Left => p.x - lo.x <= WALL_TOL,
            Wall::Right => hi.x - p.x <= WALL_TOL,
            Wall::Bottom => p.y - lo.y <= WALL_TOL,
            Wall::Top => hi.y - p.y <= WALL_TOL,
        })
    }
}

/// Uniform grid with cells one disc diameter wide; only discs in the same
/// or adjacent cells can touch.
struct CellGrid {
    cols: usize,
    rows: usize,
    size: f64,
    start: Vec<usize>,
    items: Vec<usize>,
}

impl CellGrid {
    fn build(swarm: &DiscSwarm) -> Self {
        CellGrid::with_cell(swarm, 2.0 * swarm.radius)
    }

    fn with_cell(swarm: &DiscSwarm, size: f64) -> Self {
        let size = size.max(f64::MIN_POSITIVE);
        let cols = ((swarm.workspace.width() / size).ceil() as usize).max(1);
        let rows = ((swarm.workspace.height() / size).ceil() as usize).max(1);
        let mut grid = CellGrid {
            cols,
            rows,
            size,
            start: vec![0; cols * rows + 1],
            items: vec![0; swarm.positions.len()],
        };
        let cells: Vec<usize> = swarm.positions.iter().map(|p| grid.cell_of(*p)).collect();
        for &c in &cells {
            grid.start[c + 1] += 1;
        }
        for c in 0..cols * rows {
            grid.start[c + 1] += grid.start[c];
        }
        let mut fill = grid.start.clone();
        for (i, &c) in cells.iter().enumerate() {
            grid.items[fill[c]] = i;
            fill[c] += 1;
        }
        grid
    }

    fn cell_of(&self, p: Point) -> usize {
        let cx = ((p.x / self.size).floor().max(0.0) as usize).min(self.cols - 1);
        let cy = ((p.y / self.size).floor().max(0.0) as usize).min(self.rows - 1);
        cy * self.cols + cx
    }

    fn cell(&self, cx: usize, cy: usize) -> &[usize] {
        let c = cy * self.cols + cx;
        &self.items[self.start[c]..self.start[c + 1]]
    }

    /// Calls `f(i, j)` once for every pair of discs in the same or
    /// neighboring cells, in a fixed order.
    fn for_each_pair(&self, mut f: impl FnMut(usize, usize)) {
        const HALF: [(isize, isize); 4] = [(1, 0), (-1, 1), (0, 1), (1, 1)];
        for cy in 0..self.rows {
            for cx in 0..self.cols {
                let here = self.cell(cx, cy);
                for (a, &i) in here.iter().enumerate() {
                    for &j in &here[a + 1..] {
                        f(i, j);
                    }
                }
                for (ox, oy) in HALF {
                    let (nx, ny) = (cx as isize + ox, cy as isize + oy);
                    if nx < 0 || ny < 0 || nx as usize >= self.cols || ny as usize >= self.rows {
                        continue;
                    }
                    let there = self.cell(nx as usize, ny as usize);
                    for &i in here {
                        for &j in there {
                            f(i, j);
                        }
                    }
                }
            }
        }
    }
}

fn wall_reaction(f: Point, wall: Wall, friction: FrictionParams) -> Point {
    let n_in = wall.inward_normal();
    let press = -f.dot(n_in);
    if press <= 0.0 {
        return f;
    }
    let tangential = f + n_in * press;
    let drive = tangential.norm();
    if drive == 0.0 {
        return Point::new(0.0, 0.0);
    }
    let theta = drive.atan2(press);
    let forward = forward_force(press.hypot(drive), theta, friction)
        .expect("force magnitude and angle are finite");
    tangential * (forward / drive)
}

/// Candidate contact pairs within `2r + skin`, valid until some disc has
/// moved more than `skin / 2` since the list was built.
struct NeighborList {
    pairs: Vec<(usize, usize)>,
    anchor: Vec<Point>,
    skin: f64,
}

impl NeighborList {
    fn build(swarm: &DiscSwarm) -> Self {
        let skin = 0.5 * swarm.radius;
        let reach = 2.0 * swarm.radius + skin;
        let grid = CellGrid::with_cell(swarm, reach);
        let pos = &swarm.positions;
        let mut pairs = Vec::new();
        grid.for_each_pair(|i, j| {
            let d = pos[i] - pos[j];
            if d.dot(d) < reach * reach {
                pairs.push((i, j));
            }
        });
        NeighborList {
            pairs,
            anchor: pos.clone(),
            skin,
        }
    }

    fn stale(&self, positions: &[Point]) -> bool {
        let limit = (0.5 * self.skin).powi(2);
        positions.iter().zip(&self.anchor).any(|(p, a)| {
            let d = *p - *a;
            d.dot(d) > limit
        })
    }
}

fn substep(
    swarm: &mut DiscSwarm,
    list: &NeighborList,
    forces: &mut [Point],
    push: Point,
    params: &SimParams,
    friction: FrictionParams,
    h: f64,
) {
    forces.fill(push);
    let r2 = 2.0 * swarm.radius;
    let k = params.stiffness;
    let pos = &swarm.positions;
    for &(i, j) in &list.pairs {
        let d = pos[i] - pos[j];
        let dist_sq = d.dot(d);
        if dist_sq >= r2 * r2 {
            continue;
        }
        let dist = dist_sq.sqrt();
        let normal = if dist > 0.0 {
            d * (1.0 / dist)
        } else {
            Point::new(1.0, 0.0)
        };
        let f = normal * (k * (r2 - dist));
        forces[i] = forces[i] + f;
        forces[j] = forces[j] - f;
    }
    let (lo, hi) = (swarm.workspace.center_min(), swarm.workspace.center_max());
    let gain = params.mobility * h;
    for (p, &f) in swarm.positions.iter_mut().zip(forces.iter()) {
        let mut f = f;
        for w in Wall::ALL {
            let touching = match w {
                Wall::Left => p.x - lo.x <= WALL_TOL,
                Wall::Right => hi.x - p.x <= WALL_TOL,
                Wall::Bottom => p.y - lo.y <= WALL_TOL,
                Wall::Top => hi.y - p.y <= WALL_TOL,
            };
            if touching {
                f = wall_reaction(f, w, friction);
            }
        }
        let q = *p + f * gain;
        *p = Point::new(q.x.clamp(lo.x, hi.x), q.y.clamp(lo.y, hi.y));
    }
}

/// Advances the swarm by one timestep `params.dt()` under input `u`.
pub fn step(swarm: &DiscSwarm, u: &ControlInput, params: &SimParams) -> Result<DiscSwarm> {
    let mut next = swarm.clone();
    step_in_place(&mut next, u, params)?;
    Ok(next)
}

fn step_in_place(swarm: &mut DiscSwarm, u: &ControlInput, params: &SimParams) -> Result<()> {
    let friction = FrictionParams::new(params.mu_f).map_err(|e| Error::Param(e.to_string()))?;
    let subs = params.substeps();
    let h = params.dt / subs as f64;
    let push = u.vector();
    let mut forces = vec![push; swarm.positions.len()];
    let mut list = NeighborList::build(swarm);
    for _ in 0..subs {
        if list.stale(&swarm.positions) {
            list = NeighborList::build(swarm);
        }
        substep(swarm, &list, &mut forces, push, params, friction, h);
    }
    Ok(())
}

/// Population statistics of the disc centers and whether the correlation
/// is undefined because a variance vanished.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleMoments {
    pub moments: Moments,
    pub degenerate: bool,
}

/// Mean, variances and covariance of the disc centers with divisor `n`.
pub fn sample_moments(points: &[Point]) -> Result<SampleMoments> {
    if points.len() < 2 {
        return Err(Error::Stats(format!(
            "need at least two points, got {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mean = points.iter().fold(Point::new(0.0, 0.0), |a, p| a + *p) * (1.0 / n);
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for p in points {
        let d = *p - mean;
        sxx += d.x * d.x;
        syy += d.y * d.y;
        sxy += d.x * d.y;
    }
    let (vx, vy, c) = (sxx / n, syy / n, sxy / n);
    Ok(SampleMoments {
        moments: Moments::from_covariance(mean, vx, vy, c),
        degenerate: vx <= 0.0 || vy <= 0.0,
    })
}

pub fn swarm_stats(swarm: &DiscSwarm) -> Result<SampleMoments> {
    sample_moments(&swarm.positions)
}

/// Statistics at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatsSample {
    pub t: f64,
    pub moments: Moments,
}

/// Statistics over time for one wall-friction level.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenLoopTrace {
    pub mu_f: f64,
    pub samples: Vec<StatsSample>,
    pub final_swarm: DiscSwarm,
}

impl OpenLoopTrace {
    /// Largest minus smallest covariance over the trace.
    pub fn covariance_excursion(&self) -> f64 {
        let (lo, hi) = self
            .samples
            .iter()
            .map(|s| s.moments.cov_xy)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| (lo.min(c), hi.max(c)));
        hi - lo
    }
}

/// Number of whole timesteps that cover `duration`.
pub fn steps_for(duration: f64, dt: f64) -> usize {
    (duration / dt - 1e-9).ceil().max(0.0) as usize
}

/// Runs `program` from `initial`, calling `observe` after every step with
/// the elapsed time.
pub fn run_program(
    initial: &DiscSwarm,
    program: &[ControlInput],
    params: &SimParams,
    mut observe: impl FnMut(f64, &DiscSwarm),
) -> Result<DiscSwarm> {
    let mut swarm = initial.clone();
    let mut t = 0.0;
    observe(t, &swarm);
    let mut steps = 0usize;
    for u in program {
        for _ in 0..steps_for(u.duration(), params.dt) {
            step_in_place(&mut swarm, u, params)?;
            steps += 1;
            t = steps as f64 * params.dt;
            observe(t, &swarm);
        }
    }
    Ok(swarm)
}

/// Runs the same program from the same start once per friction level.
pub fn run_open_loop(
    initial: &DiscSwarm,
    program: &[ControlInput],
    params: &SimParams,
    sweep: &[f64],
) -> Result<Vec<OpenLoopTrace>> {
    if initial.len() < 2 {
        return Err(Error::Stats("open-loop statistics need two or more discs".into()));
    }
    sweep
        .par_iter()
        .map(|&mu_f| {
            let p = params.with_mu_f(mu_f)?;
            let mut samples = Vec::new();
            let final_swarm = run_program(initial, program, &p, |t, s| {
                let m = swarm_stats(s).expect("swarm has two or more discs");
                samples.push(StatsSample { t, moments: m.moments });
            })?;
            Ok(OpenLoopTrace {
                mu_f,
                samples,
                final_swarm,
            })
        })
        .collect()
}

/// Writes `t,robot_id,x,y` rows.
pub fn write_trajectory_csv<'a, W: Write>(
    mut out: W,
    frames: impl IntoIterator<Item = (f64, &'a DiscSwarm)>,
) -> io::Result<()> {
    writeln!(out, "t,robot_id,x,y")?;
    for (t, swarm) in frames {
        for (i, p) in swarm.positions.iter().enumerate() {
            writeln!(out, "{t:.6},{i},{:.9},{:.9}", p.x, p.y)?;
        }
    }
    Ok(())
}

/// Writes `t,mean_x,mean_y,var_x,var_y,cov_xy,corr` rows.
pub fn write_stats_csv<W: Write>(mut out: W, samples: &[StatsSample]) -> io::Result<()> {
    writeln!(out, "t,mean_x,mean_y,var_x,var_y,cov_xy,corr")?;
    for s in samples {
        let m = &s.moments;
        writeln!(
            out,
            "{:.6},{:.9},{:.9},{:.9},{:.9},{:.9},{:.9}",
            s.t, m.mean_x, m.mean_y, m.var_x, m.var_y, m.cov_xy, m.corr
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn ws() -> Workspace {
        Workspace::new(100.0, 100.0, 0.0).unwrap()
    }

    fn params(mu: f64) -> SimParams {
        SimParams::new(DEFAULT_DT, 10.0, mu, 200.0, 1).unwrap()
    }

    #[test]
    fn no_force_no_motion() {
        let s = DiscSwarm::new(ws(), 1.0, vec![Point::new(10.0, 10.0), Point::new(20.0, 10.0)]).unwrap();
        let u = ControlInput::idle(1.0).unwrap();
        assert_eq!(step(&s, &u, &params(0.5)).unwrap(), s);
    }

    #[test]
    fn free_disc_moves_by_mobility_times_force() {
        let s = DiscSwarm::new(ws(), 1.0, vec![Point::new(10.0, 10.0)]).unwrap();
        let u = ControlInput::new(2.0, 0.0, 1.0).unwrap();
        let p = params(0.0);
        let next = step(&s, &u, &p).unwrap();
        let expect = 10.0 + p.dt() * p.mobility() * 2.0;
        assert!((next.positions()[0].x - expect).abs() < 1e-12);
        assert_eq!(next.positions()[0].y, 10.0);
    }

    #[test]
    fn wall_friction_slows_sliding() {
        let s = DiscSwarm::new(ws(), 1.0, vec![Point::new(50.0, 1.0), Point::new(50.0, 50.0)]).unwrap();
        let u = ControlInput::new(1.0, -FRAC_PI_4, 1.0).unwrap();
        let p = params(0.5);
        let next = step(&s, &u, &p).unwrap();
        let on_wall = next.positions()[0].x - 50.0;
        let free = next.positions()[1].x - 50.0;
        let expect = p.dt() * p.mobility() * forward_force(1.0, FRAC_PI_4, FrictionParams::new(0.5).unwrap()).unwrap();
        assert!((on_wall - expect).abs() < 1e-12);
        assert!(on_wall < free);
        assert_eq!(next.positions()[0].y, 1.0);
    }

    #[test]
    fn corner_disc_is_held() {
        let s = DiscSwarm::new(ws(), 1.0, vec![Point::new(1.0, 1.0)]).unwrap();
        let u = ControlInput::new(1.0, -3.0 * FRAC_PI_4, 1.0).unwrap();
        assert_eq!(step(&s, &u, &params(0.0)).unwrap(), s);
    }

    #[test]
    fn single_disc_follows_closed_form_line() {
        let s = DiscSwarm::new(ws(), 1.0, vec![Point::new(30.0, 30.0)]).unwrap();
        let u = ControlInput::new(1.5, 0.3, 0.5).unwrap();
        let p = params(0.2);
        let end = run_program(&s, &[u], &p, |_, _| {}).unwrap();
        let steps = steps_for(0.5, p.dt()) as f64;
        let expect = Point::new(30.0, 30.0) + u.vector() * (p.mobility() * p.dt() * steps);
        assert!((end.positions()[0] - expect).norm() < 1e-9);
    }

    #[test]
    fn settled_pile_overlap_is_small() {
        let w = Workspace::new(60.0, 60.0, 0.0).unwrap();
        let s = DiscSwarm::hex_block(w, 64, 1.0, Point::new(30.0, 30.0), 0.1, 3).unwrap();
        let down = ControlInput::new(1.0, -std::f64::consts::FRAC_PI_2, 8.0).unwrap();
        let p = SimParams::new(DEFAULT_DT, 10.0, 1.0, 250.0, 3).unwrap();
        let end = run_program(&s, &[down], &p, |_, _| {}).unwrap();
        assert!(end.max_overlap() <= 0.05, "{}", end.max_overlap());
        let m = swarm_stats(&end).unwrap().moments;
        assert!(m.mean_y < 10.0);
    }

    #[test]
    fn sample_statistics() {
        let corners = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        let s = sample_moments(&corners).unwrap();
        assert_eq!(s.moments.var_x, 0.25);
        assert_eq!(s.moments.var_y, 0.25);
        assert_eq!(s.moments.cov_xy, 0.0);
        assert!(!s.degenerate);
        let same = sample_moments(&[Point::new(2.0, 2.0); 3]).unwrap();
        assert!(same.degenerate && same.moments.corr == 0.0 && same.moments.var_x == 0.0);
        assert!(matches!(sample_moments(&corners[..1]), Err(Error::Stats(_))));
    }

    #[test]
    fn frictionless_mean_moves_at_drive_speed() {
        let w = Workspace::new(200.0, 200.0, 0.0).unwrap();
        let s = DiscSwarm::hex_block(w, 49, 1.0, Point::new(60.0, 100.0), 0.2, 9).unwrap();
        let u = ControlInput::new(1.0, 0.2, 2.0).unwrap();
        let p = params(0.0);
        let before = swarm_stats(&s).unwrap().moments.mean();
        let end = run_program(&s, &[u], &p, |_, _| {}).unwrap();
        let after = swarm_stats(&end).unwrap().moments.mean();
        let t = steps_for(2.0, p.dt()) as f64 * p.dt();
        assert!(((after - before) - u.vector() * (p.mobility() * t)).norm() < 1e-6);
    }

    #[test]
    fn deterministic_replay() {
        let w = Workspace::new(40.0, 40.0, 0.0).unwrap();
        let s = DiscSwarm::scattered(w, 30, 1.0, Rect::new(Point::new(0.0, 0.0), Point::new(40.0, 40.0)).unwrap(), 5).unwrap();
        let prog = [
            ControlInput::new(1.0, -2.0, 1.0).unwrap(),
            ControlInput::new(1.0, -0.7, 1.0).unwrap(),
        ];
        let a = run_program(&s, &prog, &params(0.9), |_, _| {}).unwrap();
        let b = run_program(&s, &prog, &params(0.9), |_, _| {}).unwrap();
        assert_eq!(a, b);
        for p in a.positions() {
            assert!((1.0..=39.0).contains(&p.x) && (1.0..=39.0).contains(&p.y));
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SimParams::new(0.0, 1.0, 0.0, 1.0, 0).is_err());
        assert!(SimParams::new(0.1, -1.0, 0.0, 1.0, 0).is_err());
        assert!(SimParams::new(0.1, 1.0, -0.1, 1.0, 0).is_err());
        assert!(ControlInput::new(-1.0, 0.0, 1.0).is_err());
        assert!(DiscSwarm::new(ws(), 1.0, vec![Point::new(5.0, 5.0), Point::new(5.5, 5.0)]).is_err());
        assert!(DiscSwarm::new(ws(), 1.0, vec![Point::new(0.5, 5.0)]).is_err());
    }

    #[test]
    fn csv_exports() {
        let s = DiscSwarm::new(ws(), 1.0, vec![Point::new(10.0, 10.0), Point::new(20.0, 30.0)]).unwrap();
        let mut traj = Vec::new();
        write_trajectory_csv(&mut traj, [(0.0, &s)]).unwrap();
        let text = String::from_utf8(traj).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("t,robot_id,x,y\n0.000000,0,10.000000000,10.000000000"));
        let mut stats = Vec::new();
        let m = swarm_stats(&s).unwrap().moments;
        write_stats_csv(&mut stats, &[StatsSample { t: 0.5, moments: m }]).unwrap();
        let text = String::from_utf8(stats).unwrap();
        assert!(text.starts_with("t,mean_x,mean_y,var_x,var_y,cov_xy,corr\n0.500000,15.0"));
    }
}

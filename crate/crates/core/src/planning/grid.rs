//! Assembly of `n` unit-square robots on an integer grid.
//!
//! Robots occupy cells and every command is an axis-aligned move of a whole
//! number of cells, executed one cell at a time. In each unit step:
//!
//! * a robot touching a wall parallel to the move is held by friction,
//! * a robot cannot move into a wall,
//! * a robot whose next cell holds a robot that cannot move is blocked too.
//!
//! Robots wait in a staging zone and are delivered one at a time to goals in
//! a build zone above it. Robot `k` is carried to the floor, drifted left
//! along the floor to the left wall, drifted up the left wall to its goal
//! row and slid right into place, while every other robot ends the loop
//! where it started.

use crate::error::{Error, Result};
use crate::kinematic::{MoveCommand, MoveSequence};

pub type Cell = (i64, i64);

/// Inclusive rectangle of cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridRect {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl GridRect {
    pub fn new(x0: i64, y0: i64, x1: i64, y1: i64) -> Result<Self> {
        if x1 < x0 || y1 < y0 {
            return Err(Error::Zone(format!(
                "empty rectangle [{x0}, {x1}] x [{y0}, {y1}]"
            )));
        }
        Ok(GridRect { x0, y0, x1, y1 })
    }

    pub fn contains(&self, (x, y): Cell) -> bool {
        (self.x0..=self.x1).contains(&x) && (self.y0..=self.y1).contains(&y)
    }
}

/// Grid workspace, zones, clearance and the start and goal of every robot.
///
/// Goals are filled in order: right to left by column and top to bottom
/// within a column. Starts are taken bottom row first, one robot per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Zones {
    width: i64,
    height: i64,
    build: GridRect,
    staging: GridRect,
    eps: i64,
    starts: Vec<Cell>,
    goals: Vec<Cell>,
}

impl Zones {
    pub fn new(
        width: i64,
        height: i64,
        build: GridRect,
        staging: GridRect,
        eps: i64,
        starts: Vec<Cell>,
        goals: Vec<Cell>,
    ) -> Result<Self> {
        let zone = |msg: String| Err(Error::Zone(msg));
        if eps < 1 {
            return zone(format!("clearance {eps} must be at least 1"));
        }
        if staging.y1 >= build.y0 {
            return zone("build zone must lie above the staging zone".into());
        }
        if staging.y0 < eps {
            return zone(format!("staging zone needs {eps} free rows below it"));
        }
        if build.y1 > height - 1 - eps {
            return zone(format!("build zone needs {eps} free rows above it"));
        }
        if build.x0 < eps + 1 || staging.x0 < eps + 1 {
            return zone(format!("zones need {} free columns to their left", eps + 1));
        }
        if build.x1 > width - 2 || staging.x1 > width - 2 {
            return zone("zones need one free column to their right".into());
        }
        if starts.is_empty() || starts.len() != goals.len() {
            return zone(format!(
                "{} starts for {} goals",
                starts.len(),
                goals.len()
            ));
        }
        if let Some(s) = starts.iter().find(|s| !staging.contains(**s)) {
            return zone(format!("start {s:?} is outside the staging zone"));
        }
        if let Some(g) = goals.iter().find(|g| !build.contains(**g)) {
            return zone(format!("goal {g:?} is outside the build zone"));
        }
        if starts.windows(2).any(|w| w[1].1 <= w[0].1) {
            return zone("starts must sit in distinct rows, listed bottom to top".into());
        }
        if goals
            .windows(2)
            .any(|w| w[1].0 > w[0].0 || (w[1].0 == w[0].0 && w[1].1 >= w[0].1))
        {
            return zone("goals must be listed right to left, top to bottom".into());
        }
        let max_goal_x = goals.iter().map(|g| g.0).max().expect("nonempty");
        if starts.iter().any(|s| s.0 < max_goal_x) {
            return zone("every start must be at or right of the rightmost goal".into());
        }
        Ok(Zones {
            width,
            height,
            build,
            staging,
            eps,
            starts,
            goals,
        })
    }

    pub fn width(&self) -> i64 {
        self.width
    }

    pub fn height(&self) -> i64 {
        self.height
    }

    pub fn build(&self) -> GridRect {
        self.build
    }

    pub fn staging(&self) -> GridRect {
        self.staging
    }

    pub fn eps(&self) -> i64 {
        self.eps
    }

    pub fn starts(&self) -> &[Cell] {
        &self.starts
    }

    pub fn goals(&self) -> &[Cell] {
        &self.goals
    }

    pub fn len(&self) -> usize {
        self.starts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.starts.is_empty()
    }

    /// Same layout with a different clearance.
    pub fn with_eps(&self, eps: i64) -> Result<Self> {
        Zones::new(
            self.width,
            self.height,
            self.build,
            self.staging,
            eps,
            self.starts.clone(),
            self.goals.clone(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dir {
    Left,
    Right,
    Down,
    Up,
}

impl Dir {
    fn delta(self) -> Cell {
        match self {
            Dir::Left => (-1, 0),
            Dir::Right => (1, 0),
            Dir::Down => (0, -1),
            Dir::Up => (0, 1),
        }
    }
}

/// Robot cells on a `width x height` grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridState {
    width: i64,
    height: i64,
    cells: Vec<Cell>,
    occupancy: Vec<Option<u32>>,
}

impl GridState {
    pub fn new(width: i64, height: i64, cells: Vec<Cell>) -> Result<Self> {
        if width < 1 || height < 1 {
            return Err(Error::State(format!("grid {width} x {height} is empty")));
        }
        let mut occupancy = vec![None; (width * height) as usize];
        for (i, &(x, y)) in cells.iter().enumerate() {
            if !(0..width).contains(&x) || !(0..height).contains(&y) {
                return Err(Error::State(format!("robot {i} at ({x}, {y}) is off the grid")));
            }
            let slot = &mut occupancy[(y * width + x) as usize];
            if slot.is_some() {
                return Err(Error::State(format!("two robots share cell ({x}, {y})")));
            }
            *slot = Some(i as u32);
        }
        Ok(GridState {
            width,
            height,
            cells,
            occupancy,
        })
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    fn index(&self, (x, y): Cell) -> usize {
        (y * self.width + x) as usize
    }

    fn in_bounds(&self, (x, y): Cell) -> bool {
        (0..self.width).contains(&x) && (0..self.height).contains(&y)
    }

    fn held(&self, (x, y): Cell, dir: Dir) -> bool {
        match dir {
            Dir::Left | Dir::Right => y == 0 || y == self.height - 1,
            Dir::Up | Dir::Down => x == 0 || x == self.width - 1,
        }
    }

    fn step(&mut self, dir: Dir) {
        let (dx, dy) = dir.delta();
        let mut order: Vec<usize> = (0..self.cells.len()).collect();
        // robots furthest along the move go first so each knows whether
        // the robot ahead of it is moving
        order.sort_by_key(|&i| -(self.cells[i].0 * dx + self.cells[i].1 * dy));
        let mut moves = vec![false; self.cells.len()];
        for &i in &order {
            let c = self.cells[i];
            let next = (c.0 + dx, c.1 + dy);
            moves[i] = !self.held(c, dir)
                && self.in_bounds(next)
                && match self.occupancy[self.index(next)] {
                    Some(j) => moves[j as usize],
                    None => true,
                };
        }
        for &i in &order {
            if moves[i] {
                let c = self.cells[i];
                let next = (c.0 + dx, c.1 + dy);
                let (from, to) = (self.index(c), self.index(next));
                if self.occupancy[from] == Some(i as u32) {
                    self.occupancy[from] = None;
                }
                self.occupancy[to] = Some(i as u32);
                self.cells[i] = next;
            }
        }
    }

    /// Applies one axis-aligned command of a whole number of cells.
    pub fn apply(&mut self, m: MoveCommand) -> Result<()> {
        let d = m.displacement();
        let whole = |v: f64| v.fract() == 0.0 && v.abs() < 1e9;
        if !(whole(d.x) && whole(d.y)) || (d.x != 0.0 && d.y != 0.0) {
            return Err(Error::Domain(format!(
                "grid moves must be axis-aligned whole cells, got ({}, {})",
                d.x, d.y
            )));
        }
        let (dir, n) = if d.x > 0.0 {
            (Dir::Right, d.x)
        } else if d.x < 0.0 {
            (Dir::Left, -d.x)
        } else if d.y > 0.0 {
            (Dir::Up, d.y)
        } else {
            (Dir::Down, -d.y)
        };
        for _ in 0..n as i64 {
            self.step(dir);
        }
        Ok(())
    }
}

/// Replays a plan in the grid simulator.
pub fn grid_replay(start: &GridState, seq: &MoveSequence) -> Result<GridState> {
    let mut state = start.clone();
    for m in seq.commands() {
        state.apply(*m)?;
    }
    Ok(state)
}

/// Sum of command magnitudes.
pub fn total_distance(seq: &MoveSequence) -> f64 {
    seq.commands().iter().map(|c| c.length()).sum()
}

struct Assembler<'a> {
    zones: &'a Zones,
    state: GridState,
    seq: MoveSequence,
}

impl Assembler<'_> {
    fn push(&mut self, dx: i64, dy: i64) -> Result<()> {
        if dx == 0 && dy == 0 {
            return Ok(());
        }
        let m = MoveCommand::new(dx as f64, dy as f64)?;
        self.state.apply(m)?;
        self.seq.push(m);
        Ok(())
    }

    fn at(&self, k: usize) -> Cell {
        self.state.cells[k]
    }

    fn top_of_others(&self, k: usize) -> i64 {
        self.state
            .cells
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, c)| c.1)
            .max()
            .unwrap_or(0)
    }

    fn deliver(&mut self, k: usize) -> Result<()> {
        let eps = self.zones.eps;
        let goal = self.zones.goals[k];
        let lifted = self.at(k).1;

        self.seq.annotate(format!("robot {}: to floor", k + 1));
        self.push(0, -lifted)?;

        self.seq.annotate(format!("robot {}: drift left", k + 1));
        while self.at(k).0 > 1 {
            let b = eps.min(self.at(k).0 - 1);
            self.push(0, 1)?;
            self.push(-b, 0)?;
            self.push(0, -1)?;
            self.push(b, 0)?;
        }

        self.seq.annotate(format!("robot {}: onto left wall", k + 1));
        self.push(0, 1)?;
        self.push(-1, 0)?;
        self.push(0, -1)?;
        if self.at(k) != (0, 1) {
            return Err(Error::Zone(format!(
                "robot {} did not reach the left wall",
                k + 1
            )));
        }

        // every cycle lifts robot k by `b` and the others by `b - a`; the
        // others must regain the rows they lost on the way to the floor
        // by the time robot k reaches its goal row
        self.seq.annotate(format!("robot {}: drift up", k + 1));
        let mut climb = goal.1 - 1;
        let mut owed = lifted;
        while climb > 0 {
            let b = eps
                .min(climb)
                .min(self.zones.height - 2 - self.top_of_others(k));
            if b < 1 {
                return Err(Error::Zone("no headroom to drift up".into()));
            }
            let regain = (owed - (climb - b)).max(0);
            self.push(1, 0)?;
            self.push(0, b)?;
            self.push(-1, 0)?;
            self.push(0, -(b - regain))?;
            climb -= b;
            owed -= regain;
        }

        self.seq.annotate(format!("robot {}: place", k + 1));
        self.push(-(goal.0 - 1), 0)?;
        self.push(goal.0, 0)?;
        Ok(())
    }

    fn check_invariant(&self, k: usize) -> Result<()> {
        let z = self.zones;
        for i in 0..z.len() {
            let expect = if i <= k { z.goals[i] } else { z.starts[i] };
            if self.state.cells[i] != expect {
                return Err(Error::Zone(format!(
                    "after delivering robot {} robot {} is at {:?}, expected {:?}",
                    k + 1,
                    i + 1,
                    self.state.cells[i],
                    expect
                )));
            }
        }
        Ok(())
    }
}

/// Plan that moves robot `k` from `starts[k]` to `goals[k]` for all `k`,
/// verified by replay in the grid simulator.
pub fn arrange_n_robots(zones: &Zones) -> Result<MoveSequence> {
    let state = GridState::new(zones.width, zones.height, zones.starts.clone())?;
    let mut asm = Assembler {
        zones,
        state,
        seq: MoveSequence::new(),
    };
    for k in 0..zones.len() {
        asm.deliver(k)?;
        asm.check_invariant(k)?;
    }
    let start = GridState::new(zones.width, zones.height, zones.starts.clone())?;
    if grid_replay(&start, &asm.seq)?.cells() != zones.goals() {
        return Err(Error::Zone("replay does not reproduce the goals".into()));
    }
    Ok(asm.seq)
}

/// Random goal shape and matching staging layout for `n` robots.
///
/// The build zone is a near-square block whose cells are kept with
/// probability `fill`; starts form a diagonal staircase to its lower right.
pub fn random_zones(n: usize, eps: i64, fill: f64, seed: u64) -> Result<Zones> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    if n == 0 {
        return Err(Error::Zone("need at least one robot".into()));
    }
    if !(fill > 0.0 && fill <= 1.0) {
        return Err(Error::Zone(format!("fill fraction {fill} outside (0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells_needed = (n as f64 / fill).ceil() as i64;
    let side = (cells_needed as f64).sqrt().ceil() as i64;
    let x0 = eps + 1;
    let staging_y0 = eps;
    let staging_y1 = staging_y0 + n as i64 - 1;
    let build = GridRect::new(x0, staging_y1 + 1, x0 + side - 1, staging_y1 + side)?;
    let mut cells: Vec<Cell> = (build.x0..=build.x1)
        .flat_map(|x| (build.y0..=build.y1).map(move |y| (x, y)))
        .collect();
    cells.shuffle(&mut rng);
    let mut goals: Vec<Cell> = cells.into_iter().take(n).collect();
    goals.sort_by_key(|&(x, y)| (-x, -y));
    let sx0 = build.x1;
    let staging = GridRect::new(sx0, staging_y0, sx0 + n as i64 - 1, staging_y1)?;
    let starts = (0..n as i64).map(|i| (sx0 + i, staging_y0 + i)).collect();
    Zones::new(
        staging.x1 + 2,
        build.y1 + eps + 1,
        build,
        staging,
        eps,
        starts,
        goals,
    )
}

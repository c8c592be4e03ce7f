//! Exact kinematic simulator for robots under a shared displacement command
//! in a rectangular workspace whose walls hold touching robots in place.
//!
//! Every robot receives the same command. A robot touching a wall moves
//! only if the command pulls it away from every wall it touches; otherwise
//! friction pins it. A moving robot follows the command in a straight line
//! and stops at the first wall it hits. Robots do not collide with each
//! other.

use std::fmt;

use crate::error::{Error, Result};
use crate::friction::FrictionParams;
use crate::geometry::Point;

/// Distance from a wall within which a robot counts as touching it.
pub const CONTACT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Wall {
    Left,
    Right,
    Bottom,
    Top,
}

impl Wall {
    pub const ALL: [Wall; 4] = [Wall::Left, Wall::Right, Wall::Bottom, Wall::Top];

    fn bit(self) -> u8 {
        match self {
            Wall::Left => 1,
            Wall::Right => 2,
            Wall::Bottom => 4,
            Wall::Top => 8,
        }
    }

    /// Unit vector pointing from the wall into the workspace.
    pub fn inward_normal(self) -> Point {
        match self {
            Wall::Left => Point::new(1.0, 0.0),
            Wall::Right => Point::new(-1.0, 0.0),
            Wall::Bottom => Point::new(0.0, 1.0),
            Wall::Top => Point::new(0.0, -1.0),
        }
    }
}

impl fmt::Display for Wall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Wall::Left => "left",
            Wall::Right => "right",
            Wall::Bottom => "bottom",
            Wall::Top => "top",
        };
        f.write_str(name)
    }
}

/// Set of walls a robot touches.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct WallSet(u8);

impl WallSet {
    pub fn empty() -> Self {
        WallSet(0)
    }

    pub fn insert(&mut self, wall: Wall) {
        self.0 |= wall.bit();
    }

    pub fn contains(&self, wall: Wall) -> bool {
        self.0 & wall.bit() != 0
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = Wall> + '_ {
        Wall::ALL.into_iter().filter(|w| self.contains(*w))
    }
}

impl FromIterator<Wall> for WallSet {
    fn from_iter<I: IntoIterator<Item = Wall>>(iter: I) -> Self {
        let mut set = WallSet::empty();
        for w in iter {
            set.insert(w);
        }
        set
    }
}

/// Rectangular workspace `[0, width] x [0, height]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Workspace {
    width: f64,
    height: f64,
    wall_friction: FrictionParams,
    robot_radius: f64,
}

impl Workspace {
    pub fn new(width: f64, height: f64, robot_radius: f64) -> Result<Self> {
        if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
            return Err(Error::Domain(format!(
                "workspace {width} x {height} must have positive finite sides"
            )));
        }
        if !(robot_radius >= 0.0 && robot_radius < width.min(height) / 2.0) {
            return Err(Error::Domain(format!(
                "robot radius {robot_radius} must be in [0, {})",
                width.min(height) / 2.0
            )));
        }
        Ok(Workspace {
            width,
            height,
            wall_friction: FrictionParams::infinite(),
            robot_radius,
        })
    }

    /// Square workspace of side `side` for point robots.
    pub fn square(side: f64) -> Result<Self> {
        Workspace::new(side, side, 0.0)
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn robot_radius(&self) -> f64 {
        self.robot_radius
    }

    pub fn wall_friction(&self) -> FrictionParams {
        self.wall_friction
    }

    /// Lower-left corner of the region robot centers can occupy.
    pub fn center_min(&self) -> Point {
        Point::new(self.robot_radius, self.robot_radius)
    }

    /// Upper-right corner of the region robot centers can occupy.
    pub fn center_max(&self) -> Point {
        Point::new(self.width - self.robot_radius, self.height - self.robot_radius)
    }

    /// Whether `p` is a valid robot center, allowing the contact tolerance.
    pub fn admits(&self, p: Point) -> bool {
        let (lo, hi) = (self.center_min(), self.center_max());
        p.is_finite()
            && p.x >= lo.x - CONTACT_TOL
            && p.x <= hi.x + CONTACT_TOL
            && p.y >= lo.y - CONTACT_TOL
            && p.y <= hi.y + CONTACT_TOL
    }

    fn clamp(&self, p: Point) -> Point {
        let (lo, hi) = (self.center_min(), self.center_max());
        Point::new(p.x.clamp(lo.x, hi.x), p.y.clamp(lo.y, hi.y))
    }
}

/// Walls whose distance to a robot centered at `p` is within tolerance.
pub fn contact_set(ws: &Workspace, p: Point) -> WallSet {
    let (lo, hi) = (ws.center_min(), ws.center_max());
    let mut set = WallSet::empty();
    if p.x - lo.x <= CONTACT_TOL {
        set.insert(Wall::Left);
    }
    if hi.x - p.x <= CONTACT_TOL {
        set.insert(Wall::Right);
    }
    if p.y - lo.y <= CONTACT_TOL {
        set.insert(Wall::Bottom);
    }
    if hi.y - p.y <= CONTACT_TOL {
        set.insert(Wall::Top);
    }
    set
}

/// Robot centers and the walls each one touches.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotState {
    positions: Vec<Point>,
    contacts: Vec<WallSet>,
}

impl RobotState {
    pub fn new(ws: &Workspace, positions: Vec<Point>) -> Result<Self> {
        for (i, p) in positions.iter().enumerate() {
            if !ws.admits(*p) {
                return Err(Error::State(format!(
                    "robot {i} at ({}, {}) is outside the workspace",
                    p.x, p.y
                )));
            }
        }
        let positions: Vec<Point> = positions.into_iter().map(|p| ws.clamp(p)).collect();
        let contacts = positions.iter().map(|p| contact_set(ws, *p)).collect();
        Ok(RobotState {
            positions,
            contacts,
        })
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn contacts(&self) -> &[WallSet] {
        &self.contacts
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    fn validate(&self, ws: &Workspace) -> Result<()> {
        if self.contacts.len() != self.positions.len() {
            return Err(Error::State("contact flags do not match robot count".into()));
        }
        for (i, p) in self.positions.iter().enumerate() {
            if !ws.admits(*p) {
                return Err(Error::State(format!("robot {i} is outside the workspace")));
            }
            if self.contacts[i] != contact_set(ws, *p) {
                return Err(Error::State(format!("robot {i} has stale contact flags")));
            }
        }
        Ok(())
    }
}

/// One shared displacement command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoveCommand {
    displacement: Point,
}

impl MoveCommand {
    pub fn new(dx: f64, dy: f64) -> Result<Self> {
        let displacement = Point::new(dx, dy);
        if !displacement.is_finite() {
            return Err(Error::Domain(format!("move ({dx}, {dy}) is not finite")));
        }
        Ok(MoveCommand { displacement })
    }

    pub fn displacement(&self) -> Point {
        self.displacement
    }

    pub fn length(&self) -> f64 {
        self.displacement.norm()
    }
}

/// Ordered commands with optional phase labels.
///
/// A label at index `i` names the phase that starts with command `i`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MoveSequence {
    commands: Vec<MoveCommand>,
    annotations: Vec<(usize, String)>,
    total_length: f64,
}

impl MoveSequence {
    pub fn new() -> Self {
        MoveSequence::default()
    }

    pub fn from_commands(commands: Vec<MoveCommand>) -> Self {
        let mut seq = MoveSequence::new();
        for c in commands {
            seq.push(c);
        }
        seq
    }

    pub fn push(&mut self, command: MoveCommand) {
        self.total_length += command.length();
        self.commands.push(command);
    }

    /// Labels the phase starting with the next pushed command.
    pub fn annotate(&mut self, label: impl Into<String>) {
        self.annotations.push((self.commands.len(), label.into()));
    }

    pub fn extend(&mut self, other: &MoveSequence) {
        let offset = self.commands.len();
        self.annotations.extend(
            other
                .annotations
                .iter()
                .map(|(i, label)| (i + offset, label.clone())),
        );
        for c in &other.commands {
            self.push(*c);
        }
    }

    pub fn commands(&self) -> &[MoveCommand] {
        &self.commands
    }

    pub fn annotations(&self) -> &[(usize, String)] {
        &self.annotations
    }

    pub fn len(&self) -> usize {
        self.commands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.commands.is_empty()
    }

    /// Sum of command magnitudes.
    pub fn total_length(&self) -> f64 {
        self.total_length
    }
}

fn pulls_away(wall: Wall, d: Point) -> bool {
    d.dot(wall.inward_normal()) > 0.0
}

fn move_one(ws: &Workspace, p: Point, contacts: WallSet, d: Point) -> Point {
    if contacts.iter().any(|w| !pulls_away(w, d)) {
        return p;
    }
    let (lo, hi) = (ws.center_min(), ws.center_max());
    let mut t = 1.0_f64;
    let mut hit_x = None;
    let mut hit_y = None;
    if d.x != 0.0 {
        let wall_x = if d.x > 0.0 { hi.x } else { lo.x };
        let tx = ((wall_x - p.x) / d.x).max(0.0);
        if tx <= t {
            t = tx;
            hit_x = Some(wall_x);
        }
    }
    if d.y != 0.0 {
        let wall_y = if d.y > 0.0 { hi.y } else { lo.y };
        let ty = ((wall_y - p.y) / d.y).max(0.0);
        if ty < t {
            t = ty;
            hit_x = None;
            hit_y = Some(wall_y);
        } else if ty == t {
            hit_y = Some(wall_y);
        }
    }
    let mut q = if t >= 1.0 { p + d } else { p + d * t };
    if let Some(x) = hit_x {
        q.x = x;
    }
    if let Some(y) = hit_y {
        q.y = y;
    }
    ws.clamp(q)
}

/// Applies one shared command to every robot.
pub fn apply_move(ws: &Workspace, s: &RobotState, m: MoveCommand) -> Result<RobotState> {
    s.validate(ws)?;
    let d = m.displacement();
    let positions: Vec<Point> = s
        .positions
        .iter()
        .zip(&s.contacts)
        .map(|(p, c)| move_one(ws, *p, *c, d))
        .collect();
    let contacts = positions.iter().map(|p| contact_set(ws, *p)).collect();
    Ok(RobotState {
        positions,
        contacts,
    })
}

/// Replays a sequence; the result starts with `s` and has one state per
/// command after it.
pub fn apply_sequence(ws: &Workspace, s: &RobotState, seq: &MoveSequence) -> Result<Vec<RobotState>> {
    let mut out = Vec::with_capacity(seq.len() + 1);
    out.push(s.clone());
    for m in seq.commands() {
        let next = apply_move(ws, out.last().expect("trajectory is never empty"), *m)?;
        out.push(next);
    }
    Ok(out)
}

/// Final state of a replay without keeping the trajectory.
pub fn replay(ws: &Workspace, s: &RobotState, seq: &MoveSequence) -> Result<RobotState> {
    let mut state = s.clone();
    for m in seq.commands() {
        state = apply_move(ws, &state, *m)?;
    }
    Ok(state)
}

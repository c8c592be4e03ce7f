//! Planar points, polygons and the uniform-density moment engines.
//!
//! Two independent routes compute the first and second moments of a region:
//! an exact Green's-theorem evaluation over a polygon boundary, and a
//! seeded rejection sampler over an arbitrary membership predicate. The
//! closed-form settling statistics elsewhere in the crate are checked
//! against both.

use std::ops::{Add, Mul, Neg, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Regions with less area than this are rejected.
pub const DEGENERATE_AREA: f64 = 1e-12;

/// Minimum sample count accepted by [`monte_carlo_moments`].
pub const MIN_MC_SAMPLES: usize = 10_000;

/// A point or displacement in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Unit vector at `angle` radians from the +x axis.
    #[inline]
    pub fn from_angle(angle: f64) -> Self {
        Point::new(angle.cos(), angle.sin())
    }

    #[inline]
    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    #[inline]
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Rotates counterclockwise about the origin.
    pub fn rotate(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl Add for Point {
    type Output = Point;
    #[inline]
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    #[inline]
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    #[inline]
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point {
    type Output = Point;
    #[inline]
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Axis-aligned rectangle `[min.x, max.x] x [min.y, max.y]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn new(min: Point, max: Point) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || max.x <= min.x || max.y <= min.y {
            return Err(Error::Domain(format!(
                "rectangle [{min:?}, {max:?}] is empty or not finite"
            )));
        }
        Ok(Rect { min, max })
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }
}

/// Mean, covariance and correlation of a planar distribution.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Moments {
    pub mean_x: f64,
    pub mean_y: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub cov_xy: f64,
    pub corr: f64,
}

impl Moments {
    /// Builds moments from a mean and covariance matrix. Correlation is
    /// zero when either variance vanishes.
    pub fn from_covariance(mean: Point, var_x: f64, var_y: f64, cov_xy: f64) -> Self {
        let corr = if var_x > 0.0 && var_y > 0.0 {
            (cov_xy / (var_x * var_y).sqrt()).clamp(-1.0, 1.0)
        } else {
            0.0
        };
        Moments {
            mean_x: mean.x,
            mean_y: mean.y,
            var_x,
            var_y,
            cov_xy,
            corr,
        }
    }

    pub fn mean(&self) -> Point {
        Point::new(self.mean_x, self.mean_y)
    }

    /// Moments of the same distribution after rotating it by `angle`
    /// about the origin: the mean rotates and the covariance becomes
    /// `R Σ Rᵀ`.
    pub fn rotated(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let (a, b, d) = (self.var_x, self.cov_xy, self.var_y);
        let var_x = c * c * a - 2.0 * s * c * b + s * s * d;
        let var_y = s * s * a + 2.0 * s * c * b + c * c * d;
        let cov_xy = s * c * (a - d) + (c * c - s * s) * b;
        Moments::from_covariance(self.mean().rotate(angle), var_x, var_y, cov_xy)
    }

    /// All six fields as an array, in declaration order.
    pub fn fields(&self) -> [f64; 6] {
        [
            self.mean_x,
            self.mean_y,
            self.var_x,
            self.var_y,
            self.cov_xy,
            self.corr,
        ]
    }

    /// Largest absolute field-wise difference.
    pub fn max_abs_diff(&self, other: &Moments) -> f64 {
        self.fields()
            .iter()
            .zip(other.fields())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// A simple polygon stored counterclockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    /// Validates and normalizes a vertex ring: consecutive duplicates are
    /// dropped and the orientation is made counterclockwise.
    ///
    /// Self-intersection is not checked here (it is quadratic); use
    /// [`Polygon::is_simple`] when the source is untrusted.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if let Some(p) = vertices.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidPolygon(format!("non-finite vertex {p:?}")));
        }
        let mut ring: Vec<Point> = Vec::with_capacity(vertices.len());
        for p in vertices {
            if ring.last().is_none_or(|q| (p - *q).norm() > 1e-14) {
                ring.push(p);
            }
        }
        while ring.len() > 1 && (ring[0] - ring[ring.len() - 1]).norm() <= 1e-14 {
            ring.pop();
        }
        if ring.len() < 3 {
            return Err(Error::InvalidPolygon(format!(
                "need at least 3 distinct vertices, got {}",
                ring.len()
            )));
        }
        let signed = signed_area(&ring);
        if signed.abs() < DEGENERATE_AREA {
            return Err(Error::DegenerateRegion { area: signed.abs() });
        }
        if signed < 0.0 {
            ring.reverse();
        }
        Ok(Polygon { vertices: ring })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Iterator over directed edges `(v_i, v_{i+1})`, closing the ring.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn translated(&self, d: Point) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|&p| p + d).collect(),
        }
    }

    pub fn rotated(&self, angle: f64) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|p| p.rotate(angle)).collect(),
        }
    }

    /// True when no two non-adjacent edges intersect.
    pub fn is_simple(&self) -> bool {
        let n = self.vertices.len();
        let edges: Vec<_> = self.edges().collect();
        for i in 0..n {
            for j in (i + 1)..n {
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (a, b) = edges[i];
                let (c, d) = edges[j];
                if segments_intersect(a, b, c, d) {
                    return false;
                }
            }
        }
        true
    }

    /// Even-odd point-in-polygon test.
    pub fn contains(&self, p: Point) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn bounding_box(&self) -> Rect {
        let mut min = self.vertices[0];
        let mut max = self.vertices[0];
        for p in &self.vertices {
            min = Point::new(min.x.min(p.x), min.y.min(p.y));
            max = Point::new(max.x.max(p.x), max.y.max(p.y));
        }
        Rect { min, max }
    }
}

fn signed_area(ring: &[Point]) -> f64 {
    let n = ring.len();
    let origin = ring[0];
    (0..n)
        .map(|i| (ring[i] - origin).cross(ring[(i + 1) % n] - origin))
        .sum::<f64>()
        * 0.5
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |p: Point, q: Point, r: Point| {
        r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
    };
    (d1 == 0.0 && on(c, d, a))
        || (d2 == 0.0 && on(c, d, b))
        || (d3 == 0.0 && on(a, b, c))
        || (d4 == 0.0 && on(a, b, d))
}

/// Area of a valid polygon (shoelace formula).
pub fn polygon_area(p: &Polygon) -> Result<f64> {
    let area = signed_area(p.vertices());
    if area < DEGENERATE_AREA {
        return Err(Error::DegenerateRegion { area });
    }
    Ok(area)
}

/// Exact moments of the uniform distribution over `p`.
///
/// The centroid comes from the standard edge sums; second moments are then
/// accumulated on the vertex ring translated to that centroid so regions far
/// from the origin keep full precision.
pub fn polygon_moments(p: &Polygon) -> Result<Moments> {
    let area = polygon_area(p)?;
    let anchor = p.vertices()[0];
    let mut cx = 0.0;
    let mut cy = 0.0;
    for (a, b) in p.edges() {
        let (a, b) = (a - anchor, b - anchor);
        let c = a.cross(b);
        cx += (a.x + b.x) * c;
        cy += (a.y + b.y) * c;
    }
    let centroid = Point::new(cx / (6.0 * area), cy / (6.0 * area)) + anchor;

    let mut area2 = 0.0;
    let mut ixx = 0.0;
    let mut iyy = 0.0;
    let mut ixy = 0.0;
    for (a, b) in p.edges() {
        let (a, b) = (a - centroid, b - centroid);
        let c = a.cross(b);
        area2 += c;
        ixx += (a.x * a.x + a.x * b.x + b.x * b.x) * c;
        iyy += (a.y * a.y + a.y * b.y + b.y * b.y) * c;
        ixy += (a.x * b.y + 2.0 * a.x * a.y + 2.0 * b.x * b.y + b.x * a.y) * c;
    }
    let area_c = area2 * 0.5;
    let var_x = (ixx / 12.0) / area_c;
    let var_y = (iyy / 12.0) / area_c;
    let cov_xy = (ixy / 24.0) / area_c;
    Ok(Moments::from_covariance(
        centroid,
        var_x.max(0.0),
        var_y.max(0.0),
        cov_xy,
    ))
}

const MC_CHUNK: usize = 1 << 15;

#[derive(Default, Clone, Copy)]
struct RawSums {
    hits: u64,
    sx: f64,
    sy: f64,
    sxx: f64,
    syy: f64,
    sxy: f64,
}

impl RawSums {
    fn merge(self, o: RawSums) -> RawSums {
        RawSums {
            hits: self.hits + o.hits,
            sx: self.sx + o.sx,
            sy: self.sy + o.sy,
            sxx: self.sxx + o.sxx,
            syy: self.syy + o.syy,
            sxy: self.sxy + o.sxy,
        }
    }
}

/// Rejection-sampled moments of the uniform distribution over the region
/// `inside` restricted to `bbox`.
///
/// Samples are drawn in fixed chunks; chunk `i` uses ChaCha stream `i` under
/// `seed`, and chunk sums are reduced in index order, so the result does not
/// depend on how many worker threads run.
pub fn monte_carlo_moments<F>(inside: F, bbox: Rect, n_samples: usize, seed: u64) -> Result<Moments>
where
    F: Fn(Point) -> bool + Sync,
{
    if n_samples < MIN_MC_SAMPLES {
        return Err(Error::Domain(format!(
            "monte carlo needs at least {MIN_MC_SAMPLES} samples, got {n_samples}"
        )));
    }
    let center = Point::new(
        0.5 * (bbox.min.x + bbox.max.x),
        0.5 * (bbox.min.y + bbox.max.y),
    );
    let (w, h) = (bbox.width(), bbox.height());
    let chunks = n_samples.div_ceil(MC_CHUNK);
    let partial: Vec<RawSums> = (0..chunks)
        .into_par_iter()
        .map(|i| {
            let count = MC_CHUNK.min(n_samples - i * MC_CHUNK);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut s = RawSums::default();
            for _ in 0..count {
                let p = Point::new(
                    bbox.min.x + w * rng.gen::<f64>(),
                    bbox.min.y + h * rng.gen::<f64>(),
                );
                if inside(p) {
                    let d = p - center;
                    s.hits += 1;
                    s.sx += d.x;
                    s.sy += d.y;
                    s.sxx += d.x * d.x;
                    s.syy += d.y * d.y;
                    s.sxy += d.x * d.y;
                }
            }
            s
        })
        .collect();
    let total = partial.into_iter().fold(RawSums::default(), RawSums::merge);

    let rate = total.hits as f64 / n_samples as f64;
    if rate < 1e-3 {
        return Err(Error::RegionTooThin { rate });
    }
    let n = total.hits as f64;
    let mx = total.sx / n;
    let my = total.sy / n;
    let var_x = (total.sxx / n - mx * mx).max(0.0);
    let var_y = (total.syy / n - my * my).max(0.0);
    let cov = total.sxy / n - mx * my;
    Ok(Moments::from_covariance(
        center + Point::new(mx, my),
        var_x,
        var_y,
        cov,
    ))
}

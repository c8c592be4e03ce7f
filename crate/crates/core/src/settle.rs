//! Settled-swarm statistics in the unit square and the unit disc.
//!
//! A large swarm pushed by a constant input behaves like an incompressible
//! fluid: it fills the part of the workspace furthest along the input
//! direction `beta`. In the unit square the region is one of eight
//! polygon shapes depending on `beta` and the swarm area; in the unit disc
//! it is the region under a chord at fill height `h`.
//!
//! Convention: `beta` is the direction of the commanded force and the swarm
//! settles on the side that force points toward.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{Error, Result};
use crate::geometry::{polygon_moments, Moments, Point, Polygon};

/// Tolerance for deciding which angular case a `beta` falls in.
const BREAKPOINT_TOL: f64 = 1e-12;

/// Wraps an angle into `[0, 2π)`.
pub fn normalize_angle(beta: f64) -> f64 {
    let b = beta.rem_euclid(TAU);
    if b >= TAU {
        0.0
    } else {
        b
    }
}

/// Input angle and swarm area for the unit-square workspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareFillSpec {
    beta: f64,
    area: f64,
}

impl SquareFillSpec {
    pub fn new(beta: f64, area: f64) -> Result<Self> {
        if !beta.is_finite() {
            return Err(Error::Domain(format!("input angle {beta} is not finite")));
        }
        if !(area > 0.0 && area <= 1.0) {
            return Err(Error::Domain(format!("swarm area {area} outside (0, 1]")));
        }
        Ok(SquareFillSpec {
            beta: normalize_angle(beta),
            area,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn area(&self) -> f64 {
        self.area
    }
}

/// Input angle and fill height for the unit-disc workspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleFillSpec {
    beta: f64,
    fill_height: f64,
}

impl CircleFillSpec {
    pub fn new(beta: f64, fill_height: f64) -> Result<Self> {
        if !beta.is_finite() {
            return Err(Error::Domain(format!("input angle {beta} is not finite")));
        }
        if !(fill_height > 0.0 && fill_height <= 2.0) {
            return Err(Error::Domain(format!(
                "fill height {fill_height} outside (0, 2]"
            )));
        }
        Ok(CircleFillSpec {
            beta: normalize_angle(beta),
            fill_height,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn fill_height(&self) -> f64 {
        self.fill_height
    }
}

/// Which of the eight square-workspace shapes a spec produces.
///
/// Cases are numbered counterclockwise starting from the input pointing
/// at the right wall; odd cases are trapezoids against one wall, even cases
/// are corner shapes (a triangle for small swarms, a square with the
/// opposite corner cut off for large ones).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SquareCase {
    Full,
    Case(u8),
}

/// Half-width of the angular window around each wall normal in which the
/// settled shape is a trapezoid.
fn square_breakpoint(area: f64) -> f64 {
    if area <= 0.5 {
        (2.0 * area).atan()
    } else {
        (2.0 * (1.0 - area)).atan()
    }
}

pub fn square_case(spec: &SquareFillSpec) -> SquareCase {
    if spec.area >= 1.0 {
        return SquareCase::Full;
    }
    let phi = square_breakpoint(spec.area);
    let b = spec.beta;
    let le = |x: f64| b <= x + BREAKPOINT_TOL;
    if le(phi) || b > TAU - phi + BREAKPOINT_TOL {
        SquareCase::Case(1)
    } else if le(FRAC_PI_2 - phi) {
        SquareCase::Case(2)
    } else if le(FRAC_PI_2 + phi) {
        SquareCase::Case(3)
    } else if le(PI - phi) {
        SquareCase::Case(4)
    } else if le(PI + phi) {
        SquareCase::Case(5)
    } else if le(1.5 * PI - phi) {
        SquareCase::Case(6)
    } else if le(1.5 * PI + phi) {
        SquareCase::Case(7)
    } else {
        SquareCase::Case(8)
    }
}

fn sqrt0(x: f64) -> f64 {
    x.max(0.0).sqrt()
}

/// Vertex list of the settled region inside the unit square.
pub fn square_region(spec: &SquareFillSpec) -> Polygon {
    let a = spec.area;
    let t = spec.beta.tan();
    let c = 1.0 / t;
    let p = Point::new;
    let verts = match square_case(spec) {
        SquareCase::Full => vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)],
        // trapezoids are the same for both area regimes
        SquareCase::Case(1) => vec![
            p(1.0, 0.0),
            p(1.0, 1.0),
            p(1.0 - a - t / 2.0, 1.0),
            p(1.0 - a + t / 2.0, 0.0),
        ],
        SquareCase::Case(3) => vec![
            p(1.0, 1.0),
            p(0.0, 1.0),
            p(0.0, 1.0 - a + c / 2.0),
            p(1.0, 1.0 - a - c / 2.0),
        ],
        SquareCase::Case(5) => vec![
            p(0.0, 0.0),
            p(0.0, 1.0),
            p(a - t / 2.0, 1.0),
            p(a + t / 2.0, 0.0),
        ],
        SquareCase::Case(7) => vec![
            p(0.0, 0.0),
            p(1.0, 0.0),
            p(1.0, a - c / 2.0),
            p(0.0, a + c / 2.0),
        ],
        SquareCase::Case(k) if a <= 0.5 => {
            let (u, v) = (sqrt0(2.0 * a * t.abs()), sqrt0(2.0 * a * c.abs()));
            match k {
                2 => vec![p(1.0, 1.0), p(1.0 - u, 1.0), p(1.0, 1.0 - v)],
                4 => vec![p(0.0, 1.0), p(u, 1.0), p(0.0, 1.0 - v)],
                6 => vec![p(0.0, 0.0), p(0.0, v), p(u, 0.0)],
                _ => vec![p(1.0, 0.0), p(1.0 - u, 0.0), p(1.0, v)],
            }
        }
        SquareCase::Case(k) => {
            // the empty corner opposite the input is a triangle of area 1 - A
            let e = 1.0 - a;
            let (u, v) = (sqrt0(2.0 * e * t.abs()), sqrt0(2.0 * e * c.abs()));
            match k {
                2 => vec![p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0), p(0.0, v), p(u, 0.0)],
                4 => vec![p(1.0, 1.0), p(0.0, 1.0), p(0.0, 0.0), p(1.0 - u, 0.0), p(1.0, v)],
                6 => vec![
                    p(1.0, 0.0),
                    p(0.0, 0.0),
                    p(0.0, 1.0),
                    p(1.0 - u, 1.0),
                    p(1.0, 1.0 - v),
                ],
                _ => vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(u, 1.0), p(0.0, 1.0 - v)],
            }
        }
    };
    Polygon::new(verts).expect("settled region of a valid spec is non-degenerate")
}

/// Closed-form mean x-position of the settled swarm in the unit square.
pub fn square_mean_x(spec: &SquareFillSpec) -> f64 {
    let a = spec.area;
    let t = spec.beta.tan();
    let c = 1.0 / t;
    let s2 = std::f64::consts::SQRT_2;
    match square_case(spec) {
        SquareCase::Full => 0.5,
        SquareCase::Case(1) => -t * t / (24.0 * a) - a / 2.0 + 1.0,
        SquareCase::Case(3) => c / (12.0 * a) + 0.5,
        SquareCase::Case(5) => t * t / (24.0 * a) + a / 2.0,
        SquareCase::Case(7) => 0.5 - c / (12.0 * a),
        SquareCase::Case(k) if a <= 0.5 => {
            let leg = s2 * sqrt0(a * t.abs()) / 3.0;
            match k {
                2 | 8 => 1.0 - leg,
                _ => leg,
            }
        }
        SquareCase::Case(k) => {
            let e = 1.0 - a;
            let cut = 2.0 * s2 * sqrt0(e * t.abs()) * e;
            match k {
                2 | 8 => (3.0 - cut) / (6.0 * a),
                _ => (cut + 6.0 * a - 3.0) / (6.0 * a),
            }
        }
    }
}

/// Moments of the settled swarm in the unit square.
///
/// Only the mean x-position has a tabulated closed form; the remaining
/// fields come from integrating the settled polygon exactly.
pub fn square_moments(spec: &SquareFillSpec) -> Moments {
    polygon_moments(&square_region(spec)).expect("settled region is non-degenerate")
}

fn check_height(h: f64, allow_zero: bool) -> Result<()> {
    let ok = if allow_zero {
        (0.0..=2.0).contains(&h)
    } else {
        h > 0.0 && h <= 2.0
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Domain(format!("fill height {h} out of range")))
    }
}

/// Area of the unit-disc region under a chord at fill height `h`.
pub fn circle_chord_area(h: f64) -> Result<f64> {
    check_height(h, true)?;
    Ok(chord_area(h))
}

fn chord_area(h: f64) -> f64 {
    (1.0 - h).acos() - (1.0 - h) * ((2.0 - h) * h).max(0.0).sqrt()
}

/// Inverse of [`circle_chord_area`], by bisection.
pub fn circle_fill_height(area: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&area) {
        return Err(Error::Domain(format!("chord area {area} outside [0, π]")));
    }
    let (mut lo, mut hi) = (0.0_f64, 2.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if chord_area(mid) < area {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Distance from the disc center to the mean of the settled swarm.
pub fn circle_mean_radius(h: f64) -> Result<f64> {
    check_height(h, false)?;
    let w = ((2.0 - h) * h).max(0.0);
    let denom = 3.0 * (w.sqrt() * (h - 1.0) + (1.0 - h).acos());
    Ok(2.0 * w.powf(1.5) / denom)
}

/// Variance along the input direction (`radial`) and across it
/// (`tangential`) for the chord region at fill height `h`.
pub fn circle_principal_variances(h: f64) -> Result<(f64, f64)> {
    let r = circle_mean_radius(h)?;
    let area = chord_area(h);
    let theta = (1.0 - h).acos();
    let radial = (4.0 * theta - (4.0 * theta).sin()) / (16.0 * area) - r * r;
    let tangential =
        (12.0 * theta - 8.0 * (2.0 * theta).sin() + (4.0 * theta).sin()) / (48.0 * area);
    Ok((radial.max(0.0), tangential.max(0.0)))
}

/// Moments of the settled swarm in the unit disc centered at the origin.
pub fn circle_moments(spec: &CircleFillSpec) -> Result<Moments> {
    let h = spec.fill_height;
    let r = circle_mean_radius(h)?;
    let (radial, tangential) = circle_principal_variances(h)?;
    let aligned = Moments::from_covariance(Point::new(r, 0.0), radial, tangential, 0.0);
    Ok(aligned.rotated(spec.beta))
}

/// Chord region at fill height `h` for input angle `beta`, as a polygon
/// with `segments` arc segments.
pub fn circle_region(spec: &CircleFillSpec, segments: usize) -> Polygon {
    let theta = (1.0 - spec.fill_height).acos();
    let segments = segments.max(3);
    let pts = (0..=segments)
        .map(|i| {
            let phi = -theta + 2.0 * theta * i as f64 / segments as f64;
            Point::from_angle(phi + spec.beta)
        })
        .collect();
    Polygon::new(pts).expect("chord region is non-degenerate")
}

/// Which workspace a sweep runs in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepWorkspace {
    /// Unit square; fill values are swarm areas.
    Square,
    /// Unit disc; fill values are fill heights.
    Circle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub fill: f64,
    pub beta: f64,
    pub moments: Moments,
}

/// Settled statistics on a grid of fill values and `beta_samples` evenly
/// spaced input angles in `[0, 2π)`.
pub fn sweep_statistics(
    workspace: SweepWorkspace,
    fills: &[f64],
    beta_samples: usize,
) -> Result<Vec<SweepRow>> {
    if fills.is_empty() || beta_samples == 0 {
        return Err(Error::Domain("sweep needs fill values and angle samples".into()));
    }
    let mut rows = Vec::with_capacity(fills.len() * beta_samples);
    for &fill in fills {
        for i in 0..beta_samples {
            let beta = TAU * i as f64 / beta_samples as f64;
            let moments = match workspace {
                SweepWorkspace::Square => square_moments(&SquareFillSpec::new(beta, fill)?),
                SweepWorkspace::Circle => circle_moments(&CircleFillSpec::new(beta, fill)?)?,
            };
            rows.push(SweepRow {
                fill,
                beta,
                moments,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{monte_carlo_moments, polygon_area, Rect};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_4, SQRT_2};

    /// Independent settled region: clip the square with the half-plane
    /// `p · d >= c` and bisect on `c` until the clipped area equals `A`.
    fn clipped_region(beta: f64, area: f64) -> Polygon {
        let d = Point::from_angle(beta);
        let square = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        let clip = |c: f64| -> Vec<Point> {
            let mut out = Vec::new();
            for i in 0..4 {
                let (a, b) = (square[i], square[(i + 1) % 4]);
                let (fa, fb) = (a.dot(d) - c, b.dot(d) - c);
                if fa >= 0.0 {
                    out.push(a);
                }
                if (fa >= 0.0) != (fb >= 0.0) {
                    let t = fa / (fa - fb);
                    out.push(a + (b - a) * t);
                }
            }
            out
        };
        let area_of = |pts: &[Point]| {
            let n = pts.len();
            (0..n).map(|i| pts[i].cross(pts[(i + 1) % n])).sum::<f64>() * 0.5
        };
        let proj: Vec<f64> = square.iter().map(|p| p.dot(d)).collect();
        let (mut lo, mut hi) = (
            proj.iter().cloned().fold(f64::INFINITY, f64::min),
            proj.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        );
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if area_of(&clip(mid)) > area {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Polygon::new(clip(0.5 * (lo + hi))).unwrap()
    }

    #[test]
    fn full_square_for_unit_area() {
        for beta in [0.0, 1.0, 4.0] {
            let spec = SquareFillSpec::new(beta, 1.0).unwrap();
            let m = square_moments(&spec);
            assert!((m.mean_x - 0.5).abs() < 1e-15 && (m.mean_y - 0.5).abs() < 1e-15);
            assert_eq!(square_mean_x(&spec), 0.5);
        }
    }

    #[test]
    fn straight_down_is_level_fill() {
        let spec = SquareFillSpec::new(1.5 * PI, 0.5).unwrap();
        let r = square_region(&spec);
        let bb = r.bounding_box();
        assert!((bb.max.y - 0.5).abs() < 1e-12 && bb.min.y.abs() < 1e-15);
        assert!((polygon_area(&r).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn lower_left_triangle() {
        let spec = SquareFillSpec::new(1.25 * PI, 0.125).unwrap();
        let r = square_region(&spec);
        assert_eq!(r.vertices().len(), 3);
        assert!((polygon_area(&r).unwrap() - 0.125).abs() < 1e-12);
        let bb = r.bounding_box();
        assert!((bb.max.x - 0.5).abs() < 1e-12 && (bb.max.y - 0.5).abs() < 1e-12);
    }

    #[test]
    fn lower_left_mean_closed_form() {
        let (beta, a) = (1.2 * PI, 0.2);
        let spec = SquareFillSpec::new(beta, a).unwrap();
        let expect = SQRT_2 * (a * beta.tan()).sqrt() / 3.0;
        assert!((square_mean_x(&spec) - expect).abs() < 1e-14);
        assert!((square_moments(&spec).mean_x - expect).abs() < 1e-12);
    }

    #[test]
    fn corner_triangle_covariance() {
        let spec = SquareFillSpec::new(1.25 * PI, 0.18).unwrap();
        let m = square_moments(&spec);
        assert!((m.cov_xy + 0.01).abs() < 1e-12);
        assert!((m.corr + 0.5).abs() < 1e-12);
    }

    #[test]
    fn chord_area_values() {
        assert!((circle_chord_area(1.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((circle_chord_area(2.0).unwrap() - PI).abs() < 1e-15);
        assert_eq!(circle_chord_area(0.0).unwrap(), 0.0);
        let direct = 0.5f64.acos() - 0.5 * 0.75f64.sqrt();
        assert!((circle_chord_area(0.5).unwrap() - direct).abs() < 1e-15);
        assert!(circle_chord_area(2.1).is_err());
        assert!(circle_chord_area(-0.1).is_err());
    }

    #[test]
    fn fill_height_inverse() {
        // the area curve is flat at a full disc, so the height is less sharp there
        assert!((circle_fill_height(PI).unwrap() - 2.0).abs() < 1e-6);
        assert!((circle_fill_height(PI / 2.0).unwrap() - 1.0).abs() < 1e-12);
        let h = circle_fill_height(0.3).unwrap();
        assert!((circle_chord_area(h).unwrap() - 0.3).abs() < 1e-10);
        assert!(circle_fill_height(4.0).is_err());
    }

    #[test]
    fn mean_radius_reference_values() {
        assert!(circle_mean_radius(2.0).unwrap().abs() < 1e-15);
        assert!((circle_mean_radius(1.0).unwrap() - 4.0 / (3.0 * PI)).abs() < 1e-15);
        assert!(circle_mean_radius(0.0).is_err());
    }

    #[test]
    fn mean_radius_matches_sampling() {
        let h = 0.4;
        let bbox = Rect::new(Point::new(0.0, -1.0), Point::new(1.0, 1.0)).unwrap();
        let m = monte_carlo_moments(|p| p.norm() <= 1.0 && p.x >= 1.0 - h, bbox, 1_000_000, 9)
            .unwrap();
        assert!((m.mean_x - circle_mean_radius(h).unwrap()).abs() < 3e-3);
        assert!(m.mean_y.abs() < 3e-3);
    }

    #[test]
    fn full_disc_moments() {
        for beta in [0.0, 1.0, 3.0] {
            let m = circle_moments(&CircleFillSpec::new(beta, 2.0).unwrap()).unwrap();
            assert!(m.mean_x.abs() < 1e-12 && m.mean_y.abs() < 1e-12);
            assert!((m.var_x - 0.25).abs() < 1e-12 && (m.var_y - 0.25).abs() < 1e-12);
            assert!(m.cov_xy.abs() < 1e-12);
        }
    }

    #[test]
    fn circle_zero_angle_has_no_covariance() {
        for h in [0.1, 0.5, 0.92, 1.43, 1.9] {
            let m = circle_moments(&CircleFillSpec::new(0.0, h).unwrap()).unwrap();
            assert!(m.cov_xy.abs() < 1e-15);
        }
    }

    #[test]
    fn circle_moments_match_polygon_and_sampling() {
        for (beta, h) in [(0.0, 0.3), (0.7, 0.92), (2.5, 1.43), (4.0, 1.8)] {
            let spec = CircleFillSpec::new(beta, h).unwrap();
            let closed = circle_moments(&spec).unwrap();
            let region = circle_region(&spec, 20_000);
            let exact = polygon_moments(&region).unwrap();
            assert!(closed.max_abs_diff(&exact) < 1e-6, "{closed:?} vs {exact:?}");
            let bbox = Rect::new(Point::new(-1.0, -1.0), Point::new(1.0, 1.0)).unwrap();
            let d = Point::from_angle(beta);
            let mc = monte_carlo_moments(
                |p| p.norm() <= 1.0 && p.dot(d) >= 1.0 - h,
                bbox,
                1_000_000,
                42,
            )
            .unwrap();
            assert!(closed.max_abs_diff(&mc) < 3e-3, "{closed:?} vs {mc:?}");
        }
    }

    #[test]
    fn mean_radius_decreasing_and_thin_fill_correlation() {
        let mut prev = f64::INFINITY;
        for i in 1..=200 {
            let r = circle_mean_radius(i as f64 / 100.0).unwrap();
            assert!(r < prev);
            prev = r;
        }
        let thin = circle_moments(&CircleFillSpec::new(FRAC_PI_4 + PI / 2.0, 1e-3).unwrap())
            .unwrap();
        assert!(thin.corr.abs() > 0.999);
    }

    #[test]
    fn circle_variance_and_covariance_maxima() {
        let hs: Vec<f64> = (1..=2000).map(|i| i as f64 / 1000.0).collect();
        let var_x = |h: f64| {
            circle_moments(&CircleFillSpec::new(FRAC_PI_2, h).unwrap())
                .unwrap()
                .var_x
        };
        let best_h = hs.iter().cloned().fold(hs[0], |b, h| if var_x(h) > var_x(b) { h } else { b });
        assert!((best_h - 1.43).abs() <= 0.02, "{best_h}");

        let mut best = (0.0, 0.0, 0.0);
        for i in 0..72 {
            let beta = TAU * i as f64 / 72.0;
            for &h in hs.iter().step_by(5) {
                let cov = circle_moments(&CircleFillSpec::new(beta, h).unwrap())
                    .unwrap()
                    .cov_xy;
                if cov > best.2 + 1e-12 {
                    best = (beta, h, cov);
                }
            }
        }
        let off = (best.0 - 3.0 * FRAC_PI_4).rem_euclid(PI);
        assert!(off.min(PI - off) < 1e-9, "{best:?}");
        assert!((best.1 - 0.92).abs() <= 0.02, "{best:?}");
    }

    #[test]
    fn sweep_single_point_matches_pointwise() {
        let rows = sweep_statistics(SweepWorkspace::Square, &[0.3], 1).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(
            rows[0].moments,
            square_moments(&SquareFillSpec::new(0.0, 0.3).unwrap())
        );
        assert!(sweep_statistics(SweepWorkspace::Circle, &[], 3).is_err());
    }

    #[test]
    fn circle_sweep_loci_are_circles() {
        let rows = sweep_statistics(SweepWorkspace::Circle, &[0.5, 1.0, 1.5], 36).unwrap();
        for row in rows {
            let r = circle_mean_radius(row.fill).unwrap();
            assert!((row.moments.mean().norm() - r).abs() < 1e-12);
        }
    }

    #[test]
    fn square_locus_shrinks_with_area() {
        let extent = |a: f64| {
            sweep_statistics(SweepWorkspace::Square, &[a], 360)
                .unwrap()
                .iter()
                .map(|r| (r.moments.mean() - Point::new(0.5, 0.5)).norm())
                .fold(0.0, f64::max)
        };
        let e: Vec<f64> = [0.1, 0.3, 0.5, 0.7, 0.9].iter().map(|&a| extent(a)).collect();
        assert!(e.windows(2).all(|w| w[1] < w[0]), "{e:?}");
    }

    proptest! {
        #[test]
        fn region_area_and_shape(beta in 0.0..TAU, a in 0.001f64..1.0) {
            let spec = SquareFillSpec::new(beta, a).unwrap();
            let r = square_region(&spec);
            prop_assert!((polygon_area(&r).unwrap() - a).abs() < 1e-9);
            prop_assert!(r.is_simple());
            for v in r.vertices() {
                prop_assert!(v.x >= -1e-12 && v.x <= 1.0 + 1e-12);
                prop_assert!(v.y >= -1e-12 && v.y <= 1.0 + 1e-12);
            }
        }

        #[test]
        fn region_matches_half_plane_clip(beta in 0.0..TAU, a in 0.001f64..0.999) {
            let spec = SquareFillSpec::new(beta, a).unwrap();
            let table = polygon_moments(&square_region(&spec)).unwrap();
            let clip = polygon_moments(&clipped_region(beta, a)).unwrap();
            prop_assert!(table.max_abs_diff(&clip) < 1e-9, "{table:?} vs {clip:?}");
        }

        #[test]
        fn closed_form_mean_matches_polygon(beta in 0.0..TAU, a in 0.001f64..1.0) {
            let spec = SquareFillSpec::new(beta, a).unwrap();
            prop_assert!((square_mean_x(&spec) - square_moments(&spec).mean_x).abs() < 1e-9);
        }

        #[test]
        fn quarter_turn_symmetry(beta in 0.0..TAU, a in 0.01f64..1.0) {
            let m0 = square_moments(&SquareFillSpec::new(beta, a).unwrap());
            let m1 = square_moments(&SquareFillSpec::new(beta + FRAC_PI_2, a).unwrap());
            // rotate m0 by a quarter turn about the square center
            let centered = Moments { mean_x: m0.mean_x - 0.5, mean_y: m0.mean_y - 0.5, ..m0 };
            let mut expect = centered.rotated(FRAC_PI_2);
            expect.mean_x += 0.5;
            expect.mean_y += 0.5;
            prop_assert!(expect.max_abs_diff(&m1) < 1e-9);
        }

        #[test]
        fn fill_height_round_trip(a in 0.0..PI) {
            let h = circle_fill_height(a).unwrap();
            prop_assert!((circle_chord_area(h).unwrap() - a).abs() < 1e-10);
        }
    }
}

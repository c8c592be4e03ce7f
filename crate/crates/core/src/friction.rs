//! Coulomb wall friction and the boundary-layer flow profile.
//!
//! A robot pushed against a wall with force `F` at angle `theta` from the
//! inward wall normal presses on the wall with `N = F cos(theta)` and is
//! driven along it by `F sin(theta)`. Friction opposes the tangential drive
//! up to `mu_f * N` and never reverses it.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Coulomb friction coefficient between a robot and a wall.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrictionParams {
    mu_f: f64,
}

impl FrictionParams {
    pub fn new(mu_f: f64) -> Result<Self> {
        if mu_f.is_nan() || mu_f < 0.0 {
            return Err(Error::Domain(format!("friction coefficient {mu_f} must be >= 0")));
        }
        Ok(FrictionParams { mu_f })
    }

    /// Frictionless walls.
    pub fn frictionless() -> Self {
        FrictionParams { mu_f: 0.0 }
    }

    /// Walls that hold any touching robot in place.
    pub fn infinite() -> Self {
        FrictionParams { mu_f: f64::INFINITY }
    }

    pub fn mu_f(&self) -> f64 {
        self.mu_f
    }

    pub fn is_infinite(&self) -> bool {
        self.mu_f.is_infinite()
    }
}

/// Net force along the wall for a push of magnitude `force` at angle
/// `theta` from the inward wall normal. Positive means forward, the
/// direction in which `sin(theta) > 0`.
pub fn forward_force(force: f64, theta: f64, params: FrictionParams) -> Result<f64> {
    if force.is_nan() || force < 0.0 {
        return Err(Error::Domain(format!("force magnitude {force} must be >= 0")));
    }
    if !theta.is_finite() {
        return Err(Error::Domain(format!("angle {theta} is not finite")));
    }
    let drive = force * theta.sin();
    if theta.abs() >= FRAC_PI_2 {
        return Ok(drive);
    }
    if params.is_infinite() {
        return Ok(0.0);
    }
    let normal = force * theta.cos();
    let friction = (params.mu_f * normal).min(drive.abs());
    Ok(drive.signum() * (drive.abs() - friction))
}

/// Coefficient whose largest friction force equals `fraction` of the drive
/// force `F` for a push at 45 degrees into the wall, where `N = F / sqrt(2)`.
pub fn mu_for_force_fraction(fraction: f64) -> Result<f64> {
    if fraction.is_nan() || fraction < 0.0 {
        return Err(Error::Domain(format!("force fraction {fraction} must be >= 0")));
    }
    Ok(fraction * std::f64::consts::SQRT_2)
}

/// Free-stream speed and thickness of the layer near a wall where the
/// flow slows to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryLayerSpec {
    u0: f64,
    layer_height: f64,
}

impl BoundaryLayerSpec {
    pub fn new(u0: f64, layer_height: f64) -> Result<Self> {
        if !u0.is_finite() {
            return Err(Error::Domain(format!("free-stream speed {u0} is not finite")));
        }
        if !(layer_height > 0.0 && layer_height.is_finite()) {
            return Err(Error::Domain(format!("layer height {layer_height} must be > 0")));
        }
        Ok(BoundaryLayerSpec { u0, layer_height })
    }

    pub fn u0(&self) -> f64 {
        self.u0
    }

    pub fn layer_height(&self) -> f64 {
        self.layer_height
    }
}

/// Flow speed at distance `y` from the wall: a parabola inside the layer,
/// the free-stream speed outside it.
pub fn boundary_layer_velocity(spec: &BoundaryLayerSpec, y: f64) -> Result<f64> {
    if y.is_nan() || y < 0.0 {
        return Err(Error::Domain(format!("wall distance {y} must be >= 0")));
    }
    if y > spec.layer_height {
        return Ok(spec.u0);
    }
    let s = y / spec.layer_height;
    Ok(spec.u0 * s * (2.0 - s))
}

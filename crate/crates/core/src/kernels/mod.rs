//! Closed-form kernels: the free-space fundamental solution, the half-space
//! Poisson kernel, the cube image sums and the cylinder mode sums.

use std::f64::consts::PI;

use thiserror::Error;

use crate::geometry::Point3;

pub mod bessel;
pub mod cube;
pub mod cylinder;

pub use bessel::{bessel_j, bessel_zero, bessel_zeros};
pub use cube::{cube_dsdn, cube_images, cube_s, poisson_density, ImageFilter, ImageSet, ImageSource};
pub use cylinder::{cylinder_g0, cylinder_s3, CylinderPoint};

/// `|x - image|` at or below this counts as hitting a singularity.
pub const COINCIDENCE_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("fundamental solution evaluated at non-positive distance {0}")]
    Singular(f64),
    #[error("half-space kernel needs a positive height, got {0}")]
    NonPositiveHeight(f64),
    #[error("source ({}, {}, {}) outside the closed unit cube", .0.x, .0.y, .0.z)]
    SourceOutsideCube(Point3),
    #[error("evaluation point ({}, {}, {}) coincides with image ({}, {}, {})", .x.x, .x.y, .x.z, .image.x, .image.y, .image.z)]
    Coincident { x: Point3, image: Point3 },
    #[error("Bessel order {order} / argument {argument} outside the supported range")]
    BesselRange { order: u32, argument: f64 },
    #[error("Bessel zero index must be at least 1")]
    ZeroIndex,
    #[error("cylinder point outside 0 <= r <= 1 (r = {0})")]
    CylinderRadius(f64),
    #[error("cylinder series cannot reach tolerance: {0}")]
    Truncation(String),
}

/// Free-space fundamental solution `1 / (4 pi r)`.
#[inline]
pub fn phi(distance: f64) -> Result<f64, KernelError> {
    if !(distance > 0.0) {
        return Err(KernelError::Singular(distance));
    }
    Ok(1.0 / (4.0 * PI * distance))
}

/// Poisson kernel of the half-space `x_3 > 0`:
/// `y3 / (2 pi (|xp - yp|^2 + y3^2)^{3/2})`.
pub fn halfspace_poisson(xp: [f64; 2], yp: [f64; 2], y3: f64) -> Result<f64, KernelError> {
    if !(y3 > 0.0) {
        return Err(KernelError::NonPositiveHeight(y3));
    }
    let dx = xp[0] - yp[0];
    let dy = xp[1] - yp[1];
    let r2 = dx * dx + dy * dy + y3 * y3;
    Ok(y3 / (2.0 * PI * r2 * r2.sqrt()))
}

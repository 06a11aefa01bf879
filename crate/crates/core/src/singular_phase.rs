//! The singular part `H_S(x) = int_{dOmega} P_S(x, y) f(y) dy` of the
//! solution, where `P_S = -dS/dn_y` is the image-sum Poisson density.
//!
//! At interior points each face integral is a nearly singular integral peaked
//! at the projection of `x`. At a point `x` on an open face `F` the images of
//! `y` that do not involve the plane opposite to `F` cancel in pairs for every
//! `y != x` on `F`, and their limit is a point mass `f(x)`. What is left is
//! regular: the nine opposite-plane images on `F` and the full kernel on the
//! other five faces, which are at positive distance from `x`.

use thiserror::Error;

use crate::geometry::{locate_on_face, BoundaryData, Face, GeometryError, Point3, PLANE_TOLERANCE};
use crate::kernels::{poisson_density, ImageFilter};
use crate::quadrature::{integrate_face, near_singular_plan, QuadratureError, QuadraturePlan};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SingularError {
    #[error("point ({}, {}, {}) is not strictly inside the cube", .0.x, .0.y, .0.z)]
    NotInterior(Point3),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("face {face}: {source}")]
    Quadrature {
        face: &'static str,
        #[source]
        source: QuadratureError,
    },
}

/// An evaluation of `H_S` with a summary of the quadrature used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularEval {
    pub value: f64,
    /// Refinement depth of the plan used on each face (0 for faces skipped
    /// because the data vanish there, or integrated with a single patch).
    pub depths: [usize; 6],
    /// Distance from the evaluation point to the boundary.
    pub distance: f64,
}

/// Split of a boundary value of `H_S` into the point mass and the regular rest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySplit {
    pub face: Face,
    /// `f(x)`, the limit of the concentrating image pairs.
    pub point_mass: f64,
    /// Quadrature of all regular contributions.
    pub regular: f64,
    pub depths: [usize; 6],
}

fn face_integral(
    x: Point3,
    face: Face,
    filter: ImageFilter,
    data: &BoundaryData,
    base_k: usize,
) -> Result<(f64, usize), SingularError> {
    let (a, b) = face.project(x);
    let plan = match filter {
        // the opposite-plane images are at distance >= 2
        ImageFilter::Opposite(_) => QuadraturePlan::single(base_k),
        ImageFilter::All => near_singular_plan(a.clamp(0.0, 1.0), b.clamp(0.0, 1.0), face.plane_distance(x), base_k),
    }
    .map_err(|source| SingularError::Quadrature { face: face.name(), source })?;
    let value = match data {
        // constant on the face: integrate the density alone
        BoundaryData::PiecewiseConstant { faces } => {
            let mass = integrate_face(
                |s, t| poisson_density(x, face, face.point_unchecked(s, t), filter),
                &plan,
            );
            faces[face.index()] * mass.map_err(|source| SingularError::Quadrature { face: face.name(), source })?
        }
        BoundaryData::Trace { .. } => integrate_face(
            |s, t| poisson_density(x, face, face.point_unchecked(s, t), filter) * data.face_value(face, s, t),
            &plan,
        )
        .map_err(|source| SingularError::Quadrature { face: face.name(), source })?,
    };
    Ok((value, plan.depth))
}

/// `H_S(x)` for `x` strictly inside the cube.
pub fn hs_interior(x: Point3, data: &BoundaryData, base_k: usize) -> Result<SingularEval, SingularError> {
    if !x.is_strictly_inside_cube() {
        return Err(SingularError::NotInterior(x));
    }
    let mut value = 0.0;
    let mut depths = [0; 6];
    for face in Face::ALL {
        if data.vanishes_on(face) {
            continue;
        }
        let (v, depth) = face_integral(x, face, ImageFilter::All, data, base_k)?;
        value += v;
        depths[face.index()] = depth;
    }
    Ok(SingularEval {
        value,
        depths,
        distance: x.boundary_distance(),
    })
}

/// The point mass and regular part of `H_S` at a point of an open face.
pub fn hs_boundary_split(x: Point3, data: &BoundaryData, base_k: usize) -> Result<BoundarySplit, SingularError> {
    let (face, s, t) = locate_on_face(x)?;
    let x = face.point_unchecked(s, t);
    let mut regular = 0.0;
    let mut depths = [0; 6];
    for g in Face::ALL {
        if data.vanishes_on(g) {
            continue;
        }
        let filter = if g == face {
            ImageFilter::Opposite(face)
        } else {
            ImageFilter::All
        };
        let (v, depth) = face_integral(x, g, filter, data, base_k)?;
        regular += v;
        depths[g.index()] = depth;
    }
    Ok(BoundarySplit {
        face,
        point_mass: data.face_value(face, s, t),
        regular,
        depths,
    })
}

/// `H_S` at a point of an open face, as the one-sided limit from inside.
pub fn hs_boundary(x: Point3, data: &BoundaryData, base_k: usize) -> Result<SingularEval, SingularError> {
    let split = hs_boundary_split(x, data, base_k)?;
    Ok(SingularEval {
        value: split.point_mass + split.regular,
        depths: split.depths,
        distance: 0.0,
    })
}

/// Step used by [`regular_boundary_value`] when extrapolating to edges.
pub const EDGE_EXTRAPOLATION_STEP: f64 = 0.02;

/// `H_R = f - H_S` at any boundary point, vertices and edges included.
///
/// On an open face this is minus the regular part of [`hs_boundary_split`].
/// `H_R` is smooth up to the edges, so at an edge or vertex it is
/// extrapolated from four points moving into the lowest-indexed face that
/// contains `p`, at multiples of [`EDGE_EXTRAPOLATION_STEP`].
pub fn regular_boundary_value(p: Point3, data: &BoundaryData, base_k: usize) -> Result<f64, SingularError> {
    match locate_on_face(p) {
        Ok(_) => Ok(-hs_boundary_split(p, data, base_k)?.regular),
        Err(GeometryError::OnEdge(_)) => {
            let face = Face::ALL
                .into_iter()
                .find(|f| f.plane_distance(p) <= PLANE_TOLERANCE)
                .ok_or(GeometryError::NotOnBoundary(p))?;
            let (s, t) = face.project(p);
            let inward = |c: f64| {
                if c <= PLANE_TOLERANCE {
                    1.0
                } else if c >= 1.0 - PLANE_TOLERANCE {
                    -1.0
                } else {
                    0.0
                }
            };
            let (ds, dt) = (inward(s), inward(t));
            let mut samples = [0.0; 4];
            for (k, v) in samples.iter_mut().enumerate() {
                let h = EDGE_EXTRAPOLATION_STEP * (k + 1) as f64;
                let q = face.point_unchecked(s + ds * h, t + dt * h);
                *v = -hs_boundary_split(q, data, base_k)?.regular;
            }
            // cubic extrapolation to zero offset
            Ok(4.0 * samples[0] - 6.0 * samples[1] + 4.0 * samples[2] - samples[3])
        }
        Err(e) => Err(e.into()),
    }
}

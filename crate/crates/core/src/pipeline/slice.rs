use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{evaluate, PipelineError, Solution};
use crate::geometry::Point3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlicePoint {
    pub point: Point3,
    pub value: f64,
}

/// Samples `u_N` on the triangle cut off a cube vertex by the plane normal to
/// the vertex diagonal at Euclidean distance `distance` from the vertex.
///
/// The triangle is split into `resolution^2` congruent sub-triangles and each
/// is sampled at its centroid. Order: rows `j = 0..resolution`, and within a
/// row the upward triangle `i` followed by the downward triangle `i`.
pub fn corner_slice(
    sol: &Solution,
    corner: Point3,
    distance: f64,
    resolution: usize,
) -> Result<Vec<SlicePoint>, PipelineError> {
    let c = corner.to_array();
    if c.iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(PipelineError::Slice(format!("{corner:?} is not a cube vertex")));
    }
    if !(distance > 0.0 && distance < 0.5) {
        return Err(PipelineError::Slice(format!("distance must be in (0, 0.5), got {distance}")));
    }
    if resolution == 0 {
        return Err(PipelineError::Slice("resolution must be positive".into()));
    }
    // legs along the three edges leaving the vertex
    let leg = distance * 3f64.sqrt();
    let vertex = |axis: usize| {
        let dir = if c[axis] == 0.0 { 1.0 } else { -1.0 };
        corner.with_coord(axis, c[axis] + dir * leg)
    };
    let (a, b, cc) = (vertex(0), vertex(1), vertex(2));
    let r = resolution as f64;
    let lattice = |i: usize, j: usize| a + (b - a) * (i as f64 / r) + (cc - a) * (j as f64 / r);

    let mut samples = Vec::with_capacity(resolution * resolution);
    for j in 0..resolution {
        for i in 0..resolution - j {
            let up = (lattice(i, j) + lattice(i + 1, j) + lattice(i, j + 1)) * (1.0 / 3.0);
            samples.push(up);
            if i + j + 2 <= resolution {
                let down = (lattice(i + 1, j) + lattice(i, j + 1) + lattice(i + 1, j + 1)) * (1.0 / 3.0);
                samples.push(down);
            }
        }
    }
    samples
        .into_par_iter()
        .filter(|p| p.is_strictly_inside_cube())
        .map(|p| evaluate(sol, p).map(|value| SlicePoint { point: p, value }))
        .collect()
}

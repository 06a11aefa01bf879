//! Inputs shared by the benchmarks.

use sr_dirichlet::geometry::uniform_collocation;
use sr_dirichlet::regular_phase::ResidualData;
use sr_dirichlet::{HarmonicTarget, Point3, CUBE_CENTER};

/// Exact `target` values at the `6 n^2` collocation points.
pub fn trace_residual(n: usize, target: HarmonicTarget) -> ResidualData {
    let colloc = uniform_collocation(n).expect("n is positive");
    let values = colloc.positions().map(|p| target.eval_local(p - CUBE_CENTER)).collect();
    ResidualData::new(colloc, values).expect("one finite value per point")
}

/// Interior points at boundary distance `d` below the top face center and
/// near an edge.
pub fn probe_points(d: f64) -> [Point3; 2] {
    [Point3::new(0.5, 0.5, 1.0 - d), Point3::new(0.5, 1.0 - 2.0 * d, 1.0 - d)]
}

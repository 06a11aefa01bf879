use nalgebra::{DMatrix, DVector};

use super::{BackendKind, HarmonicApproximant, RegularError, ResidualData, SolveDiagnostics};
use crate::geometry::{CollocationSet, Point3, CUBE_CENTER};
use crate::kernels::phi;

/// Relative singular value cutoff of the optional truncated-SVD solve.
pub const TSVD_THRESHOLD: f64 = 1e-12;

const MIN_PIVOT: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MfsOptions {
    pub alpha: f64,
    /// Solve by truncated SVD instead of LU.
    pub truncated_svd: bool,
}

impl MfsOptions {
    pub fn new(alpha: f64) -> Self {
        MfsOptions {
            alpha,
            truncated_svd: false,
        }
    }
}

/// Sources `c + alpha (x_i - c)` with `c` the cube center.
///
/// Fails when `alpha` is so close to 1 that a source rounds onto the cube.
pub fn mfs_sources(colloc: &CollocationSet, alpha: f64) -> Result<Vec<Point3>, RegularError> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(RegularError::Alpha(alpha));
    }
    let sources: Vec<Point3> = colloc
        .positions()
        .map(|x| CUBE_CENTER + (x - CUBE_CENTER) * alpha)
        .collect();
    let outside = |p: &Point3| p.to_array().iter().any(|c| !(0.0..=1.0).contains(c));
    if !sources.iter().all(outside) {
        return Err(RegularError::Alpha(alpha));
    }
    Ok(sources)
}

pub(super) fn eval(sources: &[Point3], coefficients: &[f64], x: Point3) -> f64 {
    sources
        .iter()
        .zip(coefficients)
        .map(|(p, c)| c / (4.0 * std::f64::consts::PI * x.distance(*p)))
        .sum()
}

fn l1_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Interpolates the residual values with point sources at scaling `alpha`.
pub fn build_mfs(data: &ResidualData, alpha: f64) -> Result<(HarmonicApproximant, SolveDiagnostics), RegularError> {
    build_mfs_with(data, &MfsOptions::new(alpha))
}

pub fn build_mfs_with(
    data: &ResidualData,
    opts: &MfsOptions,
) -> Result<(HarmonicApproximant, SolveDiagnostics), RegularError> {
    let sources = mfs_sources(&data.collocation, opts.alpha)?;
    let points: Vec<Point3> = data.collocation.positions().collect();
    let n = points.len();
    let a = DMatrix::from_fn(n, n, |i, j| {
        phi(points[i].distance(sources[j])).expect("sources lie outside the cube")
    });
    let b = DVector::from_column_slice(&data.values);

    let singular_values = a.clone().svd(false, false).singular_values;
    let smax = singular_values.max();
    let smin = singular_values.min();
    let mut diagnostics = SolveDiagnostics {
        backend: BackendKind::Mfs,
        n,
        condition: smax / smin,
        condition_l1: None,
        residual: 0.0,
        rank: None,
    };

    let coefficients: DVector<f64> = if opts.truncated_svd {
        let svd = a.clone().svd(true, true);
        let cutoff = TSVD_THRESHOLD * smax;
        diagnostics.rank = Some(svd.singular_values.iter().filter(|&&s| s > cutoff).count());
        svd.solve(&b, cutoff).map_err(|_| RegularError::Singular {
            pivot: smin,
            diagnostics: Box::new(diagnostics.clone()),
        })?
    } else {
        let lu = a.clone().lu();
        let pivot = lu.u().diagonal().iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        if pivot < MIN_PIVOT {
            return Err(RegularError::Singular {
                pivot,
                diagnostics: Box::new(diagnostics),
            });
        }
        if let Some(inv) = lu.try_inverse() {
            diagnostics.condition_l1 = Some(l1_norm(&a) * l1_norm(&inv));
        }
        lu.solve(&b).ok_or_else(|| RegularError::Singular {
            pivot,
            diagnostics: Box::new(diagnostics.clone()),
        })?
    };

    let coefficients: Vec<f64> = coefficients.iter().copied().collect();
    diagnostics.residual = points
        .iter()
        .zip(&data.values)
        .map(|(x, v)| (eval(&sources, &coefficients, *x) - v).abs())
        .fold(0.0, f64::max);
    Ok((
        HarmonicApproximant::Mfs {
            alpha: opts.alpha,
            sources,
            coefficients,
        },
        diagnostics,
    ))
}

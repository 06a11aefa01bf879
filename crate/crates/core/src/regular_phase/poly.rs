use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::{BackendKind, HarmonicApproximant, RegularError, ResidualData, SolveDiagnostics};
use crate::geometry::{Point3, CUBE_CENTER};

/// `(degree + 1)^2`.
pub fn solid_harmonic_count(degree: usize) -> usize {
    (degree + 1) * (degree + 1)
}

/// Orthonormalized real solid harmonics `N_lm r^l P_l^m(cos theta) {cos, sin}(m phi)`
/// at `q`, for `l = 0..=degree`, `m = 0..=l`, cosine before sine (no sine
/// for `m = 0`).
///
/// Computed without angles: `r^l P_l^m e^{i m phi} = (x + i y)^m q_l^m(z, r^2)`
/// where `q_m^m = (-1)^m (2m-1)!!` and
/// `(l - m) q_l^m = (2l - 1) z q_{l-1}^m - (l + m - 1) r^2 q_{l-2}^m`.
pub fn solid_harmonics(q: Point3, degree: usize) -> Vec<f64> {
    let r2 = q.dot(q);
    let size = degree + 1;
    // (x + i y)^m
    let mut re = vec![1.0; size];
    let mut im = vec![0.0; size];
    for m in 1..size {
        re[m] = re[m - 1] * q.x - im[m - 1] * q.y;
        im[m] = re[m - 1] * q.y + im[m - 1] * q.x;
    }
    // qlm[l][m]
    let mut qlm = vec![vec![0.0; size]; size];
    let mut diag = 1.0;
    for m in 0..size {
        if m > 0 {
            diag *= -((2 * m - 1) as f64);
        }
        qlm[m][m] = diag;
        if m + 1 < size {
            qlm[m + 1][m] = (2 * m + 1) as f64 * q.z * diag;
        }
        for l in m + 2..size {
            qlm[l][m] = ((2 * l - 1) as f64 * q.z * qlm[l - 1][m] - (l + m - 1) as f64 * r2 * qlm[l - 2][m])
                / (l - m) as f64;
        }
    }
    let mut out = Vec::with_capacity(solid_harmonic_count(degree));
    for (l, row) in qlm.iter().enumerate() {
        for m in 0..=l {
            // (l - m)! / (l + m)!
            let ratio: f64 = ((l - m + 1)..=(l + m)).map(|k| 1.0 / k as f64).product();
            let norm = ((2 * l + 1) as f64 / (4.0 * PI) * ratio).sqrt();
            out.push(norm * row[m] * re[m]);
            if m > 0 {
                out.push(norm * row[m] * im[m]);
            }
        }
    }
    out
}

/// Least-squares fit of solid harmonics up to `degree` about the cube center.
///
/// Solved through the SVD with singular values below
/// `eps * max(rows, cols) * sigma_max` discarded. The reported condition is
/// `|r_11| / |r_nn|` from a column-pivoted QR factorization, a lower bound on
/// the 2-norm condition that stays finite when the basis is numerically rank
/// deficient.
pub fn build_poly(data: &ResidualData, degree: usize) -> Result<(HarmonicApproximant, SolveDiagnostics), RegularError> {
    let points: Vec<Point3> = data.collocation.positions().collect();
    let rows = points.len();
    let cols = solid_harmonic_count(degree);
    if cols > rows {
        return Err(RegularError::DegreeTooLarge {
            degree,
            needed: cols,
            available: rows,
        });
    }
    let mut a = DMatrix::zeros(rows, cols);
    for (i, x) in points.iter().enumerate() {
        for (j, v) in solid_harmonics(*x - CUBE_CENTER, degree).into_iter().enumerate() {
            a[(i, j)] = v;
        }
    }
    let r_diag: Vec<f64> = a.clone().col_piv_qr().r().diagonal().iter().map(|v| v.abs()).collect();
    let condition = r_diag[0] / r_diag[cols - 1];
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let cutoff = f64::EPSILON * rows.max(cols) as f64 * smax;
    let rank = svd.singular_values.iter().filter(|&&s| s > cutoff).count();
    let b = DVector::from_column_slice(&data.values);
    let mut diagnostics = SolveDiagnostics {
        backend: BackendKind::Poly,
        n: rows,
        condition,
        condition_l1: None,
        residual: 0.0,
        rank: Some(rank),
    };
    let x = svd.solve(&b, cutoff).map_err(|_| RegularError::Singular {
        pivot: smin,
        diagnostics: Box::new(diagnostics.clone()),
    })?;
    let approximant = HarmonicApproximant::Poly {
        degree,
        center: CUBE_CENTER,
        coefficients: x.iter().copied().collect(),
    };
    diagnostics.residual = points
        .iter()
        .zip(&data.values)
        .map(|(p, v)| (super::eval_approximant(&approximant, *p) - v).abs())
        .fold(0.0, f64::max);
    Ok((approximant, diagnostics))
}

//! Tensor Chebyshev collocation for the Laplace equation on the cube.
//!
//! Unknowns are the values at the interior Chebyshev-Gauss-Lobatto nodes.
//! The discrete Laplacian is the Kronecker sum of one interior block `A` of
//! the second-derivative matrix, so with `A = E diag(lambda) E^-1` the system
//! is solved by transforming each axis with `E^-1`, dividing by
//! `lambda_i + lambda_j + lambda_k`, and transforming back.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::{BackendKind, HarmonicApproximant, RegularError, SolveDiagnostics};
use crate::geometry::Point3;

pub const MAX_CHEB_ORDER: usize = 24;

/// Nodes `x_i = (1 + cos(i pi / order)) / 2`, `i = 0..=order` (descending).
pub fn cheb_nodes(order: usize) -> Vec<f64> {
    (0..=order)
        .map(|i| 0.5 * (1.0 + (i as f64 * PI / order as f64).cos()))
        .collect()
}

/// A boundary node of the tensor grid and its flat index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChebBoundaryNode {
    pub index: usize,
    pub point: Point3,
}

fn check_order(order: usize) -> Result<(), RegularError> {
    if !(2..=MAX_CHEB_ORDER).contains(&order) {
        return Err(RegularError::ChebOrder(order));
    }
    Ok(())
}

/// All grid nodes with some index equal to `0` or `order`, in flat order.
pub fn cheb_boundary_nodes(order: usize) -> Result<Vec<ChebBoundaryNode>, RegularError> {
    check_order(order)?;
    let x = cheb_nodes(order);
    let n1 = order + 1;
    let edge = |i: usize| i == 0 || i == order;
    let mut out = Vec::new();
    for i in 0..n1 {
        for j in 0..n1 {
            for k in 0..n1 {
                if edge(i) || edge(j) || edge(k) {
                    out.push(ChebBoundaryNode {
                        index: (i * n1 + j) * n1 + k,
                        point: Point3::new(x[i], x[j], x[k]),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Second-derivative matrix on `[0,1]` at [`cheb_nodes`].
fn second_derivative(order: usize) -> DMatrix<f64> {
    let n1 = order + 1;
    let xi: Vec<f64> = (0..n1).map(|i| (i as f64 * PI / order as f64).cos()).collect();
    let c = |i: usize| if i == 0 || i == order { 2.0 } else { 1.0 };
    let mut d = DMatrix::zeros(n1, n1);
    for i in 0..n1 {
        let mut row = 0.0;
        for j in 0..n1 {
            if i != j {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                let v = c(i) / c(j) * sign / (xi[i] - xi[j]);
                d[(i, j)] = v;
                row += v;
            }
        }
        d[(i, i)] = -row;
    }
    // d/dx = 2 d/dxi on [0,1]
    let d = d * 2.0;
    &d * &d
}

fn eigen_decomposition(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>), RegularError> {
    let m = a.nrows();
    let mut lambda: Vec<f64> = a
        .clone()
        .schur()
        .eigenvalues()
        .ok_or(RegularError::Eigen)?
        .iter()
        .copied()
        .collect();
    lambda.sort_by(f64::total_cmp);
    let scale = lambda.iter().fold(1.0f64, |s, l| s.max(l.abs()));
    let mut vectors = DMatrix::zeros(m, m);
    for (k, &l) in lambda.iter().enumerate() {
        let shifted = a - DMatrix::identity(m, m) * (l + 1e-10 * scale);
        let lu = shifted.lu();
        let mut v = nalgebra::DVector::from_fn(m, |i, _| 1.0 + 0.1 * ((i * 7 + 3) % 11) as f64);
        for _ in 0..3 {
            v = lu.solve(&v).ok_or(RegularError::Eigen)?;
            let norm = v.norm();
            if !norm.is_finite() || norm == 0.0 {
                return Err(RegularError::Eigen);
            }
            v /= norm;
        }
        vectors.set_column(k, &v);
    }
    Ok((lambda, vectors))
}

// applies `m` along `axis` of an (n x n x n) array stored with axis 0 slowest
fn apply_axis(m: &DMatrix<f64>, data: &[f64], n: usize, axis: usize) -> Vec<f64> {
    let mut out = vec![0.0; data.len()];
    let stride = [n * n, n, 1];
    for a in 0..n {
        for b in 0..n {
            // the two other axes
            let base = match axis {
                0 => a * stride[1] + b * stride[2],
                1 => a * stride[0] + b * stride[2],
                _ => a * stride[0] + b * stride[1],
            };
            let s = stride[axis];
            for i in 0..n {
                let mut acc = 0.0;
                for j in 0..n {
                    acc += m[(i, j)] * data[base + j * s];
                }
                out[base + i * s] = acc;
            }
        }
    }
    out
}

fn condition_2(m: &DMatrix<f64>) -> f64 {
    let s = m.clone().svd(false, false).singular_values;
    s.max() / s.min()
}

/// Solves the collocation system for boundary `values` given in
/// [`cheb_boundary_nodes`] order.
///
/// The residual reported in the diagnostics is the largest interior value of
/// the discrete Laplacian of the solution; boundary values are reproduced
/// exactly.
pub fn build_cheb(order: usize, values: &[f64]) -> Result<(HarmonicApproximant, SolveDiagnostics), RegularError> {
    let nodes = cheb_boundary_nodes(order)?;
    if values.len() != nodes.len() {
        return Err(RegularError::ValueCount {
            expected: nodes.len(),
            got: values.len(),
        });
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(RegularError::NonFinite(i));
    }
    let n1 = order + 1;
    let m = order - 1;
    let mut grid = vec![0.0; n1 * n1 * n1];
    for (node, v) in nodes.iter().zip(values) {
        grid[node.index] = *v;
    }
    let at = |i: usize, j: usize, k: usize| (i * n1 + j) * n1 + k;

    let d2 = second_derivative(order);
    let block = d2.view((1, 1), (m, m)).into_owned();
    let mut rhs = vec![0.0; m * m * m];
    for i in 1..order {
        for j in 1..order {
            for k in 1..order {
                let mut acc = 0.0;
                for b in [0, order] {
                    acc += d2[(i, b)] * grid[at(b, j, k)];
                    acc += d2[(j, b)] * grid[at(i, b, k)];
                    acc += d2[(k, b)] * grid[at(i, j, b)];
                }
                rhs[((i - 1) * m + (j - 1)) * m + (k - 1)] = -acc;
            }
        }
    }

    let (lambda, e) = eigen_decomposition(&block)?;
    let e_inv = e.clone().lu().try_inverse().ok_or(RegularError::Eigen)?;
    let mut g = rhs;
    for axis in 0..3 {
        g = apply_axis(&e_inv, &g, m, axis);
    }
    let (mut smallest, mut largest) = (f64::INFINITY, 0.0f64);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let s = lambda[i] + lambda[j] + lambda[k];
                smallest = smallest.min(s.abs());
                largest = largest.max(s.abs());
                if s.abs() < 1e-300 {
                    return Err(RegularError::Singular {
                        pivot: s.abs(),
                        diagnostics: Box::new(SolveDiagnostics {
                            backend: BackendKind::Cheb,
                            n: values.len(),
                            condition: f64::INFINITY,
                            condition_l1: None,
                            residual: f64::NAN,
                            rank: None,
                        }),
                    });
                }
                g[(i * m + j) * m + k] /= s;
            }
        }
    }
    for axis in 0..3 {
        g = apply_axis(&e, &g, m, axis);
    }
    for i in 1..order {
        for j in 1..order {
            for k in 1..order {
                grid[at(i, j, k)] = g[((i - 1) * m + (j - 1)) * m + (k - 1)];
            }
        }
    }

    let mut residual: f64 = 0.0;
    for i in 1..order {
        for j in 1..order {
            for k in 1..order {
                let mut lap = 0.0;
                for q in 0..n1 {
                    lap += d2[(i, q)] * grid[at(q, j, k)] + d2[(j, q)] * grid[at(i, q, k)] + d2[(k, q)] * grid[at(i, j, q)];
                }
                residual = residual.max(lap.abs());
            }
        }
    }
    let diagnostics = SolveDiagnostics {
        backend: BackendKind::Cheb,
        n: values.len(),
        condition: condition_2(&e).powi(3) * largest / smallest,
        condition_l1: None,
        residual,
        rank: None,
    };
    Ok((HarmonicApproximant::Cheb { order, values: grid }, diagnostics))
}

/// Barycentric Lagrange basis at `x` for the nodes of `order`.
fn lagrange_basis(order: usize, nodes: &[f64], x: f64) -> Vec<f64> {
    let w = |j: usize| {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        if j == 0 || j == order {
            0.5 * sign
        } else {
            sign
        }
    };
    if let Some(hit) = nodes.iter().position(|&xj| xj == x) {
        let mut out = vec![0.0; nodes.len()];
        out[hit] = 1.0;
        return out;
    }
    let terms: Vec<f64> = nodes.iter().enumerate().map(|(j, &xj)| w(j) / (x - xj)).collect();
    let total: f64 = terms.iter().sum();
    terms.into_iter().map(|t| t / total).collect()
}

pub(super) fn eval(order: usize, values: &[f64], p: Point3) -> f64 {
    let nodes = cheb_nodes(order);
    let lx = lagrange_basis(order, &nodes, p.x);
    let ly = lagrange_basis(order, &nodes, p.y);
    let lz = lagrange_basis(order, &nodes, p.z);
    let n1 = order + 1;
    let mut total = 0.0;
    for (i, a) in lx.iter().enumerate() {
        let mut plane = 0.0;
        for (j, b) in ly.iter().enumerate() {
            let row = &values[(i * n1 + j) * n1..(i * n1 + j + 1) * n1];
            let line: f64 = row.iter().zip(&lz).map(|(v, c)| v * c).sum();
            plane += b * line;
        }
        total += a * plane;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{HarmonicTarget, CUBE_CENTER};
    use crate::regular_phase::eval_approximant;

    fn fit(order: usize, f: impl Fn(Point3) -> f64) -> (HarmonicApproximant, SolveDiagnostics) {
        let values: Vec<f64> = cheb_boundary_nodes(order).unwrap().iter().map(|n| f(n.point)).collect();
        build_cheb(order, &values).unwrap()
    }

    fn u1(p: Point3) -> f64 {
        HarmonicTarget::U1.eval_local(p - CUBE_CENTER)
    }

    fn interior_error(p: &HarmonicApproximant) -> f64 {
        let mut err: f64 = 0.0;
        for i in 1..10 {
            for j in 1..10 {
                for k in 1..10 {
                    let x = Point3::new(i as f64 / 10.0, j as f64 / 10.0, k as f64 / 10.0);
                    err = err.max((eval_approximant(p, x) - u1(x)).abs());
                }
            }
        }
        err
    }

    #[test]
    fn nodes_and_boundary_count() {
        let x = cheb_nodes(4);
        assert_eq!(x[0], 1.0);
        assert!(x[4].abs() < 1e-16);
        assert!((x[2] - 0.5).abs() < 1e-16);
        assert_eq!(cheb_boundary_nodes(4).unwrap().len(), 125 - 27);
        assert!(cheb_boundary_nodes(1).is_err());
        assert!(cheb_boundary_nodes(25).is_err());
    }

    #[test]
    fn differentiation_is_exact_for_polynomials() {
        let order = 8;
        let x = cheb_nodes(order);
        let d2 = second_derivative(order);
        for i in 0..=order {
            let acc: f64 = (0..=order).map(|j| d2[(i, j)] * x[j].powi(4)).sum();
            assert!((acc - 12.0 * x[i] * x[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn constants_are_reproduced() {
        let (p, _) = fit(10, |_| 1.0);
        for x in [Point3::new(0.3, 0.4, 0.5), Point3::new(0.01, 0.99, 0.5)] {
            assert!((eval_approximant(&p, x) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn spectral_accuracy_for_u1() {
        let (p12, d) = fit(12, u1);
        assert!(interior_error(&p12) <= 1e-8, "{}", interior_error(&p12));
        assert!(d.residual < 1e-6 && d.condition >= 1.0);
        let e8 = interior_error(&fit(8, u1).0);
        let e16 = interior_error(&fit(16, u1).0);
        assert!(e16 < e8, "{e16} vs {e8}");
    }

    #[test]
    fn value_count_checked() {
        assert!(matches!(build_cheb(4, &[0.0; 3]), Err(RegularError::ValueCount { .. })));
    }
}

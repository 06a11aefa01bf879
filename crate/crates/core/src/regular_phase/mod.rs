//! Harmonic approximants `P_N` of the regular part `H_R` from boundary values.
//!
//! Three backends share one representation: point sources outside the cube
//! (method of fundamental solutions), real solid harmonics about the cube
//! center fitted by least squares, and tensor Chebyshev collocation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{CollocationSet, Point3};

mod cheb;
mod mfs;
mod poly;

pub use cheb::{build_cheb, cheb_boundary_nodes, cheb_nodes, ChebBoundaryNode, MAX_CHEB_ORDER};
pub use mfs::{build_mfs, build_mfs_with, mfs_sources, MfsOptions, TSVD_THRESHOLD};
pub use poly::{build_poly, solid_harmonic_count, solid_harmonics};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Mfs,
    Poly,
    Cheb,
}

impl BackendKind {
    pub fn name(self) -> &'static str {
        match self {
            BackendKind::Mfs => "mfs",
            BackendKind::Poly => "poly",
            BackendKind::Cheb => "cheb",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegularError {
    #[error("source scaling alpha must exceed 1, got {0}")]
    Alpha(f64),
    #[error("collocation matrix is numerically singular (pivot {pivot:e})")]
    Singular {
        pivot: f64,
        diagnostics: Box<SolveDiagnostics>,
    },
    #[error("degree {degree} needs {needed} coefficients but only {available} values are given")]
    DegreeTooLarge {
        degree: usize,
        needed: usize,
        available: usize,
    },
    #[error("Chebyshev order must be in 2..={MAX_CHEB_ORDER}, got {0}")]
    ChebOrder(usize),
    #[error("expected {expected} values, got {got}")]
    ValueCount { expected: usize, got: usize },
    #[error("non-finite value at position {0}")]
    NonFinite(usize),
    #[error("eigen decomposition of the differentiation matrix failed")]
    Eigen,
}

/// Values of `H_R` at the collocation points.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualData {
    pub collocation: CollocationSet,
    pub values: Vec<f64>,
}

impl ResidualData {
    pub fn new(collocation: CollocationSet, values: Vec<f64>) -> Result<Self, RegularError> {
        if values.len() != collocation.len() {
            return Err(RegularError::ValueCount {
                expected: collocation.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(RegularError::NonFinite(i));
        }
        Ok(ResidualData { collocation, values })
    }
}

/// A harmonic function ready for evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum HarmonicApproximant {
    Mfs {
        alpha: f64,
        sources: Vec<Point3>,
        coefficients: Vec<f64>,
    },
    Poly {
        degree: usize,
        center: Point3,
        /// `(degree + 1)^2` values in [`solid_harmonics`] order.
        coefficients: Vec<f64>,
    },
    Cheb {
        order: usize,
        /// Values on the `(order + 1)^3` node grid, `x` index slowest.
        values: Vec<f64>,
    },
}

impl HarmonicApproximant {
    pub fn kind(&self) -> BackendKind {
        match self {
            HarmonicApproximant::Mfs { .. } => BackendKind::Mfs,
            HarmonicApproximant::Poly { .. } => BackendKind::Poly,
            HarmonicApproximant::Cheb { .. } => BackendKind::Cheb,
        }
    }
}

/// Conditioning and fit quality of a solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    pub backend: BackendKind,
    /// Number of data values (collocation points or boundary nodes).
    pub n: usize,
    /// 2-norm condition number of the system matrix (ratio of extreme
    /// singular values; an estimate for the Chebyshev backend).
    pub condition: f64,
    /// 1-norm condition number `|A|_1 |A^-1|_1`, square systems only.
    pub condition_l1: Option<f64>,
    /// Max interpolation residual over the data points.
    pub residual: f64,
    /// Numerical rank used by least-squares or truncated solves.
    pub rank: Option<usize>,
}

/// `P(x)`.
pub fn eval_approximant(p: &HarmonicApproximant, x: Point3) -> f64 {
    match p {
        HarmonicApproximant::Mfs {
            sources,
            coefficients,
            ..
        } => mfs::eval(sources, coefficients, x),
        HarmonicApproximant::Poly {
            degree,
            center,
            coefficients,
        } => solid_harmonics(x - *center, *degree)
            .iter()
            .zip(coefficients)
            .map(|(b, c)| b * c)
            .sum(),
        HarmonicApproximant::Cheb { order, values } => cheb::eval(*order, values, x),
    }
}

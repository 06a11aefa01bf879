//! The singular-regular procedure end to end.
//!
//! [`solve`] selects collocation points, evaluates the boundary values of
//! `H_S` there, forms the residuals `H_R = f - H_S`, fits a harmonic
//! approximant `P_N` to them and optionally assesses it on reference points.
//! [`evaluate`] then returns `u_N(x) = H_S(x) + P_N(x)` at interior points.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error_estimation::{assess, ErrorEstimationError, ErrorReport};
use crate::geometry::{
    midpoint_reference, uniform_collocation, BoundaryData, GeometryError, HarmonicTarget, Point3, CUBE_CENTER,
};
use crate::quadrature::{DEFAULT_BASE_K, MAX_GAUSS_ORDER};
use crate::regular_phase::{
    build_cheb, build_mfs_with, build_poly, cheb_boundary_nodes, eval_approximant, solid_harmonic_count,
    BackendKind, HarmonicApproximant, MfsOptions, RegularError, ResidualData, SolveDiagnostics, MAX_CHEB_ORDER,
};
use crate::singular_phase::{hs_interior, regular_boundary_value, SingularError};

mod io;
mod slice;

pub use io::{load_solution, save_solution, SOLUTION_MAGIC};
pub use slice::{corner_slice, SlicePoint};

/// Largest accepted per-face collocation parameter.
pub const MAX_COLLOCATION_N: usize = 24;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error("step 1 (collocation): {0}")]
    Collocation(#[source] GeometryError),
    #[error("step 2 (boundary values of H_S) at {point:?}: {source}")]
    Boundary {
        point: Point3,
        #[source]
        source: SingularError,
    },
    #[error("step 3 (residuals): {0}")]
    Residual(#[source] RegularError),
    #[error("step 4 (approximant): {0}")]
    Approximant(#[source] RegularError),
    #[error("reference assessment at {point:?}: {source}")]
    Reference {
        point: Point3,
        #[source]
        source: SingularError,
    },
    #[error("reference assessment: {0}")]
    Estimate(#[from] ErrorEstimationError),
    #[error("evaluation: {0}")]
    Evaluate(#[source] SingularError),
    #[error("corner slice: {0}")]
    Slice(String),
    #[error("solution file line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl PipelineError {
    /// True for failures of a numerical step, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            PipelineError::Boundary { .. }
                | PipelineError::Residual(_)
                | PipelineError::Approximant(_)
                | PipelineError::Reference { .. }
                | PipelineError::Estimate(_)
                | PipelineError::Evaluate(_)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BackendSpec {
    Mfs {
        alpha: f64,
        #[serde(default)]
        truncated_svd: bool,
    },
    Poly {
        degree: usize,
    },
    Cheb {
        order: usize,
    },
}

impl BackendSpec {
    pub fn kind(&self) -> BackendKind {
        match self {
            BackendSpec::Mfs { .. } => BackendKind::Mfs,
            BackendSpec::Poly { .. } => BackendKind::Poly,
            BackendSpec::Cheb { .. } => BackendKind::Cheb,
        }
    }
}

fn default_base_k() -> usize {
    DEFAULT_BASE_K
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub data: BoundaryData,
    /// Collocation points per face are `n x n`; also sets the reference mesh.
    pub n: usize,
    pub backend: BackendSpec,
    #[serde(default = "default_base_k")]
    pub base_k: usize,
    #[serde(default = "default_true")]
    pub estimate_error: bool,
}

impl ProblemSpec {
    pub fn new(data: BoundaryData, n: usize, backend: BackendSpec) -> Self {
        ProblemSpec {
            data,
            n,
            backend,
            base_k: DEFAULT_BASE_K,
            estimate_error: true,
        }
    }

    /// Value 1 on the top face, 0 elsewhere; 150 collocation points, MFS at
    /// `alpha = 3`.
    pub fn hot_top_face() -> Self {
        Self::new(
            BoundaryData::top_face_hot(),
            5,
            BackendSpec::Mfs {
                alpha: 3.0,
                truncated_svd: false,
            },
        )
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let invalid = |m: String| Err(PipelineError::Invalid(m));
        if let Err(e) = self.data.validate() {
            return invalid(format!("boundary data: {e}"));
        }
        if !(1..=MAX_COLLOCATION_N).contains(&self.n) {
            return invalid(format!("n must be in 1..={MAX_COLLOCATION_N}, got {}", self.n));
        }
        if !(2..=MAX_GAUSS_ORDER).contains(&self.base_k) {
            return invalid(format!("base_k must be in 2..={MAX_GAUSS_ORDER}, got {}", self.base_k));
        }
        match self.backend {
            BackendSpec::Mfs { alpha, .. } if !(alpha > 1.0 && alpha.is_finite()) => {
                invalid(format!("alpha must be a finite number above 1, got {alpha}"))
            }
            BackendSpec::Poly { degree } if solid_harmonic_count(degree) > 6 * self.n * self.n => invalid(format!(
                "degree {degree} needs {} points, only {} are collocated",
                solid_harmonic_count(degree),
                6 * self.n * self.n
            )),
            BackendSpec::Cheb { order } if !(2..=MAX_CHEB_ORDER).contains(&order) => {
                invalid(format!("Chebyshev order must be in 2..={MAX_CHEB_ORDER}, got {order}"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    /// Seconds since the Unix epoch, when recorded by the caller.
    pub created_unix: Option<u64>,
}

impl Default for Provenance {
    fn default() -> Self {
        Provenance {
            version: env!("CARGO_PKG_VERSION").to_string(),
            created_unix: None,
        }
    }
}

/// Wall-clock seconds spent in each phase of [`solve`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub boundary: f64,
    pub approximant: f64,
    pub reference: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub spec: ProblemSpec,
    pub approximant: HarmonicApproximant,
    pub diagnostics: SolveDiagnostics,
    pub error: Option<ErrorReport>,
    pub provenance: Provenance,
}

impl Solution {
    pub fn evaluate(&self, x: Point3) -> Result<f64, PipelineError> {
        evaluate(self, x)
    }
}

/// Summary written next to a solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub backend: BackendKind,
    #[serde(rename = "N")]
    pub n: usize,
    pub alpha: Option<f64>,
    pub condition: f64,
    pub residual: f64,
    pub e_max: Option<f64>,
    pub e_r: Option<f64>,
    pub timings: Timings,
}

impl SolveReport {
    pub fn new(sol: &Solution, timings: Timings) -> Self {
        SolveReport {
            backend: sol.diagnostics.backend,
            n: sol.diagnostics.n,
            alpha: match sol.spec.backend {
                BackendSpec::Mfs { alpha, .. } => Some(alpha),
                _ => None,
            },
            condition: sol.diagnostics.condition,
            residual: sol.diagnostics.residual,
            e_max: sol.error.map(|e| e.e_max),
            e_r: sol.error.map(|e| e.e_r),
            timings,
        }
    }
}

fn regular_values(points: &[Point3], data: &BoundaryData, base_k: usize) -> Result<Vec<f64>, (Point3, SingularError)> {
    points
        .par_iter()
        .map(|&p| regular_boundary_value(p, data, base_k).map_err(|e| (p, e)))
        .collect()
}

/// Runs the procedure and reports the time spent in each phase.
pub fn solve_timed(spec: &ProblemSpec) -> Result<(Solution, Timings), PipelineError> {
    spec.validate()?;
    let mut timings = Timings::default();
    let colloc = uniform_collocation(spec.n).map_err(PipelineError::Collocation)?;

    let start = Instant::now();
    let (approximant, diagnostics) = match spec.backend {
        BackendSpec::Cheb { order } => {
            let nodes = cheb_boundary_nodes(order).map_err(PipelineError::Residual)?;
            let points: Vec<Point3> = nodes.iter().map(|n| n.point).collect();
            let values = regular_values(&points, &spec.data, spec.base_k)
                .map_err(|(point, source)| PipelineError::Boundary { point, source })?;
            timings.boundary = start.elapsed().as_secs_f64();
            let start = Instant::now();
            let fit = build_cheb(order, &values).map_err(PipelineError::Approximant)?;
            timings.approximant = start.elapsed().as_secs_f64();
            fit
        }
        ref backend => {
            let points: Vec<Point3> = colloc.positions().collect();
            let values = regular_values(&points, &spec.data, spec.base_k)
                .map_err(|(point, source)| PipelineError::Boundary { point, source })?;
            let residual = ResidualData::new(colloc.clone(), values).map_err(PipelineError::Residual)?;
            timings.boundary = start.elapsed().as_secs_f64();
            let start = Instant::now();
            let fit = match *backend {
                BackendSpec::Mfs { alpha, truncated_svd } => build_mfs_with(&residual, &MfsOptions { alpha, truncated_svd }),
                BackendSpec::Poly { degree } => build_poly(&residual, degree),
                BackendSpec::Cheb { .. } => unreachable!(),
            }
            .map_err(PipelineError::Approximant)?;
            timings.approximant = start.elapsed().as_secs_f64();
            fit
        }
    };

    let error = if spec.estimate_error {
        let start = Instant::now();
        let reference = midpoint_reference(&colloc);
        let points: Vec<Point3> = reference.points().iter().map(|q| q.point).collect();
        let values = regular_values(&points, &spec.data, spec.base_k)
            .map_err(|(point, source)| PipelineError::Reference { point, source })?;
        let report = assess(&approximant, &reference, &values)?;
        timings.reference = start.elapsed().as_secs_f64();
        Some(report)
    } else {
        None
    };

    Ok((
        Solution {
            spec: spec.clone(),
            approximant,
            diagnostics,
            error,
            provenance: Provenance::default(),
        },
        timings,
    ))
}

pub fn solve(spec: &ProblemSpec) -> Result<Solution, PipelineError> {
    solve_timed(spec).map(|(s, _)| s)
}

/// `u_N(x) = H_S(x) + P_N(x)` for `x` strictly inside the cube.
pub fn evaluate(sol: &Solution, x: Point3) -> Result<f64, PipelineError> {
    let hs = hs_interior(x, &sol.spec.data, sol.spec.base_k).map_err(PipelineError::Evaluate)?;
    Ok(hs.value + eval_approximant(&sol.approximant, x))
}

/// [`evaluate`] over a batch, in input order.
pub fn evaluate_many(sol: &Solution, points: &[Point3]) -> Vec<Result<f64, PipelineError>> {
    points.par_iter().map(|&x| evaluate(sol, x)).collect()
}

/// One row of a backend comparison on an exact harmonic trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub backend: BackendKind,
    pub target: HarmonicTarget,
    /// Number of data values.
    pub points: usize,
    pub condition: f64,
    /// Max error against the target on the closed `21^3` lattice.
    pub error: f64,
}

/// Max of `|P - target|` over the lattice `i/20`, `i = 0..=20`.
pub fn lattice_error(p: &HarmonicApproximant, target: HarmonicTarget) -> f64 {
    let g: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    let planes: Vec<f64> = g
        .par_iter()
        .map(|&x| {
            let mut m: f64 = 0.0;
            for &y in &g {
                for &z in &g {
                    let q = Point3::new(x, y, z);
                    m = m.max((eval_approximant(p, q) - target.eval_local(q - CUBE_CENTER)).abs());
                }
            }
            m
        })
        .collect();
    planes.into_iter().fold(0.0, f64::max)
}

/// Fits each backend directly to the exact trace of its target, bypassing
/// the singular phase, and measures the interior error.
pub fn compare_backends(specs: &[ProblemSpec]) -> Result<Vec<ComparisonRow>, PipelineError> {
    specs
        .iter()
        .map(|spec| {
            spec.validate()?;
            let BoundaryData::Trace { function, origin } = spec.data else {
                return Err(PipelineError::Invalid("backend comparison needs trace data".into()));
            };
            if origin != CUBE_CENTER {
                return Err(PipelineError::Invalid("backend comparison uses the centered cube".into()));
            }
            let trace = |p: Point3| function.eval_local(p - CUBE_CENTER);
            let (p, d) = match spec.backend {
                BackendSpec::Cheb { order } => {
                    let nodes = cheb_boundary_nodes(order).map_err(PipelineError::Residual)?;
                    let values: Vec<f64> = nodes.iter().map(|n| trace(n.point)).collect();
                    build_cheb(order, &values)
                }
                ref backend => {
                    let colloc = uniform_collocation(spec.n).map_err(PipelineError::Collocation)?;
                    let values = colloc.positions().map(trace).collect();
                    let residual = ResidualData::new(colloc, values).map_err(PipelineError::Residual)?;
                    match *backend {
                        BackendSpec::Mfs { alpha, truncated_svd } => {
                            build_mfs_with(&residual, &MfsOptions { alpha, truncated_svd })
                        }
                        BackendSpec::Poly { degree } => build_poly(&residual, degree),
                        BackendSpec::Cheb { .. } => unreachable!(),
                    }
                }
            }
            .map_err(PipelineError::Approximant)?;
            Ok(ComparisonRow {
                backend: p.kind(),
                target: function,
                points: d.n,
                condition: d.condition,
                error: lattice_error(&p, function),
            })
        })
        .collect()
}

/// Closed acceptance interval; `None` ends are unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub low: Option<f64>,
    pub high: Option<f64>,
}

impl Band {
    pub const fn new(low: f64, high: f64) -> Self {
        Band {
            low: Some(low),
            high: Some(high),
        }
    }

    pub const fn at_most(high: f64) -> Self {
        Band { low: None, high: Some(high) }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.low.is_none_or(|l| v >= l) && self.high.is_none_or(|h| v <= h)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    #[serde(flatten)]
    pub row: ComparisonRow,
    pub error_band: Option<Band>,
    pub condition_band: Option<Band>,
    pub pass: bool,
}

/// Degree of the least-squares solid-harmonic fit in [`table1`].
pub const TABLE1_POLY_DEGREE: usize = 11;

/// The condition and error table for `u1` and `u2` with `n x n` points per
/// face and MFS at `alpha = 3`. Rows without a band are informational.
pub fn table1(n: usize) -> Result<Vec<Table1Row>, PipelineError> {
    let mfs = BackendSpec::Mfs {
        alpha: 3.0,
        truncated_svd: false,
    };
    let poly = BackendSpec::Poly {
        degree: TABLE1_POLY_DEGREE,
    };
    let mut layout: Vec<(BackendSpec, HarmonicTarget, Option<Band>, Option<Band>)> = Vec::new();
    match n {
        5 => {
            let cond = Some(Band::new(1e7, 1e10));
            layout.push((mfs.clone(), HarmonicTarget::U1, Some(Band::new(4e-6, 1e-4)), cond));
            layout.push((mfs, HarmonicTarget::U2, Some(Band::new(2e-6, 6e-5)), cond));
            let cond = Some(Band::new(1e15, 1e20));
            layout.push((poly.clone(), HarmonicTarget::U1, Some(Band::at_most(1e-4)), cond));
            layout.push((poly, HarmonicTarget::U2, None, cond));
        }
        7 => {
            let cond = Some(Band::new(1e11, 5e13));
            layout.push((mfs.clone(), HarmonicTarget::U1, None, cond));
            layout.push((mfs, HarmonicTarget::U2, Some(Band::at_most(5e-6)), cond));
        }
        _ => {
            layout.push((mfs.clone(), HarmonicTarget::U1, None, None));
            layout.push((mfs, HarmonicTarget::U2, None, None));
        }
    }
    let specs: Vec<ProblemSpec> = layout
        .iter()
        .map(|(b, t, ..)| {
            let mut s = ProblemSpec::new(BoundaryData::trace(*t), n, b.clone());
            s.estimate_error = false;
            s
        })
        .collect();
    let rows = compare_backends(&specs)?;
    Ok(rows
        .into_iter()
        .zip(layout)
        .map(|(row, (_, _, error_band, condition_band))| {
            let pass = error_band.is_none_or(|b| b.contains(row.error))
                && condition_band.is_none_or(|b| b.contains(row.condition));
            Table1Row {
                row,
                error_band,
                condition_band,
                pass,
            }
        })
        .collect())
}

//! Harmonic Dirichlet problem on the unit cube by a singular-regular split.
//!
//! The solution is written `u = H_S + H_R`. The singular part `H_S` is a
//! boundary integral against the Poisson density of the 27-image Green's
//! function approximation and carries the edge and vertex singularities of
//! discontinuous data. The remainder `H_R` is smooth and is approximated by a
//! harmonic function `P_N` fitted to its boundary values.
//!
//! ```no_run
//! use sr_dirichlet::{evaluate, solve, Point3, ProblemSpec};
//!
//! let sol = solve(&ProblemSpec::hot_top_face()).unwrap();
//! let u = evaluate(&sol, Point3::new(0.5, 0.5, 0.5)).unwrap();
//! assert!((u - 1.0 / 6.0).abs() < 5e-5);
//! ```

// `!(x > 0.0)` is used deliberately so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error_estimation;
pub mod geometry;
pub mod kernels;
pub mod pipeline;
pub mod quadrature;
pub mod regular_phase;
pub mod singular_phase;

pub use error_estimation::{assess, error_bound, ErrorReport};
pub use geometry::{BoundaryData, BoundaryPoint, CollocationSet, Face, HarmonicTarget, Point3, ReferenceSet, CUBE_CENTER};
pub use pipeline::{
    compare_backends, corner_slice, evaluate, evaluate_many, solve, solve_timed, table1, BackendSpec, PipelineError,
    ProblemSpec, Solution, SolveReport,
};
pub use regular_phase::{eval_approximant, BackendKind, HarmonicApproximant, SolveDiagnostics};

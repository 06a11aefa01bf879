//! A-posteriori assessment of the regular-phase approximant.
//!
//! `E_max` is the largest discrepancy between `P_N` and the reference values
//! of `H_R` on the half-spacing boundary mesh. Since the error of a harmonic
//! approximant is harmonic, its interior maximum is attained on the boundary,
//! and `E_R = 2 E_max` is reported as an estimated (not certified) bound.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Point3, ReferenceSet};
use crate::regular_phase::{eval_approximant, HarmonicApproximant};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ErrorEstimationError {
    #[error("reference set is empty")]
    EmptyReference,
    #[error("expected {expected} reference values, got {got}")]
    ValueCount { expected: usize, got: usize },
    #[error("error estimate must be a non-negative number, got {0}")]
    Negative(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub e_max: f64,
    /// Estimated bound `2 e_max`.
    pub e_r: f64,
    /// Number of reference points.
    pub j: usize,
    pub worst: Option<Point3>,
}

/// Largest reference discrepancy and where it occurs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxDiscrepancy {
    pub value: f64,
    pub worst: Point3,
    pub j: usize,
}

/// `max_j |values_j - P(q_j)|` over the reference points.
///
/// Ties keep the earliest point, so the result does not depend on the thread
/// count.
pub fn e_max(
    p: &HarmonicApproximant,
    reference: &ReferenceSet,
    values: &[f64],
) -> Result<MaxDiscrepancy, ErrorEstimationError> {
    if reference.is_empty() {
        return Err(ErrorEstimationError::EmptyReference);
    }
    if values.len() != reference.len() {
        return Err(ErrorEstimationError::ValueCount {
            expected: reference.len(),
            got: values.len(),
        });
    }
    let gaps: Vec<f64> = reference
        .points()
        .par_iter()
        .zip(values)
        .map(|(q, v)| (v - eval_approximant(p, q.point)).abs())
        .collect();
    let (mut at, mut value) = (0, gaps[0]);
    for (i, g) in gaps.iter().enumerate().skip(1) {
        if *g > value || g.is_nan() {
            at = i;
            value = *g;
        }
    }
    Ok(MaxDiscrepancy {
        value,
        worst: reference.points()[at].point,
        j: reference.len(),
    })
}

/// `E_R = 2 e`.
pub fn error_bound(e: f64) -> Result<ErrorReport, ErrorEstimationError> {
    if !(e >= 0.0) || !e.is_finite() {
        return Err(ErrorEstimationError::Negative(e));
    }
    Ok(ErrorReport {
        e_max: e,
        e_r: 2.0 * e,
        j: 0,
        worst: None,
    })
}

/// [`e_max`] followed by [`error_bound`].
pub fn assess(
    p: &HarmonicApproximant,
    reference: &ReferenceSet,
    values: &[f64],
) -> Result<ErrorReport, ErrorEstimationError> {
    let d = e_max(p, reference, values)?;
    let mut report = error_bound(d.value)?;
    report.j = d.j;
    report.worst = Some(d.worst);
    Ok(report)
}

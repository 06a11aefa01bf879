//! Dirichlet Green's function of the unit-radius infinite cylinder as a
//! Bessel mode sum, and the three-term image expansion for the slab
//! `0 < z < 1` of the cylinder.
//!
//! For `a = 1`,
//! `G0 = 1/(2 pi) sum_n eps_n cos(n dtheta) sum_m J_n(a_nm r) J_n(a_nm r') e^{-a_nm |dz|} / (a_nm J_{n+1}(a_nm)^2)`
//! with `eps_0 = 1`, `eps_n = 2` and `a_nm` the zeros of `J_n`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::bessel::{self, bessel_zeros_below};
use super::KernelError;

/// Axial separations below this are refused: the series converges too slowly.
pub const MIN_AXIAL_SEPARATION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderPoint {
    pub r: f64,
    pub theta: f64,
    pub z: f64,
}

impl CylinderPoint {
    pub const fn new(r: f64, theta: f64, z: f64) -> Self {
        Self { r, theta, z }
    }

    fn check(&self) -> Result<(), KernelError> {
        if !(0.0..=1.0).contains(&self.r) || !self.theta.is_finite() || !self.z.is_finite() {
            return Err(KernelError::CylinderRadius(self.r));
        }
        Ok(())
    }
}

// Bounds the sum of all omitted terms when every mode with a_nm > cutoff is
// dropped. Uses |J_n| <= 1, 1/(a J_{n+1}(a)^2) <= 4 max(1, a^{1/3}) at the
// zeros, a_nm >= n + 3(m - 1) + 2, and splits the exponent in half.
fn tail_bound(cutoff: f64, dz: f64) -> f64 {
    let k = 4.0 * cutoff.cbrt().max(1.0);
    let h = 0.5 * dz;
    let geometric = (-2.0 * h).exp() / ((1.0 - (-h).exp()) * (1.0 - (-3.0 * h).exp()));
    k / PI * (-cutoff * h).exp() * geometric
}

fn cutoff_for(dz: f64, tol: f64) -> Result<f64, KernelError> {
    let limit = bessel::MAX_ARGUMENT;
    let mut a: f64 = 4.0;
    while tail_bound(a, dz) >= tol {
        a += 1.0;
        if a > limit {
            return Err(KernelError::Truncation(format!(
                "|dz| = {dz} needs modes beyond a = {limit} for tolerance {tol}"
            )));
        }
    }
    Ok(a)
}

/// Infinite-cylinder Green's function, truncated so that the omitted modes
/// sum to less than `tol`.
pub fn cylinder_g0(x: CylinderPoint, y: CylinderPoint, tol: f64) -> Result<f64, KernelError> {
    x.check()?;
    y.check()?;
    if !(tol > 0.0) {
        return Err(KernelError::Truncation(format!("tolerance {tol} must be positive")));
    }
    let dz = (x.z - y.z).abs();
    if dz < MIN_AXIAL_SEPARATION {
        return Err(KernelError::Truncation(format!(
            "axial separation {dz} below {MIN_AXIAL_SEPARATION}"
        )));
    }
    let cutoff = cutoff_for(dz, tol)?;
    let dtheta = x.theta - y.theta;

    let mut total = 0.0;
    for n in 0..=(cutoff as u32) {
        let zeros = bessel_zeros_below(n, cutoff)?;
        if zeros.is_empty() {
            break;
        }
        let mut inner = 0.0;
        for &a in &zeros {
            let jx = bessel::bessel_j(n, a * x.r)?;
            let jy = bessel::bessel_j(n, a * y.r)?;
            let jn1 = bessel::bessel_j(n + 1, a)?;
            inner += jx * jy * (-a * dz).exp() / (a * jn1 * jn1);
        }
        let eps = if n == 0 { 1.0 } else { 2.0 };
        total += eps * (n as f64 * dtheta).cos() * inner;
    }
    Ok(total / (2.0 * PI))
}

/// `G0(x; y) - G0(x; y with z' -> -z') - G0(x; y with z' -> 2 - z')`, each
/// term to `tol / 3`.
pub fn cylinder_s3(x: CylinderPoint, y: CylinderPoint, tol: f64) -> Result<f64, KernelError> {
    let t = tol / 3.0;
    let low = CylinderPoint { z: -y.z, ..y };
    let high = CylinderPoint { z: 2.0 - y.z, ..y };
    Ok(cylinder_g0(x, y, t)? - cylinder_g0(x, low, t)? - cylinder_g0(x, high, t)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    // independent summation with library Bessel routines, cutoff 240
    const G0_A: f64 = 0.08656928861002873;
    const G0_A_LOW: f64 = 0.0058030216328400054;
    const G0_B: f64 = 0.05981033923301105;

    #[test]
    fn matches_independent_summation() {
        let x = CylinderPoint::new(0.3, 0.0, 0.5);
        let y = CylinderPoint::new(0.2, 0.0, 1.0);
        let g = cylinder_g0(x, y, 1e-10).unwrap();
        assert!((g - G0_A).abs() < 1e-10, "{g}");
        let g_low = cylinder_g0(x, CylinderPoint::new(0.2, 0.0, -1.0), 1e-10).unwrap();
        assert!((g_low - G0_A_LOW).abs() < 1e-10);
        let g_b = cylinder_g0(
            CylinderPoint::new(0.6, 0.4, 0.3),
            CylinderPoint::new(0.45, 1.1, 0.7),
            1e-10,
        )
        .unwrap();
        assert!((g_b - G0_B).abs() < 1e-10, "{g_b}");
    }

    #[test]
    fn prefactor_bound_used_by_truncation() {
        for n in 0..120u32 {
            for a in bessel_zeros_below(n, 300.0).unwrap() {
                let j = bessel::bessel_j(n + 1, a).unwrap();
                assert!(1.0 / (a * j * j) <= 4.0 * a.cbrt().max(1.0), "n={n} a={a}");
            }
        }
    }

    #[test]
    fn self_convergence() {
        let x = CylinderPoint::new(0.3, 0.0, 0.5);
        let y = CylinderPoint::new(0.2, 0.0, 1.0);
        let coarse = cylinder_g0(x, y, 1e-10).unwrap();
        let fine = cylinder_g0(x, y, 1e-13).unwrap();
        assert!((coarse - fine).abs() < 1e-10);
    }

    #[test]
    fn vanishes_on_the_wall() {
        let tol = 1e-6;
        let y = CylinderPoint::new(0.4, 0.2, 0.5);
        for (theta, z) in [(0.0, 0.6), (1.3, 0.2), (3.0, 1.2)] {
            let g = cylinder_g0(CylinderPoint::new(1.0, theta, z), y, tol).unwrap();
            assert!(g.abs() < 10.0 * tol, "{g}");
            let s = cylinder_s3(CylinderPoint::new(1.0, theta, z), y, tol).unwrap();
            assert!(s.abs() < 10.0 * tol);
        }
    }

    #[test]
    fn depends_on_angle_difference_only() {
        let a = cylinder_g0(
            CylinderPoint::new(0.5, 0.3, 0.2),
            CylinderPoint::new(0.4, 1.0, 0.6),
            1e-10,
        )
        .unwrap();
        let b = cylinder_g0(
            CylinderPoint::new(0.5, 2.3, 0.2),
            CylinderPoint::new(0.4, 3.0, 0.6),
            1e-10,
        )
        .unwrap();
        let c = cylinder_g0(
            CylinderPoint::new(0.5, -0.3, 0.2),
            CylinderPoint::new(0.4, -1.0, 0.6),
            1e-10,
        )
        .unwrap();
        assert!((a - b).abs() < 1e-12 && (a - c).abs() < 1e-12);
    }

    #[test]
    fn symmetric_in_its_arguments() {
        let x = CylinderPoint::new(0.7, 0.1, 0.35);
        let y = CylinderPoint::new(0.25, 2.0, 0.8);
        let a = cylinder_g0(x, y, 1e-10).unwrap();
        let b = cylinder_g0(y, x, 1e-10).unwrap();
        assert!((a - b).abs() < 1e-13);
    }

    #[test]
    fn three_term_expansion() {
        // x on z = 0: the first two terms are identical
        let x = CylinderPoint::new(0.3, 0.5, 0.0);
        let y = CylinderPoint::new(0.6, 0.1, 0.4);
        let tol = 1e-9;
        let s = cylinder_s3(x, y, tol).unwrap();
        let far = cylinder_g0(x, CylinderPoint::new(0.6, 0.1, 1.6), tol / 3.0).unwrap();
        assert_eq!(s, -far);

        let x = CylinderPoint::new(0.3, 0.0, 0.5);
        let y = CylinderPoint::new(0.2, 0.0, 0.75);
        let t = tol / 3.0;
        let manual = cylinder_g0(x, y, t).unwrap()
            - cylinder_g0(x, CylinderPoint::new(0.2, 0.0, -0.75), t).unwrap()
            - cylinder_g0(x, CylinderPoint::new(0.2, 0.0, 1.25), t).unwrap();
        assert_eq!(cylinder_s3(x, y, tol).unwrap(), manual);
    }

    #[test]
    fn refuses_close_axial_separation() {
        let x = CylinderPoint::new(0.3, 0.0, 0.5);
        let y = CylinderPoint::new(0.2, 0.0, 0.5 + 1e-4);
        assert!(matches!(cylinder_g0(x, y, 1e-8), Err(KernelError::Truncation(_))));
        // allowed separation but unreachable tolerance within the mode cap
        let y = CylinderPoint::new(0.2, 0.0, 0.51);
        assert!(matches!(cylinder_g0(x, y, 1e-8), Err(KernelError::Truncation(_))));
        assert!(cylinder_g0(CylinderPoint::new(1.5, 0.0, 0.0), y, 1e-8).is_err());
    }
}

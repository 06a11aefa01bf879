//! The 27-image singular part of the unit-cube Green's function.
//!
//! Per axis the image coordinate of a source `y` is one of `y_c` (identity),
//! `-y_c` (mirror in the plane `x_c = 0`) or `2 - y_c` (mirror in `x_c = 1`).
//! Every mirror flips the sign, so the product over axes gives 27 signed
//! images, all inside `[-1, 2]^3`.

use std::f64::consts::PI;

use super::{phi, KernelError, COINCIDENCE_TOLERANCE};
use crate::geometry::{Face, Point3};

/// Per-axis image choice.
pub const IDENTITY: u8 = 0;
pub const MIRROR_LOW: u8 = 1;
pub const MIRROR_HIGH: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageSource {
    pub location: Point3,
    pub weight: f64,
    /// Choice per axis: 0 identity, 1 mirror across 0, 2 mirror across 1.
    pub reflection: [u8; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImageSet {
    pub source: Point3,
    pub images: [ImageSource; 27],
}

#[inline]
fn image_coord(y: f64, choice: u8) -> f64 {
    match choice {
        IDENTITY => y,
        MIRROR_LOW => -y,
        _ => 2.0 - y,
    }
}

#[inline]
fn choice_sign(choice: u8) -> f64 {
    if choice == IDENTITY {
        1.0
    } else {
        -1.0
    }
}

/// Image multi-index for position `k` in the fixed ordering `k = 9 r0 + 3 r1 + r2`.
#[inline]
pub fn reflection_of(k: usize) -> [u8; 3] {
    [(k / 9) as u8, ((k / 3) % 3) as u8, (k % 3) as u8]
}

fn check_in_cube(y: Point3) -> Result<(), KernelError> {
    if !y.is_finite() || y.to_array().iter().any(|&c| !(0.0..=1.0).contains(&c)) {
        return Err(KernelError::SourceOutsideCube(y));
    }
    Ok(())
}

/// The 27 signed images of `y` under reflection in the cube faces.
pub fn cube_images(y: Point3) -> Result<ImageSet, KernelError> {
    check_in_cube(y)?;
    let images = std::array::from_fn(|k| {
        let r = reflection_of(k);
        let c = y.to_array();
        ImageSource {
            location: Point3::new(
                image_coord(c[0], r[0]),
                image_coord(c[1], r[1]),
                image_coord(c[2], r[2]),
            ),
            weight: choice_sign(r[0]) * choice_sign(r[1]) * choice_sign(r[2]),
            reflection: r,
        }
    });
    Ok(ImageSet { source: y, images })
}

/// Singular part `S(x, y)`: the signed sum of `Phi` over the 27 images.
pub fn cube_s(x: Point3, y: Point3) -> Result<f64, KernelError> {
    let set = cube_images(y)?;
    let mut sum = 0.0;
    for img in &set.images {
        let r = x.distance(img.location);
        if r <= COINCIDENCE_TOLERANCE {
            return Err(KernelError::Coincident {
                x,
                image: img.location,
            });
        }
        sum += img.weight * phi(r)?;
    }
    Ok(sum)
}

/// Outward normal derivative `dS/dn_y (x, y)` for `y` at parameters
/// `(s, t)` of `face`.
///
/// Each image location depends affinely on `y`, with derivative `+1` for the
/// identity choice and `-1` for either mirror, which is applied by the chain
/// rule.
pub fn cube_dsdn(x: Point3, face: Face, s: f64, t: f64) -> Result<f64, KernelError> {
    if !(0.0..=1.0).contains(&s) || !(0.0..=1.0).contains(&t) {
        return Err(KernelError::SourceOutsideCube(face.point_unchecked(s, t)));
    }
    let y = face.point_unchecked(s, t);
    let set = cube_images(y)?;
    for img in &set.images {
        if x.distance(img.location) <= COINCIDENCE_TOLERANCE {
            return Err(KernelError::Coincident {
                x,
                image: img.location,
            });
        }
    }
    Ok(-poisson_density(x, face, y, ImageFilter::All))
}

/// Which images take part in a [`poisson_density`] evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFilter {
    All,
    /// Only the nine images whose coordinate along `face`'s axis is the mirror
    /// across the opposite plane. For `x` on `face` the other 18 images cancel
    /// in pairs, so this is the whole kernel there (apart from the point mass
    /// at `x` itself).
    Opposite(Face),
}

/// `-dS/dn_y (x, y)`: the density against which the data are integrated.
///
/// For `y` on a face close to `x` the dominant image pair reduces to the
/// half-space Poisson kernel, which this sign convention makes positive.
/// No coincidence check; callers guarantee `x` is off every image.
#[inline]
pub fn poisson_density(x: Point3, face: Face, y: Point3, filter: ImageFilter) -> f64 {
    let axis = face.axis();
    let xs = x.to_array();
    let ys = y.to_array();

    // per axis: offsets x_c - w_c, signs, and derivative factors for each choice
    let mut diff = [[0.0f64; 3]; 3];
    for c in 0..3 {
        for choice in 0..3u8 {
            diff[c][choice as usize] = xs[c] - image_coord(ys[c], choice);
        }
    }
    let sq = diff.map(|row| row.map(|d| d * d));

    let keep = match filter {
        ImageFilter::All => None,
        ImageFilter::Opposite(f) => {
            debug_assert_eq!(f.axis(), axis);
            Some(if f.level() == 0.0 { MIRROR_HIGH } else { MIRROR_LOW })
        }
    };

    let mut sum = 0.0;
    for r0 in 0..3u8 {
        for r1 in 0..3u8 {
            for r2 in 0..3u8 {
                let r = [r0, r1, r2];
                if keep.is_some_and(|k| r[axis] != k) {
                    continue;
                }
                let rho2 = sq[0][r0 as usize] + sq[1][r1 as usize] + sq[2][r2 as usize];
                let rho = rho2.sqrt();
                let weight = choice_sign(r0) * choice_sign(r1) * choice_sign(r2);
                // d/dy_axis of weight * Phi(|x - w(y)|)
                let d = weight * diff[axis][r[axis] as usize] * choice_sign(r[axis])
                    / (4.0 * PI * rho2 * rho);
                sum += d;
            }
        }
    }
    -face.outward_sign() * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    const C: Point3 = Point3::new(0.5, 0.5, 0.5);

    #[test]
    fn image_weights_and_locations() {
        let set = cube_images(C).unwrap();
        let find = |p: Point3| {
            set.images
                .iter()
                .find(|i| i.location.distance(p) < 1e-15)
                .copied()
                .unwrap()
        };
        assert_eq!(find(Point3::new(-0.5, 0.5, 0.5)).weight, -1.0);
        assert_eq!(find(Point3::new(-0.5, -0.5, 1.5)).weight, -1.0);
        assert_eq!(find(C).reflection, [0, 0, 0]);
        let total: f64 = set.images.iter().map(|i| i.weight).sum();
        assert_eq!(total, -1.0);
        for img in &set.images {
            for c in img.location.to_array() {
                assert!((-1.0..=2.0).contains(&c));
            }
            let mirrors = img.reflection.iter().filter(|&&r| r != 0).count();
            assert_eq!(img.weight, if mirrors % 2 == 0 { 1.0 } else { -1.0 });
        }
        assert!(cube_images(Point3::new(1.2, 0.5, 0.5)).is_err());
    }

    #[test]
    fn singular_point_rejected() {
        let y = Point3::new(0.3, 0.6, 0.2);
        assert!(matches!(cube_s(y, y), Err(KernelError::Coincident { .. })));
    }

    #[test]
    fn bottom_face_pair_cancellation() {
        let y = Point3::new(0.31, 0.72, 0.44);
        let x = Point3::new(0.15, 0.63, 0.0);
        let set = cube_images(y).unwrap();
        let paired: f64 = set
            .images
            .iter()
            .filter(|i| i.reflection[2] != MIRROR_HIGH)
            .map(|i| i.weight * phi(x.distance(i.location)).unwrap())
            .sum();
        let paired_rev: f64 = set
            .images
            .iter()
            .rev()
            .filter(|i| i.reflection[2] != MIRROR_HIGH)
            .map(|i| i.weight * phi(x.distance(i.location)).unwrap())
            .sum();
        assert!(paired.abs() < 1e-15 && paired_rev.abs() < 1e-15);
        let far: f64 = set
            .images
            .iter()
            .filter(|i| i.reflection[2] == MIRROR_HIGH)
            .map(|i| i.weight * phi(x.distance(i.location)).unwrap())
            .sum();
        assert!((cube_s(x, y).unwrap() - far).abs() < 1e-15);
    }

    // brute-force 27-term sum, valid for any y (also slightly outside the cube)
    fn s_brute(x: Point3, y: Point3) -> f64 {
        let mut sum = 0.0;
        for a in [(y.x, 1.0), (-y.x, -1.0), (2.0 - y.x, -1.0)] {
            for b in [(y.y, 1.0), (-y.y, -1.0), (2.0 - y.y, -1.0)] {
                for c in [(y.z, 1.0), (-y.z, -1.0), (2.0 - y.z, -1.0)] {
                    let r = x.distance(Point3::new(a.0, b.0, c.0));
                    sum += a.1 * b.1 * c.1 / (4.0 * PI * r);
                }
            }
        }
        sum
    }

    #[test]
    fn brute_force_value_frozen() {
        let x = Point3::new(0.25, 0.25, 0.25);
        let y = Point3::new(0.75, 0.75, 0.75);
        let v = cube_s(x, y).unwrap();
        assert!((v - s_brute(x, y)).abs() < 1e-15);
        assert!((v - S_QUARTER_PAIR).abs() < 1e-15, "{v:.17e}");
    }

    // independent double-precision summation, frozen
    const S_QUARTER_PAIR: f64 = -2.8893075960152823e-2;

    #[test]
    fn normal_derivative_matches_central_difference() {
        let h = 1e-5;
        let cases = [
            (C, Face::ZHigh, 0.5, 0.5),
            (Point3::new(0.2, 0.7, 0.4), Face::XLow, 0.3, 0.6),
            (Point3::new(0.8, 0.1, 0.6), Face::YHigh, 0.9, 0.2),
        ];
        for (x, face, s, t) in cases {
            let y = face.point_unchecked(s, t);
            let n = face.normal();
            let fd = (s_brute(x, y + n * h) - s_brute(x, y - n * h)) / (2.0 * h);
            let exact = cube_dsdn(x, face, s, t).unwrap();
            assert!((fd - exact).abs() <= 1e-6 * exact.abs(), "{fd} vs {exact}");
        }
    }

    #[test]
    fn dominant_pair_is_the_poisson_kernel() {
        let x = Point3::new(0.5, 0.5, 0.9);
        let y = Point3::new(0.52, 0.47, 1.0);
        let d: f64 = 0.1;
        let rho2 = 0.02f64.powi(2) + 0.03f64.powi(2);
        let pk = d / (2.0 * PI * (rho2 + d * d).powf(1.5));
        let full = poisson_density(x, Face::ZHigh, y, ImageFilter::All);
        // the other 25 images are O(1) away and contribute O(0.1)
        assert!((full - pk).abs() < 0.2 && full > 0.9 * pk);
    }

    #[test]
    fn opposite_filter_keeps_nine_images() {
        let x = Point3::new(0.3, 0.4, 1.0);
        let y = Point3::new(0.6, 0.2, 1.0);
        let nine = poisson_density(x, Face::ZHigh, y, ImageFilter::Opposite(Face::ZHigh));
        let all = poisson_density(x, Face::ZHigh, y, ImageFilter::All);
        // on the face the other 18 images cancel
        assert!((nine - all).abs() < 1e-12 * all.abs().max(1.0));
    }
}

//! Unit-cube boundary: faces, their parametrization, collocation and
//! reference point sets, and Dirichlet boundary data.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Distance below which a coordinate is considered to lie on a face plane.
pub const PLANE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("face parameter ({s}, {t}) outside [0,1]^2")]
    ParameterOutOfRange { s: f64, t: f64 },
    #[error("point ({}, {}, {}) is not on the cube boundary", .0.x, .0.y, .0.z)]
    NotOnBoundary(Point3),
    #[error("point ({}, {}, {}) lies on an edge or vertex of the cube", .0.x, .0.y, .0.z)]
    OnEdge(Point3),
    #[error("collocation parameter n must be at least 1")]
    EmptyGrid,
    #[error("non-finite coordinate in point ({}, {}, {})", .0.x, .0.y, .0.z)]
    NonFinite(Point3),
}

/// A point (or vector) in R^3. Cube side length is 1.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn from_array(c: [f64; 3]) -> Self {
        Self::new(c[0], c[1], c[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Component along `axis` (0, 1 or 2).
    #[inline]
    pub fn coord(self, axis: usize) -> f64 {
        match axis {
            0 => self.x,
            1 => self.y,
            2 => self.z,
            _ => panic!("axis index {axis} out of range"),
        }
    }

    #[inline]
    pub fn with_coord(mut self, axis: usize, value: f64) -> Self {
        match axis {
            0 => self.x = value,
            1 => self.y = value,
            2 => self.z = value,
            _ => panic!("axis index {axis} out of range"),
        }
        self
    }

    #[inline]
    pub fn dot(self, other: Point3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    #[inline]
    pub fn distance(self, other: Point3) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// True if every coordinate lies in the open interval (0, 1).
    pub fn is_strictly_inside_cube(self) -> bool {
        self.to_array().iter().all(|&c| c > 0.0 && c < 1.0)
    }

    /// Smallest distance to the six face planes (negative outside the cube).
    pub fn boundary_distance(self) -> f64 {
        self.to_array()
            .iter()
            .map(|&c| c.min(1.0 - c))
            .fold(f64::INFINITY, f64::min)
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, k: f64) -> Point3 {
        Point3::new(self.x * k, self.y * k, self.z * k)
    }
}

impl Neg for Point3 {
    type Output = Point3;
    fn neg(self) -> Point3 {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

pub const CUBE_CENTER: Point3 = Point3::new(0.5, 0.5, 0.5);

/// One of the six faces of the unit cube.
///
/// The declaration order `XLow, XHigh, YLow, YHigh, ZLow, ZHigh` is the
/// ordering used everywhere points or matrix rows are laid out per face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Face {
    XLow,
    XHigh,
    YLow,
    YHigh,
    ZLow,
    ZHigh,
}

impl Face {
    pub const ALL: [Face; 6] = [
        Face::XLow,
        Face::XHigh,
        Face::YLow,
        Face::YHigh,
        Face::ZLow,
        Face::ZHigh,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Coordinate axis normal to the face.
    pub fn axis(self) -> usize {
        self.index() / 2
    }

    /// Value of the normal coordinate on the face (0 or 1).
    pub fn level(self) -> f64 {
        (self.index() % 2) as f64
    }

    /// Sign of the outward normal along [`Face::axis`].
    pub fn outward_sign(self) -> f64 {
        if self.index() % 2 == 0 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn normal(self) -> Point3 {
        Point3::default().with_coord(self.axis(), self.outward_sign())
    }

    /// The two in-face axes, in the order of the (s, t) parameters.
    pub fn tangent_axes(self) -> (usize, usize) {
        match self.axis() {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        }
    }

    /// Parametrization without range checks.
    #[inline]
    pub fn point_unchecked(self, s: f64, t: f64) -> Point3 {
        let (a, b) = self.tangent_axes();
        Point3::default()
            .with_coord(self.axis(), self.level())
            .with_coord(a, s)
            .with_coord(b, t)
    }

    /// (s, t) of the orthogonal projection of `p` onto the face plane.
    pub fn project(self, p: Point3) -> (f64, f64) {
        let (a, b) = self.tangent_axes();
        (p.coord(a), p.coord(b))
    }

    /// Distance from `p` to the face plane.
    pub fn plane_distance(self, p: Point3) -> f64 {
        (p.coord(self.axis()) - self.level()).abs()
    }

    pub fn name(self) -> &'static str {
        match self {
            Face::XLow => "x=0",
            Face::XHigh => "x=1",
            Face::YLow => "y=0",
            Face::YHigh => "y=1",
            Face::ZLow => "z=0",
            Face::ZHigh => "z=1",
        }
    }
}

/// Maps face parameters (s, t) in [0,1]^2 onto the face.
pub fn face_point(face: Face, s: f64, t: f64) -> Result<Point3, GeometryError> {
    if !(0.0..=1.0).contains(&s) || !(0.0..=1.0).contains(&t) {
        return Err(GeometryError::ParameterOutOfRange { s, t });
    }
    Ok(face.point_unchecked(s, t))
}

/// Finds the face carrying `p`, returning its parameters.
///
/// Points on edges or vertices are rejected since they belong to more than
/// one face.
pub fn locate_on_face(p: Point3) -> Result<(Face, f64, f64), GeometryError> {
    if !p.is_finite() {
        return Err(GeometryError::NonFinite(p));
    }
    let c = p.to_array();
    let in_closed = c
        .iter()
        .all(|&v| (-PLANE_TOLERANCE..=1.0 + PLANE_TOLERANCE).contains(&v));
    if !in_closed {
        return Err(GeometryError::NotOnBoundary(p));
    }
    let on_plane: Vec<Face> = Face::ALL
        .iter()
        .copied()
        .filter(|f| f.plane_distance(p) <= PLANE_TOLERANCE)
        .collect();
    match on_plane.as_slice() {
        [] => Err(GeometryError::NotOnBoundary(p)),
        [face] => {
            let (s, t) = face.project(p);
            Ok((*face, s, t))
        }
        _ => Err(GeometryError::OnEdge(p)),
    }
}

/// A point on the boundary together with its face parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub face: Face,
    pub s: f64,
    pub t: f64,
    pub point: Point3,
}

impl BoundaryPoint {
    pub fn new(face: Face, s: f64, t: f64) -> Self {
        Self {
            face,
            s,
            t,
            point: face.point_unchecked(s, t),
        }
    }
}

/// Uniform collocation points, `n * n` per face, `6 n^2` in total.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationSet {
    n: usize,
    points: Vec<BoundaryPoint>,
}

impl CollocationSet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[BoundaryPoint] {
        &self.points
    }

    pub fn positions(&self) -> impl Iterator<Item = Point3> + '_ {
        self.points.iter().map(|p| p.point)
    }
}

/// Collocation grid with points `((2i-1)/2n, (2j-1)/2n)` on every face.
///
/// Ordering: faces as in [`Face::ALL`], then `i` (the s index) major and `j`
/// minor.
pub fn uniform_collocation(n: usize) -> Result<CollocationSet, GeometryError> {
    if n == 0 {
        return Err(GeometryError::EmptyGrid);
    }
    let h = 1.0 / (2 * n) as f64;
    let coords: Vec<f64> = (1..=n).map(|i| (2 * i - 1) as f64 * h).collect();
    let mut points = Vec::with_capacity(6 * n * n);
    for face in Face::ALL {
        for &s in &coords {
            for &t in &coords {
                points.push(BoundaryPoint::new(face, s, t));
            }
        }
    }
    Ok(CollocationSet { n, points })
}

/// Reference points used to assess the regular-phase approximant.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSet {
    n: usize,
    points: Vec<BoundaryPoint>,
}

impl ReferenceSet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[BoundaryPoint] {
        &self.points
    }
}

/// Number of reference points produced by [`midpoint_reference`] for a
/// collocation grid with parameter `n`: `6 ((2n-1)^2 - n^2)` for `n >= 2`,
/// and 24 for `n = 1`.
pub fn reference_count(n: usize) -> usize {
    match n {
        0 => 0,
        1 => 24,
        _ => 6 * ((2 * n - 1).pow(2) - n * n),
    }
}

/// Half-spacing mesh interleaving the collocation grid.
///
/// On each face the mesh is `k/2n`, `k = 1..2n-1` in both parameters; nodes
/// where both indices are odd are collocation points and are left out. For
/// `n = 1` this mesh is just the face center, so the four points halfway
/// between the center and the face vertices are used instead.
pub fn midpoint_reference(colloc: &CollocationSet) -> ReferenceSet {
    let n = colloc.n();
    let mut points = Vec::with_capacity(reference_count(n));
    if n == 1 {
        for face in Face::ALL {
            for (s, t) in [(0.25, 0.25), (0.25, 0.75), (0.75, 0.25), (0.75, 0.75)] {
                points.push(BoundaryPoint::new(face, s, t));
            }
        }
        return ReferenceSet { n, points };
    }
    let h = 1.0 / (2 * n) as f64;
    for face in Face::ALL {
        for k in 1..2 * n {
            for l in 1..2 * n {
                if k % 2 == 1 && l % 2 == 1 {
                    continue;
                }
                points.push(BoundaryPoint::new(face, k as f64 * h, l as f64 * h));
            }
        }
    }
    ReferenceSet { n, points }
}

/// Closed-form harmonic functions used as synthetic Dirichlet data,
/// evaluated in coordinates relative to an origin (see [`BoundaryData`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HarmonicTarget {
    /// `cos(0.6 x) sin(0.8 y) exp(z)`, entire.
    U1,
    /// `1 / sqrt(x^2 + y^2 + (z - 1.6)^2)`, singular at (0, 0, 1.6).
    U2,
}

impl HarmonicTarget {
    /// Evaluates at local coordinates `q`.
    pub fn eval_local(self, q: Point3) -> f64 {
        match self {
            HarmonicTarget::U1 => (0.6 * q.x).cos() * (0.8 * q.y).sin() * q.z.exp(),
            HarmonicTarget::U2 => {
                let dz = q.z - 1.6;
                1.0 / (q.x * q.x + q.y * q.y + dz * dz).sqrt()
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            HarmonicTarget::U1 => "u1",
            HarmonicTarget::U2 => "u2",
        }
    }
}

fn default_origin() -> Point3 {
    CUBE_CENTER
}

/// Dirichlet data on the cube boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryData {
    /// One constant per face, in [`Face::ALL`] order.
    PiecewiseConstant { faces: [f64; 6] },
    /// Trace of a harmonic function `u(p - origin)`. The default origin is the
    /// cube center, so the function is expressed on the centered cube.
    Trace {
        function: HarmonicTarget,
        #[serde(default = "default_origin")]
        origin: Point3,
    },
}

impl BoundaryData {
    /// Value 1 on the top face `z = 1`, zero elsewhere.
    pub fn top_face_hot() -> Self {
        Self::single_face(Face::ZHigh, 1.0)
    }

    pub fn single_face(face: Face, value: f64) -> Self {
        let mut faces = [0.0; 6];
        faces[face.index()] = value;
        BoundaryData::PiecewiseConstant { faces }
    }

    pub fn zero() -> Self {
        BoundaryData::PiecewiseConstant { faces: [0.0; 6] }
    }

    /// Trace of `function` on the centered cube.
    pub fn trace(function: HarmonicTarget) -> Self {
        BoundaryData::Trace {
            function,
            origin: CUBE_CENTER,
        }
    }

    /// Value at face parameters `(s, t)`; no edge check.
    #[inline]
    pub fn face_value(&self, face: Face, s: f64, t: f64) -> f64 {
        match self {
            BoundaryData::PiecewiseConstant { faces } => faces[face.index()],
            BoundaryData::Trace { function, origin } => {
                function.eval_local(face.point_unchecked(s, t) - *origin)
            }
        }
    }

    /// True when the data vanish identically on `face`.
    pub fn vanishes_on(&self, face: Face) -> bool {
        matches!(self, BoundaryData::PiecewiseConstant { faces } if faces[face.index()] == 0.0)
    }

    /// For traces, the harmonic extension evaluated anywhere.
    pub fn harmonic_extension(&self, p: Point3) -> Option<f64> {
        match self {
            BoundaryData::Trace { function, origin } => Some(function.eval_local(p - *origin)),
            BoundaryData::PiecewiseConstant { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        match self {
            BoundaryData::PiecewiseConstant { faces } => {
                if faces.iter().all(|v| v.is_finite()) {
                    Ok(())
                } else {
                    Err(GeometryError::NonFinite(Point3::new(f64::NAN, f64::NAN, f64::NAN)))
                }
            }
            BoundaryData::Trace { origin, .. } => {
                if origin.is_finite() {
                    Ok(())
                } else {
                    Err(GeometryError::NonFinite(*origin))
                }
            }
        }
    }
}

/// Evaluates the boundary data at a point on an open face.
///
/// Piecewise-constant data are undefined on edges and vertices; traces are
/// evaluated at any boundary point.
pub fn boundary_value(data: &BoundaryData, p: Point3) -> Result<f64, GeometryError> {
    match data {
        BoundaryData::PiecewiseConstant { faces } => {
            let (face, _, _) = locate_on_face(p)?;
            Ok(faces[face.index()])
        }
        BoundaryData::Trace { function, origin } => {
            if !p.is_finite() {
                return Err(GeometryError::NonFinite(p));
            }
            if p.boundary_distance().abs() > PLANE_TOLERANCE {
                return Err(GeometryError::NotOnBoundary(p));
            }
            Ok(function.eval_local(p - *origin))
        }
    }
}

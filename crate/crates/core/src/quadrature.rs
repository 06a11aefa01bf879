//! Quadrature on the face parameter square `[0,1]^2`.
//!
//! Rules are normalized to the unit interval. Nearly singular integrands of
//! the form `g(s, t) / ((s-a)^2 + (t-b)^2 + d^2)^{3/2}` are handled by
//! [`near_singular_plan`], which nests nine-rectangle splits around `(a, b)`
//! until the central rectangle is no wider than the peak, and bisects the
//! surrounding rectangles until each is small compared to its distance from
//! the peak.

use std::sync::OnceLock;

use thiserror::Error;

pub const MAX_GAUSS_ORDER: usize = 64;
pub const DEFAULT_BASE_K: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("Gauss-Legendre order {0} outside 1..=64")]
    Order(usize),
    #[error("Simpson rule needs a positive even number of intervals, got {0}")]
    SimpsonIntervals(usize),
    #[error("distance to the face must be positive and finite, got {0}")]
    Distance(f64),
    #[error("peak ({0}, {1}) outside the parameter square")]
    Peak(f64, f64),
    #[error("integrand is {value} at node ({s}, {t})")]
    NonFinite { s: f64, t: f64, value: f64 },
}

/// A rule `sum w_i g(x_i)` approximating `int_0^1 g`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule1D {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1D {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, mut g: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * g(x))
            .sum()
    }
}

fn legendre_rule(k: usize) -> Rule1D {
    let mut nodes = vec![0.0; k];
    let mut weights = vec![0.0; k];
    let kf = k as f64;
    for i in 0..k.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (kf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=k {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            // p1 = P_k(x), p0 = P_{k-1}(x)
            let (pk, pk1) = if k == 1 { (x, 1.0) } else { (p1, p0) };
            dp = kf * (x * pk - pk1) / (x * x - 1.0);
            let dx = pk / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        if k == 1 {
            x = 0.0;
            dp = 1.0;
        }
        let w = 1.0 / ((1.0 - x * x) * dp * dp);
        // x > 0 here; mirror into the low half
        nodes[i] = 0.5 * (1.0 - x);
        nodes[k - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = w;
        weights[k - 1 - i] = w;
    }
    Rule1D { nodes, weights }
}

fn gauss_table() -> &'static [Rule1D] {
    static TABLE: OnceLock<Vec<Rule1D>> = OnceLock::new();
    TABLE.get_or_init(|| (1..=MAX_GAUSS_ORDER).map(legendre_rule).collect())
}

/// `k`-point Gauss-Legendre rule on `[0,1]`, nodes ascending.
pub fn gauss_legendre(k: usize) -> Result<Rule1D, QuadratureError> {
    gauss_ref(k).cloned()
}

fn gauss_ref(k: usize) -> Result<&'static Rule1D, QuadratureError> {
    if k == 0 || k > MAX_GAUSS_ORDER {
        return Err(QuadratureError::Order(k));
    }
    Ok(&gauss_table()[k - 1])
}

/// Composite Simpson rule with `intervals` (even) subintervals.
pub fn simpson(intervals: usize) -> Result<Rule1D, QuadratureError> {
    if intervals == 0 || intervals % 2 == 1 {
        return Err(QuadratureError::SimpsonIntervals(intervals));
    }
    let h = 1.0 / intervals as f64;
    let nodes = (0..=intervals).map(|i| i as f64 * h).collect();
    let weights = (0..=intervals)
        .map(|i| {
            let c = if i == 0 || i == intervals {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect();
    Ok(Rule1D { nodes, weights })
}

/// Jacobian of the mapping at the peak, kept positive so that every mapped
/// weight is strictly positive even when a node sits on the peak.
pub const TELLES_PEAK_JACOBIAN: f64 = 1e-3;

/// Cubic map `eta(g) = eta0 + r (g - g0) + c (g - g0)^3` of `[-1,1]` onto
/// itself with `eta(g0) = eta0` and minimal slope `r` there.
#[derive(Debug, Clone, Copy)]
struct Cubic {
    center: f64,
    image: f64,
    slope: f64,
    cubic: f64,
}

impl Cubic {
    fn through(peak: f64, slope: f64) -> Self {
        let e = peak;
        let r = slope;
        let f = |g: f64| (1.0 - e - r * (1.0 - g)) * (1.0 + g).powi(3) - (1.0 + e - r * (1.0 + g)) * (1.0 - g).powi(3);
        let (mut lo, mut hi) = (-1.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-16 {
                break;
            }
        }
        let g = 0.5 * (lo + hi);
        let cubic = if g <= 0.0 {
            (1.0 - e - r * (1.0 - g)) / (1.0 - g).powi(3)
        } else {
            (1.0 + e - r * (1.0 + g)) / (1.0 + g).powi(3)
        };
        Cubic {
            center: g,
            image: e,
            slope: r,
            cubic,
        }
    }

    fn eval(&self, g: f64) -> (f64, f64) {
        let u = g - self.center;
        (
            self.image + self.slope * u + self.cubic * u * u * u,
            self.slope + 3.0 * self.cubic * u * u,
        )
    }
}

/// Telles' cubic transformation of `rule`, clustering nodes at `peak`.
///
/// The mapped weights sum to one whenever `rule` integrates quadratics
/// exactly (every Gauss rule with at least two points).
pub fn telles_map(rule: &Rule1D, peak: f64) -> Rule1D {
    let cubic = Cubic::through(2.0 * peak.clamp(0.0, 1.0) - 1.0, TELLES_PEAK_JACOBIAN);
    let (nodes, weights) = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&u, &w)| {
            let (eta, jac) = cubic.eval(2.0 * u - 1.0);
            (0.5 * (eta + 1.0), w * jac)
        })
        .unzip();
    Rule1D { nodes, weights }
}

/// Axis-aligned rectangle in the parameter square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub s0: f64,
    pub s1: f64,
    pub t0: f64,
    pub t1: f64,
}

impl Rect {
    pub const UNIT: Rect = Rect {
        s0: 0.0,
        s1: 1.0,
        t0: 0.0,
        t1: 1.0,
    };

    pub fn area(&self) -> f64 {
        (self.s1 - self.s0) * (self.t1 - self.t0)
    }

    pub fn longest_side(&self) -> f64 {
        (self.s1 - self.s0).max(self.t1 - self.t0)
    }

    /// Euclidean distance from `(a, b)` to the rectangle.
    pub fn distance_to(&self, a: f64, b: f64) -> f64 {
        let ds = (self.s0 - a).max(0.0).max(a - self.s1);
        let dt = (self.t0 - b).max(0.0).max(b - self.t1);
        ds.hypot(dt)
    }
}

/// A rectangle with a tensor-product rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    pub rect: Rect,
    pub rule_s: Rule1D,
    pub rule_t: Rule1D,
    /// Set when the rules carry a Telles map toward this location.
    pub peak: Option<(f64, f64)>,
}

impl Patch {
    pub fn gauss(rect: Rect, k: usize) -> Result<Self, QuadratureError> {
        let rule = gauss_legendre(k)?;
        Ok(Patch {
            rect,
            rule_s: rule.clone(),
            rule_t: rule,
            peak: None,
        })
    }

    /// Gauss rules Telles-mapped toward `(a, b)`, which may lie outside the
    /// rectangle (it is clamped to it).
    pub fn telles(rect: Rect, k: usize, a: f64, b: f64) -> Result<Self, QuadratureError> {
        let rule = gauss_ref(k)?;
        let ps = ((a - rect.s0) / (rect.s1 - rect.s0)).clamp(0.0, 1.0);
        let pt = ((b - rect.t0) / (rect.t1 - rect.t0)).clamp(0.0, 1.0);
        Ok(Patch {
            rect,
            rule_s: telles_map(rule, ps),
            rule_t: telles_map(rule, pt),
            peak: Some((a, b)),
        })
    }

    /// Nodes `(s, t, weight)` with weights scaled by the patch area.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let r = self.rect;
        let (hs, ht) = (r.s1 - r.s0, r.t1 - r.t0);
        self.rule_s
            .nodes
            .iter()
            .zip(&self.rule_s.weights)
            .flat_map(move |(&u, &wu)| {
                self.rule_t
                    .nodes
                    .iter()
                    .zip(&self.rule_t.weights)
                    .map(move |(&v, &wv)| (r.s0 + hs * u, r.t0 + ht * v, wu * wv * hs * ht))
            })
    }

    pub fn node_count(&self) -> usize {
        self.rule_s.len() * self.rule_t.len()
    }
}

/// A tiling of the parameter square by quadrature patches.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraturePlan {
    pub patches: Vec<Patch>,
    pub target: (f64, f64),
    pub distance: f64,
    /// Number of nested nine-rectangle splits.
    pub depth: usize,
}

impl QuadraturePlan {
    /// One patch covering the square.
    pub fn single(k: usize) -> Result<Self, QuadratureError> {
        Ok(QuadraturePlan {
            patches: vec![Patch::gauss(Rect::UNIT, k)?],
            target: (0.5, 0.5),
            distance: f64::INFINITY,
            depth: 0,
        })
    }

    pub fn node_count(&self) -> usize {
        self.patches.iter().map(Patch::node_count).sum()
    }

    /// All nodes in patch order.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.patches.iter().flat_map(Patch::nodes)
    }

    /// The innermost rectangle, the one containing the target.
    pub fn central(&self) -> Rect {
        let (a, b) = self.target;
        self.patches
            .iter()
            .map(|p| p.rect)
            .filter(|r| r.distance_to(a, b) == 0.0)
            .min_by(|x, y| x.area().total_cmp(&y.area()))
            .unwrap_or(Rect::UNIT)
    }
}

/// Tuning of [`near_singular_plan_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanOptions {
    /// Distances at or beyond this use a single patch.
    pub far_field: f64,
    /// Refinement stops once the central half-width is at most this times `d`.
    pub central_ratio: f64,
    /// Outer rectangles are bisected until their longest side is at most this
    /// times their distance from the peak (measured in 3D, including `d`).
    pub outer_ratio: f64,
    pub max_depth: usize,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions {
            far_field: 0.5,
            central_ratio: 1.0,
            outer_ratio: 1.0,
            max_depth: 12,
        }
    }
}

/// Plan for a kernel peaked at `(a, b)` with height `d` above the face.
pub fn near_singular_plan(a: f64, b: f64, d: f64, base_k: usize) -> Result<QuadraturePlan, QuadratureError> {
    near_singular_plan_with(a, b, d, base_k, &PlanOptions::default())
}

pub fn near_singular_plan_with(
    a: f64,
    b: f64,
    d: f64,
    base_k: usize,
    opts: &PlanOptions,
) -> Result<QuadraturePlan, QuadratureError> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(QuadratureError::Distance(d));
    }
    if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) {
        return Err(QuadratureError::Peak(a, b));
    }
    gauss_ref(base_k)?;
    if d >= opts.far_field {
        let mut plan = QuadraturePlan::single(base_k)?;
        plan.target = (a, b);
        plan.distance = d;
        return Ok(plan);
    }

    let mut rects = Vec::new();
    let mut region = Rect::UNIT;
    let mut half = 0.5;
    let mut depth = 0;
    while half > opts.central_ratio * d && depth < opts.max_depth {
        half /= 3.0;
        depth += 1;
        let ss = [region.s0, (a - half).max(region.s0), (a + half).min(region.s1), region.s1];
        let ts = [region.t0, (b - half).max(region.t0), (b + half).min(region.t1), region.t1];
        for j in 0..3 {
            for i in 0..3 {
                let r = Rect {
                    s0: ss[i],
                    s1: ss[i + 1],
                    t0: ts[j],
                    t1: ts[j + 1],
                };
                if r.s1 <= r.s0 || r.t1 <= r.t0 {
                    continue;
                }
                if i == 1 && j == 1 {
                    region = r;
                } else {
                    split_outer(r, a, b, d, opts.outer_ratio, &mut rects);
                }
            }
        }
    }

    let mut patches = Vec::with_capacity(rects.len() + 1);
    for r in rects {
        patches.push(Patch::gauss(r, base_k)?);
    }
    // depth cap hit with the peak still narrower than the central patch
    if half > opts.central_ratio * d {
        patches.push(Patch::telles(region, base_k, a, b)?);
    } else {
        patches.push(Patch::gauss(region, base_k)?);
    }
    Ok(QuadraturePlan {
        patches,
        target: (a, b),
        distance: d,
        depth,
    })
}

fn split_outer(r: Rect, a: f64, b: f64, d: f64, ratio: f64, out: &mut Vec<Rect>) {
    let dist = r.distance_to(a, b).hypot(d);
    if r.longest_side() <= ratio * dist {
        out.push(r);
        return;
    }
    let (ws, wt) = (r.s1 - r.s0, r.t1 - r.t0);
    if ws == wt {
        // four-way split keeps plans symmetric under swapping s and t
        let ms = 0.5 * (r.s0 + r.s1);
        let mt = 0.5 * (r.t0 + r.t1);
        for q in [
            Rect { s1: ms, t1: mt, ..r },
            Rect { s0: ms, t1: mt, ..r },
            Rect { s1: ms, t0: mt, ..r },
            Rect { s0: ms, t0: mt, ..r },
        ] {
            split_outer(q, a, b, d, ratio, out);
        }
    } else if ws > wt {
        let m = 0.5 * (r.s0 + r.s1);
        split_outer(Rect { s1: m, ..r }, a, b, d, ratio, out);
        split_outer(Rect { s0: m, ..r }, a, b, d, ratio, out);
    } else {
        let m = 0.5 * (r.t0 + r.t1);
        split_outer(Rect { t1: m, ..r }, a, b, d, ratio, out);
        split_outer(Rect { t0: m, ..r }, a, b, d, ratio, out);
    }
}

/// `sum_patches sum_nodes w g(s, t)`, in plan order.
pub fn integrate_face(
    mut kernel: impl FnMut(f64, f64) -> f64,
    plan: &QuadraturePlan,
) -> Result<f64, QuadratureError> {
    let mut total = 0.0;
    for patch in &plan.patches {
        let mut sum = 0.0;
        for (s, t, w) in patch.nodes() {
            let value = kernel(s, t);
            if !value.is_finite() {
                return Err(QuadratureError::NonFinite { s, t, value });
            }
            sum += w * value;
        }
        total += sum;
    }
    Ok(total)
}

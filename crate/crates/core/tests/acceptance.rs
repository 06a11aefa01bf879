//! Acceptance checks, one PASS/FAIL line each. Exits nonzero if any fails.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sr_dirichlet::error_estimation::assess;
use sr_dirichlet::geometry::{midpoint_reference, uniform_collocation};
use sr_dirichlet::kernels::{cube_images, cube_s, halfspace_poisson};
use sr_dirichlet::pipeline::{compare_backends, corner_slice, lattice_error, BackendSpec};
use sr_dirichlet::quadrature::{integrate_face, near_singular_plan, DEFAULT_BASE_K};
use sr_dirichlet::regular_phase::{build_cheb, build_mfs, build_poly, cheb_boundary_nodes, ResidualData};
use sr_dirichlet::singular_phase::{hs_boundary, hs_interior};
use sr_dirichlet::{
    eval_approximant, evaluate, solve, BackendKind, BoundaryData, HarmonicApproximant, HarmonicTarget, Point3,
    ProblemSpec, Solution, CUBE_CENTER,
};

type Outcome = (bool, String);

/// Separation-of-variables solution for value 1 on `z = 1` and 0 elsewhere,
/// odd `m, n <= 99`.
fn series_oracle(p: Point3) -> f64 {
    let mut u = 0.0;
    for m in (1..=99).step_by(2) {
        for n in (1..=99).step_by(2) {
            let (mf, nf) = (m as f64, n as f64);
            let g = PI * (mf * mf + nf * nf).sqrt();
            // sinh(g z) / sinh(g) without overflow
            let ratio = (g * (p.z - 1.0)).exp() * (1.0 - (-2.0 * g * p.z).exp()) / (1.0 - (-2.0 * g).exp());
            u += 16.0 / (PI * PI * mf * nf) * (mf * PI * p.x).sin() * (nf * PI * p.y).sin() * ratio;
        }
    }
    u
}

/// Solid angle of the rectangle `[x0,x1] x [y0,y1]` seen from height `d`
/// above the origin of its plane.
fn rectangle_solid_angle(x0: f64, x1: f64, y0: f64, y1: f64, d: f64) -> f64 {
    let corner = |x: f64, y: f64| (x * y / (d * (x * x + y * y + d * d).sqrt())).atan();
    corner(x1, y1) - corner(x0, y1) - corner(x1, y0) + corner(x0, y0)
}

fn hot_solution() -> Solution {
    solve(&ProblemSpec::hot_top_face()).expect("hot top face solve")
}

fn trace_residual(n: usize, target: HarmonicTarget) -> ResidualData {
    let colloc = uniform_collocation(n).unwrap();
    let values = colloc.positions().map(|p| target.eval_local(p - CUBE_CENTER)).collect();
    ResidualData::new(colloc, values).unwrap()
}

fn center_symmetry(sol: &Solution) -> Outcome {
    let v = evaluate(sol, CUBE_CENTER).unwrap();
    let gap = (v - 1.0 / 6.0).abs();
    (gap <= 5e-5, format!("u(center) = {v:.10}, |u - 1/6| = {gap:.3e} (tol 5e-5)"))
}

fn series_agreement(sol: &Solution) -> Outcome {
    let g: Vec<f64> = (0..10).map(|i| 0.1 + 0.8 * i as f64 / 9.0).collect();
    let mut worst: f64 = 0.0;
    for &x in &g {
        for &y in &g {
            for &z in &g {
                let p = Point3::new(x, y, z);
                worst = worst.max((evaluate(sol, p).unwrap() - series_oracle(p)).abs());
            }
        }
    }
    (worst <= 5e-5, format!("max |u_N - series| over 1000 points = {worst:.3e} (tol 5e-5)"))
}

fn spec(target: HarmonicTarget, n: usize, backend: BackendSpec) -> ProblemSpec {
    let mut s = ProblemSpec::new(BoundaryData::trace(target), n, backend);
    s.estimate_error = false;
    s
}

const MFS3: BackendSpec = BackendSpec::Mfs {
    alpha: 3.0,
    truncated_svd: false,
};

fn table_reproduction() -> Outcome {
    let rows = compare_backends(&[
        spec(HarmonicTarget::U1, 5, MFS3),
        spec(HarmonicTarget::U2, 5, MFS3),
        spec(HarmonicTarget::U1, 5, BackendSpec::Poly { degree: 11 }),
    ])
    .unwrap();
    let (m1, m2, p1) = (&rows[0], &rows[1], &rows[2]);
    let checks = [
        (4e-6..=1e-4).contains(&m1.error),
        (2e-6..=6e-5).contains(&m2.error),
        (1e7..=1e10).contains(&m1.condition),
        (1e15..=1e20).contains(&p1.condition),
        p1.error <= 1e-4,
    ];
    (
        checks.iter().all(|&c| c),
        format!(
            "MFS u1 {:.3e}, MFS u2 {:.3e}, MFS cond {:.3e}, poly cond {:.3e}, poly u1 {:.3e}",
            m1.error, m2.error, m1.condition, p1.condition, p1.error
        ),
    )
}

fn refined_mfs() -> Outcome {
    let row = &compare_backends(&[spec(HarmonicTarget::U2, 7, MFS3)]).unwrap()[0];
    let ok = row.error <= 5e-6 && (1e11..=5e13).contains(&row.condition);
    (
        ok,
        format!("n=7 MFS u2 error {:.3e} (tol 5e-6), cond {:.3e} (band 1e11..5e13)", row.error, row.condition),
    )
}

fn error_bound(sol: &Solution) -> Outcome {
    let e = sol.error.expect("error report");
    (e.e_r <= 1e-4, format!("E_max = {:.3e}, E_R = {:.3e} (tol 1e-4)", e.e_max, e.e_r))
}

fn near_singular_quadrature() -> Outcome {
    let (a, b) = (0.2, 0.2);
    let mut worst: f64 = 0.0;
    for d in [1e-1, 1e-2, 1e-3] {
        let plan = near_singular_plan(a, b, d, DEFAULT_BASE_K).unwrap();
        let q = integrate_face(|s, t| halfspace_poisson([a, b], [s, t], d).unwrap(), &plan).unwrap();
        let exact = rectangle_solid_angle(-a, 1.0 - a, -b, 1.0 - b, d) / (2.0 * PI);
        worst = worst.max((q - exact).abs() / exact);
    }
    (worst <= 1e-8, format!("max relative error {worst:.3e} over d = 1e-1, 1e-2, 1e-3 (tol 1e-8)"))
}

fn poisson_normalization() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in [0.5, 0.1, 1e-2] {
        let plan = near_singular_plan(0.5, 0.5, d, DEFAULT_BASE_K).unwrap();
        let q = integrate_face(|s, t| halfspace_poisson([0.5, 0.5], [s, t], d).unwrap(), &plan).unwrap();
        let exact = rectangle_solid_angle(-0.5, 0.5, -0.5, 0.5, d) / (2.0 * PI);
        worst = worst.max((q - exact).abs());
    }
    let plan = near_singular_plan(0.5, 0.5, 1e-4, DEFAULT_BASE_K).unwrap();
    let near = integrate_face(|s, t| halfspace_poisson([0.5, 0.5], [s, t], 1e-4).unwrap(), &plan).unwrap();
    let ok = worst <= 1e-10 && (near - 1.0).abs() <= 1e-3;
    (
        ok,
        format!("max |quad - omega/2pi| = {worst:.3e} (tol 1e-10), mass at d=1e-4 = {near:.8} (tol 1e-3)"),
    )
}

fn laplacian(f: impl Fn(Point3) -> f64, x: Point3, h: f64) -> (f64, f64) {
    let c = f(x);
    let mut lap = 0.0;
    let mut scale = 0.0;
    for axis in 0..3 {
        let e = Point3::default().with_coord(axis, h);
        let d = (f(x + e) - 2.0 * c + f(x - e)) / (h * h);
        lap += d;
        scale += d.abs();
    }
    (lap, scale.max(1.0))
}

fn harmonicity() -> Outcome {
    // seed list: 8 for the kernel pairs, 20 for the approximant points
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut kernel_worst: f64 = 0.0;
    let mut pairs = 0;
    while pairs < 100 {
        let y = Point3::new(rng.random(), rng.random(), rng.random());
        let x = Point3::new(rng.random(), rng.random(), rng.random());
        let images = cube_images(y).unwrap();
        if images.images.iter().any(|i| i.location.distance(x) < 0.2) {
            continue;
        }
        let (lap, scale) = laplacian(|p| cube_s(p, y).unwrap(), x, 1e-3);
        kernel_worst = kernel_worst.max(lap.abs() / scale);
        pairs += 1;
    }

    let backends: Vec<HarmonicApproximant> = vec![
        build_mfs(&trace_residual(5, HarmonicTarget::U2), 3.0).unwrap().0,
        build_poly(&trace_residual(5, HarmonicTarget::U1), 11).unwrap().0,
        {
            let nodes = cheb_boundary_nodes(12).unwrap();
            let values: Vec<f64> = nodes.iter().map(|n| HarmonicTarget::U1.eval_local(n.point - CUBE_CENTER)).collect();
            build_cheb(12, &values).unwrap().0
        },
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut backend_worst: f64 = 0.0;
    for p in &backends {
        for _ in 0..50 {
            let x = Point3::new(
                rng.random_range(0.05..0.95),
                rng.random_range(0.05..0.95),
                rng.random_range(0.05..0.95),
            );
            let (lap, scale) = laplacian(|q| eval_approximant(p, q), x, 1e-3);
            backend_worst = backend_worst.max(lap.abs() / scale);
        }
    }
    let ok = kernel_worst <= 1e-4 && backend_worst <= 1e-5;
    (
        ok,
        format!(
            "cube S: max relative FD Laplacian {kernel_worst:.3e} (tol 1e-4); approximants: {backend_worst:.3e} (tol 1e-5)"
        ),
    )
}

fn boundary_limit() -> Outcome {
    let data = BoundaryData::top_face_hot();
    let colloc = uniform_collocation(5).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let q = colloc.points()[(i * 15) / 2];
        let inward = q.face.normal() * -1.0;
        let v = |eps: f64| hs_interior(q.point + inward * eps, &data, DEFAULT_BASE_K).unwrap().value;
        let (coarse, fine) = (v(1e-3), v(1e-4));
        let limit = fine - (coarse - fine) / 9.0;
        let boundary = hs_boundary(q.point, &data, DEFAULT_BASE_K).unwrap().value;
        worst = worst.max((limit - boundary).abs());
    }
    (worst <= 1e-4, format!("max |interior limit - hs_boundary| at 20 points = {worst:.3e} (tol 1e-4)"))
}

fn observation_bound() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [5, 7] {
        for target in [HarmonicTarget::U1, HarmonicTarget::U2] {
            let residual = trace_residual(n, target);
            let reference = midpoint_reference(&residual.collocation);
            let exact: Vec<f64> = reference
                .points()
                .iter()
                .map(|q| target.eval_local(q.point - CUBE_CENTER))
                .collect();
            let p = build_mfs(&residual, 3.0).unwrap().0;
            let report = assess(&p, &reference, &exact).unwrap();
            let mut interior: f64 = 0.0;
            for i in 1..20 {
                for j in 1..20 {
                    for k in 1..20 {
                        let x = Point3::new(i as f64 / 20.0, j as f64 / 20.0, k as f64 / 20.0);
                        interior = interior.max((eval_approximant(&p, x) - target.eval_local(x - CUBE_CENTER)).abs());
                    }
                }
            }
            let closed = lattice_error(&p, target);
            ok &= interior <= report.e_r + 1e-9;
            parts.push(format!(
                "n={n} {}: interior {interior:.2e} vs 2E_max {:.2e} (closed lattice {closed:.2e})",
                target.name(),
                report.e_r
            ));
        }
    }
    (ok, parts.join("; "))
}

fn corner(sol: &Solution) -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(8).build().unwrap();
    let start = Instant::now();
    let pts = pool
        .install(|| corner_slice(sol, Point3::new(0.0, 0.0, 1.0), 0.0866, 60))
        .unwrap();
    let secs = start.elapsed().as_secs_f64();
    let lo = pts.iter().map(|p| p.value).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(|p| p.value).fold(f64::NEG_INFINITY, f64::max);
    let ok = pts.len() == 3600 && lo >= -1e-3 && hi <= 1.0 + 1e-3 && secs <= 300.0;
    (
        ok,
        format!("{} samples in {secs:.1} s, values in [{lo:.5}, {hi:.5}]", pts.len()),
    )
}

fn main() {
    let sol = hot_solution();
    assert_eq!(sol.diagnostics.backend, BackendKind::Mfs);
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("center symmetry", Box::new(|| center_symmetry(&sol))),
        ("series oracle", Box::new(|| series_agreement(&sol))),
        ("condition and error table", Box::new(table_reproduction)),
        ("refined MFS", Box::new(refined_mfs)),
        ("error bound", Box::new(|| error_bound(&sol))),
        ("near-singular quadrature", Box::new(near_singular_quadrature)),
        ("Poisson normalization", Box::new(poisson_normalization)),
        ("harmonicity", Box::new(harmonicity)),
        ("boundary limit", Box::new(boundary_limit)),
        ("interior bound", Box::new(observation_bound)),
        ("corner slice", Box::new(|| corner(&sol))),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = check();
        if !ok {
            failures += 1;
        }
        println!("criterion {:>2} {}: {name}: {detail}", i + 1, if ok { "PASS" } else { "FAIL" });
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}

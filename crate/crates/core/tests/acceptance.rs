//! Acceptance gate: prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::{PI, TAU};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use pillowcase_core::charvar::{self, max_commutator, torus_knot_closed_form, ClosedFormBranch, Trace, TraceConfig};
use pillowcase_core::knot_groups::{frobenius_deviation, splice, torus_knot, trefoil, unknot, KnotPresentation};
use pillowcase_core::pillowcase::{
    canonicalize, hausdorff_distance, homology_class_in_cylinder, intersect_curves, pillow_distance, straight_path,
    PillowCurve, PillowPoint, DEFAULT_INTERSECTION_TOL,
};
use pillowcase_core::shear::{
    apply_program, apply_shear, fit_program_to_path, perturbed_critical_set, perturbed_critical_set_in,
    ClassFunctionProfile, ShearError, ShearProgram, ShearStep,
};
use pillowcase_core::splice_solver::{self, SpliceRep};
use pillowcase_core::su2::angle;
use pillowcase_core::surgery_calculus::{self, AxiomSet};
use pillowcase_core::svg::{emit_svg, Mark};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const HAUSDORFF_TOL: f64 = 1e-4;
const ENDPOINT_TOL: f64 = 1e-3;
const CUT_LINE_TOL: f64 = 1e-3;
const SPLICE_TOL: f64 = 1e-8;
const AREA_TOL: f64 = 1e-9;
const CORNER_TOL: f64 = 1e-12;
const INVERSE_TOL: f64 = 1e-9;
const CRITICAL_TOL: f64 = 1e-8;

struct Outcome {
    pass: bool,
    detail: String,
}

fn single_threaded<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(f)
}

fn timed<T: Send>(f: impl FnOnce() -> T + Send) -> (T, Duration) {
    single_threaded(|| {
        let t = Instant::now();
        let v = f();
        (v, t.elapsed())
    })
}

/// Roots of an integer polynomial (ascending coefficients, monic top) on
/// the unit circle, via companion-matrix eigenvalues, as `α = arg(t)/2`.
fn alexander_root_angles(p: usize, q: usize) -> Vec<f64> {
    let mul = |a: &[i64], b: &[i64]| {
        let mut r = vec![0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                r[i + j] += x * y;
            }
        }
        r
    };
    let binom = |n: usize| {
        let mut v = vec![0i64; n + 1];
        v[0] = -1;
        v[n] = 1;
        v
    };
    let mut num = mul(&binom(p * q), &binom(1));
    let den = mul(&binom(p), &binom(q));
    let mut quo = vec![0i64; num.len() - den.len() + 1];
    for i in (0..quo.len()).rev() {
        let c = num[i + den.len() - 1];
        quo[i] = c;
        for (j, d) in den.iter().enumerate() {
            num[i + j] -= c * d;
        }
    }
    let n = quo.len() - 1;
    let mut comp = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        comp[(i, n - 1)] = -(quo[i] as f64);
    }
    let mut out: Vec<f64> = comp
        .complex_eigenvalues()
        .iter()
        .map(|z| z.arg().rem_euclid(2.0 * PI) / 2.0)
        .filter(|a| *a > 1e-9 && *a < PI - 1e-9)
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

/// Pairs traced branches with closed-form branches through the rotation
/// angles of the generator images.
fn match_branches(t: &Trace, oracle: &[ClosedFormBranch]) -> Result<Vec<(PillowCurve, ClosedFormBranch)>, String> {
    let curves: Vec<&PillowCurve> = t.irreducible_curves().collect();
    if curves.len() != oracle.len() {
        return Err(format!("{} traced branches, {} expected", curves.len(), oracle.len()));
    }
    let mut used = vec![false; oracle.len()];
    let mut out = Vec::new();
    for (c, b) in curves.iter().zip(&t.branches) {
        let mid = &b[b.len() / 2];
        let (ax, ay) = (angle(mid.assignment[0]), angle(mid.assignment[1]));
        let j = oracle
            .iter()
            .enumerate()
            .position(|(j, o)| !used[j] && (o.theta_x - ax).abs() < 1e-6 && (o.theta_y - ay).abs() < 1e-6)
            .ok_or_else(|| format!("branch with angles ({ax:.6}, {ay:.6}) has no closed-form partner"))?;
        used[j] = true;
        out.push(((*c).clone(), oracle[j]));
    }
    Ok(out)
}

fn worst_hausdorff(pairs: &[(PillowCurve, ClosedFormBranch)]) -> f64 {
    pairs
        .iter()
        .map(|(c, o)| hausdorff_distance(c, &o.curve("oracle")))
        .fold(0.0, f64::max)
}

struct Traced {
    trefoil: (Trace, Duration),
    family: Vec<((i64, i64), Trace)>,
    family_time: Duration,
}

fn trace_all() -> Traced {
    let cfg = TraceConfig::default();
    let trefoil = timed(|| charvar::trace(&trefoil(), &cfg).unwrap());
    let (family, family_time) = timed(|| {
        [(2, 5), (3, 4), (3, 5)]
            .into_iter()
            .map(|(p, q)| ((p, q), charvar::trace(&torus_knot(p, q).unwrap(), &cfg).unwrap()))
            .collect::<Vec<_>>()
    });
    Traced { trefoil, family, family_time }
}

fn criterion_1(tr: &Traced) -> Outcome {
    let (t, dt) = &tr.trefoil;
    let oracle = torus_knot_closed_form(2, 3).unwrap();
    let pairs = match match_branches(t, &oracle) {
        Ok(p) => p,
        Err(e) => return Outcome { pass: false, detail: e },
    };
    let h = worst_hausdorff(&pairs);
    let roots = alexander_root_angles(2, 3);
    let c = &pairs[0].0;
    let ends = [c.points[0].alpha, c.points[c.len() - 1].alpha];
    let end_err = ends
        .iter()
        .map(|e| roots.iter().map(|r| (r - e).abs()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    let roots_ok = roots.len() == 2 && (roots[0] - PI / 6.0).abs() < 1e-9 && (roots[1] - 5.0 * PI / 6.0).abs() < 1e-9;
    let pass = h < HAUSDORFF_TOL && end_err < ENDPOINT_TOL && roots_ok && dt.as_secs_f64() < 30.0;
    Outcome {
        pass,
        detail: format!(
            "hausdorff {h:.2e}, endpoints ({:.6}, {:.6}) vs Alexander roots {roots:.6?} (err {end_err:.2e}), {:.1}s single-threaded",
            ends[0],
            ends[1],
            dt.as_secs_f64()
        ),
    }
}

fn criterion_2(tr: &Traced) -> Outcome {
    let mut pass = tr.family_time.as_secs_f64() < 180.0;
    let mut parts = Vec::new();
    for ((p, q), t) in &tr.family {
        let oracle = torus_knot_closed_form(*p, *q).unwrap();
        match match_branches(t, &oracle) {
            Ok(pairs) => {
                let h = worst_hausdorff(&pairs);
                pass &= h < HAUSDORFF_TOL;
                parts.push(format!("T({p},{q}) {} branches, hausdorff {h:.2e}", pairs.len()));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("T({p},{q}) {e}"));
            }
        }
    }
    parts.push(format!("{:.1}s single-threaded", tr.family_time.as_secs_f64()));
    Outcome { pass, detail: parts.join("; ") }
}

fn criterion_3(tr: &Traced) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let all = std::iter::once(((2, 3), &tr.trefoil.0)).chain(tr.family.iter().map(|(k, t)| (*k, t)));
    for ((p, q), t) in all {
        let oracle = torus_knot_closed_form(p, q).unwrap();
        let bound = oracle
            .iter()
            .map(|b| b.alpha_range.0.min(PI - b.alpha_range.1))
            .fold(f64::INFINITY, f64::min);
        match charvar::min_distance_to_cut_lines(&t.curves) {
            Ok(d) => {
                pass &= (d - bound).abs() < CUT_LINE_TOL;
                parts.push(format!("T({p},{q}) {d:.6} vs {bound:.6}"));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("T({p},{q}) {e}"));
            }
        }
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { pass: false, detail: detail.into() }
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

fn wrap(x: f64) -> f64 {
    (x + PI).rem_euclid(TAU) - PI
}

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn sine_target(amp: f64, n: usize) -> PillowCurve {
    let pts: Vec<(f64, f64)> = (0..=n)
        .map(|i| {
            let a = PI * i as f64 / n as f64;
            (a, PI + amp * a.sin())
        })
        .collect();
    PillowCurve::from_lifted("sine", &pts, false)
}

fn bump(height: f64, n: usize) -> PillowCurve {
    let pts: Vec<(f64, f64)> = (0..=n)
        .map(|i| {
            let a = PI * i as f64 / n as f64;
            let x = a - PI / 2.0;
            (a, PI + (height * height - x * x).max(0.0).sqrt())
        })
        .collect();
    PillowCurve::from_lifted("bump", &pts, false)
}

/// Runs right, doubles back below, then on to Q, crossing itself.
fn zigzag() -> PillowCurve {
    let pts = [(0.0, PI), (2.0, PI), (2.0, PI - 0.5), (1.0, PI - 0.5), (1.0, PI + 0.5), (PI, PI)];
    PillowCurve::from_lifted("zigzag", &pts, false).refined(0.05)
}

/// Closes an arc whose ends sit on `β ≡ 0` by running back along the
/// abelian locus at the lifted height of its last point.
fn close_along_abelian(c: &PillowCurve) -> PillowCurve {
    let mut pts = c.lifted_points();
    let (a0, b0) = pts[0];
    let (a1, b1) = pts[pts.len() - 1];
    let n = ((a1 - a0).abs() / 0.01).ceil().max(1.0) as usize;
    for i in 1..=n {
        pts.push((a1 + (a0 - a1) * i as f64 / n as f64, b1));
    }
    pts.push((a0, b0 + TAU * ((b1 - b0) / TAU).round()));
    PillowCurve::from_lifted("closed", &pts, true)
}

fn criterion_4(tr: &Traced) -> Outcome {
    let Some(arc) = tr.trefoil.0.irreducible_curves().next() else {
        return fail("no irreducible arc traced");
    };
    let arc = if arc.points[0].alpha > arc.points[arc.len() - 1].alpha { arc.reversed() } else { arc.clone() };
    // the return leg along the abelian locus has constant β
    let b = torus_knot_closed_form(2, 3).unwrap()[0];
    let oracle = ((b.beta(b.alpha_range.1) - b.beta(b.alpha_range.0)) / TAU).round() as i64;
    let mut classes = Vec::new();
    for c in [arc.clone(), arc.refined(0.01), arc.refined(0.001)] {
        match homology_class_in_cylinder(&close_along_abelian(&c)) {
            Ok(k) => classes.push(k),
            Err(e) => return fail(e.to_string()),
        }
    }
    let pass = classes[0] != 0 && classes.iter().all(|&k| k == oracle);
    Outcome { pass, detail: format!("class {classes:?} as traced and refined to 0.01, 0.001; winding oracle {oracle}") }
}

/// Roots of the trefoil–trefoil splice condition on a `t`-grid. The left
/// point `(α, π − 6α)` must equal the transposed right point `(π − 6t, t)`
/// or its mirror `(6t − π, −t)` on the torus, with both α and t in
/// `(π/6, 5π/6)`. The mismatch is piecewise linear in t, so the
/// interpolated roots are exact.
fn splice_grid_oracle(h: f64) -> Vec<PillowPoint> {
    let (lo, hi) = (PI / 6.0, 5.0 * PI / 6.0);
    let n = ((hi - lo) / h).floor() as usize;
    let mut roots = Vec::new();
    for sign in [1.0, -1.0] {
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..n {
            let t = lo + (i as f64 + 0.5) * h;
            let alpha = (sign * (PI - 6.0 * t)).rem_euclid(TAU);
            let g = wrap(PI - 6.0 * alpha - sign * t);
            let inside = alpha > lo && alpha < hi;
            if let (true, Some((a0, g0))) = (inside, prev) {
                if (alpha - a0).abs() < 0.1 && g0.abs() < 1.0 && g.abs() < 1.0 && (g0 < 0.0) != (g < 0.0) {
                    let a = a0 + g0 / (g0 - g) * (alpha - a0);
                    roots.push(canonicalize(a, PI - 6.0 * a));
                }
            }
            prev = inside.then_some((alpha, g));
        }
    }
    roots
}

/// Residual over both relator sets and both gluing equations, and the
/// largest commutator among all generator images, from the witness alone.
fn check_witness(left: &KnotPresentation, right: &KnotPresentation, r: &SpliceRep) -> (f64, f64) {
    let (l, rr, g) = (&r.left.assignment, &r.right.assignment, r.aligner);
    let res = left
        .relator_residual(l)
        .max(right.relator_residual(rr))
        .max(frobenius_deviation(left.meridian_image(l), g.conjugate(right.longitude_image(rr))))
        .max(frobenius_deviation(left.longitude_image(l), g.conjugate(right.meridian_image(rr))));
    let mut all = l.clone();
    all.extend(rr.iter().map(|q| g.conjugate(*q)));
    (res, max_commutator(&all))
}

fn criterion_5() -> Outcome {
    let p = splice(trefoil(), trefoil()).unwrap();
    let (reps, dt) = timed(|| splice_solver::find_splice_reps(&p, &TraceConfig::default()));
    let reps = match reps {
        Ok(r) => r,
        Err(e) => return fail(e.to_string()),
    };
    let roots = splice_grid_oracle(1e-4);
    let mut worst_res: f64 = 0.0;
    let mut min_comm = f64::INFINITY;
    let mut worst_match: f64 = 0.0;
    for r in &reps {
        let (res, comm) = check_witness(&p.left, &p.right, r);
        worst_res = worst_res.max(res);
        min_comm = min_comm.min(comm);
        worst_match = worst_match.max(roots.iter().map(|q| pillow_distance(*q, r.point)).fold(f64::INFINITY, f64::min));
    }
    let pass = !reps.is_empty()
        && reps.len() == roots.len()
        && worst_res < SPLICE_TOL
        && min_comm > 1e-6
        && worst_match < 1e-6
        && dt.as_secs_f64() < 120.0;
    Outcome {
        pass,
        detail: format!(
            "{} witnesses vs {} grid roots (worst offset {worst_match:.1e}), residual {worst_res:.1e}, min commutator {min_comm:.3}, {:.1}s single-threaded",
            reps.len(),
            roots.len(),
            dt.as_secs_f64()
        ),
    }
}

fn random_step(rng: &mut ChaCha8Rng) -> ShearStep {
    loop {
        let d = [rng.gen_range(-3i64..=3), rng.gen_range(-3i64..=3)];
        let deg = rng.gen_range(1..=6);
        let c: Vec<f64> = (0..=deg).map(|_| rng.gen_range(-0.2..0.2)).collect();
        if let Ok(s) = ShearStep::new(d, ClassFunctionProfile::new(c).unwrap()) {
            return s;
        }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// `∮ x dy` over the image of a counter-clockwise triangle boundary, by
/// composite Gauss–Legendre along each edge. The tangent uses the closed
/// form `f′ = −Σ k² a_k cos kt`.
fn image_area(s: &ShearStep, tri: [(f64, f64); 3], gl: &[(f64, f64)]) -> f64 {
    let [d1, d2] = s.direction().map(|d| d as f64);
    let c = s.profile().coeffs();
    let deg = (c.len() - 1) as f64;
    let f_prime = |t: f64| -> f64 { -c.iter().enumerate().map(|(k, a)| (k * k) as f64 * a * (k as f64 * t).cos()).sum::<f64>() };
    let mut sum = 0.0;
    for e in 0..3 {
        let (a, b) = (tri[e], tri[(e + 1) % 3]);
        let v = (b.0 - a.0, b.1 - a.1);
        let rate = d2 * v.0 - d1 * v.1;
        let panels = ((rate.abs() * deg * 2.0 / 3.0).ceil() as usize).max(4);
        for j in 0..panels {
            for &(x, w) in gl {
                let u = (j as f64 + (x + 1.0) / 2.0) / panels as f64;
                let p = (a.0 + u * v.0, a.1 + u * v.1);
                let img = s.apply_cover(p);
                let dy = v.1 + f_prime(d2 * p.0 - d1 * p.1) * rate * d2;
                sum += w / 2.0 / panels as f64 * img.0 * dy;
            }
        }
    }
    sum
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let gl = gauss_legendre(16);
    let corners = [(0.0, 0.0), (0.0, PI), (PI, 0.0), (PI, PI)].map(|(alpha, beta)| PillowPoint { alpha, beta });
    let (mut area_err, mut corner_err): (f64, f64) = (0.0, 0.0);
    for _ in 0..10_000 {
        let s = random_step(&mut rng);
        let mut tri = [(); 3].map(|_| (rng.gen_range(0.05..PI - 0.05), rng.gen_range(0.05..TAU - 0.05)));
        let cross = (tri[1].0 - tri[0].0) * (tri[2].1 - tri[0].1) - (tri[1].1 - tri[0].1) * (tri[2].0 - tri[0].0);
        if cross < 0.0 {
            tri.swap(1, 2);
        }
        area_err = area_err.max((image_area(&s, tri, &gl) - cross.abs() / 2.0).abs());
        for c in corners {
            corner_err = corner_err.max(pillow_distance(apply_shear(&s, c), c));
        }
    }
    let grid: Vec<(f64, f64)> =
        (0..25).flat_map(|i| (0..40).map(move |j| (PI * i as f64 / 24.0, TAU * j as f64 / 40.0))).collect();
    let mut inverse_err: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.gen_range(1..=6);
        let prog = ShearProgram { steps: (0..n).map(|_| random_step(&mut rng)).collect() };
        let inv = prog.inverse();
        for comp in [prog.then(&inv), inv.then(&prog)] {
            for &p in &grid {
                let q = comp.apply_cover(p);
                inverse_err = inverse_err.max(((q.0 - p.0).powi(2) + (q.1 - p.1).powi(2)).sqrt());
            }
        }
    }
    Outcome {
        pass: area_err < AREA_TOL && corner_err < CORNER_TOL && inverse_err < INVERSE_TOL,
        detail: format!(
            "10^4 steps: area error {area_err:.1e}, corner drift {corner_err:.1e}; inverse error {inverse_err:.1e} on {} grid points",
            grid.len()
        ),
    }
}

/// The irreducible β at `alpha` nearest to `c₀`, from a fresh multistart.
fn beta_near_c0(k: &KnotPresentation, alpha: f64, cfg: &TraceConfig) -> Option<f64> {
    let target = PillowPoint { alpha, beta: PI };
    charvar::solve_at_alpha(k, alpha, cfg)
        .ok()?
        .into_iter()
        .filter(|r| r.irreducible)
        .map(|r| r.beta)
        .min_by(|a, b| {
            let da = pillow_distance(PillowPoint { alpha, beta: *a }, target);
            let db = pillow_distance(PillowPoint { alpha, beta: *b }, target);
            da.total_cmp(&db)
        })
}

/// Bisection on `β(α) − π` around a polyline crossing.
fn refine_crossing(k: &KnotPresentation, alpha: f64, cfg: &TraceConfig) -> Option<PillowPoint> {
    let h = |a: f64| beta_near_c0(k, a, cfg).map(|b| wrap(b - PI));
    let (mut lo, mut hi) = (alpha - 0.005, alpha + 0.005);
    let (mut hlo, hhi) = (h(lo)?, h(hi)?);
    if (hlo < 0.0) == (hhi < 0.0) {
        return None;
    }
    for _ in 0..45 {
        let mid = 0.5 * (lo + hi);
        let hm = h(mid)?;
        if (hm < 0.0) == (hlo < 0.0) {
            lo = mid;
            hlo = hm;
        } else {
            hi = mid;
        }
    }
    let a = 0.5 * (lo + hi);
    Some(canonicalize(a, beta_near_c0(k, a, cfg)?))
}

fn criterion_7(tr: &Traced) -> Outcome {
    let cfg = TraceConfig::default();
    let k = trefoil();
    let t = &tr.trefoil.0;
    let cs = match perturbed_critical_set_in(&k, t, &ShearProgram::empty(), &cfg) {
        Ok(c) => c,
        Err(e) => return fail(e.to_string()),
    };
    let c0 = straight_path();
    let mut oracle = Vec::new();
    for c in &t.curves {
        for hit in intersect_curves(c, &c0, DEFAULT_INTERSECTION_TOL).unwrap() {
            match refine_crossing(&k, hit.point.alpha, &cfg) {
                Some(p) => oracle.push(p),
                None => return fail(format!("crossing near α = {:.6} does not refine", hit.point.alpha)),
            }
        }
    }
    oracle.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    let agree = cs.points.len() == oracle.len();
    let worst = cs
        .points
        .iter()
        .zip(&oracle)
        .map(|(c, o)| pillow_distance(PillowPoint { alpha: c.rep.alpha, beta: c.rep.beta }, *o))
        .fold(0.0, f64::max);
    let fit = match fit_program_to_path(&bump(0.8, 400), 40, 0.05) {
        Ok(r) => r,
        Err(e) => return fail(e.to_string()),
    };
    let c_prime = apply_program(&fit.program, &c0);
    // the unknot's image is the abelian locus β ≡ 0
    let gap = c_prime.points.iter().map(|p| p.beta.min(TAU - p.beta)).fold(f64::INFINITY, f64::min) - c_prime.max_step();
    let unknot_points = match perturbed_critical_set(&unknot(), &fit.program, &cfg) {
        Ok(c) => c.points.len(),
        Err(e) => return fail(e.to_string()),
    };
    Outcome {
        pass: agree && worst < CRITICAL_TOL && gap > 0.0 && unknot_points == 0,
        detail: format!(
            "trefoil: {} critical points vs {} refined crossings, worst {worst:.1e}; unknot: gap {gap:.3} after {} fitted steps, {unknot_points} critical points",
            cs.points.len(),
            oracle.len(),
            fit.program.steps.len()
        ),
    }
}

fn criterion_8() -> Outcome {
    let sine = match fit_program_to_path(&sine_target(0.3, 97), 5, 1e-9) {
        Ok(r) => r,
        Err(e) => return fail(format!("sine target: {e}")),
    };
    let t0 = Instant::now();
    let bump = match fit_program_to_path(&bump(0.8, 400), 40, 0.05) {
        Ok(r) => r,
        Err(e) => return fail(format!("bump target: {e}")),
    };
    let bump_time = t0.elapsed();
    let (adv_ok, adv) = match fit_program_to_path(&zigzag(), 6, 1e-3) {
        Err(ShearError::BudgetExceeded { best, distance }) => {
            (distance.is_finite() && distance > 1e-3 && best.steps.len() <= 6, format!("budget exceeded at {distance:.3} with {} steps", best.steps.len()))
        }
        other => (false, format!("expected a budget report, got {other:?}")),
    };
    Outcome {
        pass: sine.program.steps.len() == 1 && sine.distance < 1e-9 && bump.distance < 0.05 && bump.program.steps.len() <= 40 && adv_ok,
        detail: format!(
            "sine: {} step, distance {:.1e}; bump 0.8: {} steps, distance {:.3} in {:.1}s; self-crossing: {adv}",
            sine.program.steps.len(),
            sine.distance,
            bump.program.steps.len(),
            bump.distance,
            bump_time.as_secs_f64()
        ),
    }
}

fn criterion_9() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["incompressible", "s2xs1_surgery"] {
        let text = std::fs::read_to_string(fixtures().join(format!("{name}.json"))).unwrap();
        let t0 = Instant::now();
        let outcome = (|| -> Result<(String, String), surgery_calculus::CalculusError> {
            let a = AxiomSet::from_json(&text)?;
            let r = surgery_calculus::run(&a, None)?;
            surgery_calculus::replay(&r.store)?;
            let c = r.contradiction.ok_or(surgery_calculus::CalculusError::UnknownFact("no contradiction".into()))?;
            let transcript = surgery_calculus::explain(&r.store, &c)?;
            let tree = serde_json::to_string_pretty(&surgery_calculus::explain_tree(&r.store, &c)?).unwrap() + "\n";
            Ok((transcript, tree))
        })();
        let dt = t0.elapsed();
        let (transcript, tree) = match outcome {
            Ok(v) => v,
            Err(e) => {
                pass = false;
                parts.push(format!("{name}: {e}"));
                continue;
            }
        };
        let golden = |ext: &str| std::fs::read_to_string(fixtures().join("golden").join(format!("{name}.{ext}"))).unwrap();
        let chain = ["R2 Gordon", "R1a", "R1b", "R3", "clash"];
        let positions: Vec<Option<usize>> = chain.iter().map(|m| transcript.find(m)).collect();
        let ordered = positions.iter().all(Option::is_some) && positions.windows(2).all(|w| w[0] < w[1]);
        let ok = transcript.ends_with("CONTRADICTION\n")
            && transcript == golden("txt")
            && tree == golden("json")
            && ordered
            && dt.as_secs_f64() < 1.0;
        pass &= ok;
        parts.push(format!(
            "{name}: {} lines, golden {}, chain {}, replay ok, {:.1}ms",
            transcript.lines().count(),
            if transcript == golden("txt") && tree == golden("json") { "match" } else { "MISMATCH" },
            if ordered { "ordered" } else { "OUT OF ORDER" },
            dt.as_secs_f64() * 1e3
        ));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).unwrap()
}

/// Every artifact kind, rendered to strings with the default seed.
fn artifacts() -> Vec<(&'static str, String)> {
    let cfg = TraceConfig::default();
    let k = trefoil();
    let t = charvar::trace(&k, &cfg).unwrap();
    let mut out = vec![
        ("curves.json", json(&t.curves)),
        ("reps.json", json(&t.records(&k))),
        ("charvar.svg", emit_svg(&t.curves, &[])),
    ];
    let cs = perturbed_critical_set_in(&k, &t, &ShearProgram::empty(), &cfg).unwrap();
    let records: Vec<_> = cs.points.iter().map(|p| p.rep.record(&k)).collect();
    out.push(("critical.json", json(&records)));
    let fit = fit_program_to_path(&bump(0.8, 400), 40, 0.05).unwrap();
    out.push(("program.json", json(&fit.program)));
    out.push(("fit.svg", emit_svg(&[fit.image], &[])));
    let p = splice(trefoil(), trefoil()).unwrap();
    let s = splice_solver::search(&p, &cfg).unwrap();
    let reps = splice_solver::reps_from_search(&p, &s, &cfg).unwrap();
    let recs: Vec<_> = reps.iter().map(|r| r.record(&p)).collect();
    out.push(("splice.json", json(&recs)));
    let marks: Vec<Mark> = reps.iter().map(|r| Mark { point: r.point, label: "w".into() }).collect();
    out.push(("splice.svg", emit_svg(&s.right_transposed, &marks)));
    for name in ["incompressible", "s2xs1_surgery"] {
        let a = AxiomSet::from_json(&std::fs::read_to_string(fixtures().join(format!("{name}.json"))).unwrap()).unwrap();
        let r = surgery_calculus::run(&a, None).unwrap();
        let c = r.contradiction.unwrap();
        out.push(("derivation.txt", surgery_calculus::explain(&r.store, &c).unwrap()));
        out.push(("derivation.json", json(&surgery_calculus::explain_tree(&r.store, &c).unwrap())));
    }
    out
}

fn criterion_10() -> Outcome {
    let runs = [in_pool(1, artifacts), in_pool(1, artifacts), in_pool(4, artifacts)];
    let differing: Vec<&str> = runs[0]
        .iter()
        .zip(&runs[1])
        .zip(&runs[2])
        .filter(|((a, b), c)| a.1 != b.1 || a.1 != c.1)
        .map(|((a, _), _)| a.0)
        .collect();
    let bytes: usize = runs[0].iter().map(|(_, s)| s.len()).sum();
    Outcome {
        pass: differing.is_empty(),
        detail: format!(
            "{} artifacts ({bytes} bytes) over two 1-thread runs and one 4-thread run; differing: {differing:?}",
            runs[0].len()
        ),
    }
}

fn main() {
    let traced = trace_all();
    type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("1 trefoil image", Box::new(|| criterion_1(&traced))),
        ("2 torus-knot family", Box::new(|| criterion_2(&traced))),
        ("3 distance to cut lines", Box::new(|| criterion_3(&traced))),
        ("4 essential closed curve", Box::new(|| criterion_4(&traced))),
        ("5 splice witnesses", Box::new(criterion_5)),
        ("6 shear correctness", Box::new(criterion_6)),
        ("7 perturbed critical set", Box::new(|| criterion_7(&traced))),
        ("8 path fitting", Box::new(criterion_8)),
        ("9 surgery calculus", Box::new(criterion_9)),
        ("10 determinism", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let o = f();
        println!("criterion {name}: {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

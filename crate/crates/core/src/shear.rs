//! Shearing maps of the pillowcase and their compositions.
//!
//! A step with primitive direction `d = (d₁, d₂)` and profile `g` acts on
//! the torus cover by `p ↦ p + f(d₂α − d₁β)·d` with `f = g′`. The
//! transverse coordinate `d₂α − d₁β` is constant along `d`, so the map is
//! a shear with Jacobian determinant 1, its inverse is the step with `−g`,
//! and it commutes with the involution and with 2π-translations because
//! `f` is odd and 2π-periodic. Direction `(0, 1)` is `(α, β) ↦ (α, β + f(α))`.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::charvar::{self, CharvarError, RepPoint, Trace, TraceConfig, ABELIAN_LABEL};
use crate::knot_groups::{abelianization, KnotPresentation};
use crate::pillowcase::{
    canonicalize, hausdorff_distance, intersect_curves, pillow_distance, straight_path, wrap_pi, Intersection,
    PillowCurve, PillowError, PillowPoint, DEFAULT_INTERSECTION_TOL, DEFAULT_MAX_STEP,
};
use crate::solver::{self, quat_residual, LmOptions};
use crate::su2::Su2Elem;

/// Degree cap for fitted profiles.
pub const MAX_PROFILE_DEGREE: usize = 32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShearError {
    #[error("direction ({0}, {1}) is not primitive")]
    NotPrimitive(i64, i64),
    #[error("non-finite profile coefficient")]
    BadProfile,
    #[error("fit stopped at distance {distance:.3e} with {} steps", best.steps.len())]
    BudgetExceeded { best: ShearProgram, distance: f64 },
    #[error("target is not a path from P to Q: {0}")]
    BadTarget(String),
    #[error(transparent)]
    Charvar(#[from] CharvarError),
    #[error(transparent)]
    Pillow(#[from] PillowError),
}

/// `g(t) = Σ a_k cos(kt)`; even and 2π-periodic by construction.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassFunctionProfile {
    coeffs: Vec<f64>,
}

impl ClassFunctionProfile {
    pub fn new(coeffs: Vec<f64>) -> Result<Self, ShearError> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(ShearError::BadProfile);
        }
        Ok(ClassFunctionProfile { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn g(&self, t: f64) -> f64 {
        self.coeffs.iter().enumerate().map(|(k, a)| a * (k as f64 * t).cos()).sum()
    }

    /// `f = g′ = −Σ k a_k sin(kt)`.
    pub fn f(&self, t: f64) -> f64 {
        -self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, a)| k as f64 * a * (k as f64 * t).sin())
            .sum::<f64>()
    }

    pub fn f_prime(&self, t: f64) -> f64 {
        -self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, a)| (k * k) as f64 * a * (k as f64 * t).cos())
            .sum::<f64>()
    }

    pub fn negated(&self) -> Self {
        ClassFunctionProfile { coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }

    /// True when `f` vanishes identically (constant `g`).
    pub fn is_flat(&self) -> bool {
        self.coeffs.iter().skip(1).all(|&a| a == 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepRepr", into = "StepRepr")]
pub struct ShearStep {
    direction: [i64; 2],
    profile: ClassFunctionProfile,
}

#[derive(Serialize, Deserialize)]
struct StepRepr {
    direction: [i64; 2],
    cosine_coeffs: Vec<f64>,
}

impl TryFrom<StepRepr> for ShearStep {
    type Error = ShearError;
    fn try_from(r: StepRepr) -> Result<Self, ShearError> {
        ShearStep::new(r.direction, ClassFunctionProfile::new(r.cosine_coeffs)?)
    }
}

impl From<ShearStep> for StepRepr {
    fn from(s: ShearStep) -> Self {
        StepRepr { direction: s.direction, cosine_coeffs: s.profile.coeffs }
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl ShearStep {
    pub fn new(direction: [i64; 2], profile: ClassFunctionProfile) -> Result<Self, ShearError> {
        if gcd(direction[0], direction[1]) != 1 {
            return Err(ShearError::NotPrimitive(direction[0], direction[1]));
        }
        Ok(ShearStep { direction, profile })
    }

    pub fn direction(&self) -> [i64; 2] {
        self.direction
    }

    pub fn profile(&self) -> &ClassFunctionProfile {
        &self.profile
    }

    fn transverse(&self, p: (f64, f64)) -> f64 {
        self.direction[1] as f64 * p.0 - self.direction[0] as f64 * p.1
    }

    /// The step on the torus cover.
    pub fn apply_cover(&self, p: (f64, f64)) -> (f64, f64) {
        let s = self.profile.f(self.transverse(p));
        (p.0 + s * self.direction[0] as f64, p.1 + s * self.direction[1] as f64)
    }

    /// Jacobian matrix on the cover, row-major.
    pub fn jacobian(&self, p: (f64, f64)) -> [[f64; 2]; 2] {
        let fp = self.profile.f_prime(self.transverse(p));
        let (d1, d2) = (self.direction[0] as f64, self.direction[1] as f64);
        [[1.0 + fp * d1 * d2, -fp * d1 * d1], [fp * d2 * d2, 1.0 - fp * d1 * d2]]
    }

    pub fn inverse(&self) -> ShearStep {
        ShearStep { direction: self.direction, profile: self.profile.negated() }
    }
}

/// Applies one step to a canonical point.
pub fn apply_shear(s: &ShearStep, p: PillowPoint) -> PillowPoint {
    let (a, b) = s.apply_cover((p.alpha, p.beta));
    canonicalize(a, b)
}

/// Ordered composition of steps; the first step acts first.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ShearProgram {
    pub steps: Vec<ShearStep>,
}

impl ShearProgram {
    pub fn empty() -> Self {
        ShearProgram::default()
    }

    pub fn apply_cover(&self, p: (f64, f64)) -> (f64, f64) {
        self.steps.iter().fold(p, |q, s| s.apply_cover(q))
    }

    pub fn apply_point(&self, p: PillowPoint) -> PillowPoint {
        let (a, b) = self.apply_cover((p.alpha, p.beta));
        canonicalize(a, b)
    }

    /// Reversed order with negated profiles.
    pub fn inverse(&self) -> ShearProgram {
        ShearProgram { steps: self.steps.iter().rev().map(ShearStep::inverse).collect() }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &ShearProgram) -> ShearProgram {
        let mut steps = self.steps.clone();
        steps.extend(next.steps.iter().cloned());
        ShearProgram { steps }
    }
}

/// Image of a curve under `prog`, refined so that consecutive image
/// vertices are at most `max_step` apart.
pub fn apply_program_with_step(prog: &ShearProgram, c: &PillowCurve, max_step: f64) -> PillowCurve {
    let src = c.lifted_points();
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(src.len());
    for (i, &p) in src.iter().enumerate() {
        let fp = prog.apply_cover(p);
        if i > 0 {
            let q = src[i - 1];
            let fq = *out.last().expect("previous image");
            subdivide(prog, q, p, fq, fp, max_step, 0, &mut out);
        }
        out.push(fp);
    }
    PillowCurve::from_cover_points(c.label.clone(), &out, c.closed)
}

#[allow(clippy::too_many_arguments)]
fn subdivide(
    prog: &ShearProgram,
    p: (f64, f64),
    q: (f64, f64),
    fp: (f64, f64),
    fq: (f64, f64),
    max_step: f64,
    depth: usize,
    out: &mut Vec<(f64, f64)>,
) {
    let d = ((fp.0 - fq.0).powi(2) + (fp.1 - fq.1).powi(2)).sqrt();
    if d <= max_step || depth >= 30 {
        return;
    }
    let m = (0.5 * (p.0 + q.0), 0.5 * (p.1 + q.1));
    let fm = prog.apply_cover(m);
    subdivide(prog, p, m, fp, fm, max_step, depth + 1, out);
    out.push(fm);
    subdivide(prog, m, q, fm, fq, max_step, depth + 1, out);
}

pub fn apply_program(prog: &ShearProgram, c: &PillowCurve) -> PillowCurve {
    apply_program_with_step(prog, c, DEFAULT_MAX_STEP)
}

/// Result of a successful fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub program: ShearProgram,
    pub distance: f64,
    /// Image of `c₀` under the program.
    pub image: PillowCurve,
}

/// `c₀` sampled at the α-values of the target's vertices, so that a target
/// reachable exactly by a program is matched vertex for vertex.
fn c0_on_grid(target: &PillowCurve) -> PillowCurve {
    let mut alphas: Vec<f64> = target.points.iter().map(|p| p.alpha).collect();
    alphas.push(0.0);
    alphas.push(PI);
    alphas.sort_by(f64::total_cmp);
    alphas.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for (i, &a) in alphas.iter().enumerate() {
        if i > 0 {
            let prev = alphas[i - 1];
            let n = ((a - prev) / DEFAULT_MAX_STEP).ceil() as usize;
            for j in 1..n {
                pts.push((prev + (a - prev) * j as f64 / n as f64, PI));
            }
        }
        pts.push((a, PI));
    }
    PillowCurve::from_lifted("c0", &pts, false)
}

/// Samples `(x_j, δ_j)` of the displacement a step of direction `dir`
/// must produce: vertical offsets at fixed α for `(0, 1)`, horizontal
/// offsets at fixed β for `(1, 0)`.
fn displacement_samples(img: &PillowCurve, target: &PillowCurve, vertical: bool) -> Vec<(f64, f64)> {
    let tl = target.lifted_points();
    let mut out = Vec::new();
    for (a, b) in img.lifted_points() {
        let mut best: Option<f64> = None;
        for w in tl.windows(2) {
            let (p, q) = (w[0], w[1]);
            let cand = if vertical {
                let (lo, hi) = (p.0.min(q.0), p.0.max(q.0));
                if a < lo || a > hi || hi - lo < 1e-15 {
                    continue;
                }
                let t = (a - p.0) / (q.0 - p.0);
                wrap_pi(p.1 + t * (q.1 - p.1) - b)
            } else {
                let (lo, hi) = (p.1.min(q.1), p.1.max(q.1));
                if hi - lo < 1e-15 {
                    continue;
                }
                let k = ((lo - b) / TAU).ceil();
                let bb = b + k * TAU;
                if bb > hi {
                    continue;
                }
                let t = (bb - p.1) / (q.1 - p.1);
                p.0 + t * (q.0 - p.0) - a
            };
            if best.is_none_or(|x: f64| cand.abs() < x.abs()) {
                best = Some(cand);
            }
        }
        if let Some(d) = best {
            out.push((if vertical { a } else { b }, d));
        }
    }
    out
}

/// Least-squares `f ≈ Σ b_k sin(kx)`, returned as a cosine profile.
fn fit_profile(samples: &[(f64, f64)], degree: usize, scale: f64) -> Option<ClassFunctionProfile> {
    if samples.is_empty() {
        return None;
    }
    let m = DMatrix::from_fn(samples.len(), degree, |j, k| ((k + 1) as f64 * samples[j].0).sin());
    let rhs = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.1));
    let b = m.svd(true, true).solve(&rhs, 1e-12).ok()?;
    let mut coeffs = vec![0.0; degree + 1];
    for k in 1..=degree {
        let a = -scale * b[k - 1] / k as f64;
        coeffs[k] = if a.abs() < 1e-14 { 0.0 } else { a };
    }
    while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
        coeffs.pop();
    }
    ClassFunctionProfile::new(coeffs).ok()
}

/// Greedy fit of a program mapping `c₀` to `target`, alternating `(0,1)`
/// and `(1,0)` steps. Only improving steps are kept; the distance is the
/// symmetric Hausdorff distance in the cylinder metric.
pub fn fit_program_to_path(target: &PillowCurve, budget: usize, tol: f64) -> Result<FitReport, ShearError> {
    if target.len() < 2 {
        return Err(ShearError::BadTarget("fewer than two vertices".into()));
    }
    if pillow_distance(target.points[0], PillowPoint::P) > 1e-9 {
        return Err(ShearError::BadTarget("does not start at P".into()));
    }
    if pillow_distance(target.points[target.len() - 1], PillowPoint::Q) > 1e-9 {
        return Err(ShearError::BadTarget("does not end at Q".into()));
    }
    let base = c0_on_grid(target);
    let eval = |prog: &ShearProgram| {
        let img = apply_program(prog, &base);
        let d = hausdorff_distance(&img, target);
        (img, d)
    };
    let mut prog = ShearProgram::empty();
    let (mut img, mut dist) = eval(&prog);
    let mut turn = 0usize;
    let mut stalled = 0;
    while dist > tol && prog.steps.len() < budget && stalled < 2 {
        let vertical = turn.is_multiple_of(2);
        turn += 1;
        let dir = if vertical { [0, 1] } else { [1, 0] };
        let samples = displacement_samples(&img, target, vertical);
        let mut best: Option<(ShearProgram, PillowCurve, f64)> = None;
        for degree in [MAX_PROFILE_DEGREE, 16, 8, 4] {
            for scale in [1.0, 0.5] {
                let Some(profile) = fit_profile(&samples, degree, scale) else { continue };
                if profile.is_flat() {
                    continue;
                }
                let step = ShearStep::new(dir, profile).expect("axis directions are primitive");
                let cand = prog.then(&ShearProgram { steps: vec![step] });
                let (ci, cd) = eval(&cand);
                if cd < dist && best.as_ref().is_none_or(|b| cd < b.2) {
                    best = Some((cand, ci, cd));
                }
            }
        }
        match best {
            Some((p, i, d)) => {
                prog = p;
                img = i;
                dist = d;
                stalled = 0;
            }
            None => stalled += 1,
        }
    }
    if dist <= tol {
        Ok(FitReport { program: prog, distance: dist, image: img })
    } else {
        Err(ShearError::BudgetExceeded { best: prog, distance: dist })
    }
}

/// A point of `R(K | c′)`; each one is double-covered upstairs.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint {
    pub rep: RepPoint,
    pub multiplicity: u32,
    /// Label of the traced curve the point came from.
    pub source: String,
}

#[derive(Debug, Clone)]
pub struct CriticalSet {
    /// `c′ = prog(c₀)`.
    pub curve: PillowCurve,
    /// Raw polyline intersections before refinement, per source curve.
    pub intersections: Vec<(String, Intersection)>,
    pub points: Vec<CriticalPoint>,
}

/// Distance from `(α, β)` to `c′ = prog(c₀)`, measured through the exact
/// map: the preimage is projected onto `c₀` and pushed forward again.
pub fn distance_to_perturbed_line(prog: &ShearProgram, p: PillowPoint) -> f64 {
    let (a, _) = prog.inverse().apply_cover((p.alpha, p.beta));
    let on_line = prog.apply_point(canonicalize(a, PI));
    pillow_distance(on_line, p)
}

fn abelian_start(k: &KnotPresentation, alpha: f64) -> Vec<Su2Elem> {
    let phi = abelianization(k).unwrap_or_else(|_| vec![0; k.n_gens()]);
    phi.iter().map(|&e| Su2Elem::diagonal(e as f64 * alpha)).collect()
}

fn refine_critical(k: &KnotPresentation, prog: &ShearProgram, start: Vec<Su2Elem>, alpha: f64, cfg: &TraceConfig) -> Option<RepPoint> {
    let inv = prog.inverse();
    let residual = |q: &[Su2Elem], s: &[f64]| {
        let a = s[0];
        let mut r = Vec::with_capacity(4 * (k.relators.len() + 1) + 1);
        for rel in &k.relators {
            r.extend(quat_residual(rel.eval(q), Su2Elem::IDENTITY));
        }
        r.extend(quat_residual(k.meridian.eval(q), Su2Elem::diagonal(a)));
        let lam = k.longitude.eval(q);
        let b = lam.x.atan2(lam.w);
        let (_, bb) = inv.apply_cover((a, b));
        r.push(wrap_pi(bb - PI));
        r
    };
    let out = solver::solve(residual, start, vec![alpha], LmOptions { tol: cfg.newton_tol * 1e-3, max_iters: 100 });
    let p = charvar::rep_point(k, charvar::normalize_gauge(&out.quats));
    (p.residual < cfg.newton_tol && out.residual < 1e-9).then_some(p)
}

/// `R(K | c′)` computed from a precomputed trace of `K`.
pub fn perturbed_critical_set_in(
    k: &KnotPresentation,
    trace: &Trace,
    prog: &ShearProgram,
    cfg: &TraceConfig,
) -> Result<CriticalSet, ShearError> {
    let c_prime = apply_program(prog, &straight_path());
    let mut intersections = Vec::new();
    let mut points: Vec<CriticalPoint> = Vec::new();
    let branch_of = |label: &str| {
        trace
            .curves
            .iter()
            .position(|c| c.label == label)
            .filter(|&i| i < trace.branches.len())
            .map(|i| &trace.branches[i])
    };
    for curve in &trace.curves {
        for hit in intersect_curves(curve, &c_prime, DEFAULT_INTERSECTION_TOL)? {
            intersections.push((curve.label.clone(), hit));
            let alpha = hit.point.alpha;
            let start = match branch_of(&curve.label) {
                Some(b) if curve.label != ABELIAN_LABEL => {
                    let i = hit.segments.0;
                    let (p0, p1) = (&b[i], &b[(i + 1).min(b.len() - 1)]);
                    if (p0.alpha - alpha).abs() <= (p1.alpha - alpha).abs() {
                        p0.assignment.clone()
                    } else {
                        p1.assignment.clone()
                    }
                }
                _ => abelian_start(k, alpha),
            };
            let Some(rep) = refine_critical(k, prog, start, alpha, cfg) else {
                return Err(CharvarError::NoConvergence { alpha, best_residual: f64::NAN }.into());
            };
            if points.iter().any(|c| c.rep.distance(&rep) < cfg.dedup_radius) {
                continue;
            }
            points.push(CriticalPoint { rep, multiplicity: 2, source: curve.label.clone() });
        }
    }
    points.sort_by(|a, b| a.rep.alpha.total_cmp(&b.rep.alpha).then(a.rep.beta.total_cmp(&b.rep.beta)));
    Ok(CriticalSet { curve: c_prime, intersections, points })
}

/// Traces `K` and computes `R(K | c′)` for `c′ = prog(c₀)`.
pub fn perturbed_critical_set(k: &KnotPresentation, prog: &ShearProgram, cfg: &TraceConfig) -> Result<CriticalSet, ShearError> {
    let trace = charvar::trace(k, cfg)?;
    perturbed_critical_set_in(k, &trace, prog, cfg)
}

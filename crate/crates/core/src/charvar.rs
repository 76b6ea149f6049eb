//! Numerical tracing of `R(K)` and its image in the pillowcase.
//!
//! At a fixed meridian angle `α` the gauge is pinned by `ρ(μ) = diag(e^{iα})`;
//! the relators are solved by multistart damped Newton and the remaining
//! `U(1)` is fixed by rotating a designated generator's axis into the
//! half-plane `{z = 0, y ≥ 0}`. Branches are assembled by continuation in
//! assignment space, so distinct branches whose images cross or overlap in
//! the pillowcase stay separate.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::knot_groups::{frobenius_deviation, KnotError, KnotPresentation};
use crate::pillowcase::{abelian_locus, canonicalize, cylinder_distance, PillowCurve};
use crate::solver::{self, quat_residual, LmOptions};
use crate::su2::{angle, commutator_norm, conjugate_to_diagonal, signed_angle_in_frame, Su2Elem};

/// Commutator norm above which a representation counts as irreducible.
pub const IRREDUCIBLE_TOL: f64 = 1e-6;
/// Label of the reducible curve in traced images.
pub const ABELIAN_LABEL: &str = "abelian";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CharvarError {
    #[error("no restart converged at α = {alpha} (best residual {best_residual:.3e})")]
    NoConvergence { alpha: f64, best_residual: f64 },
    #[error("no irreducible curves in the input")]
    EmptyInput,
    #[error("invalid trace configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Knot(#[from] KnotError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TraceConfig {
    /// α-grid spacing.
    pub step: f64,
    /// The grid covers the open interval `(alpha_min, alpha_max)`.
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    pub restarts: usize,
    pub rng_seed: u64,
    /// Assignments closer than this (max generator distance) are the same.
    pub dedup_radius: f64,
    /// Largest allowed vertex spacing in output curves.
    pub max_curve_step: f64,
    /// α-resolution of branch endpoints.
    pub endpoint_tol: f64,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            step: 0.005,
            alpha_min: 0.0,
            alpha_max: PI,
            newton_tol: 1e-10,
            max_newton_iters: 100,
            restarts: 64,
            rng_seed: 0,
            dedup_radius: 1e-5,
            max_curve_step: 0.05,
            endpoint_tol: 1e-9,
        }
    }
}

impl TraceConfig {
    // negated comparisons also reject NaN
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), CharvarError> {
        let bad = |s: &str| Err(CharvarError::BadConfig(s.into()));
        if !(self.step > 0.0 && self.step.is_finite()) {
            return bad("step must be positive");
        }
        if !(self.newton_tol > 0.0 && self.dedup_radius > 0.0 && self.endpoint_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.max_curve_step > 0.0) {
            return bad("max_curve_step must be positive");
        }
        if !(0.0 <= self.alpha_min && self.alpha_min < self.alpha_max && self.alpha_max <= PI) {
            return bad("need 0 ≤ alpha_min < alpha_max ≤ π");
        }
        if self.restarts == 0 || self.max_newton_iters == 0 {
            return bad("restarts and max_newton_iters must be positive");
        }
        Ok(())
    }

    /// Interior grid points `alpha_min + k·step`.
    pub fn grid(&self) -> Vec<f64> {
        let n = ((self.alpha_max - self.alpha_min) / self.step).ceil() as usize;
        (1..n)
            .map(|k| self.alpha_min + k as f64 * self.step)
            .filter(|&a| a < self.alpha_max)
            .collect()
    }

    fn lm(&self, max_iters: usize) -> LmOptions {
        LmOptions { tol: self.newton_tol * 1e-3, max_iters }
    }
}

/// One representation, gauge-fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct RepPoint {
    pub assignment: Vec<Su2Elem>,
    /// Max Frobenius relator deviation, re-evaluated from the assignment.
    pub residual: f64,
    pub alpha: f64,
    pub beta: f64,
    pub irreducible: bool,
}

/// Serializable view of a [`RepPoint`] with named generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepRecord {
    pub alpha: f64,
    pub beta: f64,
    pub residual: f64,
    pub irreducible: bool,
    pub assignment: BTreeMap<String, Su2Elem>,
}

impl RepPoint {
    pub fn record(&self, k: &KnotPresentation) -> RepRecord {
        RepRecord {
            alpha: self.alpha,
            beta: self.beta,
            residual: self.residual,
            irreducible: self.irreducible,
            assignment: k.generators.iter().cloned().zip(self.assignment.iter().copied()).collect(),
        }
    }

    /// Max generator-wise distance of two assignments.
    pub fn distance(&self, other: &RepPoint) -> f64 {
        assignment_distance(&self.assignment, &other.assignment)
    }

    fn trace_distance(&self, other: &RepPoint) -> f64 {
        self.assignment
            .iter()
            .zip(&other.assignment)
            .map(|(a, b)| (a.w - b.w).abs())
            .fold(0.0, f64::max)
    }
}

fn assignment_distance(a: &[Su2Elem], b: &[Su2Elem]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.distance(*y)).fold(0.0, f64::max)
}

/// Max pairwise commutator norm of the generator images.
pub fn max_commutator(assignment: &[Su2Elem]) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..assignment.len() {
        for j in (i + 1)..assignment.len() {
            m = m.max(commutator_norm(assignment[i], assignment[j]));
        }
    }
    m
}

/// Reads off `(α, β)`, residual and irreducibility of an assignment.
pub fn rep_point(k: &KnotPresentation, assignment: Vec<Su2Elem>) -> RepPoint {
    let mu = k.meridian_image(&assignment);
    let lam = k.longitude_image(&assignment);
    let a = angle(mu);
    let b = if mu.is_central(1e-9) {
        angle(lam)
    } else {
        let (frame, _) = conjugate_to_diagonal(mu);
        signed_angle_in_frame(lam, frame).unwrap_or_else(|_| angle(lam))
    };
    let p = canonicalize(a, b);
    RepPoint {
        residual: k.relator_residual(&assignment),
        irreducible: max_commutator(&assignment) > IRREDUCIBLE_TOL,
        alpha: p.alpha,
        beta: p.beta,
        assignment,
    }
}

/// Rotates about the `i` axis so the first generator not commuting with
/// `diag` has its axis in `{z = 0, y ≥ 0}`.
pub fn normalize_gauge(assignment: &[Su2Elem]) -> Vec<Su2Elem> {
    let Some(g) = assignment.iter().find(|g| (g.y * g.y + g.z * g.z).sqrt() > 1e-12) else {
        return assignment.to_vec();
    };
    let psi = -g.z.atan2(g.y);
    let r = Su2Elem::diagonal(psi / 2.0);
    assignment.iter().map(|&h| r.conjugate(h)).collect()
}

fn slice_residual(k: &KnotPresentation, alpha: f64) -> impl Fn(&[Su2Elem], &[f64]) -> Vec<f64> + '_ {
    let target = Su2Elem::diagonal(alpha);
    move |q: &[Su2Elem], _: &[f64]| {
        let mut r = Vec::with_capacity(4 * (k.relators.len() + 1));
        for rel in &k.relators {
            r.extend(quat_residual(rel.eval(q), Su2Elem::IDENTITY));
        }
        r.extend(quat_residual(k.meridian.eval(q), target));
        r
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> Su2Elem {
    loop {
        let v: [f64; 4] = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 > 1e-4 && n2 <= 1.0 {
            return Su2Elem::new(v[0], v[1], v[2], v[3]);
        }
    }
}

/// Solves on the slice at `alpha` from `start`; `None` unless the relators
/// and the meridian condition hold to `newton_tol`.
fn newton_at(k: &KnotPresentation, alpha: f64, start: Vec<Su2Elem>, cfg: &TraceConfig, iters: usize) -> Option<RepPoint> {
    let out = solver::solve(slice_residual(k, alpha), start, vec![], cfg.lm(iters));
    let assignment = normalize_gauge(&out.quats);
    let p = rep_point(k, assignment);
    let gauge = frobenius_deviation(k.meridian_image(&p.assignment), Su2Elem::diagonal(alpha));
    (p.residual < cfg.newton_tol && gauge < cfg.newton_tol).then_some(p)
}

fn multistart(k: &KnotPresentation, alpha: f64, cfg: &TraceConfig, stream: u64) -> Result<Vec<RepPoint>, CharvarError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    rng.set_stream(stream);
    let mut found: Vec<RepPoint> = Vec::new();
    let mut best = f64::INFINITY;
    for _ in 0..cfg.restarts {
        let start: Vec<Su2Elem> = (0..k.n_gens()).map(|_| random_unit(&mut rng)).collect();
        let out = solver::solve(slice_residual(k, alpha), start, vec![], cfg.lm(cfg.max_newton_iters));
        best = best.min(out.residual);
        let p = rep_point(k, normalize_gauge(&out.quats));
        let gauge = frobenius_deviation(k.meridian_image(&p.assignment), Su2Elem::diagonal(alpha));
        if p.residual >= cfg.newton_tol || gauge >= cfg.newton_tol {
            continue;
        }
        let dup = found.iter().any(|f| {
            f.irreducible == p.irreducible
                && if p.irreducible {
                    f.distance(&p) < cfg.dedup_radius
                } else {
                    f.trace_distance(&p) < cfg.dedup_radius
                }
        });
        if !dup {
            found.push(p);
        }
    }
    if found.is_empty() {
        return Err(CharvarError::NoConvergence { alpha, best_residual: best });
    }
    found.sort_by(|a, b| {
        a.irreducible
            .cmp(&b.irreducible)
            .then(a.beta.total_cmp(&b.beta))
            .then_with(|| {
                let ta: Vec<f64> = a.assignment.iter().map(|g| g.w).collect();
                let tb: Vec<f64> = b.assignment.iter().map(|g| g.w).collect();
                ta.partial_cmp(&tb).unwrap_or(std::cmp::Ordering::Equal)
            })
    });
    Ok(found)
}

/// All conjugacy classes found at meridian angle `alpha`, one gauge-fixed
/// representative each.
pub fn solve_at_alpha(k: &KnotPresentation, alpha: f64, cfg: &TraceConfig) -> Result<Vec<RepPoint>, CharvarError> {
    cfg.validate()?;
    multistart(k, alpha, cfg, alpha.to_bits())
}

/// Continues `from` to a nearby solution at `alpha` on the same branch.
fn continue_to(k: &KnotPresentation, from: &RepPoint, alpha: f64, cfg: &TraceConfig) -> Option<RepPoint> {
    let p = newton_at(k, alpha, from.assignment.clone(), cfg, 50)?;
    (p.irreducible && p.distance(from) < 0.5 && p.trace_distance(from) < 0.1).then_some(p)
}

/// Walks from `from` toward `target` with step halving. Returns the points
/// visited and whether `target` was reached; when it was not, the last
/// point is the branch end to within `endpoint_tol`.
fn walk(k: &KnotPresentation, from: &RepPoint, target: f64, cfg: &TraceConfig) -> (Vec<RepPoint>, bool) {
    let mut out = Vec::new();
    let mut cur = from.clone();
    // nominal α of `cur`; the recomputed `cur.alpha` carries rounding noise
    let mut pos = from.alpha;
    let mut h = target - pos;
    while pos != target {
        if h.abs() < cfg.endpoint_tol {
            return (out, false);
        }
        let a = if (target - pos).abs() <= h.abs() { target } else { pos + h };
        match continue_to(k, &cur, a, cfg) {
            Some(p) => {
                out.push(p.clone());
                cur = p;
                pos = a;
            }
            None => h *= 0.5,
        }
    }
    (out, true)
}

/// A traced image: irreducible branches plus the reducible locus.
#[derive(Debug, Clone)]
pub struct Trace {
    pub label: String,
    /// Irreducible branches followed by the abelian curve.
    pub curves: Vec<PillowCurve>,
    /// Representations along each irreducible branch, aligned with `curves`.
    pub branches: Vec<Vec<RepPoint>>,
    /// Reducible classes found by the sweep.
    pub reducible: Vec<RepPoint>,
}

impl Trace {
    pub fn irreducible_curves(&self) -> impl Iterator<Item = &PillowCurve> {
        self.curves.iter().filter(|c| c.label != ABELIAN_LABEL)
    }

    pub fn records(&self, k: &KnotPresentation) -> Vec<RepRecord> {
        self.branches.iter().flatten().chain(&self.reducible).map(|p| p.record(k)).collect()
    }
}

fn grow(
    k: &KnotPresentation,
    grid: &[f64],
    start_idx: usize,
    start: &RepPoint,
    forward: bool,
    cfg: &TraceConfig,
    claim: &mut dyn FnMut(usize, &RepPoint),
) -> Vec<RepPoint> {
    let mut out = Vec::new();
    let mut cur = start.clone();
    let mut idx = start_idx;
    let edge = if forward { cfg.alpha_max } else { cfg.alpha_min };
    loop {
        let next = if forward { idx + 1 } else { idx.wrapping_sub(1) };
        let target = grid.get(next).copied().unwrap_or(edge);
        let (pts, reached) = walk(k, &cur, target, cfg);
        let Some(last) = pts.last().cloned() else { break };
        out.extend(pts);
        if !reached || next >= grid.len() {
            break;
        }
        claim(next, &last);
        cur = last;
        idx = next;
    }
    out
}

/// Inserts solved midpoints until consecutive points are closer than
/// `max_curve_step` in the cylinder.
fn refine_branch(k: &KnotPresentation, pts: Vec<RepPoint>, cfg: &TraceConfig) -> Vec<RepPoint> {
    let mut out: Vec<RepPoint> = Vec::with_capacity(pts.len());
    for p in pts {
        if let Some(prev) = out.last().cloned() {
            fill_between(k, &prev, &p, cfg, 0, &mut out);
        }
        out.push(p);
    }
    out
}

fn fill_between(k: &KnotPresentation, a: &RepPoint, b: &RepPoint, cfg: &TraceConfig, depth: usize, out: &mut Vec<RepPoint>) {
    if cylinder_distance((a.alpha, a.beta), (b.alpha, b.beta)) <= cfg.max_curve_step || depth > 20 {
        return;
    }
    let mid = 0.5 * (a.alpha + b.alpha);
    // near an endpoint Newton from the end slides onto the reducible; try the other side
    let m = continue_to(k, a, mid, cfg).or_else(|| continue_to(k, b, mid, cfg));
    if let Some(m) = m {
        fill_between(k, a, &m, cfg, depth + 1, out);
        out.push(m.clone());
        fill_between(k, &m, b, cfg, depth + 1, out);
    }
}

/// Traces the image of `R(K)` over the configured α-range.
pub fn trace(k: &KnotPresentation, cfg: &TraceConfig) -> Result<Trace, CharvarError> {
    cfg.validate()?;
    let grid = cfg.grid();
    let sweep: Vec<Vec<RepPoint>> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &a)| multistart(k, a, cfg, i as u64).unwrap_or_default())
        .collect();

    let mut reducible: Vec<RepPoint> = Vec::new();
    let mut seeds: Vec<Vec<(RepPoint, bool)>> = Vec::with_capacity(grid.len());
    for pts in sweep {
        let mut row = Vec::new();
        for p in pts {
            if p.irreducible {
                row.push((p, false));
            } else {
                reducible.push(p);
            }
        }
        seeds.push(row);
    }

    let radius = cfg.dedup_radius;
    let mut branches: Vec<Vec<RepPoint>> = Vec::new();
    for i in 0..grid.len() {
        for j in 0..seeds[i].len() {
            if seeds[i][j].1 {
                continue;
            }
            seeds[i][j].1 = true;
            let start = seeds[i][j].0.clone();
            let mut claim = |idx: usize, p: &RepPoint| {
                for s in seeds[idx].iter_mut() {
                    if s.0.distance(p) < radius.max(1e-6) {
                        s.1 = true;
                    }
                }
            };
            let fwd = grow(k, &grid, i, &start, true, cfg, &mut claim);
            let bwd = grow(k, &grid, i, &start, false, cfg, &mut claim);
            let mut pts: Vec<RepPoint> = bwd.into_iter().rev().collect();
            pts.push(start);
            pts.extend(fwd);
            branches.push(refine_branch(k, pts, cfg));
        }
    }
    branches.sort_by(|a, b| a[0].alpha.total_cmp(&b[0].alpha).then(a[0].beta.total_cmp(&b[0].beta)));

    let mut curves: Vec<PillowCurve> = branches
        .iter()
        .enumerate()
        .map(|(n, b)| {
            let pts: Vec<(f64, f64)> = b.iter().map(|p| (p.alpha, p.beta)).collect();
            PillowCurve::from_cover_points(format!("irreducible-{n}"), &pts, false)
        })
        .collect();
    let mut ab = abelian_locus();
    ab.label = ABELIAN_LABEL.into();
    curves.push(ab);
    Ok(Trace { label: k.label.clone(), curves, branches, reducible })
}

/// Curves of the traced image: irreducible branches, then the abelian locus.
pub fn trace_image(k: &KnotPresentation, cfg: &TraceConfig) -> Result<Vec<PillowCurve>, CharvarError> {
    Ok(trace(k, cfg)?.curves)
}

/// One branch of the closed-form image of a torus knot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormBranch {
    /// Rotation angles of `ρ(x)` and `ρ(y)`.
    pub theta_x: f64,
    pub theta_y: f64,
    /// Angle of the central element `ρ(xᵖ)`: 0 or π.
    pub c: f64,
    pub pq: i64,
    pub alpha_range: (f64, f64),
}

impl ClosedFormBranch {
    pub fn beta(&self, alpha: f64) -> f64 {
        self.c - self.pq as f64 * alpha
    }

    /// The branch as a curve over its closed α-range.
    pub fn curve(&self, label: &str) -> PillowCurve {
        let (lo, hi) = self.alpha_range;
        let slope = (1.0 + (self.pq * self.pq) as f64).sqrt();
        let n = (((hi - lo) * slope) / 0.01).ceil().max(2.0) as usize;
        let pts: Vec<(f64, f64)> = (0..=n)
            .map(|i| {
                let a = lo + (hi - lo) * i as f64 / n as f64;
                (a, self.beta(a))
            })
            .collect();
        PillowCurve::from_cover_points(label, &pts, false)
    }
}

fn fold_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r > PI {
        TAU - r
    } else {
        r
    }
}

/// Closed-form irreducible branches of `T(p, q)`: `ρ(xᵖ) = ρ(y^q) = ±1`
/// central, `β ≡ c − pq·α`, and α sweeps the angles of `ρ(x^u)ρ(y^v)` as
/// the two axes separate.
pub fn torus_knot_closed_form(p: i64, q: i64) -> Result<Vec<ClosedFormBranch>, KnotError> {
    let k = crate::knot_groups::torus_knot(p, q)?;
    let e = k.meridian.exponent_sums(2);
    let (u, v) = (e[0], e[1]);
    let mut out = Vec::new();
    for kx in 1..p.abs() {
        for ky in 1..q.abs() {
            if (kx + ky) % 2 != 0 {
                continue;
            }
            let theta_x = kx as f64 * PI / p.abs() as f64;
            let theta_y = ky as f64 * PI / q.abs() as f64;
            // e^{ipθx} = (−1)^kx
            let c = if kx % 2 == 0 { 0.0 } else { PI };
            let a = fold_angle(u as f64 * theta_x);
            let b = fold_angle(v as f64 * theta_y);
            let lo = (a - b).abs();
            let hi = (a + b).min(TAU - a - b);
            out.push(ClosedFormBranch { theta_x, theta_y, c, pq: p * q, alpha_range: (lo, hi) });
        }
    }
    Ok(out)
}

/// `min(α, π − α)` over all points of non-abelian curves.
pub fn min_distance_to_cut_lines(curves: &[PillowCurve]) -> Result<f64, CharvarError> {
    let mut m = f64::INFINITY;
    for c in curves.iter().filter(|c| c.label != ABELIAN_LABEL) {
        for p in &c.points {
            m = m.min(p.alpha.min(PI - p.alpha));
        }
    }
    if m.is_finite() {
        Ok(m)
    } else {
        Err(CharvarError::EmptyInput)
    }
}

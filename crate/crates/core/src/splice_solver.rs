//! Irreducible representations of a splice of two knot exteriors.
//!
//! The gluing sends `μ₁ ↦ λ₂` and `λ₁ ↦ μ₂`, so a pair of representations
//! glues when the left image point `(α, β)` equals the right image point
//! read with its coordinates exchanged. Candidates come from intersecting
//! the left image with the transposed right image; each one is then
//! refined by Newton on the joint system.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::charvar::{self, max_commutator, normalize_gauge, CharvarError, RepPoint, Trace, TraceConfig};
use crate::knot_groups::{frobenius_deviation, KnotPresentation, SpliceProblem};
use crate::pillowcase::{
    canonicalize, intersect_curves, pillow_distance, PillowCurve, PillowError, PillowPoint, DEFAULT_INTERSECTION_TOL,
};
use crate::solver::{self, quat_residual, LmOptions};
use crate::su2::Su2Elem;

/// Witness acceptance threshold on relator and gluing deviations.
pub const SPLICE_RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpliceError {
    #[error("no intersections away from the abelian loci")]
    NoIntersections,
    #[error("refinement at ({alpha:.6}, {beta:.6}) stopped with residual {residual:.3e}")]
    LiftFailed { alpha: f64, beta: f64, residual: f64 },
    #[error(transparent)]
    Charvar(#[from] CharvarError),
    #[error(transparent)]
    Pillow(#[from] PillowError),
}

/// A representation of the spliced group.
#[derive(Debug, Clone, PartialEq)]
pub struct SpliceRep {
    /// `α` is the angle of `μ₁ = λ₂`, `β` that of `λ₁ = μ₂`.
    pub point: PillowPoint,
    pub left: RepPoint,
    /// In the right exterior's own gauge, `ρ₂(μ₂)` diagonal.
    pub right: RepPoint,
    /// `g` with `ρ₁(μ₁) = g ρ₂(λ₂) g⁻¹` and `ρ₁(λ₁) = g ρ₂(μ₂) g⁻¹`.
    pub aligner: Su2Elem,
    pub residual: f64,
    pub irreducible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpliceRecord {
    pub point: PillowPoint,
    pub residual: f64,
    pub left_assignment: BTreeMap<String, Su2Elem>,
    pub right_assignment: BTreeMap<String, Su2Elem>,
    pub aligner: Su2Elem,
}

impl SpliceRep {
    pub fn record(&self, p: &SpliceProblem) -> SpliceRecord {
        SpliceRecord {
            point: self.point,
            residual: self.residual,
            left_assignment: self.left.record(&p.left).assignment,
            right_assignment: self.right.record(&p.right).assignment,
            aligner: self.aligner,
        }
    }
}

/// Max deviation over both relator sets and both gluing equations,
/// computed from the assignments alone.
pub fn splice_residual(p: &SpliceProblem, left: &[Su2Elem], right: &[Su2Elem], g: Su2Elem) -> f64 {
    let mu1 = p.left.meridian_image(left);
    let la1 = p.left.longitude_image(left);
    let mu2 = g.conjugate(p.right.meridian_image(right));
    let la2 = g.conjugate(p.right.longitude_image(right));
    p.left
        .relator_residual(left)
        .max(p.right.relator_residual(right))
        .max(frobenius_deviation(mu1, la2))
        .max(frobenius_deviation(la1, mu2))
}

/// Pointwise `(α, β) ↦ (β, α)` on the torus cover, then folded.
pub fn transpose_image(c: &PillowCurve) -> PillowCurve {
    let pts: Vec<(f64, f64)> = c.lifted_points().into_iter().map(|(a, b)| (b, a)).collect();
    PillowCurve::from_cover_points(c.label.clone(), &pts, c.closed)
}

/// Images and candidate points of a splice problem.
#[derive(Debug, Clone)]
pub struct SpliceSearch {
    pub left: Trace,
    pub right: Trace,
    /// Transposed irreducible curves of the right side.
    pub right_transposed: Vec<PillowCurve>,
    /// Intersections surviving the abelian filter.
    pub candidates: Vec<PillowPoint>,
}

/// Candidate points near `α ∈ {0, π}` are dropped: the right side's abelian
/// locus transposes onto `α = 0`, and the transposed polyline only jumps
/// across the fold within one curve step of those lines.
fn on_abelian_loci(p: PillowPoint, margin: f64) -> bool {
    let beta_zero = p.beta.min(TAU - p.beta) < margin;
    beta_zero || p.alpha < margin || p.alpha > PI - margin
}

pub fn search(p: &SpliceProblem, cfg: &TraceConfig) -> Result<SpliceSearch, SpliceError> {
    let left = charvar::trace(&p.left, cfg)?;
    let right = charvar::trace(&p.right, cfg)?;
    let right_transposed: Vec<PillowCurve> = right.irreducible_curves().map(transpose_image).collect();
    let margin = cfg.max_curve_step.max(cfg.dedup_radius);
    let mut candidates: Vec<PillowPoint> = Vec::new();
    for l in left.irreducible_curves() {
        for r in &right_transposed {
            for hit in intersect_curves(l, r, DEFAULT_INTERSECTION_TOL)? {
                if on_abelian_loci(hit.point, margin) {
                    continue;
                }
                candidates.push(hit.point);
            }
        }
    }
    candidates.sort_by(|a, b| a.alpha.total_cmp(&b.alpha).then(a.beta.total_cmp(&b.beta)));
    candidates.dedup_by(|a, b| pillow_distance(*a, *b) < cfg.dedup_radius);
    Ok(SpliceSearch { left, right, right_transposed, candidates })
}

fn nearest(t: &Trace, key: impl Fn(&RepPoint) -> PillowPoint, at: PillowPoint) -> Option<&RepPoint> {
    t.branches
        .iter()
        .flatten()
        .min_by(|a, b| pillow_distance(key(a), at).total_cmp(&pillow_distance(key(b), at)))
}

fn transposed(r: &RepPoint) -> PillowPoint {
    canonicalize(r.beta, r.alpha)
}

/// Refines one candidate to a splice representation.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn lift(p: &SpliceProblem, s: &SpliceSearch, at: PillowPoint, cfg: &TraceConfig) -> Result<SpliceRep, SpliceError> {
    let fail = |residual| SpliceError::LiftFailed { alpha: at.alpha, beta: at.beta, residual };
    let l0 = nearest(&s.left, |r| PillowPoint { alpha: r.alpha, beta: r.beta }, at).ok_or(fail(f64::NAN))?;
    let r0 = nearest(&s.right, transposed, at).ok_or(fail(f64::NAN))?;
    // right points with β > π transpose through the involution, which j realizes
    let g = if r0.beta > PI { Su2Elem::J } else { Su2Elem::IDENTITY };
    let nl = p.left.n_gens();
    let mut quats = l0.assignment.clone();
    quats.extend(r0.assignment.iter().map(|&h| g.conjugate(h)));
    let residual = |q: &[Su2Elem], sc: &[f64]| {
        let (ql, qr) = q.split_at(nl);
        let (da, db) = (Su2Elem::diagonal(sc[0]), Su2Elem::diagonal(sc[1]));
        let mut r = Vec::new();
        for rel in &p.left.relators {
            r.extend(quat_residual(rel.eval(ql), Su2Elem::IDENTITY));
        }
        for rel in &p.right.relators {
            r.extend(quat_residual(rel.eval(qr), Su2Elem::IDENTITY));
        }
        r.extend(quat_residual(p.left.meridian.eval(ql), da));
        r.extend(quat_residual(p.left.longitude.eval(ql), db));
        r.extend(quat_residual(p.right.meridian.eval(qr), db));
        r.extend(quat_residual(p.right.longitude.eval(qr), da));
        r
    };
    let opts = LmOptions { tol: 1e-13, max_iters: cfg.max_newton_iters };
    let out = solver::solve(residual, quats, vec![at.alpha, at.beta], opts);
    let (ql, qr) = out.quats.split_at(nl);
    // each side keeps a residual rotation about the peripheral axis; slice both
    let left = charvar::rep_point(&p.left, normalize_gauge(ql));
    let ginv = g.inverse();
    let right_own: Vec<Su2Elem> = normalize_gauge(qr).into_iter().map(|h| ginv.conjugate(h)).collect();
    let right = charvar::rep_point(&p.right, right_own);
    let res = splice_residual(p, &left.assignment, &right.assignment, g);
    if !(res < SPLICE_RESIDUAL_TOL) {
        return Err(fail(res));
    }
    let mut all = left.assignment.clone();
    all.extend(right.assignment.iter().map(|&h| g.conjugate(h)));
    let point = canonicalize(out.scalars[0], out.scalars[1]);
    Ok(SpliceRep { point, irreducible: max_commutator(&all) > charvar::IRREDUCIBLE_TOL, left, right, aligner: g, residual: res })
}

/// Irreducible representations of the splice, one per intersection point
/// of the images, sorted by `α` then `β`.
pub fn find_splice_reps(p: &SpliceProblem, cfg: &TraceConfig) -> Result<Vec<SpliceRep>, SpliceError> {
    let s = search(p, cfg)?;
    reps_from_search(p, &s, cfg)
}

pub fn reps_from_search(p: &SpliceProblem, s: &SpliceSearch, cfg: &TraceConfig) -> Result<Vec<SpliceRep>, SpliceError> {
    if s.candidates.is_empty() {
        return Err(SpliceError::NoIntersections);
    }
    let mut reps = s.candidates.par_iter().map(|&c| lift(p, s, c, cfg)).collect::<Result<Vec<_>, _>>()?;
    reps.sort_by(|a, b| a.point.alpha.total_cmp(&b.point.alpha).then(a.point.beta.total_cmp(&b.point.beta)));
    Ok(reps)
}

fn is_trefoil(k: &KnotPresentation) -> bool {
    let t = crate::knot_groups::trefoil();
    k.relators == t.relators && k.meridian == t.meridian && k.longitude == t.longitude
}

/// Literature remark attached to trefoil–trefoil reports; empty otherwise.
pub fn casson_note(p: &SpliceProblem) -> String {
    if is_trefoil(&p.left) && is_trefoil(&p.right) {
        "Both pieces are right-handed trefoil exteriors. This homology sphere is known to have \
         Casson invariant zero, so the signed count of its irreducible representations vanishes \
         even though the set listed here is non-empty. No Casson computation is performed."
            .to_string()
    } else {
        String::new()
    }
}

//! The pillowcase `R(T²)` and the cut-open cylinder `C = [0,π] × ℝ/2πℤ`.
//!
//! A point is a pair `(α, β)` of meridian and longitude angles, taken
//! modulo `2π` in each coordinate and modulo the involution
//! `(α, β) ~ (2π − α, 2π − β)`. The canonical domain is `α ∈ [0, π]`,
//! `β ∈ [0, 2π)`; on the two edges `α ∈ {0, π}` the involution acts by
//! `β ↦ 2π − β` and we pick the representative with `β ∈ [0, π]`.
//!
//! Curves keep, next to their canonical points, an integer lift per vertex
//! so that `β + 2π·lift` varies continuously along the curve. Winding and
//! intersection computations happen on those lifts and are folded back
//! afterwards.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default maximal distance between consecutive vertices of a curve.
pub const DEFAULT_MAX_STEP: f64 = 0.05;
/// Default tolerance for segment intersection tests.
pub const DEFAULT_INTERSECTION_TOL: f64 = 1e-6;
/// Intersections closer than this are merged into one.
pub const MERGE_RADIUS: f64 = 1e-4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PillowError {
    #[error("segments {0:?} overlap along a stretch of length {1:.3e}")]
    DegenerateOverlap((usize, usize), f64),
    #[error("curve is not closed")]
    NotClosed,
    #[error("curve touches the cut line α = {alpha} at vertex {index}")]
    CrossesCutLine { index: usize, alpha: f64 },
    #[error("path is not embedded: {0}")]
    NotEmbedded(String),
    #[error("path passes through the forbidden corner ({alpha}, {beta})")]
    HitsForbiddenCorner { alpha: f64, beta: f64 },
    #[error("path does not run from P = (0, π) to Q = (π, π): {0}")]
    BadEndpoints(String),
    #[error("malformed curve: {0}")]
    Malformed(String),
}

/// Reduces `x` into `[0, 2π)`.
fn mod_tau(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Reduces `x` into `(-π, π]`.
pub fn wrap_pi(x: f64) -> f64 {
    let r = mod_tau(x);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// A canonical pillowcase point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct PillowPoint {
    pub alpha: f64,
    pub beta: f64,
}

impl From<[f64; 2]> for PillowPoint {
    fn from(c: [f64; 2]) -> Self {
        canonicalize(c[0], c[1])
    }
}

impl From<PillowPoint> for [f64; 2] {
    fn from(p: PillowPoint) -> Self {
        [p.alpha, p.beta]
    }
}

impl PillowPoint {
    pub const P: PillowPoint = PillowPoint { alpha: 0.0, beta: PI };
    pub const Q: PillowPoint = PillowPoint { alpha: PI, beta: PI };

    pub const CORNERS: [PillowPoint; 4] = [
        PillowPoint { alpha: 0.0, beta: 0.0 },
        PillowPoint { alpha: 0.0, beta: PI },
        PillowPoint { alpha: PI, beta: 0.0 },
        PillowPoint { alpha: PI, beta: PI },
    ];

    /// True for the four orbifold points.
    pub fn is_corner(&self) -> bool {
        Self::CORNERS.iter().any(|c| c == self)
    }

    pub fn is_near_corner(&self, tol: f64) -> bool {
        Self::CORNERS.iter().any(|c| pillow_distance(*self, *c) <= tol)
    }
}

/// A point of the cut-open cylinder: no identification on `α ∈ {0, π}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderPoint {
    pub alpha: f64,
    pub beta: f64,
}

impl CylinderPoint {
    pub fn new(alpha: f64, beta: f64) -> Self {
        CylinderPoint { alpha: alpha.clamp(0.0, PI), beta: mod_tau(beta) }
    }
}

/// Reduces any `(a, b) ∈ ℝ²` to the canonical fundamental domain.
pub fn canonicalize(a: f64, b: f64) -> PillowPoint {
    let mut alpha = mod_tau(a);
    let mut beta = mod_tau(b);
    if alpha > PI {
        alpha = TAU - alpha;
        beta = mod_tau(TAU - beta);
    }
    if (alpha == 0.0 || alpha == PI) && beta > PI {
        beta = TAU - beta;
    }
    PillowPoint { alpha, beta }
}

/// Like [`canonicalize`], but also reports whether the involution was used
/// (in which case the lifted β runs backwards).
fn canonicalize_with_flip(a: f64, b: f64) -> (PillowPoint, bool) {
    let alpha = mod_tau(a);
    (canonicalize(a, b), alpha > PI)
}

/// Euclidean distance in the cylinder, β taken modulo 2π.
pub fn cylinder_distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    let da = a.0 - b.0;
    let db = wrap_pi(a.1 - b.1);
    (da * da + db * db).sqrt()
}

/// Quotient distance in the pillowcase.
pub fn pillow_distance(p: PillowPoint, q: PillowPoint) -> f64 {
    let direct = cylinder_distance((p.alpha, p.beta), (q.alpha, q.beta));
    let across0 = cylinder_distance((p.alpha, p.beta), (-q.alpha, -q.beta));
    let across_pi = cylinder_distance((p.alpha, p.beta), (TAU - q.alpha, -q.beta));
    direct.min(across0).min(across_pi)
}

/// A sampled polyline in the pillowcase with cylinder lifts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PillowCurve {
    pub label: String,
    pub closed: bool,
    pub points: Vec<PillowPoint>,
    pub lifts: Vec<i64>,
}

impl PillowCurve {
    /// Builds a curve from points of the torus cover `ℝ²`, folding each
    /// point and choosing lifts so that the lifted β is continuous.
    pub fn from_cover_points(label: impl Into<String>, pts: &[(f64, f64)], closed: bool) -> Self {
        let mut points = Vec::with_capacity(pts.len());
        let mut lifts = Vec::with_capacity(pts.len());
        let mut prev: Option<f64> = None;
        for &(a, b) in pts {
            let (p, flipped) = canonicalize_with_flip(a, b);
            let lift = match prev {
                Some(pb) => ((pb - p.beta) / TAU).round() as i64,
                None if flipped => 0,
                None => ((b - p.beta) / TAU).round() as i64,
            };
            prev = Some(p.beta + TAU * lift as f64);
            points.push(p);
            lifts.push(lift);
        }
        PillowCurve { label: label.into(), closed, points, lifts }
    }

    /// Builds a curve from already lifted cylinder coordinates
    /// `(α, β_lift)` with `α ∈ [0, π]`.
    pub fn from_lifted(label: impl Into<String>, pts: &[(f64, f64)], closed: bool) -> Self {
        let mut points = Vec::with_capacity(pts.len());
        let mut lifts = Vec::with_capacity(pts.len());
        for &(a, b) in pts {
            let alpha = a.clamp(0.0, PI);
            let beta = mod_tau(b);
            lifts.push(((b - beta) / TAU).round() as i64);
            points.push(PillowPoint { alpha, beta });
        }
        PillowCurve { label: label.into(), closed, points, lifts }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Lifted cylinder coordinates of vertex `i`.
    pub fn lifted(&self, i: usize) -> (f64, f64) {
        let p = self.points[i];
        (p.alpha, p.beta + TAU * self.lifts[i] as f64)
    }

    pub fn lifted_points(&self) -> Vec<(f64, f64)> {
        (0..self.len()).map(|i| self.lifted(i)).collect()
    }

    /// Largest cylinder distance between consecutive vertices.
    pub fn max_step(&self) -> f64 {
        self.lifted_points()
            .windows(2)
            .map(|w| cylinder_distance(w[0], w[1]))
            .fold(0.0, f64::max)
    }

    pub fn reversed(&self) -> PillowCurve {
        let mut c = self.clone();
        c.points.reverse();
        c.lifts.reverse();
        c
    }

    /// Inserts midpoints (on the lift) until every segment is shorter than
    /// `max_step`.
    pub fn refined(&self, max_step: f64) -> PillowCurve {
        let lp = self.lifted_points();
        let mut out = Vec::with_capacity(lp.len());
        for (i, &p) in lp.iter().enumerate() {
            if i > 0 {
                let q = lp[i - 1];
                let d = ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt();
                let n = (d / max_step).ceil().max(1.0) as usize;
                for k in 1..n {
                    let t = k as f64 / n as f64;
                    out.push((q.0 + t * (p.0 - q.0), q.1 + t * (p.1 - q.1)));
                }
            }
            out.push(p);
        }
        PillowCurve::from_lifted(self.label.clone(), &out, self.closed)
    }

    /// Checks structural invariants of a deserialized curve.
    pub fn validate(&self) -> Result<(), PillowError> {
        if self.points.len() != self.lifts.len() {
            return Err(PillowError::Malformed(format!(
                "{} points but {} lifts",
                self.points.len(),
                self.lifts.len()
            )));
        }
        if self.points.iter().any(|p| !p.alpha.is_finite() || !p.beta.is_finite()) {
            return Err(PillowError::Malformed("non-finite coordinate".into()));
        }
        Ok(())
    }
}

/// The image of the abelian representations, `{β = 0}`.
pub fn abelian_locus() -> PillowCurve {
    let n = (PI / DEFAULT_MAX_STEP).ceil() as usize;
    let pts: Vec<(f64, f64)> = (0..=n).map(|i| (PI * i as f64 / n as f64, 0.0)).collect();
    PillowCurve::from_lifted("abelian", &pts, false)
}

/// One transverse (or touching) crossing of two curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Intersection {
    pub point: PillowPoint,
    /// Segment indices in the first and second curve.
    pub segments: (usize, usize),
}

type Seg = ((f64, f64), (f64, f64));

enum SegHit {
    None,
    Point(f64, f64),
    Overlap(f64),
}

fn cross(a: (f64, f64), b: (f64, f64)) -> f64 {
    a.0 * b.1 - a.1 * b.0
}

fn segment_hit(s: Seg, t: Seg, tol: f64) -> SegHit {
    let (p, p2) = s;
    let (q, q2) = t;
    let r = (p2.0 - p.0, p2.1 - p.1);
    let d = (q2.0 - q.0, q2.1 - q.1);
    let rl = (r.0 * r.0 + r.1 * r.1).sqrt();
    let dl = (d.0 * d.0 + d.1 * d.1).sqrt();
    if rl == 0.0 || dl == 0.0 {
        return SegHit::None;
    }
    let qp = (q.0 - p.0, q.1 - p.1);
    let denom = cross(r, d);
    if denom.abs() <= tol * rl * dl {
        // parallel: check collinearity by distance of q from the line of s
        if cross(qp, r).abs() / rl > tol {
            return SegHit::None;
        }
        let t0 = (qp.0 * r.0 + qp.1 * r.1) / (rl * rl);
        let t1 = t0 + (d.0 * r.0 + d.1 * r.1) / (rl * rl);
        let (lo, hi) = (t0.min(t1).max(0.0), t0.max(t1).min(1.0));
        if hi < lo - tol / rl {
            return SegHit::None;
        }
        let len = (hi - lo).max(0.0) * rl;
        if len > tol {
            return SegHit::Overlap(len);
        }
        let tm = 0.5 * (lo + hi);
        return SegHit::Point(p.0 + tm * r.0, p.1 + tm * r.1);
    }
    let t = cross(qp, d) / denom;
    let u = cross(qp, r) / denom;
    let (et, eu) = (tol / rl, tol / dl);
    if t < -et || t > 1.0 + et || u < -eu || u > 1.0 + eu {
        return SegHit::None;
    }
    let t = t.clamp(0.0, 1.0);
    SegHit::Point(p.0 + t * r.0, p.1 + t * r.1)
}

/// Copies of segment `t` in the cover that may meet `s`: 2π translates in
/// β, plus the involution images that touch the edges `α ∈ {0, π}`.
fn cover_copies(s: Seg, t: Seg) -> Vec<Seg> {
    let mut out = Vec::new();
    let s_lo = s.0 .1.min(s.1 .1);
    let s_hi = s.0 .1.max(s.1 .1);
    let images: [Seg; 3] = [
        t,
        ((-t.0 .0, -t.0 .1), (-t.1 .0, -t.1 .1)),
        ((TAU - t.0 .0, -t.0 .1), (TAU - t.1 .0, -t.1 .1)),
    ];
    for (idx, img) in images.iter().enumerate() {
        // reflected copies only matter if they reach the band α ∈ [0, π]
        if idx > 0 {
            let amin = img.0 .0.min(img.1 .0);
            let amax = img.0 .0.max(img.1 .0);
            let smin = s.0 .0.min(s.1 .0);
            let smax = s.0 .0.max(s.1 .0);
            if amax < smin - 1e-9 || amin > smax + 1e-9 {
                continue;
            }
        }
        let t_lo = img.0 .1.min(img.1 .1);
        let t_hi = img.0 .1.max(img.1 .1);
        let k_lo = ((s_lo - t_hi) / TAU).floor() as i64;
        let k_hi = ((s_hi - t_lo) / TAU).ceil() as i64;
        for k in k_lo..=k_hi {
            let sh = TAU * k as f64;
            out.push(((img.0 .0, img.0 .1 + sh), (img.1 .0, img.1 .1 + sh)));
        }
    }
    out
}

fn bbox_disjoint(s: Seg, t: Seg, tol: f64) -> bool {
    s.0 .0.max(s.1 .0) < t.0 .0.min(t.1 .0) - tol || t.0 .0.max(t.1 .0) < s.0 .0.min(s.1 .0) - tol
}

/// All intersections of two canonical curves, with the fold taken into
/// account. Touching endpoints count once; points closer than
/// [`MERGE_RADIUS`] are merged. Output is sorted by α, then β.
pub fn intersect_curves(
    c1: &PillowCurve,
    c2: &PillowCurve,
    tol: f64,
) -> Result<Vec<Intersection>, PillowError> {
    let l1 = c1.lifted_points();
    let l2 = c2.lifted_points();
    let mut hits: Vec<Intersection> = Vec::new();
    for i in 0..l1.len().saturating_sub(1) {
        let s = (l1[i], l1[i + 1]);
        for j in 0..l2.len().saturating_sub(1) {
            let t0 = (l2[j], l2[j + 1]);
            for t in cover_copies(s, t0) {
                if bbox_disjoint(s, t, tol) {
                    continue;
                }
                match segment_hit(s, t, tol) {
                    SegHit::None => {}
                    SegHit::Overlap(len) => return Err(PillowError::DegenerateOverlap((i, j), len)),
                    SegHit::Point(a, b) => hits.push(Intersection {
                        point: canonicalize(a, b),
                        segments: (i, j),
                    }),
                }
            }
        }
    }
    Ok(merge_intersections(hits))
}

fn merge_intersections(mut hits: Vec<Intersection>) -> Vec<Intersection> {
    hits.sort_by(|a, b| {
        a.point
            .alpha
            .total_cmp(&b.point.alpha)
            .then(a.point.beta.total_cmp(&b.point.beta))
    });
    let mut out: Vec<Intersection> = Vec::new();
    for h in hits {
        if out.iter().any(|o| pillow_distance(o.point, h.point) < MERGE_RADIUS) {
            continue;
        }
        out.push(h);
    }
    out
}

/// The class of a closed curve in `H₁(C; ℤ) ≅ ℤ`, counting increasing β as
/// `+1`.
pub fn homology_class_in_cylinder(c: &PillowCurve) -> Result<i64, PillowError> {
    if !c.closed || c.len() < 2 {
        return Err(PillowError::NotClosed);
    }
    let first = c.points[0];
    let last = c.points[c.len() - 1];
    if cylinder_distance((first.alpha, first.beta), (last.alpha, last.beta)) > 1e-9 {
        return Err(PillowError::NotClosed);
    }
    for (index, p) in c.points.iter().enumerate() {
        if p.alpha <= 1e-12 || p.alpha >= PI - 1e-12 {
            return Err(PillowError::CrossesCutLine { index, alpha: p.alpha });
        }
    }
    let (_, b0) = c.lifted(0);
    let (_, b1) = c.lifted(c.len() - 1);
    Ok(((b1 - b0) / TAU).round() as i64)
}

/// How to build a path from `P = (0, π)` to `Q = (π, π)`.
pub enum PathSpec {
    /// The straight line `c₀ = {β = π}`.
    Straight,
    /// Graph `α ↦ β(α)` over `[0, π]`.
    Graph(Box<dyn Fn(f64) -> f64 + Send + Sync>),
    /// Polyline through the given cover points.
    Polyline(Vec<(f64, f64)>),
}

impl std::fmt::Debug for PathSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PathSpec::Straight => write!(f, "Straight"),
            PathSpec::Graph(_) => write!(f, "Graph(..)"),
            PathSpec::Polyline(p) => write!(f, "Polyline({} points)", p.len()),
        }
    }
}

/// Straight line `c₀ = {β = π}` sampled at the default step.
pub fn straight_path() -> PillowCurve {
    let n = (PI / DEFAULT_MAX_STEP).ceil() as usize;
    let pts: Vec<(f64, f64)> = (0..=n).map(|i| (PI * i as f64 / n as f64, PI)).collect();
    PillowCurve::from_lifted("c0", &pts, false)
}

fn sample_graph(g: &dyn Fn(f64) -> f64) -> Result<Vec<(f64, f64)>, PillowError> {
    let n0 = 64usize;
    let mut pts: Vec<(f64, f64)> = Vec::new();
    let eval = |a: f64| (a, g(a));
    for i in 0..n0 {
        let a0 = PI * i as f64 / n0 as f64;
        let a1 = PI * (i + 1) as f64 / n0 as f64;
        let mut stack = vec![(eval(a0), eval(a1))];
        let mut seg_pts = vec![];
        while let Some((p, q)) = stack.pop() {
            let d = ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt();
            if d <= DEFAULT_MAX_STEP {
                seg_pts.push(p);
                continue;
            }
            if (q.0 - p.0) < 1e-9 {
                return Err(PillowError::NotEmbedded(format!(
                    "graph is discontinuous near α = {:.6}",
                    p.0
                )));
            }
            let m = eval(0.5 * (p.0 + q.0));
            // push right half first so the left half is processed first
            stack.push((m, q));
            stack.push((p, m));
        }
        pts.extend(seg_pts);
    }
    pts.push(eval(PI));
    Ok(pts)
}

fn check_embedded(c: &PillowCurve) -> Result<(), PillowError> {
    let lp = c.lifted_points();
    let n = lp.len();
    for i in 0..n.saturating_sub(1) {
        let s = (lp[i], lp[i + 1]);
        for j in (i + 2)..n.saturating_sub(1) {
            let t0 = (lp[j], lp[j + 1]);
            for t in cover_copies(s, t0) {
                if bbox_disjoint(s, t, 1e-12) {
                    continue;
                }
                match segment_hit(s, t, 1e-12) {
                    SegHit::None => {}
                    _ => {
                        return Err(PillowError::NotEmbedded(format!(
                            "segments {i} and {j} intersect"
                        )))
                    }
                }
            }
        }
    }
    Ok(())
}

/// Builds and validates an embedded path from `P` to `Q` avoiding the
/// corners `(0, 0)` and `(π, 0)`.
#[allow(non_snake_case)]
pub fn path_P_to_Q(spec: &PathSpec) -> Result<PillowCurve, PillowError> {
    let curve = match spec {
        PathSpec::Straight => straight_path(),
        PathSpec::Graph(g) => {
            let pts = sample_graph(g.as_ref())?;
            PillowCurve::from_cover_points("path", &pts, false)
        }
        PathSpec::Polyline(pts) => {
            if pts.len() < 2 {
                return Err(PillowError::BadEndpoints("fewer than two points".into()));
            }
            PillowCurve::from_cover_points("path", pts, false).refined(DEFAULT_MAX_STEP)
        }
    };
    let first = curve.points[0];
    let last = curve.points[curve.len() - 1];
    if pillow_distance(first, PillowPoint::P) > 1e-9 {
        return Err(PillowError::BadEndpoints(format!("starts at ({}, {})", first.alpha, first.beta)));
    }
    if pillow_distance(last, PillowPoint::Q) > 1e-9 {
        return Err(PillowError::BadEndpoints(format!("ends at ({}, {})", last.alpha, last.beta)));
    }
    let forbidden = [PillowPoint { alpha: 0.0, beta: 0.0 }, PillowPoint { alpha: PI, beta: 0.0 }];
    let lp = curve.lifted_points();
    for w in lp.windows(2) {
        for f in forbidden {
            if point_segment_distance((f.alpha, f.beta), w[0], w[1]) < 1e-6 {
                return Err(PillowError::HitsForbiddenCorner { alpha: f.alpha, beta: f.beta });
            }
        }
    }
    check_embedded(&curve)?;
    Ok(curve)
}

/// Distance from `p` to the segment `[a, b]` in the cylinder (β mod 2π).
pub fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let mid = 0.5 * (a.1 + b.1);
    let k0 = ((mid - p.1) / TAU).round();
    let mut best = f64::INFINITY;
    for dk in [-1.0, 0.0, 1.0] {
        let pb = p.1 + TAU * (k0 + dk);
        best = best.min(planar_point_segment((p.0, pb), a, b));
    }
    best
}

fn planar_point_segment(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let d = (b.0 - a.0, b.1 - a.1);
    let l2 = d.0 * d.0 + d.1 * d.1;
    let t = if l2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * d.0 + (p.1 - a.1) * d.1) / l2).clamp(0.0, 1.0)
    };
    let q = (a.0 + t * d.0, a.1 + t * d.1);
    ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt()
}

/// Distance from a cylinder point to a curve.
pub fn point_curve_distance(p: (f64, f64), c: &PillowCurve) -> f64 {
    let lp = c.lifted_points();
    if lp.len() == 1 {
        return cylinder_distance(p, lp[0]);
    }
    lp.windows(2)
        .map(|w| point_segment_distance(p, w[0], w[1]))
        .fold(f64::INFINITY, f64::min)
}

/// Symmetric Hausdorff distance of two polylines in the cylinder metric,
/// evaluated on vertices.
pub fn hausdorff_distance(a: &PillowCurve, b: &PillowCurve) -> f64 {
    let directed = |x: &PillowCurve, y: &PillowCurve| {
        x.lifted_points()
            .iter()
            .map(|&p| point_curve_distance(p, y))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

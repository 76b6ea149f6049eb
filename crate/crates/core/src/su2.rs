//! SU(2) as unit quaternions.
//!
//! The element `w + xi + yj + zk` corresponds to the matrix
//! `[[w + ix, y + iz], [-y + iz, w - ix]]`, so the diagonal torus
//! `diag(e^{it}, e^{-it})` is the circle `cos t + sin t · i`. All conjugacy
//! data (trace, rotation angle, diagonalizing frame) is read off in that
//! convention.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Mul, Neg};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Off-diagonal tolerance accepted by [`signed_angle_in_frame`].
pub const FRAME_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Su2Error {
    #[error("element is not diagonal in the given frame (off-diagonal residual {residual:.3e})")]
    NotDiagonalInFrame { residual: f64 },
}

/// A unit quaternion, i.e. an element of SU(2).
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Su2Elem {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl From<[f64; 4]> for Su2Elem {
    fn from(c: [f64; 4]) -> Self {
        Su2Elem::new(c[0], c[1], c[2], c[3])
    }
}

impl From<Su2Elem> for [f64; 4] {
    fn from(q: Su2Elem) -> Self {
        q.to_array()
    }
}

impl fmt::Debug for Su2Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.12}, {:.12}, {:.12}, {:.12})", self.w, self.x, self.y, self.z)
    }
}

impl Su2Elem {
    pub const IDENTITY: Su2Elem = Su2Elem { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };
    pub const I: Su2Elem = Su2Elem { w: 0.0, x: 1.0, y: 0.0, z: 0.0 };
    pub const J: Su2Elem = Su2Elem { w: 0.0, x: 0.0, y: 1.0, z: 0.0 };
    pub const K: Su2Elem = Su2Elem { w: 0.0, x: 0.0, y: 0.0, z: 1.0 };

    /// Builds an element from raw components, renormalizing onto the unit
    /// sphere. A zero vector maps to the identity.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Self::IDENTITY;
        }
        Su2Elem { w: w / n, x: x / n, y: y / n, z: z / n }
    }

    /// `diag(e^{it}, e^{-it})`.
    pub fn diagonal(t: f64) -> Self {
        Su2Elem::new(t.cos(), t.sin(), 0.0, 0.0)
    }

    /// Rotation by `angle` about the (not necessarily normalized) axis
    /// `v`, in the sense `exp(angle · v̂) = cos angle + sin angle · v̂`.
    pub fn from_axis_angle(v: [f64; 3], angle: f64) -> Self {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n == 0.0 {
            return Self::IDENTITY;
        }
        let s = angle.sin() / n;
        Su2Elem::new(angle.cos(), s * v[0], s * v[1], s * v[2])
    }

    /// Exponential of the pure quaternion `v`.
    pub fn exp(v: [f64; 3]) -> Self {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n < 1e-300 {
            return Self::IDENTITY;
        }
        Self::from_axis_angle(v, n)
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn vector(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn norm_sq(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn inverse(self) -> Self {
        Su2Elem { w: self.w, x: -self.x, y: -self.y, z: -self.z }
    }

    pub fn trace(self) -> f64 {
        2.0 * self.w
    }

    pub fn angle(self) -> f64 {
        angle(self)
    }

    /// Euclidean distance of the coefficient 4-vectors.
    pub fn distance(self, other: Su2Elem) -> f64 {
        let d = [self.w - other.w, self.x - other.x, self.y - other.y, self.z - other.z];
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3]).sqrt()
    }

    /// `self · q · self⁻¹`.
    pub fn conjugate(self, q: Su2Elem) -> Su2Elem {
        self * q * self.inverse()
    }

    pub fn powi(self, n: i64) -> Su2Elem {
        let base = if n < 0 { self.inverse() } else { self };
        let mut acc = Su2Elem::IDENTITY;
        let mut b = base;
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b;
            }
            b = b * b;
            e >>= 1;
        }
        acc
    }

    pub fn is_central(self, tol: f64) -> bool {
        let v = self.vector();
        (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt() <= tol
    }

    /// The 2×2 complex matrix, as `[[re, im]; 4]` in row-major order.
    pub fn matrix(self) -> [[f64; 2]; 4] {
        [
            [self.w, self.x],
            [self.y, self.z],
            [-self.y, self.z],
            [self.w, -self.x],
        ]
    }
}

impl Mul for Su2Elem {
    type Output = Su2Elem;

    fn mul(self, b: Su2Elem) -> Su2Elem {
        let a = self;
        Su2Elem::new(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }
}

impl Neg for Su2Elem {
    type Output = Su2Elem;

    fn neg(self) -> Su2Elem {
        Su2Elem { w: -self.w, x: -self.x, y: -self.y, z: -self.z }
    }
}

pub fn mul(a: Su2Elem, b: Su2Elem) -> Su2Elem {
    a * b
}

/// Rotation angle `arccos(w)` in `[0, π]`; determines the conjugacy class.
pub fn angle(q: Su2Elem) -> f64 {
    q.w.clamp(-1.0, 1.0).acos()
}

/// Returns `(frame, θ)` with `frame · q · frame⁻¹ = diag(e^{iθ}, e^{-iθ})`
/// and `θ = angle(q)`. Central elements get the identity frame.
pub fn conjugate_to_diagonal(q: Su2Elem) -> (Su2Elem, f64) {
    let theta = angle(q);
    let v = q.vector();
    let vn = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if vn < 1e-15 {
        return (Su2Elem::IDENTITY, theta);
    }
    let u = [v[0] / vn, v[1] / vn, v[2] / vn];
    // Rotate the unit axis u onto +i. The half-angle quaternion for the
    // rotation taking u to e is normalize(1 + e·u + u×e) when u ≠ -e.
    let dot = u[0];
    if dot < -1.0 + 1e-12 {
        // u = -i: rotate by π about j.
        return (Su2Elem::J, theta);
    }
    // u × i = (0, u_z, -u_y)
    let frame = Su2Elem::new(1.0 + dot, 0.0, u[2], -u[1]);
    (frame, theta)
}

/// Signed angle `β ∈ (-π, π]` such that `frame · q · frame⁻¹ = diag(e^{iβ})`.
pub fn signed_angle_in_frame(q: Su2Elem, frame: Su2Elem) -> Result<f64, Su2Error> {
    let d = frame.conjugate(q);
    let residual = (d.y * d.y + d.z * d.z).sqrt();
    if residual > FRAME_TOL {
        return Err(Su2Error::NotDiagonalInFrame { residual });
    }
    let b = d.x.atan2(d.w);
    // result lies in (-π, π]; rounding noise near -π folds onto π
    Ok(if b <= -PI + 1e-14 { PI } else { b })
}

/// Distance of the group commutator `a b a⁻¹ b⁻¹` from the identity, as a
/// 4-vector distance. Zero exactly when `a` and `b` commute.
pub fn commutator_norm(a: Su2Elem, b: Su2Elem) -> f64 {
    let c = a * b * a.inverse() * b.inverse();
    c.distance(Su2Elem::IDENTITY)
}

//! Damped Newton (Levenberg–Marquardt) on products of SU(2) with a few
//! extra real unknowns.
//!
//! Quaternion unknowns move by right multiplication with `exp(δ)`, so the
//! unit-norm constraint holds by construction. The Jacobian is a central
//! finite difference; systems here have at most a few dozen unknowns.

use nalgebra::{DMatrix, DVector};

use crate::su2::Su2Elem;

/// Finite-difference step for the Jacobian.
const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmOptions {
    /// Converged once every residual component is below this.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions { tol: 1e-10, max_iters: 100 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmOutcome {
    pub quats: Vec<Su2Elem>,
    pub scalars: Vec<f64>,
    /// Max-abs residual component at the returned point.
    pub residual: f64,
    pub iters: usize,
    pub converged: bool,
}

fn perturb(quats: &[Su2Elem], scalars: &[f64], delta: &[f64]) -> (Vec<Su2Elem>, Vec<f64>) {
    let nq = quats.len();
    let q = quats
        .iter()
        .enumerate()
        .map(|(i, &g)| g * Su2Elem::exp([delta[3 * i], delta[3 * i + 1], delta[3 * i + 2]]))
        .collect();
    let s = scalars.iter().enumerate().map(|(i, &x)| x + delta[3 * nq + i]).collect();
    (q, s)
}

fn max_abs(r: &[f64]) -> f64 {
    r.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn sq_norm(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

/// Minimizes `|F(quats, scalars)|²` starting from the given point.
pub fn solve<F>(residual: F, quats: Vec<Su2Elem>, scalars: Vec<f64>, opts: LmOptions) -> LmOutcome
where
    F: Fn(&[Su2Elem], &[f64]) -> Vec<f64>,
{
    let n = 3 * quats.len() + scalars.len();
    let mut q = quats;
    let mut s = scalars;
    let mut r = residual(&q, &s);
    let m = r.len();
    let mut lambda = 1e-3;
    let mut iters = 0;
    while iters < opts.max_iters {
        if max_abs(&r) < opts.tol {
            break;
        }
        if !r.iter().all(|x| x.is_finite()) {
            break;
        }
        iters += 1;
        let mut jac = DMatrix::<f64>::zeros(m, n);
        let mut delta = vec![0.0; n];
        for k in 0..n {
            delta[k] = FD_STEP;
            let (qp, sp) = perturb(&q, &s, &delta);
            delta[k] = -FD_STEP;
            let (qm, sm) = perturb(&q, &s, &delta);
            delta[k] = 0.0;
            let rp = residual(&qp, &sp);
            let rm = residual(&qm, &sm);
            for i in 0..m {
                jac[(i, k)] = (rp[i] - rm[i]) / (2.0 * FD_STEP);
            }
        }
        let rv = DVector::from_column_slice(&r);
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * rv;
        let cost = sq_norm(&r);
        let mut accepted = false;
        while lambda < 1e12 {
            let mut a = jtj.clone();
            for d in 0..n {
                a[(d, d)] += lambda * (1.0 + jtj[(d, d)]);
            }
            let step = match a.clone().cholesky() {
                Some(ch) => ch.solve(&(-&g)),
                None => match a.lu().solve(&(-&g)) {
                    Some(x) => x,
                    None => {
                        lambda *= 10.0;
                        continue;
                    }
                },
            };
            let (qn, sn) = perturb(&q, &s, step.as_slice());
            let rn = residual(&qn, &sn);
            if rn.iter().all(|x| x.is_finite()) && sq_norm(&rn) < cost {
                q = qn;
                s = sn;
                r = rn;
                lambda = (lambda / 5.0).max(1e-15);
                accepted = true;
                break;
            }
            lambda *= 4.0;
        }
        if !accepted {
            break;
        }
    }
    let res = max_abs(&r);
    LmOutcome { quats: q, scalars: s, residual: res, iters, converged: res < opts.tol }
}

/// Residual components of `q − target` as a 4-vector.
pub fn quat_residual(q: Su2Elem, target: Su2Elem) -> [f64; 4] {
    [q.w - target.w, q.x - target.x, q.y - target.y, q.z - target.z]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn finds_a_square_root() {
        // q² = i has the solution q = exp(π/4 · i)
        let target = Su2Elem::I;
        let out = solve(
            |q: &[Su2Elem], _: &[f64]| quat_residual(q[0] * q[0], target).to_vec(),
            vec![Su2Elem::new(0.9, 0.3, 0.1, -0.1)],
            vec![],
            LmOptions::default(),
        );
        assert!(out.converged, "{out:?}");
        let q = out.quats[0];
        assert!((q * q).distance(target) < 1e-10);
    }

    #[test]
    fn mixed_scalar_unknowns() {
        // diag(s) = diag(1.2) and q·diag(s) = diag(1.5)
        let out = solve(
            |q: &[Su2Elem], s: &[f64]| {
                let mut r = quat_residual(Su2Elem::diagonal(s[0]), Su2Elem::diagonal(1.2)).to_vec();
                r.extend(quat_residual(q[0] * Su2Elem::diagonal(s[0]), Su2Elem::diagonal(1.5)));
                r
            },
            vec![Su2Elem::IDENTITY],
            vec![0.5],
            LmOptions::default(),
        );
        assert!(out.converged);
        assert!((out.scalars[0] - 1.2).abs() < 1e-9);
        assert!(out.quats[0].distance(Su2Elem::diagonal(0.3)) < 1e-9);
    }

    #[test]
    fn rank_deficient_systems_converge() {
        // x² y⁻³ = 1 and x y⁻¹ = diag(π/2): one gauge direction stays free
        let out = solve(
            |q: &[Su2Elem], _: &[f64]| {
                let (x, y) = (q[0], q[1]);
                let mut r = quat_residual(x * x * y.inverse() * y.inverse() * y.inverse(), Su2Elem::IDENTITY).to_vec();
                r.extend(quat_residual(x * y.inverse(), Su2Elem::diagonal(PI / 2.0)));
                r
            },
            vec![Su2Elem::new(0.1, 0.8, 0.5, 0.2), Su2Elem::new(0.5, 0.1, 0.7, 0.3)],
            vec![],
            LmOptions::default(),
        );
        assert!(out.converged, "{out:?}");
    }

    #[test]
    fn reports_non_convergence() {
        // s² + 1 = 0 has no real root
        let out = solve(
            |_: &[Su2Elem], s: &[f64]| vec![s[0] * s[0] + 1.0],
            vec![],
            vec![0.3],
            LmOptions { tol: 1e-10, max_iters: 50 },
        );
        assert!(!out.converged);
        assert!(out.residual >= 1.0);
    }
}

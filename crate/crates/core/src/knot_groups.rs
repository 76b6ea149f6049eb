//! Finite presentations of knot-exterior groups with a distinguished
//! meridian and longitude.
//!
//! Words are signed, 1-based generator indices: `[1, -2]` is `x y⁻¹`.
//! There is no symbolic group theory here; words only matter through
//! their images in SU(2) and their exponent sums.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::su2::Su2Elem;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KnotError {
    #[error("torus knot parameters ({p}, {q}) must be coprime with |p|, |q| ≥ 2")]
    NotCoprime { p: i64, q: i64 },
    #[error("bad homology: {0}")]
    BadHomology(String),
    #[error("word refers to generator {index} but the presentation has {count}")]
    BadGenerator { index: i32, count: usize },
    #[error("invalid presentation JSON: {0}")]
    Json(String),
}

/// A word in the generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<i32>);

impl Word {
    pub fn new(letters: impl Into<Vec<i32>>) -> Self {
        Word(letters.into())
    }

    pub fn gen_pow(index: i32, exp: i64) -> Self {
        let letter = if exp >= 0 { index } else { -index };
        Word(vec![letter; exp.unsigned_abs() as usize])
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&l| -l).collect())
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n >= 0 { self.clone() } else { self.inverse() };
        let mut v = Vec::with_capacity(base.len() * n.unsigned_abs() as usize);
        for _ in 0..n.unsigned_abs() {
            v.extend_from_slice(&base.0);
        }
        Word(v)
    }

    /// Image under a generator assignment. Indices must be in range.
    pub fn eval(&self, assignment: &[Su2Elem]) -> Su2Elem {
        let mut acc = Su2Elem::IDENTITY;
        for &l in &self.0 {
            let g = assignment[(l.unsigned_abs() - 1) as usize];
            acc = if l > 0 { acc * g } else { acc * g.inverse() };
        }
        acc
    }

    /// Exponent sum per generator.
    pub fn exponent_sums(&self, n_gens: usize) -> Vec<i64> {
        let mut v = vec![0i64; n_gens];
        for &l in &self.0 {
            let i = (l.unsigned_abs() - 1) as usize;
            v[i] += l.signum() as i64;
        }
        v
    }

    fn check(&self, n_gens: usize) -> Result<(), KnotError> {
        for &l in &self.0 {
            if l == 0 || l.unsigned_abs() as usize > n_gens {
                return Err(KnotError::BadGenerator { index: l, count: n_gens });
            }
        }
        Ok(())
    }
}

/// A knot-exterior group with its peripheral pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnotPresentation {
    pub label: String,
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
    pub meridian: Word,
    pub longitude: Word,
}

/// Outcome of [`validate_peripheral`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeripheralReport {
    /// Free rank of `H₁`.
    pub free_rank: usize,
    /// Non-unit elementary divisors (torsion of `H₁`).
    pub torsion: Vec<i64>,
    /// Image of the meridian under the chosen isomorphism `H₁ ≅ ℤ`.
    pub meridian_image: i64,
    pub longitude_image: i64,
}

impl KnotPresentation {
    pub fn n_gens(&self) -> usize {
        self.generators.len()
    }

    pub fn from_json(s: &str) -> Result<Self, KnotError> {
        let k: KnotPresentation = serde_json::from_str(s).map_err(|e| KnotError::Json(e.to_string()))?;
        validate_peripheral(&k)?;
        Ok(k)
    }

    /// Largest Frobenius deviation `‖ρ(r) − 1‖_F` over all relators.
    pub fn relator_residual(&self, assignment: &[Su2Elem]) -> f64 {
        self.relators
            .iter()
            .map(|r| frobenius_deviation(r.eval(assignment), Su2Elem::IDENTITY))
            .fold(0.0, f64::max)
    }

    pub fn meridian_image(&self, assignment: &[Su2Elem]) -> Su2Elem {
        self.meridian.eval(assignment)
    }

    pub fn longitude_image(&self, assignment: &[Su2Elem]) -> Su2Elem {
        self.longitude.eval(assignment)
    }

    fn check_words(&self) -> Result<(), KnotError> {
        let n = self.n_gens();
        for w in self.relators.iter().chain([&self.meridian, &self.longitude]) {
            w.check(n)?;
        }
        Ok(())
    }
}

/// Frobenius norm of the difference of the 2×2 matrices of `a` and `b`.
pub fn frobenius_deviation(a: Su2Elem, b: Su2Elem) -> f64 {
    std::f64::consts::SQRT_2 * a.distance(b)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// `T(p, q)` as `⟨x, y | xᵖ y^{−q}⟩`, meridian `x^u y^v` with `uq + vp = 1`
/// and `u ≥ 0` minimal, longitude `xᵖ μ^{−pq}`.
pub fn torus_knot(p: i64, q: i64) -> Result<KnotPresentation, KnotError> {
    if p.abs() < 2 || q.abs() < 2 || gcd(p, q) != 1 {
        return Err(KnotError::NotCoprime { p, q });
    }
    let u = (0..p.abs()).find(|u| (u * q - 1).rem_euclid(p.abs()) == 0).expect("coprime");
    let v = (1 - u * q) / p;
    let meridian = Word::gen_pow(1, u).concat(&Word::gen_pow(2, v));
    let longitude = Word::gen_pow(1, p).concat(&meridian.pow(-p * q));
    let k = KnotPresentation {
        label: format!("T({p},{q})"),
        generators: vec!["x".into(), "y".into()],
        relators: vec![Word::gen_pow(1, p).concat(&Word::gen_pow(2, -q))],
        meridian,
        longitude,
    };
    debug_assert!(validate_peripheral(&k).is_ok());
    Ok(k)
}

/// The trefoil `T(2, 3)`.
pub fn trefoil() -> KnotPresentation {
    let mut k = torus_knot(2, 3).expect("coprime");
    k.label = "trefoil".into();
    k
}

/// The unknot exterior: a solid torus, `⟨x | ⟩` with `μ = x` and `λ = 1`.
pub fn unknot() -> KnotPresentation {
    KnotPresentation {
        label: "unknot".into(),
        generators: vec!["x".into()],
        relators: vec![],
        meridian: Word::new([1]),
        longitude: Word::default(),
    }
}

/// Smith normal form of an integer matrix: returns the diagonal and the
/// unimodular column transform `V` with `U A V = D`.
fn smith_normal_form(a: &[Vec<i64>], cols: usize) -> (Vec<i64>, Vec<Vec<i64>>) {
    let rows = a.len();
    let mut m: Vec<Vec<i64>> = a.to_vec();
    let mut v: Vec<Vec<i64>> = (0..cols).map(|i| (0..cols).map(|j| i64::from(i == j)).collect()).collect();
    let swap_cols = |m: &mut Vec<Vec<i64>>, v: &mut Vec<Vec<i64>>, i: usize, j: usize| {
        for r in m.iter_mut() {
            r.swap(i, j);
        }
        for r in v.iter_mut() {
            r.swap(i, j);
        }
    };
    // col_j -= k col_i
    let col_op = |m: &mut Vec<Vec<i64>>, v: &mut Vec<Vec<i64>>, j: usize, i: usize, k: i64| {
        for r in m.iter_mut() {
            r[j] -= k * r[i];
        }
        for r in v.iter_mut() {
            r[j] -= k * r[i];
        }
    };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest nonzero absolute entry in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for (r, row) in m.iter().enumerate().skip(t) {
            for (c, &x) in row.iter().enumerate().skip(t) {
                if x != 0 && best.is_none_or(|(br, bc)| x.abs() < m[br][bc].abs()) {
                    best = Some((r, c));
                }
            }
        }
        let Some((pr, pc)) = best else { break };
        m.swap(t, pr);
        swap_cols(&mut m, &mut v, t, pc);
        loop {
            let piv = m[t][t];
            let mut dirty = false;
            for r in (t + 1)..rows {
                let k = m[r][t] / piv;
                if k != 0 {
                    let (top, rest) = m.split_at_mut(r);
                    for c in 0..cols {
                        rest[0][c] -= k * top[t][c];
                    }
                }
                if m[r][t] != 0 {
                    dirty = true;
                }
            }
            for c in (t + 1)..cols {
                let k = m[t][c] / piv;
                if k != 0 {
                    col_op(&mut m, &mut v, c, t, k);
                }
                if m[t][c] != 0 {
                    dirty = true;
                }
            }
            if !dirty {
                // enforce divisibility of the remaining block
                let bad = ((t + 1)..rows)
                    .flat_map(|r| ((t + 1)..cols).map(move |c| (r, c)))
                    .find(|&(r, c)| m[r][c] % piv != 0);
                match bad {
                    None => break,
                    Some((r, _)) => {
                        let (top, rest) = m.split_at_mut(r);
                        for c in 0..cols {
                            top[t][c] += rest[0][c];
                        }
                        continue;
                    }
                }
            }
            // move the new smallest entry of row/column t to the pivot
            let mut best = (t, t);
            for r in t..rows {
                if m[r][t] != 0 && m[r][t].abs() < m[best.0][best.1].abs() {
                    best = (r, t);
                }
            }
            for c in t..cols {
                if m[t][c] != 0 && m[t][c].abs() < m[best.0][best.1].abs() {
                    best = (t, c);
                }
            }
            if best.0 != t {
                m.swap(t, best.0);
            }
            if best.1 != t {
                swap_cols(&mut m, &mut v, t, best.1);
            }
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    (diag, v)
}

/// Computes `H₁` from the relator exponent matrix and checks that it is
/// `ℤ`, generated by the meridian, with the longitude null-homologous.
pub fn validate_peripheral(k: &KnotPresentation) -> Result<PeripheralReport, KnotError> {
    k.check_words()?;
    let n = k.n_gens();
    let a: Vec<Vec<i64>> = k.relators.iter().map(|r| r.exponent_sums(n)).collect();
    let (diag, v) = smith_normal_form(&a, n);
    let rank = diag.len();
    let free_rank = n - rank;
    let torsion: Vec<i64> = diag.iter().copied().filter(|&d| d != 1).collect();
    if free_rank != 1 || !torsion.is_empty() {
        return Err(KnotError::BadHomology(format!(
            "H1 has free rank {free_rank} and torsion {torsion:?}, expected Z"
        )));
    }
    // the free summand is coordinate `rank` of x·V
    let phi = |w: &Word| -> i64 {
        let e = w.exponent_sums(n);
        (0..n).map(|i| e[i] * v[i][rank]).sum()
    };
    let meridian_image = phi(&k.meridian);
    let longitude_image = phi(&k.longitude);
    let report = PeripheralReport { free_rank, torsion, meridian_image, longitude_image };
    if meridian_image.abs() != 1 {
        return Err(KnotError::BadHomology(format!(
            "meridian maps to {meridian_image}, not a generator"
        )));
    }
    if longitude_image != 0 {
        return Err(KnotError::BadHomology(format!(
            "longitude maps to {longitude_image}, not 0"
        )));
    }
    Ok(report)
}

/// The abelianization `π₁ → H₁ ≅ ℤ` on generators, signed so the meridian
/// maps to `+1`.
pub fn abelianization(k: &KnotPresentation) -> Result<Vec<i64>, KnotError> {
    let report = validate_peripheral(k)?;
    let n = k.n_gens();
    let a: Vec<Vec<i64>> = k.relators.iter().map(|r| r.exponent_sums(n)).collect();
    let (diag, v) = smith_normal_form(&a, n);
    let rank = diag.len();
    Ok((0..n).map(|i| v[i][rank] * report.meridian_image).collect())
}

/// Two knot exteriors glued so that `μ₁ = λ₂` and `λ₁ = μ₂`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpliceProblem {
    pub left: KnotPresentation,
    pub right: KnotPresentation,
}

impl SpliceProblem {
    /// The same splice with the two sides exchanged.
    pub fn swapped(&self) -> SpliceProblem {
        SpliceProblem { left: self.right.clone(), right: self.left.clone() }
    }

    pub fn label(&self) -> String {
        format!("{} # {}", self.left.label, self.right.label)
    }
}

pub fn splice(left: KnotPresentation, right: KnotPresentation) -> Result<SpliceProblem, KnotError> {
    validate_peripheral(&left)?;
    validate_peripheral(&right)?;
    Ok(SpliceProblem { left, right })
}

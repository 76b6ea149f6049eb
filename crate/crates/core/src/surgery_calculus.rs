//! Forward chaining over Floer-rank judgments about surgeries on knots.
//!
//! Judgments are qualitative: a group vanishes, does not vanish, or is
//! isomorphic to another. The flavour is read off the manifold: 0-surgeries
//! and `S²×S¹` carry the weighted group `I^w`, homology spheres carry `I`.
//! Saturation runs in rounds over an immutable snapshot, so every fact is
//! derived at its minimal depth and its premises belong to earlier rounds.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_WINDOW: i64 = 8;
/// Slope demanded by the cabling rule.
const GORDON_SLOPE: i64 = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CalculusError {
    #[error("malformed: {0}")]
    Malformed(String),
    #[error("rule {rule} needs slope 1/{needed} but the window is [-{window}, {window}]")]
    WindowTooSmall { rule: &'static str, needed: i64, window: i64 },
    #[error("unknown fact: {0}")]
    UnknownFact(String),
    #[error("replay failed at {fact}: {reason}")]
    Replay { fact: String, reason: String },
    #[error("axiom file: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Knot {
    Sym(String),
    /// The (2,1)-cable.
    Cable21(Box<Knot>),
}

impl Knot {
    pub fn cable(&self) -> Knot {
        Knot::Cable21(Box::new(self.clone()))
    }

    pub fn depth(&self) -> usize {
        match self {
            Knot::Sym(_) => 0,
            Knot::Cable21(k) => 1 + k.depth(),
        }
    }

    pub fn root(&self) -> &str {
        match self {
            Knot::Sym(s) => s,
            Knot::Cable21(k) => k.root(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slope {
    /// `1/n` with `n ≠ 0`.
    Recip(i64),
    Zero,
}

/// Closed three-manifolds built by surgery.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FloerTerm {
    S3,
    S2xS1,
    Atom(String),
    Surg { base: Box<FloerTerm>, knot: Knot, slope: Slope },
}

impl FloerTerm {
    pub fn atom(name: &str) -> FloerTerm {
        FloerTerm::Atom(name.to_string())
    }

    /// `base_{1/n}(knot)`; `n = 0` returns `base`.
    pub fn recip(base: &FloerTerm, knot: &Knot, n: i64) -> FloerTerm {
        if n == 0 {
            return base.clone();
        }
        FloerTerm::Surg { base: Box::new(base.clone()), knot: knot.clone(), slope: Slope::Recip(n) }
    }

    pub fn zero(base: &FloerTerm, knot: &Knot) -> FloerTerm {
        FloerTerm::Surg { base: Box::new(base.clone()), knot: knot.clone(), slope: Slope::Zero }
    }

    /// True for `b₁ = 1` manifolds, whose group is `I^w`.
    pub fn is_weighted(&self) -> bool {
        matches!(self, FloerTerm::S2xS1 | FloerTerm::Surg { slope: Slope::Zero, .. })
    }

    fn visit<'a>(&'a self, f: &mut dyn FnMut(&'a FloerTerm)) {
        f(self);
        if let FloerTerm::Surg { base, .. } = self {
            base.visit(f);
        }
    }

    fn floer(&self) -> String {
        if self.is_weighted() {
            format!("I^w({self})")
        } else {
            format!("I({self})")
        }
    }
}

impl fmt::Display for Knot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Knot::Sym(s) => write!(f, "{s}"),
            Knot::Cable21(k) => write!(f, "{k}_{{2,1}}"),
        }
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::Zero => write!(f, "0"),
            Slope::Recip(1) => write!(f, "1"),
            Slope::Recip(-1) => write!(f, "{{-1}}"),
            Slope::Recip(n) => write!(f, "{{1/{n}}}"),
        }
    }
}

impl fmt::Display for FloerTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FloerTerm::S3 => write!(f, "S3"),
            FloerTerm::S2xS1 => write!(f, "S2xS1"),
            FloerTerm::Atom(s) => write!(f, "{s}"),
            FloerTerm::Surg { base, knot, slope } => match **base {
                FloerTerm::Surg { .. } => write!(f, "({base})_{slope}({knot})"),
                _ => write!(f, "{base}_{slope}({knot})"),
            },
        }
    }
}

impl From<FloerTerm> for String {
    fn from(t: FloerTerm) -> String {
        t.to_string()
    }
}

impl TryFrom<String> for FloerTerm {
    type Error = CalculusError;
    fn try_from(s: String) -> Result<Self, CalculusError> {
        s.parse()
    }
}

/// Recursive-descent reader for the syntax produced by `Display`.
struct Reader<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn err(&self, what: &str) -> CalculusError {
        CalculusError::Malformed(format!("{what} at byte {} of {:?}", self.pos, self.s))
    }

    fn peek(&self) -> Option<char> {
        self.s[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), CalculusError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{c}'")))
        }
    }

    fn ident(&mut self) -> Result<&'a str, CalculusError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '\'' {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        if start == self.pos {
            return Err(self.err("expected a name"));
        }
        Ok(&self.s[start..self.pos])
    }

    fn int(&mut self) -> Result<i64, CalculusError> {
        let start = self.pos;
        self.eat('-');
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.s[start..self.pos].parse().map_err(|_| self.err("expected an integer"))
    }

    fn slope(&mut self) -> Result<Option<i64>, CalculusError> {
        if self.eat('{') {
            let a = self.int()?;
            let n = if self.eat('/') {
                if a != 1 {
                    return Err(self.err("slopes must be 1/n or 0"));
                }
                self.int()?
            } else {
                match a {
                    0 => {
                        self.expect('}')?;
                        return Ok(None);
                    }
                    1 | -1 => a,
                    _ => return Err(self.err("slopes must be 1/n or 0")),
                }
            };
            self.expect('}')?;
            return Ok(Some(n));
        }
        match self.int()? {
            0 => Ok(None),
            n @ (1 | -1) => Ok(Some(n)),
            _ => Err(self.err("slopes must be 1/n or 0")),
        }
    }

    fn knot(&mut self) -> Result<Knot, CalculusError> {
        let mut k = Knot::Sym(self.ident()?.to_string());
        while self.s[self.pos..].starts_with("_{2,1}") {
            self.pos += "_{2,1}".len();
            k = k.cable();
        }
        Ok(k)
    }

    fn term(&mut self) -> Result<FloerTerm, CalculusError> {
        let mut t = if self.eat('(') {
            let t = self.term()?;
            self.expect(')')?;
            t
        } else {
            match self.ident()? {
                "S3" => FloerTerm::S3,
                "S2xS1" => FloerTerm::S2xS1,
                name => FloerTerm::atom(name),
            }
        };
        while self.eat('_') {
            let slope = self.slope()?;
            self.expect('(')?;
            let knot = self.knot()?;
            self.expect(')')?;
            t = match slope {
                None => FloerTerm::zero(&t, &knot),
                Some(n) => FloerTerm::recip(&t, &knot, n),
            };
        }
        Ok(t)
    }
}

impl FromStr for FloerTerm {
    type Err = CalculusError;
    fn from_str(s: &str) -> Result<Self, CalculusError> {
        let s = s.trim();
        let mut r = Reader { s, pos: 0 };
        let t = r.term()?;
        if r.pos != s.len() {
            return Err(r.err("trailing input"));
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    Vanishes,
    NonVanishes,
    IsoTo(FloerTerm),
    DiffeoTo(FloerTerm),
    /// Both `Vanishes` and `NonVanishes` hold for the subject.
    Contradiction,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Fact {
    pub subject: FloerTerm,
    pub claim: Claim,
}

impl Fact {
    pub fn new(subject: FloerTerm, claim: Claim) -> Fact {
        Fact { subject, claim }
    }

    pub fn vanishes(t: FloerTerm) -> Fact {
        Fact::new(t, Claim::Vanishes)
    }

    pub fn non_vanishes(t: FloerTerm) -> Fact {
        Fact::new(t, Claim::NonVanishes)
    }

    pub fn is_contradiction(&self) -> bool {
        self.claim == Claim::Contradiction
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = &self.subject;
        match &self.claim {
            Claim::Vanishes => write!(f, "{} = 0", s.floer()),
            Claim::NonVanishes => write!(f, "{} != 0", s.floer()),
            Claim::IsoTo(t) => write!(f, "{} ≅ {}", s.floer(), t.floer()),
            Claim::DiffeoTo(t) => write!(f, "{s} ≅ {t} (diffeomorphic)"),
            Claim::Contradiction => write!(f, "CONTRADICTION at {}", s.floer()),
        }
    }
}

/// User-asserted topological properties of a knot.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct KnotFlags {
    pub irreducible_exterior: bool,
    pub boundary_incompressible: bool,
    /// The knot generates homology in `S²×S¹`-type settings.
    pub generates_homology: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Rule {
    Axiom,
    Preload,
    /// `I^w(Y₀(K)) = 0` collapses the triangle at `n`.
    TriangleIso { n: i64 },
    /// Two vanishing corners of the triangle at `n` kill the third.
    TriangleVanish { n: i64 },
    Gordon,
    NonVanishing { pedigree: String },
    Transport,
    Clash,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Axiom => write!(f, "axiom"),
            Rule::Preload => write!(f, "preloaded"),
            Rule::TriangleIso { n } => write!(f, "R1a triangle collapse, n = {n}"),
            Rule::TriangleVanish { n } => write!(f, "R1b triangle, n = {n}"),
            Rule::Gordon => write!(f, "R2 Gordon cabling"),
            Rule::NonVanishing { pedigree } => write!(f, "R3 non-vanishing ({pedigree})"),
            Rule::Transport => write!(f, "R4 transport"),
            Rule::Clash => write!(f, "clash"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derivation {
    pub rule: Rule,
    pub premises: Vec<Fact>,
    /// Saturation round; axioms and preloads are round 0.
    pub round: usize,
}

/// Axiom file contents.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxiomSet {
    #[serde(default)]
    pub window: Option<i64>,
    #[serde(default)]
    pub knots: BTreeMap<String, KnotFlags>,
    pub axioms: Vec<Fact>,
}

impl AxiomSet {
    pub fn from_json(s: &str) -> Result<AxiomSet, CalculusError> {
        serde_json::from_str(s).map_err(|e| CalculusError::Json(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Store {
    pub window: i64,
    pub knots: BTreeMap<String, KnotFlags>,
    facts: BTreeMap<Fact, Derivation>,
}

impl Store {
    /// A store holding only the preloaded `I^w(S²×S¹) = 0`.
    pub fn new(window: i64) -> Store {
        let mut facts = BTreeMap::new();
        facts.insert(Fact::vanishes(FloerTerm::S2xS1), Derivation { rule: Rule::Preload, premises: vec![], round: 0 });
        Store { window, knots: BTreeMap::new(), facts }
    }

    pub fn from_axioms(a: &AxiomSet, window: Option<i64>) -> Result<Store, CalculusError> {
        let mut s = Store::new(window.or(a.window).unwrap_or(DEFAULT_WINDOW));
        if s.window < 1 {
            return Err(CalculusError::Malformed(format!("window {} must be positive", s.window)));
        }
        s.knots = a.knots.clone();
        for f in &a.axioms {
            s.assert_axiom(f.clone())?;
        }
        Ok(s)
    }

    pub fn assert_axiom(&mut self, f: Fact) -> Result<(), CalculusError> {
        let bad = |why: &str| Err(CalculusError::Malformed(format!("{f}: {why}")));
        match &f.claim {
            Claim::Contradiction => return bad("contradictions cannot be asserted"),
            Claim::IsoTo(t) | Claim::DiffeoTo(t) => {
                if *t == f.subject {
                    return bad("relation of a term to itself");
                }
                if matches!(f.claim, Claim::IsoTo(_)) && t.is_weighted() != f.subject.is_weighted() {
                    return bad("relates I to I^w");
                }
            }
            _ => {}
        }
        self.facts.entry(f).or_insert(Derivation { rule: Rule::Axiom, premises: vec![], round: 0 });
        Ok(())
    }

    pub fn contains(&self, f: &Fact) -> bool {
        self.facts.contains_key(f)
    }

    pub fn derivation(&self, f: &Fact) -> Option<&Derivation> {
        self.facts.get(f)
    }

    /// Facts in canonical order.
    pub fn facts(&self) -> impl Iterator<Item = (&Fact, &Derivation)> {
        self.facts.iter()
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn contradictions(&self) -> Vec<&Fact> {
        self.facts.keys().filter(|f| f.is_contradiction()).collect()
    }

    fn flags(&self, k: &Knot) -> KnotFlags {
        self.knots.get(k.root()).copied().unwrap_or_default()
    }

    /// `(base, knot)` pairs of every surgery subterm in the store.
    fn surgery_sites(&self) -> BTreeSet<(FloerTerm, Knot)> {
        let mut out = BTreeSet::new();
        for f in self.facts.keys() {
            let mut add = |t: &FloerTerm| {
                if let FloerTerm::Surg { base, knot, .. } = t {
                    out.insert(((**base).clone(), knot.clone()));
                }
            };
            f.subject.visit(&mut add);
            if let Claim::IsoTo(t) | Claim::DiffeoTo(t) = &f.claim {
                t.visit(&mut add);
            }
        }
        out
    }
}

fn pedigree(flags: KnotFlags, base: &FloerTerm) -> Option<&'static str> {
    if flags.irreducible_exterior && flags.boundary_incompressible {
        Some("irreducible, boundary-incompressible exterior")
    } else if flags.generates_homology && *base != FloerTerm::S3 {
        Some("homology-generating knot, base not S3")
    } else {
        None
    }
}

/// Conclusions of one round, computed from a frozen snapshot.
fn round(s: &Store) -> Result<Vec<(Fact, Rule, Vec<Fact>)>, CalculusError> {
    let n_max = s.window;
    let mut out = Vec::new();
    let sites = s.surgery_sites();
    for (base, knot) in &sites {
        if base.is_weighted() {
            continue;
        }
        let y0 = Fact::vanishes(FloerTerm::zero(base, knot));
        if s.contains(&y0) {
            for n in -n_max..n_max {
                let f = Fact::new(FloerTerm::recip(base, knot, n + 1), Claim::IsoTo(FloerTerm::recip(base, knot, n)));
                out.push((f, Rule::TriangleIso { n }, vec![y0.clone()]));
            }
        }
        for n in -n_max..n_max {
            let a = Fact::vanishes(FloerTerm::recip(base, knot, n));
            let b = Fact::vanishes(FloerTerm::recip(base, knot, n + 1));
            if s.contains(&a) && s.contains(&b) {
                out.push((y0.clone(), Rule::TriangleVanish { n }, vec![a, b]));
            }
        }
        if knot.depth() == 0 {
            if n_max < GORDON_SLOPE {
                return Err(CalculusError::WindowTooSmall { rule: "R2 Gordon", needed: GORDON_SLOPE, window: n_max });
            }
            let f = Fact::new(
                FloerTerm::recip(base, knot, GORDON_SLOPE),
                Claim::DiffeoTo(FloerTerm::recip(base, &knot.cable(), 1)),
            );
            out.push((f, Rule::Gordon, vec![]));
            if let Some(p) = pedigree(s.flags(knot), base) {
                let f = Fact::non_vanishes(FloerTerm::zero(base, &knot.cable()));
                out.push((f, Rule::NonVanishing { pedigree: p.to_string() }, vec![]));
            }
        }
    }
    for rel in s.facts.keys() {
        let other = match &rel.claim {
            Claim::IsoTo(t) | Claim::DiffeoTo(t) => t,
            _ => continue,
        };
        for claim in [Claim::Vanishes, Claim::NonVanishes] {
            for (from, to) in [(&rel.subject, other), (other, &rel.subject)] {
                let src = Fact::new(from.clone(), claim.clone());
                if s.contains(&src) {
                    out.push((Fact::new(to.clone(), claim.clone()), Rule::Transport, vec![rel.clone(), src]));
                }
            }
        }
    }
    for f in s.facts.keys() {
        if f.claim == Claim::Vanishes {
            let nv = Fact::non_vanishes(f.subject.clone());
            if s.contains(&nv) {
                out.push((Fact::new(f.subject.clone(), Claim::Contradiction), Rule::Clash, vec![f.clone(), nv]));
            }
        }
    }
    Ok(out)
}

/// Runs rules to a fixpoint and returns the number of rounds used.
pub fn saturate(s: &mut Store) -> Result<usize, CalculusError> {
    let mut r = 0;
    loop {
        let new = round(s)?;
        r += 1;
        let mut added: BTreeMap<Fact, Derivation> = BTreeMap::new();
        for (f, rule, premises) in new {
            if s.facts.contains_key(&f) {
                continue;
            }
            let d = Derivation { rule, premises, round: r };
            match added.get(&f) {
                Some(prev) if (&prev.rule, &prev.premises) <= (&d.rule, &d.premises) => {}
                _ => {
                    added.insert(f, d);
                }
            }
        }
        if added.is_empty() {
            return Ok(r - 1);
        }
        s.facts.extend(added);
    }
}

/// Re-checks every derivation against the rule definitions.
pub fn replay(s: &Store) -> Result<(), CalculusError> {
    for (f, d) in &s.facts {
        let fail = |reason: &str| Err(CalculusError::Replay { fact: f.to_string(), reason: reason.to_string() });
        for p in &d.premises {
            match s.facts.get(p) {
                None => return fail(&format!("premise {p} missing")),
                Some(pd) if pd.round >= d.round => return fail(&format!("premise {p} is not earlier")),
                _ => {}
            }
        }
        let ok = match &d.rule {
            Rule::Axiom => d.round == 0 && d.premises.is_empty() && !f.is_contradiction(),
            Rule::Preload => *f == Fact::vanishes(FloerTerm::S2xS1),
            Rule::TriangleIso { n } => match d.premises.as_slice() {
                [Fact { subject: FloerTerm::Surg { base, knot, slope: Slope::Zero }, claim: Claim::Vanishes }] => {
                    !base.is_weighted()
                        && (-s.window..s.window).contains(n)
                        && *f == Fact::new(FloerTerm::recip(base, knot, n + 1), Claim::IsoTo(FloerTerm::recip(base, knot, *n)))
                }
                _ => false,
            },
            Rule::TriangleVanish { n } => match (&f.subject, &f.claim, d.premises.as_slice()) {
                (FloerTerm::Surg { base, knot, slope: Slope::Zero }, Claim::Vanishes, [a, b]) => {
                    !base.is_weighted()
                        && (-s.window..s.window).contains(n)
                        && *a == Fact::vanishes(FloerTerm::recip(base, knot, *n))
                        && *b == Fact::vanishes(FloerTerm::recip(base, knot, n + 1))
                }
                _ => false,
            },
            Rule::Gordon => match (&f.subject, &f.claim) {
                (FloerTerm::Surg { base, knot, slope: Slope::Recip(GORDON_SLOPE) }, Claim::DiffeoTo(t)) => {
                    knot.depth() == 0 && s.window >= GORDON_SLOPE && *t == FloerTerm::recip(base, &knot.cable(), 1)
                }
                _ => false,
            },
            Rule::NonVanishing { pedigree: p } => match (&f.subject, &f.claim) {
                (FloerTerm::Surg { base, knot: Knot::Cable21(k), slope: Slope::Zero }, Claim::NonVanishes) => {
                    k.depth() == 0 && pedigree(s.flags(k), base) == Some(p.as_str())
                }
                _ => false,
            },
            Rule::Transport => match d.premises.as_slice() {
                [rel, src] => match &rel.claim {
                    Claim::IsoTo(t) | Claim::DiffeoTo(t) => {
                        matches!(src.claim, Claim::Vanishes | Claim::NonVanishes)
                            && f.claim == src.claim
                            && ((src.subject == rel.subject && f.subject == *t)
                                || (src.subject == *t && f.subject == rel.subject))
                    }
                    _ => false,
                },
                _ => false,
            },
            Rule::Clash => {
                f.is_contradiction()
                    && d.premises == [Fact::vanishes(f.subject.clone()), Fact::non_vanishes(f.subject.clone())]
            }
        };
        if !ok {
            return fail(&format!("does not follow by {}", d.rule));
        }
    }
    Ok(())
}

/// Premise-first listing of everything `f` depends on, `f` last.
fn closure<'a>(s: &'a Store, f: &'a Fact, seen: &mut BTreeSet<&'a Fact>, out: &mut Vec<&'a Fact>) {
    if !seen.insert(f) {
        return;
    }
    for p in &s.facts[f].premises {
        closure(s, p, seen, out);
    }
    out.push(f);
}

/// Numbered derivation transcript of `f`, premises before conclusions.
pub fn explain(s: &Store, f: &Fact) -> Result<String, CalculusError> {
    if !s.contains(f) {
        return Err(CalculusError::UnknownFact(f.to_string()));
    }
    let mut order = Vec::new();
    closure(s, f, &mut BTreeSet::new(), &mut order);
    let index: BTreeMap<&Fact, usize> = order.iter().enumerate().map(|(i, g)| (*g, i + 1)).collect();
    let width = order.iter().map(|g| g.to_string().chars().count()).max().unwrap_or(0);
    let label_width = format!("[{}]", order.len()).len();
    let mut out = String::new();
    for (i, g) in order.iter().enumerate() {
        let d = &s.facts[*g];
        let text = g.to_string();
        let pad = width - text.chars().count();
        let label = format!("[{}]", i + 1);
        out.push_str(&format!("{label:<label_width$} {}{}   {}", text, " ".repeat(pad), d.rule));
        if !d.premises.is_empty() {
            let refs: Vec<String> = d.premises.iter().map(|p| format!("[{}]", index[p])).collect();
            out.push_str(&format!("; from {}", refs.join(", ")));
        }
        out.push('\n');
    }
    if f.is_contradiction() {
        out.push_str("CONTRADICTION\n");
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivationTree {
    pub fact: String,
    pub rule: Rule,
    pub premises: Vec<DerivationTree>,
}

/// Machine-readable derivation tree of `f`.
pub fn explain_tree(s: &Store, f: &Fact) -> Result<DerivationTree, CalculusError> {
    let d = s.facts.get(f).ok_or_else(|| CalculusError::UnknownFact(f.to_string()))?;
    Ok(DerivationTree {
        fact: f.to_string(),
        rule: d.rule.clone(),
        premises: d.premises.iter().map(|p| explain_tree(s, p)).collect::<Result<_, _>>()?,
    })
}

/// Outcome of [`run`].
#[derive(Debug, Clone)]
pub struct RunReport {
    pub store: Store,
    pub rounds: usize,
    /// First contradiction in canonical order, if any.
    pub contradiction: Option<Fact>,
}

/// Loads axioms, saturates and replays.
pub fn run(a: &AxiomSet, window: Option<i64>) -> Result<RunReport, CalculusError> {
    let mut store = Store::from_axioms(a, window)?;
    let rounds = saturate(&mut store)?;
    replay(&store)?;
    let contradiction = store.contradictions().first().map(|f| (*f).clone());
    Ok(RunReport { store, rounds, contradiction })
}

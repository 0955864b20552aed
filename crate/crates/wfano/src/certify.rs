//! Rule engine deriving bounds on the stability threshold of quasi-smooth
//! weighted Fano hypersurfaces `X_d` in `P(a_0, ..., a_{n+1})`.
//!
//! Every rule guards its own hypotheses and records them in the trace as
//! [`Hypothesis`] values, which can be replayed against the datum. Bounds
//! are stated for the polarization `O_X(1)`; the anticanonical threshold
//! is the `O_X(1)` threshold divided by the Fano index.

use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::convex::delta_surface_bounds;
use crate::error::{pre, Error, Result};
use crate::moments::{delta_eckardt, unstable_check, UnstableVerdict};
use crate::poly::{general_member_quasi_smooth, semigroup_contains, MemberFamily};
use crate::rat::{fmt_q, max_q, min_q, qi, qu, Q};
use crate::wps::WeightVector;

/// Degrees above this are not searched by the coin-problem test.
pub const MAX_COIN_DEGREE: u64 = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum B1Status {
    Yes,
    No,
    Unknown,
}

impl B1Status {
    pub fn as_str(self) -> &'static str {
        match self {
            B1Status::Yes => "yes",
            B1Status::No => "no",
            B1Status::Unknown => "unknown",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "yes" | "true" => Ok(B1Status::Yes),
            "no" | "false" => Ok(B1Status::No),
            "unknown" | "" => Ok(B1Status::Unknown),
            other => Err(Error::Parse(format!("expected yes, no or unknown, got {other:?}"))),
        }
    }
}

impl fmt::Display for B1Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Structural information about the member `X` that the weights alone do
/// not determine.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Flags {
    /// Whether `P = [0:...:0:1]` is a generalized Eckardt point.
    pub eckardt_at_p: Option<bool>,
    /// The least `t` with `x_0` not dividing `f_{at+1}` in the normal form
    /// at `P`; `m = k` is the generalized Eckardt case.
    pub m: Option<u64>,
    /// Asserted containment of `B_1`, the base locus of `|O(1)|`.
    pub b1_in_x: B1Status,
    /// `X` is a general member of `|O(d)|`.
    pub general_member: bool,
    /// `X` is asserted quasi-smooth.
    pub quasi_smooth: bool,
}

impl Default for Flags {
    fn default() -> Self {
        Self { eckardt_at_p: None, m: None, b1_in_x: B1Status::Unknown, general_member: false, quasi_smooth: true }
    }
}

/// A hypersurface of degree `d` in a well-formed weighted projective
/// space, with weights kept in ascending order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FanoDatum {
    weights: Vec<u64>,
    d: u64,
    flags: Flags,
}

impl FanoDatum {
    pub fn new(mut weights: Vec<u64>, d: u64, flags: Flags) -> Result<Self> {
        if weights.len() < 3 {
            return Err(Error::TooShort(weights.len()));
        }
        let w = WeightVector::new(weights.clone())?;
        if !w.is_well_formed() {
            return Err(Error::NotWellFormed(weights));
        }
        if d == 0 {
            return pre("the degree must be positive");
        }
        weights.sort_unstable();
        Ok(Self { weights, d, flags })
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn ambient(&self) -> WeightVector {
        WeightVector::new(self.weights.clone()).expect("validated on construction")
    }

    pub fn degree(&self) -> u64 {
        self.d
    }

    /// Dimension of the hypersurface.
    pub fn n(&self) -> u32 {
        (self.weights.len() - 2) as u32
    }

    pub fn flags(&self) -> &Flags {
        &self.flags
    }

    pub fn with_flags(&self, flags: Flags) -> Self {
        Self { weights: self.weights.clone(), d: self.d, flags }
    }

    /// `sum a_i - d`.
    pub fn index(&self) -> i64 {
        self.weights.iter().sum::<u64>() as i64 - self.d as i64
    }

    /// Number of weights equal to 1.
    pub fn c1(&self) -> usize {
        self.weights.iter().filter(|&&w| w == 1).count()
    }

    /// `a_i` in ascending order, `0 <= i <= n+1`.
    pub fn a(&self, i: usize) -> u64 {
        self.weights[i]
    }

    /// `a_{n+1}`, the largest weight.
    pub fn top(&self) -> u64 {
        *self.weights.last().expect("at least three weights")
    }

    /// Weights greater than 1.
    pub fn big_weights(&self) -> &[u64] {
        &self.weights[self.c1()..]
    }

    /// `(1^{n+1}, a)` with `a >= 2`.
    pub fn single_big_weight(&self) -> Option<u64> {
        (self.c1() == self.weights.len() - 1).then(|| self.top())
    }

    /// `(1^n, a, b)` with `2 <= a <= b`.
    pub fn two_big_weights(&self) -> Option<(u64, u64)> {
        let n = self.n() as usize;
        (self.c1() == n).then(|| (self.weights[n], self.weights[n + 1]))
    }

    /// `X_d in P(...)`, used in messages.
    pub fn label(&self) -> String {
        format!("X_{} in {}", self.d, self.ambient().compact())
    }
}

/// Outcome of the `B_1` containment test with the rule that decided it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct B1Derivation {
    pub status: B1Status,
    pub rule: Option<&'static str>,
    pub reason: String,
}

/// Decides `B_1 subset X` from the weights where possible. Rules: many
/// weight-one coordinates force `B_1` out of a quasi-smooth `X`; a
/// quasi-smooth `X` containing `B_1` has `d = 1 mod a_j` for every weight
/// `a_j > 1`; a degree outside the semigroup of the weights `> 1` forces
/// `B_1 subset X`; a general member contains no such `B_1` when the
/// degree lies in that semigroup.
pub fn derive_b1(datum: &FanoDatum) -> B1Derivation {
    let n = datum.n() as usize;
    let c1 = datum.c1();
    let d = datum.degree();
    let big = datum.big_weights();
    let unknown = |reason: String| B1Derivation { status: B1Status::Unknown, rule: None, reason };
    if big.is_empty() {
        return unknown("no weight exceeds 1, so B_1 is empty".into());
    }
    if d <= 1 {
        return unknown(format!("degree {d} is at most 1"));
    }
    if n + 1 >= 2 * c1 {
        return B1Derivation {
            status: B1Status::No,
            rule: Some("b1-dimension"),
            reason: format!("n+1 = {} >= 2 c_1 = {}, so dim B_1 > n/2", n + 1, 2 * c1),
        };
    }
    if let Some(&w) = big.iter().find(|&&w| d % w != 1) {
        return B1Derivation {
            status: B1Status::No,
            rule: Some("b1-residue"),
            reason: format!("d = {d} is {} mod a_j = {w}, not 1", d % w),
        };
    }
    if d > MAX_COIN_DEGREE {
        return unknown(format!("degree {d} exceeds the coin-problem search limit"));
    }
    let representable = semigroup_contains(big, d);
    if !representable {
        return B1Derivation {
            status: B1Status::Yes,
            rule: Some("b1-semigroup"),
            reason: format!("d = {d} is not a non-negative combination of {big:?}"),
        };
    }
    if datum.flags().general_member {
        return B1Derivation {
            status: B1Status::No,
            rule: Some("b1-general"),
            reason: format!(
                "d = {d} is a combination of {big:?}, so a general member has a monomial avoiding the weight-one variables"
            ),
        };
    }
    unknown(format!("d = {d} is a combination of {big:?}; containment depends on the member"))
}

/// A checkable condition recorded by a rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    DimensionAtLeast(u32),
    DimensionIs(u32),
    IndexIs(i64),
    /// Exactly this many weights equal 1.
    OnesCount(usize),
    /// At least this many weights equal 1.
    OnesAtLeast(usize),
    /// `a_position >= min` in ascending order.
    WeightAtLeast {
        position: usize,
        min: u64,
    },
    DegreeAtLeast(u64),
    /// `weight > 1` occurs among the weights and divides `d`.
    WeightDividesDegree(u64),
    /// `weight` does not divide `d`.
    WeightNotDividingDegree(u64),
    DegreeResidue {
        modulus: u64,
        residue: u64,
    },
    B1InX(bool),
    EckardtAtP(bool),
    EckardtIndexAtMost(u64),
    GeneralMember,
    QuasiSmooth,
    /// `lhs < rhs` (strict) or `lhs <= rhs`.
    Compare {
        what: String,
        lhs: Q,
        rhs: Q,
        strict: bool,
    },
}

impl Hypothesis {
    pub fn holds(&self, datum: &FanoDatum, resolved: &Resolved) -> bool {
        let d = datum.degree();
        match self {
            Hypothesis::DimensionAtLeast(m) => datum.n() >= *m,
            Hypothesis::DimensionIs(m) => datum.n() == *m,
            Hypothesis::IndexIs(i) => datum.index() == *i,
            Hypothesis::OnesCount(c) => datum.c1() == *c,
            Hypothesis::OnesAtLeast(c) => datum.c1() >= *c,
            Hypothesis::WeightAtLeast { position, min } => datum.weights().get(*position).is_some_and(|w| w >= min),
            Hypothesis::DegreeAtLeast(m) => d >= *m,
            Hypothesis::WeightDividesDegree(w) => *w > 1 && datum.weights().contains(w) && d.is_multiple_of(*w),
            Hypothesis::WeightNotDividingDegree(w) => *w > 0 && !d.is_multiple_of(*w),
            Hypothesis::DegreeResidue { modulus, residue } => *modulus > 0 && d % modulus == *residue,
            Hypothesis::B1InX(b) => resolved.b1.status == if *b { B1Status::Yes } else { B1Status::No },
            Hypothesis::EckardtAtP(b) => resolved.eckardt == Some(*b),
            Hypothesis::EckardtIndexAtMost(m) => resolved.m.is_some_and(|x| x <= *m),
            Hypothesis::GeneralMember => datum.flags().general_member,
            Hypothesis::QuasiSmooth => datum.flags().quasi_smooth,
            Hypothesis::Compare { lhs, rhs, strict, .. } => {
                if *strict {
                    lhs < rhs
                } else {
                    lhs <= rhs
                }
            }
        }
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hypothesis::DimensionAtLeast(m) => write!(f, "n >= {m}"),
            Hypothesis::DimensionIs(m) => write!(f, "n = {m}"),
            Hypothesis::IndexIs(i) => write!(f, "index = {i}"),
            Hypothesis::OnesCount(c) => write!(f, "c_1 = {c}"),
            Hypothesis::OnesAtLeast(c) => write!(f, "c_1 >= {c}"),
            Hypothesis::WeightAtLeast { position, min } => write!(f, "a_{position} >= {min}"),
            Hypothesis::DegreeAtLeast(m) => write!(f, "d >= {m}"),
            Hypothesis::WeightDividesDegree(w) => write!(f, "weight {w} divides d"),
            Hypothesis::WeightNotDividingDegree(w) => write!(f, "{w} does not divide d"),
            Hypothesis::DegreeResidue { modulus, residue } => write!(f, "d = {residue} mod {modulus}"),
            Hypothesis::B1InX(b) => write!(f, "B_1 {} X", if *b { "in" } else { "not in" }),
            Hypothesis::EckardtAtP(b) => write!(f, "eckardt_at_P = {b}"),
            Hypothesis::EckardtIndexAtMost(m) => write!(f, "m <= {m}"),
            Hypothesis::GeneralMember => write!(f, "general member"),
            Hypothesis::QuasiSmooth => write!(f, "quasi-smooth"),
            Hypothesis::Compare { what, lhs, rhs, strict } => {
                write!(f, "{what}: {} {} {}", fmt_q(lhs), if *strict { "<" } else { "<=" }, fmt_q(rhs))
            }
        }
    }
}

/// Where a bound holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scope {
    /// `delta(X; O_X(1))`.
    Global,
    /// `delta_P` at `P = [0:...:0:1]`.
    AtP,
    /// `delta_p` for every `p != P`.
    AwayFromP,
    /// A general hyperplane section through `P`, not a bound on `X`.
    Surface,
    /// The explicit member of a family, not a bound on `X`.
    ExplicitMember,
}

impl Scope {
    pub fn as_str(self) -> &'static str {
        match self {
            Scope::Global => "global",
            Scope::AtP => "at-P",
            Scope::AwayFromP => "away-from-P",
            Scope::Surface => "surface",
            Scope::ExplicitMember => "explicit-member",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundKind {
    /// `delta >= value`, or `delta > value` when strict.
    Lower { strict: bool },
    /// `delta <= value`.
    Upper,
    /// `delta = value`.
    Exact,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::Lower { strict: false } => ">=",
            BoundKind::Lower { strict: true } => ">",
            BoundKind::Upper => "<=",
            BoundKind::Exact => "=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub rule_id: &'static str,
    /// The statement applied, in words.
    pub reference: &'static str,
    /// The rule is a result proved elsewhere and used as a black box.
    pub external: bool,
    pub scope: Scope,
    pub kind: BoundKind,
    pub value: Q,
    pub hypotheses: Vec<Hypothesis>,
    pub inputs: Vec<(String, String)>,
    pub note: Option<String>,
}

impl TraceEntry {
    fn new(rule: &Rule, scope: Scope, kind: BoundKind, value: Q) -> Self {
        Self {
            rule_id: rule.id,
            reference: rule.reference,
            external: rule.external,
            scope,
            kind,
            value,
            hypotheses: Vec::new(),
            inputs: Vec::new(),
            note: None,
        }
    }

    fn hyp(mut self, h: Vec<Hypothesis>) -> Self {
        self.hypotheses = h;
        self
    }

    fn input(mut self, key: &str, value: impl ToString) -> Self {
        self.inputs.push((key.to_string(), value.to_string()));
        self
    }

    fn note(mut self, text: impl Into<String>) -> Self {
        self.note = Some(text.into());
        self
    }

    pub fn is_lower(&self) -> bool {
        matches!(self.kind, BoundKind::Lower { .. } | BoundKind::Exact)
    }

    pub fn is_upper(&self) -> bool {
        matches!(self.kind, BoundKind::Upper | BoundKind::Exact)
    }

    fn strict(&self) -> bool {
        matches!(self.kind, BoundKind::Lower { strict: true })
    }
}

pub struct Rule {
    pub id: &'static str,
    pub reference: &'static str,
    pub external: bool,
}

macro_rules! rule {
    ($name:ident, $id:expr, $ext:expr, $text:expr) => {
        pub const $name: Rule = Rule { id: $id, reference: $text, external: $ext };
    };
}

pub mod rules {
    use super::Rule;

    rule!(
        ONE_WEIGHT_INDEX_ONE,
        "one-weight-index-one",
        false,
        "X_d in P(1^{n+1},a), a >= 2, n >= 3, index 1: delta(X;O(1)) >= (n+1)/n"
    );
    rule!(
        TWO_WEIGHTS_INDEX_ONE,
        "two-weights-index-one",
        false,
        "X_d in P(1^n,a,b), 2 <= a <= b, n >= 3, index 1: delta(X;O(1)) >= (n+1)/(n+1/a)"
    );
    rule!(
        TWO_WEIGHTS_DEGREE,
        "two-weights-degree",
        false,
        "X_d in P(1^n,a_n,a_{n+1}), a_n <= a_{n+1}, n >= 2, d >= a_{n+1}+2: delta(X;O(1)) >= (n+1)a_n/d"
    );
    rule!(
        DIVISIBLE_WEIGHT,
        "divisible-weight",
        true,
        "external: some weight a_r > 1 divides d: delta(X;O(1)) >= (n+1)a_r/d"
    );
    rule!(
        DIVISIBLE_TOP_WEIGHT,
        "divisible-top-weight",
        true,
        "external: X_{kb} in P(1^n,a,b): delta(X;O(1)) >= (n+1)/k"
    );
    rule!(B1_TOP_POINT, "b1-top-point", false,
        "B_1 in X, n >= 3, d > a_{n+1}+1: delta_p >= (n+1)a_{n+1}/d for p != P, delta_P >= max{(n+1)a_n/d, (n+1)/(d-a_{n+1})}, so delta(X;O(1)) >= (n+1)/(d-a_{n+1})");
    rule!(
        ONE_WEIGHT_DEGREE_GAP,
        "one-weight-degree-gap",
        false,
        "X_d in P(1^{n+1},a), a >= 2, n >= 3, d >= a+2: delta(X;O(1)) >= (n+1)/(d-a)"
    );
    rule!(
        SMOOTH_POINTS,
        "smooth-points",
        false,
        "X_d in P(1^{n+1},b), n >= 2, d > 1, P in X: delta_p(X;O(1)) >= (n+1)b/d for p != P"
    );
    rule!(ECKARDT_POINT, "eckardt-point", false,
        "generalized Eckardt point P on X_{ak+1} in P(1^{n+1},a): delta_P >= min{n(n+1)/(ak+n), (ak+1)(n+1)/(2ak+1)}, with equality n(n+1)/(ak+n) when ak+1 >= n; delta(X;O(1)) <= n(n+1)/(ak+n)");
    rule!(
        ECKARDT_UNSTABLE,
        "eckardt-unstable",
        false,
        "generalized Eckardt point, a >= 2, n > a^2 k(k-1)/(a-1): delta(X) <= n(n+1)/((n+a-ak)(ak+n)) < 1"
    );
    rule!(SURFACE_SINGULAR, "surface-singular", false,
        "n = 3, X_{ak+1} in P(1^4,a), m <= k-1: a general S in |O_X(1)| through P has delta_P(S;O(1)) >= 3((m+1)a+1)/((ma+1)d); cutting by S gives delta_P(X;O(1)) >= min{4, (4/3) delta_P(S;O(1))}");
    rule!(SURFACE_BIG_DEGREE, "surface-big-degree", false,
        "n = 3, X_d in P(1^4,a), d >= (ma+1)^2: delta_P(S;O(1)) >= 3(ma+1)/d; cutting by S gives delta_P(X;O(1)) >= min{4, (4/3) delta_P(S;O(1))}");
    rule!(COMBINE_POINTS, "combine-points", false, "delta(X;O(1)) = min{delta_P, inf over p != P of delta_p}");
    rule!(MANY_ONES_EXPLICIT, "many-ones-explicit", false,
        "n >= 3, c_1 >= (n+2)/2, 2 <= a_{c_1}, d = k_i a_i + 1 with k_i >= 2, index 1: the member sum x_i^d + sum x_j x_{c_1+j}^{k_{c_1+j}} has delta(X;O(1)) > 1");
    rule!(
        MANY_ONES_GENERAL,
        "many-ones-general",
        false,
        "same hypotheses, X general in |O(d)|: delta(X;O(1)) > 1 by openness of K-stability"
    );
}

/// Flags after consistency checks and derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resolved {
    pub b1: B1Derivation,
    /// `Some` exactly when the datum has the shape `X_{ak+1}` in
    /// `P(1^{n+1},a)` with `a >= 2` and the flags settle the question.
    pub eckardt: Option<bool>,
    pub m: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarization {
    O1,
    Anticanonical,
}

impl Polarization {
    pub fn as_str(self) -> &'static str {
        match self {
            Polarization::O1 => "O(1)",
            Polarization::Anticanonical => "anticanonical",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    KStable,
    KUnstable,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::KStable => "K-stable",
            Verdict::KUnstable => "K-unstable",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaCertificate {
    pub polarization: Polarization,
    pub index: i64,
    /// Best certified lower bound; `0` when no rule fires.
    pub bound: Q,
    /// The lower bound is strict.
    pub strict: bool,
    /// Best certified upper bound, if any.
    pub upper: Option<Q>,
    pub verdict: Verdict,
    /// Rule providing `bound`.
    pub bound_rule: Option<&'static str>,
    pub resolved: Resolved,
    pub trace: Vec<TraceEntry>,
}

impl DeltaCertificate {
    fn scale(&self, factor: &Q, polarization: Polarization) -> Self {
        let mut out = self.clone();
        out.polarization = polarization;
        out.bound = &self.bound * factor;
        out.upper = self.upper.as_ref().map(|u| u * factor);
        out
    }

    /// Divides every bound by the index; a no-op when already converted.
    pub fn to_anticanonical(&self) -> Self {
        match self.polarization {
            Polarization::Anticanonical => self.clone(),
            Polarization::O1 => self.scale(&(Q::one() / qi(self.index)), Polarization::Anticanonical),
        }
    }

    pub fn to_o1(&self) -> Self {
        match self.polarization {
            Polarization::O1 => self.clone(),
            Polarization::Anticanonical => self.scale(&qi(self.index), Polarization::O1),
        }
    }

    pub fn fired_rules(&self) -> Vec<&'static str> {
        let mut ids: Vec<&'static str> = Vec::new();
        for e in &self.trace {
            if !ids.contains(&e.rule_id) {
                ids.push(e.rule_id);
            }
        }
        ids
    }
}

fn resolve(datum: &FanoDatum) -> Result<Resolved> {
    let flags = datum.flags();
    let derived = derive_b1(datum);
    let b1 = match (flags.b1_in_x, derived.status) {
        (B1Status::Unknown, _) => derived,
        (asserted, B1Status::Unknown) => B1Derivation {
            status: asserted,
            rule: Some("asserted"),
            reason: format!("asserted by the caller ({})", derived.reason),
        },
        (asserted, found) if asserted == found => derived,
        (asserted, _) => {
            return Err(Error::Precondition(format!(
                "asserted b1_in_x = {asserted} contradicts {}: {}",
                derived.rule.unwrap_or("derivation"),
                derived.reason
            )))
        }
    };

    let eckardt_shape = match datum.single_big_weight() {
        Some(a) if a >= 2 && datum.degree() % a == 1 => Some((a, datum.degree() / a)),
        _ => None,
    };
    let mut eckardt = flags.eckardt_at_p;
    let mut m = flags.m;
    if (eckardt == Some(true) || m.is_some()) && eckardt_shape.is_none() {
        return pre("the Eckardt data needs X_{ak+1} in P(1^{n+1},a) with a >= 2");
    }
    if let Some((_, k)) = eckardt_shape {
        if let Some(mv) = m {
            if mv == 0 || mv > k {
                return Err(Error::Precondition(format!("m = {mv} must lie in 1..={k}")));
            }
            match eckardt {
                Some(true) if mv != k => {
                    return Err(Error::Precondition(format!("eckardt_at_P needs m = k = {k}, got m = {mv}")))
                }
                Some(false) if mv == k => {
                    return pre("m = k is the generalized Eckardt case but eckardt_at_P is false")
                }
                _ => {}
            }
        }
        if flags.general_member && k >= 2 {
            if eckardt == Some(true) || m.is_some_and(|x| x != 1) {
                return pre("a general member has m = 1, so it is not a generalized Eckardt point");
            }
            m = Some(1);
        }
        if k == 1 {
            // with k = 1 the divisibility condition is empty
            m = Some(1);
            if eckardt == Some(false) {
                return pre("for d = a+1 every member is a generalized Eckardt case");
            }
        }
        eckardt = eckardt.or(m.map(|x| x == k));
    }
    Ok(Resolved { b1, eckardt, m })
}

struct Ctx<'a> {
    datum: &'a FanoDatum,
    resolved: &'a Resolved,
    n: u64,
    d: u64,
    nq: Q,
    dq: Q,
}

fn frac(num: Q, den: Q) -> Q {
    num / den
}

fn rule_one_weight_index_one(c: &Ctx, out: &mut Vec<TraceEntry>) -> Result<()> {
    let Some(a) = c.datum.single_big_weight() else { return Ok(()) };
    if a < 2 || c.n < 3 || c.datum.index() != 1 {
        return Ok(());
    }
    let value = frac(&c.nq + qi(1), c.nq.clone());
    let via = frac(&c.nq + qi(1), qu(c.d - a));
    if via != value {
        return Err(Error::Invariant(format!("degree-gap route gives {} instead of {}", fmt_q(&via), fmt_q(&value))));
    }
    out.push(
        TraceEntry::new(&rules::ONE_WEIGHT_INDEX_ONE, Scope::Global, BoundKind::Lower { strict: false }, value)
            .hyp(vec![
                Hypothesis::DimensionAtLeast(3),
                Hypothesis::OnesCount(c.n as usize + 1),
                Hypothesis::WeightAtLeast { position: c.n as usize + 1, min: 2 },
                Hypothesis::IndexIs(1),
                Hypothesis::QuasiSmooth,
            ])
            .input("n", c.n)
            .input("a", a)
            .input("d", c.d)
            .note("d = n+a, so the degree-gap bound (n+1)/(d-a) equals (n+1)/n"),
    );
    Ok(())
}

fn rule_two_weights_index_one(c: &Ctx, out: &mut Vec<TraceEntry>) -> Result<()> {
    let Some((a, b)) = c.datum.two_big_weights() else { return Ok(()) };
    if a < 2 || c.n < 3 || c.datum.index() != 1 {
        return Ok(());
    }
    let aq = qu(a);
    let value = &aq * (&c.nq + qi(1)) / (&aq * &c.nq + qi(1));
    let (route, support) = if c.d.is_multiple_of(b) {
        let k = c.d / b;
        ("top weight divides d", frac(&c.nq + qi(1), qu(k)))
    } else {
        ("two-weight degree bound", frac((&c.nq + qi(1)) * &aq, c.dq.clone()))
    };
    if support < value {
        return Err(Error::Invariant(format!("{route} gives {} below {}", fmt_q(&support), fmt_q(&value))));
    }
    out.push(
        TraceEntry::new(&rules::TWO_WEIGHTS_INDEX_ONE, Scope::Global, BoundKind::Lower { strict: false }, value)
            .hyp(vec![
                Hypothesis::DimensionAtLeast(3),
                Hypothesis::OnesCount(c.n as usize),
                Hypothesis::WeightAtLeast { position: c.n as usize, min: 2 },
                Hypothesis::IndexIs(1),
                Hypothesis::QuasiSmooth,
            ])
            .input("n", c.n)
            .input("a", a)
            .input("b", b)
            .input("d", c.d)
            .note(format!("route: {route}, giving {}", fmt_q(&support))),
    );
    Ok(())
}

fn rule_two_weights_degree(c: &Ctx, out: &mut Vec<TraceEntry>) {
    let n = c.n as usize;
    if c.datum.c1() < n || c.n < 2 {
        return;
    }
    let (an, an1) = (c.datum.a(n), c.datum.a(n + 1));
    if c.d < an1 + 2 {
        return;
    }
    let value = frac((&c.nq + qi(1)) * qu(an), c.dq.clone());
    out.push(
        TraceEntry::new(&rules::TWO_WEIGHTS_DEGREE, Scope::Global, BoundKind::Lower { strict: false }, value)
            .hyp(vec![
                Hypothesis::DimensionAtLeast(2),
                Hypothesis::OnesAtLeast(n),
                Hypothesis::DegreeAtLeast(an1 + 2),
                Hypothesis::QuasiSmooth,
            ])
            .input("n", c.n)
            .input("a_n", an)
            .input("a_{n+1}", an1)
            .input("d", c.d),
    );
}

fn rule_divisible_weight(c: &Ctx, out: &mut Vec<TraceEntry>) {
    let Some(&w) = c.datum.big_weights().iter().rev().find(|&&w| c.d.is_multiple_of(w)) else { return };
    let value = frac((&c.nq + qi(1)) * qu(w), c.dq.clone());
    out.push(
        TraceEntry::new(&rules::DIVISIBLE_WEIGHT, Scope::Global, BoundKind::Lower { strict: false }, value)
            .hyp(vec![Hypothesis::WeightDividesDegree(w), Hypothesis::QuasiSmooth])
            .input("n", c.n)
            .input("a_r", w)
            .input("d", c.d),
    );
}

fn rule_divisible_top_weight(c: &Ctx, out: &mut Vec<TraceEntry>) {
    let Some((a, b)) = c.datum.two_big_weights() else { return };
    if a < 2 || c.n < 3 || c.datum.index() != 1 || !c.d.is_multiple_of(b) {
        return;
    }
    let k = c.d / b;
    out.push(
        TraceEntry::new(
            &rules::DIVISIBLE_TOP_WEIGHT,
            Scope::Global,
            BoundKind::Lower { strict: false },
            frac(&c.nq + qi(1), qu(k)),
        )
        .hyp(vec![
            Hypothesis::DimensionAtLeast(3),
            Hypothesis::OnesCount(c.n as usize),
            Hypothesis::WeightAtLeast { position: c.n as usize, min: 2 },
            Hypothesis::WeightDividesDegree(b),
            Hypothesis::IndexIs(1),
            Hypothesis::QuasiSmooth,
        ])
        .input("n", c.n)
        .input("b", b)
        .input("k", k),
    );
}

/// The three-term minimum for the reduced case `P(1^{n+1}, a)` with
/// `d = ka + 1`, recomputed without the case analysis.
pub fn top_point_three_term(n: u64, a: u64, k: u64) -> [Q; 3] {
    let (nq, ak) = (qu(n), qu(a * k));
    [
        frac(&nq + qi(1), qu((k - 1) * a + 1)),
        frac(&nq * (&nq + qi(1)), &ak + &nq),
        frac((&ak + qi(1)) * (&nq + qi(1)), qi(2) * &ak + qi(1)),
    ]
}

fn rule_b1_top_point(c: &Ctx, out: &mut Vec<TraceEntry>) {
    let n = c.n as usize;
    let top = c.datum.top();
    if c.n < 3 || top < 2 || c.d <= top + 1 || c.resolved.b1.status != B1Status::Yes {
        return;
    }
    if c.d % top != 1 {
        return;
    }
    let an = c.datum.a(n);
    let k = (c.d - 1) / top;
    let hyps = vec![
        Hypothesis::DimensionAtLeast(3),
        Hypothesis::WeightAtLeast { position: n + 1, min: 2 },
        Hypothesis::DegreeAtLeast(top + 2),
        Hypothesis::B1InX(true),
        Hypothesis::QuasiSmooth,
    ];
    let n1 = &c.nq + qi(1);
    let away = frac(&n1 * qu(top), c.dq.clone());
    let stated = frac(n1.clone(), qu(c.d - top));
    let terms = top_point_three_term(c.n, top, k);
    let three = terms.iter().cloned().reduce(min_q).expect("three terms");
    let local = frac(&n1 * qu(an), c.dq.clone());
    let at_p = max_q(local.clone(), three.clone());
    let rederived_global = min_q(away.clone(), at_p.clone());

    let three_note = if three == stated {
        format!("three-term minimum {} equals (n+1)/(d-a_{{n+1}})", fmt_q(&three))
    } else {
        format!(
            "three-term minimum {} differs from (n+1)/(d-a_{{n+1}}) = {}; the minimum is used",
            fmt_q(&three),
            fmt_q(&stated)
        )
    };
    let terms_text = terms.iter().map(fmt_q).collect::<Vec<_>>().join(", ");
    out.push(
        TraceEntry::new(&rules::B1_TOP_POINT, Scope::AwayFromP, BoundKind::Lower { strict: false }, away.clone())
            .hyp(hyps.clone())
            .input("n", c.n)
            .input("a_{n+1}", top)
            .input("d", c.d),
    );
    out.push(
        TraceEntry::new(&rules::B1_TOP_POINT, Scope::AtP, BoundKind::Lower { strict: false }, at_p)
            .hyp(hyps.clone())
            .input("n", c.n)
            .input("a_n", an)
            .input("a_{n+1}", top)
            .input("k", k)
            .input("three_terms", terms_text)
            .note(three_note),
    );
    let (global, note) = if stated <= rederived_global {
        (
            stated.clone(),
            format!("local bounds combine to {}, at least the stated {}", fmt_q(&rederived_global), fmt_q(&stated)),
        )
    } else {
        (
            rederived_global.clone(),
            format!(
                "local bounds combine to {} below the stated {}; the combination is used",
                fmt_q(&rederived_global),
                fmt_q(&stated)
            ),
        )
    };
    out.push(
        TraceEntry::new(&rules::B1_TOP_POINT, Scope::Global, BoundKind::Lower { strict: false }, global)
            .hyp(hyps)
            .input("n", c.n)
            .input("a_{n+1}", top)
            .input("d", c.d)
            .note(note),
    );
}

fn rule_one_weight_degree_gap(c: &Ctx, out: &mut Vec<TraceEntry>) {
    let Some(a) = c.datum.single_big_weight() else { return };
    if a < 2 || c.n < 3 || c.d < a + 2 {
        return;
    }
    out.push(
        TraceEntry::new(
            &rules::ONE_WEIGHT_DEGREE_GAP,
            Scope::Global,
            BoundKind::Lower { strict: false },
            frac(&c.nq + qi(1), qu(c.d - a)),
        )
        .hyp(vec![
            Hypothesis::DimensionAtLeast(3),
            Hypothesis::OnesCount(c.n as usize + 1),
            Hypothesis::WeightAtLeast { position: c.n as usize + 1, min: 2 },
            Hypothesis::DegreeAtLeast(a + 2),
            Hypothesis::QuasiSmooth,
        ])
        .input("n", c.n)
        .input("a", a)
        .input("d", c.d),
    );
}

fn rule_smooth_points(c: &Ctx, out: &mut Vec<TraceEntry>) {
    let Some(b) = c.datum.single_big_weight() else { return };
    if b < 2 || c.n < 2 || c.d <= 1 || c.d % b != 1 {
        return;
    }
    out.push(
        TraceEntry::new(
            &rules::SMOOTH_POINTS,
            Scope::AwayFromP,
            BoundKind::Lower { strict: false },
            frac((&c.nq + qi(1)) * qu(b), c.dq.clone()),
        )
        .hyp(vec![
            Hypothesis::DimensionAtLeast(2),
            Hypothesis::OnesCount(c.n as usize + 1),
            Hypothesis::WeightAtLeast { position: c.n as usize + 1, min: 2 },
            Hypothesis::DegreeResidue { modulus: b, residue: 1 },
            Hypothesis::QuasiSmooth,
        ])
        .input("n", c.n)
        .input("b", b)
        .input("d", c.d)
        .note("P lies on X since d = 1 mod b"),
    );
}

fn rule_eckardt(c: &Ctx, out: &mut Vec<TraceEntry>) -> Result<()> {
    if c.resolved.eckardt != Some(true) {
        return Ok(());
    }
    let a = c.datum.top();
    let k = (c.d - 1) / a;
    let n = c.n as u32;
    let e = delta_eckardt(n, a, k)?;
    let hyps = vec![
        Hypothesis::OnesCount(c.n as usize + 1),
        Hypothesis::WeightAtLeast { position: c.n as usize + 1, min: 2 },
        Hypothesis::DegreeResidue { modulus: a, residue: 1 },
        Hypothesis::EckardtAtP(true),
        Hypothesis::QuasiSmooth,
    ];
    let kind = if e.exact { BoundKind::Exact } else { BoundKind::Lower { strict: false } };
    out.push(
        TraceEntry::new(&rules::ECKARDT_POINT, Scope::AtP, kind, e.lower.clone())
            .hyp(hyps.clone())
            .input("n", c.n)
            .input("a", a)
            .input("k", k)
            .note(if e.exact { "ak+1 >= n: the bound is the exact value" } else { "ak+1 < n: lower bound only" }),
    );
    out.push(
        TraceEntry::new(&rules::ECKARDT_POINT, Scope::Global, BoundKind::Upper, e.upper.clone())
            .hyp(hyps.clone())
            .input("n", c.n)
            .input("a", a)
            .input("k", k)
            .note("A(E)/S(E) for the weighted blowup at P"),
    );
    if a >= 2 && c.datum.index() > 0 {
        let check = unstable_check(n, a, k)?;
        if let UnstableVerdict::KUnstable { witness } = &check.verdict {
            let mut h = hyps;
            h.push(Hypothesis::Compare {
                what: "a^2 k(k-1)/(a-1) < n".into(),
                lhs: check.threshold.clone(),
                rhs: c.nq.clone(),
                strict: true,
            });
            out.push(
                TraceEntry::new(&rules::ECKARDT_UNSTABLE, Scope::Global, BoundKind::Upper, e.upper)
                    .hyp(h)
                    .input("n", c.n)
                    .input("a", a)
                    .input("k", k)
                    .input("index", check.index)
                    .input("threshold", fmt_q(&check.threshold))
                    .input("anticanonical_witness", fmt_q(witness)),
            );
        }
    }
    Ok(())
}

fn rule_surfaces(c: &Ctx, out: &mut Vec<TraceEntry>) -> Result<()> {
    if c.n != 3 || c.resolved.eckardt != Some(false) {
        return Ok(());
    }
    let (Some(a), Some(m)) = (c.datum.single_big_weight(), c.resolved.m) else { return Ok(()) };
    let k = (c.d - 1) / a;
    if m + 1 > k {
        return Ok(());
    }
    let sb = delta_surface_bounds(a, m, c.d)?;
    let four = qi(4);
    let lift = |s: &Q| min_q(four.clone(), qi(4) * s / qi(3));
    let base = vec![
        Hypothesis::DimensionIs(3),
        Hypothesis::OnesCount(4),
        Hypothesis::WeightAtLeast { position: 4, min: 2 },
        Hypothesis::DegreeResidue { modulus: a, residue: 1 },
        Hypothesis::EckardtAtP(false),
        Hypothesis::EckardtIndexAtMost(k - 1),
        Hypothesis::QuasiSmooth,
    ];
    for (rule, bound, extra) in [
        (&rules::SURFACE_SINGULAR, &sb.singular, None),
        (&rules::SURFACE_BIG_DEGREE, &sb.dbig, Some(Hypothesis::DegreeAtLeast((m * a + 1) * (m * a + 1)))),
    ] {
        if !bound.applicable {
            continue;
        }
        let mut h = base.clone();
        h.extend(extra);
        for (scope, value) in [(Scope::Surface, bound.value.clone()), (Scope::AtP, lift(&bound.value))] {
            out.push(
                TraceEntry::new(rule, scope, BoundKind::Lower { strict: false }, value)
                    .hyp(h.clone())
                    .input("a", a)
                    .input("m", m)
                    .input("d", c.d),
            );
        }
    }
    Ok(())
}

/// Hypotheses of the explicit family with `c_1` weight-one coordinates.
fn many_ones_applies(datum: &FanoDatum) -> bool {
    let n = datum.n() as usize;
    let c1 = datum.c1();
    let d = datum.degree();
    n >= 3
        && 2 * c1 >= n + 2
        && c1 <= n + 1
        && datum.index() == 1
        && datum.big_weights().iter().all(|&w| d % w == 1 && (d - 1) / w >= 2)
}

/// `delta(X;O(1))` lower bound for the explicit member of the family.
pub fn many_ones_explicit_bound(datum: &FanoDatum) -> Option<Q> {
    if !many_ones_applies(datum) {
        return None;
    }
    let n = datum.n() as u64;
    let nq = qu(n);
    let d = datum.degree();
    let dq = qu(d);
    let top = datum.top();
    let an = datum.a(n as usize);
    let n1 = &nq + qi(1);
    let away = &n1 * qu(top) / &dq;
    let k = (d - 1) / top;
    let three = top_point_three_term(n, top, k).into_iter().reduce(min_q).expect("three terms");
    let cover = min_q(&nq * &n1 / (&dq + &nq - qi(1)), &dq * &n1 / (qi(2) * &dq - qi(1)));
    let at_p = max_q(max_q(&n1 * qu(an) / &dq, three), cover);
    Some(min_q(away, at_p))
}

fn rule_many_ones(c: &Ctx, out: &mut Vec<TraceEntry>) -> Result<()> {
    if !c.datum.flags().general_member || !many_ones_applies(c.datum) {
        return Ok(());
    }
    let explicit = many_ones_explicit_bound(c.datum).expect("hypotheses checked");
    if explicit <= Q::one() {
        return Err(Error::Invariant(format!("explicit member bound {} is not above 1", fmt_q(&explicit))));
    }
    let n = c.n as usize;
    let mut hyps = vec![
        Hypothesis::DimensionAtLeast(3),
        Hypothesis::OnesAtLeast(n.div_ceil(2) + 1),
        Hypothesis::IndexIs(1),
        Hypothesis::QuasiSmooth,
    ];
    let mut distinct: Vec<u64> = c.datum.big_weights().to_vec();
    distinct.dedup();
    for &w in &distinct {
        hyps.push(Hypothesis::DegreeResidue { modulus: w, residue: 1 });
        hyps.push(Hypothesis::DegreeAtLeast(2 * w + 1));
    }
    out.push(
        TraceEntry::new(
            &rules::MANY_ONES_EXPLICIT,
            Scope::ExplicitMember,
            BoundKind::Lower { strict: false },
            explicit.clone(),
        )
        .hyp(hyps.clone())
        .input("n", c.n)
        .input("c_1", c.datum.c1())
        .input("d", c.d),
    );
    hyps.push(Hypothesis::GeneralMember);
    out.push(
        TraceEntry::new(&rules::MANY_ONES_GENERAL, Scope::Global, BoundKind::Lower { strict: true }, Q::one())
            .hyp(hyps)
            .input("n", c.n)
            .input("c_1", c.datum.c1())
            .input("d", c.d)
            .note(format!(
                "the explicit member has delta(X;O(1)) >= {}; openness gives delta > 1 for a general member",
                fmt_q(&explicit)
            )),
    );
    Ok(())
}

/// Lexicographic on `(value, strict)`.
fn better(a: (&Q, bool), b: (&Q, bool)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && a.1 && !b.1)
}

/// Runs every rule and assembles the best certificate for `O_X(1)`.
pub fn certify(datum: &FanoDatum) -> Result<DeltaCertificate> {
    let index = datum.index();
    if index <= 0 {
        return Err(Error::Precondition(format!("{} is not Fano: index sum a_i - d = {index}", datum.label())));
    }
    if !datum.flags().quasi_smooth {
        return pre("certify needs a quasi-smooth hypersurface; assert quasi_smooth");
    }
    let w = datum.weights();
    if !general_member_quasi_smooth(w, datum.degree(), MemberFamily::All) {
        return Err(Error::Precondition(format!(
            "no member of degree {} in {} is quasi-smooth",
            datum.degree(),
            datum.ambient().compact()
        )));
    }
    let resolved = resolve(datum)?;
    if resolved.b1.status == B1Status::Yes
        && !general_member_quasi_smooth(w, datum.degree(), MemberFamily::ContainingB1)
    {
        return Err(Error::Precondition("no quasi-smooth member of this degree contains B_1".into()));
    }

    let ctx = Ctx {
        datum,
        resolved: &resolved,
        n: datum.n() as u64,
        d: datum.degree(),
        nq: qu(datum.n() as u64),
        dq: qu(datum.degree()),
    };
    let mut trace = Vec::new();
    rule_one_weight_index_one(&ctx, &mut trace)?;
    rule_two_weights_index_one(&ctx, &mut trace)?;
    rule_two_weights_degree(&ctx, &mut trace);
    rule_divisible_weight(&ctx, &mut trace);
    rule_divisible_top_weight(&ctx, &mut trace);
    rule_b1_top_point(&ctx, &mut trace);
    rule_one_weight_degree_gap(&ctx, &mut trace);
    rule_smooth_points(&ctx, &mut trace);
    rule_eckardt(&ctx, &mut trace)?;
    rule_surfaces(&ctx, &mut trace)?;
    rule_many_ones(&ctx, &mut trace)?;

    combine_points(&mut trace)?;

    let mut bound = Q::zero();
    let mut strict = false;
    let mut bound_rule = None;
    for e in trace.iter().filter(|e| e.scope == Scope::Global && e.is_lower()) {
        if bound_rule.is_none() || better((&e.value, e.strict()), (&bound, strict)) {
            bound = e.value.clone();
            strict = e.strict();
            bound_rule = Some(e.rule_id);
        }
    }
    let upper = trace
        .iter()
        .filter(|e| matches!(e.scope, Scope::Global | Scope::AtP) && e.is_upper())
        .map(|e| e.value.clone())
        .reduce(min_q);
    if let Some(u) = &upper {
        if &bound > u || (strict && &bound == u) {
            return Err(Error::Invariant(format!("lower bound {} exceeds upper bound {}", fmt_q(&bound), fmt_q(u))));
        }
    }

    let idx = qi(index);
    let lower_ac = &bound / &idx;
    let stable = lower_ac > Q::one() || (lower_ac == Q::one() && strict);
    let unstable = upper.as_ref().is_some_and(|u| u / &idx < Q::one());
    let verdict = match (stable, unstable) {
        (true, true) => {
            return Err(Error::Invariant("both K-stable and K-unstable certified".into()));
        }
        (true, false) => Verdict::KStable,
        (false, true) => Verdict::KUnstable,
        (false, false) => Verdict::Inconclusive,
    };
    let unstable_fired = trace.iter().any(|e| e.rule_id == rules::ECKARDT_UNSTABLE.id);
    if unstable_fired != (verdict == Verdict::KUnstable) {
        return Err(Error::Invariant("instability criterion and upper bound disagree".into()));
    }
    Ok(DeltaCertificate {
        polarization: Polarization::O1,
        index,
        bound,
        strict,
        upper,
        verdict,
        bound_rule,
        resolved,
        trace,
    })
}

/// Turns the best bound at `P` and the best bound away from `P` into a
/// global entry. An exact value at `P` outranks the inequalities there.
fn combine_points(trace: &mut Vec<TraceEntry>) -> Result<()> {
    let best = |scope: Scope, t: &[TraceEntry]| -> Option<(Q, &'static str)> {
        let mut out: Option<(Q, &'static str)> = None;
        for e in t.iter().filter(|e| e.scope == scope && e.is_lower()) {
            if out.as_ref().is_none_or(|(v, _)| &e.value > v) {
                out = Some((e.value.clone(), e.rule_id));
            }
        }
        out
    };
    let exact = trace
        .iter()
        .find(|e| e.scope == Scope::AtP && e.kind == BoundKind::Exact)
        .map(|e| (e.value.clone(), e.rule_id));
    if let Some((v, _)) = &exact {
        if let Some(e) = trace.iter().find(|e| e.scope == Scope::AtP && e.is_lower() && &e.value > v) {
            return Err(Error::Invariant(format!(
                "{} gives {} above the exact value {} at P",
                e.rule_id,
                fmt_q(&e.value),
                fmt_q(v)
            )));
        }
    }
    let at_p = exact.or_else(|| best(Scope::AtP, trace));
    let away = best(Scope::AwayFromP, trace);
    if let (Some((p, pr)), Some((q, qr))) = (at_p, away) {
        let value = min_q(p.clone(), q.clone());
        trace.push(
            TraceEntry::new(&rules::COMBINE_POINTS, Scope::Global, BoundKind::Lower { strict: false }, value)
                .input("at_P", format!("{} ({pr})", fmt_q(&p)))
                .input("away_from_P", format!("{} ({qr})", fmt_q(&q))),
        );
    }
    Ok(())
}

/// Replays every recorded hypothesis against the datum.
pub fn replay(datum: &FanoDatum, cert: &DeltaCertificate) -> Vec<(usize, Hypothesis)> {
    let mut failures = Vec::new();
    for (i, e) in cert.trace.iter().enumerate() {
        for h in &e.hypotheses {
            if !h.holds(datum, &cert.resolved) {
                failures.push((i, h.clone()));
            }
        }
    }
    failures
}

/// How the degree of each enumerated row is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegreeRule {
    /// `d = sum a_i - index`.
    Index(i64),
    /// `d = k a_{n+1} + 1`.
    TopMultiplePlusOne(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationSpec {
    pub n: u32,
    pub max_weight: u64,
    pub degree: DegreeRule,
    /// Keep only rows with exactly this many weights `> 1`.
    pub big_weights: Option<usize>,
    /// Flags applied to every row.
    pub flags: Flags,
}

pub const MAX_ENUMERATION_DIMENSION: u32 = 32;
pub const MAX_ENUMERATION_WEIGHT: u64 = 64;
pub const MAX_ENUMERATION_CANDIDATES: u128 = 200_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumRow {
    pub datum: FanoDatum,
    pub certificate: DeltaCertificate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub rows: Vec<EnumRow>,
    /// Candidates rejected by a precondition, with the reason.
    pub skipped: Vec<(Vec<u64>, u64, String)>,
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Ascending weight vectors of length `len` with entries in `1..=max`.
fn multisets(len: usize, max: u64, big: Option<usize>) -> Vec<Vec<u64>> {
    fn go(len: usize, lo: u64, max: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for w in lo..=max {
            cur.push(w);
            go(len, w, max, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    match big {
        None => go(len, 1, max, &mut Vec::new(), &mut out),
        Some(h) => {
            if max >= 2 || h == 0 {
                let mut tails = Vec::new();
                if h > 0 {
                    go(h, 2, max, &mut Vec::new(), &mut tails);
                } else {
                    tails.push(Vec::new());
                }
                for t in tails {
                    let mut v = vec![1u64; len - h];
                    v.extend(t);
                    out.push(v);
                }
            }
        }
    }
    out
}

/// Certifies every well-formed, Fano, quasi-smooth candidate in
/// ascending lexicographic weight order. Rows are evaluated on up to
/// `threads` workers and returned in that order.
pub fn enumerate(spec: &EnumerationSpec, threads: usize) -> Result<Enumeration> {
    if spec.n == 0 || spec.n > MAX_ENUMERATION_DIMENSION {
        return Err(Error::Precondition(format!("n must lie in 1..={MAX_ENUMERATION_DIMENSION}")));
    }
    if spec.max_weight == 0 || spec.max_weight > MAX_ENUMERATION_WEIGHT {
        return Err(Error::Precondition(format!("max_weight must lie in 1..={MAX_ENUMERATION_WEIGHT}")));
    }
    let len = spec.n as usize + 2;
    if spec.big_weights.is_some_and(|h| h > len) {
        return pre("more weights > 1 requested than coordinates");
    }
    let count = match spec.big_weights {
        None => binomial(spec.max_weight as u128 + len as u128 - 1, len as u128),
        Some(0) => 1,
        Some(h) => binomial(spec.max_weight as u128 + h as u128 - 2, h as u128),
    };
    if count > MAX_ENUMERATION_CANDIDATES {
        return Err(Error::Precondition(format!("{count} candidates exceed the limit {MAX_ENUMERATION_CANDIDATES}")));
    }
    let mut candidates = Vec::new();
    for w in multisets(len, spec.max_weight, spec.big_weights) {
        let sum: u64 = w.iter().sum();
        let d = match spec.degree {
            DegreeRule::Index(i) => {
                let d = sum as i64 - i;
                if d < 2 {
                    continue;
                }
                d as u64
            }
            DegreeRule::TopMultiplePlusOne(k) => k * w[len - 1] + 1,
        };
        let wv = match WeightVector::new(w.clone()) {
            Ok(v) => v,
            Err(_) => continue,
        };
        if !wv.is_well_formed() || sum as i64 - d as i64 <= 0 {
            continue;
        }
        if !general_member_quasi_smooth(&w, d, MemberFamily::All) {
            continue;
        }
        candidates.push((w, d));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Invariant(format!("thread pool: {e}")))?;
    let results: Vec<(Vec<u64>, u64, Result<EnumRow>)> = pool.install(|| {
        candidates
            .par_iter()
            .map(|(w, d)| {
                let row = FanoDatum::new(w.clone(), *d, spec.flags.clone()).and_then(|datum| {
                    let certificate = certify(&datum)?;
                    Ok(EnumRow { datum, certificate })
                });
                (w.clone(), *d, row)
            })
            .collect()
    });
    let mut out = Enumeration { rows: Vec::new(), skipped: Vec::new() };
    for (w, d, r) in results {
        match r {
            Ok(row) => out.rows.push(row),
            Err(Error::Invariant(msg)) => return Err(Error::Invariant(msg)),
            Err(e) => out.skipped.push((w, d, e.to_string())),
        }
    }
    Ok(out)
}

//! Sparse weighted homogeneous polynomials over the rationals, strict
//! transforms under the standard weighted blowup and tiered
//! quasi-smoothness checks.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::blowup::{build, BiDegree, BlowupFrame};
use crate::error::{pre, Error, Result};
use crate::rat::{fmt_q, parse_q, qu, Q};
use crate::wps::WeightVector;

/// Exponent vector of a monomial.
pub type Mono = Vec<u32>;

/// Ordered term map; zero coefficients are never stored.
pub type Terms = BTreeMap<Mono, Q>;

fn add_term(terms: &mut Terms, m: Mono, c: Q) {
    if c.is_zero() {
        return;
    }
    let e = terms.entry(m.clone()).or_insert_with(Q::zero);
    *e += c;
    if e.is_zero() {
        terms.remove(&m);
    }
}

fn eval_terms(terms: &Terms, point: &[Q]) -> Q {
    let mut acc = Q::zero();
    for (m, c) in terms {
        let mut t = c.clone();
        for (x, &e) in point.iter().zip(m) {
            if e > 0 {
                t *= num_traits::pow(x.clone(), e as usize);
                if t.is_zero() {
                    break;
                }
            }
        }
        acc += t;
    }
    acc
}

fn partial_terms(terms: &Terms, i: usize) -> Terms {
    let mut out = Terms::new();
    for (m, c) in terms {
        if m[i] > 0 {
            let mut m2 = m.clone();
            m2[i] -= 1;
            add_term(&mut out, m2, c * qu(m[i] as u64));
        }
    }
    out
}

fn format_terms(terms: &Terms, names: &[String]) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (m, c)) in terms.iter().rev().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mut factors: Vec<String> = Vec::new();
        let is_const = m.iter().all(|&e| e == 0);
        if !a.is_one() || is_const {
            factors.push(fmt_q(&a));
        }
        for (i, &e) in m.iter().enumerate() {
            match e {
                0 => {}
                1 => factors.push(names[i].clone()),
                _ => factors.push(format!("{}^{}", names[i], e)),
            }
        }
        out.push_str(&factors.join("*"));
    }
    out
}

/// Parses `c*x0^e0*x1 - x2^3 + ...` with a caller-provided variable
/// resolver. Returns the term map.
fn parse_terms(
    text: &str,
    nvars: usize,
    resolve: &dyn Fn(&str) -> Option<usize>,
) -> Result<(Terms, Vec<(String, Mono)>)> {
    let cleaned: String = text.replace('−', "-").chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    if cleaned.contains('(') || cleaned.contains(')') {
        return Err(Error::Parse("parentheses are not supported; expand the polynomial".into()));
    }
    let mut pieces: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    for ch in cleaned.chars() {
        if (ch == '+' || ch == '-') && !cur.is_empty() && !cur.ends_with('^') && !cur.ends_with('*') {
            pieces.push((neg, std::mem::take(&mut cur)));
            neg = ch == '-';
        } else if (ch == '+' || ch == '-') && cur.is_empty() {
            if ch == '-' {
                neg = !neg;
            }
        } else {
            cur.push(ch);
        }
    }
    if cur.is_empty() {
        return Err(Error::Parse(format!("dangling sign in {text:?}")));
    }
    pieces.push((neg, cur));
    let mut terms = Terms::new();
    let mut raw = Vec::new();
    for (neg, piece) in pieces {
        let mut coeff = Q::one();
        let mut m = vec![0u32; nvars];
        for factor in piece.split('*') {
            if factor.is_empty() {
                return Err(Error::Parse(format!("empty factor in term {piece:?}")));
            }
            let first = factor.chars().next().expect("nonempty");
            if first.is_ascii_digit() || first == '.' {
                coeff *= parse_q(factor)?;
                continue;
            }
            let (name, exp) = match factor.split_once('^') {
                Some((n, e)) => (n, e.parse::<u32>().map_err(|_| Error::Parse(format!("bad exponent in {factor:?}")))?),
                None => (factor, 1),
            };
            let idx = resolve(name).ok_or_else(|| Error::Parse(format!("unknown variable {name:?}")))?;
            m[idx] += exp;
        }
        if neg {
            coeff = -coeff;
        }
        raw.push((piece.clone(), m.clone()));
        add_term(&mut terms, m, coeff);
    }
    Ok((terms, raw))
}

/// A weighted homogeneous polynomial on `P(a_0, ..., a_s)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseWPoly {
    ambient: WeightVector,
    terms: Terms,
    degree: u64,
}

impl SparseWPoly {
    /// Validates homogeneity; the zero polynomial is rejected.
    pub fn new(ambient: WeightVector, terms: Terms) -> Result<Self> {
        let terms: Terms = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        let n = ambient.len();
        let mut degree = None;
        for m in terms.keys() {
            if m.len() != n {
                return pre(format!("exponent vector of length {} on {} coordinates", m.len(), n));
            }
            let d: u64 = m.iter().zip(ambient.weights()).map(|(&e, &a)| e as u64 * a).sum();
            match degree {
                None => degree = Some(d),
                Some(d0) if d0 != d => {
                    return Err(Error::Inhomogeneous {
                        term: format_terms(&Terms::from([(m.clone(), Q::one())]), &x_names(n)),
                        found: d,
                        expected: d0,
                    })
                }
                _ => {}
            }
        }
        let degree = degree.ok_or_else(|| Error::Precondition("zero polynomial".into()))?;
        if degree == 0 {
            return pre("constant polynomial has degree 0");
        }
        Ok(Self { ambient, terms, degree })
    }

    /// Parses text in the variables `x0..xs`.
    pub fn parse(text: &str, ambient: &WeightVector) -> Result<Self> {
        let n = ambient.len();
        let resolve = |name: &str| -> Option<usize> {
            let i: usize = name.strip_prefix('x')?.parse().ok()?;
            (i < n).then_some(i)
        };
        let (terms, raw) = parse_terms(text, n, &resolve)?;
        // report the first raw term that breaks homogeneity
        let w = ambient.weights();
        let degs: Vec<u64> = raw.iter().map(|(_, m)| m.iter().zip(w).map(|(&e, &a)| e as u64 * a).sum()).collect();
        if let Some(p) = degs.iter().position(|&d| d != degs[0]) {
            return Err(Error::Inhomogeneous { term: raw[p].0.clone(), found: degs[p], expected: degs[0] });
        }
        Self::new(ambient.clone(), terms)
    }

    pub fn ambient(&self) -> &WeightVector {
        &self.ambient
    }

    pub fn terms(&self) -> &Terms {
        &self.terms
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn nvars(&self) -> usize {
        self.ambient.len()
    }

    pub fn eval(&self, point: &[Q]) -> Q {
        eval_terms(&self.terms, point)
    }

    /// `∂f/∂x_i` as a term map (it may be zero).
    pub fn partial(&self, i: usize) -> Terms {
        partial_terms(&self.terms, i)
    }

    pub fn gradient_at(&self, point: &[Q]) -> Vec<Q> {
        (0..self.nvars()).map(|i| eval_terms(&self.partial(i), point)).collect()
    }

    pub fn divisible_by(&self, i: usize) -> bool {
        self.terms.keys().all(|m| m[i] > 0)
    }

    /// `f(x_0, .., 0, .., x_s)` on `D_i`, over the remaining weights.
    pub fn restrict(&self, i: usize) -> Result<SparseWPoly> {
        let n = self.nvars();
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, len: n });
        }
        if self.divisible_by(i) {
            return pre(format!("x{i} divides f, so D_{i} is contained in X"));
        }
        let rest: Vec<u64> = (0..n).filter(|&j| j != i).map(|j| self.ambient.get(j)).collect();
        let wv = WeightVector::new(rest.clone()).map_err(|_| Error::NotWellFormed(rest.clone()))?;
        if !wv.is_well_formed() {
            return Err(Error::NotWellFormed(rest));
        }
        let mut terms = Terms::new();
        for (m, c) in &self.terms {
            if m[i] == 0 {
                let mut m2 = m.clone();
                m2.remove(i);
                add_term(&mut terms, m2, c.clone());
            }
        }
        Ok(SparseWPoly { ambient: wv, terms, degree: self.degree })
    }

    /// Weighted-degree slices in `x_i`: `f = sum_t x_i^t g_t`.
    pub fn slices_in(&self, i: usize) -> BTreeMap<u32, Terms> {
        let mut out: BTreeMap<u32, Terms> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            m2[i] = 0;
            add_term(out.entry(m[i]).or_default(), m2, c.clone());
        }
        out
    }
}

pub fn x_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

impl fmt::Display for SparseWPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_terms(&self.terms, &x_names(self.nvars())))
    }
}

/// A polynomial in the Cox ring of the blowup, variables ordered
/// `(x_0..x_r, y_{r+1}..y_s, z)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiGradedPoly {
    frame: BlowupFrame,
    terms: Terms,
    bidegree: BiDegree,
}

impl BiGradedPoly {
    pub fn new(frame: BlowupFrame, terms: Terms) -> Result<Self> {
        let terms: Terms = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        let n = frame.s() + 2;
        let mut bidegree = None;
        for m in terms.keys() {
            if m.len() != n {
                return pre(format!("exponent vector of length {} on {} Cox variables", m.len(), n));
            }
            let e: Vec<u64> = m.iter().map(|&x| x as u64).collect();
            let d = frame.monomial_degree(&e);
            match bidegree {
                None => bidegree = Some(d),
                Some(d0) if d0 != d => {
                    return pre(format!(
                        "term {} has bidegree ({},{}), expected ({},{})",
                        format_terms(&Terms::from([(m.clone(), Q::one())]), &cox_names(&frame)),
                        d.alpha,
                        d.beta,
                        d0.alpha,
                        d0.beta
                    ))
                }
                _ => {}
            }
        }
        let bidegree = bidegree.ok_or_else(|| Error::Precondition("zero polynomial".into()))?;
        Ok(Self { frame, terms, bidegree })
    }

    /// Parses text in `x0..xr, y<r+1>..ys, z`; a bare `y` is accepted when
    /// there is a single `y` variable.
    pub fn parse(text: &str, frame: &BlowupFrame) -> Result<Self> {
        let s = frame.s();
        let r = frame.r;
        let resolve = |name: &str| -> Option<usize> {
            if name == "z" {
                return Some(s + 1);
            }
            if name == "y" && r + 1 == s {
                return Some(s);
            }
            if let Some(i) = name.strip_prefix('x') {
                let i: usize = i.parse().ok()?;
                return (i <= r).then_some(i);
            }
            if let Some(j) = name.strip_prefix('y') {
                let j: usize = j.parse().ok()?;
                return (j > r && j <= s).then_some(j);
            }
            None
        };
        let (terms, _) = parse_terms(text, s + 2, &resolve)?;
        Self::new(frame.clone(), terms)
    }

    pub fn frame(&self) -> &BlowupFrame {
        &self.frame
    }

    pub fn terms(&self) -> &Terms {
        &self.terms
    }

    pub fn bidegree(&self) -> BiDegree {
        self.bidegree
    }

    pub fn nvars(&self) -> usize {
        self.frame.s() + 2
    }

    pub fn eval(&self, point: &[Q]) -> Q {
        eval_terms(&self.terms, point)
    }

    pub fn partial(&self, i: usize) -> Terms {
        partial_terms(&self.terms, i)
    }

    pub fn gradient_at(&self, point: &[Q]) -> Vec<Q> {
        (0..self.nvars()).map(|i| eval_terms(&self.partial(i), point)).collect()
    }

    pub fn divisible_by_z(&self) -> bool {
        let zi = self.frame.s() + 1;
        self.terms.keys().all(|m| m[zi] > 0)
    }

    /// Exponent of `z` in each term, in term order.
    pub fn z_exponents(&self) -> Vec<u32> {
        let zi = self.frame.s() + 1;
        let mut v: Vec<u32> = self.terms.keys().map(|m| m[zi]).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Substitutes `z = 1`, `y_j = x_j`, returning a polynomial on the base.
    pub fn collapse(&self) -> Result<SparseWPoly> {
        let s = self.frame.s();
        let mut terms = Terms::new();
        for (m, c) in &self.terms {
            add_term(&mut terms, m[..=s].to_vec(), c.clone());
        }
        SparseWPoly::new(self.frame.ambient.clone(), terms)
    }
}

pub fn cox_names(frame: &BlowupFrame) -> Vec<String> {
    let s = frame.s();
    let mut v: Vec<String> = (0..=frame.r).map(|i| format!("x{i}")).collect();
    v.extend((frame.r + 1..=s).map(|j| format!("y{j}")));
    v.push("z".into());
    v
}

impl fmt::Display for BiGradedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_terms(&self.terms, &cox_names(&self.frame)))
    }
}

/// Strict transform data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrictTransform {
    pub poly: BiGradedPoly,
    /// `d_0 = min deg'' I`.
    pub d0: u64,
    /// `d'_0 = max deg'' J`.
    pub d0p: u64,
}

pub fn strict_transform(f: &SparseWPoly, r: usize) -> Result<StrictTransform> {
    let frame = build(f.ambient(), r)?;
    strict_transform_in(f, &frame)
}

pub fn strict_transform_in(f: &SparseWPoly, frame: &BlowupFrame) -> Result<StrictTransform> {
    if frame.ambient != *f.ambient() {
        return pre("frame and polynomial live on different ambients");
    }
    let s = frame.s();
    let r = frame.r;
    let deg_i = |m: &Mono| -> u64 { (0..=r).map(|i| m[i] as u64 * frame.app[i]).sum() };
    let deg_j = |m: &Mono| -> u64 { (r + 1..=s).map(|j| m[j] as u64 * frame.app[j]).sum() };
    let d0 = f.terms().keys().map(deg_i).min().expect("nonzero polynomial");
    let d0p = f.terms().keys().map(deg_j).max().expect("nonzero polynomial");
    if frame.h * d0 + frame.hp * d0p != f.degree() {
        return Err(Error::Invariant(format!(
            "h d_0 + h' d'_0 = {} differs from d = {}",
            frame.h * d0 + frame.hp * d0p,
            f.degree()
        )));
    }
    let mut terms = Terms::new();
    for (m, c) in f.terms() {
        let di = deg_i(m) - d0;
        if di % frame.hp != 0 {
            return Err(Error::Invariant(format!("deg'' I - d_0 = {di} not divisible by h' = {}", frame.hp)));
        }
        let mut m2 = m.clone();
        m2.push((di / frame.hp) as u32);
        add_term(&mut terms, m2, c.clone());
    }
    let poly = BiGradedPoly::new(frame.clone(), terms)?;
    if poly.bidegree() != BiDegree::new(d0 as i64, d0p as i64) {
        return Err(Error::Invariant("strict transform has unexpected bidegree".into()));
    }
    if poly.divisible_by_z() {
        return Err(Error::Invariant("strict transform divisible by z".into()));
    }
    Ok(StrictTransform { poly, d0, d0p })
}

/// Outcome of a point check, with the gradient as witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointCheck {
    pub quasi_smooth: bool,
    pub gradient: Vec<Q>,
    /// First coordinate with a nonzero partial derivative.
    pub witness: Option<usize>,
}

fn point_check(value: Q, gradient: Vec<Q>) -> Result<PointCheck> {
    if !value.is_zero() {
        return pre(format!("point is not on the hypersurface (value {})", fmt_q(&value)));
    }
    let witness = gradient.iter().position(|g| !g.is_zero());
    Ok(PointCheck { quasi_smooth: witness.is_some(), gradient, witness })
}

/// Tier one: exact check at a homogeneous point of the affine cone.
pub fn qsm_at_point(f: &SparseWPoly, point: &[Q]) -> Result<PointCheck> {
    if point.len() != f.nvars() {
        return pre(format!("point has {} coordinates, expected {}", point.len(), f.nvars()));
    }
    if point.iter().all(Zero::is_zero) {
        return pre("the origin is the irrelevant locus");
    }
    point_check(f.eval(point), f.gradient_at(point))
}

/// Tier one on the blowup, with its irrelevant locus.
pub fn qsm_at_point_bi(f: &BiGradedPoly, point: &[Q]) -> Result<PointCheck> {
    if point.len() != f.nvars() {
        return pre(format!("point has {} coordinates, expected {}", point.len(), f.nvars()));
    }
    if f.frame().in_irrelevant_locus(point) {
        return pre("point lies in the irrelevant locus (x = 0) or (y = z = 0)");
    }
    point_check(f.eval(point), f.gradient_at(point))
}

/// Tier two status of a coordinate point `P_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoordinatePointStatus {
    /// `x_i^{d/a_i}` occurs, so `P_i` is not on `X`.
    NotOnX,
    /// `x_i^m x_j` occurs, so `∂f/∂x_j (P_i) != 0`.
    QuasiSmooth {
        via: usize,
    },
    NotQuasiSmooth,
}

pub fn qsm_at_coordinate_points(f: &SparseWPoly) -> Vec<CoordinatePointStatus> {
    let n = f.nvars();
    (0..n)
        .map(|i| {
            let pure = f.terms().keys().any(|m| (0..n).all(|j| j == i || m[j] == 0));
            if pure {
                return CoordinatePointStatus::NotOnX;
            }
            let via = f.terms().keys().find_map(|m| {
                let others: Vec<usize> = (0..n).filter(|&j| j != i && m[j] > 0).collect();
                (others.len() == 1 && m[others[0]] == 1).then(|| others[0])
            });
            match via {
                Some(j) => CoordinatePointStatus::QuasiSmooth { via: j },
                None => CoordinatePointStatus::NotQuasiSmooth,
            }
        })
        .collect()
}

/// Slice structure at the vertex `P = P_{n+1}` of `P(1^{n+1}, a)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EckardtDatum {
    pub a: u64,
    pub k: u64,
    /// Least `t` in `[1, k]` with `x_0` not dividing `f_{at+1}`.
    pub m: u64,
}

impl EckardtDatum {
    pub fn is_generalized_eckardt(&self) -> bool {
        self.m == self.k
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EckardtAnalysis {
    Datum(EckardtDatum),
    NotApplicable(String),
}

/// Reads `m` off `f = x_{n+1}^k x_0 + x_{n+1}^{k-1} f_{a+1} + ... + f_{ak+1}`.
pub fn eckardt_analyze(f: &SparseWPoly) -> EckardtAnalysis {
    let na = |why: &str| EckardtAnalysis::NotApplicable(why.to_string());
    let w = f.ambient().weights();
    let last = w.len() - 1;
    if w.len() < 3 || w[..last].iter().any(|&x| x != 1) {
        return na("ambient is not of the form P(1^{n+1}, a)");
    }
    let a = w[last];
    let d = f.degree();
    if d % a != 1 % a {
        return na("degree is not congruent to 1 modulo a");
    }
    let k = (d - 1) / a;
    if k == 0 {
        return na("k = 0: the vertex is not on X in the normal form");
    }
    let slices = f.slices_in(last);
    let lead = slices.get(&(k as u32)).cloned().unwrap_or_default();
    let mut x0 = vec![0u32; w.len()];
    x0[0] = 1;
    if lead.len() != 1 || !lead.contains_key(&x0) {
        return na("the x_{n+1}^k slice is not a multiple of x_0 alone");
    }
    if slices.keys().any(|&e| e as u64 > k) {
        return na("a power of x_{n+1} above k occurs");
    }
    for t in 1..=k {
        let e = (k - t) as u32;
        let divisible = slices.get(&e).map(|sl| sl.keys().all(|m| m[0] > 0)).unwrap_or(true);
        if !divisible {
            return EckardtAnalysis::Datum(EckardtDatum { a, k, m: t });
        }
    }
    na("x_0 divides f")
}

/// Which members of `|O(d)|` the general-member criterion ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MemberFamily {
    /// All monomials of degree `d`.
    All,
    /// Only monomials divisible by some weight-one variable, i.e. members
    /// containing `B_1`.
    ContainingB1,
}

/// Whether `target` is a non-negative integer combination of `gens`.
pub fn semigroup_contains(gens: &[u64], target: u64) -> bool {
    let t = target as usize;
    let mut reach = vec![false; t + 1];
    reach[0] = true;
    for &g in gens {
        let g = g as usize;
        if g == 0 {
            continue;
        }
        for v in g..=t {
            if reach[v - g] {
                reach[v] = true;
            }
        }
    }
    reach[t]
}

/// Combinatorial quasi-smoothness of a general member of the family: for
/// every support `I`, either a degree-`d` monomial lives on `x_I`, or at
/// least `|I|` distinct outside variables `x_e` admit monomials
/// `x^M x_e` of degree `d` with `M` on `I`. The check is collapsed over
/// the set of distinct weights occurring in `I`.
pub fn general_member_quasi_smooth(weights: &[u64], d: u64, family: MemberFamily) -> bool {
    let mut distinct: Vec<u64> = weights.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let q = distinct.len();
    let mult = |w: u64| weights.iter().filter(|&&x| x == w).count();
    if q > 20 {
        return general_member_quasi_smooth_bruteforce(weights, d, family);
    }
    for mask in 1u32..(1u32 << q) {
        let wset: Vec<u64> = (0..q).filter(|b| mask >> b & 1 == 1).map(|b| distinct[b]).collect();
        let has_one = wset.contains(&1);
        let cond_i = match family {
            MemberFamily::All => semigroup_contains(&wset, d),
            MemberFamily::ContainingB1 => has_one,
        };
        if cond_i {
            continue;
        }
        let lhs: usize = wset.iter().map(|&w| mult(w)).sum();
        let rhs: usize = distinct
            .iter()
            .filter(|w| !wset.contains(w))
            .filter(|&&w| match family {
                MemberFamily::All => w <= d && semigroup_contains(&wset, d - w),
                MemberFamily::ContainingB1 => w == 1 && d >= 1 && semigroup_contains(&wset, d - 1),
            })
            .map(|&w| mult(w))
            .sum();
        if lhs > rhs {
            return false;
        }
    }
    true
}

/// Uncollapsed version over all index subsets, used as an oracle.
pub fn general_member_quasi_smooth_bruteforce(weights: &[u64], d: u64, family: MemberFamily) -> bool {
    let n = weights.len();
    assert!(n <= 24, "brute force limited to 24 coordinates");
    for mask in 1u32..(1u32 << n) {
        let idx: Vec<usize> = (0..n).filter(|b| mask >> b & 1 == 1).collect();
        let ws: Vec<u64> = idx.iter().map(|&i| weights[i]).collect();
        let cond_i = match family {
            MemberFamily::All => semigroup_contains(&ws, d),
            MemberFamily::ContainingB1 => ws.contains(&1),
        };
        if cond_i {
            continue;
        }
        let outside = (0..n)
            .filter(|i| mask >> i & 1 == 0)
            .filter(|&e| {
                let w = weights[e];
                match family {
                    MemberFamily::All => w <= d && semigroup_contains(&ws, d - w),
                    MemberFamily::ContainingB1 => w == 1 && semigroup_contains(&ws, d - 1),
                }
            })
            .count();
        if idx.len() > outside {
            return false;
        }
    }
    true
}

/// Tier three: randomized numeric search for singular points of the cone.
#[derive(Clone, Debug, PartialEq)]
pub struct FalsifierReport {
    pub seed: u64,
    pub strata_searched: usize,
    /// Approximate singular points found, as `(re, im)` coordinates.
    /// Non-certified evidence of non-quasi-smoothness.
    pub candidates: Vec<Vec<(f64, f64)>>,
    pub certified: bool,
}

pub mod falsifier {
    //! Levenberg-Marquardt search for common zeros of all partial
    //! derivatives on coordinate strata of the affine cone.

    use nalgebra::{DMatrix, DVector};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::{partial_terms, FalsifierReport, Terms};
    use crate::rat::to_f64;

    struct CPoly(Vec<(Vec<u32>, f64)>);

    impl CPoly {
        fn from_terms(t: &Terms) -> Self {
            CPoly(t.iter().map(|(m, c)| (m.clone(), to_f64(c))).collect())
        }
        fn eval(&self, x: &[Complex64]) -> Complex64 {
            self.0
                .iter()
                .map(|(m, c)| {
                    let mut v = Complex64::new(*c, 0.0);
                    for (xi, &e) in x.iter().zip(m) {
                        if e > 0 {
                            v *= xi.powu(e);
                        }
                    }
                    v
                })
                .sum()
        }
    }

    /// Searches every coordinate stratum whose support meets each of the
    /// `groups`; each group gets one random affine normalization so the
    /// solution stays away from the irrelevant locus.
    pub fn search(terms: &Terms, nvars: usize, groups: &[Vec<usize>], seed: u64, starts: usize) -> FalsifierReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grads: Vec<Terms> = (0..nvars).map(|i| partial_terms(terms, i)).collect();
        let hess: Vec<Vec<CPoly>> =
            grads.iter().map(|g| (0..nvars).map(|j| CPoly::from_terms(&partial_terms(g, j))).collect()).collect();
        let grads: Vec<CPoly> = grads.iter().map(CPoly::from_terms).collect();
        let mut candidates = Vec::new();
        let mut strata = 0;
        let limit = nvars.min(16);
        for mask in 1u32..(1u32 << limit) {
            let supp: Vec<usize> = (0..nvars).filter(|b| *b < 32 && mask >> b & 1 == 1).collect();
            if !groups.iter().all(|g| g.iter().any(|i| supp.contains(i))) {
                continue;
            }
            strata += 1;
            for _ in 0..starts {
                let ells: Vec<Vec<(usize, Complex64)>> = groups
                    .iter()
                    .map(|g| {
                        g.iter()
                            .filter(|i| supp.contains(i))
                            .map(|&i| (i, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
                            .collect()
                    })
                    .collect();
                let mut x = vec![Complex64::new(0.0, 0.0); nvars];
                for &i in &supp {
                    x[i] = Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
                }
                if let Some(sol) = levenberg_marquardt(&grads, &hess, &ells, &supp, x) {
                    if !candidates.iter().any(|c: &Vec<(f64, f64)>| close(c, &sol)) {
                        candidates.push(sol.iter().map(|z| (z.re, z.im)).collect());
                    }
                }
            }
        }
        FalsifierReport { seed, strata_searched: strata, candidates, certified: false }
    }

    fn close(a: &[(f64, f64)], b: &[Complex64]) -> bool {
        a.iter().zip(b).all(|(p, q)| (p.0 - q.re).abs() + (p.1 - q.im).abs() < 1e-6)
    }

    fn levenberg_marquardt(
        grads: &[CPoly],
        hess: &[Vec<CPoly>],
        ells: &[Vec<(usize, Complex64)>],
        supp: &[usize],
        mut x: Vec<Complex64>,
    ) -> Option<Vec<Complex64>> {
        let p = grads.len() + ells.len();
        let m = supp.len();
        let residual = |x: &[Complex64]| -> DVector<Complex64> {
            let mut f: Vec<Complex64> = grads.iter().map(|g| g.eval(x)).collect();
            for l in ells {
                f.push(l.iter().map(|&(i, c)| c * x[i]).sum::<Complex64>() - Complex64::new(1.0, 0.0));
            }
            DVector::from_vec(f)
        };
        let mut lambda = 1e-3;
        let mut f = residual(&x);
        for _ in 0..200 {
            let norm = f.norm();
            if norm < 1e-12 {
                break;
            }
            let mut jm = DMatrix::<Complex64>::zeros(p, m);
            for (r, g) in hess.iter().enumerate() {
                for (c, &i) in supp.iter().enumerate() {
                    jm[(r, c)] = g[i].eval(&x);
                }
            }
            for (li, l) in ells.iter().enumerate() {
                for &(i, coef) in l {
                    let c = supp.iter().position(|&j| j == i).expect("in support");
                    jm[(grads.len() + li, c)] = coef;
                }
            }
            let jh = jm.adjoint();
            let mut a = &jh * &jm;
            for d in 0..m {
                a[(d, d)] += Complex64::new(lambda, 0.0);
            }
            let rhs = -(&jh * &f);
            let delta = a.lu().solve(&rhs)?;
            let mut x2 = x.clone();
            for (c, &i) in supp.iter().enumerate() {
                x2[i] += delta[c];
            }
            let f2 = residual(&x2);
            if f2.norm() < norm {
                x = x2;
                f = f2;
                lambda = (lambda * 0.3).max(1e-12);
            } else {
                lambda *= 10.0;
                if lambda > 1e12 {
                    break;
                }
            }
        }
        let scale: f64 = x.iter().map(|z| z.norm()).fold(1.0, f64::max);
        (f.norm() < 1e-9 * scale.max(1.0) && x.iter().all(|z| z.re.is_finite() && z.im.is_finite())).then_some(x)
    }
}

/// Runs the falsifier on a hypersurface of weighted projective space.
pub fn falsify(f: &SparseWPoly, seed: u64, starts: usize) -> FalsifierReport {
    let n = f.nvars();
    falsifier::search(f.terms(), n, &[(0..n).collect()], seed, starts)
}

/// Runs the falsifier on a hypersurface of the blowup.
pub fn falsify_bi(f: &BiGradedPoly, seed: u64, starts: usize) -> FalsifierReport {
    let s = f.frame().s();
    let r = f.frame().r;
    let groups = vec![(0..=r).collect(), (r + 1..=s + 1).collect()];
    falsifier::search(f.terms(), s + 2, &groups, seed, starts)
}

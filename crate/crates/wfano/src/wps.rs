//! Weighted projective spaces: normalization, top intersection numbers,
//! coordinate strata, base loci and the Fano index.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::error::{pre, Error, Result};
use crate::rat::{pow_q, qb, Q};
use crate::snf;

/// gcd of a slice; the empty gcd is 0.
pub fn gcd_all(xs: &[u64]) -> u64 {
    xs.iter().fold(0u64, |acc, &x| acc.gcd(&x))
}

fn gcd_omitting(xs: &[u64], i: usize) -> u64 {
    xs.iter().enumerate().filter(|&(j, _)| j != i).fold(0u64, |acc, (_, &x)| acc.gcd(&x))
}

/// Positive integer weights `(a_0, ..., a_s)` with `gcd = 1` and `s >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightVector {
    weights: Vec<u64>,
}

impl WeightVector {
    /// Rejects vectors with fewer than two entries, zero entries or a
    /// common divisor. Use [`WeightVector::divide_gcd`] to strip a gcd.
    pub fn new(weights: Vec<u64>) -> Result<Self> {
        check_shape(&weights)?;
        let g = gcd_all(&weights);
        if g != 1 {
            return Err(Error::CommonDivisor(g));
        }
        Ok(Self { weights })
    }

    /// Divides out the common divisor and returns it alongside the vector.
    pub fn divide_gcd(weights: Vec<u64>) -> Result<(Self, u64)> {
        check_shape(&weights)?;
        let g = gcd_all(&weights);
        let w = weights.into_iter().map(|x| x / g).collect();
        Ok((Self { weights: w }, g))
    }

    /// Parses `"P(1^3,2,5)"` or `"1,1,1,2,5"`.
    pub fn parse(text: &str) -> Result<Self> {
        Self::new(parse_weight_list(text)?)
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// The dimension index `s` (the space is `P(a_0, ..., a_s)`).
    pub fn s(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn get(&self, i: usize) -> u64 {
        self.weights[i]
    }

    pub fn product(&self) -> BigInt {
        self.weights.iter().fold(BigInt::one(), |acc, &x| acc * BigInt::from(x))
    }

    pub fn sum(&self) -> u64 {
        self.weights.iter().sum()
    }

    /// Every `s` of the `s + 1` weights are coprime.
    pub fn is_well_formed(&self) -> bool {
        (0..self.len()).all(|i| gcd_omitting(&self.weights, i) == 1)
    }

    /// Comma separated explicit form, e.g. `1,1,1,2,5`.
    pub fn explicit(&self) -> String {
        self.weights.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(",")
    }

    /// Compact form with run-length exponents, e.g. `P(1^3,2,5)`.
    pub fn compact(&self) -> String {
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.weights.len() {
            let w = self.weights[i];
            let mut j = i;
            while j < self.weights.len() && self.weights[j] == w {
                j += 1;
            }
            if j - i > 1 {
                parts.push(format!("{}^{}", w, j - i));
            } else {
                parts.push(w.to_string());
            }
            i = j;
        }
        format!("P({})", parts.join(","))
    }

    /// Indices sorted by ascending weight (stable).
    pub fn sorting_permutation(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by_key(|&i| self.weights[i]);
        idx
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.compact())
    }
}

fn check_shape(weights: &[u64]) -> Result<()> {
    if weights.len() < 2 {
        return Err(Error::TooShort(weights.len()));
    }
    if let Some(i) = weights.iter().position(|&w| w == 0) {
        return Err(Error::NonPositiveWeight(i));
    }
    Ok(())
}

/// Parses a weight list without imposing the gcd condition.
pub fn parse_weight_list(text: &str) -> Result<Vec<u64>> {
    let mut t = text.trim();
    if let Some(rest) = t.strip_prefix("P(").or_else(|| t.strip_prefix("p(")) {
        t = rest.strip_suffix(')').ok_or_else(|| Error::Parse(format!("missing ')' in {text:?}")))?;
    } else if let Some(rest) = t.strip_prefix('(') {
        t = rest.strip_suffix(')').ok_or_else(|| Error::Parse(format!("missing ')' in {text:?}")))?;
    }
    let mut out = Vec::new();
    for item in t.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err(Error::Parse(format!("empty weight entry in {text:?}")));
        }
        let (base, rep) = match item.split_once('^') {
            Some((b, r)) => (b.trim(), r.trim()),
            None => (item, "1"),
        };
        let w: u64 = base.parse().map_err(|_| Error::Parse(format!("bad weight {base:?} in {text:?}")))?;
        let r: usize = rep.parse().map_err(|_| Error::Parse(format!("bad repetition {rep:?} in {text:?}")))?;
        out.extend(std::iter::repeat_n(w, r));
    }
    Ok(out)
}

/// Result of normalizing a weight vector to a well-formed one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizationReport {
    pub input: WeightVector,
    /// `g_i = gcd(a_j : j != i)`.
    pub g_i: Vec<u64>,
    /// `g = g_0 * ... * g_s`.
    pub g: u64,
    /// `a'_i = a_i g_i / g`.
    pub output: WeightVector,
}

impl NormalizationReport {
    /// `true` when normalization changed nothing.
    pub fn is_identity(&self) -> bool {
        self.g == 1 && self.input == self.output
    }
}

/// Raw normalization on any positive vector with gcd 1.
fn normalize_raw(a: &[u64]) -> (Vec<u64>, u64, Vec<u64>) {
    if a.len() == 1 {
        return (vec![1], 1, vec![1]);
    }
    let gi: Vec<u64> = (0..a.len()).map(|i| gcd_omitting(a, i)).collect();
    let g: u64 = gi.iter().product();
    let out = a.iter().zip(&gi).map(|(&ai, &gi)| ai * gi / g).collect();
    (gi, g, out)
}

pub fn normalize(w: &WeightVector) -> NormalizationReport {
    let (g_i, g, out) = normalize_raw(w.weights());
    NormalizationReport { input: w.clone(), g_i, g, output: WeightVector { weights: out } }
}

/// `(O(1)^s) = 1 / (a_0 ... a_s)` on a well-formed space.
pub fn top_intersection(w: &WeightVector) -> Result<Q> {
    if !w.is_well_formed() {
        return Err(Error::NotWellFormed(w.weights().to_vec()));
    }
    Ok(Q::new(BigInt::one(), w.product()))
}

/// A coordinate stratum `Z = (x_i = 0 : i in V)` presented as a
/// well-formed weighted projective space together with the rescaling of
/// `O(1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateStratum {
    pub ambient: WeightVector,
    /// Sorted vanishing indices `V`.
    pub vanishing: Vec<usize>,
    /// Sorted surviving indices `J`.
    pub complement: Vec<usize>,
    /// `h = gcd(a_j : j in J)`.
    pub h: u64,
    /// Normalization constant of `(a_j / h)`.
    pub g: u64,
    /// Well-formed weights of `Z`, ordered as `complement`.
    pub quotient_weights: WeightVector,
    /// `O_P(1)|_Z ~ O_Z(scale)` with `scale = 1/(g h)`.
    pub scale: Q,
    /// Multiplicity of the cone spanned by `u_i, i in V`.
    pub mult: u64,
}

impl CoordinateStratum {
    pub fn dim(&self) -> usize {
        self.complement.len() - 1
    }

    /// `(O_P(1)|_Z)^{dim Z}` through the quotient presentation.
    pub fn degree(&self) -> Q {
        pow_q(&self.scale, self.dim() as u32) * Q::new(BigInt::one(), self.quotient_weights.product())
    }
}

fn sorted_indices(w: &WeightVector, vanish: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut v: Vec<usize> = vanish.to_vec();
    v.sort_unstable();
    v.dedup();
    if let Some(&bad) = v.iter().find(|&&i| i >= w.len()) {
        return Err(Error::IndexOutOfRange { index: bad, len: w.len() });
    }
    let j: Vec<usize> = (0..w.len()).filter(|i| !v.contains(i)).collect();
    Ok((v, j))
}

pub fn stratum(w: &WeightVector, vanish: &[usize]) -> Result<CoordinateStratum> {
    if !w.is_well_formed() {
        return Err(Error::NotWellFormed(w.weights().to_vec()));
    }
    let (v, j) = sorted_indices(w, vanish)?;
    if j.len() < 2 {
        return pre(format!("stratum needs at least two surviving coordinates, got {}", j.len()));
    }
    let aj: Vec<u64> = j.iter().map(|&i| w.get(i)).collect();
    let h = gcd_all(&aj);
    let app: Vec<u64> = aj.iter().map(|x| x / h).collect();
    let (_, g, ap) = normalize_raw(&app);
    Ok(CoordinateStratum {
        ambient: w.clone(),
        vanishing: v,
        complement: j,
        h,
        g,
        quotient_weights: WeightVector { weights: ap },
        scale: Q::new(BigInt::one(), BigInt::from(g) * BigInt::from(h)),
        mult: h,
    })
}

/// Independent route to `mult(tau)`: the index of the lattice spanned by
/// `e_i (i in V)` and `(a_0, ..., a_s)` inside its saturation.
pub fn stratum_mult_snf(w: &WeightVector, vanish: &[usize]) -> Result<BigInt> {
    let (v, _) = sorted_indices(w, vanish)?;
    let n = w.len();
    let mut rows: Vec<Vec<BigInt>> =
        v.iter().map(|&i| (0..n).map(|c| BigInt::from(u64::from(c == i))).collect()).collect();
    rows.push(w.weights().iter().map(|&x| BigInt::from(x)).collect());
    Ok(snf::rank_and_index(&rows).1)
}

/// Degree of `O_P(1)` on the stratum read off the raw sub-weights:
/// `gcd(a_J) / prod(a_J)`.
pub fn stratum_degree_lattice(w: &WeightVector, vanish: &[usize]) -> Result<Q> {
    let (_, j) = sorted_indices(w, vanish)?;
    let aj: Vec<u64> = j.iter().map(|&i| w.get(i)).collect();
    let prod = aj.iter().fold(BigInt::one(), |acc, &x| acc * BigInt::from(x));
    Ok(Q::new(BigInt::from(gcd_all(&aj)), prod))
}

/// One irreducible component of a base locus, given by its vanishing set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocusComponent {
    pub vanishing: Vec<usize>,
    /// `None` when the component is a single coordinate point.
    pub stratum: Option<CoordinateStratum>,
}

impl LocusComponent {
    /// The coordinate point when the component is zero-dimensional.
    pub fn point(&self, n: usize) -> Option<usize> {
        if self.vanishing.len() + 1 == n {
            (0..n).find(|i| !self.vanishing.contains(i))
        } else {
            None
        }
    }
}

/// `B_a` or `B_{a,p}` for a coordinate point `p`, as a union of
/// coordinate strata (empty list means empty locus).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseLocus {
    pub threshold: u64,
    pub point: Option<usize>,
    /// Indices sorted by ascending weight.
    pub permutation: Vec<usize>,
    pub components: Vec<LocusComponent>,
}

impl BaseLocus {
    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// Number of monomials of weighted degree `e` in the variables `support`,
/// capped at `cap`.
pub fn count_monomials(weights: &[u64], support: &[usize], e: u64, cap: u64) -> u64 {
    let e = e as usize;
    let mut dp = vec![0u64; e + 1];
    dp[0] = 1;
    for &i in support {
        let w = weights[i] as usize;
        for t in w..=e {
            dp[t] = (dp[t] + dp[t - w]).min(cap);
        }
    }
    dp[e]
}

fn qualifies(weights: &[u64], t: &[usize], degrees: &[u64], point: Option<usize>) -> bool {
    degrees.iter().all(|&e| {
        let cnt = count_monomials(weights, t, e, 2);
        match point {
            None => cnt == 0,
            Some(c) => cnt == 0 || (cnt == 1 && t.contains(&c) && e % weights[c] == 0),
        }
    })
}

const MAX_BASE_LOCUS_CANDIDATES: usize = 24;

pub fn base_locus(w: &WeightVector, a: u64, point: Option<usize>) -> Result<BaseLocus> {
    let n = w.len();
    if let Some(c) = point {
        if c >= n {
            return Err(Error::IndexOutOfRange { index: c, len: n });
        }
    }
    let weights = w.weights();
    let mut degrees: Vec<u64> = weights.iter().copied().filter(|&x| x <= a).collect();
    degrees.sort_unstable();
    degrees.dedup();
    let mut candidates: Vec<usize> = (0..n).filter(|&i| weights[i] > a).collect();
    if let Some(c) = point {
        if !candidates.contains(&c) {
            candidates.push(c);
            candidates.sort_unstable();
        }
    }
    if candidates.len() > MAX_BASE_LOCUS_CANDIDATES {
        return pre(format!(
            "base locus search over {} coordinates exceeds the limit {}",
            candidates.len(),
            MAX_BASE_LOCUS_CANDIDATES
        ));
    }
    let m = candidates.len();
    let mut good: Vec<u64> = Vec::new();
    for mask in 1u64..(1u64 << m) {
        let t: Vec<usize> = (0..m).filter(|b| mask >> b & 1 == 1).map(|b| candidates[b]).collect();
        if qualifies(weights, &t, &degrees, point) {
            good.push(mask);
        }
    }
    let maximal: Vec<u64> = good.iter().copied().filter(|&x| !good.iter().any(|&y| y != x && y & x == x)).collect();
    let mut components = Vec::new();
    for mask in maximal {
        let t: Vec<usize> = (0..m).filter(|b| mask >> b & 1 == 1).map(|b| candidates[b]).collect();
        let vanishing: Vec<usize> = (0..n).filter(|i| !t.contains(i)).collect();
        let stratum = if t.len() >= 2 { Some(stratum(w, &vanishing)?) } else { None };
        components.push(LocusComponent { vanishing, stratum });
    }
    components.sort_by(|x, y| x.vanishing.cmp(&y.vanishing));
    Ok(BaseLocus { threshold: a, point, permutation: w.sorting_permutation(), components })
}

/// `sum a_i - d`.
pub fn fano_index(w: &WeightVector, d: u64) -> i64 {
    w.sum() as i64 - d as i64
}

/// `g^e` as a big rational, used by identity checks.
pub fn g_power(g: u64, e: usize) -> Q {
    qb(num_traits::pow(BigInt::from(g), e))
}

/// `X_d` in a well-formed `P` is well-formed when the gcd of every `s - 1`
/// of the weights divides `d`.
pub fn hypersurface_well_formed(w: &WeightVector, d: u64) -> bool {
    if !w.is_well_formed() {
        return false;
    }
    let a = w.weights();
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let g = a.iter().enumerate().filter(|&(t, _)| t != i && t != j).fold(0u64, |acc, (_, &x)| acc.gcd(&x));
            if g > 1 && !d.is_multiple_of(g) {
                return false;
            }
        }
    }
    true
}

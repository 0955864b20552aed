//! The standard weighted blowup of `P(a_0, ..., a_s)` along
//! `(x_0 = ... = x_r = 0)`: lattice data, Z^2 grading, pullbacks,
//! intersection numbers, the exceptional divisor, finite covers and
//! restriction to coordinate divisors.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{pre, Error, Result};
use crate::rat::{pow_q, qb, qi, qu, Q};
use crate::snf;
use crate::wps::{gcd_all, normalize, WeightVector};

/// Integer bidegree in the class group `Z^2` of the blowup.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BiDegree {
    pub alpha: i64,
    pub beta: i64,
}

impl BiDegree {
    pub fn new(alpha: i64, beta: i64) -> Self {
        Self { alpha, beta }
    }
}

/// Rational bidegree `(alpha, beta)` in `Cl ⊗ Q`.
pub type QBiDegree = (Q, Q);

/// Per-block data `h`, `a''`, `g_i`, `g`, `a'` of one side of the split.
fn block(a: &[u64]) -> (u64, Vec<u64>, Vec<u64>, u64, Vec<u64>) {
    let h = gcd_all(a);
    let app: Vec<u64> = a.iter().map(|x| x / h).collect();
    if app.len() == 1 {
        return (h, app, vec![1], 1, vec![1]);
    }
    let gi: Vec<u64> = (0..app.len())
        .map(|i| app.iter().enumerate().filter(|&(j, _)| j != i).fold(0u64, |acc, (_, &x)| acc.gcd(&x)))
        .collect();
    let g: u64 = gi.iter().product();
    let ap = app.iter().zip(&gi).map(|(&x, &gi)| x * gi / g).collect();
    (h, app, gi, g, ap)
}

/// All integers attached to a standard weighted blowup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupFrame {
    pub ambient: WeightVector,
    /// The center is `(x_0 = ... = x_r = 0)`.
    pub r: usize,
    pub h: u64,
    pub hp: u64,
    /// `a''_i = a_i / h` for `i <= r`, `a_j / h'` for `j > r`.
    pub app: Vec<u64>,
    /// `g_i` per index; a block of size one gets `g = 1`.
    pub gi: Vec<u64>,
    pub g: u64,
    pub gp: u64,
    /// Reduced weights of both factors of the exceptional divisor.
    pub ap: Vec<u64>,
    /// Bezout pair with `h' k - h k' = 1`.
    pub k: i64,
    pub kp: i64,
    /// Integer representative of `v_{s+1}` in `Z^{s+1}`.
    pub v_rep: Vec<i64>,
}

pub fn build(ambient: &WeightVector, r: usize) -> Result<BlowupFrame> {
    let s = ambient.s();
    if r < 1 || r + 1 > s {
        return pre(format!("split index r = {r} must satisfy 1 <= r <= s - 1 = {}", s as i64 - 1));
    }
    if !ambient.is_well_formed() {
        return Err(Error::NotWellFormed(ambient.weights().to_vec()));
    }
    let (x, y) = ambient.weights().split_at(r + 1);
    let (h, appx, gix, g, apx) = block(x);
    let (hp, appy, giy, gp, apy) = block(y);
    let gcd = (h as i64).extended_gcd(&(hp as i64));
    if gcd.gcd != 1 {
        return Err(Error::Invariant(format!("gcd(h, h') = {} on a well-formed ambient", gcd.gcd)));
    }
    // extended_gcd gives h x + h' y = 1, so k = y and k' = -x.
    let k = gcd.y;
    let kp = -gcd.x;
    let mut v_rep: Vec<i64> = appx.iter().map(|&a| k * a as i64).collect();
    v_rep.extend(appy.iter().map(|&a| kp * a as i64));
    let mut app = appx;
    app.extend(appy);
    let mut gi = gix;
    gi.extend(giy);
    let mut ap = apx;
    ap.extend(apy);
    Ok(BlowupFrame { ambient: ambient.clone(), r, h, hp, app, gi, g, gp, ap, k, kp, v_rep })
}

impl BlowupFrame {
    pub fn s(&self) -> usize {
        self.ambient.s()
    }

    /// Class of `D~_i` in `Z^2`.
    pub fn class_divisor(&self, i: usize) -> BiDegree {
        let a = self.app[i] as i64;
        if i <= self.r {
            BiDegree::new(a, 0)
        } else {
            BiDegree::new(0, a)
        }
    }

    /// Class of the exceptional divisor, equal to `deg z`.
    pub fn class_e(&self) -> BiDegree {
        BiDegree::new(-(self.hp as i64), self.h as i64)
    }

    /// Degree of a Cox monomial with exponents over `(x_0..x_r, y_{r+1}..y_s, z)`.
    pub fn monomial_degree(&self, exps: &[u64]) -> BiDegree {
        let s = self.s();
        let mut d = BiDegree::new(0, 0);
        for i in 0..=s {
            let c = self.class_divisor(i);
            d.alpha += c.alpha * exps[i] as i64;
            d.beta += c.beta * exps[i] as i64;
        }
        let e = self.class_e();
        d.alpha += e.alpha * exps[s + 1] as i64;
        d.beta += e.beta * exps[s + 1] as i64;
        d
    }

    /// Rational check that `v_rep` lies on both rays of the characterization:
    /// `v_rep - (k'/h') a` is `a''_i / h'` on the first block and zero on
    /// the second, and `v_rep - (k/h) a` is zero on the first block and
    /// `-a''_j / h` on the second.
    pub fn ray_conditions_hold(&self) -> bool {
        let a = self.ambient.weights();
        let t1 = Q::new(BigInt::from(self.kp), BigInt::from(self.hp));
        let t2 = Q::new(BigInt::from(self.k), BigInt::from(self.h));
        (0..=self.s()).all(|i| {
            let c = qi(self.v_rep[i]);
            let w = qu(a[i]);
            let x1 = &c - &t1 * &w;
            let x2 = &c - &t2 * &w;
            if i <= self.r {
                x1 == Q::new(BigInt::from(self.app[i]), BigInt::from(self.hp)) && x2.is_zero()
            } else {
                x1.is_zero() && x2 == -Q::new(BigInt::from(self.app[i]), BigInt::from(self.h))
            }
        })
    }

    fn lattice_rows(&self, extra: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
        let mut rows: Vec<Vec<BigInt>> = extra.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        rows.push(self.ambient.weights().iter().map(|&x| BigInt::from(x)).collect());
        rows
    }

    /// Invariant factors of `[v_rep; a]`; primitivity means `(1, 1)`.
    pub fn primitivity_factors(&self) -> Vec<BigInt> {
        snf::invariant_factors(&self.lattice_rows(std::slice::from_ref(&self.v_rep)))
    }

    pub fn v_is_primitive(&self) -> bool {
        let f = self.primitivity_factors();
        f.len() == 2 && f.iter().all(|x| x.is_one())
    }

    /// `mult(R u_i + R v)` by Smith normal form; `None` when the two rays
    /// are opposite (second block of size one and `i = s`).
    pub fn ray_ray_mult_snf(&self, i: usize) -> Option<BigInt> {
        let mut e = vec![0i64; self.s() + 1];
        e[i] = 1;
        let rows = self.lattice_rows(&[e, self.v_rep.clone()]);
        let (rank, idx) = snf::rank_and_index(&rows);
        (rank == 3).then_some(idx)
    }

    /// Coefficient of `E` in `psi^* D_i`.
    pub fn pullback_psi(&self, i: usize) -> Result<Q> {
        if i > self.s() {
            return Err(Error::IndexOutOfRange { index: i, len: self.s() + 1 });
        }
        Ok(if i <= self.r {
            Q::new(BigInt::from(self.ambient.get(i)), BigInt::from(self.h) * BigInt::from(self.hp))
        } else {
            Q::zero()
        })
    }

    /// `psi^* O_P(1)` recomputed from `psi^* D_i / a_i` in the grading.
    pub fn psi_pullback_o1(&self, i: usize) -> Result<QBiDegree> {
        let c = self.pullback_psi(i)?;
        let d = self.class_divisor(i);
        let e = self.class_e();
        let a = qu(self.ambient.get(i));
        Ok(((qi(d.alpha) + &c * qi(e.alpha)) / &a, (qi(d.beta) + &c * qi(e.beta)) / &a))
    }

    /// `pi^* O_{P'}(1)` recomputed from `pi^* D'_i = g_i D~_i` on the
    /// first block.
    pub fn pi_pullback_o1(&self, i: usize) -> QBiDegree {
        let d = self.class_divisor(i);
        let gi = qu(self.gi[i]);
        let ap = qu(self.ap[i]);
        (qi(d.alpha) * &gi / &ap, qi(d.beta) * &gi / &ap)
    }

    /// `(O(1,0)^k . O(0,1)^{s-k}) = h^k h'^{s-k} / prod(a)` for `k <= r`.
    pub fn intersection_bi(&self, k: usize) -> Result<Q> {
        let s = self.s();
        if k > s {
            return pre(format!("k = {k} exceeds s = {s}"));
        }
        if k > self.r {
            return Ok(Q::zero());
        }
        let num = num_traits::pow(BigInt::from(self.h), k) * num_traits::pow(BigInt::from(self.hp), s - k);
        Ok(Q::new(num, self.ambient.product()))
    }

    /// Exceptional divisor data.
    pub fn exceptional_class(&self) -> ExceptionalData {
        let (x, y) = self.ap.split_at(self.r + 1);
        ExceptionalData {
            class: self.class_e(),
            first_factor: x.to_vec(),
            second_factor: y.to_vec(),
            g: self.g,
            gp: self.gp,
            self_restriction: (
                -Q::new(BigInt::from(self.hp), BigInt::from(self.g)),
                Q::new(BigInt::from(self.h), BigInt::from(self.gp)),
            ),
        }
    }

    /// `g^r g'^{s-r-1} h (O(1,0)^r . O(0,1)^{s-r}) prod(a')`, which equals
    /// one because `E` has degree one against the product class.
    pub fn exceptional_degree_identity(&self) -> Q {
        let s = self.s();
        let r = self.r;
        let i_r = self.intersection_bi(r).expect("r <= s");
        let prod_ap = self.ap.iter().fold(BigInt::one(), |acc, &x| acc * BigInt::from(x));
        qb(num_traits::pow(BigInt::from(self.g), r))
            * qb(num_traits::pow(BigInt::from(self.gp), s - r - 1))
            * qu(self.h)
            * i_r
            * qb(prod_ap)
    }

    /// Whether a point `(x_0..x_r, y_{r+1}..y_s, z)` lies in the irrelevant
    /// locus `(x = 0) ∪ (y = z = 0)`.
    pub fn in_irrelevant_locus(&self, point: &[Q]) -> bool {
        let s = self.s();
        let xs_zero = point[..=self.r].iter().all(Zero::is_zero);
        let yz_zero = point[self.r + 1..=s + 1].iter().all(Zero::is_zero);
        xs_zero || yz_zero
    }
}

/// Product structure of the exceptional divisor
/// `E ≅ P(a'_0..a'_r) × P(a'_{r+1}..a'_s)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExceptionalData {
    pub class: BiDegree,
    pub first_factor: Vec<u64>,
    /// A single entry means the factor is a point.
    pub second_factor: Vec<u64>,
    pub g: u64,
    pub gp: u64,
    /// `E|_E = (-h'/g, h/g')`.
    pub self_restriction: QBiDegree,
}

impl ExceptionalData {
    /// `O(alpha, beta)|_E = O(alpha/g) ⊠ O(beta/g')`.
    pub fn restrict(&self, alpha: &Q, beta: &Q) -> QBiDegree {
        (alpha / qu(self.g), beta / qu(self.gp))
    }
}

/// Pullback rule along the finite cover induced by `x_i ↦ x_i^{e_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteCover {
    pub base: BlowupFrame,
    /// Pullback `O(alpha, beta) ↦ O(s1 alpha, s2 beta)`.
    pub scaling: QBiDegree,
    pub degree: BigInt,
}

pub fn finite_cover_pull(frame: &BlowupFrame, e: &[u64]) -> Result<FiniteCover> {
    let a = frame.ambient.weights();
    if e.len() != a.len() {
        return pre(format!("expected {} exponents, got {}", a.len(), e.len()));
    }
    let mut abar = Vec::with_capacity(a.len());
    for (i, (&ai, &ei)) in a.iter().zip(e).enumerate() {
        if ei == 0 || ai % ei != 0 {
            return pre(format!("exponent e_{i} = {ei} does not divide a_{i} = {ai}"));
        }
        abar.push(ai / ei);
    }
    let wbar = WeightVector::new(abar)?;
    if !wbar.is_well_formed() {
        return Err(Error::NotWellFormed(wbar.weights().to_vec()));
    }
    let base = build(&wbar, frame.r)?;
    let scaling =
        (Q::new(BigInt::from(frame.h), BigInt::from(base.h)), Q::new(BigInt::from(frame.hp), BigInt::from(base.hp)));
    let degree = e.iter().fold(BigInt::one(), |acc, &x| acc * BigInt::from(x));
    Ok(FiniteCover { base, scaling, degree })
}

/// Restriction of the blowup to `D~_0` or `D~_s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DivisorRestriction {
    /// `psi|_{D~_i}` is an isomorphism; `section` marks `D~_s` as a section of `pi`.
    Isomorphism { divisor_weights: WeightVector, section: bool },
    /// `psi|_{D~_i}` is the standard weighted blowup `frame` of `D_i`.
    Blowup {
        divisor_weights: WeightVector,
        frame: Box<BlowupFrame>,
        /// `O(alpha, beta)|_{D~_i} ~ O(s1 alpha, s2 beta)`.
        scaling: QBiDegree,
        /// `E . D~_i = coefficient * E_{D_i}`.
        e_coefficient: Q,
    },
}

pub fn restrict_to_divisor(frame: &BlowupFrame, i: usize) -> Result<DivisorRestriction> {
    let s = frame.s();
    let a = frame.ambient.weights();
    if i == 0 {
        let dot = normalize(&WeightVector::new(a[1..].to_vec())?).output;
        if frame.r == 1 {
            return Ok(DivisorRestriction::Isomorphism { divisor_weights: dot, section: false });
        }
        let sub = build(&dot, frame.r - 1)?;
        let g0 = BigInt::from(frame.gi[0]);
        let scaling = (
            Q::new(BigInt::from(sub.hp), &g0 * BigInt::from(frame.hp)),
            Q::new(BigInt::from(sub.h), &g0 * BigInt::from(frame.h)),
        );
        Ok(DivisorRestriction::Blowup {
            divisor_weights: dot,
            frame: Box::new(sub),
            scaling,
            e_coefficient: Q::new(BigInt::one(), g0),
        })
    } else if i == s {
        let ddot = normalize(&WeightVector::new(a[..s].to_vec())?).output;
        if frame.r == s - 1 {
            return Ok(DivisorRestriction::Isomorphism { divisor_weights: ddot, section: true });
        }
        let sub = build(&ddot, frame.r)?;
        let gs = BigInt::from(frame.gi[s]);
        let scaling = (
            Q::new(BigInt::from(sub.hp), &gs * BigInt::from(frame.hp)),
            Q::new(BigInt::from(sub.h), &gs * BigInt::from(frame.h)),
        );
        Ok(DivisorRestriction::Blowup {
            divisor_weights: ddot,
            frame: Box::new(sub),
            scaling,
            e_coefficient: Q::new(BigInt::one(), gs),
        })
    } else if i < s {
        Err(Error::Unsupported(format!(
            "restriction to the middle coordinate divisor D_{i} is not described; only D_0 and D_{s} are"
        )))
    } else {
        Err(Error::IndexOutOfRange { index: i, len: s + 1 })
    }
}

/// Intersection theory of the blowup as a complete simplicial toric
/// variety, computed from its fan. Divisors are numbered `0..=s` for
/// `D~_i` and `s + 1` for `E`.
#[derive(Clone, Debug)]
pub struct ToricBlowup {
    frame: BlowupFrame,
    cones: Vec<Vec<usize>>,
    mults: Vec<BigInt>,
    classes: Vec<[Q; 2]>,
}

impl ToricBlowup {
    pub fn new(frame: &BlowupFrame) -> Self {
        let s = frame.s();
        let r = frame.r;
        let e_idx = s + 1;
        let mut cones = Vec::new();
        // cones that avoid E: omit a single x_l
        for l in 0..=r {
            cones.push((0..=s).filter(|&i| i != l).collect::<Vec<_>>());
        }
        // cones through E: omit one x_i and one y_l
        for i in 0..=r {
            for l in (r + 1)..=s {
                let mut c: Vec<usize> = (0..=s).filter(|&j| j != i && j != l).collect();
                c.push(e_idx);
                cones.push(c);
            }
        }
        let lift = |rho: usize| -> Vec<BigInt> {
            if rho == e_idx {
                frame.v_rep.iter().map(|&x| BigInt::from(x)).collect()
            } else {
                (0..=s).map(|j| BigInt::from(u64::from(j == rho))).collect()
            }
        };
        let aw: Vec<BigInt> = frame.ambient.weights().iter().map(|&x| BigInt::from(x)).collect();
        let mults = cones
            .iter()
            .map(|c| {
                let mut rows: Vec<Vec<BigInt>> = c.iter().map(|&rho| lift(rho)).collect();
                rows.push(aw.clone());
                snf::det(&rows).abs()
            })
            .collect();
        let mut classes: Vec<[Q; 2]> = (0..=s)
            .map(|i| {
                let c = frame.class_divisor(i);
                [qi(c.alpha), qi(c.beta)]
            })
            .collect();
        let e = frame.class_e();
        classes.push([qi(e.alpha), qi(e.beta)]);
        Self { frame: frame.clone(), cones, mults, classes }
    }

    pub fn frame(&self) -> &BlowupFrame {
        &self.frame
    }

    pub fn maximal_cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn cone_mults(&self) -> &[BigInt] {
        &self.mults
    }

    fn in_some_cone(&self, support: &[usize]) -> Option<usize> {
        self.cones.iter().position(|c| support.iter().all(|x| c.contains(x)))
    }

    /// Intersection number of the divisor monomial `prod D_rho^{e_rho}`
    /// with total degree `s`.
    pub fn intersect(&self, monomial: &BTreeMap<usize, u32>) -> Result<Q> {
        let total: u32 = monomial.values().sum();
        if total as usize != self.frame.s() {
            return pre(format!("monomial degree {total} differs from dimension {}", self.frame.s()));
        }
        let mut memo = HashMap::new();
        Ok(self.eval(monomial, &mut memo))
    }

    fn eval(&self, m: &BTreeMap<usize, u32>, memo: &mut HashMap<Vec<(usize, u32)>, Q>) -> Q {
        let key: Vec<(usize, u32)> = m.iter().filter(|(_, &e)| e > 0).map(|(&k, &e)| (k, e)).collect();
        if let Some(v) = memo.get(&key) {
            return v.clone();
        }
        let support: Vec<usize> = key.iter().map(|&(k, _)| k).collect();
        let result = match self.in_some_cone(&support) {
            None => Q::zero(),
            Some(ci) => match key.iter().find(|&&(_, e)| e >= 2) {
                None => {
                    if support.len() == self.cones[ci].len() {
                        Q::new(BigInt::one(), self.mults[ci].clone())
                    } else {
                        Q::zero()
                    }
                }
                Some(&(rho, _)) => {
                    let outside: Vec<usize> = (0..self.classes.len()).filter(|x| !support.contains(x)).collect();
                    let mut pair = None;
                    'search: for (ai, &p) in outside.iter().enumerate() {
                        for &q in &outside[ai + 1..] {
                            let d =
                                &self.classes[p][0] * &self.classes[q][1] - &self.classes[p][1] * &self.classes[q][0];
                            if !d.is_zero() {
                                pair = Some((p, q, d));
                                break 'search;
                            }
                        }
                    }
                    let (p, q, d) = pair.expect("support inside a cone leaves two independent classes");
                    let c = &self.classes[rho];
                    let alpha = (&c[0] * &self.classes[q][1] - &c[1] * &self.classes[q][0]) / &d;
                    let beta = (&self.classes[p][0] * &c[1] - &self.classes[p][1] * &c[0]) / &d;
                    let mut acc = Q::zero();
                    for (coef, t) in [(alpha, p), (beta, q)] {
                        if coef.is_zero() {
                            continue;
                        }
                        let mut m2 = m.clone();
                        *m2.get_mut(&rho).expect("present") -= 1;
                        *m2.entry(t).or_insert(0) += 1;
                        acc += coef * self.eval(&m2, memo);
                    }
                    acc
                }
            },
        };
        memo.insert(key, result.clone());
        result
    }

    /// `(O(1,0)^k . O(0,1)^{s-k})` with `O(1,0) = D~_0 / a''_0` and
    /// `O(0,1) = D~_{r+1} / a''_{r+1}`.
    pub fn intersection_bi(&self, k: usize) -> Result<Q> {
        let s = self.frame.s();
        if k > s {
            return pre(format!("k = {k} exceeds s = {s}"));
        }
        let r = self.frame.r;
        let mut m = BTreeMap::new();
        if k > 0 {
            m.insert(0, k as u32);
        }
        if s - k > 0 {
            m.insert(r + 1, (s - k) as u32);
        }
        let v = self.intersect(&m)?;
        let scale = pow_q(&qu(self.frame.app[0]), k as u32) * pow_q(&qu(self.frame.app[r + 1]), (s - k) as u32);
        Ok(v / scale)
    }

    /// `(D . O(1,0)^k . O(0,1)^{s-1-k})` for a single divisor `D`.
    pub fn divisor_times_bi(&self, rho: usize, k: usize) -> Result<Q> {
        let s = self.frame.s();
        let r = self.frame.r;
        if k + 1 > s {
            return pre(format!("k = {k} too large for s = {s}"));
        }
        let mut m = BTreeMap::new();
        *m.entry(rho).or_insert(0) += 1;
        if k > 0 {
            *m.entry(0).or_insert(0) += k as u32;
        }
        if s - 1 - k > 0 {
            *m.entry(r + 1).or_insert(0) += (s - 1 - k) as u32;
        }
        let v = self.intersect(&m)?;
        let scale = pow_q(&qu(self.frame.app[0]), k as u32) * pow_q(&qu(self.frame.app[r + 1]), (s - 1 - k) as u32);
        Ok(v / scale)
    }
}

/// Third route to the intersection numbers: pull back to the blowup of
/// `P^s` through the cover `e = a`, evaluate there with the fan engine
/// and divide by the cover degree.
pub fn intersection_via_cover(frame: &BlowupFrame, k: usize) -> Result<Q> {
    let cover = finite_cover_pull(frame, frame.ambient.weights())?;
    let base = ToricBlowup::new(&cover.base);
    let s = frame.s();
    let v = base.intersection_bi(k)?;
    Ok(pow_q(&cover.scaling.0, k as u32) * pow_q(&cover.scaling.1, (s - k) as u32) * v / qb(cover.degree))
}

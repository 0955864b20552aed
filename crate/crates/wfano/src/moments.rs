//! Moment integrals over the two-piece flag region of the generalized
//! Eckardt configuration, the resulting local stability threshold bound
//! and the instability criterion.
//!
//! The region `D_n` lives in `R^n_{>0}` and splits along `x_1 = 1/a`:
//! over `x_1 <= 1/a` the remaining coordinates satisfy
//! `x_2 + ... + x_n < a x_1`; over `1/a < x_1 < (ak+1)/a` they satisfy
//! `x_2 + ... + x_n < ((ak+1)/a - x_1)/k`.

use num_traits::{One, Signed};

use crate::error::{pre, Error, Result};
use crate::rat::{factorial, min_q, qb, qi, qu, Q};
use crate::upoly::UPoly;

pub const MAX_DIMENSION: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MomentRegion {
    pub n: u32,
    pub a: u64,
    pub k: u64,
}

/// One piece `lo < x_1 < hi` with inner simplex bound `t(x_1)`.
struct Piece {
    lo: Q,
    hi: Q,
    t: UPoly,
}

impl MomentRegion {
    pub fn new(n: u32, a: u64, k: u64) -> Result<Self> {
        if !(2..=MAX_DIMENSION).contains(&n) {
            return pre(format!("n must lie in 2..={MAX_DIMENSION}, got {n}"));
        }
        if a == 0 || k == 0 {
            return pre("a and k must be positive");
        }
        Ok(Self { n, a, k })
    }

    fn pieces(&self) -> [Piece; 2] {
        let a = qu(self.a);
        let k = qu(self.k);
        let split = Q::one() / &a;
        let top = qu(self.a * self.k + 1) / &a;
        [
            Piece {
                lo: Q::from_integer(0.into()),
                hi: split.clone(),
                t: UPoly::affine(a.clone(), Q::from_integer(0.into())),
            },
            Piece { lo: split, hi: top.clone(), t: UPoly::affine(-(Q::one() / &k), top / k) },
        ]
    }

    /// `t^{n-1}/(n-1)!`, the volume of `{x_2 + ... + x_n < t}`.
    fn inner_volume(&self, t: &UPoly) -> UPoly {
        t.pow(self.n - 1).scale(&(Q::one() / qb(factorial(self.n - 1))))
    }

    /// `t^n/n!`, the integral of one coordinate over that simplex.
    fn inner_moment(&self, t: &UPoly) -> UPoly {
        t.pow(self.n).scale(&(Q::one() / qb(factorial(self.n))))
    }

    pub fn volume(&self) -> Q {
        self.pieces().iter().map(|p| self.inner_volume(&p.t).integrate(&p.lo, &p.hi)).sum()
    }

    /// `(ak+1)/(a n!)`.
    pub fn expected_volume(&self) -> Q {
        qu(self.a * self.k + 1) / (qu(self.a) * qb(factorial(self.n)))
    }

    /// `n! a/(ak+1)`, the normalizing factor of the S-integral.
    pub fn normalizer(&self) -> Q {
        Q::one() / self.expected_volume()
    }

    /// `int_{D_n} (x_j + v_j) dx` with `v_j` nonzero only for `j = n`
    /// with `q` on the distinguished line, where it is
    /// `(x_1 - 1/a)/k` on the second piece.
    pub fn moment(&self, j: u32, q_in_w1: bool) -> Result<Q> {
        if j < 1 || j > self.n {
            return Err(Error::IndexOutOfRange { index: j as usize, len: self.n as usize });
        }
        let x = UPoly::t();
        let mut total = Q::from_integer(0.into());
        for (idx, p) in self.pieces().iter().enumerate() {
            let vol = self.inner_volume(&p.t);
            let integrand = if j == 1 { &x * &vol } else { self.inner_moment(&p.t) };
            total += integrand.integrate(&p.lo, &p.hi);
            if j == self.n && q_in_w1 && idx == 1 {
                let shift = UPoly::affine(Q::one() / qu(self.k), -(Q::one() / (qu(self.a) * qu(self.k))));
                total += (&shift * &vol).integrate(&p.lo, &p.hi);
            }
        }
        Ok(total)
    }
}

/// `S(O_X(1); Y_1 > ... > Y_j)` by exact integration.
pub fn s_value(n: u32, a: u64, k: u64, j: u32, q_in_w1: bool) -> Result<Q> {
    let region = MomentRegion::new(n, a, k)?;
    Ok(region.normalizer() * region.moment(j, q_in_w1)?)
}

/// The stated closed forms for the same S-values.
pub fn s_value_closed_form(n: u32, a: u64, k: u64, j: u32, q_in_w1: bool) -> Result<Q> {
    MomentRegion::new(n, a, k)?;
    if j < 1 || j > n {
        return Err(Error::IndexOutOfRange { index: j as usize, len: n as usize });
    }
    let (nq, ak) = (qu(n as u64), qu(a * k));
    Ok(if j == 1 {
        (&ak + &nq) / (qu(a) * (&nq + qi(1)))
    } else if j == n && q_in_w1 {
        (qi(2) * &ak + qi(1)) / ((&ak + qi(1)) * (&nq + qi(1)))
    } else {
        Q::one() / (nq + qi(1))
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EckardtDelta {
    /// `min{n(n+1)/(ak+n), (ak+1)(n+1)/(2ak+1)}`.
    pub lower: Q,
    /// `A_X(E)/S(E) = n(n+1)/(ak+n)`.
    pub upper: Q,
    /// True when `ak + 1 >= n`, where `lower == upper`.
    pub exact: bool,
}

pub fn delta_eckardt(n: u32, a: u64, k: u64) -> Result<EckardtDelta> {
    MomentRegion::new(n, a, k)?;
    let (nq, ak) = (qu(n as u64), qu(a * k));
    let upper = &nq * (&nq + qi(1)) / (&ak + &nq);
    let other = (&ak + qi(1)) * (&nq + qi(1)) / (qi(2) * &ak + qi(1));
    let lower = min_q(upper.clone(), other);
    Ok(EckardtDelta { exact: a * k + 1 >= n as u64, lower, upper })
}

/// The same bound assembled from the integrated S-values: the minimum of
/// `A_X(E)/S_1` with `A_X(E) = n/a` and `1/S_j` over every later flag
/// step and both positions of `q`.
pub fn delta_eckardt_from_moments(n: u32, a: u64, k: u64) -> Result<Q> {
    let a_e = qu(n as u64) / qu(a);
    let mut best = a_e / s_value(n, a, k, 1, false)?;
    for j in 2..=n {
        for q_in in [false, true] {
            best = min_q(best, Q::one() / s_value(n, a, k, j, q_in)?);
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnstableVerdict {
    /// `delta(X) <= witness < 1`.
    KUnstable { witness: Q },
    /// The criterion does not apply; the witness bound is reported when
    /// it is defined.
    Inconclusive { witness: Q, reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnstableCheck {
    pub index: i64,
    /// `a^2 k (k-1)/(a-1)`.
    pub threshold: Q,
    pub verdict: UnstableVerdict,
}

/// Instability of the generalized Eckardt configuration: K-unstable when
/// `n > a^2 k (k-1)/(a-1)` and the Fano index `n + a - ak` is positive.
pub fn unstable_check(n: u32, a: u64, k: u64) -> Result<UnstableCheck> {
    MomentRegion::new(n, a, k)?;
    if a < 2 {
        return pre("the instability criterion needs a >= 2");
    }
    let index = n as i64 + a as i64 - (a * k) as i64;
    if index <= 0 {
        return Err(Error::Precondition(format!("not Fano: index n + a - ak = {index}")));
    }
    let threshold = qu(a * a * k * (k - 1)) / qu(a - 1);
    let (nq, ak) = (qu(n as u64), qu(a * k));
    let witness = &nq * (&nq + qi(1)) / (qi(index) * (&ak + &nq));
    let verdict = if nq > threshold {
        if !(witness < Q::one()) {
            return Err(Error::Invariant(format!("criterion holds but witness {witness} is not below 1")));
        }
        UnstableVerdict::KUnstable { witness }
    } else {
        let reason = format!("n = {n} does not exceed a^2 k (k-1)/(a-1) = {threshold}");
        UnstableVerdict::Inconclusive { witness, reason }
    };
    Ok(UnstableCheck { index, threshold, verdict })
}

/// One row of the moment table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentRow {
    pub n: u32,
    pub a: u64,
    pub k: u64,
    pub j: u32,
    pub q_in_w1: bool,
    pub s: Q,
    pub closed_form: Q,
}

impl MomentRow {
    pub fn matches(&self) -> bool {
        self.s == self.closed_form
    }
}

/// Rows in the order `n, a, k, j, q_in_w1` over the given inclusive ranges.
pub fn moment_table(n_range: (u32, u32), a_range: (u64, u64), k_range: (u64, u64)) -> Result<Vec<MomentRow>> {
    let mut rows = Vec::new();
    for n in n_range.0..=n_range.1 {
        for a in a_range.0..=a_range.1 {
            for k in k_range.0..=k_range.1 {
                for j in 1..=n {
                    for q_in_w1 in [false, true] {
                        rows.push(MomentRow {
                            n,
                            a,
                            k,
                            j,
                            q_in_w1,
                            s: s_value(n, a, k, j, q_in_w1)?,
                            closed_form: s_value_closed_form(n, a, k, j, q_in_w1)?,
                        });
                    }
                }
            }
        }
    }
    Ok(rows)
}

/// Whether `s_value(j = 1) > 1/(n+1)`.
pub fn first_step_exceeds_uniform(n: u32, a: u64, k: u64) -> Result<bool> {
    let s1 = s_value(n, a, k, 1, false)?;
    Ok((s1 - Q::one() / qu(n as u64 + 1)).is_positive())
}

//! Local stability-threshold bounds at a surface point from a plt blowup
//! with exceptional curve `C`, and the two closed-form surface bounds used
//! by the certificate engine.

use num_traits::{One, Signed, Zero};

use crate::convex::gravity::{gravity_bounds, GravityInput};
use crate::error::{pre, Result};
use crate::rat::{max_q, min_q, qi, qu, Q};

/// Data attached to the exceptional curve `C` over a surface point:
/// log discrepancy `A`, the different coefficients `d_i`, a certified
/// lower bound `eps` for the nef threshold of `C`, and `(L^2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceLocalData {
    pub a_log: Q,
    pub d_list: Vec<Q>,
    pub eps: Q,
    pub l2: Q,
    pub dc: Q,
    pub dmax: Q,
}

impl SurfaceLocalData {
    pub fn new(a_log: Q, mut d_list: Vec<Q>, eps: Q, l2: Q) -> Result<Self> {
        if !a_log.is_positive() || !eps.is_positive() || !l2.is_positive() {
            return pre("A, eps and (L^2) must be positive");
        }
        if d_list.iter().any(|d| !d.is_positive() || d >= &Q::one()) {
            return pre("different coefficients must lie in (0, 1)");
        }
        d_list.sort();
        let dc: Q = d_list.iter().sum();
        let dmax = d_list.last().cloned().unwrap_or_else(Q::zero);
        let two = qi(2);
        if dc >= two {
            return pre("sum of different coefficients must be below 2");
        }
        // sigma^*L - eps C nef forces eps^2 (C^2) + (L^2) >= 0 with
        // (C^2) = -(2 - d_C)/A.
        if &eps * &eps * (&two - &dc) / &a_log > l2 {
            return pre("eps exceeds the bound allowed by (L^2) and (C^2)");
        }
        Ok(Self { a_log, d_list, eps, l2, dc, dmax })
    }

    /// A `1/a(1, 1)` point blown up ordinarily,
    /// so `d_C = 0` and `A = 2/a`.
    pub fn quotient_point(a: u64, eps: Q, l2: Q) -> Result<Self> {
        if a == 0 {
            return pre("a must be positive");
        }
        Self::new(Q::new(2.into(), a.into()), Vec::new(), eps, l2)
    }

    /// `(2 - d_C)/A`, minus the self-intersection of `C`.
    pub fn slope(&self) -> Q {
        (qi(2) - &self.dc) / &self.a_log
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GravityDelta {
    /// The lower bound for `delta_p`.
    pub delta: Q,
    /// `A / S`-type term.
    pub first: Q,
    /// `(1 - d_m) / S(C > q)`-type term.
    pub second: Q,
    /// Upper bound for `S(L; C)`.
    pub s_bound: Q,
    /// Upper bound for `S(L; C > q)`.
    pub s_flag_bound: Q,
    /// `T(L; C)` in the equality case.
    pub t_equality: Q,
}

/// The direct closed forms.
pub fn delta_lower_gravity(data: &SurfaceLocalData) -> GravityDelta {
    let two_minus = qi(2) - &data.dc;
    let eps = &data.eps;
    let denom = eps * eps * &two_minus / &data.a_log + &data.l2;
    let first = qi(3) * eps * &two_minus / &denom;
    let second = qi(3) * eps * (Q::one() - &data.dmax) / &data.l2;
    let s_bound = &denom / (qi(3) * eps * &two_minus / &data.a_log);
    let s_flag_bound = &data.l2 / (qi(3) * eps);
    let t_equality = &data.l2 * &data.a_log / (eps * &two_minus);
    GravityDelta { delta: min_q(first.clone(), second.clone()), first, second, s_bound, s_flag_bound, t_equality }
}

/// The same bound obtained by feeding `c_0 = 0`, `c_1 = eps`,
/// `c_2 = eps (2 - d_C)/A`, `V = (L^2)/2` into the barycenter bounds.
pub fn delta_lower_gravity_via_bounds(data: &SurfaceLocalData) -> Result<GravityDelta> {
    let input = GravityInput::new(Q::zero(), data.eps.clone(), &data.eps * data.slope(), &data.l2 / qi(2))?;
    let b = gravity_bounds(&input)?;
    let first = &data.a_log / &b.b1_max;
    let second = (Q::one() - &data.dmax) / &b.b2_max;
    Ok(GravityDelta {
        delta: min_q(first.clone(), second.clone()),
        first,
        second,
        s_bound: b.b1_max,
        s_flag_bound: b.b2_max,
        t_equality: b.t1,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceBound {
    pub value: Q,
    pub applicable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceBounds {
    /// `3((m+1)a+1)/((ma+1)d)`, needs `d = ak+1` with `k >= m+1`.
    pub singular: SurfaceBound,
    /// `3(ma+1)/d`, needs `d >= (ma+1)^2`.
    pub dbig: SurfaceBound,
}

impl SurfaceBounds {
    /// Largest applicable bound.
    pub fn best(&self) -> Option<Q> {
        [&self.singular, &self.dbig].into_iter().filter(|b| b.applicable).map(|b| b.value.clone()).reduce(max_q)
    }
}

pub fn delta_surface_bounds(a: u64, m: u64, d: u64) -> Result<SurfaceBounds> {
    if a == 0 || m == 0 || d == 0 {
        return pre("a, m and d must be positive");
    }
    let ma1 = m * a + 1;
    let singular_ok = d > 1 && (d - 1).is_multiple_of(a) && (d - 1) / a > m;
    let singular = SurfaceBound { value: qi(3) * qu((m + 1) * a + 1) / (qu(ma1) * qu(d)), applicable: singular_ok };
    let dbig = SurfaceBound { value: qi(3) * qu(ma1) / qu(d), applicable: d >= ma1 * ma1 };
    Ok(SurfaceBounds { singular, dbig })
}

/// Both surface bounds recomputed as quotient point bounds: the singular one
/// from `eps = ((m+1)a+1)/((ma+1)a)`, the other from `eps = (ma+1)/a`,
/// each with `(L^2) = d/a`. Entries are `None` when the nef threshold
/// certificate is incompatible with `(L^2)`.
pub fn surface_bounds_via_quotient_point(a: u64, m: u64, d: u64) -> (Option<Q>, Option<Q>) {
    let l2 = qu(d) / qu(a);
    let run =
        |eps: Q| SurfaceLocalData::quotient_point(a, eps, l2.clone()).ok().map(|data| delta_lower_gravity(&data).delta);
    (run(qu((m + 1) * a + 1) / (qu(m * a + 1) * qu(a))), run(qu(m * a + 1) / qu(a)))
}

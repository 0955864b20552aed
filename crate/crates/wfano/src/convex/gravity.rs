//! Barycenter bounds for planar convex bodies whose part over `[0, c_1]`
//! is a prescribed trapezoid, and the extremal body attaining them.

use num_traits::{Signed, Zero};

use crate::convex::polygon::RationalPolygon;
use crate::error::{pre, Result};
use crate::rat::{qi, Q};

/// Area `V` and the trapezoid `{0 <= x <= c_1, 0 <= y <= top(x)}` with
/// `top(0) = c_0`, `top(c_1) = c_2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GravityInput {
    pub c0: Q,
    pub c1: Q,
    pub c2: Q,
    pub v: Q,
}

impl GravityInput {
    pub fn new(c0: Q, c1: Q, c2: Q, v: Q) -> Result<Self> {
        if c0.is_negative() {
            return pre("c0 must be nonnegative");
        }
        if !c1.is_positive() || !c2.is_positive() || !v.is_positive() {
            return pre("c1, c2 and V must be positive");
        }
        if c2 < c0 {
            return pre("c2 must be at least c0");
        }
        if &c1 * (&c0 + &c2) / qi(2) > v {
            return pre("V is smaller than the area of the trapezoid over [0, c1]");
        }
        Ok(Self { c0, c1, c2, v })
    }

    /// The top edge `y = ((c_2 - c_0)/c_1) x + c_0`.
    pub fn top(&self, x: &Q) -> Q {
        (&self.c2 - &self.c0) / &self.c1 * x + &self.c0
    }

    pub fn trapezoid_area(&self) -> Q {
        &self.c1 * (&self.c0 + &self.c2) / qi(2)
    }

    pub fn trapezoid(&self) -> Result<RationalPolygon> {
        RationalPolygon::hull(&[
            (Q::zero(), Q::zero()),
            (self.c1.clone(), Q::zero()),
            (self.c1.clone(), self.c2.clone()),
            (Q::zero(), self.c0.clone()),
        ])
    }

    /// Whether `p` meets `{x <= c_1}` exactly in the trapezoid.
    pub fn slice_condition_holds(&self, p: &RationalPolygon) -> bool {
        let (lo, _) = p.x_range();
        if !lo.is_zero() {
            return false;
        }
        match (p.clip_left_of(&self.c1), self.trapezoid()) {
            (Some(left), Ok(trap)) => left.same_as(&trap),
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GravityBounds {
    pub b1_max: Q,
    pub b2_max: Q,
    /// Right end of the extremal body's projection.
    pub t1: Q,
    /// Height of the extremal body's last vertex `(t_1, y*)`.
    pub y_star: Q,
    pub extremal: RationalPolygon,
}

pub fn b1_bound(g: &GravityInput) -> Q {
    let (c0, c1, c2, v) = (&g.c0, &g.c1, &g.c2, &g.v);
    (c0 * c0 * c1 * c1 - qi(4) * c0 * c1 * v + qi(2) * c1 * c2 * v + qi(4) * v * v) / (qi(6) * c2 * v)
}

pub fn b2_bound(g: &GravityInput) -> Q {
    let (c0, c1, c2, v) = (&g.c0, &g.c1, &g.c2, &g.v);
    (-(c0 * c0 * c0 * c1 * c1) + qi(4) * c0 * c0 * c1 * v - qi(4) * c0 * v * v + qi(4) * c2 * v * v)
        / (qi(6) * c1 * c2 * v)
}

/// Both barycenter bounds and the convex hull of `(0, c_0)`, `(0, 0)`,
/// `(c_1, 0)`, `(t_1, y*)`.
pub fn gravity_bounds(g: &GravityInput) -> Result<GravityBounds> {
    let (c0, c1, c2, v) = (&g.c0, &g.c1, &g.c2, &g.v);
    let t1 = (qi(2) * v - c0 * c1) / c2;
    let y_star = (qi(2) * c2 * v - c0 * (qi(2) * v - c0 * c1)) / (c1 * c2);
    let extremal = RationalPolygon::hull(&[
        (Q::zero(), c0.clone()),
        (Q::zero(), Q::zero()),
        (c1.clone(), Q::zero()),
        (t1.clone(), y_star.clone()),
    ])?;
    Ok(GravityBounds { b1_max: b1_bound(g), b2_max: b2_bound(g), t1, y_star, extremal })
}

//! Convex bodies described by their vertical slices over a partition of
//! `[0, t_q]`: between an affine lower and an affine upper boundary on
//! each interval.

use num_traits::{Signed, Zero};

use crate::convex::polygon::{Point, RationalPolygon};
use crate::error::{pre, Result};
use crate::rat::{q, qu, Q};
use crate::upoly::UPoly;

/// `slope * x + intercept`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffinePiece {
    pub slope: Q,
    pub intercept: Q,
}

impl AffinePiece {
    pub fn new(slope: Q, intercept: Q) -> Self {
        Self { slope, intercept }
    }

    pub fn zero() -> Self {
        Self::new(Q::zero(), Q::zero())
    }

    /// The affine function through `(x0, y0)` and `(x1, y1)`, `x0 != x1`.
    pub fn through(p0: &Point, p1: &Point) -> Self {
        let slope = (&p1.1 - &p0.1) / (&p1.0 - &p0.0);
        let intercept = &p0.1 - &slope * &p0.0;
        Self::new(slope, intercept)
    }

    pub fn eval(&self, x: &Q) -> Q {
        &self.slope * x + &self.intercept
    }

    fn poly(&self) -> UPoly {
        UPoly::affine(self.slope.clone(), self.intercept.clone())
    }
}

/// A planar convex body `{t_0 <= x <= t_q, lower(x) <= y <= upper(x)}`
/// with piecewise affine boundaries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlicedBody {
    breakpoints: Vec<Q>,
    upper: Vec<AffinePiece>,
    lower: Vec<AffinePiece>,
}

impl SlicedBody {
    /// Checks: breakpoints start at 0 and increase; one upper and one
    /// lower piece per interval; both boundaries continuous; the upper
    /// one concave and the lower one convex; the slice length is
    /// nonnegative everywhere and positive somewhere.
    pub fn new(breakpoints: Vec<Q>, upper: Vec<AffinePiece>, lower: Vec<AffinePiece>) -> Result<Self> {
        let q = breakpoints.len().saturating_sub(1);
        if q == 0 {
            return pre("a sliced body needs at least two breakpoints");
        }
        if !breakpoints[0].is_zero() {
            return pre("the first breakpoint must be 0");
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return pre("breakpoints must be strictly increasing");
        }
        if upper.len() != q || lower.len() != q {
            return pre(format!(
                "expected {q} pieces per boundary, got {} upper and {} lower",
                upper.len(),
                lower.len()
            ));
        }
        for i in 1..q {
            let t = &breakpoints[i];
            if upper[i - 1].eval(t) != upper[i].eval(t) || lower[i - 1].eval(t) != lower[i].eval(t) {
                return pre(format!("boundary is discontinuous at breakpoint {i}"));
            }
            if upper[i].slope > upper[i - 1].slope {
                return pre(format!("upper boundary is not concave at breakpoint {i}"));
            }
            if lower[i].slope < lower[i - 1].slope {
                return pre(format!("lower boundary is not convex at breakpoint {i}"));
            }
        }
        let mut positive = false;
        for i in 0..q {
            for t in [&breakpoints[i], &breakpoints[i + 1]] {
                let w = upper[i].eval(t) - lower[i].eval(t);
                if w.is_negative() {
                    return pre(format!("upper boundary lies below lower boundary near x = {t}"));
                }
                positive |= w.is_positive();
            }
        }
        if !positive {
            return pre("body has zero area");
        }
        Ok(Self { breakpoints, upper, lower })
    }

    /// A body whose lower boundary is `y = 0`.
    pub fn over_axis(breakpoints: Vec<Q>, upper: Vec<AffinePiece>) -> Result<Self> {
        let lower = vec![AffinePiece::zero(); upper.len()];
        Self::new(breakpoints, upper, lower)
    }

    /// Slices a convex polygon whose leftmost point has `x = 0`.
    pub fn from_polygon(p: &RationalPolygon) -> Result<Self> {
        let (lo, _) = p.x_range();
        if !lo.is_zero() {
            return pre("polygon must start at x = 0");
        }
        let mut xs: Vec<Q> = p.vertices().iter().map(|v| v.0.clone()).collect();
        xs.sort();
        xs.dedup();
        let mut upper = Vec::new();
        let mut lower = Vec::new();
        for w in xs.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let (la, ua) = p.slice(a).expect("breakpoint inside projection");
            let (lb, ub) = p.slice(b).expect("breakpoint inside projection");
            upper.push(AffinePiece::through(&(a.clone(), ua), &(b.clone(), ub)));
            lower.push(AffinePiece::through(&(a.clone(), la), &(b.clone(), lb)));
        }
        Self::new(xs, upper, lower)
    }

    pub fn breakpoints(&self) -> &[Q] {
        &self.breakpoints
    }

    pub fn upper(&self) -> &[AffinePiece] {
        &self.upper
    }

    pub fn lower(&self) -> &[AffinePiece] {
        &self.lower
    }

    /// Right end `t_q` of the projection.
    pub fn t_max(&self) -> &Q {
        self.breakpoints.last().expect("validated nonempty")
    }

    pub fn has_axis_lower_boundary(&self) -> bool {
        self.lower.iter().all(|p| p.slope.is_zero() && p.intercept.is_zero())
    }

    fn piece_index(&self, x: &Q) -> Option<usize> {
        if x < &self.breakpoints[0] || x > self.t_max() {
            return None;
        }
        let i = self.breakpoints.partition_point(|t| t <= x);
        Some(i.saturating_sub(1).min(self.upper.len() - 1))
    }

    /// `(lower(x), upper(x))`, or `None` outside `[0, t_q]`.
    pub fn slice(&self, x: &Q) -> Option<(Q, Q)> {
        let i = self.piece_index(x)?;
        Some((self.lower[i].eval(x), self.upper[i].eval(x)))
    }

    /// Slice length `upper(x) - lower(x)`.
    pub fn width(&self, x: &Q) -> Option<Q> {
        self.slice(x).map(|(l, u)| u - l)
    }

    fn integrate<F: Fn(&UPoly, &UPoly) -> UPoly>(&self, f: F) -> Q {
        (0..self.upper.len())
            .map(|i| {
                let p = f(&self.lower[i].poly(), &self.upper[i].poly());
                p.integrate(&self.breakpoints[i], &self.breakpoints[i + 1])
            })
            .sum()
    }

    pub fn area(&self) -> Q {
        self.integrate(|l, u| u - l)
    }

    /// Exact barycenter `(b_1, b_2)`.
    pub fn barycenter(&self) -> Point {
        let area = self.area();
        let mx = self.integrate(|l, u| &UPoly::t() * &(u - l));
        let my = self.integrate(|l, u| (&(u * u) - &(l * l)).scale(&q(1, 2)));
        (mx / &area, my / area)
    }

    /// The same body as a polygon (boundary vertices, collinear ones
    /// dropped).
    pub fn to_polygon(&self) -> Result<RationalPolygon> {
        let mut pts = Vec::new();
        for (i, t) in self.breakpoints.iter().enumerate() {
            let j = i.min(self.upper.len() - 1);
            pts.push((t.clone(), self.lower[j].eval(t)));
            pts.push((t.clone(), self.upper[j].eval(t)));
        }
        RationalPolygon::hull(&pts)
    }

    /// `samples_per_piece + 1` evenly spaced exact samples `(x, lower,
    /// upper)` on each interval, for plotting.
    pub fn boundary_samples(&self, samples_per_piece: u32) -> Vec<(Q, Q, Q)> {
        let m = samples_per_piece.max(1);
        let mut out = Vec::new();
        for i in 0..self.upper.len() {
            let (a, b) = (&self.breakpoints[i], &self.breakpoints[i + 1]);
            let start = if i == 0 { 0 } else { 1 };
            for s in start..=m {
                let x = a + (b - a) * qu(s as u64) / qu(m as u64);
                out.push((x.clone(), self.lower[i].eval(&x), self.upper[i].eval(&x)));
            }
        }
        out
    }

    /// Restriction to `[0, c]` for a breakpoint-aligned or interior `c`.
    pub fn truncate(&self, c: &Q) -> Result<Self> {
        if !c.is_positive() || c > self.t_max() {
            return pre("truncation point must lie in (0, t_q]");
        }
        let mut bps = vec![Q::zero()];
        let mut up = Vec::new();
        let mut lo = Vec::new();
        for i in 0..self.upper.len() {
            if &self.breakpoints[i] >= c {
                break;
            }
            let right = if &self.breakpoints[i + 1] < c { self.breakpoints[i + 1].clone() } else { c.clone() };
            bps.push(right);
            up.push(self.upper[i].clone());
            lo.push(self.lower[i].clone());
        }
        Self::new(bps, up, lo)
    }
}

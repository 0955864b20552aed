//! Exact convex polygons with rational vertices.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};

use crate::error::{pre, Result};
use crate::rat::{qi, Q};

pub type Point = (Q, Q);

fn cross(o: &Point, a: &Point, b: &Point) -> Q {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

/// A convex polygon with counterclockwise vertices, no three consecutive
/// vertices collinear and positive area.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPolygon {
    vertices: Vec<Point>,
}

impl RationalPolygon {
    /// Validates the vertex list as given; no reordering is done.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return pre(format!("a polygon needs at least 3 vertices, got {n}"));
        }
        for i in 0..n {
            let c = cross(&vertices[i], &vertices[(i + 1) % n], &vertices[(i + 2) % n]);
            if c.is_zero() {
                return pre(format!("vertices {}, {}, {} are collinear or repeated", i, (i + 1) % n, (i + 2) % n));
            }
            if c.is_negative() {
                return pre("vertices are not in convex counterclockwise position");
            }
        }
        let poly = Self { vertices };
        // A star-shaped self-overlapping cycle can pass the local test; a
        // convex counterclockwise cycle winds exactly once.
        let mut turning = 0usize;
        for i in 0..n {
            let a = &poly.vertices[i];
            let b = &poly.vertices[(i + 1) % n];
            let above = (b.1 > a.1) || (b.1 == a.1 && b.0 < a.0);
            let next = &poly.vertices[(i + 2) % n];
            let above_next = (next.1 > b.1) || (next.1 == b.1 && next.0 < b.0);
            if above != above_next {
                turning += 1;
            }
        }
        if turning != 2 {
            return pre("vertex cycle winds more than once");
        }
        Ok(poly)
    }

    /// Convex hull of a finite point set; duplicate and collinear points
    /// are dropped.
    pub fn hull(points: &[Point]) -> Result<Self> {
        let mut pts: Vec<Point> = points.to_vec();
        pts.sort_by(|a, b| match a.0.cmp(&b.0) {
            Ordering::Equal => a.1.cmp(&b.1),
            o => o,
        });
        pts.dedup();
        if pts.len() < 3 {
            return pre("hull of fewer than 3 distinct points is degenerate");
        }
        let mut lower: Vec<Point> = Vec::new();
        for p in &pts {
            while lower.len() >= 2 && !cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive() {
                lower.pop();
            }
            lower.push(p.clone());
        }
        let mut upper: Vec<Point> = Vec::new();
        for p in pts.iter().rev() {
            while upper.len() >= 2 && !cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive() {
                upper.pop();
            }
            upper.push(p.clone());
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        if lower.len() < 3 {
            return pre("points are collinear; hull has zero area");
        }
        Self::new(lower)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Twice the signed area, summed edge by edge.
    fn doubled_area(&self) -> Q {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let (a, b) = (&self.vertices[i], &self.vertices[(i + 1) % n]);
                &a.0 * &b.1 - &b.0 * &a.1
            })
            .sum()
    }

    pub fn area(&self) -> Q {
        self.doubled_area() / qi(2)
    }

    pub fn centroid(&self) -> Point {
        let n = self.vertices.len();
        let mut cx = Q::zero();
        let mut cy = Q::zero();
        for i in 0..n {
            let (a, b) = (&self.vertices[i], &self.vertices[(i + 1) % n]);
            let w = &a.0 * &b.1 - &b.0 * &a.1;
            cx += (&a.0 + &b.0) * &w;
            cy += (&a.1 + &b.1) * &w;
        }
        let six_a = self.doubled_area() * qi(3);
        (cx / &six_a, cy / six_a)
    }

    pub fn x_range(&self) -> (Q, Q) {
        let xs = self.vertices.iter().map(|p| &p.0);
        let lo = xs.clone().min().cloned().unwrap_or_default();
        let hi = xs.max().cloned().unwrap_or_default();
        (lo, hi)
    }

    /// The vertical slice `{y : (x, y) in P}` as `(min, max)`, or `None`
    /// when `x` lies outside the projection.
    pub fn slice(&self, x: &Q) -> Option<(Q, Q)> {
        let n = self.vertices.len();
        let mut ys: Vec<Q> = Vec::new();
        for i in 0..n {
            let (a, b) = (&self.vertices[i], &self.vertices[(i + 1) % n]);
            let (lo, hi) = if a.0 <= b.0 { (a, b) } else { (b, a) };
            if x < &lo.0 || x > &hi.0 {
                continue;
            }
            if lo.0 == hi.0 {
                ys.push(lo.1.clone());
                ys.push(hi.1.clone());
            } else {
                let t = (x - &lo.0) / (&hi.0 - &lo.0);
                ys.push(&lo.1 + t * (&hi.1 - &lo.1));
            }
        }
        let lo = ys.iter().min()?.clone();
        let hi = ys.iter().max()?.clone();
        Some((lo, hi))
    }

    pub fn contains(&self, p: &Point) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| !cross(&self.vertices[i], &self.vertices[(i + 1) % n], p).is_negative())
    }

    /// Intersection with the half plane `x <= c`, or `None` if it has
    /// zero area.
    pub fn clip_left_of(&self, c: &Q) -> Option<Self> {
        let n = self.vertices.len();
        let mut out: Vec<Point> = Vec::new();
        for i in 0..n {
            let (a, b) = (&self.vertices[i], &self.vertices[(i + 1) % n]);
            let a_in = &a.0 <= c;
            let b_in = &b.0 <= c;
            if a_in {
                out.push(a.clone());
            }
            if a_in != b_in && a.0 != *c && b.0 != *c {
                let t = (c - &a.0) / (&b.0 - &a.0);
                out.push((c.clone(), &a.1 + t * (&b.1 - &a.1)));
            }
        }
        Self::hull(&out).ok()
    }

    /// Same polygon up to the choice of starting vertex.
    pub fn same_as(&self, other: &Self) -> bool {
        let n = self.vertices.len();
        if n != other.vertices.len() {
            return false;
        }
        (0..n).any(|s| (0..n).all(|i| self.vertices[(i + s) % n] == other.vertices[i]))
    }
}

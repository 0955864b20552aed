//! Okounkov bodies of the three surface families with explicit flags,
//! and the curve models whose Zariski decompositions produce them.

use num_traits::{One, Zero};

use crate::convex::gravity::GravityInput;
use crate::convex::sliced::{AffinePiece, SlicedBody};
use crate::convex::zariski::{zariski_decompose, CurveModel};
use crate::error::{pre, Result};
use crate::rat::{qi, qu, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurfaceCase {
    /// Degree `d = bk + a` surface in `P(1,1,1,b)` at a smooth point `p`;
    /// `line_in_surface` says whether the ruling line through `p` lies
    /// on the surface.
    LineFlag { a: u64, b: u64, k: u64, line_in_surface: bool },
    /// `P(1,1,a)` with the flag `C > q` over the `1/a(1,1)` point.
    Hirzebruch { a: u64 },
    /// `P(1,a,a+1)` with the flag `C > q` over the `1/a(1,1)` point.
    Hirzebruch2 { a: u64 },
}

impl SurfaceCase {
    pub fn parse(name: &str, params: &[u64], line_in_surface: bool) -> Result<Self> {
        let need = |n: usize| -> Result<()> {
            if params.len() != n {
                return pre(format!("case {name} takes {n} parameters, got {}", params.len()));
            }
            Ok(())
        };
        match name {
            "line-flag" => {
                need(3)?;
                Ok(Self::LineFlag { a: params[0], b: params[1], k: params[2], line_in_surface })
            }
            "hirzebruch" => {
                need(1)?;
                Ok(Self::Hirzebruch { a: params[0] })
            }
            "hirzebruch2" => {
                need(1)?;
                Ok(Self::Hirzebruch2 { a: params[0] })
            }
            other => Err(crate::Error::Unsupported(format!(
                "unknown surface case {other:?}; expected line-flag, hirzebruch or hirzebruch2"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OkounkovBody {
    pub case: SurfaceCase,
    pub body: SlicedBody,
    /// `(L^2)`; a complete body has area `(L^2)/2`.
    pub l2: Q,
    /// False when only the part over `[0, 1]` is known.
    pub complete: bool,
    /// Trapezoid data for the barycenter bounds when the body is partial.
    pub gravity: Option<GravityInput>,
}

/// Curves `E`, `l~`, `C` on the blown-up surface with `E^2 = -ab`,
/// `l~^2 = -k`, `E.l~ = 1`, `E.C = a - 1`, `C.l~ = k`, `C^2 = 0`.
pub fn line_flag_model(a: u64, b: u64, k: u64) -> Result<CurveModel> {
    let (a, b, k) = (qu(a), qu(b), qu(k));
    CurveModel::new(
        vec!["E".into(), "l".into(), "C".into()],
        vec![
            vec![-(&a * &b), Q::one(), &a - Q::one()],
            vec![Q::one(), -k.clone(), k.clone()],
            vec![&a - Q::one(), k, Q::zero()],
        ],
    )
}

/// `sigma^* O_S(1) - x l~ = (1/b) E + (1 - x) l~ + C`.
pub fn line_flag_class(b: u64, x: &Q) -> Vec<Q> {
    vec![Q::one() / qu(b), Q::one() - x, Q::one()]
}

/// Curves `E`, `l_1, ..., l_N` with `N = ak + 1`, `E^2 = -a`,
/// `l_i^2 = -k`, `E.l_i = 1` and `l_i . l_j = 0`: the blown-up surface
/// of the two dimensional generalized Eckardt configuration.
pub fn eckardt_surface_model(a: u64, k: u64) -> Result<CurveModel> {
    let n = (a * k + 1) as usize;
    let mut names = vec!["E".to_string()];
    names.extend((1..=n).map(|i| format!("l{i}")));
    let mut m = vec![vec![Q::zero(); n + 1]; n + 1];
    m[0][0] = -qu(a);
    for i in 1..=n {
        m[0][i] = Q::one();
        m[i][0] = Q::one();
        m[i][i] = -qu(k);
    }
    CurveModel::new(names, m)
}

/// `sigma^* O(1) - x E = sum l_i + ((ak+1)/a - x) E`.
pub fn eckardt_surface_class(a: u64, k: u64, x: &Q) -> Vec<Q> {
    let n = (a * k + 1) as usize;
    let mut v = vec![Q::one(); n + 1];
    v[0] = qu(a * k + 1) / qu(a) - x;
    v
}

pub fn okounkov_body_surface(case: SurfaceCase) -> Result<OkounkovBody> {
    match case {
        SurfaceCase::LineFlag { a, b, k, line_in_surface } => {
            if a < 1 || b < 1 || k < 2 {
                return pre("line-flag needs a, b >= 1 and k >= 2");
            }
            let d = b * k + a;
            let l2 = qu(d) / qu(b);
            if !line_in_surface {
                let body =
                    SlicedBody::over_axis(vec![Q::zero(), Q::one()], vec![AffinePiece::new(-l2.clone(), l2.clone())])?;
                return Ok(OkounkovBody { case, body, l2, complete: true, gravity: None });
            }
            // Slice length over x is P_x . l~ for the positive part P_x.
            let model = line_flag_model(a, b, k)?;
            let l = model.index_of("l").expect("model has l");
            let height = |x: Q| -> Result<Q> {
                let z = zariski_decompose(&model, &line_flag_class(b, &x))?;
                Ok(model.dot_curve(&z.positive, l))
            };
            let h0 = height(Q::zero())?;
            let h1 = height(Q::one())?;
            let body = SlicedBody::over_axis(
                vec![Q::zero(), Q::one()],
                vec![AffinePiece::through(&(Q::zero(), h0.clone()), &(Q::one(), h1.clone()))],
            )?;
            let gravity = GravityInput::new(h0, Q::one(), h1, qu(d) / qu(2 * b))?;
            Ok(OkounkovBody { case, body, l2, complete: a == 1, gravity: Some(gravity) })
        }
        SurfaceCase::Hirzebruch { a } => {
            if a < 1 {
                return pre("hirzebruch needs a >= 1");
            }
            let t = Q::one() / qu(a);
            let body = SlicedBody::over_axis(vec![Q::zero(), t.clone()], vec![AffinePiece::new(qu(a), Q::zero())])?;
            Ok(OkounkovBody { case, body, l2: t, complete: true, gravity: None })
        }
        SurfaceCase::Hirzebruch2 { a } => {
            if a < 1 {
                return pre("hirzebruch2 needs a >= 1");
            }
            let eps = Q::one() / qu(a * (a + 1));
            let t = Q::one() / qu(a);
            let up = AffinePiece::new(qu(a), Q::zero());
            let body = SlicedBody::new(
                vec![Q::zero(), eps.clone(), t.clone()],
                vec![up.clone(), up],
                vec![AffinePiece::zero(), AffinePiece::through(&(eps.clone(), Q::zero()), &(t, Q::one()))],
            )?;
            Ok(OkounkovBody { case, body, l2: eps, complete: true, gravity: None })
        }
    }
}

/// `min{A/b_1, 1/b_2}` for the barycenter `(b_1, b_2)` of a complete body,
/// where `A` is the log discrepancy of the first flag curve.
pub fn delta_from_barycenter(a_log: &Q, body: &SlicedBody) -> Q {
    let (b1, b2) = body.barycenter();
    let first = a_log / b1;
    let second = Q::one() / b2;
    if first <= second {
        first
    } else {
        second
    }
}

/// Log discrepancy of the first flag curve for each case.
pub fn first_curve_log_discrepancy(case: SurfaceCase) -> Q {
    match case {
        SurfaceCase::LineFlag { .. } => Q::one(),
        SurfaceCase::Hirzebruch { a } | SurfaceCase::Hirzebruch2 { a } => qi(2) / qu(a),
    }
}

//! Entry points for the static demo page. Each function takes plain
//! values and returns a JSON report string in the `wfano-certify/1`
//! schema; failures come back as the schema's error object.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use wfano::certify::{certify, B1Status, FanoDatum, Flags};
use wfano::convex::okounkov::{delta_from_barycenter, first_curve_log_discrepancy};
use wfano::convex::{gravity_bounds, okounkov_body_surface, SurfaceCase};
use wfano::moments::{delta_eckardt, s_value, s_value_closed_form};
use wfano::rat::{fmt_q, to_f64};
use wfano::report::{self, Obj, Report};
use wfano::wps::parse_weight_list;
use wfano::Result;

fn finish(command: &str, r: Result<Report>) -> String {
    let v = match r {
        Ok(rep) => rep.to_value(),
        Err(e) => report::error_report(command, &e),
    };
    serde_json::to_string(&v).expect("values serialize")
}

/// Okounkov body of a surface case with its vertices for drawing.
#[wasm_bindgen]
pub fn okounkov_body(case: &str, params: &str, line_in_surface: bool) -> String {
    finish(
        "okounkov case",
        (|| {
            let ps: Vec<u64> = parse_weight_list(params)?;
            let c = SurfaceCase::parse(case, &ps, line_in_surface)?;
            let body = okounkov_body_surface(c)?;
            let mut out = report::okounkov_value(&body, true);
            let poly = body.body.to_polygon()?;
            let verts: Vec<Value> = poly
                .vertices()
                .iter()
                .map(|(x, y)| json!({ "x": fmt_q(x), "y": fmt_q(y), "xf": to_f64(x), "yf": to_f64(y) }))
                .collect();
            let extra = if body.complete {
                let a_log = first_curve_log_discrepancy(c);
                Obj::new(true).q("delta_from_barycenter", &delta_from_barycenter(&a_log, &body.body)).build()
            } else {
                let g = body.gravity.as_ref().expect("partial bodies carry trapezoid data");
                let gb = gravity_bounds(g)?;
                Obj::new(true).q("b1_max", &gb.b1_max).q("b2_max", &gb.b2_max).build()
            };
            if let (Value::Object(m), Value::Object(e)) = (&mut out, extra) {
                m.extend(e);
                m.insert("vertices".into(), Value::Array(verts));
            }
            Ok(Report::new(
                "okounkov case",
                json!({ "case": case, "params": params, "line_in_surface": line_in_surface }),
                out,
            ))
        })(),
    )
}

/// Every S-value of the flag for `(n, a, k)` with the local bound.
#[wasm_bindgen]
pub fn s_values(n: u32, a: u32, k: u32) -> String {
    finish(
        "moments s-value",
        (|| {
            let (a, k) = (a as u64, k as u64);
            let mut rows = Vec::new();
            for j in 1..=n {
                for q in [false, true] {
                    if q && j != n {
                        continue;
                    }
                    let s = s_value(n, a, k, j, q)?;
                    let c = s_value_closed_form(n, a, k, j, q)?;
                    rows.push(Obj::new(true).set("j", j).set("q_in_W1", q).q("S", &s).set("match", s == c).build());
                }
            }
            let d = delta_eckardt(n, a, k)?;
            Ok(Report::new(
                "moments s-value",
                json!({ "n": n, "a": a, "k": k }),
                json!({ "rows": rows, "delta": report::eckardt_value(&d, true) }),
            ))
        })(),
    )
}

/// Certificate for `X_d` in `P(weights)`. `eckardt` is `"yes"`, `"no"` or
/// `"unknown"`; `m = 0` means unset.
#[wasm_bindgen]
pub fn certify_datum(weights: &str, degree: u32, eckardt: &str, m: u32, general: bool) -> String {
    finish(
        "certify",
        (|| {
            let eck = match B1Status::parse(eckardt)? {
                B1Status::Yes => Some(true),
                B1Status::No => Some(false),
                B1Status::Unknown => None,
            };
            let flags = Flags {
                eckardt_at_p: eck,
                m: (m > 0).then_some(m as u64),
                general_member: general,
                ..Flags::default()
            };
            let x = FanoDatum::new(parse_weight_list(weights)?, degree as u64, flags)?;
            let c = certify(&x)?;
            Ok(report::certify_report(&x, &c, true))
        })(),
    )
}

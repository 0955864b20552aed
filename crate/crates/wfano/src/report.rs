//! JSON rendering of results under the `wfano-certify/1` schema. Every
//! rational is an exact `p/q` string; with `approx` set, a sibling field
//! `<key>_approx` carries a 12 significant digit decimal.

use serde_json::{json, Map, Value};

use crate::blowup::BlowupFrame;
use crate::certify::{DeltaCertificate, EnumRow, FanoDatum, Flags, Hypothesis, TraceEntry};
use crate::convex::{OkounkovBody, SlicedBody};
use crate::error::Error;
use crate::moments::{EckardtDelta, MomentRow, UnstableCheck, UnstableVerdict};
use crate::rat::{approx, fmt_q, Q};
use crate::wps::{CoordinateStratum, NormalizationReport};

pub const SCHEMA_VERSION: &str = "wfano-certify/1";
pub const APPROX_DIGITS: usize = 12;

/// A report object: `schema_version`, `command`, `inputs`, `outputs` and
/// an optional `trace`, in that order.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub outputs: Value,
    pub trace: Option<Value>,
}

impl Report {
    pub fn new(command: &str, inputs: Value, outputs: Value) -> Self {
        Self { command: command.to_string(), inputs, outputs, trace: None }
    }

    pub fn with_trace(mut self, trace: Value) -> Self {
        self.trace = Some(trace);
        self
    }

    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("schema_version".into(), json!(SCHEMA_VERSION));
        m.insert("command".into(), json!(self.command));
        m.insert("inputs".into(), self.inputs.clone());
        m.insert("outputs".into(), self.outputs.clone());
        if let Some(t) = &self.trace {
            m.insert("trace".into(), t.clone());
        }
        Value::Object(m)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("values serialize")
    }
}

/// `precondition`, `parse`, ... for the machine-readable error object.
pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::TooShort(_) => "too_short",
        Error::NonPositiveWeight(_) => "non_positive_weight",
        Error::CommonDivisor(_) => "common_divisor",
        Error::NotWellFormed(_) => "not_well_formed",
        Error::IndexOutOfRange { .. } => "index_out_of_range",
        Error::Precondition(_) => "precondition",
        Error::Parse(_) => "parse",
        Error::Inhomogeneous { .. } => "inhomogeneous",
        Error::Unsupported(_) => "unsupported",
        Error::Invariant(_) => "invariant",
    }
}

/// Exit status for an error: 3 for an internal invariant, 2 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Invariant(_) => 3,
        _ => 2,
    }
}

pub fn error_value(command: &str, kind: &str, message: &str) -> Value {
    let mut m = Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(command));
    m.insert("error".into(), json!({ "kind": kind, "message": message }));
    Value::Object(m)
}

pub fn error_report(command: &str, e: &Error) -> Value {
    error_value(command, error_kind(e), &e.to_string())
}

/// Builder for objects holding rationals.
#[derive(Clone, Debug, Default)]
pub struct Obj {
    map: Map<String, Value>,
    approx: bool,
}

impl Obj {
    pub fn new(approx: bool) -> Self {
        Self { map: Map::new(), approx }
    }

    pub fn set(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.map.insert(key.into(), v.into());
        self
    }

    pub fn q(mut self, key: &str, x: &Q) -> Self {
        self.map.insert(key.into(), json!(fmt_q(x)));
        if self.approx {
            self.map.insert(format!("{key}_approx"), json!(approx(x, APPROX_DIGITS)));
        }
        self
    }

    pub fn opt_q(self, key: &str, x: Option<&Q>) -> Self {
        match x {
            Some(x) => self.q(key, x),
            None => self.set(key, Value::Null),
        }
    }

    pub fn qs(mut self, key: &str, xs: &[Q]) -> Self {
        self.map.insert(key.into(), Value::Array(xs.iter().map(|x| json!(fmt_q(x))).collect()));
        self
    }

    pub fn build(self) -> Value {
        Value::Object(self.map)
    }
}

pub fn q_str(x: &Q) -> Value {
    json!(fmt_q(x))
}

pub fn flags_value(f: &Flags) -> Value {
    json!({
        "eckardt_at_P": f.eckardt_at_p,
        "m": f.m,
        "b1_in_x": f.b1_in_x.as_str(),
        "general_member": f.general_member,
        "quasi_smooth": f.quasi_smooth,
    })
}

pub fn datum_inputs(d: &FanoDatum) -> Value {
    json!({
        "weights": d.ambient().explicit(),
        "degree": d.degree(),
        "flags": flags_value(d.flags()),
    })
}

fn hypothesis_value(h: &Hypothesis) -> Value {
    json!(h.to_string())
}

pub fn trace_entry_value(e: &TraceEntry, approx: bool) -> Value {
    let inputs: Map<String, Value> = e.inputs.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    Obj::new(approx)
        .set("rule", e.rule_id)
        .set("statement", e.reference)
        .set("external", e.external)
        .set("scope", e.scope.as_str())
        .set("relation", e.kind.as_str())
        .q("value", &e.value)
        .set("hypotheses", Value::Array(e.hypotheses.iter().map(hypothesis_value).collect()))
        .set("inputs", Value::Object(inputs))
        .set("note", e.note.clone())
        .build()
}

pub fn trace_value(c: &DeltaCertificate, approx: bool) -> Value {
    Value::Array(c.trace.iter().map(|e| trace_entry_value(e, approx)).collect())
}

/// Certificate summary in both polarizations.
pub fn certificate_value(c: &DeltaCertificate, approx: bool) -> Value {
    let o1 = c.to_o1();
    let ac = c.to_anticanonical();
    let b1 = &c.resolved.b1;
    Obj::new(approx)
        .set("verdict", c.verdict.as_str())
        .set("index", c.index)
        .q("bound", &o1.bound)
        .set("strict", o1.strict)
        .opt_q("upper", o1.upper.as_ref())
        .q("anticanonical_bound", &ac.bound)
        .opt_q("anticanonical_upper", ac.upper.as_ref())
        .set("bound_rule", c.bound_rule)
        .set("b1_in_x", json!({ "status": b1.status.as_str(), "rule": b1.rule, "reason": b1.reason }))
        .set("eckardt_at_P", c.resolved.eckardt)
        .set("m", c.resolved.m)
        .set("fired_rules", c.fired_rules())
        .build()
}

pub fn certify_report(d: &FanoDatum, c: &DeltaCertificate, approx: bool) -> Report {
    Report::new("certify", datum_inputs(d), certificate_value(c, approx)).with_trace(trace_value(c, approx))
}

pub fn enum_row_value(r: &EnumRow, approx: bool) -> Value {
    let c = &r.certificate;
    Obj::new(approx)
        .set("weights", r.datum.ambient().explicit())
        .set("degree", r.datum.degree())
        .set("index", c.index)
        .set("verdict", c.verdict.as_str())
        .q("bound", &c.bound)
        .set("strict", c.strict)
        .opt_q("upper", c.upper.as_ref())
        .q("anticanonical_bound", &c.to_anticanonical().bound)
        .set("bound_rule", c.bound_rule)
        .set("b1_in_x", c.resolved.b1.status.as_str())
        .build()
}

pub fn normalization_value(r: &NormalizationReport) -> Value {
    json!({
        "input": r.input.explicit(),
        "g_i": r.g_i,
        "g": r.g,
        "output": r.output.explicit(),
        "identity": r.is_identity(),
    })
}

pub fn stratum_value(z: &CoordinateStratum, approx: bool) -> Value {
    Obj::new(approx)
        .set("ambient", z.ambient.explicit())
        .set("vanishing", z.vanishing.clone())
        .set("complement", z.complement.clone())
        .set("dim", z.dim())
        .set("h", z.h)
        .set("g", z.g)
        .set("quotient_weights", z.quotient_weights.explicit())
        .q("scale", &z.scale)
        .set("mult", z.mult)
        .q("degree", &z.degree())
        .build()
}

/// Integer data of a blowup under the names `h, hp, g, gp, gi, app, ap`.
pub fn frame_value(f: &BlowupFrame) -> Value {
    json!({
        "ambient": f.ambient.explicit(),
        "r": f.r,
        "h": f.h,
        "hp": f.hp,
        "g": f.g,
        "gp": f.gp,
        "gi": f.gi,
        "app": f.app,
        "ap": f.ap,
        "k": f.k,
        "kp": f.kp,
        "v": f.v_rep,
        "v_primitive": f.v_is_primitive(),
        "ray_conditions": f.ray_conditions_hold(),
    })
}

pub fn sliced_value(b: &SlicedBody, approx: bool) -> Value {
    let piece = |p: &crate::convex::AffinePiece| json!({ "slope": fmt_q(&p.slope), "intercept": fmt_q(&p.intercept) });
    let (b1, b2) = b.barycenter();
    Obj::new(approx)
        .qs("breakpoints", b.breakpoints())
        .set("upper", Value::Array(b.upper().iter().map(piece).collect()))
        .set("lower", Value::Array(b.lower().iter().map(piece).collect()))
        .q("area", &b.area())
        .q("barycenter_x", &b1)
        .q("barycenter_y", &b2)
        .build()
}

pub fn okounkov_value(body: &OkounkovBody, approx: bool) -> Value {
    let mut v = Obj::new(approx)
        .set("case", format!("{:?}", body.case))
        .q("l2", &body.l2)
        .set("complete", body.complete)
        .set("body", sliced_value(&body.body, approx));
    if let Some(g) = &body.gravity {
        v = v.set("gravity_input", Obj::new(approx).q("c0", &g.c0).q("c1", &g.c1).q("c2", &g.c2).q("v", &g.v).build());
    }
    v.build()
}

pub fn moment_row_value(r: &MomentRow, approx: bool) -> Value {
    Obj::new(approx)
        .set("n", r.n)
        .set("a", r.a)
        .set("k", r.k)
        .set("j", r.j)
        .set("q_in_W1", r.q_in_w1)
        .q("S", &r.s)
        .q("closed_form", &r.closed_form)
        .set("match", r.matches())
        .build()
}

pub fn eckardt_value(e: &EckardtDelta, approx: bool) -> Value {
    Obj::new(approx).q("lower", &e.lower).q("upper", &e.upper).set("exact", e.exact).build()
}

pub fn unstable_value(u: &UnstableCheck, approx: bool) -> Value {
    let (verdict, witness, reason) = match &u.verdict {
        UnstableVerdict::KUnstable { witness } => ("K-unstable", witness, None),
        UnstableVerdict::Inconclusive { witness, reason } => ("inconclusive", witness, Some(reason.clone())),
    };
    Obj::new(approx)
        .set("verdict", verdict)
        .set("index", u.index)
        .q("threshold", &u.threshold)
        .q("witness", witness)
        .set("reason", reason)
        .build()
}

/// The schema document shipped with the crate.
pub fn schema() -> Value {
    serde_json::from_str(include_str!("../schema/wfano-certify-1.json")).expect("bundled schema is valid JSON")
}

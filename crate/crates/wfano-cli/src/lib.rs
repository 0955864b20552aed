//! Argument handling and report emission for the `wfano` binary. The
//! entry point [`run`] is pure: it takes the arguments and the value of
//! `WFANO_THREADS` and returns the exit status with the text for stdout.

use std::collections::BTreeMap;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use wfano::blowup::{self, intersection_via_cover, ToricBlowup};
use wfano::certify::{certify, enumerate, B1Status, DegreeRule, EnumerationSpec, FanoDatum, Flags};
use wfano::convex::okounkov::{delta_from_barycenter, first_curve_log_discrepancy};
use wfano::convex::{gravity_bounds, okounkov_body_surface, SurfaceCase};
use wfano::moments::{delta_eckardt, moment_table, s_value, s_value_closed_form, unstable_check};
use wfano::poly::{qsm_at_point_bi, strict_transform, SparseWPoly};
use wfano::rat::{approx, fmt_q, parse_q};
use wfano::report::{self, Obj, Report, APPROX_DIGITS};
use wfano::wps::{fano_index, normalize, parse_weight_list, stratum, top_intersection, WeightVector};
use wfano::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "wfano", version, about = "Exact computations for weighted Fano hypersurfaces")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    pub format: Format,
    /// Add decimal approximations (12 significant digits) next to fractions.
    #[arg(long, global = true)]
    pub approx: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Certify bounds on the stability threshold of X_d in P(weights).
    Certify(CertifyArgs),
    /// Certify every quasi-smooth Fano datum of a family.
    Enumerate(EnumerateArgs),
    /// Flag moment integrals of the generalized Eckardt configuration.
    #[command(subcommand)]
    Moments(MomentsCmd),
    /// Okounkov bodies of the surface families.
    #[command(subcommand)]
    Okounkov(OkounkovCmd),
    /// Weighted projective space arithmetic.
    #[command(subcommand)]
    Wps(WpsCmd),
    /// Standard weighted blowups.
    #[command(subcommand)]
    Blowup(BlowupCmd),
}

#[derive(Args, Debug)]
pub struct MemberFlags {
    /// P is a generalized Eckardt point.
    #[arg(long, conflicts_with = "not_eckardt")]
    pub eckardt: bool,
    /// P is not a generalized Eckardt point.
    #[arg(long)]
    pub not_eckardt: bool,
    /// The invariant m of the normal form at P.
    #[arg(long)]
    pub m: Option<u64>,
    /// X is a general member of |O(d)|.
    #[arg(long)]
    pub general: bool,
    /// Asserted containment of the base locus B_1 of |O(1)|.
    #[arg(long, default_value = "unknown")]
    pub b1: String,
}

impl MemberFlags {
    fn flags(&self) -> Result<Flags> {
        Ok(Flags {
            eckardt_at_p: if self.eckardt {
                Some(true)
            } else if self.not_eckardt {
                Some(false)
            } else {
                None
            },
            m: self.m,
            b1_in_x: B1Status::parse(&self.b1)?,
            general_member: self.general,
            quasi_smooth: true,
        })
    }
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    /// Weights as "1,1,1,1,2" or "P(1^4,2)".
    #[arg(long)]
    pub weights: String,
    #[arg(long)]
    pub degree: u64,
    #[command(flatten)]
    pub member: MemberFlags,
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    /// Dimension of the hypersurfaces.
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub max_weight: u64,
    /// Fano index; the degree is sum(a_i) - index.
    #[arg(long, conflicts_with = "top_multiple")]
    pub index: Option<i64>,
    /// Use d = k a_{n+1} + 1 instead of a fixed index.
    #[arg(long)]
    pub top_multiple: Option<u64>,
    /// Number of weights greater than 1.
    #[arg(long)]
    pub big_weights: Option<usize>,
    #[command(flatten)]
    pub member: MemberFlags,
}

#[derive(Subcommand, Debug)]
pub enum MomentsCmd {
    /// One S-value, by integration and by the closed form.
    SValue {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        a: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        j: u32,
        /// The point q lies on the distinguished line.
        #[arg(long)]
        q_in_w1: bool,
    },
    /// Table of S-values over ranges "lo..hi".
    Table {
        #[arg(long)]
        n: String,
        #[arg(long)]
        a: String,
        #[arg(long)]
        k: String,
    },
    /// Local stability threshold bounds at a generalized Eckardt point.
    Delta {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        a: u64,
        #[arg(long)]
        k: u64,
    },
    /// The instability criterion.
    Unstable {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        a: u64,
        #[arg(long)]
        k: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum OkounkovCmd {
    /// Body of a surface case: line-flag (a,b,k), hirzebruch (a) or hirzebruch2 (a).
    Case {
        name: String,
        /// Comma-separated parameters.
        #[arg(long)]
        params: String,
        /// The ruling line through the point lies on the surface.
        #[arg(long)]
        line_in_surface: bool,
        /// With --format csv, samples per boundary piece.
        #[arg(long, default_value_t = 8)]
        samples: u32,
    },
}

#[derive(Subcommand, Debug)]
pub enum WpsCmd {
    /// Well-formed model of P(weights).
    Normalize {
        #[arg(long)]
        weights: String,
    },
    /// The coordinate stratum where the listed coordinates vanish.
    Stratum {
        #[arg(long)]
        weights: String,
        /// Comma-separated vanishing indices.
        #[arg(long)]
        vanish: String,
    },
    /// Fano index and top self-intersection for a degree d hypersurface.
    Index {
        #[arg(long)]
        weights: String,
        #[arg(long)]
        degree: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum BlowupCmd {
    /// Integer data of the blowup along (x_0 = ... = x_r = 0).
    Build {
        #[arg(long)]
        weights: String,
        #[arg(long)]
        r: usize,
    },
    /// (O(1,0)^k . O(0,1)^{s-k}) by three independent routes.
    Intersect {
        #[arg(long)]
        weights: String,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        k: usize,
    },
    /// Strict transform of a polynomial, optionally checked at a point.
    Transform {
        #[arg(long)]
        weights: String,
        #[arg(long)]
        r: usize,
        /// Polynomial in x0..xs, e.g. "x0^4 + x1*x2^2".
        #[arg(long)]
        poly: String,
        /// Point of the blowup in (x, y, z) coordinates, comma-separated.
        #[arg(long)]
        point: Option<String>,
    },
}

/// Exit status and standard output of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Worker count from `WFANO_THREADS`, defaulting to the available cores.
pub fn thread_count(env: Option<&str>) -> Result<usize> {
    match env {
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        Some(t) => match t.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(Error::Parse(format!("WFANO_THREADS must be a positive integer, got {t:?}"))),
        },
    }
}

pub fn run<I, S>(args: I, threads_env: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            if matches!(
                e.kind(),
                ErrorKind::DisplayHelp
                    | ErrorKind::DisplayVersion
                    | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            ) {
                let code = if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand { 2 } else { 0 };
                return Outcome { code, stdout: text, stderr: String::new() };
            }
            let obj = report::error_value("parse", "usage", text.trim());
            return Outcome { code: 2, stdout: pretty(&obj), stderr: text };
        }
    };
    let name = command_name(&cli.command);
    match dispatch(&cli, threads_env) {
        Ok(stdout) => Outcome { code: 0, stdout, stderr: String::new() },
        Err(e) => Outcome {
            code: report::exit_code(&e),
            stdout: pretty(&report::error_report(name, &e)),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Certify(_) => "certify",
        Command::Enumerate(_) => "enumerate",
        Command::Moments(MomentsCmd::SValue { .. }) => "moments s-value",
        Command::Moments(MomentsCmd::Table { .. }) => "moments table",
        Command::Moments(MomentsCmd::Delta { .. }) => "moments delta",
        Command::Moments(MomentsCmd::Unstable { .. }) => "moments unstable",
        Command::Okounkov(_) => "okounkov case",
        Command::Wps(WpsCmd::Normalize { .. }) => "wps normalize",
        Command::Wps(WpsCmd::Stratum { .. }) => "wps stratum",
        Command::Wps(WpsCmd::Index { .. }) => "wps index",
        Command::Blowup(BlowupCmd::Build { .. }) => "blowup build",
        Command::Blowup(BlowupCmd::Intersect { .. }) => "blowup intersect",
        Command::Blowup(BlowupCmd::Transform { .. }) => "blowup transform",
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn parse_indices(text: &str) -> Result<Vec<usize>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(|t| t.trim().parse().map_err(|_| Error::Parse(format!("bad index {t:?}")))).collect()
}

fn parse_u64s(text: &str) -> Result<Vec<u64>> {
    text.split(',').map(|t| t.trim().parse().map_err(|_| Error::Parse(format!("bad integer {t:?}")))).collect()
}

fn parse_range<T: std::str::FromStr + Copy>(text: &str) -> Result<(T, T)> {
    let bad = || Error::Parse(format!("expected a value or a range lo..hi, got {text:?}"));
    match text.split_once("..") {
        Some((lo, hi)) => {
            let lo = lo.trim().parse().map_err(|_| bad())?;
            let hi = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
            Ok((lo, hi))
        }
        None => {
            let v = text.trim().parse().map_err(|_| bad())?;
            Ok((v, v))
        }
    }
}

fn weights(text: &str) -> Result<WeightVector> {
    WeightVector::new(parse_weight_list(text)?)
}

fn datum(text: &str, d: u64, flags: Flags) -> Result<FanoDatum> {
    FanoDatum::new(parse_weight_list(text)?, d, flags)
}

fn dispatch(cli: &Cli, threads_env: Option<&str>) -> Result<String> {
    let ax = cli.approx;
    let report = match &cli.command {
        Command::Certify(a) => {
            let x = datum(&a.weights, a.degree, a.member.flags()?)?;
            let c = certify(&x)?;
            report::certify_report(&x, &c, ax)
        }
        Command::Enumerate(a) => return run_enumerate(cli, a, threads_env),
        Command::Moments(m) => moments(m, ax)?,
        Command::Okounkov(OkounkovCmd::Case { name, params, line_in_surface, samples }) => {
            let case = SurfaceCase::parse(name, &parse_u64s(params)?, *line_in_surface)?;
            let body = okounkov_body_surface(case)?;
            if cli.format == Format::Csv {
                let rows = body
                    .body
                    .boundary_samples(*samples)
                    .into_iter()
                    .map(|(x, lo, hi)| vec![fmt_q(&x), fmt_q(&lo), fmt_q(&hi)]);
                return csv_text(&["x", "lower", "upper"], rows, ax, &[0, 1, 2]);
            }
            let mut out = report::okounkov_value(&body, ax);
            let extra = if body.complete {
                let a_log = first_curve_log_discrepancy(case);
                Obj::new(ax)
                    .q("first_curve_log_discrepancy", &a_log)
                    .q("delta_from_barycenter", &delta_from_barycenter(&a_log, &body.body))
                    .build()
            } else {
                let g = body
                    .gravity
                    .as_ref()
                    .ok_or_else(|| Error::Invariant("partial body without trapezoid data".into()))?;
                let gb = gravity_bounds(g)?;
                Obj::new(ax).q("b1_max", &gb.b1_max).q("b2_max", &gb.b2_max).build()
            };
            merge(&mut out, extra);
            Report::new(
                "okounkov case",
                json!({ "case": name, "params": params, "line_in_surface": line_in_surface }),
                out,
            )
        }
        Command::Wps(w) => wps(w, ax)?,
        Command::Blowup(b) => blowup_cmd(b, ax)?,
    };
    Ok(render(cli.format, &report))
}

fn merge(into: &mut Value, extra: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, extra) {
        a.extend(b);
    }
}

fn moments(m: &MomentsCmd, ax: bool) -> Result<Report> {
    Ok(match m {
        MomentsCmd::SValue { n, a, k, j, q_in_w1 } => {
            let s = s_value(*n, *a, *k, *j, *q_in_w1)?;
            let closed = s_value_closed_form(*n, *a, *k, *j, *q_in_w1)?;
            Report::new(
                "moments s-value",
                json!({ "n": n, "a": a, "k": k, "j": j, "q_in_W1": q_in_w1 }),
                Obj::new(ax).q("S", &s).q("closed_form", &closed).set("match", s == closed).build(),
            )
        }
        MomentsCmd::Table { n, a, k } => {
            let rows = moment_table(parse_range(n)?, parse_range(a)?, parse_range(k)?)?;
            Report::new(
                "moments table",
                json!({ "n": n, "a": a, "k": k }),
                Value::Array(rows.iter().map(|r| report::moment_row_value(r, ax)).collect()),
            )
        }
        MomentsCmd::Delta { n, a, k } => Report::new(
            "moments delta",
            json!({ "n": n, "a": a, "k": k }),
            report::eckardt_value(&delta_eckardt(*n, *a, *k)?, ax),
        ),
        MomentsCmd::Unstable { n, a, k } => Report::new(
            "moments unstable",
            json!({ "n": n, "a": a, "k": k }),
            report::unstable_value(&unstable_check(*n, *a, *k)?, ax),
        ),
    })
}

fn wps(w: &WpsCmd, ax: bool) -> Result<Report> {
    Ok(match w {
        WpsCmd::Normalize { weights: t } => {
            let v = weights(t)?;
            Report::new(
                "wps normalize",
                json!({ "weights": v.explicit() }),
                report::normalization_value(&normalize(&v)),
            )
        }
        WpsCmd::Stratum { weights: t, vanish } => {
            let v = weights(t)?;
            let idx = parse_indices(vanish)?;
            Report::new(
                "wps stratum",
                json!({ "weights": v.explicit(), "vanish": idx }),
                report::stratum_value(&stratum(&v, &idx)?, ax),
            )
        }
        WpsCmd::Index { weights: t, degree } => {
            let v = weights(t)?;
            let top = top_intersection(&v)?;
            let deg = top * wfano::rat::qu(*degree);
            Report::new(
                "wps index",
                json!({ "weights": v.explicit(), "degree": degree }),
                Obj::new(ax)
                    .set("fano_index", fano_index(&v, *degree))
                    .set("hypersurface_well_formed", wfano::wps::hypersurface_well_formed(&v, *degree))
                    .q("o1_degree_on_x", &deg)
                    .build(),
            )
        }
    })
}

fn blowup_cmd(b: &BlowupCmd, ax: bool) -> Result<Report> {
    Ok(match b {
        BlowupCmd::Build { weights: t, r } => {
            let v = weights(t)?;
            let f = blowup::build(&v, *r)?;
            Report::new("blowup build", json!({ "weights": v.explicit(), "r": r }), report::frame_value(&f))
        }
        BlowupCmd::Intersect { weights: t, r, k } => {
            let v = weights(t)?;
            let f = blowup::build(&v, *r)?;
            let closed = f.intersection_bi(*k)?;
            let fan = ToricBlowup::new(&f).intersection_bi(*k)?;
            let cover = intersection_via_cover(&f, *k)?;
            if closed != fan || closed != cover {
                return Err(Error::Invariant(format!(
                    "intersection routes disagree: {} {} {}",
                    fmt_q(&closed),
                    fmt_q(&fan),
                    fmt_q(&cover)
                )));
            }
            Report::new(
                "blowup intersect",
                json!({ "weights": v.explicit(), "r": r, "k": k }),
                Obj::new(ax).q("closed_form", &closed).q("fan", &fan).q("cover", &cover).set("agree", true).build(),
            )
        }
        BlowupCmd::Transform { weights: t, r, poly, point } => {
            let v = weights(t)?;
            let f = SparseWPoly::parse(poly, &v)?;
            let st = strict_transform(&f, *r)?;
            let bd = st.poly.bidegree();
            let mut out = Obj::new(ax)
                .set("strict_transform", st.poly.to_string())
                .set("bidegree", json!([bd.alpha, bd.beta]))
                .set("d0", st.d0)
                .set("d0p", st.d0p);
            if let Some(p) = point {
                let pt: Vec<_> = p.split(',').map(parse_q).collect::<Result<_>>()?;
                let chk = qsm_at_point_bi(&st.poly, &pt)?;
                out = out.set(
                    "point_check",
                    Obj::new(ax)
                        .set("quasi_smooth", chk.quasi_smooth)
                        .qs("gradient", &chk.gradient)
                        .set("witness", chk.witness)
                        .build(),
                );
            }
            Report::new(
                "blowup transform",
                json!({ "weights": v.explicit(), "r": r, "poly": f.to_string(), "point": point }),
                out.build(),
            )
        }
    })
}

fn run_enumerate(cli: &Cli, a: &EnumerateArgs, threads_env: Option<&str>) -> Result<String> {
    let degree = match (a.index, a.top_multiple) {
        (_, Some(k)) => DegreeRule::TopMultiplePlusOne(k),
        (Some(i), None) => DegreeRule::Index(i),
        (None, None) => DegreeRule::Index(1),
    };
    let spec = EnumerationSpec {
        n: a.n,
        max_weight: a.max_weight,
        degree,
        big_weights: a.big_weights,
        flags: a.member.flags()?,
    };
    let threads = thread_count(threads_env)?;
    let e = enumerate(&spec, threads)?;
    let ax = cli.approx;
    if cli.format == Format::Csv {
        let header = [
            "weights",
            "degree",
            "index",
            "verdict",
            "bound",
            "strict",
            "upper",
            "anticanonical_bound",
            "bound_rule",
            "b1_in_x",
        ];
        let rows = e.rows.iter().map(|r| {
            let c = &r.certificate;
            vec![
                r.datum.ambient().explicit(),
                r.datum.degree().to_string(),
                c.index.to_string(),
                c.verdict.as_str().to_string(),
                fmt_q(&c.bound),
                c.strict.to_string(),
                c.upper.as_ref().map(fmt_q).unwrap_or_default(),
                fmt_q(&c.to_anticanonical().bound),
                c.bound_rule.unwrap_or("").to_string(),
                c.resolved.b1.status.as_str().to_string(),
            ]
        });
        return csv_text(&header, rows, ax, &[4, 7]);
    }
    let inputs = json!({
        "n": a.n,
        "max_weight": a.max_weight,
        "degree_rule": match degree {
            DegreeRule::Index(i) => json!({ "index": i }),
            DegreeRule::TopMultiplePlusOne(k) => json!({ "top_multiple_plus_one": k }),
        },
        "big_weights": a.big_weights,
        "flags": report::flags_value(&spec.flags),
    });
    let mut counts = BTreeMap::new();
    for r in &e.rows {
        *counts.entry(r.certificate.verdict.as_str()).or_insert(0u64) += 1;
    }
    let outputs = json!({
        "count": e.rows.len(),
        "verdicts": counts,
        "rows": e.rows.iter().map(|r| report::enum_row_value(r, ax)).collect::<Vec<_>>(),
        "skipped": e.skipped.iter().map(|(w, d, why)| json!({
            "weights": w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
            "degree": d,
            "reason": why,
        })).collect::<Vec<_>>(),
    });
    Ok(render(cli.format, &Report::new("enumerate", inputs, outputs)))
}

/// RFC 4180 CSV; with `approx`, each listed fraction column gets a
/// following `<name>_approx` column.
fn csv_text<I>(header: &[&str], rows: I, ax: bool, fraction_cols: &[usize]) -> Result<String>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let expand = |cells: Vec<String>, is_header: bool| -> Vec<String> {
        let mut out = Vec::new();
        for (i, c) in cells.into_iter().enumerate() {
            let frac = ax && fraction_cols.contains(&i);
            let extra = if !frac {
                None
            } else if is_header {
                Some(format!("{c}_approx"))
            } else if c.is_empty() {
                Some(String::new())
            } else {
                Some(parse_q(&c).map(|q| approx(&q, APPROX_DIGITS)).unwrap_or_default())
            };
            out.push(c);
            out.extend(extra);
        }
        out
    };
    let io = |e: csv::Error| Error::Invariant(format!("csv: {e}"));
    w.write_record(expand(header.iter().map(|s| s.to_string()).collect(), true)).map_err(io)?;
    for r in rows {
        w.write_record(expand(r, false)).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Invariant(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Invariant(e.to_string()))
}

fn render(format: Format, r: &Report) -> String {
    match format {
        Format::Json | Format::Csv => pretty(&r.to_value()),
        Format::Text => text(r),
    }
}

/// Aligned `key  value` lines, nested keys joined by dots.
fn text(r: &Report) -> String {
    fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    flatten(&key, x, out);
                }
            }
            Value::Array(xs) if xs.iter().any(|x| x.is_object() || x.is_array()) => {
                for (i, x) in xs.iter().enumerate() {
                    flatten(&format!("{prefix}[{i}]"), x, out);
                }
            }
            Value::Array(xs) => {
                let items: Vec<String> = xs.iter().map(scalar).collect();
                out.push((prefix.to_string(), items.join(", ")));
            }
            other => out.push((prefix.to_string(), scalar(other))),
        }
    }
    fn scalar(v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            Value::Null => "-".into(),
            other => other.to_string(),
        }
    }
    let mut lines = vec![("command".to_string(), r.command.clone())];
    flatten("", &r.outputs, &mut lines);
    if let Some(Value::Array(t)) = &r.trace {
        for (i, e) in t.iter().enumerate() {
            let rel = format!(
                "{} {} {} ({})",
                scalar(&e["scope"]),
                scalar(&e["relation"]),
                scalar(&e["value"]),
                scalar(&e["statement"])
            );
            lines.push((format!("trace[{i}] {}", scalar(&e["rule"])), rel));
        }
    }
    let width = lines.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut s = String::new();
    for (k, v) in lines {
        s.push_str(&format!("{k:width$}  {v}\n"));
    }
    s
}

//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero on any unexpected outcome. Two literal readings are known to
//! disagree with the computed mathematics; they are marked `expected` and
//! each is followed by the reading the computation does satisfy.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wfano::blowup::{build, intersection_via_cover, BiDegree, ToricBlowup};
use wfano::certify::{certify, FanoDatum, Flags, Scope, Verdict};
use wfano::convex::gravity::gravity_bounds;
use wfano::convex::okounkov::okounkov_body_surface;
use wfano::convex::surface::{delta_lower_gravity, SurfaceLocalData};
use wfano::convex::{GravityInput, RationalPolygon, SlicedBody, SurfaceCase};
use wfano::lemmas::{
    has_quasi_smooth_member, sweep_many_ones, sweep_residue_one, sweep_top_weight, sweep_two_weight, Case,
};
use wfano::moments::{delta_eckardt, s_value, unstable_check, UnstableVerdict, MAX_DIMENSION};
use wfano::poly::{qsm_at_point_bi, strict_transform, BiGradedPoly, SparseWPoly};
use wfano::rat::{fmt_q, q, qi, qu};
use wfano::wps::{normalize, WeightVector};
use wfano::Q;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

struct Tally {
    unexpected: usize,
}

impl Tally {
    fn run(&mut self, id: &str, expected_fail: bool, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match (&res, expected_fail) {
            (Ok(d), false) => println!("PASS {id}: {d} [{secs:.2}s]"),
            (Err(d), true) => println!("FAIL {id} (expected): {d} [{secs:.2}s]"),
            (Ok(d), true) => {
                self.unexpected += 1;
                println!("PASS {id} (unexpected, a failure was expected): {d} [{secs:.2}s]");
            }
            (Err(d), false) => {
                self.unexpected += 1;
                println!("FAIL {id}: {d} [{secs:.2}s]");
            }
        }
    }
}

fn ones(n: usize, rest: &[u64]) -> Vec<u64> {
    let mut w = vec![1u64; n];
    w.extend_from_slice(rest);
    w
}

/// Centroid and area by fanning triangles from the first vertex.
fn fan_centroid(p: &RationalPolygon) -> (Q, Q, Q) {
    let v = p.vertices();
    let (mut area, mut mx, mut my) = (Q::zero(), Q::zero(), Q::zero());
    for i in 1..v.len() - 1 {
        let (a, b, c) = (&v[0], &v[i], &v[i + 1]);
        let t = ((&b.0 - &a.0) * (&c.1 - &a.1) - (&c.0 - &a.0) * (&b.1 - &a.1)) / qi(2);
        mx += &t * (&a.0 + &b.0 + &c.0) / qi(3);
        my += &t * (&a.1 + &b.1 + &c.1) / qi(3);
        area += t;
    }
    (area.clone(), mx / &area, my / area)
}

fn moment_grid() -> Outcome {
    let mut checks = 0;
    for n in 2..=8u32 {
        for a in 1..=6u64 {
            for k in 1..=6u64 {
                let (nq, ak) = (qu(n as u64), qu(a * k));
                for j in 1..=n {
                    for q_in in [false, true] {
                        let want = if j == 1 {
                            (&ak + &nq) / (qu(a) * (&nq + qi(1)))
                        } else if j == n && q_in {
                            (qi(2) * &ak + qi(1)) / ((&ak + qi(1)) * (&nq + qi(1)))
                        } else {
                            Q::one() / (&nq + qi(1))
                        };
                        let got = s_value(n, a, k, j, q_in).map_err(|e| e.to_string())?;
                        ensure!(got == want, "n={n} a={a} k={k} j={j} q={q_in}: {} != {}", fmt_q(&got), fmt_q(&want));
                        checks += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checks} exact checks"))
}

fn eckardt_delta() -> Outcome {
    let r = delta_eckardt(3, 2, 2).map_err(|e| e.to_string())?;
    ensure!(r.lower == q(12, 7) && r.exact, "delta_eckardt(3,2,2) = {} exact={}", fmt_q(&r.lower), r.exact);
    let mut exact_points = 0;
    for n in 2..=8u32 {
        for a in 1..=6u64 {
            for k in 1..=6u64 {
                let r = delta_eckardt(n, a, k).map_err(|e| e.to_string())?;
                let want_exact = a * k + 1 >= n as u64;
                ensure!(r.exact == want_exact, "exact flag at n={n} a={a} k={k}");
                let closed = qu(n as u64 * (n as u64 + 1)) / qu(a * k + n as u64);
                ensure!(r.upper == closed, "upper at n={n} a={a} k={k}");
                if want_exact {
                    ensure!(r.lower == closed, "lower at n={n} a={a} k={k}");
                    exact_points += 1;
                }
            }
        }
    }
    Ok(format!("12/7 exact; {exact_points} exact grid points equal n(n+1)/(ak+n)"))
}

fn instability() -> Outcome {
    let mut out = Vec::new();
    for a in 3..=6u64 {
        let k = 2u64;
        let first = (2..=MAX_DIMENSION)
            .find(|&n| matches!(unstable_check(n, a, k).map(|r| r.verdict), Ok(UnstableVerdict::KUnstable { .. })))
            .ok_or(format!("no unstable n for a={a}"))?;
        let want = 2 * a * a / (a - 1) + 1;
        ensure!(first as u64 == want, "a={a}: minimal n {first}, expected {want}");
        let n = first as u64;
        let r = unstable_check(first, a, k).map_err(|e| e.to_string())?;
        let UnstableVerdict::KUnstable { witness } = r.verdict else { unreachable!() };
        let formula = qu(n * (n + 1)) / (qi((n + a) as i64 - (a * k) as i64) * qu(a * k + n));
        ensure!(witness == formula, "a={a}: witness {} != {}", fmt_q(&witness), fmt_q(&formula));
        ensure!(witness < Q::one(), "a={a}: witness {} not below 1", fmt_q(&witness));
        out.push(format!("a={a}:n={n},w={}", fmt_q(&witness)));
    }
    Ok(out.join(" "))
}

fn surfaces() -> Outcome {
    for a in 1..=10u64 {
        let body = okounkov_body_surface(SurfaceCase::Hirzebruch2 { a }).map_err(|e| e.to_string())?;
        let e = q(1, (a * (a + 1)) as i64);
        ensure!(body.l2 == e, "a={a}: (L^2) = {}", fmt_q(&body.l2));
        let poly = body.body.to_polygon().map_err(|e| e.to_string())?;
        let (area, sx, _) = fan_centroid(&poly);
        ensure!(qi(2) * &area == e, "a={a}: twice the body area is {}", fmt_q(&(qi(2) * &area)));
        let bps = body.body.breakpoints();
        ensure!(bps.len() >= 2 && bps[1] == e, "a={a}: first breakpoint {:?}", bps.get(1).map(fmt_q));
        ensure!(body.body.t_max() == &q(1, a as i64), "a={a}: T = {}", fmt_q(body.body.t_max()));
        let s = q((a + 2) as i64, (3 * a * (a + 1)) as i64);
        ensure!(body.body.barycenter().0 == s && sx == s, "a={a}: S = {}", fmt_q(&sx));
        let data = SurfaceLocalData::quotient_point(a, e.clone(), e).map_err(|e| e.to_string())?;
        let d = delta_lower_gravity(&data).delta;
        ensure!(d == qi(3), "a={a}: delta_lower_gravity = {}", fmt_q(&d));
    }
    Ok("a = 1..10: (L^2), eps, T, S and delta = 3".into())
}

fn barycenters() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut b1_eq, mut extremal) = (0, 0);
    for i in 0..10_000 {
        let c0 = q(rng.gen_range(0..5), rng.gen_range(1..4));
        let c1 = q(rng.gen_range(1..6), rng.gen_range(1..4));
        let c2 = &c0 + q(rng.gen_range(1..6), rng.gen_range(1..4));
        let mut pts = vec![(qi(0), qi(0)), (c1.clone(), qi(0)), (c1.clone(), c2.clone()), (qi(0), c0.clone())];
        let slope = (&c2 - &c0) / &c1;
        for _ in 0..rng.gen_range(0..6) {
            let x = &c1 + q(rng.gen_range(0..40), rng.gen_range(1..8));
            let y = (&slope * &x + &c0) * q(rng.gen_range(0..=16), 16);
            pts.push((x, y));
        }
        let poly = RationalPolygon::hull(&pts).map_err(|e| e.to_string())?;
        let g = GravityInput::new(c0, c1, c2, poly.area()).map_err(|e| e.to_string())?;
        ensure!(g.slice_condition_holds(&poly), "body {i} violates the slice hypothesis");
        let (_, b1, b2) = fan_centroid(&poly);
        let bounds = gravity_bounds(&g).map_err(|e| e.to_string())?;
        ensure!(b1 <= bounds.b1_max && b2 <= bounds.b2_max, "body {i} exceeds a bound");
        if b1 == bounds.b1_max {
            b1_eq += 1;
        }
        let (area, ex, ey) = fan_centroid(&bounds.extremal);
        ensure!(area == g.v && ex == bounds.b1_max && ey == bounds.b2_max, "extremal body {i} misses the bound");
        ensure!(g.slice_condition_holds(&bounds.extremal), "extremal body {i} violates the slice hypothesis");
        SlicedBody::from_polygon(&bounds.extremal).map_err(|e| e.to_string())?;
        extremal += 1;
    }
    Ok(format!("10000 bodies within both bounds, {b1_eq} attain b1, {extremal} extremal bodies attain b1 exactly"))
}

const NONQSM1: &str = "x3^2*x1^2 + x3*x0 + x1^4 + x2^4";
const NONQSM2: &str = "x0*x4^2 + x1*x3*x4 + x2*x3^2 + x0^6 + x1^4 + x2^3";

fn strict_first(bidegree: BiDegree) -> Outcome {
    let w = WeightVector::new(vec![3, 1, 1, 1]).map_err(|e| e.to_string())?;
    let f = SparseWPoly::parse(NONQSM1, &w).map_err(|e| e.to_string())?;
    let st = strict_transform(&f, 2).map_err(|e| e.to_string())?;
    let want =
        BiGradedPoly::parse("y^2*x1^2 + z*y*x0 + z^2*x1^4 + z^2*x2^4", st.poly.frame()).map_err(|e| e.to_string())?;
    ensure!(st.poly.terms() == want.terms(), "strict transform is {}", st.poly);
    let chk = qsm_at_point_bi(&st.poly, &[qi(0), qi(0), qi(1), qi(1), qi(0)]).map_err(|e| e.to_string())?;
    ensure!(!chk.quasi_smooth, "quasi-smooth at [0:0:1;1:0]");
    ensure!(st.poly.bidegree() == bidegree, "bidegree {:?}, wanted {:?}", st.poly.bidegree(), bidegree);
    Ok(format!("f~ matches, singular at [0:0:1;1:0], bidegree {:?}", st.poly.bidegree()))
}

fn strict_second() -> Outcome {
    let w = WeightVector::new(vec![2, 3, 4, 4, 5]).map_err(|e| e.to_string())?;
    let f = SparseWPoly::parse(NONQSM2, &w).map_err(|e| e.to_string())?;
    let st = strict_transform(&f, 2).map_err(|e| e.to_string())?;
    ensure!(st.poly.bidegree() == BiDegree::new(2, 10), "bidegree {:?}", st.poly.bidegree());
    let want =
        BiGradedPoly::parse("x0*y4^2 + x1*y3*y4*z + x2*y3^2*z^2 + x0^6*z^10 + x1^4*z^10 + x2^3*z^10", st.poly.frame())
            .map_err(|e| e.to_string())?;
    ensure!(st.poly.terms() == want.terms(), "strict transform is {}", st.poly);
    let p: Vec<Q> = [1, 0, 0, 1, 0, 0].iter().map(|&x| qi(x)).collect();
    let chk = qsm_at_point_bi(&st.poly, &p).map_err(|e| e.to_string())?;
    ensure!(!chk.quasi_smooth, "quasi-smooth at [1:0:0;1:0:0]");
    Ok("bidegree (2,10), f~ matches, singular at [1:0:0;1:0:0]".into())
}

fn blowup_arithmetic() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut done, mut values) = (0, 0);
    while done < 1000 {
        let len = rng.gen_range(3..=6);
        let raw: Vec<u64> = (0..len).map(|_| rng.gen_range(1..=30)).collect();
        if raw.iter().fold(0, |a, &b| num_integer::gcd(a, b)) != 1 {
            continue;
        }
        let wv = normalize(&WeightVector::new(raw).map_err(|e| e.to_string())?).output;
        let s = wv.s();
        let r = rng.gen_range(1..s);
        let f = build(&wv, r).map_err(|e| format!("{:?} r={r}: {e}", wv.weights()))?;
        ensure!(f.v_is_primitive(), "{:?} r={r}: v not primitive", wv.weights());
        for i in 0..=s {
            match f.ray_ray_mult_snf(i) {
                Some(m) => {
                    ensure!(m == BigInt::from(f.gi[i]), "{:?} r={r} i={i}: SNF {m} vs {}", wv.weights(), f.gi[i])
                }
                None => ensure!(i == s && r == s - 1, "{:?} r={r} i={i}: no SNF value", wv.weights()),
            }
        }
        let t = ToricBlowup::new(&f);
        for k in 0..=s {
            let closed = f.intersection_bi(k).map_err(|e| e.to_string())?;
            let fan = t.intersection_bi(k).map_err(|e| e.to_string())?;
            let cover = intersection_via_cover(&f, k).map_err(|e| e.to_string())?;
            ensure!(fan == closed && cover == closed, "{:?} r={r} k={k}: routes disagree", wv.weights());
            values += 1;
        }
        done += 1;
    }
    Ok(format!("1000 ambients, {values} intersection numbers agree on three routes"))
}

fn endpoints() -> Outcome {
    let (mut one, mut one_skip) = (0, 0);
    for n in 3..=10usize {
        for a in 2..=8u64 {
            let d = n as u64 + a;
            let w = ones(n + 1, &[a]);
            if !has_quasi_smooth_member(&w, d) {
                one_skip += 1;
                continue;
            }
            let x = FanoDatum::new(w, d, Flags::default()).map_err(|e| e.to_string())?;
            let c = certify(&x).map_err(|e| format!("n={n} a={a}: {e}"))?;
            let theorem = qu(n as u64 + 1) / qu(n as u64);
            let e = c.trace.iter().find(|e| e.rule_id == "one-weight-index-one" && e.scope == Scope::Global);
            ensure!(e.is_some_and(|e| e.value == theorem), "n={n} a={a}: rule value missing or wrong");
            ensure!(c.bound >= theorem && c.verdict == Verdict::KStable, "n={n} a={a}: bound {}", fmt_q(&c.bound));
            one += 1;
        }
    }
    let (mut two, mut two_skip) = (0, 0);
    for n in 3..=6usize {
        for a in 2..=10u64 {
            for b in a..=10u64 {
                let w = ones(n, &[a, b]);
                let d = n as u64 + a + b - 1;
                if !has_quasi_smooth_member(&w, d) {
                    two_skip += 1;
                    continue;
                }
                let x = FanoDatum::new(w, d, Flags::default()).map_err(|e| e.to_string())?;
                let c = certify(&x).map_err(|e| format!("n={n} a={a} b={b}: {e}"))?;
                let theorem = qu(n as u64 + 1) / (qu(n as u64) + q(1, a as i64));
                let e = c.trace.iter().find(|e| e.rule_id == "two-weights-index-one" && e.scope == Scope::Global);
                ensure!(e.is_some_and(|e| e.value == theorem), "n={n} a={a} b={b}: rule value missing or wrong");
                ensure!(
                    c.bound >= theorem && c.verdict == Verdict::KStable,
                    "n={n} a={a} b={b}: bound {}",
                    fmt_q(&c.bound)
                );
                two += 1;
            }
        }
    }
    Ok(format!(
        "one weight {one} K-stable ({one_skip} without a quasi-smooth member skipped), two weights {two} K-stable ({two_skip} skipped)"
    ))
}

fn lemmas() -> Outcome {
    let two_weight = sweep_two_weight(12, 40);
    ensure!(two_weight.holds(), "two-weight violations {:?}", two_weight.violations);
    let family: Vec<Case> =
        (3..=12u64).map(|n| Case { weights: ones(n as usize, &[2, n + 1]), d: 2 * n + 2 }).collect();
    ensure!(two_weight.equality == family, "two-weight equality cases {:?}", two_weight.equality);
    let mut parts = vec![format!(
        "two-weight {}/{} hypotheses hold, equality only X_(2n+2)",
        two_weight.satisfying, two_weight.examined
    )];
    // the top-weight sweep enumerates only vectors where the conclusion
    // could fail, so any case satisfying its hypotheses is a violation
    for rep in [sweep_residue_one(12, 40), sweep_top_weight(12, 40), sweep_many_ones(12, 40)] {
        ensure!(rep.holds(), "{} violations {:?}", rep.name, rep.violations);
        parts.push(format!("{} {}/{} hypotheses hold", rep.name, rep.satisfying, rep.examined));
    }
    Ok(parts.join(", "))
}

fn normalization(literal: bool) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut done, mut nontrivial) = (0, 0);
    while done < 10_000 {
        let len = rng.gen_range(2..=7);
        let pool = [1u64, 2, 3, 4, 5, 6, 8, 9, 10, 12, 15, 18, 20, 30, 60];
        let v: Vec<u64> = (0..len).map(|_| pool[rng.gen_range(0..pool.len())]).collect();
        if v.iter().fold(0, |a, &b| num_integer::gcd(a, b)) != 1 {
            continue;
        }
        let wv = WeightVector::new(v.clone()).map_err(|e| e.to_string())?;
        let r = normalize(&wv);
        ensure!(r.output.is_well_formed(), "{v:?}: output not well-formed");
        ensure!(normalize(&r.output).is_identity(), "{v:?}: not idempotent");
        let exp = if literal { wv.s() - 1 } else { wv.s() };
        let rhs = num_traits::pow(BigInt::from(r.g), exp) * r.output.product();
        ensure!(wv.product() == rhs, "{v:?}: product {} vs g^{exp} * {} = {rhs}", wv.product(), r.output.product());
        if r.g > 1 {
            nontrivial += 1;
        }
        done += 1;
    }
    Ok(format!("10000 vectors idempotent, product identity holds ({nontrivial} with g > 1)"))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut t = Tally { unexpected: 0 };
    t.run("1 moment integrals", false, moment_grid);
    t.run("2 eckardt delta", false, eckardt_delta);
    t.run("3 instability", false, instability);
    t.run("4 surfaces", false, surfaces);
    t.run("5 barycenter bounds", false, barycenters);
    t.run("6 strict transform (1), literal bidegree (2,1)", true, || strict_first(BiDegree::new(2, 1)));
    t.run("6 strict transform (1), computed bidegree (2,2)", false, || strict_first(BiDegree::new(2, 2)));
    t.run("6 strict transform (2)", false, strict_second);
    t.run("7 blowup arithmetic", false, blowup_arithmetic);
    t.run("8 theorem endpoints", false, endpoints);
    t.run("9 numeric lemmas", false, lemmas);
    t.run("10 normalization, literal exponent s-1", true, || normalization(true));
    t.run("10 normalization, exponent s", false, || normalization(false));
    println!("total {:.1}s, {} unexpected", start.elapsed().as_secs_f64(), t.unexpected);
    if t.unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

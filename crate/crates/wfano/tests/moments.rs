use num_traits::One;
use proptest::prelude::*;

use wfano::moments::*;
use wfano::rat::{q, qi, qu, to_f64};
use wfano::upoly::UPoly;
use wfano::{Error, Q};

/// `int_0^1 u^p (1-u)^r du` by expanding `(1-u)^r` with UPoly.
fn beta(p: u32, r: u32) -> Q {
    let one_minus = UPoly::affine(qi(-1), qi(1));
    (&UPoly::t().pow(p) * &one_minus.pow(r)).integrate(&qi(0), &qi(1))
}

/// Volume coefficient `c_m` with `vol{y_1 + ... + y_m < t} = c_m t^m`,
/// built by slicing off one coordinate at a time.
fn simplex_coeff(m: u32) -> Q {
    (1..=m).fold(Q::one(), |c, i| c * beta(0, i - 1))
}

/// `int y_1` over the same simplex is `c_m' t^{m+1}`.
fn simplex_moment_coeff(m: u32) -> Q {
    simplex_coeff(m - 1) * beta(1, m - 1)
}

/// `int_lo^hi x^e (alpha x + beta)^m dx` for `e` in {0, 1} by the
/// antiderivative of a power of an affine function.
fn affine_power_integral(alpha: &Q, beta_: &Q, m: u32, e: u32, lo: &Q, hi: &Q) -> Q {
    let pw = |x: &Q, p: u32| -> Q { num_traits::pow(alpha * x + beta_, p as usize) };
    let mq = qu(m as u64);
    match e {
        0 => (pw(hi, m + 1) - pw(lo, m + 1)) / (alpha * (&mq + qi(1))),
        _ => {
            // x (ax+b)^m = ((ax+b)^{m+1} - b (ax+b)^m)/a
            let f = |p: u32| (pw(hi, p + 1) - pw(lo, p + 1)) / (alpha * qu(p as u64 + 1));
            (f(m + 1) - beta_ * f(m)) / alpha
        }
    }
}

fn oracle_s(n: u32, a: u64, k: u64, j: u32, q_in: bool) -> Q {
    let (aq, kq) = (qu(a), qu(k));
    let split = Q::one() / &aq;
    let top = qu(a * k + 1) / &aq;
    let pieces =
        [(qi(0), split.clone(), aq.clone(), qi(0)), (split.clone(), top.clone(), -(Q::one() / &kq), &top / &kq)];
    let m = n - 1;
    let c = simplex_coeff(m);
    let mut vol = Q::default();
    let mut total = Q::default();
    for (idx, (lo, hi, al, be)) in pieces.iter().enumerate() {
        vol += &c * affine_power_integral(al, be, m, 0, lo, hi);
        if j == 1 {
            total += &c * affine_power_integral(al, be, m, 1, lo, hi);
        } else {
            total += simplex_moment_coeff(m) * affine_power_integral(al, be, m + 1, 0, lo, hi);
        }
        if j == n && q_in && idx == 1 {
            let lin = affine_power_integral(al, be, m, 1, lo, hi);
            let cst = affine_power_integral(al, be, m, 0, lo, hi);
            total += &c * (lin - cst / &aq) / &kq;
        }
    }
    total / vol
}

#[test]
fn simplex_closed_forms_match_quadrature() {
    // midpoint rule on a grid over the unit cube, t = 1
    for m in 1..=3u32 {
        let steps = match m {
            1 => 4000,
            2 => 600,
            _ => 120,
        };
        let h = 1.0 / steps as f64;
        let mut vol = 0.0;
        let mut mom = 0.0;
        let mut idx = vec![0usize; m as usize];
        loop {
            let pts: Vec<f64> = idx.iter().map(|&i| (i as f64 + 0.5) * h).collect();
            if pts.iter().sum::<f64>() < 1.0 {
                vol += h.powi(m as i32);
                mom += pts[0] * h.powi(m as i32);
            }
            let mut d = 0;
            loop {
                if d == idx.len() {
                    break;
                }
                idx[d] += 1;
                if idx[d] < steps {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
            if d == idx.len() {
                break;
            }
        }
        let fact = |x: u32| (1..=x).product::<u32>() as f64;
        assert!((vol - 1.0 / fact(m)).abs() < 0.02 / fact(m), "volume m = {m}: {vol}");
        assert!((mom - 1.0 / fact(m + 1)).abs() < 0.02 / fact(m + 1), "moment m = {m}: {mom}");
        assert_eq!(simplex_coeff(m), Q::one() / qu((1..=m as u64).product()));
        assert_eq!(simplex_moment_coeff(m), Q::one() / qu((1..=m as u64 + 1).product()));
    }
}

#[test]
fn integrals_match_oracle_and_closed_forms_on_grid() {
    let mut checks = 0;
    for n in 2..=8u32 {
        for a in 1..=6u64 {
            for k in 1..=6u64 {
                let region = MomentRegion::new(n, a, k).unwrap();
                assert_eq!(region.volume(), region.expected_volume());
                assert_eq!(region.normalizer() * region.volume(), Q::one());
                for j in 1..=n {
                    for q_in in [false, true] {
                        let s = s_value(n, a, k, j, q_in).unwrap();
                        assert_eq!(s, s_value_closed_form(n, a, k, j, q_in).unwrap());
                        assert_eq!(s, oracle_s(n, a, k, j, q_in), "oracle n={n} a={a} k={k} j={j}");
                        checks += 1;
                    }
                }
                if a * k > 1 {
                    assert!(first_step_exceeds_uniform(n, a, k).unwrap());
                }
            }
        }
    }
    assert_eq!(checks, 36 * (2..=8).map(|n| 2 * n).sum::<u32>());
}

#[test]
fn s_value_examples() {
    assert_eq!(s_value(3, 2, 2, 1, false).unwrap(), q(7, 8));
    assert_eq!(s_value(3, 2, 2, 2, true).unwrap(), q(1, 4));
    assert_eq!(s_value(3, 2, 2, 3, false).unwrap(), q(1, 4));
    assert_eq!(s_value(3, 2, 2, 3, true).unwrap(), q(9, 20));
    assert!(matches!(s_value(3, 2, 2, 4, false), Err(Error::IndexOutOfRange { .. })));
    assert!(matches!(s_value(3, 2, 2, 0, false), Err(Error::IndexOutOfRange { .. })));
    assert!(s_value(1, 2, 2, 1, false).is_err());
    assert!(s_value(65, 2, 2, 1, false).is_err());
    assert!(s_value(64, 3, 2, 64, true).is_ok());
}

#[test]
fn delta_eckardt_examples() {
    let r = delta_eckardt(3, 2, 2).unwrap();
    assert_eq!(r.lower, q(12, 7));
    assert!(r.exact);
    assert_eq!(r.upper, q(12, 7));

    let r = delta_eckardt(11, 4, 2).unwrap();
    assert_eq!(r.upper, q(132, 19));
    assert_eq!(r.lower, q(108, 17));
    assert!(!r.exact);

    for n in 2..10u32 {
        let r = delta_eckardt(n, 1, 1).unwrap();
        let nq = qu(n as u64);
        let expect = if nq <= qi(2) * (&nq + qi(1)) / qi(3) { nq.clone() } else { qi(2) * (&nq + qi(1)) / qi(3) };
        assert_eq!(r.lower, expect);
    }
}

#[test]
fn exactness_flag_and_moment_route() {
    for n in 2..=8u32 {
        for a in 1..=6u64 {
            for k in 1..=6u64 {
                let r = delta_eckardt(n, a, k).unwrap();
                assert_eq!(r.exact, a * k + 1 >= n as u64);
                if r.exact {
                    assert_eq!(r.lower, r.upper);
                }
                assert!(r.lower <= r.upper);
                assert_eq!(delta_eckardt_from_moments(n, a, k).unwrap(), r.lower);
            }
        }
    }
}

#[test]
fn unstable_examples() {
    let r = unstable_check(11, 4, 2).unwrap();
    assert_eq!(r.verdict, UnstableVerdict::KUnstable { witness: q(132, 133) });
    assert_eq!(r.threshold, q(32, 3));
    assert_eq!(r.index, 7);

    let r = unstable_check(8, 2, 2).unwrap();
    assert!(matches!(r.verdict, UnstableVerdict::Inconclusive { .. }));

    assert!(matches!(unstable_check(10, 3, 2).unwrap().verdict, UnstableVerdict::KUnstable { .. }));
    assert!(unstable_check(4, 1, 2).is_err());
    assert!(matches!(unstable_check(3, 3, 3), Err(Error::Precondition(_))));
}

#[test]
fn minimal_unstable_dimension() {
    for a in 3..=6u64 {
        let first = (2..=MAX_DIMENSION)
            .find(|&n| matches!(unstable_check(n, a, 2).map(|r| r.verdict), Ok(UnstableVerdict::KUnstable { .. })))
            .unwrap();
        assert_eq!(first as u64, 2 * a * a / (a - 1) + 1);
    }
}

#[test]
fn moment_table_rows() {
    let rows = moment_table((2, 3), (1, 2), (1, 1)).unwrap();
    assert_eq!(rows.len(), 2 * (4 + 6));
    assert!(rows.iter().all(|r| r.matches()));
    assert_eq!((rows[0].n, rows[0].a, rows[0].j, rows[0].q_in_w1), (2, 1, 1, false));
}

proptest! {
    #[test]
    fn witness_below_one_iff_unstable_criterion(n in 2u32..40, a in 2u64..8, k in 1u64..4) {
        if let Ok(r) = unstable_check(n, a, k) {
            if let UnstableVerdict::KUnstable { witness } = &r.verdict {
                prop_assert!(witness < &Q::one());
                prop_assert!(qu(n as u64) > r.threshold);
            }
            let w = match &r.verdict {
                UnstableVerdict::KUnstable { witness } | UnstableVerdict::Inconclusive { witness, .. } => witness.clone(),
            };
            prop_assert_eq!(w, delta_eckardt(n, a, k).unwrap().upper / qi(r.index));
            prop_assert!(to_f64(&r.threshold) >= 0.0);
        }
    }
}

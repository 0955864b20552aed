use num_bigint::BigInt;
use proptest::prelude::*;
use wfano::blowup::{
    build, finite_cover_pull, intersection_via_cover, restrict_to_divisor, BiDegree, DivisorRestriction, ToricBlowup,
};
use wfano::rat::{pow_q, q, qi, qu};
use wfano::wps::{normalize, WeightVector};

fn w(v: &[u64]) -> WeightVector {
    WeightVector::new(v.to_vec()).unwrap()
}

#[test]
fn build_examples() {
    for a in 2..7 {
        let f = build(&w(&[1, 1, 1, 1, a]), 3).unwrap();
        assert_eq!((f.h, f.hp), (1, a));
        assert_eq!(f.app, vec![1, 1, 1, 1, 1]);
        assert!(f.gi.iter().all(|&g| g == 1));
        assert_eq!((f.g, f.gp), (1, 1));
        assert_eq!(f.hp as i64 * f.k - f.h as i64 * f.kp, 1);
    }
    let f = build(&w(&[2, 3, 4, 4, 5]), 2).unwrap();
    assert_eq!((f.h, f.hp), (1, 1));
    assert_eq!(&f.gi[..3], &[1, 2, 1]);
    assert_eq!(f.g, 2);
    assert_eq!(&f.ap[..3], &[1, 3, 2]);
    let f = build(&w(&[3, 1, 1, 1]), 2).unwrap();
    assert_eq!((f.h, f.hp), (1, 1));
    assert!(f.gi.iter().all(|&g| g == 1));
    assert!(build(&w(&[1, 1, 2]), 0).is_err());
    assert!(build(&w(&[1, 1, 2]), 2).is_err());
}

#[test]
fn bezout_representative_for_typical_frame() {
    let f = build(&w(&[1, 1, 1, 1, 4]), 3).unwrap();
    assert_eq!((f.k, f.kp), (0, -1));
    assert_eq!(f.v_rep, vec![0, 0, 0, 0, -1]);
    assert!(f.ray_conditions_hold());
    assert!(f.v_is_primitive());
}

#[test]
fn pullback_examples() {
    let f = build(&w(&[1, 1, 1, 1, 3]), 3).unwrap();
    assert_eq!(f.pullback_psi(0).unwrap(), q(1, 3));
    assert_eq!(f.pullback_psi(4).unwrap(), qi(0));
    let f = build(&w(&[2, 3, 4, 4, 5]), 2).unwrap();
    assert_eq!(f.pullback_psi(1).unwrap(), qi(3));
}

#[test]
fn intersection_examples() {
    for a in 2..6i64 {
        let f = build(&w(&[1, 1, 1, 1, a as u64]), 3).unwrap();
        assert_eq!(f.intersection_bi(0).unwrap(), qi(a * a * a));
        assert_eq!(f.intersection_bi(4).unwrap(), qi(0));
        // projective bundle check: P~ = P(O ⊕ O(a)) over P^3 for this frame
        let t = ToricBlowup::new(&f);
        for k in 0..=4 {
            assert_eq!(t.intersection_bi(k).unwrap(), f.intersection_bi(k).unwrap());
        }
    }
    let f = build(&w(&[2, 3, 4, 4, 5]), 2).unwrap();
    assert_eq!(f.intersection_bi(2).unwrap(), q(1, 480));
    assert_eq!(intersection_via_cover(&f, 2).unwrap(), q(1, 480));
}

#[test]
fn exceptional_examples() {
    let f = build(&w(&[1, 1, 1, 1, 5]), 3).unwrap();
    let e = f.exceptional_class();
    assert_eq!(e.first_factor, vec![1, 1, 1, 1]);
    assert_eq!(e.second_factor, vec![1]);
    assert_eq!(e.self_restriction, (qi(-5), qi(1)));
    assert_eq!(f.exceptional_degree_identity(), qi(1));

    let f = build(&w(&[2, 3, 4, 4, 5]), 2).unwrap();
    let e = f.exceptional_class();
    assert_eq!(e.class, BiDegree::new(-1, 1));
    assert_eq!(e.first_factor, vec![1, 3, 2]);
    // the second factor P(4,5) normalizes to P(1,1)
    assert_eq!(e.second_factor, vec![1, 1]);
    assert_eq!((e.g, e.gp), (2, 20));
    assert_eq!(e.restrict(&qi(2), &qi(10)), (qi(1), q(1, 2)));
    assert_eq!(f.exceptional_degree_identity(), qi(1));
}

#[test]
fn finite_cover_examples() {
    let f = build(&w(&[1, 1, 1, 1, 4]), 3).unwrap();
    let c = finite_cover_pull(&f, &[1, 1, 1, 1, 2]).unwrap();
    assert_eq!(c.scaling, (qi(1), qi(2)));
    assert_eq!(c.degree, BigInt::from(2));
    let c = finite_cover_pull(&f, &[1, 1, 1, 1, 1]).unwrap();
    assert_eq!(c.scaling, (qi(1), qi(1)));
    assert_eq!(c.degree, BigInt::from(1));
    let c = finite_cover_pull(&f, &[1, 1, 1, 1, 4]).unwrap();
    assert_eq!(c.scaling, (qi(1), qi(4)));
    assert_eq!(c.degree, BigInt::from(4));
    assert!(finite_cover_pull(&f, &[1, 1, 1, 1, 3]).is_err());
}

#[test]
fn restriction_examples() {
    let f = build(&w(&[1, 1, 1, 1, 3]), 3).unwrap();
    match restrict_to_divisor(&f, 0).unwrap() {
        DivisorRestriction::Blowup { frame, scaling, e_coefficient, divisor_weights } => {
            assert_eq!(divisor_weights.weights(), &[1, 1, 1, 3]);
            assert_eq!(frame.r, 2);
            assert_eq!(scaling, (qi(1), qi(1)));
            assert_eq!(e_coefficient, qi(1));
        }
        other => panic!("unexpected {other:?}"),
    }
    match restrict_to_divisor(&f, 4).unwrap() {
        DivisorRestriction::Isomorphism { section, .. } => assert!(section),
        other => panic!("unexpected {other:?}"),
    }
    assert!(restrict_to_divisor(&f, 2).is_err());

    let f = build(&w(&[2, 3, 4, 4, 5]), 2).unwrap();
    match restrict_to_divisor(&f, 0).unwrap() {
        DivisorRestriction::Blowup { divisor_weights, e_coefficient, .. } => {
            assert_eq!(divisor_weights.weights(), &[3, 4, 4, 5]);
            assert_eq!(e_coefficient, qi(1));
        }
        other => panic!("unexpected {other:?}"),
    }
    let f = build(&w(&[1, 2, 3]), 1).unwrap();
    assert!(matches!(restrict_to_divisor(&f, 0).unwrap(), DivisorRestriction::Isomorphism { section: false, .. }));
}

/// Restricting `O(alpha, beta)` to `D~_0` and intersecting there agrees with
/// intersecting `D~_0` on the ambient blowup.
fn check_restriction_oracle(f: &wfano::blowup::BlowupFrame, i: usize) {
    let s = f.s();
    let t = ToricBlowup::new(f);
    if let DivisorRestriction::Blowup { frame, scaling, .. } = restrict_to_divisor(f, i).unwrap() {
        for k in 0..s {
            let lhs = t.divisor_times_bi(i, k).unwrap();
            let rhs =
                pow_q(&scaling.0, k as u32) * pow_q(&scaling.1, (s - 1 - k) as u32) * frame.intersection_bi(k).unwrap();
            assert_eq!(lhs, rhs, "{:?} i {i} k {k}", f.ambient);
        }
    }
}

#[test]
fn restriction_matches_fan_engine() {
    for ws in [&[1u64, 1, 1, 1, 3][..], &[2, 3, 4, 4, 5], &[1, 2, 3, 5, 7], &[3, 1, 1, 1], &[1, 1, 2, 2, 3]] {
        let wv = normalize(&w(ws)).output;
        for r in 1..wv.s() {
            let f = build(&wv, r).unwrap();
            check_restriction_oracle(&f, 0);
            check_restriction_oracle(&f, wv.s());
        }
    }
}

fn well_formed_vector() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(1u64..=30, 3..=6)
        .prop_filter("gcd 1", |v| v.iter().fold(0, |a, &b| num_integer::gcd(a, b)) == 1)
        .prop_map(|v| normalize(&WeightVector::new(v).unwrap()).output.weights().to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn frame_invariants(v in well_formed_vector(), rr in 0usize..8) {
        let wv = WeightVector::new(v).unwrap();
        let s = wv.s();
        let r = 1 + rr % (s - 1);
        let f = build(&wv, r).unwrap();
        prop_assert_eq!(num_integer::gcd(f.h, f.hp), 1);
        prop_assert!(f.ray_conditions_hold());
        prop_assert!(f.v_is_primitive());
        for i in 0..=s {
            if let Some(m) = f.ray_ray_mult_snf(i) {
                prop_assert_eq!(m, BigInt::from(f.gi[i]));
            } else {
                prop_assert!(i == s && r == s - 1);
            }
            prop_assert_eq!(f.psi_pullback_o1(i).unwrap(), (qi(0), q(1, f.hp as i64)));
        }
        for i in 0..=r {
            prop_assert_eq!(f.pi_pullback_o1(i), (qu(f.g), qi(0)));
        }
        let e = f.exceptional_class();
        prop_assert_eq!(e.class, BiDegree::new(-(f.hp as i64), f.h as i64));
        prop_assert_eq!(f.exceptional_degree_identity(), qi(1));
        let t = ToricBlowup::new(&f);
        for k in 0..=s {
            let closed = f.intersection_bi(k).unwrap();
            prop_assert_eq!(&t.intersection_bi(k).unwrap(), &closed);
            prop_assert_eq!(&intersection_via_cover(&f, k).unwrap(), &closed);
        }
    }
}

use std::collections::BTreeSet;

use wfano::lemmas::*;
use wfano::poly::{general_member_quasi_smooth_bruteforce, MemberFamily};
use wfano::wps::{hypersurface_well_formed, WeightVector};

/// Every ascending index-1 vector of length n+2 with entries at most w.
fn naive_index_one(n: u32, w: u64) -> Vec<Case> {
    let mut out = Vec::new();
    let len = n as usize + 2;
    let mut cur = vec![1u64; len];
    loop {
        let sum: u64 = cur.iter().sum();
        if sum >= 3 {
            out.push(Case { weights: cur.clone(), d: sum - 1 });
        }
        // next ascending vector
        let mut i = len;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < w {
                let v = cur[i] + 1;
                for x in cur.iter_mut().skip(i) {
                    *x = v;
                }
                break;
            }
        }
    }
}

#[test]
fn residue_one_generator_is_complete_on_small_region() {
    for n in 3..=5u32 {
        for w in [6u64, 10] {
            let expect: BTreeSet<Case> = naive_index_one(n, w)
                .into_iter()
                .filter(|c| c.weights[0] == 1 && c.weights.iter().any(|&x| x > 1))
                .filter(|c| c.weights.iter().filter(|&&x| x > 1).all(|&x| c.d % x == 1))
                .collect();
            let got: BTreeSet<Case> = residue_one_candidates(n, w).into_iter().collect();
            assert_eq!(got, expect, "n = {n}, w = {w}");
        }
    }
}

#[test]
fn containing_b1_forces_residue_one_and_many_ones() {
    let mut seen = 0;
    for n in 3..=5u32 {
        for c in naive_index_one(n, 9) {
            if !has_quasi_smooth_member_containing_b1(&c.weights, c.d) {
                continue;
            }
            seen += 1;
            let c1 = c.weights.iter().filter(|&&x| x == 1).count();
            assert!(2 * c1 > n as usize + 1, "{c:?}");
            for &x in c.weights.iter().filter(|&&x| x > 1) {
                assert_eq!(c.d % x, 1, "{c:?}");
            }
        }
    }
    assert!(seen > 20, "{seen}");
}

#[test]
fn collapsed_criterion_matches_bruteforce_on_lemma_candidates() {
    for n in 3..=4u32 {
        for c in residue_one_candidates(n, 8) {
            for fam in [MemberFamily::All, MemberFamily::ContainingB1] {
                let fast = wfano::poly::general_member_quasi_smooth(&c.weights, c.d, fam);
                assert_eq!(fast, general_member_quasi_smooth_bruteforce(&c.weights, c.d, fam), "{c:?}");
            }
        }
    }
}

#[test]
fn two_weight_holds_with_single_equality_family() {
    let rep = sweep_two_weight(12, 40);
    assert!(rep.holds(), "{:?}", rep.violations);
    let expect: Vec<Case> = (3..=12u64)
        .map(|n| {
            let mut w = vec![1u64; n as usize];
            w.extend([2, n + 1]);
            Case { weights: w, d: 2 * n + 2 }
        })
        .collect();
    assert_eq!(rep.equality, expect);
    assert!(rep.satisfying >= 200, "{}", rep.satisfying);
}

#[test]
fn two_weight_equality_requires_the_family() {
    // (1^3,3,3) fails the hypotheses only through the degree pattern; the
    // equality case itself satisfies them.
    assert!(two_weight_hypotheses(3, 2, 4).is_some());
    assert_eq!(two_weight_hypotheses(3, 2, 4).unwrap().d, 8);
    assert!(two_weight_hypotheses(3, 1, 4).is_none());
}

#[test]
fn residue_one_and_many_ones_hold() {
    let r1 = sweep_residue_one(12, 40);
    assert!(r1.holds(), "{:?}", r1.violations);
    assert!(r1.satisfying > 100, "{}", r1.satisfying);
    let r2 = sweep_many_ones(12, 40);
    assert!(r2.holds(), "{:?}", r2.violations);
    assert!(r2.satisfying > 100, "{}", r2.satisfying);
}

#[test]
fn top_weight_holds_and_violator_search_is_complete() {
    let rep = sweep_top_weight(12, 40);
    assert!(rep.holds(), "{:?}", rep.violations);
    assert!(rep.examined > 0);
    // direct check on a small region, all vectors with a_0 = 1
    for n in 3..=5u32 {
        for top in 2..=7u64 {
            let mut direct = BTreeSet::new();
            for w in all_vectors_with_leading_one(n, top) {
                if *w.last().unwrap() != top {
                    continue;
                }
                let d = w.iter().sum::<u64>() - 1;
                let case = Case { weights: w, d };
                if top_weight_hypotheses(&case) {
                    assert!((n as u64 + 1) * top > d, "{case:?}");
                }
                if d >= (n as u64 + 1) * top {
                    direct.insert(case);
                }
            }
            let gen: BTreeSet<Case> = top_weight_potential_violators(n, top).into_iter().collect();
            assert_eq!(gen, direct);
        }
    }
}

#[test]
fn hypersurface_well_formedness_examples() {
    let w = WeightVector::new(vec![1, 1, 2, 2, 2]).unwrap();
    assert!(hypersurface_well_formed(&w, 8));
    assert!(!hypersurface_well_formed(&w, 7));
    let w = WeightVector::new(vec![1, 1, 1, 1, 2]).unwrap();
    assert!(hypersurface_well_formed(&w, 5));
}

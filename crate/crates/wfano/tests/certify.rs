use proptest::prelude::*;

use wfano::certify::*;
use wfano::lemmas::{has_quasi_smooth_member, has_quasi_smooth_member_containing_b1};
use wfano::rat::{q, qi, qu};
use wfano::{Error, Q};

fn datum(weights: &[u64], d: u64) -> FanoDatum {
    FanoDatum::new(weights.to_vec(), d, Flags::default()).unwrap()
}

fn datum_with(weights: &[u64], d: u64, f: impl FnOnce(&mut Flags)) -> FanoDatum {
    let mut flags = Flags::default();
    f(&mut flags);
    FanoDatum::new(weights.to_vec(), d, flags).unwrap()
}

fn ones(n: usize, rest: &[u64]) -> Vec<u64> {
    let mut w = vec![1u64; n];
    w.extend_from_slice(rest);
    w
}

fn entry<'a>(c: &'a DeltaCertificate, id: &str, scope: Scope) -> Option<&'a TraceEntry> {
    c.trace.iter().find(|e| e.rule_id == id && e.scope == scope)
}

#[test]
fn derive_b1_examples() {
    // d = ak: residue 0
    let r = derive_b1(&datum(&ones(4, &[3]), 6));
    assert_eq!((r.status, r.rule), (B1Status::No, Some("b1-residue")));
    // d = ak + 1: not in aZ
    let r = derive_b1(&datum(&ones(4, &[3]), 7));
    assert_eq!((r.status, r.rule), (B1Status::Yes, Some("b1-semigroup")));
    // c_1 <= (n+1)/2
    let r = derive_b1(&datum(&[1, 1, 2, 3, 5], 11));
    assert_eq!((r.status, r.rule), (B1Status::No, Some("b1-dimension")));
    // all ones
    assert_eq!(derive_b1(&datum(&ones(5, &[]), 4)).status, B1Status::Unknown);
    // representable degree, residue one: depends on the member
    let d = datum(&[1, 1, 1, 2, 3], 7);
    assert_eq!(derive_b1(&d).status, B1Status::Unknown);
    let g = d.with_flags(Flags { general_member: true, ..Flags::default() });
    assert_eq!(derive_b1(&g).status, B1Status::No);
}

#[test]
fn derive_b1_agrees_with_member_criterion() {
    // ascending vectors of length 5 and 6 with weights <= 7 and degrees <= 30
    let mut checked = 0;
    for len in [5usize, 6] {
        let mut stack = vec![vec![1u64]];
        while let Some(w) = stack.pop() {
            if w.len() < len {
                for x in *w.last().unwrap()..=7 {
                    let mut v = w.clone();
                    v.push(x);
                    stack.push(v);
                }
                continue;
            }
            let Ok(base) = FanoDatum::new(w.clone(), 2, Flags::default()) else { continue };
            for d in 2..=30u64 {
                if !has_quasi_smooth_member(&w, d) {
                    continue;
                }
                let x = base.with_flags(Flags::default());
                let x = FanoDatum::new(x.weights().to_vec(), d, Flags::default()).unwrap();
                let contains = has_quasi_smooth_member_containing_b1(&w, d);
                match derive_b1(&x).status {
                    B1Status::Yes => assert!(contains, "{w:?} d={d}"),
                    B1Status::No => assert!(!contains, "{w:?} d={d}"),
                    B1Status::Unknown => {}
                }
                checked += 1;
            }
        }
    }
    assert!(checked > 1000);
}

#[test]
fn documented_examples() {
    let c = certify(&datum(&[1, 1, 1, 1, 2], 5)).unwrap();
    assert_eq!(c.verdict, Verdict::KStable);
    assert_eq!(c.bound, q(4, 3));
    assert_eq!(entry(&c, "one-weight-index-one", Scope::Global).unwrap().value, q(4, 3));

    let c = certify(&datum_with(&ones(12, &[4]), 9, |f| f.eckardt_at_p = Some(true))).unwrap();
    assert_eq!(c.verdict, Verdict::KUnstable);
    assert_eq!(c.index, 7);
    let ac = c.to_anticanonical();
    assert_eq!(ac.upper, Some(q(132, 133)));
    let e = entry(&c, "eckardt-unstable", Scope::Global).unwrap();
    assert!(e.inputs.contains(&("anticanonical_witness".into(), "132/133".into())));
}

#[test]
fn one_weight_theorem_endpoints() {
    let mut stable = 0;
    let mut larger = 0;
    for n in 3..=10usize {
        for a in 2..=8u64 {
            let d = n as u64 + a;
            let w = ones(n + 1, &[a]);
            let x = match FanoDatum::new(w.clone(), d, Flags::default()) {
                Ok(x) => x,
                Err(_) => continue,
            };
            if !has_quasi_smooth_member(&w, d) {
                assert!(matches!(certify(&x), Err(Error::Precondition(_))));
                continue;
            }
            let c = certify(&x).unwrap();
            let theorem = qu(n as u64 + 1) / qu(n as u64);
            assert_eq!(entry(&c, "one-weight-index-one", Scope::Global).unwrap().value, theorem);
            assert!(c.bound >= theorem);
            assert_eq!(c.verdict, Verdict::KStable);
            stable += 1;
            if c.bound > theorem {
                larger += 1;
            }
        }
    }
    assert!(stable >= 20, "{stable}");
    assert!(larger > 0);
}

#[test]
fn two_weight_theorem_sweep() {
    let mut rows = 0;
    for n in 3..=6usize {
        for a in 2..=10u64 {
            for b in a..=10u64 {
                let w = ones(n, &[a, b]);
                let d = n as u64 + a + b - 1;
                if !has_quasi_smooth_member(&w, d) {
                    continue;
                }
                let c = certify(&datum(&w, d)).unwrap();
                let theorem = qu(a) * qu(n as u64 + 1) / qu(a * n as u64 + 1);
                let e = entry(&c, "two-weights-index-one", Scope::Global).unwrap();
                assert_eq!(e.value, theorem);
                assert!(c.bound >= theorem);
                assert_eq!(c.verdict, Verdict::KStable);
                if d.is_multiple_of(b) {
                    let ext = entry(&c, "divisible-top-weight", Scope::Global).unwrap();
                    assert!(ext.external);
                    assert_eq!(ext.value, qu(n as u64 + 1) / qu(d / b));
                }
                rows += 1;
            }
        }
    }
    assert!(rows > 40, "{rows}");
}

#[test]
fn three_term_minimum_matches_stated_bound() {
    for n in 3..=12u64 {
        for a in 2..=12u64 {
            for k in 2..=10u64 {
                let t = top_point_three_term(n, a, k);
                let min = t.iter().cloned().reduce(|x, y| if x <= y { x } else { y }).unwrap();
                assert_eq!(min, qu(n + 1) / qu(k * a + 1 - a), "n={n} a={a} k={k}");
            }
        }
    }
    // at n = 2 and k = 2 the first two terms tie
    let t = top_point_three_term(2, 3, 2);
    assert_eq!(t[0], t[1]);
}

#[test]
fn b1_rule_records_and_combines() {
    // X_5 in P(1^4,2): B_1 = P lies on X
    let c = certify(&datum(&ones(4, &[2]), 5)).unwrap();
    assert_eq!(c.resolved.b1.status, B1Status::Yes);
    assert_eq!(entry(&c, "b1-top-point", Scope::Global).unwrap().value, q(4, 3));
    let at_p = entry(&c, "b1-top-point", Scope::AtP).unwrap();
    assert_eq!(at_p.value, q(4, 3));
    assert!(at_p.inputs.iter().any(|(k, _)| k == "three_terms"));
    assert_eq!(entry(&c, "b1-top-point", Scope::AwayFromP).unwrap().value, q(8, 5));
    assert!(entry(&c, "combine-points", Scope::Global).is_some());
    assert!(c.bound >= q(4, 3));
}

#[test]
fn surface_rules_at_the_only_threefold() {
    // X_{ak+1} in P(1^4,a) with index 1 forces a = k = 2; m = 1 = k - 1
    let base = certify(&datum(&ones(4, &[2]), 5)).unwrap();
    let with_m = certify(&datum_with(&ones(4, &[2]), 5, |f| f.m = Some(1))).unwrap();
    assert!(with_m.bound >= base.bound);
    let s = entry(&with_m, "surface-singular", Scope::Surface).unwrap();
    assert_eq!(s.value, q(1, 1));
    let p = entry(&with_m, "surface-singular", Scope::AtP).unwrap();
    assert_eq!(p.value, q(4, 3));
    // d >= (ma+1)^2 = 9 fails for d = 5
    assert!(entry(&with_m, "surface-big-degree", Scope::AtP).is_none());
}

#[test]
fn eckardt_exact_value_outranks() {
    // ak+1 >= n: exact value at P
    let c = certify(&datum_with(&ones(4, &[2]), 5, |f| f.eckardt_at_p = Some(true))).unwrap();
    let e = entry(&c, "eckardt-point", Scope::AtP).unwrap();
    assert_eq!(e.kind, BoundKind::Exact);
    assert_eq!(e.value, q(12, 7));
    assert_eq!(c.upper, Some(q(12, 7)));
    // m = k is the Eckardt case
    let c2 = certify(&datum_with(&ones(4, &[2]), 5, |f| f.m = Some(2))).unwrap();
    assert_eq!(c2.resolved.eckardt, Some(true));
}

#[test]
fn many_ones_general_member() {
    // search for data meeting the family hypotheses where the general
    // flag is what certifies stability
    let mut found = 0;
    for n in 4..=7usize {
        let w_max = 9u64;
        let mut stack: Vec<Vec<u64>> = vec![vec![]];
        while let Some(big) = stack.pop() {
            if big.len() < n + 2 - (n + 3) / 2 {
                let lo = big.last().copied().unwrap_or(2);
                for x in lo..=w_max {
                    let mut v = big.clone();
                    v.push(x);
                    stack.push(v);
                }
            }
            if big.is_empty() {
                continue;
            }
            let c1 = n + 2 - big.len();
            if 2 * c1 < n + 2 || c1 > n {
                continue;
            }
            let w = ones(c1, &big);
            let d = w.iter().sum::<u64>() - 1;
            if !big.iter().all(|&a| d % a == 1) || !has_quasi_smooth_member(&w, d) {
                continue;
            }
            let Ok(x) = FanoDatum::new(w.clone(), d, Flags::default()) else { continue };
            let plain = certify(&x).unwrap();
            let gen = certify(&x.with_flags(Flags { general_member: true, ..Flags::default() })).unwrap();
            assert_eq!(gen.verdict, Verdict::KStable, "{w:?}");
            assert!(gen.bound >= plain.bound || gen.strict);
            let explicit = entry(&gen, "many-ones-explicit", Scope::ExplicitMember).unwrap();
            assert!(explicit.value > Q::from_integer(1.into()));
            if plain.verdict != Verdict::KStable {
                found += 1;
                assert_eq!(gen.bound_rule, Some("many-ones-general"));
                assert!(gen.strict);
            }
        }
    }
    assert!(found > 0);
}

#[test]
fn errors() {
    assert!(matches!(FanoDatum::new(vec![2, 2, 4], 4, Flags::default()), Err(Error::CommonDivisor(2))));
    assert!(matches!(FanoDatum::new(vec![1, 2, 2], 4, Flags::default()), Err(Error::NotWellFormed(_))));
    assert!(matches!(FanoDatum::new(vec![1, 2], 4, Flags::default()), Err(Error::TooShort(2))));
    // index <= 0
    assert!(matches!(certify(&datum(&ones(5, &[]), 5)), Err(Error::Precondition(_))));
    // not quasi-smooth
    assert!(matches!(certify(&datum(&ones(4, &[3]), 8)), Err(Error::Precondition(_))));
    let nq = datum_with(&ones(4, &[2]), 5, |f| f.quasi_smooth = false);
    assert!(matches!(certify(&nq), Err(Error::Precondition(_))));
    // Eckardt data on the wrong shape or inconsistent m
    let bad = datum_with(&ones(3, &[2, 3]), 7, |f| f.eckardt_at_p = Some(true));
    assert!(matches!(certify(&bad), Err(Error::Precondition(_))));
    let bad = datum_with(&ones(4, &[2]), 5, |f| {
        f.eckardt_at_p = Some(true);
        f.m = Some(1);
    });
    assert!(matches!(certify(&bad), Err(Error::Precondition(_))));
    // asserted containment contradicting the residue rule
    let bad = datum_with(&ones(4, &[3]), 6, |f| f.b1_in_x = B1Status::Yes);
    assert!(matches!(certify(&bad), Err(Error::Precondition(_))));
}

#[test]
fn enumerate_examples() {
    let spec = EnumerationSpec {
        n: 11,
        max_weight: 6,
        degree: DegreeRule::TopMultiplePlusOne(2),
        big_weights: Some(1),
        flags: Flags { eckardt_at_p: Some(true), ..Flags::default() },
    };
    let e = enumerate(&spec, 2).unwrap();
    assert_eq!(e.rows.len(), 5);
    for r in &e.rows {
        let a = r.datum.top();
        let unstable = 11 * (a - 1) > 2 * a * a;
        assert_eq!(r.certificate.verdict == Verdict::KUnstable, unstable, "a = {a}");
        assert!(r.certificate.fired_rules().contains(&"eckardt-point"));
    }

    let spec = EnumerationSpec {
        n: 3,
        max_weight: 10,
        degree: DegreeRule::Index(1),
        big_weights: Some(2),
        flags: Flags::default(),
    };
    let e = enumerate(&spec, 3).unwrap();
    assert!(e.rows.len() > 3, "{}", e.rows.len());
    assert!(e.rows.iter().all(|r| r.certificate.bound > Q::from_integer(1.into())));
    assert!(e.skipped.is_empty());

    let spec = EnumerationSpec {
        n: 4,
        max_weight: 1,
        degree: DegreeRule::Index(1),
        big_weights: None,
        flags: Flags::default(),
    };
    let e = enumerate(&spec, 1).unwrap();
    assert_eq!(e.rows.len(), 1);
    // only the degree bound (n+1)/d = 1 applies to X_5 in P^5
    assert_eq!(e.rows[0].certificate.fired_rules(), vec!["two-weights-degree"]);
    assert_eq!(e.rows[0].certificate.bound, q(1, 1));
    assert_eq!(e.rows[0].certificate.verdict, Verdict::Inconclusive);

    let too_big = EnumerationSpec {
        n: 12,
        max_weight: 40,
        degree: DegreeRule::Index(1),
        big_weights: None,
        flags: Flags::default(),
    };
    assert!(matches!(enumerate(&too_big, 1), Err(Error::Precondition(_))));
}

#[test]
fn enumeration_is_deterministic_across_thread_counts() {
    let spec = EnumerationSpec {
        n: 3,
        max_weight: 7,
        degree: DegreeRule::Index(1),
        big_weights: None,
        flags: Flags::default(),
    };
    let one = enumerate(&spec, 1).unwrap();
    let four = enumerate(&spec, 4).unwrap();
    assert_eq!(one, four);
    let keys: Vec<Vec<u64>> = one.rows.iter().map(|r| r.datum.weights().to_vec()).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

fn all_rows() -> Vec<EnumRow> {
    let mut rows = Vec::new();
    for (n, w, deg, flags) in [
        (3, 8, DegreeRule::Index(1), Flags::default()),
        (3, 8, DegreeRule::Index(2), Flags::default()),
        (4, 6, DegreeRule::Index(1), Flags { general_member: true, ..Flags::default() }),
        (3, 6, DegreeRule::TopMultiplePlusOne(3), Flags { m: Some(1), ..Flags::default() }),
        (8, 5, DegreeRule::TopMultiplePlusOne(2), Flags { eckardt_at_p: Some(true), ..Flags::default() }),
    ] {
        let spec = EnumerationSpec { n, max_weight: w, degree: deg, big_weights: None, flags };
        rows.extend(enumerate(&spec, 2).unwrap().rows);
    }
    rows
}

#[test]
fn replay_and_conversion() {
    let rows = all_rows();
    assert!(rows.len() > 100);
    for r in &rows {
        let c = &r.certificate;
        assert!(replay(&r.datum, c).is_empty(), "{:?}", r.datum);
        let ac = c.to_anticanonical();
        assert_eq!(&ac.bound * qi(c.index), c.bound);
        assert_eq!(ac.to_o1(), *c);
        match c.verdict {
            Verdict::KStable => {
                assert!(ac.bound > Q::from_integer(1.into()) || (ac.strict && ac.bound == Q::from_integer(1.into())))
            }
            Verdict::KUnstable => assert!(ac.upper.unwrap() < Q::from_integer(1.into())),
            Verdict::Inconclusive => {}
        }
        if let Some(u) = &c.upper {
            assert!(&c.bound <= u);
        }
    }
}

#[test]
fn independent_replay_of_shape_hypotheses() {
    // re-check the hypotheses with direct arithmetic instead of holds()
    for r in all_rows() {
        let w = r.datum.weights();
        let n = w.len() - 2;
        let d = r.datum.degree();
        let ones_count = w.iter().filter(|&&x| x == 1).count();
        for e in &r.certificate.trace {
            for h in &e.hypotheses {
                let ok = match h {
                    Hypothesis::DimensionAtLeast(m) => n as u32 >= *m,
                    Hypothesis::DimensionIs(m) => n as u32 == *m,
                    Hypothesis::IndexIs(i) => w.iter().sum::<u64>() as i64 - d as i64 == *i,
                    Hypothesis::OnesCount(c) => ones_count == *c,
                    Hypothesis::OnesAtLeast(c) => ones_count >= *c,
                    Hypothesis::WeightAtLeast { position, min } => w[*position] >= *min,
                    Hypothesis::DegreeAtLeast(m) => d >= *m,
                    Hypothesis::WeightDividesDegree(x) => *x > 1 && w.contains(x) && d % x == 0,
                    Hypothesis::DegreeResidue { modulus, residue } => d % modulus == *residue,
                    _ => true,
                };
                assert!(ok, "{} fails {h} on {w:?} d={d}", e.rule_id);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]
    #[test]
    fn adding_flags_never_lowers_the_bound(
        n in 3usize..7,
        big in proptest::collection::vec(2u64..8, 1..3),
        index in 1i64..3,
        m in 1u64..3,
    ) {
        let mut big = big;
        big.sort();
        let w = ones(n + 2 - big.len(), &big);
        let d = w.iter().sum::<u64>() as i64 - index;
        prop_assume!(d >= 2);
        let d = d as u64;
        let Ok(x) = FanoDatum::new(w.clone(), d, Flags::default()) else { return Ok(()) };
        prop_assume!(has_quasi_smooth_member(&w, d));
        let base = certify(&x).unwrap();
        let variants = [
            Flags { general_member: true, ..Flags::default() },
            Flags { m: Some(m), ..Flags::default() },
            Flags { eckardt_at_p: Some(false), ..Flags::default() },
            Flags { eckardt_at_p: Some(true), ..Flags::default() },
        ];
        for f in variants {
            if let Ok(c) = certify(&x.with_flags(f)) {
                prop_assert!(c.bound > base.bound || (c.bound == base.bound && (c.strict || !base.strict)));
            }
        }
    }
}

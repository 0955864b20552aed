//! Exhaustive checks of the numerical inequalities behind the two-weight
//! and many-weight stability bounds. Each sweep enumerates the weight
//! vectors of a region, evaluates the hypotheses directly (well-formedness,
//! index, combinatorial quasi-smoothness of a general member, existence of
//! a quasi-smooth member containing `B_1`) and records every case where
//! the hypotheses hold but the conclusion fails.

use crate::poly::{general_member_quasi_smooth, MemberFamily};
use crate::rat::{qu, Q};
use crate::wps::{hypersurface_well_formed, WeightVector};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Case {
    pub weights: Vec<u64>,
    pub d: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaReport {
    pub name: &'static str,
    pub max_n: u32,
    pub max_weight: u64,
    /// Candidates generated.
    pub examined: u64,
    /// Candidates satisfying every hypothesis.
    pub satisfying: u64,
    pub violations: Vec<Case>,
    /// Cases attaining equality in a non-strict conclusion.
    pub equality: Vec<Case>,
}

impl LemmaReport {
    fn new(name: &'static str, max_n: u32, max_weight: u64) -> Self {
        Self { name, max_n, max_weight, examined: 0, satisfying: 0, violations: Vec::new(), equality: Vec::new() }
    }

    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

fn well_formed(weights: &[u64]) -> bool {
    WeightVector::new(weights.to_vec()).is_ok_and(|w| w.is_well_formed())
}

fn index(weights: &[u64], d: u64) -> i64 {
    weights.iter().sum::<u64>() as i64 - d as i64
}

/// Some quasi-smooth member of `|O(d)|` exists.
pub fn has_quasi_smooth_member(weights: &[u64], d: u64) -> bool {
    general_member_quasi_smooth(weights, d, MemberFamily::All)
}

/// Some quasi-smooth member of `|O(d)|` contains `B_1`.
pub fn has_quasi_smooth_member_containing_b1(weights: &[u64], d: u64) -> bool {
    weights.contains(&1)
        && weights.iter().any(|&w| w > 1)
        && general_member_quasi_smooth(weights, d, MemberFamily::ContainingB1)
}

/// Hypotheses of the two-weight lemma: `P(1^n, a, b)`, `n >= 3`,
/// `1 < a <= b`, index 1 and a quasi-smooth member.
pub fn two_weight_hypotheses(n: u32, a: u64, b: u64) -> Option<Case> {
    if n < 3 || a < 2 || b < a {
        return None;
    }
    let mut weights = vec![1u64; n as usize];
    weights.extend([a, b]);
    let d = n as u64 + a + b - 1;
    (well_formed(&weights) && has_quasi_smooth_member(&weights, d)).then_some(Case { weights, d })
}

/// `(n+1)a/d >= 1` with equality only for `X_{2n+2}` in `P(1^n,2,n+1)`;
/// `(n+1)a/d >= (n+1)/(n+1/a)` when `b` does not divide `d`; and
/// `d mod b` lies in `{0, 1, a}`.
pub fn sweep_two_weight(max_n: u32, max_weight: u64) -> LemmaReport {
    let mut rep = LemmaReport::new("two-weight", max_n, max_weight);
    for n in 3..=max_n {
        for a in 2..=max_weight {
            for b in a..=max_weight {
                rep.examined += 1;
                let Some(case) = two_weight_hypotheses(n, a, b) else { continue };
                rep.satisfying += 1;
                let d = case.d;
                let nq = qu(n as u64);
                let lhs = (&nq + Q::from_integer(1.into())) * qu(a) / qu(d);
                let one = Q::from_integer(1.into());
                let refined = qu(a) * (&nq + &one) / (qu(a) * &nq + &one);
                let expected_equality = a == 2 && b == n as u64 + 1 && d == 2 * n as u64 + 2;
                let residue_ok = [0, 1, a].contains(&(d % b));
                let ok =
                    lhs >= one && (lhs != one || expected_equality) && (d % b == 0 || lhs >= refined) && residue_ok;
                if lhs == one {
                    rep.equality.push(case.clone());
                }
                if !ok {
                    rep.violations.push(case);
                }
            }
        }
    }
    rep
}

/// Every ascending weight vector with at least one weight `> 1`, entries
/// at most `max_weight`, index 1 and `d = 1 mod a_j` for each weight
/// `a_j > 1`. Generated from the top weight `A`, `d = kA + 1` and the
/// partitions of the remaining sum into divisors of `kA`.
pub fn residue_one_candidates(n: u32, max_weight: u64) -> Vec<Case> {
    fn parts(
        remaining: u64,
        count: usize,
        lo_idx: usize,
        allowed: &[u64],
        cur: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
    ) {
        if count == 0 {
            if remaining == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for i in lo_idx..allowed.len() {
            let w = allowed[i];
            if w * count as u64 > remaining {
                break;
            }
            if *allowed.last().expect("non-empty") * (count as u64) < remaining {
                return;
            }
            cur.push(w);
            parts(remaining - w, count - 1, i, allowed, cur, out);
            cur.pop();
        }
    }
    let len = n as usize + 2;
    let mut out = Vec::new();
    for h in 1..=len - 1 {
        let c1 = len - h;
        for top in 2..=max_weight {
            for k in 1u64.. {
                let d = k * top + 1;
                let total = d + 1;
                if total < c1 as u64 + top {
                    continue;
                }
                let rest = total - c1 as u64 - top;
                if rest > (h as u64 - 1) * top {
                    break;
                }
                if h == 1 {
                    if rest == 0 {
                        let mut w = vec![1u64; c1];
                        w.push(top);
                        out.push(Case { weights: w, d });
                    }
                    continue;
                }
                let allowed: Vec<u64> = (2..=top).filter(|w| (d - 1) % w == 0).collect();
                let mut found = Vec::new();
                parts(rest, h - 1, 0, &allowed, &mut Vec::new(), &mut found);
                for p in found {
                    let mut w = vec![1u64; c1];
                    w.extend(p);
                    w.push(top);
                    out.push(Case { weights: w, d });
                }
            }
        }
    }
    out.sort();
    out
}

/// Hypotheses shared by the `B_1` lemmas: `n >= 3`, well-formed `P`,
/// index 1 and a quasi-smooth member containing `B_1`.
pub fn b1_hypotheses(case: &Case) -> bool {
    case.weights.len() >= 5
        && well_formed(&case.weights)
        && index(&case.weights, case.d) == 1
        && has_quasi_smooth_member_containing_b1(&case.weights, case.d)
}

/// With `a_n >= 2` and `d = k a_{n+1} + 1`: `(n+1)a_n/d > 1` when
/// `k >= 4`, or `k >= 3` and `a_n >= 3`.
pub fn sweep_residue_one(max_n: u32, max_weight: u64) -> LemmaReport {
    let mut rep = LemmaReport::new("residue-one", max_n, max_weight);
    for n in 3..=max_n {
        for case in residue_one_candidates(n, max_weight) {
            rep.examined += 1;
            let an = case.weights[n as usize];
            let top = case.weights[n as usize + 1];
            if an < 2 || case.d % top != 1 || !b1_hypotheses(&case) {
                continue;
            }
            rep.satisfying += 1;
            let k = (case.d - 1) / top;
            if (k >= 4 || (k >= 3 && an >= 3)) && (n as u64 + 1) * an <= case.d {
                rep.violations.push(case);
            }
        }
    }
    rep
}

/// With `c_1 <= n` weights equal to 1: `d < (n+1)a_n` or `d < n^2`.
pub fn sweep_many_ones(max_n: u32, max_weight: u64) -> LemmaReport {
    let mut rep = LemmaReport::new("many-ones", max_n, max_weight);
    for n in 3..=max_n {
        for case in residue_one_candidates(n, max_weight) {
            rep.examined += 1;
            let c1 = case.weights.iter().filter(|&&w| w == 1).count();
            if c1 > n as usize || !b1_hypotheses(&case) {
                continue;
            }
            rep.satisfying += 1;
            let an = case.weights[n as usize];
            let nn = n as u64;
            if case.d >= (nn + 1) * an && case.d >= nn * nn {
                rep.violations.push(case);
            }
        }
    }
    rep
}

/// Hypotheses of the top-weight lemma: `P(1, a_1, ..., a_{n+1})` with
/// `n >= 3` and `a_{n+1} > 1`, well-formed `P` and `X`, index 1 and a
/// quasi-smooth member.
pub fn top_weight_hypotheses(case: &Case) -> bool {
    let w = &case.weights;
    w.len() >= 5
        && w[0] == 1
        && *w.last().expect("non-empty") > 1
        && index(w, case.d) == 1
        && WeightVector::new(w.clone()).is_ok_and(|v| hypersurface_well_formed(&v, case.d))
        && has_quasi_smooth_member(w, case.d)
}

/// Ascending vectors `(1, a_1, ..., a_n, A)` with `a_i <= A` whose index-1
/// degree `d = sum - 1` satisfies `d >= (n+1)A`: the only vectors on which
/// `(n+1)A/d > 1` can fail.
pub fn top_weight_potential_violators(n: u32, top: u64) -> Vec<Case> {
    fn go(slots: usize, lo: u64, top: u64, need: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if slots == 0 {
            if need == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for w in lo..=top {
            if w + (slots as u64 - 1) * top < need {
                continue;
            }
            cur.push(w);
            go(slots - 1, w, top, need.saturating_sub(w), cur, out);
            cur.pop();
        }
    }
    let nn = n as u64;
    // sum - 1 >= (n+1) top with sum = 1 + (a_1 + ... + a_n) + top
    let need = nn * top;
    let mut mids = Vec::new();
    go(n as usize, 1, top, need, &mut Vec::new(), &mut mids);
    mids.into_iter()
        .map(|m| {
            let mut w = vec![1u64];
            w.extend(m);
            w.push(top);
            let d = w.iter().sum::<u64>() - 1;
            Case { weights: w, d }
        })
        .collect()
}

/// `(n+1)a_{n+1}/d > 1`, checked on every potential violator.
pub fn sweep_top_weight(max_n: u32, max_weight: u64) -> LemmaReport {
    let mut rep = LemmaReport::new("top-weight", max_n, max_weight);
    for n in 3..=max_n {
        for top in 2..=max_weight {
            for case in top_weight_potential_violators(n, top) {
                rep.examined += 1;
                if top_weight_hypotheses(&case) {
                    rep.satisfying += 1;
                    rep.violations.push(case);
                }
            }
        }
    }
    rep
}

/// Ascending vectors of length `n + 2` with `a_0 = 1` and entries at most
/// `max_weight`, for direct checks on small regions.
pub fn all_vectors_with_leading_one(n: u32, max_weight: u64) -> Vec<Vec<u64>> {
    fn go(slots: usize, lo: u64, max: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if slots == 0 {
            out.push(cur.clone());
            return;
        }
        for w in lo..=max {
            cur.push(w);
            go(slots - 1, w, max, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n as usize + 1, 1, max_weight, &mut vec![1], &mut out);
    out
}

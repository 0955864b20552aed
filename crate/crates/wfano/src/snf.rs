//! Smith normal form over the integers, used as an independent lattice
//! index oracle for cone multiplicities and primitivity checks.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Nonzero invariant factors `d_1 | d_2 | ...` of an integer matrix.
pub fn invariant_factors(rows: &[Vec<BigInt>]) -> Vec<BigInt> {
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let nr = m.len();
    if nr == 0 {
        return Vec::new();
    }
    let nc = m[0].len();
    let mut out = Vec::new();
    let mut t = 0;
    while t < nr.min(nc) {
        // pick the smallest nonzero entry in the trailing block as pivot
        let mut pivot: Option<(usize, usize)> = None;
        for (i, row) in m.iter().enumerate().skip(t) {
            for (j, v) in row.iter().enumerate().skip(t) {
                if !v.is_zero() {
                    let better = match pivot {
                        None => true,
                        Some((pi, pj)) => v.abs() < m[pi][pj].abs(),
                    };
                    if better {
                        pivot = Some((i, j));
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in (t + 1)..nr {
                if !m[i][t].is_zero() {
                    let qt = m[i][t].div_floor(&m[t][t]);
                    for j in t..nc {
                        let sub = &qt * &m[t][j];
                        m[i][j] -= sub;
                    }
                    if !m[i][t].is_zero() {
                        m.swap(t, i);
                        dirty = true;
                    }
                }
            }
            for j in (t + 1)..nc {
                if !m[t][j].is_zero() {
                    let qt = m[t][j].div_floor(&m[t][t]);
                    for row in m.iter_mut().skip(t) {
                        let sub = &qt * &row[t];
                        row[j] -= sub;
                    }
                    if !m[t][j].is_zero() {
                        for row in m.iter_mut() {
                            row.swap(t, j);
                        }
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            // divisibility condition: pivot must divide the trailing block
            let mut fix = None;
            'outer: for (i, row) in m.iter().enumerate().skip(t + 1) {
                for v in row.iter().skip(t + 1) {
                    if !v.is_multiple_of(&m[t][t]) {
                        fix = Some(i);
                        break 'outer;
                    }
                }
            }
            match fix {
                Some(i) => {
                    for j in t..nc {
                        let add = m[i][j].clone();
                        m[t][j] += add;
                    }
                }
                None => break,
            }
        }
        out.push(m[t][t].abs());
        t += 1;
    }
    out
}

/// Product of the nonzero invariant factors, i.e. the index of the row
/// lattice inside its saturation. Returns `(rank, index)`.
pub fn rank_and_index(rows: &[Vec<BigInt>]) -> (usize, BigInt) {
    let f = invariant_factors(rows);
    let idx = f.iter().fold(BigInt::one(), |acc, x| acc * x);
    (f.len(), idx)
}

pub fn int_rows(rows: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

/// Determinant by fraction-free Bareiss elimination.
pub fn det(rows: &[Vec<BigInt>]) -> BigInt {
    let n = rows.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = rows.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(p) = ((k + 1)..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

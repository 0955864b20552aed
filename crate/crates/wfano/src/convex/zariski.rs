//! Zariski decomposition of a divisor class on a surface, relative to a
//! finite list of curves with known intersection matrix.

use num_traits::{Signed, Zero};

use crate::error::{pre, Error, Result};
use crate::rat::Q;

/// Curves `C_0, ..., C_{m-1}` and the symmetric matrix `(C_i . C_j)`.
/// Divisor classes are coefficient vectors in this curve basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveModel {
    pub names: Vec<String>,
    pub matrix: Vec<Vec<Q>>,
}

impl CurveModel {
    pub fn new(names: Vec<String>, matrix: Vec<Vec<Q>>) -> Result<Self> {
        let m = names.len();
        if matrix.len() != m || matrix.iter().any(|r| r.len() != m) {
            return pre("intersection matrix must be square with one row per curve");
        }
        for i in 0..m {
            for j in 0..i {
                if matrix[i][j] != matrix[j][i] {
                    return pre(format!("intersection matrix is not symmetric at ({i}, {j})"));
                }
                if matrix[i][j].is_negative() {
                    return pre(format!("distinct curves {i} and {j} meet negatively"));
                }
            }
        }
        Ok(Self { names, matrix })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// `D . C_i`.
    pub fn dot_curve(&self, d: &[Q], i: usize) -> Q {
        d.iter().zip(&self.matrix[i]).map(|(c, m)| c * m).sum()
    }

    pub fn dot(&self, d: &[Q], e: &[Q]) -> Q {
        (0..self.len()).map(|i| &e[i] * self.dot_curve(d, i)).sum()
    }

    fn submatrix(&self, s: &[usize]) -> Vec<Vec<Q>> {
        s.iter().map(|&i| s.iter().map(|&j| self.matrix[i][j].clone()).collect()).collect()
    }

    /// Sylvester's criterion on the principal submatrix indexed by `s`.
    pub fn negative_definite_on(&self, s: &[usize]) -> bool {
        let m = self.submatrix(s);
        (1..=s.len()).all(|k| {
            let lead: Vec<Vec<Q>> = m[..k].iter().map(|r| r[..k].to_vec()).collect();
            let d = det(lead);
            if k % 2 == 1 {
                d.is_negative()
            } else {
                d.is_positive()
            }
        })
    }
}

/// Determinant by fraction-exact Gaussian elimination.
pub fn det(mut m: Vec<Vec<Q>>) -> Q {
    let n = m.len();
    let mut sign = Q::from_integer(1.into());
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            m.swap(p, c);
            sign = -sign;
        }
        for r in c + 1..n {
            let f = &m[r][c] / &m[c][c];
            for k in c..n {
                let v = &f * &m[c][k];
                m[r][k] -= v;
            }
        }
    }
    (0..n).fold(sign, |acc, i| acc * &m[i][i])
}

/// Solves `m x = b` for invertible square `m`.
pub fn solve(mut m: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = m.len();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(p, c);
        b.swap(p, c);
        for r in 0..n {
            if r == c || m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] / &m[c][c];
            for k in c..n {
                let v = &f * &m[c][k];
                m[r][k] -= v;
            }
            let v = &f * &b[c];
            b[r] -= v;
        }
    }
    Some((0..n).map(|i| &b[i] / &m[i][i]).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZariskiDecomposition {
    pub positive: Vec<Q>,
    pub negative: Vec<Q>,
    /// Curves in the support of the negative part, in order of entry.
    pub support: Vec<usize>,
}

/// Grows the support by every curve the current positive part meets
/// negatively (list order) and re-solves `P . C_i = 0` on the support.
pub fn zariski_decompose(model: &CurveModel, d: &[Q]) -> Result<ZariskiDecomposition> {
    let m = model.len();
    if d.len() != m {
        return pre(format!("class has {} coefficients, model has {m} curves", d.len()));
    }
    let mut support: Vec<usize> = Vec::new();
    loop {
        let negative = negative_part(model, d, &support)?;
        let positive: Vec<Q> = d.iter().zip(&negative).map(|(a, b)| a - b).collect();
        let new: Vec<usize> =
            (0..m).filter(|i| !support.contains(i) && model.dot_curve(&positive, *i).is_negative()).collect();
        if new.is_empty() {
            if negative.iter().any(|c| c.is_negative()) {
                return Err(Error::Precondition("class is not pseudo-effective in this curve model".into()));
            }
            if model.dot(&positive, &positive).is_negative() {
                return Err(Error::Precondition(
                    "positive part has negative square; class is not pseudo-effective in this curve model".into(),
                ));
            }
            return Ok(ZariskiDecomposition { positive, negative, support });
        }
        support.extend(new);
        if !model.negative_definite_on(&support) {
            return Err(Error::Precondition(
                "support of the negative part is not negative definite; class is not pseudo-effective in this curve model".into(),
            ));
        }
    }
}

fn negative_part(model: &CurveModel, d: &[Q], support: &[usize]) -> Result<Vec<Q>> {
    let mut out = vec![Q::zero(); model.len()];
    if support.is_empty() {
        return Ok(out);
    }
    let sub = model.submatrix(support);
    let rhs: Vec<Q> = support.iter().map(|&i| model.dot_curve(d, i)).collect();
    let x = solve(sub, rhs).ok_or_else(|| Error::Invariant("singular support matrix".into()))?;
    for (k, &i) in support.iter().enumerate() {
        out[i] = x[k].clone();
    }
    Ok(out)
}

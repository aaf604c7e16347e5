//! Dense tableau simplex with Bland's rule.

use thiserror::Error;

use crate::scalar::LpScalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("right-hand side must be non-negative at the initial slack basis")]
    InfeasibleStart,
    #[error("objective is unbounded")]
    Unbounded,
    #[error("dimension mismatch in constraint matrix")]
    Shape,
}

#[derive(Debug, Clone)]
pub struct LpSolution<T> {
    pub value: T,
    pub x: Vec<T>,
    pub pivots: usize,
}

/// Maximizes `c·x` subject to `A x ≤ b`, `x ≥ 0`, with `b ≥ 0`.
pub fn maximize<T: LpScalar>(a: &[Vec<T>], b: &[T], c: &[T]) -> Result<LpSolution<T>, LpError> {
    let m = a.len();
    let n = c.len();
    if b.len() != m || a.iter().any(|r| r.len() != n) {
        return Err(LpError::Shape);
    }
    if b.iter().any(|x| x.is_neg()) {
        return Err(LpError::InfeasibleStart);
    }
    let width = n + m + 1;
    let mut t: Vec<Vec<T>> = Vec::with_capacity(m + 1);
    for i in 0..m {
        let mut row = Vec::with_capacity(width);
        row.extend(a[i].iter().cloned());
        row.extend((0..m).map(|j| if i == j { T::one() } else { T::zero() }));
        row.push(b[i].clone());
        t.push(row);
    }
    let mut obj: Vec<T> = c.iter().map(|x| -x.clone()).collect();
    obj.extend((0..m + 1).map(|_| T::zero()));
    t.push(obj);
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut pivots = 0;

    loop {
        let Some(col) = (0..n + m).find(|&j| t[m][j].is_neg()) else {
            break;
        };
        let mut row: Option<usize> = None;
        for i in 0..m {
            if !t[i][col].is_pos() {
                continue;
            }
            row = match row {
                None => Some(i),
                Some(r) => {
                    let lhs = t[i][width - 1].clone() * t[r][col].clone();
                    let rhs = t[r][width - 1].clone() * t[i][col].clone();
                    if lhs < rhs || (lhs == rhs && basis[i] < basis[r]) {
                        Some(i)
                    } else {
                        Some(r)
                    }
                }
            };
        }
        let r = row.ok_or(LpError::Unbounded)?;
        let p = t[r][col].clone();
        for v in t[r].iter_mut() {
            if !v.is_zero() {
                *v = v.clone() / p.clone();
            }
        }
        let pivot_row = t[r].clone();
        let nz: Vec<usize> = (0..width).filter(|&j| !pivot_row[j].is_zero()).collect();
        for (i, rowi) in t.iter_mut().enumerate() {
            if i == r || rowi[col].is_zero() {
                continue;
            }
            let f = rowi[col].clone();
            for &j in &nz {
                rowi[j] = rowi[j].clone() - f.clone() * pivot_row[j].clone();
            }
        }
        basis[r] = col;
        pivots += 1;
    }

    let mut x = vec![T::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][width - 1].clone();
        }
    }
    Ok(LpSolution {
        value: t[m][width - 1].clone(),
        x,
        pivots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_rational::BigRational;

    #[test]
    fn small_exact_problem() {
        // max x + y  s.t.  x + 2y <= 4, 3x + y <= 6
        let a = vec![vec![ratio(1, 1), ratio(2, 1)], vec![ratio(3, 1), ratio(1, 1)]];
        let b = vec![ratio(4, 1), ratio(6, 1)];
        let c = vec![ratio(1, 1), ratio(1, 1)];
        let s = maximize(&a, &b, &c).unwrap();
        assert_eq!(s.value, ratio(14, 5));
        assert_eq!(s.x, vec![ratio(8, 5), ratio(6, 5)]);
    }

    #[test]
    fn float_agrees() {
        let a = vec![vec![1.0, 2.0], vec![3.0, 1.0]];
        let s = maximize(&a, &[4.0, 6.0], &[1.0, 1.0]).unwrap();
        assert!((s.value - 2.8).abs() < 1e-12);
    }

    #[test]
    fn unbounded() {
        let a: Vec<Vec<BigRational>> = vec![vec![ratio(1, 1), ratio(-1, 1)]];
        let r = maximize(&a, &[ratio(1, 1)], &[ratio(0, 1), ratio(1, 1)]);
        assert_eq!(r.unwrap_err(), LpError::Unbounded);
    }
}

//! Small exact linear algebra: just enough for the desk-scale ranks this
//! engine targets (d <= 8).

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::scalar::{rat, GaussRat, Rat};

/// Determinant of a rational matrix by fraction-free Gaussian elimination.
pub fn det_rat(m: &[Vec<Rat>]) -> Rat {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m.to_vec();
    let mut det = Rat::one();
    for col in 0..n {
        let pivot = match (col..n).find(|&r| !a[r][col].is_zero()) {
            Some(p) => p,
            None => return Rat::zero(),
        };
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &p;
            for c in col..n {
                let sub = &f * &a[col][c];
                a[r][c] -= sub;
            }
        }
    }
    det
}

/// Inverse of a rational matrix; `None` when singular.
pub fn invert_rat(m: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m.to_vec();
    let mut inv: Vec<Vec<Rat>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(pivot, col);
        inv.swap(pivot, col);
        let p = a[col][col].clone();
        for c in 0..n {
            a[col][c] /= &p;
            inv[col][c] /= &p;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..n {
                let s = &f * &a[col][c];
                a[r][c] -= s;
                let s = &f * &inv[col][c];
                inv[r][c] -= s;
            }
        }
    }
    Some(inv)
}

/// Dimension of the solution space of the homogeneous system `M x = 0`
/// over `Q(i)`, where `m` has `cols` unknowns.
pub fn nullity_gauss(m: &mut Vec<Vec<GaussRat>>, cols: usize) -> usize {
    let mut rank = 0;
    let rows = m.len();
    for col in 0..cols {
        let pivot = (rank..rows).find(|&r| !m[r][col].is_zero());
        let Some(pivot) = pivot else { continue };
        m.swap(rank, pivot);
        let p = m[rank][col].inv();
        for c in col..cols {
            let v = &m[rank][c] * &p;
            m[rank][c] = v;
        }
        for r in 0..rows {
            if r == rank || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for c in col..cols {
                let s = &m[rank][c] * &f;
                let mut v = m[r][c].clone();
                v = v - s;
                m[r][c] = v;
            }
        }
        rank += 1;
    }
    cols - rank
}

/// Row-style Hermite normal form of an integer matrix (rows generate the
/// same lattice); returns the nonzero rows.
pub fn hermite_normal_form(rows_in: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut rows: Vec<Vec<i64>> = rows_in.to_vec();
    if rows.is_empty() {
        return rows;
    }
    let ncols = rows[0].len();
    let mut top = 0;
    for col in 0..ncols {
        // find a pivot row with nonzero entry in this column
        loop {
            let mut pivot: Option<usize> = None;
            for r in top..rows.len() {
                if rows[r][col] != 0
                    && pivot.is_none_or(|p| rows[r][col].abs() < rows[p][col].abs())
                {
                    pivot = Some(r);
                }
            }
            let Some(p) = pivot else { break };
            rows.swap(top, p);
            let mut done = true;
            for r in top + 1..rows.len() {
                if rows[r][col] != 0 {
                    let q = rows[r][col].div_euclid(rows[top][col]);
                    for c in 0..ncols {
                        rows[r][c] -= q * rows[top][c];
                    }
                    if rows[r][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if top < rows.len() && rows[top][col] != 0 {
            if rows[top][col] < 0 {
                for c in 0..ncols {
                    rows[top][c] = -rows[top][c];
                }
            }
            // reduce the rows above
            for r in 0..top {
                let q = rows[r][col].div_euclid(rows[top][col]);
                if q != 0 {
                    for c in 0..ncols {
                        rows[r][c] -= q * rows[top][c];
                    }
                }
            }
            top += 1;
        }
    }
    rows.truncate(top);
    rows
}

/// Integer matrix as rationals.
pub fn to_rat_matrix(m: &[Vec<i64>]) -> Vec<Vec<Rat>> {
    m.iter().map(|row| row.iter().map(|&x| rat(x)).collect()).collect()
}

/// `d x d` integer matrix product.
pub fn mat_mul_int(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0;
            for (k, bk) in b.iter().enumerate() {
                s += a[i][k] * bk[j];
            }
            out[i][j] = s;
        }
    }
    out
}

/// Matrix-vector product over the integers.
pub fn mat_apply_int(m: &[Vec<i64>], x: &[i64]) -> Vec<i64> {
    m.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

/// Transpose of an integer matrix.
pub fn transpose_int(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = m.len();
    let cols = if n == 0 { 0 } else { m[0].len() };
    (0..cols).map(|j| (0..n).map(|i| m[i][j]).collect()).collect()
}

/// Exact inverse of an integer matrix with determinant ±1.
pub fn invert_unimodular(m: &[Vec<i64>]) -> Option<Vec<Vec<i64>>> {
    let inv = invert_rat(&to_rat_matrix(m))?;
    let mut out = vec![vec![0i64; m.len()]; m.len()];
    for (i, row) in inv.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if !x.denom().is_one() {
                return None;
            }
            let n = x.numer();
            out[i][j] = i64::try_from(n.clone()).ok()?;
        }
    }
    Some(out)
}

/// Whether the rational is a nonnegative integer.
pub fn is_nonneg_int(x: &Rat) -> bool {
    x.denom().is_one() && !x.numer().is_negative()
}

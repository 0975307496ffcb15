//! Exact dense linear algebra helpers: Gaussian elimination, nullspace
//! bases, and ranks over rationals.

use crate::scalar::Scalar;

/// Solves the square system `A x = b` exactly. `None` if `A` is singular.
pub(crate) fn solve_square(a: &[Vec<Scalar>], b: &[Scalar]) -> Option<Vec<Scalar>> {
    let n = b.len();
    debug_assert!(a.iter().all(|r| r.len() == n));
    let mut m: Vec<Vec<Scalar>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let inv = m[col][col].recip();
        for j in col..=n {
            m[col][j] = &m[col][j] * &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in col..=n {
                    let delta = &f * &m[col][j];
                    m[r][j] = &m[r][j] - &delta;
                }
            }
        }
    }
    Some(m.iter().map(|r| r[n].clone()).collect())
}

/// Row rank of a rational matrix.
pub(crate) fn rank(rows: &[Vec<Scalar>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let mut m: Vec<Vec<Scalar>> = rows.to_vec();
    let mut r = 0;
    for col in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(pivot) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, pivot);
        let inv = m[r][col].recip();
        for j in col..ncols {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in col..ncols {
                    let delta = &f * &m[r][j];
                    m[i][j] = &m[i][j] - &delta;
                }
            }
        }
        r += 1;
    }
    r
}

/// A basis of `{x : rows * x = 0}`, from the reduced row echelon form.
/// Deterministic: one vector per free column, that column set to one.
pub(crate) fn nullspace_basis(rows: &[Vec<Scalar>], ncols: usize) -> Vec<Vec<Scalar>> {
    let mut m: Vec<Vec<Scalar>> = rows.to_vec();
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut r = 0;
    for col in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][col].recip();
        for j in col..ncols {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in col..ncols {
                    let delta = &f * &m[r][j];
                    m[i][j] = &m[i][j] - &delta;
                }
            }
        }
        pivots.push((r, col));
        r += 1;
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivot_cols.contains(c)) {
        let mut v = vec![Scalar::zero(); ncols];
        v[free] = Scalar::one();
        for &(pr, pc) in &pivots {
            v[pc] = -m[pr][free].clone();
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn solve_2x2() {
        let a = vec![vec![s(2), s(1)], vec![s(1), s(-1)]];
        let x = solve_square(&a, &[s(5), s(1)]).unwrap();
        assert_eq!(x, vec![s(2), s(1)]);
        let singular = vec![vec![s(1), s(1)], vec![s(2), s(2)]];
        assert!(solve_square(&singular, &[s(1), s(2)]).is_none());
    }

    #[test]
    fn rank_and_nullspace() {
        let rows = vec![vec![s(1), s(2), s(3)], vec![s(2), s(4), s(6)]];
        assert_eq!(rank(&rows), 1);
        let ns = nullspace_basis(&rows, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let dot = &v[0] * &s(1) + &v[1] * &s(2) + &v[2] * &s(3);
            assert!(dot.is_zero());
        }
    }
}

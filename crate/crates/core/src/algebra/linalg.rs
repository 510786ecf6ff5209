//! Dense Gaussian elimination over any [`Field`].

use super::scalar::Field;

pub type Matrix<T> = Vec<Vec<T>>;

fn pivot_row<T: Field>(m: &Matrix<T>, col: usize, from: usize) -> Option<usize> {
    if T::is_exact() {
        (from..m.len()).find(|&r| !m[r][col].is_zero())
    } else {
        let best = (from..m.len()).max_by(|&a, &b| {
            m[a][col]
                .abs_val()
                .partial_cmp(&m[b][col].abs_val())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        (!m[best][col].is_zero_tol()).then_some(best)
    }
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<T: Field>(m: &mut Matrix<T>) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = pivot_row(m, c, r) else { continue };
        m.swap(r, p);
        let inv = T::one() / m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let v = m[r][j].clone() * f.clone();
                    m[i][j] = m[i][j].clone() - v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<T: Field>(rows: &[Vec<T>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Solves `a x = b` for square nonsingular `a`.
pub fn solve<T: Field>(a: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    let n = a.len();
    if n == 0 || b.len() != n {
        return None;
    }
    let mut m: Matrix<T> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}

pub fn inverse<T: Field>(a: &[Vec<T>]) -> Option<Matrix<T>> {
    let n = a.len();
    let mut m: Matrix<T> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { T::one() } else { T::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn transpose<T: Clone>(a: &[Vec<T>]) -> Matrix<T> {
    let cols = a.first().map_or(0, |r| r.len());
    (0..cols)
        .map(|j| a.iter().map(|r| r[j].clone()).collect())
        .collect()
}

pub fn mat_vec<T: Field>(a: &[Vec<T>], x: &[T]) -> Vec<T> {
    a.iter().map(|row| super::scalar::dot(row, x)).collect()
}

/// Determinant by elimination.
pub fn determinant<T: Field>(a: &[Vec<T>]) -> T {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = T::one();
    for c in 0..n {
        let Some(p) = pivot_row(&m, c, c) else {
            return T::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        let piv = m[c][c].clone();
        det = det * piv.clone();
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone() / piv.clone();
            for j in c..n {
                let v = m[c][j].clone() * f.clone();
                m[i][j] = m[i][j].clone() - v;
            }
        }
    }
    det
}

/// Basis of the null space `{x : a x = 0}`.
pub fn nullspace<T: Field>(a: &[Vec<T>], cols: usize) -> Matrix<T> {
    if a.is_empty() {
        return (0..cols)
            .map(|i| (0..cols).map(|j| if i == j { T::one() } else { T::zero() }).collect())
            .collect();
    }
    let mut m = a.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![T::zero(); cols];
            x[f] = T::one();
            for (r, &p) in pivots.iter().enumerate() {
                x[p] = -m[r][f].clone();
            }
            x
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::{rat, rat_vec, ratio, Rat};

    #[test]
    fn exact_solve_and_inverse() {
        let a = vec![rat_vec(&[2, 1]), rat_vec(&[1, 3])];
        let x = solve(&a, &rat_vec(&[3, 5])).unwrap();
        assert_eq!(x, vec![ratio(4, 5), ratio(7, 5)]);
        let inv = inverse(&a).unwrap();
        assert_eq!(inv[0], vec![ratio(3, 5), ratio(-1, 5)]);
        assert_eq!(determinant(&a), rat(5));
    }

    #[test]
    fn singular_systems_are_rejected() {
        let a = vec![rat_vec(&[1, 2]), rat_vec(&[2, 4])];
        assert!(solve(&a, &rat_vec(&[1, 1])).is_none());
        assert!(inverse(&a).is_none());
        assert_eq!(determinant(&a), rat(0));
        assert_eq!(rank(&a), 1);
        let ns = nullspace(&a, 2);
        assert_eq!(ns, vec![rat_vec(&[-2, 1])]);
    }

    #[test]
    fn float_solve_matches_exact() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = solve(&a, &[3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);
        let _: Rat = determinant(&[rat_vec(&[1])]);
    }
}

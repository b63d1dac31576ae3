//! Gaussian elimination over the rationals.

use num_traits::Zero;

use crate::scalar::{self, Scalar};

pub type DenseMatrix = Vec<Vec<Scalar>>;

/// Reduced row echelon form in place; returns pivot columns.
fn rref(m: &mut DenseMatrix, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = scalar::one() / &m[row][col];
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[row].clone();
        for (r, other) in m.iter_mut().enumerate() {
            if r == row || other[col].is_zero() {
                continue;
            }
            let f = other[col].clone();
            for (x, p) in other.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank(m: &DenseMatrix) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut work = m.clone();
    rref(&mut work, cols).len()
}

/// Basis of `{x : m·x = 0}` for a matrix with `cols` columns.
pub fn nullspace(m: &DenseMatrix, cols: usize) -> Vec<Vec<Scalar>> {
    let mut work: DenseMatrix = m.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let pivots = rref(&mut work, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![scalar::zero(); cols];
            v[f] = scalar::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -work[r][f].clone();
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn mat(rows: &[&[i64]]) -> DenseMatrix {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn rank_of_small_matrices() {
        assert_eq!(rank(&mat(&[&[1, 0], &[0, 1]])), 2);
        assert_eq!(rank(&mat(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(&mat(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(rank(&mat(&[&[1, 1, 0], &[0, 1, 1], &[1, 2, 1]])), 2);
    }

    #[test]
    fn nullspace_vectors_are_annihilated() {
        let m = mat(&[&[1, 1, 0, 0], &[0, 0, 1, -1]]);
        let ns = nullspace(&m, 4);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for row in &m {
                let s: Scalar = row.iter().zip(v).map(|(a, b)| a * b).sum();
                assert!(s.is_zero());
            }
        }
        assert_eq!(nullspace(&Vec::new(), 3).len(), 3);
    }
}

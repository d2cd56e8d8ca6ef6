//! Exact matrix rank over cyclotomic fields by fraction-free (Bareiss) elimination.

use crate::cyclotomic::CycloRational;

pub type CycloMatrix = Vec<Vec<CycloRational>>;

/// Rank of a (possibly rectangular) matrix.
pub fn rank(matrix: &[Vec<CycloRational>]) -> usize {
    let rows = matrix.len();
    if rows == 0 {
        return 0;
    }
    let cols = matrix[0].len();
    assert!(
        matrix.iter().all(|r| r.len() == cols),
        "ragged matrix passed to rank"
    );
    let mut a: CycloMatrix = matrix.to_vec();
    let mut prev = CycloRational::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv_prev = prev.inverse().expect("previous Bareiss pivot is nonzero");
        for i in r + 1..rows {
            for j in c + 1..cols {
                let num = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                a[i][j] = &num * &inv_prev;
            }
            a[i][c] = CycloRational::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

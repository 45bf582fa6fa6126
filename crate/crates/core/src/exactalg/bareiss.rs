//! Fraction-free (Bareiss) elimination over exact integers.
//!
//! Rational rows are first cleared of denominators by their own LCM, so all
//! elimination happens on integers and every Bareiss division is exact.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::rational::{common_denominator, Rational};
use crate::error::AlgebraError;

/// Upper-triangular result of Bareiss elimination on an integer matrix,
/// optionally augmented with extra right-hand-side columns.
struct Echelon {
    rows: Vec<Vec<BigInt>>,
    swaps: usize,
}

/// Runs Bareiss on the leading `n` columns of `rows` (which may carry extra
/// augmented columns). Fails with the column index that has no pivot.
fn eliminate(mut rows: Vec<Vec<BigInt>>, n: usize) -> Result<Echelon, usize> {
    let mut swaps = 0;
    let mut prev_pivot = BigInt::one();
    for k in 0..n {
        let pivot_row = (k..n).find(|&r| !rows[r][k].is_zero()).ok_or(k)?;
        if pivot_row != k {
            rows.swap(pivot_row, k);
            swaps += 1;
        }
        let (upper, lower) = rows.split_at_mut(k + 1);
        let pivot = &upper[k];
        for row in lower.iter_mut() {
            let factor = row[k].clone();
            for j in (k + 1)..row.len() {
                let v = &row[j] * &pivot[k] - &factor * &pivot[j];
                row[j] = v / &prev_pivot;
            }
            row[k] = BigInt::zero();
        }
        prev_pivot = rows[k][k].clone();
    }
    Ok(Echelon { rows, swaps })
}

/// Scales each rational row (with its optional RHS entry) to integers.
/// Returns the integer rows and the per-row scale factors.
fn integer_rows(matrix: &[Vec<Rational>], rhs: Option<&[Rational]>) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
    matrix
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let extra = rhs.map(|b| &b[i]);
            let scale = common_denominator(row.iter().chain(extra));
            let ints = row.iter().chain(extra).map(|r| (r * &scale).to_integer()).collect();
            (ints, scale)
        })
        .unzip()
}

/// Exact determinant of a square rational matrix. Singular matrices give zero.
pub fn determinant_of(matrix: &[Vec<Rational>]) -> Rational {
    let n = matrix.len();
    if n == 0 {
        return Rational::one();
    }
    let (rows, scales) = integer_rows(matrix, None);
    match eliminate(rows, n) {
        Err(_) => Rational::zero(),
        Ok(ech) => {
            let mut det = ech.rows[n - 1][n - 1].clone();
            if ech.swaps % 2 == 1 {
                det = -det;
            }
            let scale = scales.into_iter().fold(BigInt::one(), |acc, s| acc * s);
            Rational::new(det, scale)
        }
    }
}

/// Solves `matrix · x = rhs` exactly and checks the residual is identically zero.
pub fn solve(matrix: &[Vec<Rational>], rhs: &[Rational]) -> Result<Vec<Rational>, AlgebraError> {
    let n = matrix.len();
    if rhs.len() != n {
        return Err(AlgebraError::RhsLength {
            size: n,
            rhs: rhs.len(),
        });
    }
    if let Some(row) = matrix.iter().find(|r| r.len() != n) {
        return Err(AlgebraError::DimensionMismatch {
            levels: n,
            powers: row.len(),
        });
    }
    let (rows, _) = integer_rows(matrix, Some(rhs));
    let ech = eliminate(rows, n).map_err(|column| AlgebraError::Singular { column })?;

    let mut x = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        let row = &ech.rows[i];
        let mut acc = Rational::from_integer(row[n].clone());
        for j in (i + 1)..n {
            acc -= &x[j] * &row[j];
        }
        x[i] = acc / Rational::from_integer(row[i].clone());
    }

    for (i, (row, b)) in matrix.iter().zip(rhs).enumerate() {
        let lhs: Rational = row.iter().zip(&x).map(|(m, xi)| m * xi).sum();
        if &lhs != b {
            return Err(AlgebraError::Consistency { row: i });
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn int_matrix(m: &[&[i64]]) -> Vec<Vec<Rational>> {
        m.iter().map(|r| r.iter().map(|&v| q(v, 1)).collect()).collect()
    }

    #[test]
    fn determinant_needs_pivoting() {
        // zero in the (0,0) slot forces a row swap
        let m = int_matrix(&[&[0, 1], &[1, 0]]);
        assert_eq!(determinant_of(&m), q(-1, 1));
        let m = int_matrix(&[&[0, 2, 1], &[3, 1, 0], &[1, 1, 1]]);
        // cofactor expansion: 0*(1) - 2*(3-0) + 1*(3-1) = -4
        assert_eq!(determinant_of(&m), q(-4, 1));
    }

    #[test]
    fn singular_determinant_is_zero() {
        let m = int_matrix(&[&[1, 2], &[2, 4]]);
        assert_eq!(determinant_of(&m), q(0, 1));
    }

    #[test]
    fn solve_reports_singular_column() {
        let m = int_matrix(&[&[1, 2], &[2, 4]]);
        assert_eq!(
            solve(&m, &[q(1, 1), q(2, 1)]),
            Err(AlgebraError::Singular { column: 1 })
        );
    }

    #[test]
    fn solve_with_swap() {
        let m = int_matrix(&[&[0, 1], &[2, 0]]);
        assert_eq!(solve(&m, &[q(3, 1), q(1, 1)]).unwrap(), vec![q(1, 2), q(3, 1)]);
    }

    #[test]
    fn rhs_length_checked() {
        let m = int_matrix(&[&[1]]);
        assert!(matches!(solve(&m, &[]), Err(AlgebraError::RhsLength { .. })));
    }
}

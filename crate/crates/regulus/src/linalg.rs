//! Exact Gaussian elimination over any field-like coefficient type.

/// Minimal field interface for elimination. Division is only requested on
/// elements that reported `is_zero() == false`.
pub trait FieldOps: Clone {
    fn is_zero(&self) -> bool;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
}

impl FieldOps for crate::scalar::Scalar {
    fn is_zero(&self) -> bool {
        crate::scalar::Scalar::is_zero(self)
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        crate::scalar::Scalar::div(self, other).expect("division by zero pivot")
    }
}

impl FieldOps for crate::ratfunc::RationalFunction {
    fn is_zero(&self) -> bool {
        crate::ratfunc::RationalFunction::is_zero(self)
    }
    fn sub(&self, other: &Self) -> Self {
        crate::ratfunc::RationalFunction::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        crate::ratfunc::RationalFunction::mul(self, other)
    }
    fn div(&self, other: &Self) -> Self {
        crate::ratfunc::RationalFunction::div(self, other).expect("division by zero pivot")
    }
}

/// Reduces `rows` in place to row echelon form and returns (rank, pivot
/// columns).
fn echelonize<F: FieldOps>(rows: &mut [Vec<F>]) -> (usize, Vec<usize>) {
    if rows.is_empty() {
        return (0, Vec::new());
    }
    let ncols = rows[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&k| !rows[k][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r][col].clone();
        for entry in rows[r].iter_mut() {
            *entry = entry.div(&pivot);
        }
        for k in 0..rows.len() {
            if k != r && !rows[k][col].is_zero() {
                let factor = rows[k][col].clone();
                for c in 0..ncols {
                    let delta = factor.mul(&rows[r][c]);
                    rows[k][c] = rows[k][c].sub(&delta);
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    (r, pivots)
}

pub fn rank<F: FieldOps>(mut rows: Vec<Vec<F>>) -> usize {
    echelonize(&mut rows).0
}

/// Basis of the right kernel of the matrix, expressed in the given `zero`
/// and `one` constants. Rows are equations, columns are unknowns.
pub fn kernel_basis<F: FieldOps>(mut rows: Vec<Vec<F>>, zero: F, one: F) -> Vec<Vec<F>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let ncols = rows[0].len();
    let (_, pivots) = echelonize(&mut rows);
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![zero.clone(); ncols];
        v[free] = one.clone();
        for (row_idx, &pc) in pivots.iter().enumerate() {
            // x_pc = -row[free] with the pivot normalized to 1.
            v[pc] = zero.sub(&rows[row_idx][free]);
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Scalar>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| Scalar::from_integer(v)).collect())
            .collect()
    }

    #[test]
    fn rank_of_singular_matrix() {
        assert_eq!(rank(m(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(m(&[&[1, 0], &[0, 1]])), 2);
        assert_eq!(rank(m(&[&[0, 0], &[0, 0]])), 0);
    }

    #[test]
    fn kernel_of_rank_one() {
        let basis = kernel_basis(m(&[&[1, 2], &[2, 4]]), Scalar::zero(), Scalar::one());
        assert_eq!(basis.len(), 1);
        let v = &basis[0];
        // 1*v0 + 2*v1 = 0
        let lhs = &v[0] + &(&Scalar::from_integer(2) * &v[1]);
        assert!(lhs.is_zero());
    }

    #[test]
    fn kernel_of_full_rank_is_empty() {
        let basis = kernel_basis(m(&[&[1, 1], &[0, 3]]), Scalar::zero(), Scalar::one());
        assert!(basis.is_empty());
    }
}

//! Small dense linear algebra, delegated to `nalgebra` in `f64`.

use nalgebra::{DMatrix, DVector};

use crate::scalar::{lit, Scalar};

fn to_f64<T: Scalar, const N: usize>(m: &[[T; N]; N]) -> DMatrix<f64> {
    DMatrix::from_fn(N, N, |i, j| m[i][j].to_f64().unwrap_or(f64::NAN))
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues<T: Scalar, const N: usize>(m: &[[T; N]; N]) -> Vec<T> {
    let mut ev: Vec<f64> = to_f64(m).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev.into_iter().map(lit).collect()
}

pub fn determinant<T: Scalar, const N: usize>(m: &[[T; N]; N]) -> T {
    lit(to_f64(m).determinant())
}

/// Solves `m x = b`; `None` when `m` is singular.
pub fn solve<T: Scalar, const N: usize>(m: &[[T; N]; N], b: &[T; N]) -> Option<[T; N]> {
    let a = to_f64(m);
    let rhs = DVector::from_fn(N, |i, _| b[i].to_f64().unwrap_or(f64::NAN));
    let x = a.lu().solve(&rhs)?;
    Some(std::array::from_fn(|i| lit(x[i])))
}

/// Inverse; `None` when singular.
pub fn inverse<T: Scalar, const N: usize>(m: &[[T; N]; N]) -> Option<[[T; N]; N]> {
    let inv = to_f64(m).try_inverse()?;
    Some(std::array::from_fn(|i| std::array::from_fn(|j| lit(inv[(i, j)]))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_and_det() {
        let m = [[2.0f64, 1.0], [1.0, 2.0]];
        let ev = symmetric_eigenvalues(&m);
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
        assert!((determinant(&m) - 3.0).abs() < 1e-14);
        let x = solve(&m, &[3.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
    }
}

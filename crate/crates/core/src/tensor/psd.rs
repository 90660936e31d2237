use super::eigen::hermitian_eigs;
use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};
use crate::tol;

/// Largest side accepted by [`principal_minors_psd`] (2^8 - 1 minors).
pub const MAX_MINOR_SIDE: usize = 8;

/// True iff the smallest eigenvalue is at least `-tol`.
pub fn is_psd(m: &ComplexMatrix, tol: f64) -> Result<bool> {
    m.ensure_hermitian(tol.max(tol::HERMITIAN))?;
    Ok(hermitian_eigs(m)?.min_value() >= -tol)
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(m: &ComplexMatrix) -> Result<C64> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut det = C64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))
            .unwrap_or(col);
        if a[(pivot, col)].norm() == 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        if pivot != col {
            for j in 0..n {
                let tmp = a[(col, j)];
                a[(col, j)] = a[(pivot, j)];
                a[(pivot, j)] = tmp;
            }
            det = -det;
        }
        let p = a[(col, col)];
        det *= p;
        for i in (col + 1)..n {
            let f = a[(i, col)] / p;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for j in col..n {
                let v = a[(col, j)];
                a[(i, j)] -= f * v;
            }
        }
    }
    Ok(det)
}

/// Principal minor of `m` on the rows and columns selected by `mask`.
pub fn principal_minor(m: &ComplexMatrix, mask: u32) -> Result<f64> {
    let idx: Vec<usize> = (0..m.rows()).filter(|i| mask & (1 << i) != 0).collect();
    let mut sub = ComplexMatrix::zeros(idx.len(), idx.len());
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            sub[(a, b)] = m[(i, j)];
        }
    }
    // Principal submatrices of a Hermitian matrix have real determinants.
    Ok(determinant(&sub)?.re)
}

/// Positive semidefiniteness via the sign of all `2^m - 1` principal minors.
pub fn principal_minors_psd(m: &ComplexMatrix) -> Result<bool> {
    m.ensure_hermitian(tol::HERMITIAN)?;
    let n = m.rows();
    if n > MAX_MINOR_SIDE {
        return Err(Error::TooLarge {
            size: n,
            max: MAX_MINOR_SIDE,
        });
    }
    for mask in 1u32..(1u32 << n) {
        if principal_minor(m, mask)? < -tol::MINOR {
            return Ok(false);
        }
    }
    Ok(true)
}

//! Dense complex linear algebra on small tensor-product spaces.

mod eigen;
mod matrix;
mod ops;
mod psd;

pub(crate) use eigen::jacobi_in_place;
pub use eigen::{hermitian_eigenvalues, hermitian_eigs, HermitianEigen, MAX_SWEEPS};
pub use matrix::{ComplexMatrix, Dims, MatrixParts, C64};
pub use ops::{kron, kron_all, kron_vec, partial_trace, partial_transpose};
pub use psd::{determinant, is_psd, principal_minor, principal_minors_psd, MAX_MINOR_SIDE};

pub(crate) use matrix::{ONE, ZERO};

use crate::error::{Error, Result};

/// Single-qubit Pauli matrix for `I`, `X`, `Y` or `Z`.
pub fn pauli_matrix(letter: char) -> Result<ComplexMatrix> {
    let i = C64::new(0.0, 1.0);
    let rows = match letter.to_ascii_uppercase() {
        'I' => vec![vec![ONE, ZERO], vec![ZERO, ONE]],
        'X' => vec![vec![ZERO, ONE], vec![ONE, ZERO]],
        'Y' => vec![vec![ZERO, -i], vec![i, ZERO]],
        'Z' => vec![vec![ONE, ZERO], vec![ZERO, -ONE]],
        other => {
            return Err(Error::InvalidObservable(format!(
                "unknown Pauli letter `{other}`"
            )))
        }
    };
    ComplexMatrix::from_rows(&rows)
}

/// Euclidean norm of a vector.
pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// <a|b>
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#![allow(dead_code)]

use nalgebra::{Complex, DMatrix};
use qevidence::tensor::{ComplexMatrix, C64};

/// Ascending eigenvalues from nalgebra, independent of the crate's solver.
pub fn oracle_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let n = m.rows();
    let dm = DMatrix::from_fn(n, n, |i, j| Complex::new(m[(i, j)].re, m[(i, j)].im));
    let mut v: Vec<f64> = dm.symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Partial transpose on the second qubit of a two-qubit matrix, by the
/// explicit index map `(2a + b, 2c + d) -> (2a + d, 2c + b)`.
pub fn oracle_pt_2x2(m: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(4, 4);
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    out[(2 * a + d, 2 * c + b)] = m[(2 * a + b, 2 * c + d)];
                }
            }
        }
    }
    out
}

pub fn oracle_negativity_2x2(m: &ComplexMatrix) -> f64 {
    oracle_eigenvalues(&oracle_pt_2x2(m))
        .iter()
        .map(|l| (-l).max(0.0))
        .sum()
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn matrix_from(n: usize, re: &[f64], im: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_vec(n, n, re.iter().zip(im).map(|(&a, &b)| C64::new(a, b)).collect()).unwrap()
}

/// Hermitian part of an arbitrary complex matrix.
pub fn hermitian_from(n: usize, re: &[f64], im: &[f64]) -> ComplexMatrix {
    matrix_from(n, re, im).hermitian_part()
}

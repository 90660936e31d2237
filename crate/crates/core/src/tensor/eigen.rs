//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary and then applies a real Givens rotation, so the pair `(p, q)` is
//! annihilated exactly. Sweeps visit every pair `p < q` in row order until the
//! off-diagonal Frobenius mass falls below `1e-14 * ||M||_F`.

use std::cmp::Ordering;

use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};
use crate::tol;

pub const MAX_SWEEPS: usize = 100;
const CONVERGENCE_RATIO: f64 = 1e-14;

/// Eigenvalues in ascending order and the matching orthonormal eigenvectors
/// stored as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
    pub sweeps: usize,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    pub fn min_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// V diag(values) V^H
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            for i in 0..n {
                scaled[(i, j)] *= self.values[j];
            }
        }
        &scaled * &self.vectors.adjoint()
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Input must be Hermitian within `tol::HERMITIAN`; it is symmetrized before
/// the sweeps start.
pub fn hermitian_eigs(m: &ComplexMatrix) -> Result<HermitianEigen> {
    m.ensure_hermitian(tol::HERMITIAN)?;
    if m.data().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = m.rows();
    let mut a = m.hermitian_part().data().to_vec();
    let mut v = ComplexMatrix::identity(n).data().to_vec();
    let sweeps = jacobi_in_place(&mut a, n, Some(&mut v))?;

    let vm = ComplexMatrix::from_vec(n, n, v)?;
    let mut pairs: Vec<(f64, Vec<C64>)> = (0..n)
        .map(|k| {
            let mut col = vm.column(k);
            fix_phase(&mut col);
            (a[k * n + k].re, col)
        })
        .collect();
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    sort_pairs(&mut pairs, scale);

    let values = pairs.iter().map(|(l, _)| *l).collect();
    let columns: Vec<Vec<C64>> = pairs.into_iter().map(|(_, c)| c).collect();
    let vectors = ComplexMatrix::from_columns(&columns)?;
    Ok(HermitianEigen {
        values,
        vectors,
        sweeps,
    })
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    hermitian_eigs(m).map(|e| e.values)
}

/// Runs Jacobi sweeps on a row-major Hermitian `n x n` buffer until it is
/// diagonal, accumulating rotations into `vectors` when given. No input
/// validation; the eigenvalues are left unsorted on the diagonal.
pub(crate) fn jacobi_in_place(a: &mut [C64], n: usize, mut vectors: Option<&mut [C64]>) -> Result<usize> {
    let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let threshold = CONVERGENCE_RATIO * norm;
    let mut sweeps = 0;
    while off_diagonal_mass(a, n) > threshold {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NonConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(a, vectors.as_deref_mut(), n, p, q);
            }
        }
    }
    Ok(sweeps)
}

fn off_diagonal_mass(a: &[C64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut [C64], v: Option<&mut [C64]>, n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    // Pivots negligible against both diagonal entries are dropped.
    if r < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[p * n + q] = ZERO;
        a[q * n + p] = ZERO;
        return;
    }
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // U = diag(1, conj(phase)) * [[c, s], [-s, c]] acting on columns p, q.
    let u00 = C64::new(c, 0.0);
    let u01 = C64::new(s, 0.0);
    let u10 = phase.conj() * (-s);
    let u11 = phase.conj() * c;

    for i in 0..n {
        let aip = a[i * n + p];
        let aiq = a[i * n + q];
        a[i * n + p] = aip * u00 + aiq * u10;
        a[i * n + q] = aip * u01 + aiq * u11;
    }
    if let Some(v) = v {
        for i in 0..n {
            let vip = v[i * n + p];
            let viq = v[i * n + q];
            v[i * n + p] = vip * u00 + viq * u10;
            v[i * n + q] = vip * u01 + viq * u11;
        }
    }
    for j in 0..n {
        let apj = a[p * n + j];
        let aqj = a[q * n + j];
        a[p * n + j] = u00.conj() * apj + u10.conj() * aqj;
        a[q * n + j] = u01.conj() * apj + u11.conj() * aqj;
    }
    a[p * n + q] = ZERO;
    a[q * n + p] = ZERO;
    a[p * n + p] = C64::new(a[p * n + p].re, 0.0);
    a[q * n + q] = C64::new(a[q * n + q].re, 0.0);
}

/// Makes the first non-negligible component real and positive.
fn fix_phase(col: &mut [C64]) {
    if let Some(first) = col.iter().find(|z| z.norm() > 1e-12).copied() {
        let phase = first.conj() / first.norm();
        for z in col.iter_mut() {
            *z *= phase;
        }
    }
}

fn lex_cmp(a: &[C64], b: &[C64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let ord = y.re.total_cmp(&x.re).then_with(|| y.im.total_cmp(&x.im));
        if ord != Ordering::Equal {
            return ord;
        }
    }
    Ordering::Equal
}

/// Ascending by eigenvalue; runs of equal eigenvalues are ordered by their
/// phase-fixed eigenvectors, larger leading components first.
fn sort_pairs(pairs: &mut [(f64, Vec<C64>)], scale: f64) {
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let tie = 1e-12 * scale.max(1.0);
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[end].0 - pairs[end - 1].0 <= tie {
            end += 1;
        }
        if end - start > 1 {
            let mut values: Vec<f64> = pairs[start..end].iter().map(|p| p.0).collect();
            pairs[start..end].sort_by(|a, b| lex_cmp(&a.1, &b.1));
            // Tied values differ by rounding only; keep the list ascending.
            values.sort_by(f64::total_cmp);
            for (p, v) in pairs[start..end].iter_mut().zip(values) {
                p.0 = v;
            }
        }
        start = end;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::pauli_matrix;

    fn check_decomposition(m: &ComplexMatrix, e: &HermitianEigen) {
        assert!(e.reconstruct().max_abs_diff(m) < 1e-10);
        let vhv = &e.vectors.adjoint() * &e.vectors;
        assert!(vhv.max_abs_diff(&ComplexMatrix::identity(m.rows())) < 1e-10);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn diagonal_input_sorted() {
        let m = ComplexMatrix::from_real_diag(&[3.0, 1.0, 2.0]);
        let e = hermitian_eigs(&m).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        assert_eq!(e.sweeps, 0);
        check_decomposition(&m, &e);
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = pauli_matrix('X').unwrap();
        let e = hermitian_eigs(&x).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        check_decomposition(&x, &e);
    }

    #[test]
    fn pauli_y_has_complex_eigenvectors() {
        let y = pauli_matrix('Y').unwrap();
        let e = hermitian_eigs(&y).unwrap();
        check_decomposition(&y, &e);
        // Phase fixing makes the first component real and positive.
        for k in 0..2 {
            let v = e.vector(k);
            assert!(v[0].im.abs() < 1e-15 && v[0].re > 0.0);
        }
    }

    #[test]
    fn partial_transpose_of_maximal_cat_family_member() {
        // diag(1/2,0,0,1/2) with corners 1/2, transposed on the second factor:
        // blocks [[1/2,0],[0,1/2]] on {0,3} and [[0,1/2],[1/2,0]] on {1,2}.
        let mut m = ComplexMatrix::from_real_diag(&[0.5, 0.0, 0.0, 0.5]);
        m[(1, 2)] = C64::new(0.5, 0.0);
        m[(2, 1)] = C64::new(0.5, 0.0);
        let e = hermitian_eigs(&m).unwrap();
        let expected = [-0.5, 0.5, 0.5, 0.5];
        for (got, want) in e.values.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{:?}", e.values);
        }
        check_decomposition(&m, &e);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(hermitian_eigs(&m), Err(Error::NotHermitian { .. })));
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eigs(&rect), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn degenerate_ties_are_reproducible() {
        let m = ComplexMatrix::identity(3);
        let e = hermitian_eigs(&m).unwrap();
        assert_eq!(e.vectors, ComplexMatrix::identity(3));
    }

    #[test]
    fn zero_matrix() {
        let m = ComplexMatrix::zeros(4, 4);
        let e = hermitian_eigs(&m).unwrap();
        assert_eq!(e.values, vec![0.0; 4]);
    }
}

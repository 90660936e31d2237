//! Schmidt decomposition, partial-transpose spectra and negativity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::state::{mix, pure_density, DensityMatrix, StateVector};
use crate::tensor::{hermitian_eigs, partial_transpose, vec_norm, ComplexMatrix, Dims, C64};
use crate::tol;

/// Biorthogonal form `sum_i c_i |a_i> (x) |b_i>` of a bipartite pure state.
///
/// Only terms with a non-negligible coefficient are kept, so the number of
/// coefficients is the Schmidt rank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub left: Vec<Vec<C64>>,
    pub right: Vec<Vec<C64>>,
}

impl SchmidtDecomposition {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    /// `sum_i c_i a_i (x) b_i`
    pub fn reconstruct(&self) -> Vec<C64> {
        let n = self.left.first().map_or(0, Vec::len) * self.right.first().map_or(0, Vec::len);
        let mut out = vec![C64::new(0.0, 0.0); n];
        for ((c, a), b) in self.coefficients.iter().zip(&self.left).zip(&self.right) {
            for (slot, z) in out.iter_mut().zip(crate::tensor::kron_vec(a, b)) {
                *slot += z * *c;
            }
        }
        out
    }
}

/// Coefficients below this are dropped from a decomposition.
const SCHMIDT_CUTOFF: f64 = 1e-12;

/// Schmidt decomposition by diagonalizing the reduced state on the first
/// factor and contracting for the partner vectors.
pub fn schmidt(psi: &StateVector, dims: &Dims) -> Result<SchmidtDecomposition> {
    let (da, db) = dims.ensure_bipartite()?;
    if psi.amplitudes().len() != da * db {
        return Err(Error::DimensionMismatch(format!(
            "{} amplitudes for dims {dims}",
            psi.amplitudes().len()
        )));
    }
    schmidt_raw(psi.amplitudes(), da, db)
}

fn coefficient_matrix(v: &[C64], da: usize, db: usize) -> ComplexMatrix {
    ComplexMatrix::from_vec(da, db, v.to_vec()).expect("length checked by caller")
}

fn schmidt_raw(v: &[C64], da: usize, db: usize) -> Result<SchmidtDecomposition> {
    let m = coefficient_matrix(v, da, db);
    let reduced = (&m * &m.adjoint()).hermitian_part();
    let eig = hermitian_eigs(&reduced)?;

    let mut coefficients = Vec::new();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for k in (0..da).rev() {
        let u = eig.vector(k);
        // w_j = sum_i conj(u_i) M_ij
        let w: Vec<C64> = (0..db)
            .map(|j| (0..da).map(|i| u[i].conj() * m[(i, j)]).sum())
            .collect();
        let c = vec_norm(&w);
        if c <= SCHMIDT_CUTOFF {
            continue;
        }
        coefficients.push(c);
        left.push(u);
        right.push(w.into_iter().map(|z| z / c).collect());
    }
    Ok(SchmidtDecomposition {
        coefficients,
        left,
        right,
    })
}

/// Second-largest Schmidt coefficient of an arbitrary vector on `da x db`,
/// zero for product vectors. The vector need not be normalized.
pub fn second_schmidt_coefficient(v: &[C64], da: usize, db: usize) -> Result<f64> {
    if v.len() != da * db {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for {da}x{db}",
            v.len()
        )));
    }
    let m = coefficient_matrix(v, da, db);
    let reduced = (&m * &m.adjoint()).hermitian_part();
    let values = hermitian_eigs(&reduced)?.values;
    Ok(values
        .len()
        .checked_sub(2)
        .map_or(0.0, |k| values[k].max(0.0).sqrt()))
}

/// Schmidt rank one within `tol` on the second coefficient.
pub fn is_separable_pure(psi: &StateVector, dims: &Dims, tol: f64) -> Result<bool> {
    let (da, db) = dims.ensure_bipartite()?;
    if psi.amplitudes().len() != da * db {
        return Err(Error::DimensionMismatch(format!(
            "{} amplitudes for dims {dims}",
            psi.amplitudes().len()
        )));
    }
    Ok(second_schmidt_coefficient(psi.amplitudes(), da, db)? <= tol)
}

/// Ascending eigenvalues of the partial transpose on the second factor.
pub fn pt_spectrum(rho: &DensityMatrix, dims: &Dims) -> Result<Vec<f64>> {
    dims.ensure_bipartite()?;
    let pt = partial_transpose(rho.matrix(), dims, 1)?;
    Ok(hermitian_eigs(&pt)?.values)
}

/// Sum of the magnitudes of the negative partial-transpose eigenvalues.
pub fn negativity(rho: &DensityMatrix, dims: &Dims) -> Result<f64> {
    Ok(negativity_of_spectrum(&pt_spectrum(rho, dims)?))
}

pub(crate) fn negativity_of_spectrum(values: &[f64]) -> f64 {
    values.iter().map(|&l| (-l).max(0.0)).sum()
}

/// Verdict of the partial-transpose test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PptVerdict {
    Separable,
    Entangled,
}

/// Entangled whenever the partial transpose has a genuinely negative
/// eigenvalue; Separable only where positivity of the partial transpose is
/// also sufficient (`2x2`, `2x3`, `3x2`).
pub fn ppt_verdict(rho: &DensityMatrix, dims: &Dims) -> Result<PptVerdict> {
    let (da, db) = dims.ensure_bipartite()?;
    if negativity(rho, dims)? > tol::NEGATIVITY {
        return Ok(PptVerdict::Entangled);
    }
    if da * db <= 6 {
        Ok(PptVerdict::Separable)
    } else {
        Err(Error::Inconclusive(format!(
            "state has a positive partial transpose on {dims}, where that does not imply separability"
        )))
    }
}

/// Mixture of `k` random product pure states with random weights, drawn
/// from stream `(seed, 0)`.
pub fn random_separable(dims: &Dims, k: usize, seed: u64) -> Result<DensityMatrix> {
    let (da, db) = dims.ensure_bipartite()?;
    if k == 0 {
        return Err(Error::InvalidWeights("need at least one component".into()));
    }
    let mut rng = rng::stream(seed, 0);
    let mut components = Vec::with_capacity(k);
    let mut weights = Vec::with_capacity(k);
    for _ in 0..k {
        let a = StateVector::new(rng::random_unit_vector(&mut rng, da), Dims::new(vec![da])?)?;
        let b = StateVector::new(rng::random_unit_vector(&mut rng, db), Dims::new(vec![db])?)?;
        components.push(pure_density(&a.product(&b))?);
        let w: f64 = rand::Rng::random::<f64>(&mut rng);
        weights.push(-(1.0 - w).ln());
    }
    let total: f64 = weights.iter().sum();
    let pairs: Vec<(f64, &DensityMatrix)> =
        weights.iter().map(|w| w / total).zip(components.iter()).collect();
    mix(&pairs)
}

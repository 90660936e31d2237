//! State vectors, density matrices and the named states used throughout.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{hermitian_eigs, inner, kron, kron_all, vec_norm, ComplexMatrix, Dims, C64, ONE, ZERO};
use crate::tol;

/// Normalized amplitudes on a tensor-product space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    amplitudes: Vec<C64>,
    dims: Dims,
}

impl StateVector {
    /// Validating constructor; rejects unnormalized amplitudes.
    pub fn new(amplitudes: Vec<C64>, dims: Dims) -> Result<Self> {
        if amplitudes.len() != dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for dims {dims}",
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > tol::STATE {
            return Err(Error::InvalidState(format!(
                "squared norm {norm_sq} differs from 1"
            )));
        }
        Ok(Self { amplitudes, dims })
    }

    /// Rescales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(amplitudes: Vec<C64>, dims: Dims) -> Result<Self> {
        let norm = vec_norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Self::new(amplitudes.into_iter().map(|z| z / norm).collect(), dims)
    }

    pub fn from_real(amplitudes: &[f64], dims: Dims) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect(), dims)
    }

    /// Computational basis vector `|index>`.
    pub fn basis(index: usize, dims: Dims) -> Result<Self> {
        let n = dims.total();
        if index >= n {
            return Err(Error::DimensionMismatch(format!(
                "basis index {index} outside dimension {n}"
            )));
        }
        let mut amps = vec![ZERO; n];
        amps[index] = ONE;
        Self::new(amps, dims)
    }

    /// Tensor product; the dims are concatenated.
    pub fn product(&self, other: &StateVector) -> StateVector {
        let amplitudes = crate::tensor::kron_vec(&self.amplitudes, &other.amplitudes);
        let mut dims = self.dims.as_slice().to_vec();
        dims.extend_from_slice(other.dims.as_slice());
        StateVector {
            amplitudes,
            dims: Dims::new(dims).expect("non-empty"),
        }
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn norm(&self) -> f64 {
        vec_norm(&self.amplitudes)
    }

    pub fn with_global_phase(&self, theta: f64) -> StateVector {
        let p = C64::from_polar(1.0, theta);
        StateVector {
            amplitudes: self.amplitudes.iter().map(|z| z * p).collect(),
            dims: self.dims.clone(),
        }
    }
}

/// Positive semidefinite, unit-trace operator with subsystem dims.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Dims,
}

impl DensityMatrix {
    /// Validating constructor: Hermitian, unit trace and PSD, all within `1e-9`.
    pub fn new(matrix: ComplexMatrix, dims: Dims) -> Result<Self> {
        dims.check_matrix(&matrix)?;
        matrix.ensure_hermitian(tol::HERMITIAN)?;
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol::STATE || tr.im.abs() > tol::STATE {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = hermitian_eigs(&matrix)?.min_value();
        if min < -tol::PSD_SLACK {
            return Err(Error::Positivity(format!(
                "smallest eigenvalue {min:e} is negative"
            )));
        }
        Ok(Self { matrix, dims })
    }

    pub(crate) fn new_unchecked(matrix: ComplexMatrix, dims: Dims) -> Self {
        Self { matrix, dims }
    }

    /// Nearest valid density matrix in Frobenius norm.
    ///
    /// The Hermitian part is diagonalized and its spectrum projected onto the
    /// probability simplex. Meant for repairing statistical estimates.
    pub fn project(matrix: &ComplexMatrix, dims: Dims) -> Result<Self> {
        dims.check_matrix(matrix)?;
        let eig = hermitian_eigs(&matrix.hermitian_part())?;
        let weights = project_to_simplex(&eig.values);
        let n = weights.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &w) in weights.iter().enumerate() {
            if w > 0.0 {
                let v = eig.vector(k);
                out = &out + &ComplexMatrix::outer(&v, &v).scale_real(w);
            }
        }
        Ok(Self {
            matrix: out.hermitian_part(),
            dims,
        })
    }

    pub fn maximally_mixed(dims: Dims) -> Self {
        let n = dims.total();
        Self {
            matrix: ComplexMatrix::identity(n).scale_real(1.0 / n as f64),
            dims,
        }
    }

    /// Diagonal state with the given probabilities in the computational basis.
    pub fn diagonal(probabilities: &[f64], dims: Dims) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diag(probabilities), dims)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Tensor product of two states.
    pub fn product(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.as_slice().to_vec();
        dims.extend_from_slice(other.dims.as_slice());
        DensityMatrix {
            matrix: kron(&self.matrix, &other.matrix),
            dims: Dims::new(dims).expect("non-empty"),
        }
    }

    /// Reduced state on the kept subsystems.
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let (m, dims) = crate::tensor::partial_trace(&self.matrix, &self.dims, keep)?;
        Ok(DensityMatrix { matrix: m, dims })
    }

    /// U rho U^H for a unitary `u` of matching size.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<DensityMatrix> {
        self.dims.check_matrix(u)?;
        let m = u.matmul(&self.matrix)?.matmul(&u.adjoint())?;
        Ok(DensityMatrix {
            matrix: m.hermitian_part(),
            dims: self.dims.clone(),
        })
    }

    /// Trace distance `||a - b||_1 / 2`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(format!(
                "trace distance between dims {} and {}",
                self.dims, other.dims
            )));
        }
        let diff = (&self.matrix - &other.matrix).hermitian_part();
        let eig = hermitian_eigs(&diff)?;
        Ok(0.5 * eig.values.iter().map(|l| l.abs()).sum::<f64>())
    }
}

/// Euclidean projection of `v` onto the probability simplex.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut shift = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (k as f64 + 1.0);
        if u - candidate > 0.0 {
            shift = candidate;
        }
    }
    v.iter().map(|&x| (x - shift).max(0.0)).collect()
}

/// Orthonormal basis stored as matrix columns.
///
/// `product_vectors` records that every basis vector is a product vector;
/// `factors` is present when the basis is a tensor product of local bases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthonormalBasis {
    vectors: ComplexMatrix,
    #[serde(default)]
    product_vectors: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    factors: Option<Vec<ComplexMatrix>>,
}

impl OrthonormalBasis {
    /// Validates orthonormality of the columns within `1e-9`.
    pub fn new(vectors: ComplexMatrix) -> Result<Self> {
        if !vectors.is_square() {
            return Err(Error::InvalidBasis(format!(
                "{}x{} is not a complete basis",
                vectors.rows(),
                vectors.cols()
            )));
        }
        let gram = &vectors.adjoint() * &vectors;
        let err = gram.max_abs_diff(&ComplexMatrix::identity(vectors.rows()));
        if err > tol::STATE {
            return Err(Error::InvalidBasis(format!(
                "columns are not orthonormal (max Gram deviation {err:e})"
            )));
        }
        Ok(Self {
            vectors,
            product_vectors: false,
            factors: None,
        })
    }

    /// Orthonormal basis whose vectors are each checked to be product
    /// vectors on `dims` (Schmidt rank one within `tol`).
    pub fn with_product_vectors(vectors: ComplexMatrix, dims: &Dims, tol: f64) -> Result<Self> {
        let (da, db) = dims.ensure_bipartite()?;
        let mut basis = Self::new(vectors)?;
        if basis.dim() != da * db {
            return Err(Error::DimensionMismatch(format!(
                "basis of size {} for dims {dims}",
                basis.dim()
            )));
        }
        for k in 0..basis.dim() {
            let second = crate::entanglement::second_schmidt_coefficient(&basis.vector(k), da, db)?;
            if second > tol {
                return Err(Error::InvalidBasis(format!(
                    "basis vector {k} is entangled (second Schmidt coefficient {second:e})"
                )));
            }
        }
        basis.product_vectors = true;
        Ok(basis)
    }

    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        Self::new(ComplexMatrix::from_columns(columns)?)
    }

    pub fn computational(n: usize) -> Self {
        Self {
            vectors: ComplexMatrix::identity(n),
            product_vectors: false,
            factors: None,
        }
    }

    /// Computational basis recorded as a product over `dims`.
    pub fn computational_product(dims: &Dims) -> Self {
        let factors: Vec<ComplexMatrix> = dims
            .as_slice()
            .iter()
            .map(|&d| ComplexMatrix::identity(d))
            .collect();
        Self {
            vectors: ComplexMatrix::identity(dims.total()),
            product_vectors: true,
            factors: Some(factors),
        }
    }

    /// Product of local bases; basis vector order follows the slow-first
    /// index convention.
    pub fn product(factors: Vec<OrthonormalBasis>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidBasis("empty product".into()));
        }
        let mats: Vec<ComplexMatrix> = factors.into_iter().map(|b| b.vectors).collect();
        Ok(Self {
            vectors: kron_all(mats.iter()),
            product_vectors: true,
            factors: Some(mats),
        })
    }

    /// Eigenbasis of a single-qubit Pauli letter, `+1` eigenvector first.
    pub fn pauli(letter: char) -> Result<Self> {
        let h = FRAC_1_SQRT_2;
        let columns: Vec<Vec<C64>> = match letter.to_ascii_uppercase() {
            'I' | 'Z' => vec![vec![ONE, ZERO], vec![ZERO, ONE]],
            'X' => vec![
                vec![C64::new(h, 0.0), C64::new(h, 0.0)],
                vec![C64::new(h, 0.0), C64::new(-h, 0.0)],
            ],
            'Y' => vec![
                vec![C64::new(h, 0.0), C64::new(0.0, h)],
                vec![C64::new(h, 0.0), C64::new(0.0, -h)],
            ],
            other => return Err(Error::InvalidBasis(format!("no Pauli eigenbasis for `{other}`"))),
        };
        Self::from_columns(&columns)
    }

    pub fn dim(&self) -> usize {
        self.vectors.rows()
    }

    pub fn vectors(&self) -> &ComplexMatrix {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    pub fn factors(&self) -> Option<&[ComplexMatrix]> {
        self.factors.as_deref()
    }

    /// Every basis vector is a product vector.
    pub fn is_product(&self) -> bool {
        self.product_vectors
    }

    /// `<b_k| m |b_k>` for every basis vector.
    pub fn diagonal_of(&self, m: &ComplexMatrix) -> Result<Vec<C64>> {
        let rotated = &(&self.vectors.adjoint() * m) * &self.vectors;
        if rotated.rows() != self.dim() {
            return Err(Error::DimensionMismatch("basis size".into()));
        }
        Ok(rotated.diagonal())
    }

    /// Largest off-diagonal entry of `m` in this basis.
    pub fn off_diagonal_residue(&self, m: &ComplexMatrix) -> Result<f64> {
        if m.rows() != self.dim() || !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "operator of side {} against basis of size {}",
                m.rows(),
                self.dim()
            )));
        }
        let rotated = &(&self.vectors.adjoint() * m) * &self.vectors;
        let mut worst = 0.0f64;
        for i in 0..rotated.rows() {
            for j in 0..rotated.cols() {
                if i != j {
                    worst = worst.max(rotated[(i, j)].norm());
                }
            }
        }
        Ok(worst)
    }

    pub fn diagonalizes(&self, m: &ComplexMatrix, tol: f64) -> bool {
        self.off_diagonal_residue(m).is_ok_and(|r| r <= tol)
    }

    /// `sum_k p_k |b_k><b_k|`
    pub fn diagonal_operator(&self, weights: &[f64]) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &w) in weights.iter().enumerate() {
            if w != 0.0 {
                let v = self.vector(k);
                out = &out + &ComplexMatrix::outer(&v, &v).scale_real(w);
            }
        }
        out
    }
}

/// `|psi><psi|`
pub fn pure_density(psi: &StateVector) -> Result<DensityMatrix> {
    let norm_sq = psi.norm().powi(2);
    if (norm_sq - 1.0).abs() > tol::STATE {
        return Err(Error::InvalidState(format!(
            "squared norm {norm_sq} differs from 1"
        )));
    }
    let a = psi.amplitudes();
    let mut outer = ComplexMatrix::outer(a, a);
    // Populations depend only on |a_i|, but polar rounding leaves ulp-level
    // phase dependence. Snap them to a 2^-48 grid so that states differing
    // only in relative phase share an identical diagonal.
    const GRID: f64 = (1u64 << 48) as f64;
    for i in 0..a.len() {
        outer[(i, i)] = C64::new((a[i].norm_sqr() * GRID).round() / GRID, 0.0);
    }
    Ok(DensityMatrix::new_unchecked(outer, psi.dims().clone()))
}

/// Convex combination of density matrices.
pub fn mix(components: &[(f64, &DensityMatrix)]) -> Result<DensityMatrix> {
    let (_, first) = components
        .first()
        .ok_or_else(|| Error::InvalidWeights("empty mixture".into()))?;
    let dims = first.dims().clone();
    let mut total = 0.0;
    let n = dims.total();
    let mut m = ComplexMatrix::zeros(n, n);
    for (w, rho) in components {
        if !w.is_finite() || *w < 0.0 {
            return Err(Error::InvalidWeights(format!("weight {w} is negative")));
        }
        if rho.dims() != &dims {
            return Err(Error::DimensionMismatch(format!(
                "mixing dims {} with {}",
                rho.dims(),
                dims
            )));
        }
        total += w;
        m = &m + &rho.matrix().scale_real(*w);
    }
    if (total - 1.0).abs() > tol::STATE {
        return Err(Error::InvalidWeights(format!("weights sum to {total}")));
    }
    Ok(DensityMatrix::new_unchecked(m, dims))
}

/// `(|00> + e^{i phi}|11>)/sqrt(2)` on two qubits.
pub fn cat_pure(phi: f64) -> StateVector {
    cat_pure_weighted(0.5, phi).expect("p = 1/2 is valid")
}

/// `sqrt(p)|00> + e^{i phi} sqrt(1-p)|11>`, the cat observed before or after
/// the half-life.
pub fn cat_pure_weighted(p: f64, phi: f64) -> Result<StateVector> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidState(format!(
            "alive probability {p} outside [0, 1]"
        )));
    }
    let amps = vec![
        C64::new(p.sqrt(), 0.0),
        ZERO,
        ZERO,
        C64::from_polar((1.0 - p).sqrt(), phi.rem_euclid(std::f64::consts::TAU)),
    ];
    StateVector::new(amps, Dims::two_qubits())
}

/// `diag(1/2, 0, 0, 1/2)`
pub fn cat_mixed() -> DensityMatrix {
    DensityMatrix::new_unchecked(
        ComplexMatrix::from_real_diag(&[0.5, 0.0, 0.0, 0.5]),
        Dims::two_qubits(),
    )
}

/// `(|00> + |11>)/sqrt(2)`
pub fn phi_plus() -> StateVector {
    let h = FRAC_1_SQRT_2;
    StateVector::from_real(&[h, 0.0, 0.0, h], Dims::two_qubits()).expect("normalized")
}

/// `(|000> + |111>)/sqrt(2)`
pub fn ghz() -> StateVector {
    let h = FRAC_1_SQRT_2;
    let mut amps = [0.0; 8];
    amps[0] = h;
    amps[7] = h;
    StateVector::from_real(&amps, Dims::qubits(3)).expect("normalized")
}

/// Deletes every coherence of `rho` in `basis`.
pub fn dephase(rho: &DensityMatrix, basis: &OrthonormalBasis) -> Result<DensityMatrix> {
    if basis.dim() != rho.dims().total() {
        return Err(Error::DimensionMismatch(format!(
            "basis of size {} for dims {}",
            basis.dim(),
            rho.dims()
        )));
    }
    // Re-validate: a basis can be deserialized without passing `new`.
    OrthonormalBasis::new(basis.vectors().clone())?;
    let weights: Vec<f64> = basis.diagonal_of(rho.matrix())?.iter().map(|z| z.re).collect();
    Ok(DensityMatrix::new_unchecked(
        basis.diagonal_operator(&weights).hermitian_part(),
        rho.dims().clone(),
    ))
}

/// `Tr rho^2`
pub fn purity(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    m.trace_product(m).map(|z| z.re).unwrap_or(f64::NAN)
}

/// Fidelity-like overlap `|<a|b>|^2` of two state vectors.
pub fn overlap_sq(a: &StateVector, b: &StateVector) -> f64 {
    inner(a.amplitudes(), b.amplitudes()).norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn pure_density_of_basis_state() {
        let psi = StateVector::basis(0, Dims::two_qubits()).unwrap();
        let rho = pure_density(&psi).unwrap();
        assert_eq!(
            rho.matrix(),
            &ComplexMatrix::from_real_diag(&[1.0, 0.0, 0.0, 0.0])
        );
        assert!((purity(&rho) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cat_pure_zero_has_four_halves() {
        let rho = pure_density(&cat_pure(0.0)).unwrap();
        for &(i, j) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!((rho.matrix()[(i, j)] - C64::new(0.5, 0.0)).norm() < 1e-15);
        }
        assert!(rho.matrix()[(1, 1)].norm() < 1e-15);
    }

    #[test]
    fn global_phase_does_not_change_density() {
        let psi = cat_pure(0.7);
        let a = pure_density(&psi).unwrap();
        let b = pure_density(&psi.with_global_phase(1.3)).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-15);
    }

    #[test]
    fn unnormalized_vector_rejected() {
        let err = StateVector::from_real(&[1.0, 1.0], Dims::new(vec![2]).unwrap());
        assert!(matches!(err, Err(Error::InvalidState(_))));
        let ok = StateVector::normalized(
            vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)],
            Dims::new(vec![2]).unwrap(),
        )
        .unwrap();
        assert!((ok.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mix_of_single_state_is_identity_operation() {
        let rho = pure_density(&phi_plus()).unwrap();
        let m = mix(&[(1.0, &rho)]).unwrap();
        assert_eq!(m, rho);
    }

    #[test]
    fn mix_of_product_projectors_is_dephased_cat() {
        let a = pure_density(&StateVector::basis(0, Dims::two_qubits()).unwrap()).unwrap();
        let b = pure_density(&StateVector::basis(3, Dims::two_qubits()).unwrap()).unwrap();
        let m = mix(&[(0.5, &a), (0.5, &b)]).unwrap();
        assert_eq!(m.matrix(), cat_mixed().matrix());
    }

    #[test]
    fn mix_lowers_purity() {
        let a = pure_density(&cat_pure(0.0)).unwrap();
        let b = pure_density(&phi_plus().with_global_phase(0.0)).unwrap();
        let c = pure_density(&cat_pure(PI)).unwrap();
        // cat_pure(0) == phi_plus; mixing identical states stays pure.
        assert!((purity(&mix(&[(0.3, &a), (0.7, &b)]).unwrap()) - 1.0).abs() < 1e-12);
        // Orthogonal Bell states at 1/2 each: purity 1/2.
        let m = mix(&[(0.5, &a), (0.5, &c)]).unwrap();
        assert!((purity(&m) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn mix_rejects_bad_weights() {
        let rho = cat_mixed();
        assert!(matches!(
            mix(&[(0.6, &rho), (0.6, &rho)]),
            Err(Error::InvalidWeights(_))
        ));
        assert!(matches!(
            mix(&[(-0.5, &rho), (1.5, &rho)]),
            Err(Error::InvalidWeights(_))
        ));
        let other = DensityMatrix::maximally_mixed(Dims::new(vec![2, 3]).unwrap());
        assert!(matches!(
            mix(&[(0.5, &rho), (0.5, &other)]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn cat_pure_properties() {
        for phi in [0.0, 0.4, PI / 2.0, PI, 5.0, -1.0] {
            let psi = cat_pure(phi);
            assert!((psi.norm() - 1.0).abs() < 1e-15);
            // <ZZ> = |a_00|^2 + |a_11|^2 = 1 since only |00>, |11> are populated.
            let rho = pure_density(&psi).unwrap();
            let zz = ComplexMatrix::from_real_diag(&[1.0, -1.0, -1.0, 1.0]);
            assert!((rho.matrix().trace_product(&zz).unwrap().re - 1.0).abs() < 1e-15);
        }
        assert_eq!(cat_pure(0.0).amplitudes(), phi_plus().amplitudes());
    }

    #[test]
    fn weighted_cat() {
        let psi = cat_pure_weighted(0.8, 0.0).unwrap();
        assert!((psi.amplitudes()[0].norm_sqr() - 0.8).abs() < 1e-15);
        assert!(cat_pure_weighted(1.2, 0.0).is_err());
    }

    #[test]
    fn cat_mixed_is_dephased_cat_pure() {
        let basis = OrthonormalBasis::computational_product(&Dims::two_qubits());
        for phi in [0.0, 1.0, PI / 2.0, PI, 4.5] {
            let rho = pure_density(&cat_pure(phi)).unwrap();
            let d = dephase(&rho, &basis).unwrap();
            assert!(d.matrix().max_abs_diff(cat_mixed().matrix()) < 1e-15);
        }
        assert!((purity(&cat_mixed()) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ghz_and_phi_plus_amplitudes() {
        let g = ghz();
        assert_eq!(g.dims().as_slice(), &[2, 2, 2]);
        assert!((g.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((g.amplitudes()[7].re - FRAC_1_SQRT_2).abs() < 1e-15);
        let p = pure_density(&phi_plus()).unwrap();
        assert!((p.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((p.matrix()[(3, 3)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dephase_leaves_diagonal_state_alone() {
        let rho = DensityMatrix::diagonal(&[0.1, 0.2, 0.3, 0.4], Dims::two_qubits()).unwrap();
        let d = dephase(&rho, &OrthonormalBasis::computational(4)).unwrap();
        assert_eq!(d.matrix(), rho.matrix());
    }

    #[test]
    fn dephase_rejects_non_orthonormal_basis() {
        let cols = vec![
            vec![ONE, ZERO, ZERO, ZERO],
            vec![ONE, ONE, ZERO, ZERO],
            vec![ZERO, ZERO, ONE, ZERO],
            vec![ZERO, ZERO, ZERO, ONE],
        ];
        assert!(matches!(
            OrthonormalBasis::from_columns(&cols),
            Err(Error::InvalidBasis(_))
        ));
    }

    #[test]
    fn dephase_in_pauli_x_basis_keeps_xx_diagonal() {
        let basis = OrthonormalBasis::product(vec![
            OrthonormalBasis::pauli('X').unwrap(),
            OrthonormalBasis::pauli('X').unwrap(),
        ])
        .unwrap();
        let rho = pure_density(&cat_pure(0.3)).unwrap();
        let d = dephase(&rho, &basis).unwrap();
        let dd = dephase(&d, &basis).unwrap();
        assert!(d.matrix().max_abs_diff(dd.matrix()) < 1e-12);
        let xx = kron(
            &crate::tensor::pauli_matrix('X').unwrap(),
            &crate::tensor::pauli_matrix('X').unwrap(),
        );
        let before = rho.matrix().trace_product(&xx).unwrap().re;
        let after = d.matrix().trace_product(&xx).unwrap().re;
        assert!((before - after).abs() < 1e-12);
    }

    #[test]
    fn purity_of_maximally_mixed() {
        let rho = DensityMatrix::maximally_mixed(Dims::two_qubits());
        assert!((purity(&rho) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        let dims = Dims::two_qubits();
        let bad_trace = ComplexMatrix::identity(4);
        assert!(matches!(
            DensityMatrix::new(bad_trace, dims.clone()),
            Err(Error::InvalidState(_))
        ));
        let mut negative = ComplexMatrix::from_real_diag(&[0.5, 0.0, 0.0, 0.5]);
        negative[(0, 3)] = C64::new(0.6, 0.0);
        negative[(3, 0)] = C64::new(0.6, 0.0);
        assert!(matches!(
            DensityMatrix::new(negative, dims.clone()),
            Err(Error::Positivity(_))
        ));
        assert!(matches!(
            DensityMatrix::new(ComplexMatrix::identity(3).scale_real(1.0 / 3.0), dims),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn projection_repairs_estimates() {
        let m = ComplexMatrix::from_real_diag(&[0.7, 0.4, -0.1, 0.0]);
        let rho = DensityMatrix::project(&m, Dims::two_qubits()).unwrap();
        assert!(DensityMatrix::new(rho.matrix().clone(), Dims::two_qubits()).is_ok());
        // Simplex projection of (0.7, 0.4, -0.1, 0) subtracts 0.05 from the top two.
        let d = rho.matrix().real_diagonal();
        assert!((d[0] - 0.65).abs() < 1e-12 && (d[1] - 0.35).abs() < 1e-12);
        assert!(d[2].abs() < 1e-12 && d[3].abs() < 1e-12);
    }

    #[test]
    fn simplex_projection_fixed_points() {
        let p = vec![0.25; 4];
        assert_eq!(project_to_simplex(&p), p);
        let q = project_to_simplex(&[2.0, 0.0]);
        assert_eq!(q, vec![1.0, 0.0]);
    }
}

//! Hermitian observables, projective measurements and Born-rule statistics.

use std::fmt;
use std::sync::OnceLock;

use rand::Rng;
use rand_distr::{Binomial, Distribution as _};
use serde::{Deserialize, Serialize};

use crate::entanglement::second_schmidt_coefficient;
use crate::error::{Error, Result};
use crate::rng;
use crate::state::{DensityMatrix, OrthonormalBasis};
use crate::tensor::{hermitian_eigs, kron_all, pauli_matrix, ComplexMatrix, Dims, C64};
use crate::tol;

/// One eigenspace of an observable.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralProjector {
    pub outcome: f64,
    pub projector: ComplexMatrix,
    pub rank: usize,
}

/// Hermitian operator with an optional declared eigenbasis.
#[derive(Debug, Clone)]
pub struct Observable {
    matrix: ComplexMatrix,
    label: String,
    declared_basis: Option<OrthonormalBasis>,
    spectrum: OnceLock<Vec<SpectralProjector>>,
}

impl PartialEq for Observable {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
            && self.label == other.label
            && self.declared_basis == other.declared_basis
    }
}

impl Observable {
    pub fn new(matrix: ComplexMatrix, label: impl Into<String>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidObservable(format!(
                "{}x{} matrix is not square",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let dev = matrix.hermiticity_error();
        if dev > tol::HERMITIAN {
            return Err(Error::InvalidObservable(format!(
                "not Hermitian (max deviation {dev:e})"
            )));
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
            label: label.into(),
            declared_basis: None,
            spectrum: OnceLock::new(),
        })
    }

    /// Attaches an eigenbasis; it must diagonalize the matrix within `1e-9`.
    pub fn with_eigenbasis(mut self, basis: OrthonormalBasis) -> Result<Self> {
        let residue = basis.off_diagonal_residue(&self.matrix)?;
        if residue > tol::STATE {
            return Err(Error::InvalidObservable(format!(
                "declared basis leaves off-diagonal residue {residue:e} on `{}`",
                self.label
            )));
        }
        self.declared_basis = Some(basis);
        Ok(self)
    }

    /// Parses a Pauli string such as `"ZZ"` or `"xi"`; the first letter acts
    /// on subsystem 0. The product eigenbasis is declared automatically.
    pub fn pauli(text: &str) -> Result<Self> {
        let letters: Vec<char> = text.trim().chars().map(|c| c.to_ascii_uppercase()).collect();
        if letters.is_empty() {
            return Err(Error::InvalidObservable("empty Pauli string".into()));
        }
        let factors = letters
            .iter()
            .map(|&c| pauli_matrix(c))
            .collect::<Result<Vec<_>>>()?;
        let bases = letters
            .iter()
            .map(|&c| OrthonormalBasis::pauli(c))
            .collect::<Result<Vec<_>>>()?;
        let label: String = letters.iter().collect();
        Self::new(kron_all(factors.iter()), label)?.with_eigenbasis(OrthonormalBasis::product(bases)?)
    }

    /// Projector onto a normalized vector, e.g. a Bell state.
    pub fn projector(vector: &[C64], label: impl Into<String>) -> Result<Self> {
        Self::new(ComplexMatrix::outer(vector, vector), label)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn declared_basis(&self) -> Option<&OrthonormalBasis> {
        self.declared_basis.as_ref()
    }

    /// Distinct eigenvalues with their eigenprojectors, largest outcome first.
    pub fn spectral_projectors(&self) -> Result<&[SpectralProjector]> {
        if let Some(s) = self.spectrum.get() {
            return Ok(s);
        }
        let computed = spectral_projectors_of(&self.matrix)?;
        Ok(self.spectrum.get_or_init(|| computed))
    }

    /// Smallest and largest eigenvalue.
    pub fn spectral_range(&self) -> Result<(f64, f64)> {
        let s = self.spectral_projectors()?;
        Ok((
            s.last().map_or(0.0, |p| p.outcome),
            s.first().map_or(0.0, |p| p.outcome),
        ))
    }

    pub fn measurement(&self) -> Result<ProjectiveMeasurement> {
        let outcomes = self
            .spectral_projectors()?
            .iter()
            .map(|p| MeasurementOutcome {
                label: format_outcome(p.outcome),
                value: Some(p.outcome),
                projector: p.projector.clone(),
            })
            .collect();
        Ok(ProjectiveMeasurement { outcomes })
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

fn format_outcome(v: f64) -> String {
    if v == v.round() && v.abs() < 1e15 {
        format!("{:+}", v as i64)
    } else {
        format!("{v:+}")
    }
}

fn spectral_projectors_of(m: &ComplexMatrix) -> Result<Vec<SpectralProjector>> {
    let eig = hermitian_eigs(m)?;
    let n = eig.values.len();
    let width = eig.max_value() - eig.min_value();
    let scale = eig.values.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let gap = if width <= 1e-14 * scale {
        f64::INFINITY
    } else {
        tol::DEGENERATE * width
    };

    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in 0..n {
        match groups.last_mut() {
            Some(g) if eig.values[k] - eig.values[*g.last().expect("non-empty")] <= gap => g.push(k),
            _ => groups.push(vec![k]),
        }
    }
    let mut out: Vec<SpectralProjector> = groups
        .into_iter()
        .map(|g| {
            let outcome = g.iter().map(|&k| eig.values[k]).sum::<f64>() / g.len() as f64;
            let mut projector = ComplexMatrix::zeros(n, n);
            for &k in &g {
                let v = eig.vector(k);
                projector = &projector + &ComplexMatrix::outer(&v, &v);
            }
            SpectralProjector {
                outcome,
                projector,
                rank: g.len(),
            }
        })
        .collect();
    out.reverse();
    Ok(out)
}

/// Eigenprojectors of a Hermitian matrix, largest outcome first.
pub fn spectral_projectors(a: &Observable) -> Result<Vec<SpectralProjector>> {
    a.spectral_projectors().map(<[_]>::to_vec)
}

fn check_dims(rho: &DensityMatrix, a: &Observable) -> Result<()> {
    if rho.dims().total() != a.dim() {
        return Err(Error::DimensionMismatch(format!(
            "observable `{}` of side {} against state with dims {}",
            a.label(),
            a.dim(),
            rho.dims()
        )));
    }
    Ok(())
}

/// `Tr(rho A)`
pub fn expectation(rho: &DensityMatrix, a: &Observable) -> Result<f64> {
    check_dims(rho, a)?;
    let z = rho.matrix().trace_product(a.matrix())?;
    if z.im.abs() > tol::IMAG_REJECT {
        return Err(Error::ImaginaryResidue { residue: z.im.abs() });
    }
    Ok(z.re)
}

/// `AB - BA`
pub fn commutator(a: &Observable, b: &Observable) -> Result<ComplexMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "`{}` and `{}` act on different spaces",
            a.label(),
            b.label()
        )));
    }
    a.matrix().commutator(b.matrix())
}

pub fn commutes(a: &Observable, b: &Observable, tol: f64) -> Result<bool> {
    Ok(commutator(a, b)?.max_abs() <= tol)
}

/// A labelled outcome of a projective measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutcome {
    pub label: String,
    pub value: Option<f64>,
    pub projector: ComplexMatrix,
}

/// Complete set of orthogonal projectors with outcome labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMeasurement {
    outcomes: Vec<MeasurementOutcome>,
}

impl ProjectiveMeasurement {
    /// Validates completeness and orthogonality within `1e-9`.
    pub fn new(outcomes: Vec<MeasurementOutcome>) -> Result<Self> {
        let n = outcomes
            .first()
            .map(|o| o.projector.rows())
            .ok_or_else(|| Error::InvalidBasis("measurement without outcomes".into()))?;
        let mut sum = ComplexMatrix::zeros(n, n);
        for (i, o) in outcomes.iter().enumerate() {
            if o.projector.rows() != n || !o.projector.is_square() {
                return Err(Error::DimensionMismatch("projector sizes differ".into()));
            }
            sum = &sum + &o.projector;
            for other in &outcomes[i + 1..] {
                let prod = &o.projector * &other.projector;
                if prod.max_abs() > tol::STATE {
                    return Err(Error::InvalidBasis(format!(
                        "projectors `{}` and `{}` are not orthogonal",
                        o.label, other.label
                    )));
                }
            }
        }
        if sum.max_abs_diff(&ComplexMatrix::identity(n)) > tol::STATE {
            return Err(Error::InvalidBasis("projectors do not sum to identity".into()));
        }
        Ok(Self { outcomes })
    }

    /// Rank-one measurement in `basis` with the given labels.
    pub fn in_basis(basis: &OrthonormalBasis, labels: Vec<String>) -> Result<Self> {
        if labels.len() != basis.dim() {
            return Err(Error::InvalidBasis(format!(
                "{} labels for a basis of size {}",
                labels.len(),
                basis.dim()
            )));
        }
        let outcomes = labels
            .into_iter()
            .enumerate()
            .map(|(k, label)| {
                let v = basis.vector(k);
                MeasurementOutcome {
                    label,
                    value: None,
                    projector: ComplexMatrix::outer(&v, &v),
                }
            })
            .collect();
        Ok(Self { outcomes })
    }

    /// Computational-basis measurement labelled by digit strings (`"01"`).
    pub fn computational(dims: &Dims) -> Self {
        let labels = (0..dims.total())
            .map(|i| dims.digits(i).iter().map(ToString::to_string).collect())
            .collect();
        Self::in_basis(&OrthonormalBasis::computational(dims.total()), labels)
            .expect("labels match basis size")
    }

    /// Local measurement of each qubit in the eigenbasis of a Pauli letter.
    ///
    /// Outcomes are labelled by sign strings (`"+-"`) and valued by the
    /// product of the local signs.
    pub fn pauli_product(letters: &str) -> Result<Self> {
        let letters: Vec<char> = letters.chars().map(|c| c.to_ascii_uppercase()).collect();
        if letters.is_empty() || letters.iter().any(|c| !matches!(c, 'X' | 'Y' | 'Z')) {
            return Err(Error::InvalidBasis(format!(
                "measurement setting `{}` must use X, Y or Z on every qubit",
                letters.iter().collect::<String>()
            )));
        }
        let basis = OrthonormalBasis::product(
            letters
                .iter()
                .map(|&c| OrthonormalBasis::pauli(c))
                .collect::<Result<Vec<_>>>()?,
        )?;
        let dims = Dims::qubits(letters.len());
        let mut outcomes = Vec::with_capacity(basis.dim());
        for k in 0..basis.dim() {
            let digits = dims.digits(k);
            let label: String = digits.iter().map(|&d| if d == 0 { '+' } else { '-' }).collect();
            let sign = if digits.iter().sum::<usize>() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            let v = basis.vector(k);
            outcomes.push(MeasurementOutcome {
                label,
                value: Some(sign),
                projector: ComplexMatrix::outer(&v, &v),
            });
        }
        Ok(Self { outcomes })
    }

    pub fn outcomes(&self) -> &[MeasurementOutcome] {
        &self.outcomes
    }

    pub fn dim(&self) -> usize {
        self.outcomes[0].projector.rows()
    }

    pub fn labels(&self) -> Vec<String> {
        self.outcomes.iter().map(|o| o.label.clone()).collect()
    }

    /// Born-rule probabilities `Tr(rho P_k)`.
    pub fn distribution(&self, rho: &DensityMatrix) -> Result<Distribution> {
        if rho.dims().total() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "measurement of size {} against state with dims {}",
                self.dim(),
                rho.dims()
            )));
        }
        let mut entries = Vec::with_capacity(self.outcomes.len());
        for o in &self.outcomes {
            let p = rho.matrix().trace_product(&o.projector)?.re;
            if p < -tol::PSD_SLACK {
                return Err(Error::Positivity(format!(
                    "outcome `{}` has probability {p:e}",
                    o.label
                )));
            }
            entries.push(OutcomeProbability {
                label: o.label.clone(),
                value: o.value,
                probability: p.clamp(0.0, 1.0),
            });
        }
        Ok(Distribution { entries })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeProbability {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    pub probability: f64,
}

/// Outcome probabilities in measurement order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub entries: Vec<OutcomeProbability>,
}

impl Distribution {
    pub fn probability(&self, label: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.label == label)
            .map(|e| e.probability)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.probability).collect()
    }

    /// `sum_k value_k p_k`; `None` when some outcome has no numeric value.
    pub fn mean(&self) -> Option<f64> {
        self.entries
            .iter()
            .map(|e| e.value.map(|v| v * e.probability))
            .sum()
    }

    /// Multinomial draw of `shots` outcomes.
    pub fn sample<R: Rng + ?Sized>(&self, shots: u64, rng: &mut R) -> Counts {
        let probs = self.probabilities();
        let counts = multinomial(&probs, shots, rng);
        Counts {
            entries: self
                .entries
                .iter()
                .zip(counts)
                .map(|(e, count)| OutcomeCount {
                    label: e.label.clone(),
                    value: e.value,
                    count,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeCount {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    pub count: u64,
}

/// Sampled outcome counts in measurement order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    pub entries: Vec<OutcomeCount>,
}

impl Counts {
    pub fn total(&self) -> u64 {
        self.entries.iter().map(|e| e.count).sum()
    }

    pub fn count(&self, label: &str) -> Option<u64> {
        self.entries.iter().find(|e| e.label == label).map(|e| e.count)
    }

    pub fn counts(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.count).collect()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let total = self.total().max(1) as f64;
        self.entries.iter().map(|e| e.count as f64 / total).collect()
    }

    /// Empirical mean of the outcome values.
    pub fn mean(&self) -> Option<f64> {
        let total = self.total();
        if total == 0 {
            return None;
        }
        let s: Option<f64> = self
            .entries
            .iter()
            .map(|e| e.value.map(|v| v * e.count as f64))
            .sum();
        s.map(|s| s / total as f64)
    }

    /// Total-variation distance between the empirical frequencies.
    pub fn total_variation(&self, other: &Counts) -> f64 {
        0.5 * self
            .frequencies()
            .iter()
            .zip(other.frequencies())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }
}

/// Multinomial sample via successive conditional binomials.
fn multinomial<R: Rng + ?Sized>(probs: &[f64], shots: u64, rng: &mut R) -> Vec<u64> {
    let mut out = vec![0u64; probs.len()];
    let mut remaining = shots;
    let mut mass: f64 = probs.iter().sum();
    let last_positive = probs.iter().rposition(|&p| p > 0.0);
    for (k, &p) in probs.iter().enumerate() {
        if remaining == 0 || p <= 0.0 {
            continue;
        }
        if Some(k) == last_positive {
            out[k] = remaining;
            break;
        }
        let q = (p / mass).clamp(0.0, 1.0);
        let draw = Binomial::new(remaining, q)
            .expect("probability in [0, 1]")
            .sample(rng);
        out[k] = draw;
        remaining -= draw;
        mass -= p;
    }
    out
}

/// Born-rule distribution of the eigenvalues of `a` in state `rho`.
pub fn born_distribution(rho: &DensityMatrix, a: &Observable) -> Result<Distribution> {
    check_dims(rho, a)?;
    a.measurement()?.distribution(rho)
}

/// Samples `shots` outcomes of `measurement` on `rho` from stream `(seed, 0)`.
pub fn sample_outcomes(
    rho: &DensityMatrix,
    measurement: &ProjectiveMeasurement,
    shots: u64,
    seed: u64,
) -> Result<Counts> {
    sample_outcomes_stream(rho, measurement, shots, seed, 0)
}

/// As [`sample_outcomes`] with an explicit stream ordinal.
pub fn sample_outcomes_stream(
    rho: &DensityMatrix,
    measurement: &ProjectiveMeasurement,
    shots: u64,
    seed: u64,
    ordinal: u64,
) -> Result<Counts> {
    if shots == 0 {
        return Err(Error::InvalidConstraint("shots must be at least 1".into()));
    }
    let dist = measurement.distribution(rho)?;
    let mut rng = rng::stream(seed, ordinal);
    Ok(dist.sample(shots, &mut rng))
}

/// Outcome of the search for a product basis diagonalizing a set of
/// observables.
#[derive(Debug, Clone, PartialEq)]
pub enum BasisAnalysis {
    /// Every observable is diagonal in this basis of product vectors.
    ProductBasis(OrthonormalBasis),
    /// No such basis exists.
    NoProductBasis(String),
    /// The search could not decide.
    Unknown(String),
}

impl BasisAnalysis {
    pub fn kind(&self) -> &'static str {
        match self {
            BasisAnalysis::ProductBasis(_) => "product-basis",
            BasisAnalysis::NoProductBasis(_) => "no-product-basis",
            BasisAnalysis::Unknown(_) => "unknown",
        }
    }

    pub fn reason(&self) -> String {
        match self {
            BasisAnalysis::ProductBasis(b) if b.factors().is_some() => {
                "tensor product of local bases diagonalizes all observables".into()
            }
            BasisAnalysis::ProductBasis(_) => "joint eigenbasis consists of product vectors".into(),
            BasisAnalysis::NoProductBasis(r) | BasisAnalysis::Unknown(r) => r.clone(),
        }
    }
}

/// Orthonormal basis of a subspace, stored as columns.
type Subspace = Vec<Vec<C64>>;

/// Splits every subspace into eigenspaces of `a` restricted to it.
fn refine(subspaces: Vec<Subspace>, a: &ComplexMatrix, gap: f64) -> Result<Vec<Subspace>> {
    let mut out = Vec::new();
    for q in subspaces {
        if q.len() == 1 {
            out.push(q);
            continue;
        }
        let qm = ComplexMatrix::from_columns(&q)?;
        let restricted = (&(&qm.adjoint() * a) * &qm).hermitian_part();
        let eig = hermitian_eigs(&restricted)?;
        let mut start = 0;
        while start < q.len() {
            let mut end = start + 1;
            while end < q.len() && eig.values[end] - eig.values[end - 1] <= gap {
                end += 1;
            }
            let block: Subspace = (start..end)
                .map(|k| qm.matvec(&eig.vector(k)).expect("matching sizes"))
                .collect();
            out.push(block);
            start = end;
        }
    }
    Ok(out)
}

/// Decides whether some basis of product vectors diagonalizes every
/// observable on a bipartite space.
///
/// Non-commuting pairs rule a common basis out. Declared product bases (and
/// the computational product basis) are tried next. Otherwise the commuting
/// family is diagonalized jointly: an entangled vector spanning a
/// one-dimensional joint eigenspace rules a product basis out, a fully
/// non-degenerate product joint eigenbasis is returned, and any remaining
/// degeneracy yields `Unknown`.
pub fn common_product_eigenbasis(observables: &[Observable], dims: &Dims) -> Result<BasisAnalysis> {
    let n = dims.total();
    for a in observables {
        if a.dim() != n {
            return Err(Error::DimensionMismatch(format!(
                "observable `{}` of side {} for dims {dims}",
                a.label(),
                a.dim()
            )));
        }
    }
    for (i, a) in observables.iter().enumerate() {
        for b in &observables[i + 1..] {
            if !commutes(a, b, tol::STATE)? {
                return Ok(BasisAnalysis::NoProductBasis(format!(
                    "`{}` and `{}` do not commute",
                    a.label(),
                    b.label()
                )));
            }
        }
    }
    let (da, db) = match dims.ensure_bipartite() {
        Ok(d) => d,
        Err(_) => {
            return Ok(BasisAnalysis::Unknown(format!(
                "product-basis search needs a bipartite system, got dims {dims}"
            )))
        }
    };

    let mut candidates: Vec<OrthonormalBasis> = observables
        .iter()
        .filter_map(|a| a.declared_basis().filter(|b| b.is_product()).cloned())
        .collect();
    candidates.push(OrthonormalBasis::computational_product(dims));
    for basis in candidates {
        if observables
            .iter()
            .all(|a| basis.diagonalizes(a.matrix(), tol::STATE))
        {
            return Ok(BasisAnalysis::ProductBasis(basis));
        }
    }

    let mut subspaces: Vec<Subspace> = vec![(0..n)
        .map(|k| {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[k] = C64::new(1.0, 0.0);
            e
        })
        .collect()];
    for a in observables {
        let eig = hermitian_eigs(a.matrix())?;
        let width = eig.max_value() - eig.min_value();
        let gap = (tol::DEGENERATE * width).max(1e-12);
        subspaces = refine(subspaces, a.matrix(), gap)?;
    }

    const SCHMIDT_TOL: f64 = 1e-7;
    for q in subspaces.iter().filter(|q| q.len() == 1) {
        let second = second_schmidt_coefficient(&q[0], da, db)?;
        if second > SCHMIDT_TOL {
            return Ok(BasisAnalysis::NoProductBasis(format!(
                "a non-degenerate joint eigenvector is entangled (second Schmidt coefficient {second:.3e})"
            )));
        }
    }
    if let Some(q) = subspaces.iter().find(|q| q.len() > 1) {
        return Ok(BasisAnalysis::Unknown(format!(
            "joint eigenspace of dimension {} left undecided",
            q.len()
        )));
    }
    let columns: Vec<Vec<C64>> = subspaces.into_iter().map(|mut q| q.remove(0)).collect();
    let basis =
        OrthonormalBasis::with_product_vectors(ComplexMatrix::from_columns(&columns)?, dims, SCHMIDT_TOL)?;
    Ok(BasisAnalysis::ProductBasis(basis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{cat_mixed, cat_pure, phi_plus, pure_density, StateVector};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn obs(s: &str) -> Observable {
        Observable::pauli(s).unwrap()
    }

    #[test]
    fn pauli_parsing() {
        let zz = obs("zz");
        assert_eq!(zz.label(), "ZZ");
        assert_eq!(
            zz.matrix(),
            &ComplexMatrix::from_real_diag(&[1.0, -1.0, -1.0, 1.0])
        );
        assert!(zz.declared_basis().unwrap().is_product());
        assert!(Observable::pauli("ZQ").is_err());
        assert!(Observable::pauli("").is_err());
    }

    #[test]
    fn non_hermitian_observable_rejected() {
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(
            Observable::new(m, "bad"),
            Err(Error::InvalidObservable(_))
        ));
    }

    #[test]
    fn declared_basis_must_diagonalize() {
        let x = Observable::new(pauli_matrix('X').unwrap(), "X").unwrap();
        assert!(x
            .clone()
            .with_eigenbasis(OrthonormalBasis::computational(2))
            .is_err());
        assert!(x.with_eigenbasis(OrthonormalBasis::pauli('X').unwrap()).is_ok());
    }

    #[test]
    fn expectations_on_cat_states() {
        // Diagonal pairing: (1/2)(+1) + (1/2)(+1).
        assert!((expectation(&cat_mixed(), &obs("ZZ")).unwrap() - 1.0).abs() < 1e-15);
        // Cross terms of (|00>+|11>)/sqrt2 under XX: <00|XX|11> = 1, twice, times 1/2.
        let pure = pure_density(&cat_pure(0.0)).unwrap();
        assert!((expectation(&pure, &obs("XX")).unwrap() - 1.0).abs() < 1e-15);
        // XX has zero diagonal.
        assert!(expectation(&cat_mixed(), &obs("XX")).unwrap().abs() < 1e-15);
        assert!(matches!(
            expectation(&cat_mixed(), &obs("Z")),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn commutation() {
        assert!(commutes(&obs("ZI"), &obs("IZ"), 1e-12).unwrap());
        let c = commutator(&obs("Z"), &obs("X")).unwrap();
        let two_i_y = pauli_matrix('Y').unwrap().scale(C64::new(0.0, 2.0));
        assert!(c.max_abs_diff(&two_i_y) < 1e-15);
        assert!(!commutes(&obs("Z"), &obs("X"), 1e-12).unwrap());
        let d1 = Observable::new(ComplexMatrix::from_real_diag(&[1.0, 2.0, 3.0]), "d1").unwrap();
        let d2 = Observable::new(ComplexMatrix::from_real_diag(&[5.0, -1.0, 0.0]), "d2").unwrap();
        assert!(commutes(&d1, &d2, 0.0).unwrap());
        assert!(commutator(&obs("Z"), &obs("ZZ")).is_err());
    }

    #[test]
    fn spectral_projectors_of_paulis() {
        let z = spectral_projectors(&obs("Z")).unwrap();
        assert_eq!(z.len(), 2);
        assert_eq!(z[0].outcome, 1.0);
        assert_eq!(z[0].projector, ComplexMatrix::from_real_diag(&[1.0, 0.0]));
        assert_eq!(z[1].outcome, -1.0);

        let zz = spectral_projectors(&obs("ZZ")).unwrap();
        assert_eq!(zz.len(), 2);
        assert_eq!(zz[0].rank, 2);
        assert!(
            zz[0]
                .projector
                .max_abs_diff(&ComplexMatrix::from_real_diag(&[1.0, 0.0, 0.0, 1.0]))
                < 1e-15
        );

        let id = spectral_projectors(&obs("II")).unwrap();
        assert_eq!(id.len(), 1);
        assert_eq!(id[0].outcome, 1.0);
        assert_eq!(id[0].projector, ComplexMatrix::identity(4));
    }

    #[test]
    fn born_distributions() {
        for phi in [0.0, 1.0, 3.0] {
            let rho = pure_density(&cat_pure(phi)).unwrap();
            let d = born_distribution(&rho, &obs("ZZ")).unwrap();
            assert_eq!(d.probability("+1"), Some(1.0));
            let four = ProjectiveMeasurement::computational(&Dims::two_qubits())
                .distribution(&rho)
                .unwrap();
            let p = four.probabilities();
            assert!((p[0] - 0.5).abs() < 1e-15 && (p[3] - 0.5).abs() < 1e-15);
            assert_eq!(p[1], 0.0);
            assert_eq!(p[2], 0.0);
        }
        let basis00 = pure_density(&StateVector::basis(0, Dims::two_qubits()).unwrap()).unwrap();
        assert_eq!(
            born_distribution(&basis00, &obs("ZZ")).unwrap().probability("+1"),
            Some(1.0)
        );
        // Phi+ = (|++> + |-->)/sqrt2.
        let xx = ProjectiveMeasurement::pauli_product("XX").unwrap();
        let d = xx.distribution(&pure_density(&phi_plus()).unwrap()).unwrap();
        assert!((d.probability("++").unwrap() - 0.5).abs() < 1e-15);
        assert!((d.probability("--").unwrap() - 0.5).abs() < 1e-15);
        assert!(d.probability("+-").unwrap() < 1e-15);
    }

    #[test]
    fn deterministic_sampling() {
        let rho = pure_density(&StateVector::basis(0, Dims::two_qubits()).unwrap()).unwrap();
        let m = obs("ZZ").measurement().unwrap();
        let c = sample_outcomes(&rho, &m, 1234, 5).unwrap();
        assert_eq!(c.count("+1"), Some(1234));
        assert_eq!(c.count("-1"), Some(0));

        let four = ProjectiveMeasurement::computational(&Dims::two_qubits());
        let a = sample_outcomes(&cat_mixed(), &four, 10_000, 42).unwrap();
        let b = sample_outcomes(&cat_mixed(), &four, 10_000, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.total(), 10_000);
        assert!(sample_outcomes(&cat_mixed(), &four, 0, 1).is_err());
    }

    #[test]
    fn million_shots_within_three_sigma() {
        let four = ProjectiveMeasurement::computational(&Dims::two_qubits());
        let c = sample_outcomes(&cat_mixed(), &four, 1_000_000, 9).unwrap();
        let n00 = c.count("00").unwrap() as f64;
        let n11 = c.count("11").unwrap() as f64;
        assert!((n00 - 500_000.0).abs() < 1500.0);
        assert!((n11 - 500_000.0).abs() < 1500.0);
        assert_eq!(c.count("01"), Some(0));
        assert_eq!(c.count("10"), Some(0));
    }

    #[test]
    fn product_basis_from_declarations() {
        let dims = Dims::two_qubits();
        let r = common_product_eigenbasis(&[obs("ZZ")], &dims).unwrap();
        match r {
            BasisAnalysis::ProductBasis(b) => assert_eq!(b.vectors(), &ComplexMatrix::identity(4)),
            other => panic!("unexpected {other:?}"),
        }
        let r = common_product_eigenbasis(&[obs("ZI"), obs("IZ"), obs("ZZ")], &dims).unwrap();
        assert!(matches!(r, BasisAnalysis::ProductBasis(_)));
        let r = common_product_eigenbasis(&[], &dims).unwrap();
        assert!(matches!(r, BasisAnalysis::ProductBasis(_)));
    }

    #[test]
    fn bell_family_has_no_product_basis() {
        let dims = Dims::two_qubits();
        assert!(commutes(&obs("ZZ"), &obs("XX"), 1e-12).unwrap());
        let r = common_product_eigenbasis(&[obs("ZZ"), obs("XX")], &dims).unwrap();
        assert!(matches!(r, BasisAnalysis::NoProductBasis(_)), "{r:?}");
    }

    #[test]
    fn non_commuting_pair_has_no_product_basis() {
        let r = common_product_eigenbasis(&[obs("ZI"), obs("XI")], &Dims::two_qubits()).unwrap();
        assert!(matches!(r, BasisAnalysis::NoProductBasis(_)));
    }

    #[test]
    fn bell_projector_is_decided_by_its_nondegenerate_vector() {
        let h = FRAC_1_SQRT_2;
        let v = vec![
            C64::new(h, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(h, 0.0),
        ];
        let p = Observable::projector(&v, "Phi+").unwrap();
        let r = common_product_eigenbasis(&[p], &Dims::two_qubits()).unwrap();
        assert!(matches!(r, BasisAnalysis::NoProductBasis(_)), "{r:?}");
    }

    #[test]
    fn undeclared_product_family_found_by_joint_diagonalization() {
        // X on A and Z on B given as bare matrices, non-degenerate jointly.
        let xz = Observable::new(obs("XZ").matrix().clone(), "xz").unwrap();
        let xi = Observable::new(obs("XI").matrix().clone(), "xi").unwrap();
        let iz = Observable::new(obs("IZ").matrix().clone(), "iz").unwrap();
        let r = common_product_eigenbasis(&[xi, iz, xz], &Dims::two_qubits()).unwrap();
        match r {
            BasisAnalysis::ProductBasis(b) => assert!(b.is_product()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn degenerate_undeclared_family_is_unknown() {
        let xx = Observable::new(obs("XX").matrix().clone(), "xx").unwrap();
        let r = common_product_eigenbasis(&[xx], &Dims::two_qubits()).unwrap();
        assert!(matches!(r, BasisAnalysis::Unknown(_)), "{r:?}");
        let r = common_product_eigenbasis(&[obs("ZZZ")], &Dims::qubits(3)).unwrap();
        assert!(matches!(r, BasisAnalysis::Unknown(_)));
    }
}

//! Compatible-state analysis: which density matrices reproduce the measured
//! expectation values, and how entangled can they be.

mod constraints;
mod optimizer;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use constraints::{
    cat_constraints, pauli_tomography_constraints, two_qubit_pauli_labels, Constraint, ConstraintSet,
};
pub use optimizer::{Execution, NegativityBound, OptimizerOptions, RestartSummary, MAX_OPTIMIZER_DIM};

use crate::entanglement::negativity;
use crate::error::{Error, Result};
use crate::observables::{common_product_eigenbasis, BasisAnalysis};
use crate::state::{DensityMatrix, OrthonormalBasis};
use crate::tensor::{ComplexMatrix, Dims, C64};
use crate::tol;
use optimizer::{optimize, Sense};

/// `diag(1/2, 0, 0, 1/2)` with coherence `x` in the lower-left corner.
///
/// Positivity reduces to the corner minor `1/4 - |x|^2 >= 0`.
pub fn cat_family(x: C64) -> Result<DensityMatrix> {
    if !(x.re.is_finite() && x.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    if x.norm() > 0.5 + 1e-12 {
        return Err(Error::Positivity(format!(
            "|x| = {} exceeds 1/2; the corner minor 1/4 - |x|^2 is negative",
            x.norm()
        )));
    }
    let mut m = ComplexMatrix::from_real_diag(&[0.5, 0.0, 0.0, 0.5]);
    m[(3, 0)] = x;
    m[(0, 3)] = x.conj();
    DensityMatrix::new(m, Dims::two_qubits())
}

/// Entries of a density matrix that positivity forces to vanish given its
/// diagonal, split from those left free.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForcedZeros {
    /// Off-diagonal `(row, col)` positions, 0-based, forced to zero.
    pub forced: BTreeSet<(usize, usize)>,
    /// Off-diagonal positions left unconstrained by the diagonal.
    pub free: BTreeSet<(usize, usize)>,
}

impl ForcedZeros {
    /// True when the diagonal determines the whole matrix.
    pub fn fully_determined(&self) -> bool {
        self.free.is_empty()
    }
}

/// A zero diagonal entry forces its whole row and column to zero, since
/// every 2x2 principal minor `a_ii a_jj - |a_ij|^2` must be non-negative.
pub fn forced_zeros(diagonal: &[f64]) -> Result<ForcedZeros> {
    if diagonal.is_empty() {
        return Err(Error::InvalidWeights("empty diagonal".into()));
    }
    if diagonal.iter().any(|p| !p.is_finite() || *p < -tol::STATE) {
        return Err(Error::InvalidWeights(format!(
            "diagonal entries must be non-negative, got {diagonal:?}"
        )));
    }
    let total: f64 = diagonal.iter().sum();
    if (total - 1.0).abs() > tol::STATE {
        return Err(Error::InvalidWeights(format!("diagonal sums to {total}, not 1")));
    }
    let zero = |i: usize| diagonal[i] <= tol::STATE;
    let n = diagonal.len();
    let mut out = ForcedZeros {
        forced: BTreeSet::new(),
        free: BTreeSet::new(),
    };
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if zero(i) || zero(j) {
                out.forced.insert((i, j));
            } else {
                out.free.insert((i, j));
            }
        }
    }
    Ok(out)
}

/// Smallest negativity over compatible states, as found by the optimizer.
/// The value is an upper bound on the true minimum.
pub fn min_negativity(cs: &ConstraintSet, opts: &OptimizerOptions) -> Result<NegativityBound> {
    optimize(cs, opts, Sense::Minimize)
}

/// Largest negativity over compatible states; a lower bound on the true
/// maximum.
pub fn max_negativity(cs: &ConstraintSet, opts: &OptimizerOptions) -> Result<NegativityBound> {
    optimize(cs, opts, Sense::Maximize)
}

const SIMPLEX_ITERATIONS: usize = 50_000;

/// Probability vector on the basis minimizing the squared constraint
/// violations, by accelerated projected gradient from the uniform point.
fn diagonal_feasibility(cs: &ConstraintSet, basis: &OrthonormalBasis) -> Result<Vec<f64>> {
    let n = basis.dim();
    let rows: Vec<(Vec<f64>, f64, f64)> = cs
        .constraints()
        .iter()
        .map(|c| {
            let diag = basis.diagonal_of(c.observable().matrix())?;
            Ok((diag.iter().map(|z| z.re).collect(), c.value(), c.tolerance()))
        })
        .collect::<Result<_>>()?;
    let lipschitz: f64 = 2.0
        * rows
            .iter()
            .map(|(r, _, _)| r.iter().map(|v| v * v).sum::<f64>())
            .sum::<f64>();
    let uniform = vec![1.0 / n as f64; n];
    if lipschitz == 0.0 {
        return Ok(uniform);
    }
    let gradient = |p: &[f64]| -> (Vec<f64>, f64) {
        let mut g = vec![0.0; n];
        let mut worst = 0.0f64;
        for (row, value, tolerance) in &rows {
            let e: f64 = row.iter().zip(p).map(|(a, b)| a * b).sum();
            let d = e - value;
            let v = (d.abs() - tolerance).max(0.0);
            worst = worst.max(v);
            if v > 0.0 {
                let s = 2.0 * v * d.signum();
                for (gk, a) in g.iter_mut().zip(row) {
                    *gk += s * a;
                }
            }
        }
        (g, worst)
    };
    let step = 1.0 / lipschitz;
    let mut p = uniform.clone();
    let mut y = uniform;
    let mut t = 1.0f64;
    for _ in 0..SIMPLEX_ITERATIONS {
        let (_, worst) = gradient(&p);
        if worst <= 1e-15 {
            break;
        }
        let (gy, _) = gradient(&y);
        let stepped: Vec<f64> = y.iter().zip(&gy).map(|(v, d)| v - step * d).collect();
        let next = crate::state::project_to_simplex(&stepped);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let momentum = (t - 1.0) / t_next;
        y = next.iter().zip(&p).map(|(a, b)| a + momentum * (a - b)).collect();
        p = next;
        t = t_next;
    }
    Ok(p)
}

/// Separable state reproducing the data, when a product basis diagonalizes
/// every constrained observable.
///
/// Feasibility is solved over mixtures of the basis vectors, which are
/// separable by construction. Returns `None` without such a basis or when
/// the diagonal search stalls between the certificate and infeasibility
/// thresholds.
pub fn classical_certificate(cs: &ConstraintSet) -> Result<Option<DensityMatrix>> {
    let analysis = common_product_eigenbasis(&cs.observables(), cs.dims())?;
    certificate_from(cs, &analysis)
}

fn certificate_from(cs: &ConstraintSet, analysis: &BasisAnalysis) -> Result<Option<DensityMatrix>> {
    let BasisAnalysis::ProductBasis(basis) = analysis else {
        return Ok(None);
    };
    let p = diagonal_feasibility(cs, basis)?;
    let m = basis.diagonal_operator(&p).hermitian_part();
    let residual = cs.residual(&m);
    if residual > tol::INFEASIBLE {
        return Err(Error::Infeasible { residual });
    }
    if residual > tol::CERTIFICATE {
        return Ok(None);
    }
    Ok(Some(DensityMatrix::new(m, cs.dims().clone())?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    EvidenceOfEntanglement,
    NoEvidence,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::EvidenceOfEntanglement => "EvidenceOfEntanglement",
            Verdict::NoEvidence => "NoEvidence",
            Verdict::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceVerdict {
    pub verdict: Verdict,
    pub min_negativity: NegativityBound,
    pub max_negativity: NegativityBound,
    pub certificate: Option<DensityMatrix>,
    pub basis: BasisAnalysis,
    pub reason: String,
}

impl EvidenceVerdict {
    pub fn restarts(&self) -> usize {
        self.min_negativity.restarts.len()
    }
}

/// Decides whether every state compatible with `cs` is entangled.
pub fn assess(cs: &ConstraintSet, opts: &OptimizerOptions) -> Result<EvidenceVerdict> {
    let basis = common_product_eigenbasis(&cs.observables(), cs.dims())?;
    let mut certificate = certificate_from(cs, &basis)?;
    let mut min = min_negativity(cs, opts)?;
    let max = max_negativity(cs, opts)?;

    if let Some(cert) = &certificate {
        // The certificate is itself a feasible point of the minimization.
        let residual = cs.residual(cert.matrix());
        let value = negativity(cert, cs.dims())?;
        if value < min.value {
            min.value = value;
            min.residual = residual;
            min.witness = cert.clone();
        }
    }

    let feasible = min.residual <= tol::FEASIBLE;
    let (verdict, reason) = if certificate.is_some() {
        (
            Verdict::NoEvidence,
            "a separable state diagonal in a product basis reproduces the data".to_string(),
        )
    } else if feasible && min.value <= tol::OPT_NEGATIVITY {
        if negativity(&min.witness, cs.dims())? < 1e-9
            && cs.residual(min.witness.matrix()) <= tol::CERTIFICATE
        {
            certificate = Some(min.witness.clone());
        }
        (
            Verdict::NoEvidence,
            format!("a compatible state with negativity {:.3e} was found", min.value),
        )
    } else if feasible
        && min.value > tol::OPT_NEGATIVITY
        && min
            .restarts
            .iter()
            .all(|r| r.negativity > 10.0 * tol::OPT_NEGATIVITY)
    {
        (
            Verdict::EvidenceOfEntanglement,
            format!(
                "every restart ended above {:.0e}; smallest compatible negativity found {:.6}",
                10.0 * tol::OPT_NEGATIVITY,
                min.value
            ),
        )
    } else if !feasible {
        (
            Verdict::Inconclusive,
            format!(
                "best witness residual {:.3e} exceeds {:.0e}",
                min.residual,
                tol::FEASIBLE
            ),
        )
    } else {
        (
            Verdict::Inconclusive,
            format!(
                "minimum negativity {:.3e} is positive but some restart ended near zero",
                min.value
            ),
        )
    };

    Ok(EvidenceVerdict {
        verdict,
        min_negativity: min,
        max_negativity: max,
        certificate,
        basis,
        reason,
    })
}

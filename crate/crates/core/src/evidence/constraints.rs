use crate::error::{Error, Result};
use crate::observables::{expectation, Observable};
use crate::state::DensityMatrix;
use crate::tensor::{ComplexMatrix, Dims};

/// A measured expectation value with its tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    observable: Observable,
    value: f64,
    tolerance: f64,
}

impl Constraint {
    /// Rejects negative tolerances and values outside the observable's
    /// spectral range widened by the tolerance.
    pub fn new(observable: Observable, value: f64, tolerance: f64) -> Result<Self> {
        if !tolerance.is_finite() || tolerance < 0.0 {
            return Err(Error::InvalidConstraint(format!(
                "tolerance {tolerance} on `{}` must be a non-negative number",
                observable.label()
            )));
        }
        if !value.is_finite() {
            return Err(Error::InvalidConstraint(format!(
                "value for `{}` is not finite",
                observable.label()
            )));
        }
        let (lo, hi) = observable.spectral_range()?;
        let slack = tolerance + 1e-9;
        if value < lo - slack || value > hi + slack {
            return Err(Error::InvalidConstraint(format!(
                "value {value} for `{}` outside its spectral range [{lo}, {hi}]",
                observable.label()
            )));
        }
        Ok(Self {
            observable,
            value,
            tolerance,
        })
    }

    pub fn observable(&self) -> &Observable {
        &self.observable
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// `max(0, |Tr(rho A) - a| - tolerance)` for a raw operator.
    pub fn violation(&self, rho: &ComplexMatrix) -> f64 {
        let e = rho
            .trace_product(self.observable.matrix())
            .map(|z| z.re)
            .unwrap_or(f64::INFINITY);
        ((e - self.value).abs() - self.tolerance).max(0.0)
    }
}

/// Measured statistics on a system with fixed subsystem dims.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSet {
    dims: Dims,
    constraints: Vec<Constraint>,
}

impl ConstraintSet {
    pub fn new(dims: Dims) -> Self {
        Self {
            dims,
            constraints: Vec::new(),
        }
    }

    pub fn push(&mut self, c: Constraint) -> Result<()> {
        if c.observable.dim() != self.dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "observable `{}` of side {} for dims {}",
                c.observable.label(),
                c.observable.dim(),
                self.dims
            )));
        }
        self.constraints.push(c);
        Ok(())
    }

    /// Builder form of [`push`](Self::push).
    pub fn with(mut self, observable: Observable, value: f64, tolerance: f64) -> Result<Self> {
        self.push(Constraint::new(observable, value, tolerance)?)?;
        Ok(self)
    }

    /// Pauli-string constraint.
    pub fn with_pauli(self, pauli: &str, value: f64, tolerance: f64) -> Result<Self> {
        self.with(Observable::pauli(pauli)?, value, tolerance)
    }

    /// Constraints reproducing the exact expectations of `rho`.
    pub fn from_state(rho: &DensityMatrix, observables: Vec<Observable>, tolerance: f64) -> Result<Self> {
        let mut cs = Self::new(rho.dims().clone());
        for a in observables {
            let v = expectation(rho, &a)?;
            cs.push(Constraint::new(a, v, tolerance)?)?;
        }
        Ok(cs)
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn observables(&self) -> Vec<Observable> {
        self.constraints.iter().map(|c| c.observable.clone()).collect()
    }

    /// Largest constraint violation.
    pub fn residual(&self, rho: &ComplexMatrix) -> f64 {
        self.constraints
            .iter()
            .map(|c| c.violation(rho))
            .fold(0.0, f64::max)
    }

    /// Sum of squared violations.
    pub fn penalty(&self, rho: &ComplexMatrix) -> f64 {
        self.constraints.iter().map(|c| c.violation(rho).powi(2)).sum()
    }
}

/// The cat-nucleus statistics: `<ZZ> = 1`, `<ZI> = 0`, `<IZ> = 0`, exact.
pub fn cat_constraints() -> ConstraintSet {
    ConstraintSet::new(Dims::two_qubits())
        .with_pauli("ZZ", 1.0, 0.0)
        .and_then(|cs| cs.with_pauli("ZI", 0.0, 0.0))
        .and_then(|cs| cs.with_pauli("IZ", 0.0, 0.0))
        .expect("valid built-in constraints")
}

/// The 15 non-identity two-qubit Pauli strings, `IX` through `ZZ`.
pub fn two_qubit_pauli_labels() -> Vec<String> {
    let letters = ['I', 'X', 'Y', 'Z'];
    letters
        .iter()
        .flat_map(|a| letters.iter().map(move |b| format!("{a}{b}")))
        .filter(|s| s != "II")
        .collect()
}

/// Full Pauli tomography data of a two-qubit state.
pub fn pauli_tomography_constraints(rho: &DensityMatrix, tolerance: f64) -> Result<ConstraintSet> {
    if rho.dims().as_slice() != [2, 2] {
        return Err(Error::UnsupportedDims(format!(
            "Pauli tomography constraints need two qubits, got {}",
            rho.dims()
        )));
    }
    let observables = two_qubit_pauli_labels()
        .iter()
        .map(|s| Observable::pauli(s))
        .collect::<Result<Vec<_>>>()?;
    ConstraintSet::from_state(rho, observables, tolerance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{cat_mixed, phi_plus, pure_density};

    #[test]
    fn constraint_validation() {
        assert!(Constraint::new(Observable::pauli("Z").unwrap(), 0.5, -0.1).is_err());
        assert!(Constraint::new(Observable::pauli("Z").unwrap(), 1.5, 0.0).is_err());
        assert!(Constraint::new(Observable::pauli("Z").unwrap(), 1.5, 0.6).is_ok());
        assert!(Constraint::new(Observable::pauli("Z").unwrap(), f64::NAN, 0.0).is_err());
        let mut cs = ConstraintSet::new(Dims::two_qubits());
        let c = Constraint::new(Observable::pauli("Z").unwrap(), 0.0, 0.0).unwrap();
        assert!(matches!(cs.push(c), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn cat_constraints_fit_cat_mixed() {
        let cs = cat_constraints();
        assert_eq!(cs.len(), 3);
        assert_eq!(cs.residual(cat_mixed().matrix()), 0.0);
        let maximally_mixed = crate::state::DensityMatrix::maximally_mixed(Dims::two_qubits());
        assert!((cs.residual(maximally_mixed.matrix()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tolerance_band_has_no_penalty() {
        let cs = ConstraintSet::new(Dims::two_qubits())
            .with_pauli("ZZ", 0.9, 0.2)
            .unwrap();
        assert_eq!(cs.penalty(cat_mixed().matrix()), 0.0);
    }

    #[test]
    fn full_tomography_has_fifteen_constraints() {
        let labels = two_qubit_pauli_labels();
        assert_eq!(labels.len(), 15);
        let cs = pauli_tomography_constraints(&pure_density(&phi_plus()).unwrap(), 0.0).unwrap();
        assert_eq!(cs.len(), 15);
        let value = |l: &str| {
            cs.constraints()
                .iter()
                .find(|c| c.observable().label() == l)
                .unwrap()
                .value()
        };
        assert!((value("XX") - 1.0).abs() < 1e-15);
        assert!((value("YY") + 1.0).abs() < 1e-15);
        assert!((value("ZZ") - 1.0).abs() < 1e-15);
        assert!(value("XI").abs() < 1e-15);
    }
}

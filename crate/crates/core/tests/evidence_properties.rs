mod common;

use common::{c, oracle_negativity_2x2};
use proptest::prelude::*;
use proptest::sample::subsequence;
use qevidence::entanglement::{negativity, random_separable};
use qevidence::evidence::{
    assess, cat_family, classical_certificate, max_negativity, min_negativity, pauli_tomography_constraints,
    two_qubit_pauli_labels, ConstraintSet, OptimizerOptions, Verdict,
};
use qevidence::observables::{expectation, Observable};
use qevidence::rng;
use qevidence::state::{mix, pure_density, DensityMatrix, StateVector};
use qevidence::tensor::Dims;

fn opts(restarts: usize, seed: u64) -> OptimizerOptions {
    OptimizerOptions {
        restarts,
        seed,
        ..Default::default()
    }
}

fn haar_density(seed: u64) -> DensityMatrix {
    let mut r = rng::stream(seed, 0);
    pure_density(&StateVector::new(rng::random_unit_vector(&mut r, 4), Dims::two_qubits()).unwrap()).unwrap()
}

fn constraints_of(rho: &DensityMatrix, labels: &[String], tolerance: f64) -> ConstraintSet {
    let mut cs = ConstraintSet::new(Dims::two_qubits());
    for l in labels {
        let a = Observable::pauli(l).unwrap();
        let v = expectation(rho, &a).unwrap();
        cs = cs.with(a, v, tolerance).unwrap();
    }
    cs
}

/// Random classical mixture of computational product states.
fn classical_state(weights: &[f64]) -> DensityMatrix {
    let total: f64 = weights.iter().sum();
    let dims = Dims::two_qubits();
    let basis: Vec<DensityMatrix> = (0..4)
        .map(|k| {
            let mut v = vec![c(0.0, 0.0); 4];
            v[k] = c(1.0, 0.0);
            pure_density(&StateVector::new(v, dims.clone()).unwrap()).unwrap()
        })
        .collect();
    let parts: Vec<(f64, &DensityMatrix)> = weights.iter().map(|w| w / total).zip(basis.iter()).collect();
    mix(&parts).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn certificates_are_sound(weights in proptest::collection::vec(0.0..1.0f64, 4), tolerance in 0.0..1e-3) {
        prop_assume!(weights.iter().sum::<f64>() > 0.1);
        let rho = classical_state(&weights);
        let labels: Vec<String> = ["ZZ", "ZI", "IZ"].iter().map(|s| s.to_string()).collect();
        let cs = constraints_of(&rho, &labels, tolerance);
        let cert = classical_certificate(&cs).unwrap();
        prop_assert!(cert.is_some());
        let cert = cert.unwrap();
        for con in cs.constraints() {
            let got = expectation(&cert, con.observable()).unwrap();
            prop_assert!((got - con.value()).abs() <= con.tolerance() + 1e-7);
        }
        prop_assert!(negativity(&cert, cs.dims()).unwrap() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn bounds_sandwich_and_witnesses_are_feasible(
        seed in any::<u64>(),
        entangled in any::<bool>(),
        labels in subsequence(two_qubit_pauli_labels(), 2..=5),
        restarts in 2usize..=4,
    ) {
        let rho = if entangled { haar_density(seed) } else { random_separable(&Dims::two_qubits(), 3, seed).unwrap() };
        let cs = constraints_of(&rho, &labels, 1e-4);
        let o = opts(restarts, seed);
        let lo = min_negativity(&cs, &o).unwrap();
        let hi = max_negativity(&cs, &o).unwrap();
        prop_assert!(lo.value <= hi.value + 1e-6, "min {} max {}", lo.value, hi.value);
        prop_assert!(lo.residual <= 1e-6 && cs.residual(lo.witness.matrix()) <= 1e-6);
        prop_assert!(hi.residual <= 1e-6 && cs.residual(hi.witness.matrix()) <= 1e-6);
        let v = assess(&cs, &o).unwrap();
        if let Some(cert) = &v.certificate {
            prop_assert_eq!(v.verdict, Verdict::NoEvidence);
            prop_assert!(cs.residual(cert.matrix()) <= 1e-7);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3))]

    #[test]
    fn full_tomography_pins_negativity(seed in any::<u64>()) {
        let rho = haar_density(seed);
        let cs = pauli_tomography_constraints(&rho, 0.0).unwrap();
        let lo = min_negativity(&cs, &opts(2, seed)).unwrap();
        let truth = oracle_negativity_2x2(rho.matrix());
        prop_assert!((lo.value - truth).abs() < 1e-4, "min {} true {}", lo.value, truth);
    }
}

#[test]
fn cat_family_sweep() {
    let dims = Dims::two_qubits();
    let mut previous = -1.0;
    for k in 0..=20 {
        let x = 0.5 * k as f64 / 20.0;
        let rho = cat_family(c(x, 0.0)).unwrap();
        let n = negativity(&rho, &dims).unwrap();
        assert!((n - x).abs() < 1e-9, "x {x} negativity {n}");
        assert!((n - oracle_negativity_2x2(rho.matrix())).abs() < 1e-9);
        assert!(n > previous);
        previous = n;
    }
}

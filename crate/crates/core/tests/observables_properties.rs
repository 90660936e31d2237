use proptest::prelude::*;
use qevidence::experiments::cat_measurement;
use qevidence::observables::{
    born_distribution, common_product_eigenbasis, commutes, expectation, sample_outcomes, BasisAnalysis,
    Observable,
};
use qevidence::rng;
use qevidence::state::{cat_pure, pure_density, DensityMatrix, StateVector};
use qevidence::tensor::{ComplexMatrix, Dims};

fn random_observable(seed: u64) -> Observable {
    let mut r = rng::stream(seed, 0);
    Observable::new(rng::random_hermitian(&mut r, 4), "H").unwrap()
}

fn random_state(seed: u64) -> DensityMatrix {
    let mut r = rng::stream(seed, 1);
    pure_density(&StateVector::new(rng::random_unit_vector(&mut r, 4), Dims::two_qubits()).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn spectral_projectors_resolve_identity(seed in any::<u64>()) {
        let a = random_observable(seed);
        let ps = a.spectral_projectors().unwrap();
        let mut sum = ComplexMatrix::zeros(4, 4);
        let mut rebuilt = ComplexMatrix::zeros(4, 4);
        for p in ps {
            sum = &sum + &p.projector;
            rebuilt = &rebuilt + &p.projector.scale_real(p.outcome);
        }
        prop_assert!(sum.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-9);
        prop_assert!(rebuilt.max_abs_diff(a.matrix()) < 1e-9);
        for (j, pj) in ps.iter().enumerate() {
            for (k, pk) in ps.iter().enumerate() {
                let prod = pj.projector.matmul(&pk.projector).unwrap();
                let want = if j == k { pj.projector.clone() } else { ComplexMatrix::zeros(4, 4) };
                prop_assert!(prod.max_abs_diff(&want) < 1e-9);
            }
        }
    }

    #[test]
    fn born_mean_matches_expectation(seed in any::<u64>()) {
        let a = random_observable(seed);
        let rho = random_state(seed);
        let d = born_distribution(&rho, &a).unwrap();
        prop_assert!((d.mean().unwrap() - expectation(&rho, &a).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn non_commuting_pairs_have_no_product_basis(seed in any::<u64>()) {
        let a = random_observable(seed);
        let b = random_observable(seed.wrapping_add(1));
        prop_assume!(!commutes(&a, &b, 1e-9).unwrap());
        let r = common_product_eigenbasis(&[a, b], &Dims::two_qubits()).unwrap();
        prop_assert!(matches!(r, BasisAnalysis::NoProductBasis(_)));
    }
}

#[test]
fn cat_frequencies_converge() {
    let shots = 1_000_000u64;
    let rho = pure_density(&cat_pure(0.0)).unwrap();
    let m = cat_measurement();
    let probs = m.distribution(&rho).unwrap().probabilities();
    let freqs = sample_outcomes(&rho, &m, shots, 5).unwrap().frequencies();
    for (p, f) in probs.iter().zip(&freqs) {
        let bound = 5.0 * (p * (1.0 - p) / shots as f64).sqrt();
        assert!((f - p).abs() <= bound, "freq {f} prob {p}");
    }
}

#[test]
fn pauli_pairs_that_anticommute_locally() {
    let xz = Observable::pauli("XI").unwrap();
    let zz = Observable::pauli("ZI").unwrap();
    assert!(!commutes(&xz, &zz, 1e-9).unwrap());
    assert!(matches!(
        common_product_eigenbasis(&[xz, zz], &Dims::two_qubits()).unwrap(),
        BasisAnalysis::NoProductBasis(_)
    ));
}

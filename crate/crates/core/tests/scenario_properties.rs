use proptest::prelude::*;
use qevidence::evidence::OptimizerOptions;
use qevidence::experiments::{
    ghz_reduction, pauli_settings, simulate_cat_experiment, tomography_two_qubit, CatVariant, TomographyMode,
};
use qevidence::rng;
use qevidence::scenario::{builtin, builtin_names, run_scenario, RunOptions};
use qevidence::state::{ghz, mix, pure_density, DensityMatrix, StateVector};
use qevidence::tensor::Dims;

fn quick(seed: Option<u64>) -> RunOptions {
    RunOptions {
        seed,
        optimizer: OptimizerOptions {
            restarts: 2,
            ..Default::default()
        },
        ..Default::default()
    }
}

#[test]
fn reports_are_byte_identical() {
    for name in builtin_names() {
        let s = builtin(name).unwrap();
        let a = run_scenario(&s, &quick(None)).unwrap().to_json();
        let b = run_scenario(&s, &quick(None)).unwrap().to_json();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn timestamp_is_the_only_free_field() {
    let s = builtin("beam-splitter").unwrap();
    let plain = run_scenario(&s, &quick(None)).unwrap();
    let mut stamped = run_scenario(
        &s,
        &RunOptions {
            timestamp: Some("unix:1".into()),
            ..quick(None)
        },
    )
    .unwrap();
    assert_ne!(plain.to_json(), stamped.to_json());
    stamped.timestamp = None;
    assert_eq!(plain.to_json(), stamped.to_json());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn seeded_runs_repeat(seed in any::<u64>()) {
        let s = builtin("beam-splitter").unwrap();
        let a = run_scenario(&s, &quick(Some(seed))).unwrap().to_json();
        let b = run_scenario(&s, &quick(Some(seed))).unwrap().to_json();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn cat_experiment_never_reports_impossible_outcomes(seed in any::<u64>(), phi in 0.0..std::f64::consts::TAU, shots in 1u64..100_000) {
        for variant in [CatVariant::Pure { phi }, CatVariant::Mixed] {
            let counts = simulate_cat_experiment(variant, shots, seed).unwrap().counts();
            // alive&decayed and dead&intact
            prop_assert_eq!(counts[1], 0);
            prop_assert_eq!(counts[2], 0);
            prop_assert_eq!(counts.iter().sum::<u64>(), shots);
        }
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    (v[v.len() / 2 - 1] + v[v.len() / 2]) / 2.0
}

#[test]
fn tomography_error_shrinks_with_shots() {
    let mut r = rng::stream(2024, 0);
    let psi = StateVector::new(rng::random_unit_vector(&mut r, 4), Dims::two_qubits()).unwrap();
    let noise = DensityMatrix::maximally_mixed(Dims::two_qubits());
    let truth = mix(&[(0.8, &pure_density(&psi).unwrap()), (0.2, &noise)]).unwrap();
    let mut previous = f64::INFINITY;
    for shots in [10_000u64, 100_000, 1_000_000] {
        let distances = (0..10)
            .map(|seed| {
                let t = tomography_two_qubit(&truth, &pauli_settings(), shots, seed, TomographyMode::Full)
                    .unwrap();
                t.estimate.trace_distance(&truth).unwrap()
            })
            .collect();
        let m = median(distances);
        assert!(m <= previous, "median {m} at {shots} shots after {previous}");
        previous = m;
    }
}

#[test]
fn ghz_reduction_ignores_labeling() {
    let rho = pure_density(&ghz()).unwrap();
    let reference = ghz_reduction();
    for keep in [[0, 1], [0, 2], [1, 2]] {
        let reduced = rho.reduce(&keep).unwrap();
        assert!(
            reduced.matrix().max_abs_diff(reference.matrix()) < 1e-12,
            "keep {keep:?}"
        );
    }
}

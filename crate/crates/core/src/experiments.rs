//! Simulated laboratory procedures: the cat measurement, two-qubit Pauli
//! tomography, and the named states of the worked examples.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::{sample_outcomes, sample_outcomes_stream, Counts, ProjectiveMeasurement};
use crate::state::{cat_mixed, cat_pure, ghz, pure_density, DensityMatrix, OrthonormalBasis, StateVector};
use crate::tensor::{kron, pauli_matrix, ComplexMatrix, Dims};

/// Joint outcomes of looking at the cat and the nucleus, in basis order.
pub const CAT_OUTCOMES: [&str; 4] = ["alive&intact", "alive&decayed", "dead&intact", "dead&decayed"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum CatVariant {
    Pure { phi: f64 },
    Mixed,
}

impl CatVariant {
    pub fn state(&self) -> DensityMatrix {
        match *self {
            CatVariant::Pure { phi } => pure_density(&cat_pure(phi)).expect("normalized"),
            CatVariant::Mixed => cat_mixed(),
        }
    }
}

/// Measurement of cat and nucleus in the computational basis.
pub fn cat_measurement() -> ProjectiveMeasurement {
    ProjectiveMeasurement::in_basis(
        &OrthonormalBasis::computational(4),
        CAT_OUTCOMES.iter().map(|s| s.to_string()).collect(),
    )
    .expect("four labels for four outcomes")
}

/// Counts of the four joint outcomes over `shots` runs.
pub fn simulate_cat_experiment(variant: CatVariant, shots: u64, seed: u64) -> Result<Counts> {
    sample_outcomes(&variant.state(), &cat_measurement(), shots, seed)
}

/// Reduction of the three-party GHZ state to its first two parties.
pub fn ghz_reduction() -> DensityMatrix {
    pure_density(&ghz())
        .and_then(|rho| rho.reduce(&[0, 1]))
        .expect("valid reduction")
}

/// One photon after a balanced beam splitter, two modes truncated to
/// occupation 0 or 1: `(|0>|1> + |1>|0>)/sqrt(2)`.
pub fn beam_splitter_photon() -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    StateVector::from_real(&[0.0, h, h, 0.0], Dims::two_qubits()).expect("normalized")
}

/// How much of the state the settings must pin down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TomographyMode {
    /// All nine local Pauli settings are required.
    #[default]
    Full,
    /// Unmeasured correlators are taken to be zero.
    Partial,
}

/// The nine settings `XX` through `ZZ`.
pub fn pauli_settings() -> Vec<String> {
    let letters = ['X', 'Y', 'Z'];
    letters
        .iter()
        .flat_map(|a| letters.iter().map(move |b| format!("{a}{b}")))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingCounts {
    pub setting: String,
    pub counts: Counts,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TomographyResult {
    pub estimate: DensityMatrix,
    /// Estimated expectation of every non-identity two-qubit Pauli string;
    /// strings no setting measures are reported as 0.
    pub expectations: BTreeMap<String, f64>,
    /// Strings actually estimated from data.
    pub measured: Vec<String>,
    pub tables: Vec<SettingCounts>,
}

fn parse_setting(s: &str) -> Result<[char; 2]> {
    let letters: Vec<char> = s.chars().map(|c| c.to_ascii_uppercase()).collect();
    match letters.as_slice() {
        [a, b] if "XYZ".contains(*a) && "XYZ".contains(*b) => Ok([*a, *b]),
        _ => Err(Error::InvalidBasis(format!(
            "tomography setting `{s}` must be two letters from X, Y, Z"
        ))),
    }
}

/// Measures each setting `shots_per_setting` times and reconstructs the state.
///
/// Setting `k` draws from stream `(seed, k)`, so the settings are sampled
/// independently and in parallel when the `parallel` feature is on. The
/// estimate is the linear inversion `1/4 sum <P Q> P (x) Q` projected onto
/// the nearest density matrix in Frobenius norm.
pub fn tomography_two_qubit(
    rho: &DensityMatrix,
    settings: &[String],
    shots_per_setting: u64,
    seed: u64,
    mode: TomographyMode,
) -> Result<TomographyResult> {
    if rho.dims().as_slice() != [2, 2] {
        return Err(Error::UnsupportedDims(format!(
            "two-qubit tomography on dims {}",
            rho.dims()
        )));
    }
    if settings.is_empty() {
        return Err(Error::InsufficientSettings(
            "no measurement settings given".into(),
        ));
    }
    let parsed = settings
        .iter()
        .map(|s| parse_setting(s))
        .collect::<Result<Vec<_>>>()?;
    if mode == TomographyMode::Full {
        let missing: Vec<String> = pauli_settings()
            .into_iter()
            .filter(|want| !parsed.iter().any(|p| p.iter().collect::<String>() == *want))
            .collect();
        if !missing.is_empty() {
            return Err(Error::InsufficientSettings(format!(
                "full reconstruction needs every local Pauli setting; missing {}",
                missing.join(", ")
            )));
        }
    }

    let tables = sample_settings(rho, &parsed, shots_per_setting, seed)?;

    // Sum of signed counts and total shots per correlator.
    let mut sums: BTreeMap<String, (f64, u64)> = BTreeMap::new();
    for (setting, table) in parsed.iter().zip(&tables) {
        for (pa, pb) in [(setting[0], 'I'), ('I', setting[1]), (setting[0], setting[1])] {
            let entry = sums.entry(format!("{pa}{pb}")).or_insert((0.0, 0));
            for oc in &table.counts.entries {
                let mut chars = oc.label.chars();
                let sa = if chars.next() == Some('+') { 1.0 } else { -1.0 };
                let sb = if chars.next() == Some('+') { 1.0 } else { -1.0 };
                let sign = if pa == 'I' { 1.0 } else { sa } * if pb == 'I' { 1.0 } else { sb };
                entry.0 += sign * oc.count as f64;
            }
            entry.1 += table.counts.total();
        }
    }

    let mut expectations = BTreeMap::new();
    let mut measured = Vec::new();
    let mut linear = ComplexMatrix::identity(4);
    for label in crate::evidence::two_qubit_pauli_labels() {
        let value = match sums.get(&label) {
            Some(&(s, n)) if n > 0 => {
                measured.push(label.clone());
                s / n as f64
            }
            _ => 0.0,
        };
        if value != 0.0 {
            let mut chars = label.chars();
            let p = pauli_matrix(chars.next().expect("two letters"))?;
            let q = pauli_matrix(chars.next().expect("two letters"))?;
            linear = &linear + &kron(&p, &q).scale_real(value);
        }
        expectations.insert(label, value);
    }
    let estimate = DensityMatrix::project(&linear.scale_real(0.25), Dims::two_qubits())?;
    Ok(TomographyResult {
        estimate,
        expectations,
        measured,
        tables,
    })
}

fn sample_settings(
    rho: &DensityMatrix,
    settings: &[[char; 2]],
    shots: u64,
    seed: u64,
) -> Result<Vec<SettingCounts>> {
    let run = |(k, s): (usize, &[char; 2])| -> Result<SettingCounts> {
        let name: String = s.iter().collect();
        let m = ProjectiveMeasurement::pauli_product(&name)?;
        let counts = sample_outcomes_stream(rho, &m, shots, seed, k as u64)?;
        Ok(SettingCounts {
            setting: name,
            counts,
        })
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        settings.par_iter().enumerate().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        settings.iter().enumerate().map(run).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::{negativity, ppt_verdict, PptVerdict};
    use crate::state::purity;
    use std::f64::consts::PI;

    #[test]
    fn cat_outcomes_never_mix() {
        for v in [CatVariant::Mixed, CatVariant::Pure { phi: 0.3 }] {
            let c = simulate_cat_experiment(v, 10_000, 4).unwrap();
            assert_eq!(c.count("alive&decayed"), Some(0));
            assert_eq!(c.count("dead&intact"), Some(0));
            assert_eq!(c.total(), 10_000);
        }
        let one = simulate_cat_experiment(CatVariant::Mixed, 1, 9).unwrap();
        assert_eq!(
            one.count("alive&intact").unwrap() + one.count("dead&decayed").unwrap(),
            1
        );
        assert!(simulate_cat_experiment(CatVariant::Mixed, 0, 9).is_err());
    }

    #[test]
    fn ghz_reduction_is_classical_mixture() {
        let r = ghz_reduction();
        assert!(r.matrix().max_abs_diff(cat_mixed().matrix()) < 1e-15);
        assert_eq!(ppt_verdict(&r, r.dims()).unwrap(), PptVerdict::Separable);
        assert!((purity(&r) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn beam_splitter_is_maximally_entangled() {
        let psi = beam_splitter_photon();
        let rho = pure_density(&psi).unwrap();
        assert!((negativity(&rho, rho.dims()).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn full_mode_needs_nine_settings() {
        let err = tomography_two_qubit(&cat_mixed(), &["ZZ".into()], 10, 0, TomographyMode::Full);
        assert!(matches!(err, Err(Error::InsufficientSettings(_))));
        assert!(tomography_two_qubit(&cat_mixed(), &["ZW".into()], 10, 0, TomographyMode::Partial).is_err());
    }

    #[test]
    fn computational_setting_fills_only_the_diagonal() {
        let rho = pure_density(&cat_pure(0.0)).unwrap();
        let t = tomography_two_qubit(&rho, &["ZZ".into()], 1000, 5, TomographyMode::Partial).unwrap();
        assert_eq!(t.measured, vec!["IZ", "ZI", "ZZ"]);
        let m = t.estimate.matrix();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(m[(i, j)].norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn full_tomography_sees_the_phase() {
        for (phi, sign) in [(0.0, 1.0), (PI, -1.0)] {
            let rho = pure_density(&cat_pure(phi)).unwrap();
            let t = tomography_two_qubit(&rho, &pauli_settings(), 20_000, 1, TomographyMode::Full).unwrap();
            assert!(sign * t.expectations["XX"] > 0.9);
            assert!(t.estimate.trace_distance(&rho).unwrap() < 0.05);
        }
    }
}

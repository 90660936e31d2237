//! Scenario files: a source state, what was measured, and which analyses to
//! run on it.

mod report;
mod run;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use report::{
    AssessReport, BasisReport, BoundReport, ConstraintRow, OutcomeRow, Report, Seeds, SimulationReport,
    StateReport, TaskReport, TomographyReport, REPORT_SCHEMA,
};
pub use run::{run_scenario, RunOptions};

use crate::error::{Error, Result};
use crate::experiments::TomographyMode;
use crate::tensor::MatrixParts;

/// Scenario format version accepted by the parser.
pub const SCENARIO_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: String,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    /// Subsystem dims of the state the analyses act on, after any reduction.
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_state: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduce: Option<ReduceSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<ConstraintSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub simulations: Vec<SimulationSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tomography: Option<TomographySpec>,
    pub tasks: Vec<Task>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum StateSpec {
    /// A constructor from [`named_state`](crate::scenario::named_state).
    Named {
        name: String,
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        params: BTreeMap<String, f64>,
    },
    /// Pure state amplitudes.
    Vector {
        dims: Vec<usize>,
        re: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        im: Option<Vec<f64>>,
    },
    /// Density matrix.
    Matrix {
        dims: Vec<usize>,
        re: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        im: Option<Vec<Vec<f64>>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReduceSpec {
    /// Subsystems kept, in order.
    pub keep: Vec<usize>,
}

/// One measured expectation. Exactly one of `pauli` and `matrix` is set;
/// a missing `value` is taken from the working state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pauli: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixParts>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default)]
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSpec {
    /// `computational`, `cat`, or one Pauli letter per qubit such as `ZZ`.
    pub basis: String,
    pub shots: u64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TomographySpec {
    /// Local Pauli settings; all nine when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub settings: Option<Vec<String>>,
    pub shots_per_setting: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub mode: TomographyMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    /// Partial trace down to `reduce.keep`.
    Reduce,
    /// Purity, partial-transpose spectrum and, for pure states, Schmidt data.
    Analyze,
    /// Sample every entry of `simulations`.
    Simulate,
    /// Decide whether the constraints evidence entanglement.
    Assess,
    /// Simulated tomography of the working state.
    Tomography,
}

impl Scenario {
    /// Parses and validates a scenario. Errors carry the line, column and
    /// field path of the offending value.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let context = if path.is_empty() || path == "." {
                format!("line {} column {}", inner.line(), inner.column())
            } else {
                format!("line {} column {} (field `{path}`)", inner.line(), inner.column())
            };
            Error::Parse {
                context,
                message: inner.to_string(),
            }
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Structural checks that do not need any numerics.
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, message: String| {
            Err(Error::Scenario {
                field: field.into(),
                message,
            })
        };
        if self.version != SCENARIO_VERSION {
            return bad(
                "version",
                format!(
                    "unsupported version `{}`, expected `{SCENARIO_VERSION}`",
                    self.version
                ),
            );
        }
        if self.name.trim().is_empty() {
            return bad("name", "must not be empty".into());
        }
        if self.dims.is_empty() || self.dims.contains(&0) {
            return bad(
                "dims",
                format!("{:?} must be a non-empty list of positive sizes", self.dims),
            );
        }
        if self.tasks.is_empty() {
            return bad("tasks", "at least one task is required".into());
        }
        let needs_state = self.tasks.iter().any(|t| *t != Task::Assess)
            || self.constraints.iter().any(|c| c.value.is_none());
        if needs_state && self.source_state.is_none() {
            return bad(
                "source_state",
                "required by the listed tasks or by constraints without a value".into(),
            );
        }
        if self.tasks.contains(&Task::Reduce) && self.reduce.is_none() {
            return bad("reduce", "task `reduce` needs a `reduce` block".into());
        }
        if self.tasks.contains(&Task::Simulate) && self.simulations.is_empty() {
            return bad(
                "simulations",
                "task `simulate` needs at least one simulation".into(),
            );
        }
        if self.tasks.contains(&Task::Tomography) && self.tomography.is_none() {
            return bad(
                "tomography",
                "task `tomography` needs a `tomography` block".into(),
            );
        }
        for (i, s) in self.simulations.iter().enumerate() {
            if s.shots == 0 {
                return bad(&format!("simulations[{i}].shots"), "must be at least 1".into());
            }
        }
        if let Some(t) = &self.tomography {
            if t.shots_per_setting == 0 {
                return bad("tomography.shots_per_setting", "must be at least 1".into());
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.pauli.is_some() == c.matrix.is_some() {
                return bad(
                    &format!("constraints[{i}]"),
                    "exactly one of `pauli` and `matrix` must be given".into(),
                );
            }
            if c.tolerance.is_nan() || c.tolerance < 0.0 {
                return bad(
                    &format!("constraints[{i}].tolerance"),
                    "must be non-negative".into(),
                );
            }
        }
        Ok(())
    }
}

const BUILTINS: [(&str, &str); 6] = [
    ("cat", include_str!("../../scenarios/cat.json")),
    ("cat-neutrino", include_str!("../../scenarios/cat-neutrino.json")),
    (
        "ghz-reduction",
        include_str!("../../scenarios/ghz-reduction.json"),
    ),
    (
        "crypto-phi-plus",
        include_str!("../../scenarios/crypto-phi-plus.json"),
    ),
    (
        "crypto-ghz-eve",
        include_str!("../../scenarios/crypto-ghz-eve.json"),
    ),
    (
        "beam-splitter",
        include_str!("../../scenarios/beam-splitter.json"),
    ),
];

/// Names of the shipped scenarios.
pub fn builtin_names() -> Vec<&'static str> {
    BUILTINS.iter().map(|(n, _)| *n).collect()
}

/// A shipped scenario by name.
pub fn builtin(name: &str) -> Result<Scenario> {
    let (_, text) = BUILTINS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Scenario {
            field: "name".into(),
            message: format!(
                "no built-in scenario `{name}`; known: {}",
                builtin_names().join(", ")
            ),
        })?;
    Scenario::from_json(text)
}

/// Named constructors available to `source_state`.
pub fn named_state(name: &str, params: &BTreeMap<String, f64>) -> Result<crate::state::DensityMatrix> {
    use crate::state::*;
    use crate::tensor::{Dims, C64};
    let param = |key: &str, default: Option<f64>| -> Result<f64> {
        params
            .get(key)
            .copied()
            .or(default)
            .ok_or_else(|| Error::Scenario {
                field: format!("source_state.params.{key}"),
                message: format!("constructor `{name}` needs parameter `{key}`"),
            })
    };
    let allowed: &[&str] = match name {
        "cat_pure" => &["phi", "p"],
        "cat_family" => &["re", "im"],
        "basis" => &["index", "qubits"],
        "maximally_mixed" => &["qubits"],
        _ => &[],
    };
    if let Some(extra) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::Scenario {
            field: format!("source_state.params.{extra}"),
            message: format!("constructor `{name}` takes no parameter `{extra}`"),
        });
    }
    let count = |key: &str, default: f64| -> Result<usize> {
        let v = param(key, Some(default))?;
        if v < 0.0 || v.fract() != 0.0 {
            return Err(Error::Scenario {
                field: format!("source_state.params.{key}"),
                message: format!("{v} is not a non-negative integer"),
            });
        }
        Ok(v as usize)
    };
    match name {
        "cat_mixed" => Ok(cat_mixed()),
        "cat_pure" => pure_density(&cat_pure_weighted(
            param("p", Some(0.5))?,
            param("phi", Some(0.0))?,
        )?),
        "cat_family" => crate::evidence::cat_family(C64::new(param("re", None)?, param("im", Some(0.0))?)),
        "phi_plus" => pure_density(&phi_plus()),
        "ghz" => pure_density(&ghz()),
        "ghz_reduction" => Ok(crate::experiments::ghz_reduction()),
        "beam_splitter" => pure_density(&crate::experiments::beam_splitter_photon()),
        "maximally_mixed" => Ok(DensityMatrix::maximally_mixed(Dims::qubits(
            count("qubits", 2.0)?.max(1),
        ))),
        "basis" => {
            let dims = Dims::qubits(count("qubits", 2.0)?.max(1));
            pure_density(&StateVector::basis(count("index", 0.0)?, dims)?)
        }
        other => Err(Error::Scenario {
            field: "source_state.name".into(),
            message: format!(
                "unknown constructor `{other}`; known: cat_mixed, cat_pure, cat_family, phi_plus, ghz, \
                 ghz_reduction, beam_splitter, maximally_mixed, basis"
            ),
        }),
    }
}

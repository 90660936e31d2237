use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::evidence::{OptimizerOptions, RestartSummary, Verdict};
use crate::experiments::{SettingCounts, TomographyMode};
use crate::tensor::MatrixParts;

/// Report JSON schema version.
pub const REPORT_SCHEMA: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    /// Version of the library that produced the report.
    pub version: String,
    pub schema: String,
    pub scenario: String,
    pub rng: String,
    pub seeds: Seeds,
    /// Wall-clock stamp; not covered by the determinism guarantee.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    pub tasks: Vec<TaskReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Seeds {
    pub simulations: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tomography: Option<u64>,
    pub optimizer: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "lowercase")]
pub enum TaskReport {
    Reduce(StateReport),
    Analyze(StateReport),
    Simulate(SimulationReport),
    Assess(AssessReport),
    Tomography(TomographyReport),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateReport {
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keep: Option<Vec<usize>>,
    pub state: MatrixParts,
    pub purity: f64,
    /// Present for bipartite states.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub negativity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pt_spectrum: Option<Vec<f64>>,
    /// `Separable`, `Entangled` or `Inconclusive`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ppt_verdict: Option<String>,
    /// Present for bipartite pure states.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schmidt_coefficients: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRow {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    /// Exact Born probability.
    pub probability: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub basis: String,
    pub shots: u64,
    pub seed: u64,
    pub stream: u64,
    pub outcomes: Vec<OutcomeRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintRow {
    pub label: String,
    pub value: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub value: f64,
    pub residual: f64,
    pub witness: MatrixParts,
    pub restarts: Vec<RestartSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisReport {
    pub kind: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessReport {
    pub verdict: Verdict,
    pub reason: String,
    pub constraints: Vec<ConstraintRow>,
    pub min_negativity: BoundReport,
    pub max_negativity: BoundReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<MatrixParts>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate_residual: Option<f64>,
    pub basis_analysis: BasisReport,
    pub options: OptimizerOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomographyReport {
    pub settings: Vec<String>,
    pub shots_per_setting: u64,
    pub seed: u64,
    pub mode: TomographyMode,
    pub expectations: BTreeMap<String, f64>,
    pub measured: Vec<String>,
    pub estimate: MatrixParts,
    pub negativity: f64,
    pub trace_distance: f64,
    pub tables: Vec<SettingCounts>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| crate::Error::Parse {
            context: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })
    }

    /// Human-readable rendering of the same content.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        let _ = writeln!(
            w,
            "scenario {} (report schema {}, qevidence {})",
            self.scenario, self.schema, self.version
        );
        let _ = writeln!(w, "rng {}", self.rng);
        let _ = writeln!(
            w,
            "seeds: simulations {:?}, tomography {}, optimizer {}",
            self.seeds.simulations,
            self.seeds.tomography.map_or("-".into(), |s| s.to_string()),
            self.seeds.optimizer
        );
        if let Some(t) = &self.timestamp {
            let _ = writeln!(w, "generated {t}");
        }
        for task in &self.tasks {
            let _ = writeln!(w);
            match task {
                TaskReport::Reduce(s) => {
                    let _ = writeln!(
                        w,
                        "[reduce] keep {:?} -> dims {:?}",
                        s.keep.as_deref().unwrap_or(&[]),
                        s.dims
                    );
                    write_state(w, s);
                }
                TaskReport::Analyze(s) => {
                    let _ = writeln!(w, "[analyze] dims {:?}", s.dims);
                    write_state(w, s);
                }
                TaskReport::Simulate(s) => {
                    let _ = writeln!(
                        w,
                        "[simulate] basis {} shots {} seed {} stream {}",
                        s.basis, s.shots, s.seed, s.stream
                    );
                    let _ = writeln!(
                        w,
                        "  {:<16} {:>12} {:>12} {:>10}",
                        "outcome", "probability", "count", "frequency"
                    );
                    for o in &s.outcomes {
                        let _ = writeln!(
                            w,
                            "  {:<16} {:>12.6} {:>12} {:>10.6}",
                            o.label,
                            o.probability,
                            o.count,
                            o.count as f64 / s.shots as f64
                        );
                    }
                }
                TaskReport::Assess(a) => {
                    let _ = writeln!(w, "[assess] verdict {}", a.verdict);
                    let _ = writeln!(w, "  {}", a.reason);
                    let _ = writeln!(w, "  constraints:");
                    for c in &a.constraints {
                        let _ = writeln!(w, "    <{}> = {} +/- {}", c.label, c.value, c.tolerance);
                    }
                    let _ = writeln!(
                        w,
                        "  min negativity {:.6} (residual {:.2e}), max negativity {:.6} (residual {:.2e})",
                        a.min_negativity.value,
                        a.min_negativity.residual,
                        a.max_negativity.value,
                        a.max_negativity.residual
                    );
                    let _ = writeln!(
                        w,
                        "  basis analysis: {} ({})",
                        a.basis_analysis.kind, a.basis_analysis.reason
                    );
                    let _ = writeln!(w, "  restarts {}, seed {}", a.options.restarts, a.options.seed);
                    match &a.certificate {
                        Some(c) => {
                            let _ = writeln!(
                                w,
                                "  separable certificate (residual {:.2e}):",
                                a.certificate_residual.unwrap_or(0.0)
                            );
                            write_matrix(w, c);
                        }
                        None => {
                            let _ = writeln!(w, "  no separable certificate");
                        }
                    }
                }
                TaskReport::Tomography(t) => {
                    let _ = writeln!(
                        w,
                        "[tomography] {} settings x {} shots, seed {}, mode {:?}",
                        t.settings.len(),
                        t.shots_per_setting,
                        t.seed,
                        t.mode
                    );
                    let _ = writeln!(
                        w,
                        "  negativity of estimate {:.6}, trace distance to source {:.6}",
                        t.negativity, t.trace_distance
                    );
                    let measured: Vec<String> = t
                        .measured
                        .iter()
                        .map(|l| format!("{l}={:+.4}", t.expectations[l]))
                        .collect();
                    let _ = writeln!(w, "  measured {}", measured.join(" "));
                    let _ = writeln!(w, "  estimate:");
                    write_matrix(w, &t.estimate);
                }
            }
        }
        out
    }
}

fn write_state(w: &mut String, s: &StateReport) {
    let _ = writeln!(w, "  purity {:.6}", s.purity);
    if let Some(n) = s.negativity {
        let _ = writeln!(w, "  negativity {n:.6}");
    }
    if let Some(p) = &s.pt_spectrum {
        let _ = writeln!(w, "  partial-transpose spectrum {}", fmt_list(p));
    }
    if let Some(v) = &s.ppt_verdict {
        let _ = writeln!(w, "  PPT verdict {v}");
    }
    if let Some(c) = &s.schmidt_coefficients {
        let _ = writeln!(w, "  Schmidt coefficients {}", fmt_list(c));
    }
    write_matrix(w, &s.state);
}

fn fmt_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

fn write_matrix(w: &mut String, m: &MatrixParts) {
    for (i, row) in m.re.iter().enumerate() {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(j, re)| {
                let im = m.im.as_ref().map_or(0.0, |im| im[i][j]);
                if im.abs() < 5e-7 {
                    format!("{re:>9.6}")
                } else {
                    format!("{re:>9.6}{im:+.6}i")
                }
            })
            .collect();
        let _ = writeln!(w, "    {}", cells.join("  "));
    }
}

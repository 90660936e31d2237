use super::report::*;
use super::{named_state, ConstraintSpec, Scenario, StateSpec, Task};
use crate::entanglement::{ppt_verdict, pt_spectrum, schmidt};
use crate::error::{Error, Result};
use crate::evidence::{assess, Constraint, ConstraintSet, OptimizerOptions};
use crate::experiments::{cat_measurement, pauli_settings, tomography_two_qubit};
use crate::observables::{expectation, sample_outcomes_stream, Observable, ProjectiveMeasurement};
use crate::rng::RNG_ALGORITHM;
use crate::state::{pure_density, purity, DensityMatrix, StateVector};
use crate::tensor::{ComplexMatrix, Dims, MatrixParts, C64};

/// Overrides applied on top of a scenario.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunOptions {
    /// Replaces every seed in the scenario and the optimizer seed.
    pub seed: Option<u64>,
    /// Replaces every shot count.
    pub shots: Option<u64>,
    pub optimizer: OptimizerOptions,
    pub timestamp: Option<String>,
}

fn scenario_err(field: &str, message: impl Into<String>) -> Error {
    Error::Scenario {
        field: field.into(),
        message: message.into(),
    }
}

fn build_state(spec: &StateSpec) -> Result<DensityMatrix> {
    match spec {
        StateSpec::Named { name, params } => named_state(name, params),
        StateSpec::Vector { dims, re, im } => {
            let im = im.clone().unwrap_or_else(|| vec![0.0; re.len()]);
            if im.len() != re.len() {
                return Err(scenario_err("source_state.im", "length differs from `re`"));
            }
            let amps = re.iter().zip(&im).map(|(&a, &b)| C64::new(a, b)).collect();
            pure_density(&StateVector::new(amps, Dims::new(dims.clone())?)?)
        }
        StateSpec::Matrix { dims, re, im } => {
            let m = ComplexMatrix::try_from(&MatrixParts {
                re: re.clone(),
                im: im.clone(),
            })?;
            DensityMatrix::new(m, Dims::new(dims.clone())?)
        }
    }
}

fn state_report(rho: &DensityMatrix, keep: Option<Vec<usize>>) -> Result<StateReport> {
    let dims = rho.dims();
    let mut report = StateReport {
        dims: dims.as_slice().to_vec(),
        keep,
        state: MatrixParts::from(rho.matrix()),
        purity: purity(rho),
        negativity: None,
        pt_spectrum: None,
        ppt_verdict: None,
        schmidt_coefficients: None,
    };
    if dims.is_bipartite() {
        let spectrum = pt_spectrum(rho, dims)?;
        report.negativity = Some(spectrum.iter().map(|l| (-l).max(0.0)).sum());
        report.pt_spectrum = Some(spectrum);
        report.ppt_verdict = Some(match ppt_verdict(rho, dims) {
            Ok(v) => format!("{v:?}"),
            Err(Error::Inconclusive(_)) => "Inconclusive".into(),
            Err(e) => return Err(e),
        });
        if (report.purity - 1.0).abs() < 1e-9 {
            // Leading eigenvector of a pure density matrix is the state.
            let eig = crate::tensor::hermitian_eigs(rho.matrix())?;
            let psi = StateVector::normalized(eig.vector(dims.total() - 1), dims.clone())?;
            report.schmidt_coefficients = Some(schmidt(&psi, dims)?.coefficients);
        }
    }
    Ok(report)
}

fn measurement_for(basis: &str, dims: &Dims) -> Result<ProjectiveMeasurement> {
    match basis.to_ascii_lowercase().as_str() {
        "computational" => Ok(ProjectiveMeasurement::computational(dims)),
        "cat" => {
            if dims.as_slice() != [2, 2] {
                return Err(scenario_err(
                    "simulations.basis",
                    "the `cat` basis needs dims [2, 2]",
                ));
            }
            Ok(cat_measurement())
        }
        letters => {
            if letters.len() != dims.len() || dims.as_slice().iter().any(|&d| d != 2) {
                return Err(scenario_err(
                    "simulations.basis",
                    format!("Pauli setting `{basis}` needs one letter per qubit for dims {dims}"),
                ));
            }
            ProjectiveMeasurement::pauli_product(basis)
        }
    }
}

fn constraint_set(
    specs: &[ConstraintSpec],
    dims: &Dims,
    state: Option<&DensityMatrix>,
) -> Result<ConstraintSet> {
    let mut cs = ConstraintSet::new(dims.clone());
    for (i, c) in specs.iter().enumerate() {
        let field = format!("constraints[{i}]");
        let observable = match (&c.pauli, &c.matrix) {
            (Some(p), None) => Observable::pauli(p)?,
            (None, Some(m)) => {
                let label = c.label.clone().unwrap_or_else(|| format!("A{i}"));
                Observable::new(ComplexMatrix::try_from(m)?, label)?
            }
            _ => {
                return Err(scenario_err(
                    &field,
                    "exactly one of `pauli` and `matrix` must be given",
                ))
            }
        };
        let value = match (c.value, state) {
            (Some(v), _) => v,
            (None, Some(rho)) => expectation(rho, &observable)?,
            (None, None) => return Err(scenario_err(&field, "no value and no source state")),
        };
        cs.push(Constraint::new(observable, value, c.tolerance)?)
            .map_err(|e| scenario_err(&field, e.to_string()))?;
    }
    Ok(cs)
}

fn require_dims(state: &DensityMatrix, dims: &Dims, task: &str) -> Result<()> {
    if state.dims() != dims {
        return Err(scenario_err(
            "dims",
            format!(
                "task `{task}` runs on a state with dims {} but the scenario declares {dims}",
                state.dims()
            ),
        ));
    }
    Ok(())
}

/// Executes the tasks in their declared order.
///
/// Simulation `k` samples stream `(seed, k)`; tomography setting `j` samples
/// stream `(seed, j)`; optimizer restart `r` starts from stream
/// `(optimizer seed, r)`. The report is a deterministic function of the
/// scenario and options apart from `timestamp`.
pub fn run_scenario(scenario: &Scenario, options: &RunOptions) -> Result<Report> {
    scenario.validate()?;
    let dims = Dims::new(scenario.dims.clone())?;
    let mut optimizer = options.optimizer.clone();
    if let Some(seed) = options.seed {
        optimizer.seed = seed;
    }
    let mut working = scenario.source_state.as_ref().map(build_state).transpose()?;
    let mut seeds = Seeds {
        simulations: Vec::new(),
        tomography: None,
        optimizer: optimizer.seed,
    };
    let mut tasks = Vec::with_capacity(scenario.tasks.len());

    for task in &scenario.tasks {
        match task {
            Task::Reduce => {
                let keep = scenario.reduce.as_ref().expect("validated").keep.clone();
                let state = working.as_ref().expect("validated");
                let reduced = state.reduce(&keep)?;
                require_dims(&reduced, &dims, "reduce")?;
                tasks.push(TaskReport::Reduce(state_report(&reduced, Some(keep))?));
                working = Some(reduced);
            }
            Task::Analyze => {
                let state = working.as_ref().expect("validated");
                require_dims(state, &dims, "analyze")?;
                tasks.push(TaskReport::Analyze(state_report(state, None)?));
            }
            Task::Simulate => {
                let state = working.as_ref().expect("validated");
                require_dims(state, &dims, "simulate")?;
                for (k, sim) in scenario.simulations.iter().enumerate() {
                    let seed = options.seed.unwrap_or(sim.seed);
                    let shots = options.shots.unwrap_or(sim.shots);
                    let m = measurement_for(&sim.basis, &dims)?;
                    let dist = m.distribution(state)?;
                    let counts = sample_outcomes_stream(state, &m, shots, seed, k as u64)?;
                    seeds.simulations.push(seed);
                    let outcomes = dist
                        .entries
                        .iter()
                        .zip(&counts.entries)
                        .map(|(p, c)| OutcomeRow {
                            label: p.label.clone(),
                            value: p.value,
                            probability: p.probability,
                            count: c.count,
                        })
                        .collect();
                    tasks.push(TaskReport::Simulate(SimulationReport {
                        basis: sim.basis.clone(),
                        shots,
                        seed,
                        stream: k as u64,
                        outcomes,
                    }));
                }
            }
            Task::Assess => {
                if let Some(state) = &working {
                    require_dims(state, &dims, "assess")?;
                }
                let cs = constraint_set(&scenario.constraints, &dims, working.as_ref())?;
                let v = assess(&cs, &optimizer)?;
                let bound = |b: &crate::evidence::NegativityBound| BoundReport {
                    value: b.value,
                    residual: b.residual,
                    witness: MatrixParts::from(b.witness.matrix()),
                    restarts: b.restarts.clone(),
                };
                tasks.push(TaskReport::Assess(AssessReport {
                    verdict: v.verdict,
                    reason: v.reason.clone(),
                    constraints: cs
                        .constraints()
                        .iter()
                        .map(|c| ConstraintRow {
                            label: c.observable().label().to_string(),
                            value: c.value(),
                            tolerance: c.tolerance(),
                        })
                        .collect(),
                    min_negativity: bound(&v.min_negativity),
                    max_negativity: bound(&v.max_negativity),
                    certificate_residual: v.certificate.as_ref().map(|c| cs.residual(c.matrix())),
                    certificate: v.certificate.as_ref().map(|c| MatrixParts::from(c.matrix())),
                    basis_analysis: BasisReport {
                        kind: v.basis.kind().to_string(),
                        reason: v.basis.reason(),
                    },
                    options: optimizer.clone(),
                }));
            }
            Task::Tomography => {
                let state = working.as_ref().expect("validated");
                require_dims(state, &dims, "tomography")?;
                let spec = scenario.tomography.as_ref().expect("validated");
                let settings = spec.settings.clone().unwrap_or_else(pauli_settings);
                let seed = options.seed.unwrap_or(spec.seed);
                let shots = options.shots.unwrap_or(spec.shots_per_setting);
                let t = tomography_two_qubit(state, &settings, shots, seed, spec.mode)?;
                seeds.tomography = Some(seed);
                tasks.push(TaskReport::Tomography(TomographyReport {
                    settings,
                    shots_per_setting: shots,
                    seed,
                    mode: spec.mode,
                    negativity: crate::entanglement::negativity(&t.estimate, &dims)?,
                    trace_distance: t.estimate.trace_distance(state)?,
                    estimate: MatrixParts::from(t.estimate.matrix()),
                    expectations: t.expectations,
                    measured: t.measured,
                    tables: t.tables,
                }));
            }
        }
    }

    Ok(Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        schema: REPORT_SCHEMA.to_string(),
        scenario: scenario.name.clone(),
        rng: RNG_ALGORITHM.to_string(),
        seeds,
        timestamp: options.timestamp.clone(),
        tasks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evidence::Verdict;
    use crate::scenario::builtin;

    fn fast() -> RunOptions {
        RunOptions {
            optimizer: OptimizerOptions {
                restarts: 2,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    #[test]
    fn cat_scenario_reports_no_evidence() {
        let r = run_scenario(&builtin("cat").unwrap(), &fast()).unwrap();
        let assess = r
            .tasks
            .iter()
            .find_map(|t| match t {
                TaskReport::Assess(a) => Some(a),
                _ => None,
            })
            .unwrap();
        assert_eq!(assess.verdict, Verdict::NoEvidence);
        assert!(assess.certificate.is_some());
    }

    #[test]
    fn report_round_trips_and_is_deterministic() {
        let s = builtin("ghz-reduction").unwrap();
        let a = run_scenario(&s, &fast()).unwrap();
        let b = run_scenario(&s, &fast()).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(Report::from_json(&a.to_json()).unwrap(), a);
        assert!(!a.to_text().is_empty());
    }

    #[test]
    fn dims_mismatch_is_reported() {
        let mut s = builtin("ghz-reduction").unwrap();
        s.dims = vec![2, 2, 2];
        assert!(matches!(
            run_scenario(&s, &fast()),
            Err(Error::Scenario { field, .. }) if field == "dims"
        ));
    }
}

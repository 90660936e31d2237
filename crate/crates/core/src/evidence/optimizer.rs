//! Penalized pattern search over density matrices `rho = G G^H / Tr(G G^H)`.
//!
//! The factor `G` is a full complex `d x d` matrix flattened into `2 d^2`
//! reals, so every point of the search space is a valid state. Constraint
//! violations enter through an exterior penalty whose weight is ramped
//! geometrically over the stages; each stage runs a Hooke-Jeeves pattern
//! search with step halving down to the floor.

use serde::{Deserialize, Serialize};

use super::constraints::ConstraintSet;
use crate::entanglement::negativity_of_spectrum;
use crate::error::{Error, Result};
use crate::rng;
use crate::state::DensityMatrix;
use crate::tensor::{jacobi_in_place, partial_transpose, ComplexMatrix, C64};
use crate::tol;

/// Largest total dimension the optimizer accepts.
pub const MAX_OPTIMIZER_DIM: usize = 9;

/// How independent restarts are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    /// Restarts run on the rayon pool when the `parallel` feature is on.
    #[default]
    Parallel,
    Sequential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOptions {
    pub restarts: usize,
    pub seed: u64,
    pub stages: usize,
    pub penalty_start: f64,
    pub penalty_max: f64,
    pub step_start: f64,
    pub step_floor: f64,
    /// Objective evaluations allowed per restart and stage.
    pub max_evaluations: usize,
    pub execution: Execution,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            restarts: 16,
            seed: 0,
            stages: 6,
            penalty_start: 10.0,
            penalty_max: 1e6,
            step_start: 0.2,
            step_floor: 1e-7,
            max_evaluations: 200_000,
            execution: Execution::Parallel,
        }
    }
}

impl OptimizerOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConstraint(format!("optimizer options: {msg}")));
        if self.restarts == 0 {
            return bad("restarts must be at least 1");
        }
        if self.stages == 0 {
            return bad("stages must be at least 1");
        }
        if !(self.penalty_start > 0.0 && self.penalty_max >= self.penalty_start) {
            return bad("penalties must satisfy 0 < start <= max");
        }
        if !(self.step_start > 0.0 && self.step_floor > 0.0 && self.step_floor <= self.step_start) {
            return bad("steps must satisfy 0 < floor <= start");
        }
        if self.max_evaluations == 0 {
            return bad("max_evaluations must be positive");
        }
        Ok(())
    }

    /// Penalty weight of stage `s`, geometric from start to max.
    pub fn penalty_at(&self, stage: usize) -> f64 {
        if self.stages == 1 {
            return self.penalty_max;
        }
        let t = stage as f64 / (self.stages - 1) as f64;
        self.penalty_start * (self.penalty_max / self.penalty_start).powf(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Sense {
    Minimize,
    Maximize,
}

/// Final state of one restart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartSummary {
    pub ordinal: usize,
    pub negativity: f64,
    pub residual: f64,
    pub evaluations: usize,
    /// True when some stage stopped on the evaluation budget.
    pub budget_exhausted: bool,
}

/// Best negativity found over all restarts with its witness state.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativityBound {
    pub value: f64,
    pub witness: DensityMatrix,
    pub residual: f64,
    pub restarts: Vec<RestartSummary>,
}

/// Precomputed data for fast objective evaluation.
struct Problem {
    n: usize,
    pt_source: Vec<usize>,
    /// Observables stored transposed so `Tr(rho A) = sum rho_ij A^T_ij`.
    observables: Vec<(Vec<C64>, f64, f64)>,
    sense: Sense,
}

struct Scratch {
    rho: Vec<C64>,
    pt: Vec<C64>,
}

impl Problem {
    fn new(cs: &ConstraintSet, sense: Sense) -> Result<Self> {
        let dims = cs.dims();
        dims.ensure_bipartite()?;
        let n = dims.total();
        if n > MAX_OPTIMIZER_DIM {
            return Err(Error::UnsupportedDims(format!(
                "optimizer supports total dimension up to {MAX_OPTIMIZER_DIM}, got {dims}"
            )));
        }
        // Locate the source of each partial-transpose entry by transposing
        // an index-tagged matrix.
        let tagged = ComplexMatrix::from_vec(n, n, (0..n * n).map(|k| C64::new(k as f64, 0.0)).collect())?;
        let pt_source = partial_transpose(&tagged, dims, 1)?
            .data()
            .iter()
            .map(|z| z.re as usize)
            .collect();
        let observables = cs
            .constraints()
            .iter()
            .map(|c| {
                (
                    c.observable().matrix().transpose().data().to_vec(),
                    c.value(),
                    c.tolerance(),
                )
            })
            .collect();
        Ok(Self {
            n,
            pt_source,
            observables,
            sense,
        })
    }

    fn dimension(&self) -> usize {
        2 * self.n * self.n
    }

    fn scratch(&self) -> Scratch {
        Scratch {
            rho: vec![C64::new(0.0, 0.0); self.n * self.n],
            pt: vec![C64::new(0.0, 0.0); self.n * self.n],
        }
    }

    /// Writes `G G^H / Tr(G G^H)` into `s.rho`.
    fn build_state(&self, x: &[f64], s: &mut Scratch) {
        let n = self.n;
        let g = |i: usize, k: usize| C64::new(x[2 * (i * n + k)], x[2 * (i * n + k) + 1]);
        let mut trace = 0.0;
        for i in 0..n {
            for j in i..n {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..n {
                    acc += g(i, k) * g(j, k).conj();
                }
                s.rho[i * n + j] = acc;
                s.rho[j * n + i] = acc.conj();
                if i == j {
                    trace += acc.re;
                }
            }
        }
        let inv = if trace > 0.0 { 1.0 / trace } else { 0.0 };
        for z in s.rho.iter_mut() {
            *z *= inv;
        }
    }

    fn negativity(&self, s: &mut Scratch) -> f64 {
        let n = self.n;
        for (dst, &src) in s.pt.iter_mut().zip(&self.pt_source) {
            *dst = s.rho[src];
        }
        if jacobi_in_place(&mut s.pt, n, None).is_err() {
            return f64::NAN;
        }
        let diag: Vec<f64> = (0..n).map(|k| s.pt[k * n + k].re).collect();
        negativity_of_spectrum(&diag)
    }

    /// (sum of squared violations, largest violation)
    fn violations(&self, s: &Scratch) -> (f64, f64) {
        let mut sum = 0.0;
        let mut worst = 0.0f64;
        for (at, value, tolerance) in &self.observables {
            let e: f64 = s.rho.iter().zip(at).map(|(r, a)| (r * a).re).sum();
            let v = ((e - value).abs() - tolerance).max(0.0);
            sum += v * v;
            worst = worst.max(v);
        }
        (sum, worst)
    }

    fn objective(&self, x: &[f64], penalty: f64, s: &mut Scratch) -> f64 {
        self.build_state(x, s);
        let neg = self.negativity(s);
        let (pen, _) = self.violations(s);
        let signed = match self.sense {
            Sense::Minimize => neg,
            Sense::Maximize => -neg,
        };
        let f = signed + penalty * pen;
        if f.is_finite() {
            f
        } else {
            f64::INFINITY
        }
    }

    fn evaluate(&self, x: &[f64], s: &mut Scratch) -> (f64, f64) {
        self.build_state(x, s);
        let neg = self.negativity(s);
        let (_, worst) = self.violations(s);
        (neg, worst)
    }

    /// Active constraint residuals (signed distance past the tolerance band)
    /// and their gradients with respect to `x`.
    fn linearize(&self, x: &[f64], s: &mut Scratch) -> (Vec<f64>, Vec<Vec<f64>>) {
        let n = self.n;
        self.build_state(x, s);
        let g = |i: usize, k: usize| C64::new(x[2 * (i * n + k)], x[2 * (i * n + k) + 1]);
        let trace: f64 = x.iter().map(|v| v * v).sum();
        let mut residuals = Vec::new();
        let mut rows = Vec::new();
        for (at, value, tolerance) in &self.observables {
            let e: f64 = s.rho.iter().zip(at).map(|(r, a)| (r * a).re).sum();
            let d = e - value;
            if d.abs() <= *tolerance {
                continue;
            }
            residuals.push(d - tolerance * d.signum());
            // d e / d G_ab = ((A G)_ab - e G_ab) * 2 / Tr(G^H G), split into
            // real and imaginary directions.
            let mut row = vec![0.0; x.len()];
            for a in 0..n {
                for b in 0..n {
                    let mut ag = C64::new(0.0, 0.0);
                    for k in 0..n {
                        // `at` holds A^T, so A_ak = at[k * n + a].
                        ag += at[k * n + a] * g(k, b);
                    }
                    let m = (ag - g(a, b) * e) * (2.0 / trace);
                    row[2 * (a * n + b)] = m.re;
                    row[2 * (a * n + b) + 1] = m.im;
                }
            }
            rows.push(row);
        }
        (residuals, rows)
    }

    /// Damped minimum-norm Gauss-Newton on the violated constraints.
    fn restore(&self, x: &mut [f64], s: &mut Scratch) {
        let mut current = self.violations_at(x, s);
        let mut damping = 1e-12;
        let mut trial = x.to_vec();
        for _ in 0..RESTORATION_ITERATIONS {
            if current <= RESTORATION_TARGET {
                break;
            }
            let (r, jac) = self.linearize(x, s);
            if r.is_empty() {
                break;
            }
            let m = r.len();
            let mut gram = vec![0.0; m * m];
            for i in 0..m {
                for j in 0..=i {
                    let v: f64 = jac[i].iter().zip(&jac[j]).map(|(a, b)| a * b).sum();
                    gram[i * m + j] = v;
                    gram[j * m + i] = v;
                }
            }
            let scale = (0..m).map(|i| gram[i * m + i]).fold(0.0, f64::max).max(1e-300);
            let mut improved = false;
            while damping < 1e6 {
                let mut damped = gram.clone();
                for i in 0..m {
                    damped[i * m + i] += damping * scale;
                }
                let Some(y) = solve_spd(&mut damped, &r, m) else {
                    damping *= 10.0;
                    continue;
                };
                for (k, t) in trial.iter_mut().enumerate() {
                    let step: f64 = (0..m).map(|i| jac[i][k] * y[i]).sum();
                    *t = x[k] - step;
                }
                let next = self.violations_at(&trial, s);
                if next < current {
                    x.copy_from_slice(&trial);
                    current = next;
                    damping = (damping * 0.1).max(1e-15);
                    improved = true;
                    break;
                }
                damping *= 10.0;
            }
            if !improved {
                break;
            }
        }
        self.build_state(x, s);
    }

    fn violations_at(&self, x: &[f64], s: &mut Scratch) -> f64 {
        self.build_state(x, s);
        self.violations(s).1
    }

    fn state(&self, x: &[f64], dims: &crate::tensor::Dims) -> Result<DensityMatrix> {
        let mut s = self.scratch();
        self.build_state(x, &mut s);
        let m = ComplexMatrix::from_vec(self.n, self.n, s.rho)?.hermitian_part();
        Ok(DensityMatrix::new_unchecked(m, dims.clone()))
    }
}

const RESTORATION_ITERATIONS: usize = 50;
const RESTORATION_TARGET: f64 = 1e-13;

/// Solves `A y = b` for symmetric positive definite `A` by Cholesky,
/// overwriting `A`. `None` when `A` is not numerically positive definite.
fn solve_spd(a: &mut [f64], b: &[f64], m: usize) -> Option<Vec<f64>> {
    for j in 0..m {
        let mut d = a[j * m + j];
        for k in 0..j {
            d -= a[j * m + k] * a[j * m + k];
        }
        if d.is_nan() || d <= 0.0 {
            return None;
        }
        let d = d.sqrt();
        a[j * m + j] = d;
        for i in (j + 1)..m {
            let mut v = a[i * m + j];
            for k in 0..j {
                v -= a[i * m + k] * a[j * m + k];
            }
            a[i * m + j] = v / d;
        }
    }
    let mut y = b.to_vec();
    for i in 0..m {
        for k in 0..i {
            y[i] -= a[i * m + k] * y[k];
        }
        y[i] /= a[i * m + i];
    }
    for i in (0..m).rev() {
        for k in (i + 1)..m {
            y[i] -= a[k * m + i] * y[k];
        }
        y[i] /= a[i * m + i];
    }
    Some(y)
}

struct SearchOutcome {
    value: f64,
    evaluations: usize,
    exhausted: bool,
}

/// Coordinate poll around `base`; returns the improved point's value.
fn explore(
    f: &mut dyn FnMut(&[f64]) -> f64,
    point: &mut [f64],
    mut value: f64,
    step: f64,
    evaluations: &mut usize,
) -> f64 {
    for i in 0..point.len() {
        let original = point[i];
        point[i] = original + step;
        let up = f(point);
        *evaluations += 1;
        if up < value {
            value = up;
            continue;
        }
        point[i] = original - step;
        let down = f(point);
        *evaluations += 1;
        if down < value {
            value = down;
            continue;
        }
        point[i] = original;
    }
    value
}

/// Hooke-Jeeves pattern search, minimizing `f` in place.
fn hooke_jeeves(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x: &mut Vec<f64>,
    step_start: f64,
    step_floor: f64,
    budget: usize,
) -> SearchOutcome {
    let mut evaluations = 1;
    let mut base_value = f(x);
    let mut step = step_start;
    let mut trial = x.clone();
    while step >= step_floor {
        if evaluations >= budget {
            return SearchOutcome {
                value: base_value,
                evaluations,
                exhausted: true,
            };
        }
        trial.copy_from_slice(x);
        let mut new_value = explore(f, &mut trial, base_value, step, &mut evaluations);
        if new_value < base_value {
            // Pattern moves along the last successful direction.
            loop {
                let previous = std::mem::replace(x, trial.clone());
                base_value = new_value;
                if evaluations >= budget {
                    break;
                }
                for ((t, &cur), &prev) in trial.iter_mut().zip(x.iter()).zip(&previous) {
                    *t = 2.0 * cur - prev;
                }
                let jumped = f(&trial);
                evaluations += 1;
                new_value = explore(f, &mut trial, jumped, step, &mut evaluations);
                if new_value >= base_value {
                    break;
                }
            }
        } else {
            step *= 0.5;
        }
    }
    SearchOutcome {
        value: base_value,
        evaluations,
        exhausted: false,
    }
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for v in x.iter_mut() {
            *v /= norm;
        }
    }
}

/// Starting factor: restart 0 is the maximally mixed state, the rest are
/// Gaussian factors from stream `(seed, ordinal)`.
fn initial_point(n: usize, seed: u64, ordinal: usize) -> Vec<f64> {
    let mut x = vec![0.0; 2 * n * n];
    if ordinal == 0 {
        for i in 0..n {
            x[2 * (i * n + i)] = 1.0;
        }
    } else {
        let mut r = rng::stream(seed, ordinal as u64);
        for v in x.iter_mut() {
            *v = rand::Rng::sample(&mut r, rand_distr::StandardNormal);
        }
    }
    normalize(&mut x);
    x
}

struct RestartResult {
    summary: RestartSummary,
    point: Vec<f64>,
}

fn run_restart(problem: &Problem, opts: &OptimizerOptions, ordinal: usize) -> RestartResult {
    let mut x = initial_point(problem.n, opts.seed, ordinal);
    let mut scratch = problem.scratch();
    let mut evaluations = 0;
    let mut exhausted = false;
    debug_assert_eq!(x.len(), problem.dimension());
    for stage in 0..opts.stages {
        let penalty = opts.penalty_at(stage);
        let mut f = |p: &[f64]| problem.objective(p, penalty, &mut scratch);
        let out = hooke_jeeves(
            &mut f,
            &mut x,
            opts.step_start,
            opts.step_floor,
            opts.max_evaluations,
        );
        debug_assert!(out.value.is_finite() || out.value == f64::INFINITY);
        evaluations += out.evaluations;
        exhausted |= out.exhausted;
        normalize(&mut x);
    }
    // The quadratic penalty leaves a residual of order 1/penalty; minimum-norm
    // Gauss-Newton steps remove it while moving the state as little as
    // possible.
    problem.restore(&mut x, &mut scratch);
    let (negativity, residual) = problem.evaluate(&x, &mut scratch);
    RestartResult {
        summary: RestartSummary {
            ordinal,
            negativity,
            residual,
            evaluations,
            budget_exhausted: exhausted,
        },
        point: x,
    }
}

fn run_all(problem: &Problem, opts: &OptimizerOptions) -> Vec<RestartResult> {
    #[cfg(feature = "parallel")]
    if opts.execution == Execution::Parallel {
        use rayon::prelude::*;
        return (0..opts.restarts)
            .into_par_iter()
            .map(|k| run_restart(problem, opts, k))
            .collect();
    }
    (0..opts.restarts)
        .map(|k| run_restart(problem, opts, k))
        .collect()
}

/// Feasible restarts first, then by objective, then residual, then ordinal.
fn rank_key(r: &RestartSummary, sense: Sense) -> (bool, f64, f64, usize) {
    let objective = match sense {
        Sense::Minimize => r.negativity,
        Sense::Maximize => -r.negativity,
    };
    (r.residual > tol::FEASIBLE, objective, r.residual, r.ordinal)
}

pub(crate) fn optimize(cs: &ConstraintSet, opts: &OptimizerOptions, sense: Sense) -> Result<NegativityBound> {
    opts.validate()?;
    let problem = Problem::new(cs, sense)?;
    let results = run_all(&problem, opts);
    let best = results
        .iter()
        .min_by(|a, b| {
            let ka = rank_key(&a.summary, sense);
            let kb = rank_key(&b.summary, sense);
            ka.0.cmp(&kb.0)
                .then(ka.1.total_cmp(&kb.1))
                .then(ka.2.total_cmp(&kb.2))
                .then(ka.3.cmp(&kb.3))
        })
        .expect("at least one restart");
    if !best.summary.residual.is_finite() || !best.summary.negativity.is_finite() {
        return Err(Error::NonConvergence {
            sweeps: crate::tensor::MAX_SWEEPS,
        });
    }
    if best.summary.residual > tol::INFEASIBLE {
        return Err(Error::Infeasible {
            residual: best.summary.residual,
        });
    }
    let witness = problem.state(&best.point, cs.dims())?;
    Ok(NegativityBound {
        value: best.summary.negativity,
        residual: best.summary.residual,
        witness,
        restarts: results.into_iter().map(|r| r.summary).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_search_finds_quadratic_minimum() {
        let mut f =
            |x: &[f64]| (x[0] - 0.3).powi(2) + 10.0 * (x[1] + 0.7).powi(2) + (x[0] * x[1] - 0.0).abs() * 0.0;
        let mut x = vec![0.0, 0.0];
        let out = hooke_jeeves(&mut f, &mut x, 0.2, 1e-9, 100_000);
        assert!(out.value < 1e-12);
        assert!((x[0] - 0.3).abs() < 1e-6 && (x[1] + 0.7).abs() < 1e-6);
    }

    #[test]
    fn pattern_search_respects_budget() {
        let mut f = |x: &[f64]| x.iter().map(|v| (v - 5.0).powi(2)).sum::<f64>();
        let mut x = vec![0.0; 10];
        let out = hooke_jeeves(&mut f, &mut x, 0.2, 1e-12, 50);
        assert!(out.exhausted);
    }

    #[test]
    fn penalty_schedule_is_geometric() {
        let o = OptimizerOptions::default();
        assert_eq!(o.penalty_at(0), 10.0);
        assert!((o.penalty_at(5) - 1e6).abs() < 1e-6);
        assert!((o.penalty_at(1) - 100.0).abs() < 1e-9);
    }

    #[test]
    fn options_validation() {
        let mut o = OptimizerOptions::default();
        assert!(o.validate().is_ok());
        o.restarts = 0;
        assert!(o.validate().is_err());
        let o = OptimizerOptions {
            step_floor: 1.0,
            ..Default::default()
        };
        assert!(o.validate().is_err());
    }

    #[test]
    fn initial_points_are_deterministic() {
        assert_eq!(initial_point(4, 3, 5), initial_point(4, 3, 5));
        assert_ne!(initial_point(4, 3, 5), initial_point(4, 3, 6));
        let x0 = initial_point(2, 0, 0);
        let s = (0.5f64).sqrt();
        let want = [s, 0.0, 0.0, 0.0, 0.0, 0.0, s, 0.0];
        assert!(x0.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-15));
    }

    #[test]
    fn evaluator_matches_library_negativity() {
        let cs = ConstraintSet::new(crate::tensor::Dims::two_qubits());
        let problem = Problem::new(&cs, Sense::Minimize).unwrap();
        let x = initial_point(4, 17, 3);
        let rho = problem.state(&x, cs.dims()).unwrap();
        let mut s = problem.scratch();
        let (neg, _) = problem.evaluate(&x, &mut s);
        let reference = crate::entanglement::negativity(&rho, cs.dims()).unwrap();
        assert!((neg - reference).abs() < 1e-12);
    }

    #[test]
    fn rejects_large_systems() {
        let cs = ConstraintSet::new(crate::tensor::Dims::new(vec![2, 5]).unwrap());
        assert!(matches!(
            optimize(&cs, &OptimizerOptions::default(), Sense::Minimize),
            Err(Error::UnsupportedDims(_))
        ));
    }
}

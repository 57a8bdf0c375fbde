//! Dörfler marking and the SOLVE, ESTIMATE, MARK, REFINE loop.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::estimator::{estimate, quantity_a, AWeights, EstimatorReport};
use crate::linsolve::{solve, SolverOptions};
use crate::mesh::Mesh;
use crate::mixed::{assemble, MixedSolution};
use crate::problem::{exact_error, variants, ProblemSpec};

/// Smallest set of elements whose squared indicators reach `theta^2` of the
/// total. Ties are broken by ascending element id. The result is sorted.
pub fn mark(indicators: &[f64], theta: f64) -> Result<Vec<usize>> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidTheta(theta));
    }
    let mut order: Vec<usize> = (0..indicators.len()).collect();
    order.sort_by(|&i, &j| indicators[j].total_cmp(&indicators[i]).then(i.cmp(&j)));
    let total: f64 = order.iter().map(|&i| indicators[i]).sum();
    if total <= 0.0 {
        return Ok(Vec::new());
    }
    let target = theta * theta * total;
    let mut acc = 0.0;
    let mut marked = Vec::new();
    for &i in &order {
        if acc >= target {
            break;
        }
        acc += indicators[i];
        marked.push(i);
    }
    marked.sort_unstable();
    Ok(marked)
}

/// Experimental order of convergence with respect to the number of triangles.
pub fn eoc(e_prev: f64, e: f64, dof_prev: usize, dof: usize) -> Option<f64> {
    if e_prev <= 0.0 || e <= 0.0 || dof_prev == dof {
        return None;
    }
    let r = (e_prev / e).ln() / (dof as f64 / dof_prev as f64).ln();
    r.is_finite().then_some(r)
}

/// Least-squares fit `log y = c + slope log x`. Returns `(slope, r^2)`.
pub fn loglog_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some((slope, r2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    pub max_iters: usize,
    pub max_dof: usize,
    pub eta_target: Option<f64>,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            max_iters: 25,
            max_dof: 100_000,
            eta_target: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptConfig {
    pub theta: f64,
    /// Bisections per marked element.
    pub bisections: usize,
    pub stop: StopRule,
    pub weights: AWeights,
    pub solver: SolverOptions,
}

impl Default for AdaptConfig {
    fn default() -> Self {
        AdaptConfig {
            theta: 0.5,
            bisections: 2,
            stop: StopRule::default(),
            weights: AWeights::default(),
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// 1-based; `k = 1` is the initial mesh.
    pub k: usize,
    /// Number of triangles.
    pub ndof: usize,
    pub error: Option<f64>,
    pub eta: f64,
    pub osc: f64,
    pub quantity_a: f64,
    pub eoc_e: Option<f64>,
    pub eoc_eta: Option<f64>,
    pub marked: usize,
    pub residual: f64,
    pub seconds: f64,
}

/// Everything computed on one mesh, handed to the step callback.
pub struct Step<'a> {
    pub record: &'a IterationRecord,
    pub mesh: &'a Mesh,
    pub solution: &'a MixedSolution,
    pub estimator: &'a EstimatorReport,
}

#[derive(Debug)]
pub struct RunFailure {
    pub error: Error,
    pub history: Vec<IterationRecord>,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (after {} iterations)", self.error, self.history.len())
    }
}

impl std::error::Error for RunFailure {}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub history: Vec<IterationRecord>,
    pub mesh: Mesh,
    pub solution: MixedSolution,
}

enum Strategy {
    Adaptive,
    Uniform,
}

pub fn run_amfem(
    spec: &ProblemSpec,
    config: &AdaptConfig,
    on_step: impl FnMut(&Step) -> Result<()>,
) -> std::result::Result<RunResult, RunFailure> {
    run(spec, config, Strategy::Adaptive, on_step)
}

/// Same loop with every element marked and bisected once per level.
pub fn run_uniform(
    spec: &ProblemSpec,
    config: &AdaptConfig,
    on_step: impl FnMut(&Step) -> Result<()>,
) -> std::result::Result<RunResult, RunFailure> {
    run(spec, config, Strategy::Uniform, on_step)
}

fn run(
    spec: &ProblemSpec,
    config: &AdaptConfig,
    strategy: Strategy,
    mut on_step: impl FnMut(&Step) -> Result<()>,
) -> std::result::Result<RunResult, RunFailure> {
    let mut history: Vec<IterationRecord> = Vec::new();
    macro_rules! tryrun {
        ($e:expr) => {
            match $e {
                Ok(v) => v,
                Err(error) => return Err(RunFailure { error, history }),
            }
        };
    }
    if config.bisections == 0 {
        return Err(RunFailure {
            error: Error::InvalidBisectionCount,
            history,
        });
    }
    tryrun!(mark(&[], config.theta));
    let mut weights = config.weights;
    if !spec.has_exact() {
        weights.divergence = 0.0;
    }
    let mut mesh = tryrun!(spec.initial_mesh());
    let mut k = 1;
    loop {
        let start = Instant::now();
        let var = tryrun!(variants(&mesh, spec));
        let system = tryrun!(assemble(&mesh, spec, &var));
        let (solution, report) = tryrun!(solve(&system, &config.solver));
        let est = estimate(&mesh, spec, &var, &solution);
        let a = tryrun!(quantity_a(&mesh, spec, &var, &solution, &est, weights));
        let error = spec.exact.as_ref().map(|_| exact_error(&mesh, spec, &var, &solution));
        let error = tryrun!(error.transpose()).map(|e| e.energy);
        let ndof = mesh.num_triangles();

        let done = k >= config.stop.max_iters
            || est.eta2 == 0.0
            || config.stop.eta_target.is_some_and(|t| est.eta() <= t);
        let marked = if done {
            Vec::new()
        } else {
            match strategy {
                Strategy::Adaptive => tryrun!(mark(&est.indicators(), config.theta)),
                Strategy::Uniform => (0..ndof).collect(),
            }
        };

        let prev = history.last();
        let record = IterationRecord {
            k,
            ndof,
            error,
            eta: est.eta(),
            osc: est.osc(),
            quantity_a: a.total(),
            eoc_e: prev.and_then(|p| eoc(p.error?, error?, p.ndof, ndof)),
            eoc_eta: prev.and_then(|p| eoc(p.eta, est.eta(), p.ndof, ndof)),
            marked: marked.len(),
            residual: report.residual,
            seconds: start.elapsed().as_secs_f64(),
        };
        tryrun!(on_step(&Step {
            record: &record,
            mesh: &mesh,
            solution: &solution,
            estimator: &est,
        }));
        history.push(record);
        if done || marked.is_empty() {
            return Ok(RunResult { history, mesh, solution });
        }
        let passes = match strategy {
            Strategy::Adaptive => config.bisections,
            Strategy::Uniform => 1,
        };
        let next = tryrun!(mesh.refine(&marked, passes));
        if next.num_triangles() > config.stop.max_dof {
            return Ok(RunResult { history, mesh, solution });
        }
        mesh = next;
        k += 1;
    }
}

use std::fmt;
use std::fmt::Write as _;

use crate::geometry::Trajectory;

use super::banded::BandedMatrix;
use super::problem::OptProblem;
use super::OptError;

/// One accepted iteration. Row 0 records the initial cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub cost: f64,
    pub damping: f64,
    pub step_norm: f64,
    /// Actual over predicted cost decrease.
    pub gain_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    MaxIterations,
    RelativeDecrease,
    SmallStep,
    ZeroCost,
    /// No damping level produced a cost decrease.
    NoDescent,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::MaxIterations => "max_iterations",
            Termination::RelativeDecrease => "relative_decrease",
            Termination::SmallStep => "small_step",
            Termination::ZeroCost => "zero_cost",
            Termination::NoDescent => "no_descent",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub trajectory: Trajectory,
    pub initial_cost: f64,
    pub final_cost: f64,
    /// Accepted steps.
    pub iterations: usize,
    pub termination: Termination,
    pub trace: Vec<TraceRow>,
}

impl SolveOutcome {
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iteration,cost,damping,step_norm,gain_ratio\n");
        for r in &self.trace {
            let _ = writeln!(
                out,
                "{},{:.12e},{:.6e},{:.6e},{:.6}",
                r.iteration, r.cost, r.damping, r.step_norm, r.gain_ratio
            );
        }
        out
    }
}

const MAX_DAMPING: f64 = 1e16;

/// Gauss-Newton normal equations `H = J^T W J`, `g = J^T W r` at `x`, with
/// fixed variables pinned to identity rows and zero gradient.
fn linearize(prob: &OptProblem<'_>, x: &[f64], bandwidth: usize) -> (BandedMatrix, Vec<f64>) {
    let n = x.len();
    let h = prob.config.fd_step;
    let mut hess = BandedMatrix::zeros(n, bandwidth);
    let mut grad = vec![0.0; n];
    let mut work = x.to_vec();
    for f in &prob.factors {
        let frozen = prob.freeze(f, x);
        let r0 = prob.evaluate(f, x, frozen);
        let weight = f.kind.weight(&prob.config);
        if weight == 0.0 {
            continue;
        }
        let vars: Vec<usize> = f.variables().into_iter().filter(|&v| !prob.fixed[v]).collect();
        let mut jac: Vec<[f64; 3]> = Vec::with_capacity(vars.len());
        for &v in &vars {
            work[v] = x[v] + h;
            let rp = prob.evaluate(f, &work, frozen);
            work[v] = x[v] - h;
            let rm = prob.evaluate(f, &work, frozen);
            work[v] = x[v];
            let mut col = [0.0; 3];
            for k in 0..r0.dim {
                col[k] = (rp.values[k] - rm.values[k]) / (2.0 * h);
            }
            jac.push(col);
        }
        for (a, &va) in vars.iter().enumerate() {
            let ja = &jac[a];
            grad[va] += weight * (0..r0.dim).map(|k| ja[k] * r0.values[k]).sum::<f64>();
            for (b, &vb) in vars.iter().enumerate().take(a + 1) {
                let jb = &jac[b];
                let v = weight * (0..r0.dim).map(|k| ja[k] * jb[k]).sum::<f64>();
                if v != 0.0 {
                    hess.add(va, vb, v);
                }
            }
        }
    }
    for i in 0..n {
        if prob.fixed[i] {
            hess.pin(i);
            grad[i] = 0.0;
        }
    }
    (hess, grad)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Levenberg-Marquardt on the problem's current variables, which are
/// overwritten with the result.
///
/// Damping is applied as `lambda * (diag(H) + 1)`. A trial step is projected
/// onto the bounds (`dt >= dt_min`, `chord <= l <= l_max`) and accepted when
/// it lowers the cost with a positive gain ratio.
pub fn solve(prob: &mut OptProblem<'_>) -> Result<SolveOutcome, OptError> {
    let cfg = prob.config.clone();
    let bandwidth = prob.bandwidth();
    let failure = |f: super::Factor, iteration: usize| OptError::NumericalFailure { factor: f.to_string(), iteration };

    let mut x = prob.variables.clone();
    let mut cost = prob.checked_cost(&x).map_err(|f| failure(f, 0))?;
    let initial_cost = cost;
    let mut lambda = cfg.initial_damping;
    let mut trace = vec![TraceRow { iteration: 0, cost, damping: lambda, step_norm: 0.0, gain_ratio: 0.0 }];
    let mut termination = Termination::MaxIterations;
    let mut accepted = 0usize;

    for iteration in 1..=cfg.max_iterations {
        if cost == 0.0 {
            termination = Termination::ZeroCost;
            break;
        }
        let (hess, grad) = linearize(prob, &x, bandwidth);
        let neg_grad: Vec<f64> = grad.iter().map(|g| -g).collect();
        let diag = hess.diagonal();
        let mut step = None;
        for _ in 0..=cfg.max_rejections {
            let mut damped = hess.clone();
            for (i, &d) in diag.iter().enumerate() {
                if !prob.fixed[i] {
                    damped.add(i, i, lambda * (d + 1.0));
                }
            }
            let Some(delta) = damped.cholesky_solve(&neg_grad) else {
                lambda *= cfg.damping_increase;
                continue;
            };
            let mut trial = x.clone();
            for i in 0..x.len() {
                if !prob.fixed[i] {
                    trial[i] += delta[i];
                }
            }
            prob.clamp(&mut trial);
            let taken: Vec<f64> = trial.iter().zip(&x).map(|(t, v)| t - v).collect();
            let predicted = -(2.0 * dot(&grad, &taken) + dot(&taken, &hess.mul_vec(&taken)));
            let trial_cost = prob.checked_cost(&trial).map_err(|f| failure(f, iteration))?;
            if trial_cost < cost && predicted > 0.0 {
                let gain_ratio = (cost - trial_cost) / predicted;
                step = Some((trial, trial_cost, dot(&taken, &taken).sqrt(), gain_ratio));
                lambda = (lambda / cfg.damping_decrease).max(f64::MIN_POSITIVE);
                break;
            }
            lambda *= cfg.damping_increase;
            if lambda > MAX_DAMPING {
                break;
            }
        }
        let Some((trial, trial_cost, step_norm, gain_ratio)) = step else {
            termination = Termination::NoDescent;
            break;
        };
        let relative = (cost - trial_cost) / cost;
        x = trial;
        cost = trial_cost;
        accepted += 1;
        trace.push(TraceRow { iteration, cost, damping: lambda, step_norm, gain_ratio });
        if relative < cfg.min_relative_decrease {
            termination = Termination::RelativeDecrease;
            break;
        }
        if step_norm < cfg.min_step_norm {
            termination = Termination::SmallStep;
            break;
        }
    }

    prob.variables = x;
    Ok(SolveOutcome {
        trajectory: prob.trajectory(),
        initial_cost,
        final_cost: cost,
        iterations: accepted,
        termination,
        trace,
    })
}

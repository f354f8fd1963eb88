//! Numeric fitting: generalized iterative scaling and damped Newton.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::ratpoly::Rational;
use crate::toric::{rank, DistributionVector};

use super::{model_unchecked, moments, MaxEntProblem};

/// `||xi||_inf` beyond this means the targets sit on or outside the boundary
/// of the moment polytope.
pub const DIVERGENCE_BOUND: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Gis,
    Newton,
    Groebner,
}

impl SolverKind {
    pub fn default_max_iter(self) -> usize {
        match self {
            SolverKind::Gis => 10_000,
            SolverKind::Newton | SolverKind::Groebner => 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub tol: f64,
    /// `None` uses the solver default.
    pub max_iter: Option<usize>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Lagrange parameters of the plain model.
    pub xi: Vec<f64>,
    /// `xi / N` in sample mode.
    pub xi_tilde: Option<Vec<f64>>,
    pub p: DistributionVector,
    /// Exact distribution when the algebraic path found rational roots.
    pub p_exact: Option<Vec<Rational>>,
    pub log_z: f64,
    pub residual: f64,
    pub iterations: usize,
    pub solver: SolverKind,
}

impl FitResult {
    pub(crate) fn assemble(
        problem: &MaxEntProblem,
        xi: Vec<f64>,
        iterations: usize,
        solver: SolverKind,
    ) -> Self {
        let prior = problem.prior_f64();
        let (p, log_z) = model_unchecked(problem.matrix(), &xi, prior.as_deref());
        let residual = moment_residual(problem, &p);
        let xi_tilde = problem
            .samples()
            .map(|s| xi.iter().map(|x| x / s.count() as f64).collect());
        Self {
            xi,
            xi_tilde,
            p,
            p_exact: None,
            log_z,
            residual,
            iterations,
            solver,
        }
    }
}

fn moment_residual(problem: &MaxEntProblem, p: &[f64]) -> f64 {
    let got = moments(problem.matrix(), p).expect("shapes validated");
    got.iter()
        .zip(problem.target_values())
        .map(|(g, t)| (g - t).abs())
        .fold(0.0, f64::max)
}

fn infeasible(iterations: usize, residual: f64, detail: impl Into<String>) -> Error {
    Error::InfeasibleMoments {
        iterations,
        residual,
        detail: detail.into(),
    }
}

/// Fits the model by GIS or Newton.
///
/// Sample problems are fitted against `sigma / N`; the result also reports
/// `xi~ = xi / N`.
pub fn fit_numeric(
    problem: &MaxEntProblem,
    solver: SolverKind,
    opts: &FitOptions,
) -> Result<FitResult> {
    if !(opts.tol > 0.0) {
        return Err(Error::Argument(format!(
            "tolerance must be positive, got {}",
            opts.tol
        )));
    }
    let a = problem.matrix();
    let r = rank(&a.with_ones_row());
    if r < a.d() + 1 {
        return Err(Error::RankDeficient(format!(
            "constraints together with normalization have rank {r} < {}; remove dependent constraints",
            a.d() + 1
        )));
    }
    let max_iter = opts.max_iter.unwrap_or(solver.default_max_iter());
    match solver {
        SolverKind::Gis => gis(problem, opts.tol, max_iter),
        SolverKind::Newton => newton(problem, opts.tol, max_iter),
        SolverKind::Groebner => Err(Error::Argument(
            "the algebraic solver is reached through fit_algebraic".into(),
        )),
    }
}

/// Fits many problems, in parallel when `exec` allows.
pub fn fit_batch(
    problems: &[MaxEntProblem],
    solver: SolverKind,
    opts: &FitOptions,
    exec: Execution,
) -> Vec<Result<FitResult>> {
    par::map(exec, problems, |p| fit_numeric(p, solver, opts))
}

fn gis(problem: &MaxEntProblem, tol: f64, max_iter: usize) -> Result<FitResult> {
    let a = problem.matrix();
    let (d, m) = (a.d(), a.m());
    let targets = problem.target_values();
    let prior = problem.prior_f64();

    let mut active = Vec::new();
    for i in 0..d {
        let row = a.row(i);
        let lo = *row.iter().min().expect("m >= 2");
        let hi = *row.iter().max().expect("m >= 2");
        if lo == hi {
            if (targets[i] - lo as f64).abs() > tol {
                return Err(infeasible(
                    0,
                    (targets[i] - lo as f64).abs(),
                    format!(
                        "constraint {} is constant {lo} but the target is {}",
                        i + 1,
                        targets[i]
                    ),
                ));
            }
        } else {
            active.push((i, lo));
        }
    }
    // shifted features f_i(j) = A[i][j] - min_i
    let features: Vec<Vec<f64>> = active
        .iter()
        .map(|&(i, lo)| a.row(i).iter().map(|&x| (x - lo) as f64).collect())
        .collect();
    let shifted: Vec<f64> = active
        .iter()
        .map(|&(i, lo)| targets[i] - lo as f64)
        .collect();
    let sums: Vec<f64> = (0..m)
        .map(|j| features.iter().map(|f| f[j]).sum())
        .collect();
    let c = sums.iter().copied().fold(0.0, f64::max);
    let slack: Vec<f64> = sums.iter().map(|s| c - s).collect();
    let slack_target = c - shifted.iter().sum::<f64>();
    let slack_used = slack.iter().any(|&s| s > 0.0);

    if let Some(k) = shifted.iter().position(|&f| f <= 0.0) {
        let i = active[k].0;
        return Err(infeasible(
            0,
            shifted[k].abs(),
            format!(
                "target {} of constraint {} is not above the smallest value {}",
                targets[i],
                i + 1,
                active[k].1
            ),
        ));
    }
    if (slack_used && slack_target <= 0.0) || (!slack_used && slack_target.abs() > tol) {
        return Err(infeasible(
            0,
            slack_target.abs(),
            "targets lie on or outside the moment polytope",
        ));
    }

    let mut lambda = vec![0.0; active.len()];
    let mut lambda_slack = 0.0;
    let to_xi = |lambda: &[f64], ls: f64| {
        let mut xi = vec![0.0; d];
        for (k, &(i, _)) in active.iter().enumerate() {
            xi[i] = -(lambda[k] - ls);
        }
        xi
    };
    let mut residual = f64::INFINITY;
    for iter in 0..=max_iter {
        let xi = to_xi(&lambda, lambda_slack);
        if xi.iter().any(|x| x.abs() > DIVERGENCE_BOUND) {
            return Err(infeasible(iter, residual, "parameters diverged"));
        }
        let (p, _) = model_unchecked(a, &xi, prior.as_deref());
        residual = moment_residual(problem, &p);
        if residual <= tol {
            return Ok(FitResult::assemble(problem, xi, iter, SolverKind::Gis));
        }
        if iter == max_iter {
            break;
        }
        for (k, f) in features.iter().enumerate() {
            let expect: f64 = f.iter().zip(p.iter()).map(|(x, q)| x * q).sum();
            lambda[k] += (shifted[k] / expect).ln() / c;
        }
        if slack_used {
            let expect: f64 = slack.iter().zip(p.iter()).map(|(x, q)| x * q).sum();
            lambda_slack += (slack_target / expect).ln() / c;
        }
    }
    Err(infeasible(max_iter, residual, "iteration limit reached"))
}

/// Mean and covariance of the constraint rows under `p`.
fn mean_cov(problem: &MaxEntProblem, p: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
    let a = problem.matrix();
    let d = a.d();
    let mean = DVector::from_vec(moments(a, p).expect("shapes validated"));
    let mut cov = DMatrix::zeros(d, d);
    for (j, &q) in p.iter().enumerate() {
        let col = DVector::from_iterator(d, (0..d).map(|i| a.entry(i, j) as f64)) - &mean;
        cov += q * &col * col.transpose();
    }
    (mean, cov)
}

/// Dual value `ln Z(xi) + xi . T`, convex with gradient `T - E[t]`.
fn dual_value(
    problem: &MaxEntProblem,
    prior: Option<&[f64]>,
    t: &DVector<f64>,
    xi: &DVector<f64>,
) -> f64 {
    let (_, log_z) = model_unchecked(problem.matrix(), xi.as_slice(), prior);
    log_z + xi.dot(t)
}

fn newton(problem: &MaxEntProblem, tol: f64, max_iter: usize) -> Result<FitResult> {
    let a = problem.matrix();
    let d = a.d();
    let t = DVector::from_vec(problem.target_values());
    let prior = problem.prior_f64();
    let mut xi = DVector::<f64>::zeros(d);
    let mut residual = f64::INFINITY;

    for iter in 0..=max_iter {
        let (p, _) = model_unchecked(a, xi.as_slice(), prior.as_deref());
        let (mean, cov) = mean_cov(problem, &p);
        let diff = &mean - &t;
        residual = diff.amax();
        if residual <= tol {
            return Ok(FitResult::assemble(
                problem,
                xi.as_slice().to_vec(),
                iter,
                SolverKind::Newton,
            ));
        }
        if iter == max_iter {
            break;
        }
        let Some(chol) = cov.clone().cholesky() else {
            return Err(infeasible(iter, residual, "covariance became singular"));
        };
        // xi <- xi + H^-1 (E[t] - T)
        let step = chol.solve(&diff);
        let f0 = dual_value(problem, prior.as_deref(), &t, &xi);
        let slope = -diff.dot(&step);
        let mut s = 1.0;
        let next = loop {
            let cand = &xi + s * &step;
            let f1 = dual_value(problem, prior.as_deref(), &t, &cand);
            if f1 <= f0 + 1e-4 * s * slope {
                break cand;
            }
            let (q, _) = model_unchecked(a, cand.as_slice(), prior.as_deref());
            let r1 = moment_residual(problem, &q);
            if r1 < residual || s < 1e-12 {
                break cand;
            }
            s *= 0.5;
        };
        xi = next;
        if xi.amax() > DIVERGENCE_BOUND {
            return Err(infeasible(iter + 1, residual, "parameters diverged"));
        }
    }
    Err(infeasible(max_iter, residual, "iteration limit reached"))
}

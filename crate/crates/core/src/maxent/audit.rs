//! Feasible-set sampling and the entropy / I-divergence optimality audit.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::toric::{ConstraintMatrix, DistributionVector};

use super::{kl_divergence, shannon_entropy, FitResult, MaxEntProblem};

/// Attempts per sample before giving up on that index.
const MAX_ATTEMPTS: usize = 10_000;

/// Projection onto `{q : A q = T, sum q = 1}`.
struct AffineProjector {
    m_mat: DMatrix<f64>,
    pinv: DMatrix<f64>,
    rhs: DVector<f64>,
}

impl AffineProjector {
    fn new(a: &ConstraintMatrix, targets: &[f64]) -> Result<Self> {
        let (d, m) = (a.d(), a.m());
        let m_mat = DMatrix::from_fn(
            d + 1,
            m,
            |i, j| {
                if i < d {
                    a.entry(i, j) as f64
                } else {
                    1.0
                }
            },
        );
        let pinv = m_mat
            .clone()
            .pseudo_inverse(1e-12)
            .map_err(|e| Error::Argument(format!("pseudo-inverse failed: {e}")))?;
        let mut rhs = DVector::from_element(d + 1, 1.0);
        for (i, t) in targets.iter().enumerate() {
            rhs[i] = *t;
        }
        Ok(Self { m_mat, pinv, rhs })
    }

    fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        x - &self.pinv * (&self.m_mat * x - &self.rhs)
    }
}

/// `count` distributions satisfying the moment constraints of `problem`.
///
/// Sample `k` draws `u` uniformly on the simplex and `s` uniformly in
/// `(0, 1)`, projects `anchor + s (u - anchor)` onto the affine constraint
/// set and rejects the result when it leaves the simplex. Sample `k` uses its
/// own stream of a ChaCha generator seeded by `seed`, so the output does not
/// depend on `exec`.
pub fn sample_feasible(
    problem: &MaxEntProblem,
    anchor: &DistributionVector,
    count: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<DistributionVector>> {
    let a = problem.matrix();
    let m = a.m();
    if anchor.len() != m {
        return Err(Error::Dimension(format!(
            "anchor of length {} for {m} cells",
            anchor.len()
        )));
    }
    let proj = AffineProjector::new(a, &problem.target_values())?;
    let anchor = DVector::from_column_slice(anchor.as_slice());
    let draws = par::map_range(exec, count, |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        for _ in 0..MAX_ATTEMPTS {
            let e: Vec<f64> = (0..m).map(|_| Exp1.sample(&mut rng)).collect();
            let total: f64 = e.iter().sum();
            let u = DVector::from_iterator(m, e.iter().map(|x| x / total));
            let s: f64 = rng.random();
            let x = &anchor + s * (u - &anchor);
            let q = proj.project(&x);
            if q.iter().all(|&v| v >= 0.0) {
                let mut v: Vec<f64> = q.iter().copied().collect();
                let sum: f64 = v.iter().sum();
                v.iter_mut().for_each(|x| *x /= sum);
                return DistributionVector::new(v).ok();
            }
        }
        None
    });
    draws
        .into_iter()
        .enumerate()
        .map(|(k, d)| {
            d.ok_or_else(|| Error::Argument(format!("sample {k} never landed in the simplex")))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub samples: usize,
    pub fitted_entropy: f64,
    pub max_sampled_entropy: f64,
    /// Divergence from the normalized prior (uniform when absent).
    pub fitted_kl: f64,
    pub min_sampled_kl: f64,
    /// Samples beating the fit by more than the slack.
    pub violations: usize,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Compares the fit against feasible samples: with a prior the fit must have
/// the smallest divergence, without one the largest entropy, up to `slack`.
pub fn entropy_audit(
    problem: &MaxEntProblem,
    fit: &FitResult,
    samples: &[DistributionVector],
    slack: f64,
    exec: Execution,
) -> Result<AuditReport> {
    let h = problem.prior_distribution();
    let fitted_entropy = shannon_entropy(&fit.p);
    let fitted_kl = kl_divergence(&fit.p, &h)?;
    let scores = par::map(exec, samples, |q| {
        kl_divergence(q, &h).map(|kl| (shannon_entropy(q), kl))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let use_kl = problem.prior().is_some();
    let violations = scores
        .iter()
        .filter(|(s, kl)| {
            if use_kl {
                fitted_kl > kl + slack
            } else {
                fitted_entropy < s - slack
            }
        })
        .count();
    Ok(AuditReport {
        samples: samples.len(),
        fitted_entropy,
        max_sampled_entropy: scores.iter().map(|x| x.0).fold(f64::NEG_INFINITY, f64::max),
        fitted_kl,
        min_sampled_kl: scores.iter().map(|x| x.1).fold(f64::INFINITY, f64::min),
        violations,
    })
}

//! Maximum-entropy and minimum I-divergence estimation for integer-valued
//! constraint functions.
//!
//! The model family is `p_j(xi) = h_j exp(-sum_i xi_i t_i(j)) / Z(xi)`.
//! Two substitutions connect it to polynomials:
//!
//! * primal / toric: `theta_i = exp(-xi_i)` turns `p` into the toric
//!   parametrization and the moment equations into [`direct_system`];
//! * dual: `theta_i = exp(+xi_i)` turns `exp(Psi(xi))` into the Laurent
//!   polynomial of [`dual_system`].

mod algebraic;
mod audit;
mod fit;
mod roots;
mod system;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratpoly::{rat_to_f64, Rational};
use crate::toric::{softmax, ConstraintMatrix, DistributionVector};

pub use algebraic::{
    fit_algebraic, solve_algebraic, AlgebraicSolution, MAX_ALGEBRAIC_DEGREE, MAX_ALGEBRAIC_VARS,
};
pub use audit::{entropy_audit, sample_feasible, AuditReport};
pub use fit::{fit_batch, fit_numeric, FitOptions, FitResult, SolverKind, DIVERGENCE_BOUND};
pub use roots::{positive_roots, RootInterval, UniPoly};
pub use system::{
    direct_system, direct_system_weighted, dual_objective_value, dual_system, dual_system_weighted,
    PolySystem, Provenance,
};

/// Shannon entropy in nats, with `0 ln 0 = 0`.
pub fn shannon_entropy(p: &DistributionVector) -> f64 {
    -p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.ln())
        .sum::<f64>()
}

/// `KL(p || h) = sum_j p_j ln(p_j / h_j)`.
pub fn kl_divergence(p: &DistributionVector, h: &DistributionVector) -> Result<f64> {
    if p.len() != h.len() {
        return Err(Error::Dimension(format!(
            "distributions of length {} and {}",
            p.len(),
            h.len()
        )));
    }
    let mut total = 0.0;
    for (j, (&pj, &hj)) in p.iter().zip(h.iter()).enumerate() {
        if pj == 0.0 {
            continue;
        }
        if hj == 0.0 {
            return Err(Error::Domain(format!(
                "reference has zero mass at cell {} where p is positive",
                j + 1
            )));
        }
        total += pj * (pj / hj).ln();
    }
    Ok(total.max(0.0))
}

/// `p_j ∝ h_j exp(-sum_i xi_i A[i][j])` and `ln Z = ln sum_j h_j exp(...)`.
///
/// `h = None` stands for unit weights.
pub fn model_distribution(
    a: &ConstraintMatrix,
    xi: &[f64],
    h: Option<&[f64]>,
) -> Result<(DistributionVector, f64)> {
    if xi.len() != a.d() {
        return Err(Error::Dimension(format!(
            "xi has length {}, expected {}",
            xi.len(),
            a.d()
        )));
    }
    if let Some(h) = h {
        if h.len() != a.m() || h.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::Domain("prior must be positive with length m".into()));
        }
    }
    Ok(model_unchecked(a, xi, h))
}

pub(crate) fn model_unchecked(
    a: &ConstraintMatrix,
    xi: &[f64],
    h: Option<&[f64]>,
) -> (DistributionVector, f64) {
    let logw: Vec<f64> = (0..a.m())
        .map(|j| {
            let base = h.map_or(0.0, |h| h[j].ln());
            base - xi
                .iter()
                .enumerate()
                .map(|(i, x)| x * a.entry(i, j) as f64)
                .sum::<f64>()
        })
        .collect();
    softmax(&logw)
}

/// Expected constraint values `(sum_j A[i][j] p_j)_i`.
pub fn moments(a: &ConstraintMatrix, p: &[f64]) -> Result<Vec<f64>> {
    if p.len() != a.m() {
        return Err(Error::Dimension(format!(
            "distribution of length {} for {} cells",
            p.len(),
            a.m()
        )));
    }
    Ok(a.rows()
        .iter()
        .map(|row| row.iter().zip(p).map(|(&t, &q)| t as f64 * q).sum())
        .collect())
}

/// Observations (1-based cells) with their exact sample sums.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleData {
    observations: Vec<usize>,
    count: u64,
    sigma: Vec<i64>,
}

impl SampleData {
    pub fn observations(&self) -> &[usize] {
        &self.observations
    }

    /// Number of observations `N`.
    pub fn count(&self) -> u64 {
        self.count
    }

    /// Sample sums `sigma_i = sum_l t_i(O_l)`.
    pub fn sigma(&self) -> &[i64] {
        &self.sigma
    }

    /// Exact sample means `sigma_i / N`.
    pub fn means(&self) -> Vec<Rational> {
        self.sigma
            .iter()
            .map(|&s| Rational::new(s.into(), (self.count as i64).into()))
            .collect()
    }
}

/// Counts observations and accumulates `sigma_i = sum_l A[i][O_l - 1]`.
pub fn sample_sums(observations: &[usize], a: &ConstraintMatrix) -> Result<SampleData> {
    if observations.is_empty() {
        return Err(Error::Input("no observations".into()));
    }
    if let Some(&bad) = observations.iter().find(|&&o| o == 0 || o > a.m()) {
        return Err(Error::Input(format!(
            "observation {bad} outside the alphabet 1..={}",
            a.m()
        )));
    }
    let sigma = (0..a.d())
        .map(|i| observations.iter().map(|&o| a.entry(i, o - 1)).sum())
        .collect();
    Ok(SampleData {
        observations: observations.to_vec(),
        count: observations.len() as u64,
        sigma,
    })
}

/// Moment information: prescribed expectations or raw samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Targets {
    Moments(Vec<Rational>),
    Samples(SampleData),
}

/// A complete estimation instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxEntProblem {
    matrix: ConstraintMatrix,
    prior: Option<Vec<Rational>>,
    targets: Targets,
}

impl MaxEntProblem {
    pub fn new(
        matrix: ConstraintMatrix,
        targets: Targets,
        prior: Option<Vec<Rational>>,
    ) -> Result<Self> {
        match &targets {
            Targets::Moments(t) if t.len() != matrix.d() => {
                return Err(Error::Dimension(format!(
                    "{} targets for {} constraints",
                    t.len(),
                    matrix.d()
                )))
            }
            Targets::Samples(s) if s.sigma.len() != matrix.d() => {
                return Err(Error::Dimension(
                    "sample sums do not match constraints".into(),
                ))
            }
            _ => {}
        }
        if let Some(h) = &prior {
            if h.len() != matrix.m() {
                return Err(Error::Dimension(format!(
                    "prior of length {} for {} cells",
                    h.len(),
                    matrix.m()
                )));
            }
            if h.iter().any(|x| *x <= Rational::from_integer(0.into())) {
                return Err(Error::Domain("prior must be strictly positive".into()));
            }
        }
        Ok(Self {
            matrix,
            prior,
            targets,
        })
    }

    /// Moment-target problem from floating-point targets (converted exactly).
    pub fn with_targets(matrix: ConstraintMatrix, targets: &[f64]) -> Result<Self> {
        let exact = targets
            .iter()
            .map(|&t| {
                Rational::from_float(t)
                    .ok_or_else(|| Error::Domain(format!("non-finite target {t}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(matrix, Targets::Moments(exact), None)
    }

    /// Empirical problem from observations in `1..=m`.
    pub fn from_samples(matrix: ConstraintMatrix, observations: &[usize]) -> Result<Self> {
        let samples = sample_sums(observations, &matrix)?;
        Self::new(matrix, Targets::Samples(samples), None)
    }

    pub fn with_prior(mut self, prior: Vec<Rational>) -> Result<Self> {
        self.prior = Some(prior);
        Self::new(self.matrix, self.targets, self.prior)
    }

    pub fn matrix(&self) -> &ConstraintMatrix {
        &self.matrix
    }

    pub fn targets(&self) -> &Targets {
        &self.targets
    }

    pub fn prior(&self) -> Option<&[Rational]> {
        self.prior.as_deref()
    }

    pub fn prior_f64(&self) -> Option<Vec<f64>> {
        self.prior
            .as_ref()
            .map(|h| h.iter().map(rat_to_f64).collect())
    }

    /// Prior normalized to a distribution (uniform when absent).
    pub fn prior_distribution(&self) -> DistributionVector {
        match self.prior_f64() {
            Some(h) => DistributionVector::from_weights(&h).expect("validated positive prior"),
            None => DistributionVector::uniform(self.matrix.m()),
        }
    }

    /// Exact moment targets; `sigma / N` in sample mode.
    pub fn exact_targets(&self) -> Vec<Rational> {
        match &self.targets {
            Targets::Moments(t) => t.clone(),
            Targets::Samples(s) => s.means(),
        }
    }

    pub fn target_values(&self) -> Vec<f64> {
        self.exact_targets().iter().map(rat_to_f64).collect()
    }

    pub fn samples(&self) -> Option<&SampleData> {
        match &self.targets {
            Targets::Samples(s) => Some(s),
            Targets::Moments(_) => None,
        }
    }
}

//! Polynomial formulations of the moment equations.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ratpoly::{
    indexed_vars, laurent_clear, rat_int, ExponentVector, Polynomial, Rational, VarList,
};
use crate::toric::ConstraintMatrix;

use super::{SampleData, Targets};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Direct,
    Dual,
    DualEmpirical,
}

/// Equations in `t1..td`, each with its Laurent-cleared ordinary form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySystem {
    provenance: Provenance,
    vars: VarList,
    equations: Vec<Polynomial>,
    cleared: Vec<Polynomial>,
    objective: Option<Polynomial>,
}

impl PolySystem {
    fn new(
        provenance: Provenance,
        vars: VarList,
        equations: Vec<Polynomial>,
        objective: Option<Polynomial>,
    ) -> Self {
        let cleared = equations.iter().map(|e| laurent_clear(e).1).collect();
        Self {
            provenance,
            vars,
            equations,
            cleared,
            objective,
        }
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn vars(&self) -> &VarList {
        &self.vars
    }

    /// Equations as derived, possibly Laurent.
    pub fn equations(&self) -> &[Polynomial] {
        &self.equations
    }

    /// Equations multiplied by the smallest monomial clearing negative powers.
    pub fn cleared(&self) -> &[Polynomial] {
        &self.cleared
    }

    /// `Psi'` for dual systems.
    pub fn objective(&self) -> Option<&Polynomial> {
        self.objective.as_ref()
    }

    /// Evaluates `Psi'` (or the empirical `Psi~'`) at a positive `theta`.
    pub fn dual_objective(&self, theta: &[f64]) -> Result<f64> {
        let psi = self
            .objective
            .as_ref()
            .ok_or_else(|| Error::Argument("direct systems carry no dual objective".into()))?;
        check_positive_point(theta, self.vars.len())?;
        psi.eval_f64(theta)
    }

    /// Largest absolute value of a cleared equation at `theta`.
    pub fn max_residual(&self, theta: &[f64]) -> Result<f64> {
        check_positive_point(theta, self.vars.len())?;
        let mut worst: f64 = 0.0;
        for e in &self.cleared {
            worst = worst.max(e.eval_f64(theta)?.abs());
        }
        Ok(worst)
    }
}

fn check_positive_point(theta: &[f64], d: usize) -> Result<()> {
    if theta.len() != d {
        return Err(Error::Dimension(format!(
            "point of length {} for {d} variables",
            theta.len()
        )));
    }
    if theta.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::Domain("theta must be strictly positive".into()));
    }
    Ok(())
}

fn column_exponent(a: &ConstraintMatrix, j: usize) -> ExponentVector {
    ExponentVector::new(a.column(j).into_iter().map(|x| x as i32).collect())
}

/// `sum_j (A[i][j] - T_i) theta^(column j)` for every `i`.
pub fn direct_system(a: &ConstraintMatrix, targets: &[Rational]) -> Result<PolySystem> {
    direct_system_weighted(a, targets, None)
}

/// [`direct_system`] with each column weighted by `h_j`.
pub fn direct_system_weighted(
    a: &ConstraintMatrix,
    targets: &[Rational],
    prior: Option<&[Rational]>,
) -> Result<PolySystem> {
    if targets.len() != a.d() {
        return Err(Error::Dimension(format!(
            "{} targets for {} constraints",
            targets.len(),
            a.d()
        )));
    }
    check_prior(a, prior)?;
    let vars = indexed_vars("t", a.d());
    let equations = (0..a.d())
        .map(|i| {
            Polynomial::from_terms(
                vars.clone(),
                (0..a.m()).map(|j| {
                    let w = prior.map_or_else(Rational::one, |h| h[j].clone());
                    (
                        column_exponent(a, j),
                        (rat_int(a.entry(i, j)) - &targets[i]) * w,
                    )
                }),
                None,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PolySystem::new(Provenance::Direct, vars, equations, None))
}

fn check_prior(a: &ConstraintMatrix, prior: Option<&[Rational]>) -> Result<()> {
    if let Some(h) = prior {
        if h.len() != a.m() {
            return Err(Error::Dimension(format!(
                "prior of length {} for {} cells",
                h.len(),
                a.m()
            )));
        }
        if h.iter().any(|x| *x <= Rational::zero()) {
            return Err(Error::Domain("prior must be strictly positive".into()));
        }
    }
    Ok(())
}

/// Gradient system of the dual objective.
///
/// Integer targets give `Psi'(theta) = sum_j prod_i theta_i^(T_i - A[i][j])`;
/// samples give `Psi~'` with exponents `sigma_i - N A[i][j]`.
pub fn dual_system(a: &ConstraintMatrix, targets: &Targets) -> Result<PolySystem> {
    dual_system_weighted(a, targets, None)
}

/// [`dual_system`] with each column weighted by `h_j`.
pub fn dual_system_weighted(
    a: &ConstraintMatrix,
    targets: &Targets,
    prior: Option<&[Rational]>,
) -> Result<PolySystem> {
    check_prior(a, prior)?;
    let (base, scale, provenance) = match targets {
        Targets::Moments(t) => {
            if t.len() != a.d() {
                return Err(Error::Dimension(format!(
                    "{} targets for {} constraints",
                    t.len(),
                    a.d()
                )));
            }
            let ints = t
                .iter()
                .map(|x| {
                    if x.is_integer() {
                        i64::try_from(x.to_integer())
                            .map_err(|_| Error::Domain(format!("target {x} out of range")))
                    } else {
                        Err(Error::Domain(format!(
                            "dual system needs integer targets, got {x}; use sample data (empirical mode) instead"
                        )))
                    }
                })
                .collect::<Result<Vec<i64>>>()?;
            (ints, 1i64, Provenance::Dual)
        }
        Targets::Samples(s) => {
            check_samples(a, s)?;
            (
                s.sigma().to_vec(),
                s.count() as i64,
                Provenance::DualEmpirical,
            )
        }
    };
    let vars = indexed_vars("t", a.d());
    let mut terms = Vec::with_capacity(a.m());
    for j in 0..a.m() {
        let exps = (0..a.d())
            .map(|i| {
                let e = base[i] - scale * a.entry(i, j);
                i32::try_from(e).map_err(|_| Error::Domain(format!("exponent {e} out of range")))
            })
            .collect::<Result<Vec<i32>>>()?;
        let w = prior.map_or_else(Rational::one, |h| h[j].clone());
        terms.push((ExponentVector::new(exps), w));
    }
    let psi = Polynomial::from_terms(vars.clone(), terms, None)?.into_laurent();
    let equations = (0..a.d()).map(|k| psi.derivative(k)).collect();
    Ok(PolySystem::new(provenance, vars, equations, Some(psi)))
}

fn check_samples(a: &ConstraintMatrix, s: &SampleData) -> Result<()> {
    if s.sigma().len() != a.d() {
        return Err(Error::Dimension(
            "sample sums do not match constraints".into(),
        ));
    }
    Ok(())
}

/// `sum_j h_j prod_i theta_i^(T_i - A[i][j])` for real targets, evaluated in
/// log space.
pub fn dual_objective_value(
    a: &ConstraintMatrix,
    targets: &[f64],
    prior: Option<&[f64]>,
    theta: &[f64],
) -> Result<f64> {
    if targets.len() != a.d() {
        return Err(Error::Dimension(format!(
            "{} targets for {} constraints",
            targets.len(),
            a.d()
        )));
    }
    check_positive_point(theta, a.d())?;
    let xi: Vec<f64> = theta.iter().map(|t| t.ln()).collect();
    let (_, log_z) = super::model_distribution(a, &xi, prior)?;
    let shift: f64 = xi.iter().zip(targets).map(|(x, t)| x * t).sum();
    Ok((log_z + shift).exp())
}

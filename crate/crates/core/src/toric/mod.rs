//! Toric models of integer constraint matrices.
//!
//! A matrix `A` (row `i`, column `j` holding `t_i(j)`) and positive weights
//! `h` define the monomial parametrization
//! `p_j = h_j * prod_i theta_i^A[i][j] / Z(theta)`. Its image is cut out, up
//! to the homogeneity condition of [`check_ones_in_rowspan`], by the binomial
//! toric ideal computed in [`toric_ideal_generators`].

mod ideal;
mod lattice;

use std::ops::Deref;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratpoly::Rational;

pub use ideal::{
    toric_ideal_generators, verify_membership_batch, verify_model_membership, BinomialGenerators,
    MembershipReport, MAX_IDEAL_COLUMNS,
};
pub use lattice::{
    apply_monomial_lift, check_ones_in_rowspan, integer_kernel_basis, rank, LatticeBasis,
};

/// `d x m` integer matrix of constraint-function values.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct ConstraintMatrix {
    rows: Vec<Vec<i64>>,
}

impl ConstraintMatrix {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let d = rows.len();
        if d == 0 {
            return Err(Error::Argument(
                "constraint matrix needs at least one row".into(),
            ));
        }
        let m = rows[0].len();
        if m < 2 {
            return Err(Error::Argument(format!(
                "alphabet size must be at least 2, got {m}"
            )));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != m) {
            return Err(Error::Dimension(format!(
                "row {i} has {} entries, expected {m}",
                r.len()
            )));
        }
        Ok(Self { rows })
    }

    pub fn d(&self) -> usize {
        self.rows.len()
    }

    pub fn m(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.rows[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.rows[i][j]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    /// The matrix with an all-ones row prepended.
    pub fn with_ones_row(&self) -> Self {
        let mut rows = Vec::with_capacity(self.d() + 1);
        rows.push(vec![1; self.m()]);
        rows.extend(self.rows.iter().cloned());
        Self { rows }
    }
}

impl TryFrom<Vec<Vec<i64>>> for ConstraintMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<ConstraintMatrix> for Vec<Vec<i64>> {
    fn from(a: ConstraintMatrix) -> Self {
        a.rows
    }
}

/// A point of the probability simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DistributionVector(Vec<f64>);

/// Tolerance on `sum p_j = 1` for validated distributions.
pub const SIMPLEX_TOL: f64 = 1e-12;

impl DistributionVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Argument("empty distribution".into()));
        }
        if let Some(x) = probs.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::Domain(format!("invalid probability {x}")));
        }
        let total: f64 = probs.iter().sum();
        // allow accumulated rounding proportional to the length
        if (total - 1.0).abs() > SIMPLEX_TOL.max(probs.len() as f64 * f64::EPSILON) {
            return Err(Error::Domain(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self(probs))
    }

    /// Normalizes nonnegative weights.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || !(total > 0.0) {
            return Err(Error::Domain(
                "weights must be nonnegative with positive sum".into(),
            ));
        }
        Ok(Self(weights.iter().map(|w| w / total).collect()))
    }

    pub fn uniform(m: usize) -> Self {
        Self(vec![1.0 / m as f64; m])
    }

    pub fn point_mass(m: usize, k: usize) -> Self {
        let mut v = vec![0.0; m];
        v[k] = 1.0;
        Self(v)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Max absolute coordinate difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Deref for DistributionVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for DistributionVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<DistributionVector> for Vec<f64> {
    fn from(p: DistributionVector) -> Self {
        p.0
    }
}

fn check_positive(name: &str, values: &[f64], len: usize) -> Result<()> {
    if values.len() != len {
        return Err(Error::Dimension(format!(
            "{name} has length {}, expected {len}",
            values.len()
        )));
    }
    if let Some(x) = values.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return Err(Error::Domain(format!(
            "{name} must be strictly positive, got {x}"
        )));
    }
    Ok(())
}

/// `p_j = h_j prod_i theta_i^A[i][j] / Z(theta)` evaluated in log space.
///
/// `h = None` means unit weights, which yields the same distribution as any
/// constant weight vector.
pub fn toric_param(
    a: &ConstraintMatrix,
    h: Option<&[f64]>,
    theta: &[f64],
) -> Result<DistributionVector> {
    check_positive("theta", theta, a.d())?;
    if let Some(h) = h {
        check_positive("prior h", h, a.m())?;
    }
    let log_theta: Vec<f64> = theta.iter().map(|t| t.ln()).collect();
    let logw: Vec<f64> = (0..a.m())
        .map(|j| {
            let base = h.map_or(0.0, |h| h[j].ln());
            base + (0..a.d())
                .map(|i| a.entry(i, j) as f64 * log_theta[i])
                .sum::<f64>()
        })
        .collect();
    Ok(softmax(&logw).0)
}

/// Normalizes `exp(logw)`; returns the distribution and `ln sum exp(logw)`.
pub(crate) fn softmax(logw: &[f64]) -> (DistributionVector, f64) {
    let max = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logw.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = w.iter().sum();
    let p = w.iter().map(|x| x / total).collect();
    (DistributionVector(p), max + total.ln())
}

/// Exact rational version of [`toric_param`].
pub fn toric_param_exact(
    a: &ConstraintMatrix,
    h: Option<&[Rational]>,
    theta: &[Rational],
) -> Result<Vec<Rational>> {
    if theta.len() != a.d() {
        return Err(Error::Dimension(format!(
            "theta has length {}, expected {}",
            theta.len(),
            a.d()
        )));
    }
    if theta.iter().any(|t| *t <= Rational::zero()) {
        return Err(Error::Domain("theta must be strictly positive".into()));
    }
    if let Some(h) = h {
        if h.len() != a.m() || h.iter().any(|x| *x <= Rational::zero()) {
            return Err(Error::Domain(
                "prior must be strictly positive with length m".into(),
            ));
        }
    }
    let weights: Vec<Rational> = (0..a.m())
        .map(|j| {
            let mut w = h.map_or_else(Rational::one, |h| h[j].clone());
            for (i, t) in theta.iter().enumerate() {
                let e = a.entry(i, j);
                if e >= 0 {
                    w *= num_traits::pow(t.clone(), e as usize);
                } else {
                    w /= num_traits::pow(t.clone(), (-e) as usize);
                }
            }
            w
        })
        .collect();
    let total: Rational = weights.iter().cloned().sum();
    Ok(weights.into_iter().map(|w| w / &total).collect())
}

//! Toric ideal generators by lattice-ideal saturation.

use std::fmt;

use num_traits::{One, Signed};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::ratpoly::{
    buchberger, indexed_vars, rat_int, ExponentVector, MonomialOrder, Polynomial, VarList,
};

use super::{integer_kernel_basis, ConstraintMatrix, DistributionVector};

/// Largest alphabet accepted by [`toric_ideal_generators`].
pub const MAX_IDEAL_COLUMNS: usize = 10;

/// Binomials `x^{u+} - x^{u-}` in variables `p1..pm`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinomialGenerators {
    vars: VarList,
    binomials: Vec<Polynomial>,
}

impl BinomialGenerators {
    pub fn binomials(&self) -> &[Polynomial] {
        &self.binomials
    }

    pub fn vars(&self) -> &VarList {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.binomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.binomials.is_empty()
    }

    /// Every generator evaluated at `p`.
    pub fn evaluate(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.binomials.iter().map(|b| b.eval_f64(p)).collect()
    }
}

impl fmt::Display for BinomialGenerators {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.binomials {
            writeln!(f, "{b}")?;
        }
        Ok(())
    }
}

fn lattice_binomial(vars: &VarList, u: &[i64]) -> Polynomial {
    let plus: Vec<i32> = u.iter().map(|&x| x.max(0) as i32).collect();
    let minus: Vec<i32> = u.iter().map(|&x| (-x).max(0) as i32).collect();
    Polynomial::from_terms(
        vars.clone(),
        [
            (ExponentVector::new(plus), rat_int(1)),
            (ExponentVector::new(minus), rat_int(-1)),
        ],
        Some(false),
    )
    .expect("nonnegative exponents")
}

/// Generators of the toric ideal of `a`.
///
/// The lattice-basis binomials generate an ideal whose saturation by
/// `p1 * ... * pm` is the toric ideal. The saturation adjoins `w` with
/// `w p1 ... pm - 1` and eliminates `w` under a block order. The result is
/// the reduced basis of the toric ideal under grevlex, each binomial signed
/// so its lex-leading coefficient is `+1`.
pub fn toric_ideal_generators(a: &ConstraintMatrix) -> Result<BinomialGenerators> {
    let m = a.m();
    if m > MAX_IDEAL_COLUMNS {
        return Err(Error::SizeLimit(format!(
            "toric ideal saturation is limited to {MAX_IDEAL_COLUMNS} columns, got {m}"
        )));
    }
    let vars = indexed_vars("p", m);
    let kernel = integer_kernel_basis(a);
    if kernel.is_empty() {
        return Ok(BinomialGenerators {
            vars,
            binomials: Vec::new(),
        });
    }

    let mut ext_names: Vec<String> = vec!["w".to_string()];
    ext_names.extend(vars.iter().cloned());
    let ext: VarList = ext_names.into();
    let shift: Vec<usize> = (1..=m).collect();

    let mut gens: Vec<Polynomial> = kernel
        .vectors()
        .iter()
        .map(|u| lattice_binomial(&vars, u).embed(ext.clone(), &shift))
        .collect::<Result<_>>()?;
    let all = vec![1i32; m + 1];
    gens.push(Polynomial::from_terms(
        ext.clone(),
        [
            (ExponentVector::new(all), rat_int(1)),
            (ExponentVector::zeros(m + 1), rat_int(-1)),
        ],
        Some(false),
    )?);

    let ord = MonomialOrder::block(m + 1, 1)?;
    let gb = buchberger(&gens, &ord)?;

    let lex = MonomialOrder::lex(m);
    let mut binomials = Vec::new();
    for g in gb.basis() {
        if g.involves(0) {
            continue;
        }
        let mut b = Polynomial::from_terms(
            vars.clone(),
            g.terms()
                .map(|(e, c)| (ExponentVector::new(e.as_slice()[1..].to_vec()), c.clone())),
            Some(false),
        )?;
        if b.leading_term(&lex).is_some_and(|(_, c)| c.is_negative()) {
            b = -&b;
        }
        debug_assert!(is_pure_binomial(&b));
        binomials.push(b);
    }
    Ok(BinomialGenerators { vars, binomials })
}

/// Two terms with coefficients `+1` and `-1` and disjoint supports.
pub(crate) fn is_pure_binomial(b: &Polynomial) -> bool {
    let terms: Vec<_> = b.terms().collect();
    terms.len() == 2
        && terms[0].1.abs().is_one()
        && (terms[0].1 + terms[1].1) == num_traits::Zero::zero()
        && terms[0].0.is_coprime(terms[1].0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipReport {
    pub member: bool,
    pub max_residual: f64,
    pub residuals: Vec<f64>,
}

fn report(gens: &BinomialGenerators, p: &[f64], tol: f64) -> Result<MembershipReport> {
    if p.len() != gens.vars().len() {
        return Err(Error::Dimension(format!(
            "distribution of length {} for {} cells",
            p.len(),
            gens.vars().len()
        )));
    }
    let residuals = gens.evaluate(p)?;
    let max_residual = residuals.iter().map(|r| r.abs()).fold(0.0, f64::max);
    Ok(MembershipReport {
        member: max_residual <= tol,
        max_residual,
        residuals,
    })
}

/// Evaluates every toric-ideal generator of `a` at `p`; member iff all
/// values are within `tol` of zero.
pub fn verify_model_membership(
    p: &DistributionVector,
    a: &ConstraintMatrix,
    tol: f64,
) -> Result<MembershipReport> {
    let gens = toric_ideal_generators(a)?;
    report(&gens, p, tol)
}

/// Membership reports for many points against precomputed generators.
pub fn verify_membership_batch(
    gens: &BinomialGenerators,
    points: &[DistributionVector],
    tol: f64,
    exec: Execution,
) -> Result<Vec<MembershipReport>> {
    par::map(exec, points, |p| report(gens, p, tol))
        .into_iter()
        .collect()
}

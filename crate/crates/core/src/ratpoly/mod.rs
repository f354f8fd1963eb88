//! Exact sparse multivariate polynomials over the rationals.
//!
//! A [`Polynomial`] is a map from exponent vectors to nonzero
//! arbitrary-precision rationals. The same type carries Laurent polynomials
//! (negative exponents) behind a flag; the Groebner machinery only accepts
//! ordinary polynomials, so Laurent input is cleared with [`laurent_clear`]
//! first.

mod division;
mod groebner;
mod order;
mod text;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use division::multivariate_divide;
pub use groebner::{buchberger, s_polynomial, GroebnerBasis};
pub use order::{order_compare, MonomialOrder, OrderKind};

pub type Rational = BigRational;

/// Shared, ordered list of variable names.
pub type VarList = Arc<[String]>;

/// Builds a variable list from anything string-like.
pub fn var_list<S: AsRef<str>>(names: &[S]) -> VarList {
    names.iter().map(|s| s.as_ref().to_string()).collect()
}

/// `prefix1, ..., prefixN`.
pub fn indexed_vars(prefix: &str, n: usize) -> VarList {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Nearest f64 to an exact rational.
pub fn rat_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large individually; scale down
        let n = q.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = q.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Fixed-length integer exponent vector `x^a = x1^a1 ... xn^an`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentVector(Vec<i32>);

impl ExponentVector {
    pub fn new(exps: Vec<i32>) -> Self {
        Self(exps)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i32] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<i32> {
        self.0
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&e| e >= 0)
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// Componentwise `self <= other`, i.e. `x^self` divides `x^other`.
    pub fn divides(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn lcm(&self, other: &Self) -> Self {
        Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    /// No variable appears in both monomials.
    pub fn is_coprime(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }
}

impl From<Vec<i32>> for ExponentVector {
    fn from(v: Vec<i32>) -> Self {
        Self(v)
    }
}

/// Sparse polynomial (or Laurent polynomial) with exact rational coefficients.
///
/// Equality compares variable lists and term maps; the Laurent flag only
/// controls which exponents are admissible.
#[derive(Debug, Clone)]
pub struct Polynomial {
    vars: VarList,
    terms: BTreeMap<ExponentVector, Rational>,
    laurent: bool,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
}

/// `f + g` or `f * g`, checking that the variable lists agree.
pub fn poly_arith(f: &Polynomial, g: &Polynomial, op: ArithOp) -> Result<Polynomial> {
    match op {
        ArithOp::Add => f.checked_add(g),
        ArithOp::Mul => f.checked_mul(g),
    }
}

impl Polynomial {
    pub fn zero(vars: VarList) -> Self {
        Self {
            vars,
            terms: BTreeMap::new(),
            laurent: false,
        }
    }

    pub fn constant(vars: VarList, c: Rational) -> Self {
        let n = vars.len();
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(ExponentVector::zeros(n), c);
        }
        p
    }

    pub fn one(vars: VarList) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn var(vars: VarList, i: usize) -> Self {
        let n = vars.len();
        assert!(i < n, "variable index {i} out of range for {n} variables");
        let mut p = Self::zero(vars);
        p.terms.insert(ExponentVector::unit(n, i), Rational::one());
        p
    }

    /// Builds `c * x^exps`, Laurent when any exponent is negative.
    pub fn monomial(vars: VarList, exps: ExponentVector, c: Rational) -> Result<Self> {
        Self::from_terms(vars, [(exps, c)], None)
    }

    /// Collects terms, summing duplicates and dropping zeros.
    ///
    /// `laurent = None` infers the flag from the exponents; `Some(false)`
    /// rejects negative exponents.
    pub fn from_terms<I>(vars: VarList, terms: I, laurent: Option<bool>) -> Result<Self>
    where
        I: IntoIterator<Item = (ExponentVector, Rational)>,
    {
        let n = vars.len();
        let mut map: BTreeMap<ExponentVector, Rational> = BTreeMap::new();
        let mut negative = false;
        for (e, c) in terms {
            if e.len() != n {
                return Err(Error::Dimension(format!(
                    "exponent vector of length {} in a ring with {n} variables",
                    e.len()
                )));
            }
            negative |= !e.is_nonnegative();
            if c.is_zero() {
                continue;
            }
            let entry = map.entry(e).or_insert_with(Rational::zero);
            *entry += c;
        }
        map.retain(|_, c| !c.is_zero());
        let laurent = match laurent {
            Some(false) if negative => {
                return Err(Error::Domain(
                    "negative exponent in an ordinary polynomial".into(),
                ))
            }
            Some(flag) => flag,
            None => negative,
        };
        Ok(Self {
            vars,
            terms: map,
            laurent,
        })
    }

    pub(crate) fn from_map_unchecked(
        vars: VarList,
        terms: BTreeMap<ExponentVector, Rational>,
        laurent: bool,
    ) -> Self {
        debug_assert!(terms.values().all(|c| !c.is_zero()));
        Self {
            vars,
            terms,
            laurent,
        }
    }

    pub fn vars(&self) -> &VarList {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_laurent(&self) -> bool {
        self.laurent
    }

    /// True when some stored exponent is negative.
    pub fn has_negative_exponents(&self) -> bool {
        self.terms.keys().any(|e| !e.is_nonnegative())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.is_constant())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in lex-descending order (the canonical printing order).
    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &Rational)> {
        self.terms.iter().rev()
    }

    pub(crate) fn term_map(&self) -> &BTreeMap<ExponentVector, Rational> {
        &self.terms
    }

    pub fn coefficient(&self, exps: &ExponentVector) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    /// Maximum total degree over terms; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<i64> {
        self.terms.keys().map(|e| e.degree()).max()
    }

    /// Highest exponent of variable `k` appearing in any term.
    pub fn degree_in(&self, k: usize) -> Option<i32> {
        self.terms.keys().map(|e| e.as_slice()[k]).max()
    }

    pub fn involves(&self, k: usize) -> bool {
        self.terms.keys().any(|e| e.as_slice()[k] != 0)
    }

    /// Leading term under `ord`.
    pub fn leading_term(&self, ord: &MonomialOrder) -> Option<(&ExponentVector, &Rational)> {
        self.terms
            .iter()
            .max_by(|a, b| ord.cmp_exps(a.0.as_slice(), b.0.as_slice()))
    }

    /// Terms sorted descending under `ord`.
    pub fn sorted_terms(&self, ord: &MonomialOrder) -> Vec<(&ExponentVector, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| ord.cmp_exps(b.0.as_slice(), a.0.as_slice()));
        v
    }

    /// Marks the polynomial as Laurent (no change to its terms).
    pub fn into_laurent(mut self) -> Self {
        self.laurent = true;
        self
    }

    /// Drops the Laurent flag; fails if any exponent is negative.
    pub fn into_ordinary(mut self) -> Result<Self> {
        if self.has_negative_exponents() {
            return Err(Error::Domain(format!(
                "{self} has negative exponents; clear denominators first"
            )));
        }
        self.laurent = false;
        Ok(self)
    }

    fn check_same_ring(&self, other: &Self) -> Result<()> {
        if self.vars != other.vars {
            return Err(Error::Dimension(format!(
                "variable lists differ: {:?} vs {:?}",
                self.vars, other.vars
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same_ring(other)?;
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = terms.entry(e.clone()).or_insert_with(Rational::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(e);
            }
        }
        Ok(Self::from_map_unchecked(
            self.vars.clone(),
            terms,
            self.laurent || other.laurent,
        ))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg_ref())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_same_ring(other)?;
        let mut terms: BTreeMap<ExponentVector, Rational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let entry = terms.entry(ea.add(eb)).or_insert_with(Rational::zero);
                *entry += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(Self::from_map_unchecked(
            self.vars.clone(),
            terms,
            self.laurent || other.laurent,
        ))
    }

    fn neg_ref(&self) -> Self {
        Self::from_map_unchecked(
            self.vars.clone(),
            self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
            self.laurent,
        )
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            let mut z = Self::zero(self.vars.clone());
            z.laurent = self.laurent;
            return z;
        }
        Self::from_map_unchecked(
            self.vars.clone(),
            self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect(),
            self.laurent,
        )
    }

    /// Multiplies by the monomial `x^shift`; the result is Laurent if the
    /// shift introduces negative exponents.
    pub fn shift(&self, shift: &ExponentVector) -> Self {
        let terms: BTreeMap<_, _> = self
            .terms
            .iter()
            .map(|(e, c)| (e.add(shift), c.clone()))
            .collect();
        let laurent = self.laurent || terms.keys().any(|e| !e.is_nonnegative());
        Self::from_map_unchecked(self.vars.clone(), terms, laurent)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.vars.clone());
        acc.laurent = self.laurent;
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Divides every coefficient by the leading coefficient under `ord`.
    pub fn monic(&self, ord: &MonomialOrder) -> Self {
        match self.leading_term(ord) {
            Some((_, lc)) => {
                let inv = lc.recip();
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.nvars() {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, ring has {} variables",
                point.len(),
                self.nvars()
            )));
        }
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (k, &ek) in e.as_slice().iter().enumerate() {
                if ek == 0 {
                    continue;
                }
                if ek < 0 {
                    if point[k].is_zero() {
                        return Err(Error::Domain(format!(
                            "negative power of {} evaluated at 0",
                            self.vars[k]
                        )));
                    }
                    t /= num_traits::pow(point[k].clone(), (-ek) as usize);
                } else {
                    t *= num_traits::pow(point[k].clone(), ek as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Floating-point evaluation.
    pub fn eval_f64(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.nvars() {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, ring has {} variables",
                point.len(),
                self.nvars()
            )));
        }
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut t = rat_to_f64(c);
            for (k, &ek) in e.as_slice().iter().enumerate() {
                if ek < 0 && point[k] == 0.0 {
                    return Err(Error::Domain(format!(
                        "negative power of {} evaluated at 0",
                        self.vars[k]
                    )));
                }
                if ek != 0 {
                    t *= point[k].powi(ek);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Formal partial derivative in variable `k` (valid for Laurent input).
    pub fn derivative(&self, k: usize) -> Self {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let ek = e.as_slice()[k];
            if ek == 0 {
                continue;
            }
            let mut d = e.clone().into_vec();
            d[k] -= 1;
            terms.insert(ExponentVector(d), c * rat_int(ek as i64));
        }
        Self::from_map_unchecked(self.vars.clone(), terms, self.laurent)
    }

    /// Substitutes the given values for some variables; the variable list is
    /// kept and substituted exponents become zero.
    pub fn specialize(&self, values: &[Option<Rational>]) -> Result<Self> {
        if values.len() != self.nvars() {
            return Err(Error::Dimension(format!(
                "{} substitution slots for {} variables",
                values.len(),
                self.nvars()
            )));
        }
        let mut out: BTreeMap<ExponentVector, Rational> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut exps = e.clone().into_vec();
            let mut coef = c.clone();
            for (k, v) in values.iter().enumerate() {
                if let Some(v) = v {
                    let ek = exps[k];
                    if ek < 0 {
                        if v.is_zero() {
                            return Err(Error::Domain("negative power evaluated at 0".into()));
                        }
                        coef /= num_traits::pow(v.clone(), (-ek) as usize);
                    } else {
                        coef *= num_traits::pow(v.clone(), ek as usize);
                    }
                    exps[k] = 0;
                }
            }
            let entry = out
                .entry(ExponentVector(exps))
                .or_insert_with(Rational::zero);
            *entry += coef;
        }
        out.retain(|_, c| !c.is_zero());
        let laurent = self.laurent;
        Ok(Self::from_map_unchecked(self.vars.clone(), out, laurent))
    }

    /// Re-embeds into a ring with `vars`, sending variable `k` to
    /// `mapping[k]`.
    pub fn embed(&self, vars: VarList, mapping: &[usize]) -> Result<Self> {
        if mapping.len() != self.nvars() || mapping.iter().any(|&t| t >= vars.len()) {
            return Err(Error::Dimension("invalid variable embedding".into()));
        }
        let n = vars.len();
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut v = vec![0; n];
                for (k, &ek) in e.as_slice().iter().enumerate() {
                    v[mapping[k]] += ek;
                }
                (ExponentVector(v), c.clone())
            })
            .collect();
        Ok(Self::from_map_unchecked(vars, terms, self.laurent))
    }

    /// Scales to coprime integer coefficients, keeping the sign of each
    /// coefficient.
    pub fn primitive_part(&self) -> Self {
        use num_integer::Integer;
        if self.is_zero() {
            return self.clone();
        }
        let l = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let g = self.terms.values().fold(BigInt::zero(), |acc, c| {
            acc.gcd(&(c.numer() * (&l / c.denom())))
        });
        self.scale(&Rational::new(l, g))
    }
}

/// Multiplies a (possibly Laurent) polynomial by the smallest monomial that
/// makes every exponent nonnegative.
///
/// Returns the multiplier exponents together with the ordinary result.
pub fn laurent_clear(f: &Polynomial) -> (ExponentVector, Polynomial) {
    let n = f.nvars();
    let mut shift = vec![0i32; n];
    for e in f.terms.keys() {
        for (k, &ek) in e.as_slice().iter().enumerate() {
            shift[k] = shift[k].max(-ek);
        }
    }
    let shift = ExponentVector(shift);
    let mut g = f.shift(&shift);
    g.laurent = false;
    (shift, g)
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::format_polynomial(self))
    }
}

impl Polynomial {
    /// Parses the text grammar produced by `Display` over the given variables.
    ///
    /// The result is Laurent exactly when a negative exponent appears.
    pub fn parse<S: AsRef<str>>(text: &str, vars: &[S]) -> Result<Self> {
        text::parse_polynomial(text, var_list(vars))
    }

    pub fn parse_in(text: &str, vars: VarList) -> Result<Self> {
        text::parse_polynomial(text, vars)
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    /// Panics when the variable lists differ; see [`Polynomial::checked_add`].
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        self.checked_add(rhs)
            .expect("polynomials over different rings")
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        self.checked_sub(rhs)
            .expect("polynomials over different rings")
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        self.checked_mul(rhs)
            .expect("polynomials over different rings")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.neg_ref()
    }
}

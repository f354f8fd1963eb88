//! Exact isolation of positive real roots of univariate rational polynomials
//! by Sturm sequences and bisection on dyadic rationals.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ratpoly::{Polynomial, Rational};

/// Dense univariate polynomial, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly(Vec<Rational>);

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self(coeffs)
    }

    /// Views `p` as a polynomial in variable `k`; every other variable must
    /// be absent.
    pub fn from_polynomial(p: &Polynomial, k: usize) -> Result<Self> {
        let mut coeffs: Vec<Rational> = Vec::new();
        for (e, c) in p.terms() {
            if e.as_slice()
                .iter()
                .enumerate()
                .any(|(i, &x)| i != k && x != 0)
            {
                return Err(Error::Argument(format!(
                    "polynomial involves variables other than {}",
                    p.vars()[k]
                )));
            }
            let deg = e.as_slice()[k];
            if deg < 0 {
                return Err(Error::Domain(
                    "negative exponent in a univariate polynomial".into(),
                ));
            }
            let deg = deg as usize;
            if coeffs.len() <= deg {
                coeffs.resize(deg + 1, Rational::zero());
            }
            coeffs[deg] += c;
        }
        Ok(Self::new(coeffs))
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    fn sign_at(&self, x: &Rational) -> i8 {
        let v = self.eval(x);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, other: &Self) -> (Self, Self) {
        let dd = other.degree().expect("division by the zero polynomial");
        let lead = other.0[dd].clone();
        let mut rem = self.0.clone();
        let mut quot = vec![Rational::zero(); self.0.len().saturating_sub(dd).max(1)];
        while rem.len() > dd && !rem.is_empty() {
            let k = rem.len() - 1;
            let c = &rem[k] / &lead;
            if !c.is_zero() {
                for (i, oc) in other.0.iter().enumerate() {
                    rem[k - dd + i] -= &c * oc;
                }
                quot[k - dd] = c;
            }
            rem.pop();
        }
        (Self::new(quot), Self::new(rem))
    }

    fn monic(&self) -> Self {
        match self.0.last() {
            Some(lead) => Self(self.0.iter().map(|c| c / lead).collect()),
            None => self.clone(),
        }
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Same roots, each with multiplicity one.
    pub fn square_free(&self) -> Self {
        let g = self.gcd(&self.derivative());
        if g.degree().unwrap_or(0) == 0 {
            self.monic()
        } else {
            self.div_rem(&g).0.monic()
        }
    }

    /// Removes the factor `x^k` of largest `k`.
    fn strip_zero_root(&self) -> Self {
        let k = self.0.iter().take_while(|c| c.is_zero()).count();
        Self(self.0[k..].to_vec())
    }

    /// Cauchy bound rounded up to a power of two; every root has modulus
    /// strictly below it.
    fn root_bound(&self) -> Rational {
        let n = self.0.len() - 1;
        let lead = self.0[n].abs();
        let max = self.0[..n]
            .iter()
            .map(|c| c.abs() / &lead)
            .fold(Rational::zero(), |a, b| if b > a { b } else { a });
        let bound = max + Rational::one();
        let mut p = Rational::one();
        while p <= bound {
            p *= Rational::from_integer(2.into());
        }
        p
    }
}

struct Sturm(Vec<UniPoly>);

impl Sturm {
    fn new(p: &UniPoly) -> Self {
        let mut seq = vec![p.clone(), p.derivative()];
        while !seq.last().expect("nonempty").is_zero() {
            let n = seq.len();
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            seq.push(Self::neg(r));
        }
        seq.pop();
        Self(seq)
    }

    fn neg(p: UniPoly) -> UniPoly {
        UniPoly(p.0.into_iter().map(|c| -c).collect())
    }

    fn variations(&self, x: &Rational) -> usize {
        let mut last = 0i8;
        let mut count = 0;
        for s in self.0.iter().map(|p| p.sign_at(x)).filter(|&s| s != 0) {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Distinct roots in `(lo, hi]`.
    fn count(&self, lo: &Rational, hi: &Rational) -> usize {
        self.variations(lo) - self.variations(hi)
    }
}

/// An isolating interval `(lo, hi]` of width at most the requested
/// precision, with the root itself when it is a recognizable rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: Rational,
    pub hi: Rational,
    pub exact: Option<Rational>,
}

impl RootInterval {
    /// The exact root or the interval midpoint.
    pub fn value(&self) -> Rational {
        self.exact
            .clone()
            .unwrap_or_else(|| (&self.lo + &self.hi) / Rational::from_integer(2.into()))
    }

    pub fn value_f64(&self) -> f64 {
        crate::ratpoly::rat_to_f64(&self.value())
    }
}

/// All distinct positive real roots of `p`, ascending, each refined to an
/// interval of width at most `width`.
pub fn positive_roots(p: &UniPoly, width: &Rational) -> Result<Vec<RootInterval>> {
    if p.is_zero() {
        return Err(Error::Argument(
            "the zero polynomial has every number as a root".into(),
        ));
    }
    if !width.is_positive() {
        return Err(Error::Argument("refinement width must be positive".into()));
    }
    let q = p.strip_zero_root().square_free();
    if q.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let sturm = Sturm::new(&q);
    let mut out = Vec::new();
    isolate(
        &q,
        &sturm,
        Rational::zero(),
        q.root_bound(),
        false,
        width,
        &mut out,
    );
    out.sort_by(|a, b| a.lo.cmp(&b.lo));
    Ok(out)
}

fn half(a: &Rational, b: &Rational) -> Rational {
    (a + b) / Rational::from_integer(2.into())
}

/// Roots in `(lo, hi]`, or `(lo, hi)` when `hi` is a root already recorded.
fn isolate(
    q: &UniPoly,
    sturm: &Sturm,
    lo: Rational,
    hi: Rational,
    hi_known: bool,
    width: &Rational,
    out: &mut Vec<RootInterval>,
) {
    let n = sturm.count(&lo, &hi) - usize::from(hi_known);
    if n == 0 {
        return;
    }
    if n == 1 && !hi_known {
        out.push(refine(q, sturm, lo, hi, width));
        return;
    }
    let mid = half(&lo, &hi);
    let mid_root = q.sign_at(&mid) == 0;
    if mid_root {
        out.push(RootInterval {
            lo: mid.clone(),
            hi: mid.clone(),
            exact: Some(mid.clone()),
        });
    }
    isolate(q, sturm, lo, mid.clone(), mid_root, width, out);
    isolate(q, sturm, mid, hi, hi_known, width, out);
}

/// Shrinks `(lo, hi]` holding exactly one root.
///
/// With a nonzero value at `lo` the signs at the endpoints differ and plain
/// sign bisection applies; otherwise Sturm counts decide the side.
fn refine(
    q: &UniPoly,
    sturm: &Sturm,
    mut lo: Rational,
    mut hi: Rational,
    width: &Rational,
) -> RootInterval {
    if q.sign_at(&hi) == 0 {
        return RootInterval {
            lo: hi.clone(),
            hi: hi.clone(),
            exact: Some(hi),
        };
    }
    let s_hi = q.sign_at(&hi);
    while &hi - &lo > *width {
        let mid = half(&lo, &hi);
        let s_mid = q.sign_at(&mid);
        if s_mid == 0 {
            return RootInterval {
                lo: mid.clone(),
                hi: mid.clone(),
                exact: Some(mid),
            };
        }
        let left = match q.sign_at(&lo) {
            0 => sturm.count(&lo, &mid) == 1,
            s_lo => s_lo != s_mid,
        };
        if left {
            hi = mid;
        } else {
            debug_assert!(s_mid != s_hi);
            lo = mid;
        }
    }
    let candidate = simplest_between(&lo, &hi);
    let exact = (q.sign_at(&candidate) == 0).then_some(candidate);
    RootInterval { lo, hi, exact }
}

/// The rational with the smallest denominator in `[lo, hi]`, `0 <= lo <= hi`.
pub(crate) fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    let c = lo.ceil();
    if &c <= hi {
        return c;
    }
    let fl = lo.floor();
    let inner = simplest_between(
        &(Rational::one() / (hi - &fl)),
        &(Rational::one() / (lo - &fl)),
    );
    fl + Rational::one() / inner
}

/// Smallest power of two not below `1 / eps`, as the width `2^-k`.
pub(crate) fn dyadic_width(eps: f64) -> Rational {
    let mut k = 0u32;
    while 2f64.powi(-(k as i32)) > eps {
        k += 1;
    }
    Rational::new(BigInt::one(), BigInt::one() << k)
}

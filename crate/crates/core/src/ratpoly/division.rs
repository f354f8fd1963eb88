//! Multivariate division and the order-sorted term lists used by the
//! Groebner engine.

use std::cmp::Ordering;

use num_traits::{One, Zero};

use crate::error::{Error, Result};

use super::{ExponentVector, MonomialOrder, Polynomial, Rational, VarList};

/// Terms sorted strictly descending under a fixed monomial order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct SortedPoly {
    pub(crate) terms: Vec<(ExponentVector, Rational)>,
}

impl SortedPoly {
    pub(crate) fn from_poly(p: &Polynomial, ord: &MonomialOrder) -> Self {
        let mut terms: Vec<_> = p
            .term_map()
            .iter()
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        terms.sort_by(|a, b| ord.cmp_exps(b.0.as_slice(), a.0.as_slice()));
        Self { terms }
    }

    pub(crate) fn to_poly(&self, vars: &VarList) -> Polynomial {
        Polynomial::from_map_unchecked(vars.clone(), self.terms.iter().cloned().collect(), false)
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn lm(&self) -> &ExponentVector {
        &self.terms[0].0
    }

    pub(crate) fn lc(&self) -> &Rational {
        &self.terms[0].1
    }

    pub(crate) fn make_monic(&mut self) {
        if self.terms.is_empty() || self.lc().is_one() {
            return;
        }
        let inv = self.lc().recip();
        for t in &mut self.terms {
            t.1 *= &inv;
        }
    }

    /// `self - coef * x^shift * other`, merging in order.
    pub(crate) fn sub_scaled(
        &self,
        coef: &Rational,
        shift: &ExponentVector,
        other: &SortedPoly,
        ord: &MonomialOrder,
    ) -> SortedPoly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut a = self.terms.iter().peekable();
        let mut b = other
            .terms
            .iter()
            .map(|(e, c)| (e.add(shift), c * coef))
            .peekable();
        loop {
            let step = match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => Ordering::Greater,
                (None, Some(_)) => Ordering::Less,
                (Some(x), Some(y)) => ord.cmp_exps(x.0.as_slice(), y.0.as_slice()),
            };
            match step {
                Ordering::Greater => out.push(a.next().unwrap().clone()),
                Ordering::Less => {
                    let (e, c) = b.next().unwrap();
                    out.push((e, -c));
                }
                Ordering::Equal => {
                    let (e, ca) = a.next().unwrap();
                    let (_, cb) = b.next().unwrap();
                    let c = ca - cb;
                    if !c.is_zero() {
                        out.push((e.clone(), c));
                    }
                }
            }
        }
        SortedPoly { terms: out }
    }
}

/// Fully reduces `f` by `divisors`, optionally recording quotient terms.
///
/// Divisors are tried in list order at every step.
pub(crate) fn reduce_sorted(
    f: &SortedPoly,
    divisors: &[SortedPoly],
    ord: &MonomialOrder,
    mut quotients: Option<&mut Vec<Vec<(ExponentVector, Rational)>>>,
) -> SortedPoly {
    let mut p = f.clone();
    let mut rem: Vec<(ExponentVector, Rational)> = Vec::new();
    while !p.is_zero() {
        let lt = p.lm().clone();
        let hit = divisors
            .iter()
            .position(|g| !g.is_zero() && g.lm().divides(&lt));
        match hit {
            Some(i) => {
                let g = &divisors[i];
                let coef = p.lc() / g.lc();
                let shift = lt.sub(g.lm());
                if let Some(q) = quotients.as_deref_mut() {
                    q[i].push((shift.clone(), coef.clone()));
                }
                p = p.sub_scaled(&coef, &shift, g, ord);
            }
            None => {
                let head = p.terms.remove(0);
                rem.push(head);
            }
        }
    }
    SortedPoly { terms: rem }
}

/// Divides `f` by an ordered list of divisors.
///
/// Returns quotients `q_i` and remainder `r` with `f = sum q_i g_i + r`, where
/// no term of `r` is divisible by any divisor's leading term under `ord`.
pub fn multivariate_divide(
    f: &Polynomial,
    divisors: &[Polynomial],
    ord: &MonomialOrder,
) -> Result<(Vec<Polynomial>, Polynomial)> {
    if divisors.is_empty() {
        return Err(Error::Argument("empty divisor list".into()));
    }
    check_ordinary_ring(std::iter::once(f).chain(divisors), ord)?;
    if divisors.iter().any(|g| g.is_zero()) {
        return Err(Error::Argument("zero divisor".into()));
    }
    let fs = SortedPoly::from_poly(f, ord);
    let gs: Vec<_> = divisors
        .iter()
        .map(|g| SortedPoly::from_poly(g, ord))
        .collect();
    let mut qterms = vec![Vec::new(); gs.len()];
    let r = reduce_sorted(&fs, &gs, ord, Some(&mut qterms));
    let vars = f.vars().clone();
    let quotients = qterms
        .into_iter()
        .map(|ts| Polynomial::from_terms(vars.clone(), ts, Some(false)))
        .collect::<Result<Vec<_>>>()?;
    Ok((quotients, r.to_poly(&vars)))
}

pub(crate) fn check_ordinary_ring<'a>(
    polys: impl IntoIterator<Item = &'a Polynomial>,
    ord: &MonomialOrder,
) -> Result<()> {
    let mut vars: Option<&VarList> = None;
    for p in polys {
        if p.is_laurent() || p.has_negative_exponents() {
            return Err(Error::Domain(format!(
                "Laurent polynomial {p} in an ordinary-ring operation; clear denominators first"
            )));
        }
        match vars {
            None => vars = Some(p.vars()),
            Some(v) if v != p.vars() => {
                return Err(Error::Dimension(format!(
                    "variable lists differ: {v:?} vs {:?}",
                    p.vars()
                )))
            }
            _ => {}
        }
    }
    if let Some(v) = vars {
        if v.len() != ord.nvars() {
            return Err(Error::Dimension(format!(
                "order on {} variables used with a ring of {}",
                ord.nvars(),
                v.len()
            )));
        }
    }
    Ok(())
}

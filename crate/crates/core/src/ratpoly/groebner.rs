//! Buchberger's algorithm with the normal selection strategy and both
//! Buchberger criteria, followed by reduction to the unique reduced basis.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_traits::One;

use crate::error::{Error, Result};

use super::division::{check_ordinary_ring, reduce_sorted, SortedPoly};
use super::{ExponentVector, MonomialOrder, Polynomial, VarList};

/// Reduced Groebner basis of an ideal under a fixed order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroebnerBasis {
    basis: Vec<Polynomial>,
    order: MonomialOrder,
    vars: VarList,
}

impl GroebnerBasis {
    /// Elements sorted by leading monomial, descending.
    pub fn basis(&self) -> &[Polynomial] {
        &self.basis
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn vars(&self) -> &VarList {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// The ideal is the whole ring.
    pub fn is_unit(&self) -> bool {
        self.basis.len() == 1 && self.basis[0].is_constant()
    }

    pub fn into_vec(self) -> Vec<Polynomial> {
        self.basis
    }

    /// Normal form of `f` with respect to the basis.
    pub fn normal_form(&self, f: &Polynomial) -> Result<Polynomial> {
        check_ordinary_ring([f], &self.order)?;
        if f.vars() != &self.vars {
            return Err(Error::Dimension("polynomial from a different ring".into()));
        }
        let gs: Vec<_> = self
            .basis
            .iter()
            .map(|g| SortedPoly::from_poly(g, &self.order))
            .collect();
        Ok(reduce_sorted(
            &SortedPoly::from_poly(f, &self.order),
            &gs,
            &self.order,
            None,
        )
        .to_poly(&self.vars))
    }

    pub fn contains(&self, f: &Polynomial) -> Result<bool> {
        Ok(self.normal_form(f)?.is_zero())
    }

    /// Checks the S-pair criterion directly: every S-polynomial of basis
    /// pairs reduces to zero.
    pub fn is_groebner(&self) -> bool {
        is_groebner_basis(&self.basis, &self.order)
    }

    /// Monic, and no term of any element is divisible by another element's
    /// leading monomial.
    pub fn is_reduced(&self) -> bool {
        let sorted: Vec<_> = self
            .basis
            .iter()
            .map(|g| SortedPoly::from_poly(g, &self.order))
            .collect();
        sorted.iter().enumerate().all(|(i, g)| {
            g.lc().is_one()
                && sorted
                    .iter()
                    .enumerate()
                    .all(|(j, h)| i == j || g.terms.iter().all(|(e, _)| !h.lm().divides(e)))
        })
    }
}

/// `S(f, g) = (L / lt(f)) f - (L / lt(g)) g` with `L = lcm(lm f, lm g)`.
pub fn s_polynomial(f: &Polynomial, g: &Polynomial, ord: &MonomialOrder) -> Result<Polynomial> {
    check_ordinary_ring([f, g], ord)?;
    if f.is_zero() || g.is_zero() {
        return Err(Error::Argument(
            "S-polynomial of the zero polynomial".into(),
        ));
    }
    let fs = SortedPoly::from_poly(f, ord);
    let gs = SortedPoly::from_poly(g, ord);
    Ok(spoly_sorted(&fs, &gs, ord).to_poly(f.vars()))
}

fn spoly_sorted(f: &SortedPoly, g: &SortedPoly, ord: &MonomialOrder) -> SortedPoly {
    let l = f.lm().lcm(g.lm());
    let fshift = l.sub(f.lm());
    let gshift = l.sub(g.lm());
    let scaled_f = SortedPoly { terms: Vec::new() }.sub_scaled(&-f.lc().recip(), &fshift, f, ord);
    scaled_f.sub_scaled(&g.lc().recip(), &gshift, g, ord)
}

pub(crate) fn is_groebner_basis(basis: &[Polynomial], ord: &MonomialOrder) -> bool {
    let sorted: Vec<_> = basis
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| SortedPoly::from_poly(g, ord))
        .collect();
    for i in 0..sorted.len() {
        for j in (i + 1)..sorted.len() {
            let s = spoly_sorted(&sorted[i], &sorted[j], ord);
            if !reduce_sorted(&s, &sorted, ord, None).is_zero() {
                return false;
            }
        }
    }
    true
}

struct Pair {
    i: usize,
    j: usize,
    lcm: ExponentVector,
}

/// Computes the reduced Groebner basis of the ideal generated by `gens`.
///
/// The zero ideal yields an empty basis and the unit ideal yields `{1}`.
pub fn buchberger(gens: &[Polynomial], ord: &MonomialOrder) -> Result<GroebnerBasis> {
    if gens.is_empty() {
        return Err(Error::Argument("empty generator list".into()));
    }
    check_ordinary_ring(gens, ord)?;
    let vars = gens[0].vars().clone();

    let mut basis: Vec<SortedPoly> = Vec::new();
    for g in gens {
        if g.is_zero() {
            continue;
        }
        let mut s = SortedPoly::from_poly(g, ord);
        s.make_monic();
        if !basis.contains(&s) {
            basis.push(s);
        }
    }
    if basis.is_empty() {
        return Ok(GroebnerBasis {
            basis: Vec::new(),
            order: ord.clone(),
            vars,
        });
    }

    let mut pairs: Vec<Pair> = Vec::new();
    let mut pending: HashSet<(usize, usize)> = HashSet::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.push(Pair {
                i,
                j,
                lcm: basis[i].lm().lcm(basis[j].lm()),
            });
            pending.insert((i, j));
        }
    }

    let mut unit = basis.iter().any(|g| g.lm().is_constant());
    while !unit && !pairs.is_empty() {
        // normal strategy: smallest lcm first, ties by insertion order
        let mut best = 0;
        for k in 1..pairs.len() {
            if ord.cmp_exps(pairs[k].lcm.as_slice(), pairs[best].lcm.as_slice()) == Ordering::Less {
                best = k;
            }
        }
        let Pair { i, j, lcm } = pairs.remove(best);
        pending.remove(&(i, j));

        if basis[i].lm().is_coprime(basis[j].lm()) {
            continue;
        }
        if chain_criterion(i, j, &lcm, &basis, &pending) {
            continue;
        }

        let s = spoly_sorted(&basis[i], &basis[j], ord);
        let mut r = reduce_sorted(&s, &basis, ord, None);
        if r.is_zero() {
            continue;
        }
        r.make_monic();
        unit = r.lm().is_constant();
        let t = basis.len();
        for k in 0..t {
            pairs.push(Pair {
                i: k,
                j: t,
                lcm: basis[k].lm().lcm(r.lm()),
            });
            pending.insert((k, t));
        }
        basis.push(r);
    }

    if unit {
        return Ok(GroebnerBasis {
            basis: vec![Polynomial::one(vars.clone())],
            order: ord.clone(),
            vars,
        });
    }

    let reduced = reduce_basis(basis, ord);
    Ok(GroebnerBasis {
        basis: reduced.iter().map(|g| g.to_poly(&vars)).collect(),
        order: ord.clone(),
        vars,
    })
}

/// Buchberger's second criterion: some other leading monomial divides the
/// pair's lcm and both of its pairs with `i` and `j` are already handled.
fn chain_criterion(
    i: usize,
    j: usize,
    lcm: &ExponentVector,
    basis: &[SortedPoly],
    pending: &HashSet<(usize, usize)>,
) -> bool {
    let key = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
    (0..basis.len()).any(|k| {
        k != i
            && k != j
            && basis[k].lm().divides(lcm)
            && !pending.contains(&key(i, k))
            && !pending.contains(&key(j, k))
    })
}

/// Minimalizes, interreduces and sorts a Groebner basis.
fn reduce_basis(mut basis: Vec<SortedPoly>, ord: &MonomialOrder) -> Vec<SortedPoly> {
    basis.sort_by(|a, b| ord.cmp_exps(a.lm().as_slice(), b.lm().as_slice()));
    // drop elements whose leading monomial is divisible by an earlier (smaller) one
    let mut minimal: Vec<SortedPoly> = Vec::new();
    for g in basis {
        if !minimal.iter().any(|h| h.lm().divides(g.lm())) {
            minimal.push(g);
        }
    }
    for k in 0..minimal.len() {
        let others: Vec<SortedPoly> = minimal
            .iter()
            .enumerate()
            .filter(|(idx, _)| *idx != k)
            .map(|(_, g)| g.clone())
            .collect();
        let mut r = reduce_sorted(&minimal[k], &others, ord, None);
        r.make_monic();
        minimal[k] = r;
    }
    minimal.sort_by(|a, b| ord.cmp_exps(b.lm().as_slice(), a.lm().as_slice()));
    minimal
}

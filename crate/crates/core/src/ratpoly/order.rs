//! Monomial orders on exponent vectors.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::ExponentVector;

/// Which family of total orders to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderKind {
    Lex,
    Grevlex,
    /// Product of two grevlex orders: the first `split` prioritized variables
    /// form an elimination block that dominates the rest.
    Block {
        split: usize,
    },
}

/// A monomial order together with a variable priority.
///
/// `priority[0]` is the most significant variable. The identity permutation
/// gives the usual `x1 > x2 > ... > xn`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialOrder {
    kind: OrderKind,
    priority: Vec<usize>,
    identity: bool,
}

impl MonomialOrder {
    pub fn new(kind: OrderKind, priority: Vec<usize>) -> Result<Self> {
        let n = priority.len();
        let mut seen = vec![false; n];
        for &p in &priority {
            if p >= n || seen[p] {
                return Err(Error::Argument(format!(
                    "priority {priority:?} is not a permutation of 0..{n}"
                )));
            }
            seen[p] = true;
        }
        if let OrderKind::Block { split } = kind {
            if split > n {
                return Err(Error::Argument(format!(
                    "block split {split} exceeds variable count {n}"
                )));
            }
        }
        let identity = priority.iter().enumerate().all(|(i, &p)| i == p);
        Ok(Self {
            kind,
            priority,
            identity,
        })
    }

    pub fn lex(nvars: usize) -> Self {
        Self::new(OrderKind::Lex, (0..nvars).collect()).expect("identity permutation")
    }

    pub fn grevlex(nvars: usize) -> Self {
        Self::new(OrderKind::Grevlex, (0..nvars).collect()).expect("identity permutation")
    }

    /// Elimination order: the first `split` variables dominate, grevlex within blocks.
    pub fn block(nvars: usize, split: usize) -> Result<Self> {
        Self::new(OrderKind::Block { split }, (0..nvars).collect())
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn priority(&self) -> &[usize] {
        &self.priority
    }

    pub fn nvars(&self) -> usize {
        self.priority.len()
    }

    /// Unchecked comparison; both slices must have `nvars()` entries.
    pub fn cmp_exps(&self, a: &[i32], b: &[i32]) -> Ordering {
        debug_assert_eq!(a.len(), self.priority.len());
        debug_assert_eq!(b.len(), self.priority.len());
        match self.kind {
            OrderKind::Lex => {
                if self.identity {
                    return a.cmp(b);
                }
                for &k in &self.priority {
                    match a[k].cmp(&b[k]) {
                        Ordering::Equal => continue,
                        other => return other,
                    }
                }
                Ordering::Equal
            }
            OrderKind::Grevlex => self.grevlex_range(a, b, &self.priority),
            OrderKind::Block { split } => {
                let (head, tail) = self.priority.split_at(split);
                self.grevlex_range(a, b, head)
                    .then_with(|| self.grevlex_range(a, b, tail))
            }
        }
    }

    fn grevlex_range(&self, a: &[i32], b: &[i32], vars: &[usize]) -> Ordering {
        let da: i64 = vars.iter().map(|&k| a[k] as i64).sum();
        let db: i64 = vars.iter().map(|&k| b[k] as i64).sum();
        match da.cmp(&db) {
            Ordering::Equal => {}
            other => return other,
        }
        // smaller exponent in the least significant differing variable wins
        for &k in vars.iter().rev() {
            match a[k].cmp(&b[k]) {
                Ordering::Equal => continue,
                other => return other.reverse(),
            }
        }
        Ordering::Equal
    }
}

/// Compares two exponent vectors under `ord`.
pub fn order_compare(
    a: &ExponentVector,
    b: &ExponentVector,
    ord: &MonomialOrder,
) -> Result<Ordering> {
    if a.len() != b.len() || a.len() != ord.nvars() {
        return Err(Error::Dimension(format!(
            "cannot compare exponent vectors of length {} and {} under an order on {} variables",
            a.len(),
            b.len(),
            ord.nvars()
        )));
    }
    Ok(ord.cmp_exps(a.as_slice(), b.as_slice()))
}

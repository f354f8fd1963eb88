//! Integer kernels by unimodular column reduction, canonicalized by a row
//! Hermite normal form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

use super::ConstraintMatrix;

/// Integer basis of `{u in Z^m : A u = 0}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeBasis {
    vectors: Vec<Vec<i64>>,
    m: usize,
}

impl LatticeBasis {
    pub fn vectors(&self) -> &[Vec<i64>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.m
    }
}

/// Kernel lattice of `a` in row Hermite normal form.
///
/// Column operations bring `A` to echelon form while the same operations
/// applied to the identity track a unimodular `U` with `A U = [E | 0]`; the
/// columns of `U` under the zero block span the kernel over `Z`.
pub fn integer_kernel_basis(a: &ConstraintMatrix) -> LatticeBasis {
    let d = a.d();
    let m = a.m();
    let mut cols: Vec<Vec<BigInt>> = (0..m)
        .map(|j| (0..d).map(|i| BigInt::from(a.entry(i, j))).collect())
        .collect();
    let mut unimod: Vec<Vec<BigInt>> = (0..m)
        .map(|j| {
            (0..m)
                .map(|k| {
                    if k == j {
                        BigInt::from(1)
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect();

    let mut pivot = 0;
    for row in 0..d {
        if pivot == m {
            break;
        }
        loop {
            // smallest nonzero entry in this row moves to the pivot column
            let best = (pivot..m)
                .filter(|&j| !cols[j][row].is_zero())
                .min_by(|&x, &y| cols[x][row].abs().cmp(&cols[y][row].abs()));
            let Some(best) = best else { break };
            cols.swap(pivot, best);
            unimod.swap(pivot, best);
            let mut done = true;
            for j in (pivot + 1)..m {
                if cols[j][row].is_zero() {
                    continue;
                }
                let q = cols[j][row].div_floor(&cols[pivot][row]);
                axpy_col(&mut cols, j, pivot, &q);
                axpy_col(&mut unimod, j, pivot, &q);
                if !cols[j][row].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if !cols[pivot][row].is_zero() {
            pivot += 1;
        }
    }

    let kernel: Vec<Vec<BigInt>> = unimod[pivot..].to_vec();
    let vectors = row_hnf(kernel)
        .into_iter()
        .map(|v| {
            v.into_iter()
                .map(|x| x.to_i64().expect("kernel entry fits in i64"))
                .collect()
        })
        .collect();
    LatticeBasis { vectors, m }
}

/// `cols[dst] -= q * cols[src]`
fn axpy_col(cols: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    let (s, t) = if dst < src {
        let (lo, hi) = cols.split_at_mut(src);
        (&hi[0], &mut lo[dst])
    } else {
        let (lo, hi) = cols.split_at_mut(dst);
        (&lo[src], &mut hi[0])
    };
    for (x, y) in t.iter_mut().zip(s) {
        *x -= q * y;
    }
}

/// Row Hermite normal form of a full-row-rank integer matrix: positive
/// pivots, entries above each pivot reduced into `[0, pivot)`.
pub(crate) fn row_hnf(mut rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    if rows.is_empty() {
        return rows;
    }
    let ncols = rows[0].len();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        loop {
            let best = (r..rows.len())
                .filter(|&i| !rows[i][c].is_zero())
                .min_by(|&x, &y| rows[x][c].abs().cmp(&rows[y][c].abs()));
            let Some(best) = best else { break };
            rows.swap(r, best);
            let mut done = true;
            for i in (r + 1)..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[r][c]);
                let pivot_row = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= &q * y;
                }
                if !rows[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < rows.len() && !rows[r][c].is_zero() {
            if rows[r][c].is_negative() {
                for x in rows[r].iter_mut() {
                    *x = -x.clone();
                }
            }
            let pivot_row = rows[r].clone();
            for i in 0..r {
                let q = rows[i][c].div_floor(&pivot_row[c]);
                if q.is_zero() {
                    continue;
                }
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= &q * y;
                }
            }
            r += 1;
        }
    }
    rows.truncate(r);
    rows
}

/// Rank of `a` over the rationals.
pub fn rank(a: &ConstraintMatrix) -> usize {
    a.m() - integer_kernel_basis(a).len()
}

/// `A u` for an integer vector `u`: the exponent of `theta` in the image of
/// the monomial `x^u` under `x_j -> theta^(column j)`.
pub fn apply_monomial_lift(a: &ConstraintMatrix, u: &[i64]) -> Result<Vec<i64>> {
    if u.len() != a.m() {
        return Err(Error::Dimension(format!(
            "vector of length {} for a matrix with {} columns",
            u.len(),
            a.m()
        )));
    }
    Ok(a.rows()
        .iter()
        .map(|row| row.iter().zip(u).map(|(x, y)| x * y).sum())
        .collect())
}

/// Whether `(1, ..., 1)` is a rational combination of the rows of `a`.
///
/// Over `Q` the row space is the orthogonal complement of the kernel, so it
/// suffices that every kernel vector has coordinate sum zero.
pub fn check_ones_in_rowspan(a: &ConstraintMatrix) -> bool {
    integer_kernel_basis(a)
        .vectors()
        .iter()
        .all(|u| u.iter().sum::<i64>() == 0)
}

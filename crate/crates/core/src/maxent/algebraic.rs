//! Exact solution of small polynomial systems through a lex Gröbner basis
//! and triangular back-substitution.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::ratpoly::{buchberger, rat_to_f64, MonomialOrder, OrderKind, Polynomial, Rational};
use crate::toric::toric_param_exact;

use super::fit::{FitResult, SolverKind};
use super::roots::{dyadic_width, positive_roots, UniPoly};
use super::system::{direct_system_weighted, PolySystem};
use super::MaxEntProblem;

pub const MAX_ALGEBRAIC_VARS: usize = 3;
pub const MAX_ALGEBRAIC_DEGREE: i64 = 8;

/// Precision of the isolating intervals.
const ROOT_WIDTH: f64 = 1e-12;

/// A positive solution; `exact` is present when every coordinate is a
/// recognized rational.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraicSolution {
    pub theta: Vec<f64>,
    pub exact: Option<Vec<Rational>>,
}

#[derive(Clone)]
struct Partial {
    values: Vec<Option<Rational>>,
    exact: bool,
}

/// All solutions of the cleared equations with every coordinate positive.
///
/// A non-lex `order` first yields a basis under that order, which is then
/// converted to lex with the same variable priority. The lex basis must be
/// zero-dimensional; its elements are solved variable by variable from the
/// least significant one.
pub fn solve_algebraic(
    system: &PolySystem,
    order: &MonomialOrder,
) -> Result<Vec<AlgebraicSolution>> {
    let d = system.vars().len();
    let eqs = system.cleared();
    if d > MAX_ALGEBRAIC_VARS {
        return Err(Error::SizeLimit(format!(
            "algebraic solving is limited to {MAX_ALGEBRAIC_VARS} variables, got {d}"
        )));
    }
    if let Some(deg) = eqs
        .iter()
        .filter_map(|e| e.total_degree())
        .find(|&g| g > MAX_ALGEBRAIC_DEGREE)
    {
        return Err(Error::SizeLimit(format!(
            "algebraic solving is limited to total degree {MAX_ALGEBRAIC_DEGREE}, got {deg}"
        )));
    }
    if eqs.len() != d {
        return Err(Error::Argument(format!(
            "{} equations in {d} variables",
            eqs.len()
        )));
    }
    if order.nvars() != d {
        return Err(Error::Dimension(format!(
            "monomial order on {} variables for a system in {d}",
            order.nvars()
        )));
    }

    let lex = MonomialOrder::new(OrderKind::Lex, order.priority().to_vec())?;
    let gens = if order.kind() == OrderKind::Lex {
        eqs.to_vec()
    } else {
        buchberger(eqs, order)?.into_vec()
    };
    let gb = buchberger(&gens, &lex)?;
    if gb.is_unit() {
        return Ok(Vec::new());
    }
    if gb.is_empty() {
        return Err(Error::UnsupportedStructure(
            "every equation vanishes identically".into(),
        ));
    }
    let basis = gb.basis();

    let pure_power_in = |g: &Polynomial, v: usize| {
        g.leading_term(&lex).is_some_and(|(e, _)| {
            e.as_slice()
                .iter()
                .enumerate()
                .all(|(k, &x)| (k == v) == (x > 0))
        })
    };
    let sequence: Vec<usize> = order.priority().iter().rev().copied().collect();
    let width = dyadic_width(ROOT_WIDTH);

    let mut partials = vec![Partial {
        values: vec![None; d],
        exact: true,
    }];
    for (s, &v) in sequence.iter().enumerate() {
        let known = &sequence[..s];
        let relevant: Vec<&Polynomial> = basis
            .iter()
            .filter(|g| {
                g.involves(v) && (0..d).all(|k| k == v || known.contains(&k) || !g.involves(k))
            })
            .collect();
        let pivot = relevant
            .iter()
            .filter(|g| pure_power_in(g, v))
            .min_by_key(|g| g.degree_in(v))
            .ok_or_else(|| {
                Error::UnsupportedStructure(format!(
                    "the lex basis has no element with leading monomial a power of {}; the system is not zero-dimensional",
                    system.vars()[v]
                ))
            })?;

        let mut next = Vec::new();
        for partial in &partials {
            let uni = UniPoly::from_polynomial(&pivot.specialize(&partial.values)?, v)?;
            if uni.is_zero() {
                return Err(Error::UnsupportedStructure(
                    "degenerate back-substitution".into(),
                ));
            }
            for root in positive_roots(&uni, &width)? {
                let mut cand = partial.clone();
                cand.values[v] = Some(root.value());
                cand.exact &= root.exact.is_some();
                if relevant
                    .iter()
                    .all(|g| std::ptr::eq(*g, *pivot) || vanishes(g, &cand))
                {
                    next.push(cand);
                }
            }
        }
        partials = next;
    }

    let mut out: Vec<AlgebraicSolution> = partials
        .into_iter()
        .map(|p| {
            let values: Vec<Rational> = p
                .values
                .into_iter()
                .map(|x| x.expect("every variable solved"))
                .collect();
            AlgebraicSolution {
                theta: values.iter().map(rat_to_f64).collect(),
                exact: p.exact.then_some(values),
            }
        })
        .collect();
    out.sort_by(|a, b| a.theta.partial_cmp(&b.theta).expect("finite roots"));
    Ok(out)
}

fn vanishes(g: &Polynomial, cand: &Partial) -> bool {
    if cand.exact {
        let point: Vec<Rational> = cand
            .values
            .iter()
            .map(|x| x.clone().unwrap_or_else(Rational::zero))
            .collect();
        return g.eval(&point).is_ok_and(|v| v.is_zero());
    }
    let point: Vec<f64> = cand
        .values
        .iter()
        .map(|x| x.as_ref().map_or(0.0, rat_to_f64))
        .collect();
    let scale: f64 = g
        .terms()
        .map(|(e, c)| {
            let mut t = rat_to_f64(&c.abs());
            for (k, &ek) in e.as_slice().iter().enumerate() {
                if ek != 0 {
                    t *= point[k].powi(ek);
                }
            }
            t
        })
        .sum();
    g.eval_f64(&point)
        .is_ok_and(|v| v.abs() <= 1e-6 * scale + 1e-12)
}

/// Fits by solving the direct system exactly.
///
/// Rational roots carry through to an exact distribution in
/// [`FitResult::p_exact`].
pub fn fit_algebraic(problem: &MaxEntProblem, order: &MonomialOrder) -> Result<FitResult> {
    let a = problem.matrix();
    let system = direct_system_weighted(a, &problem.exact_targets(), problem.prior())?;
    let solutions = solve_algebraic(&system, order)?;
    let mut best: Option<(FitResult, &AlgebraicSolution)> = None;
    for sol in &solutions {
        let xi: Vec<f64> = sol.theta.iter().map(|t| -t.ln()).collect();
        let fit = FitResult::assemble(problem, xi, 0, SolverKind::Groebner);
        if best.as_ref().is_none_or(|(b, _)| fit.residual < b.residual) {
            best = Some((fit, sol));
        }
    }
    let (mut fit, sol) = best.ok_or_else(|| Error::InfeasibleMoments {
        iterations: 0,
        residual: f64::NAN,
        detail: "the moment equations have no positive solution".into(),
    })?;
    if let Some(theta) = &sol.exact {
        fit.p_exact = Some(toric_param_exact(a, problem.prior(), theta)?);
    }
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxent::{direct_system, fit_numeric, FitOptions, Targets};
    use crate::ratpoly::rat;
    use crate::toric::ConstraintMatrix;

    fn mat(rows: &[&[i64]]) -> ConstraintMatrix {
        ConstraintMatrix::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn unit_root() {
        let s = direct_system(&mat(&[&[0, 1, 2]]), &[rat(1, 1)]).unwrap();
        let sols = solve_algebraic(&s, &MonomialOrder::lex(1)).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].exact, Some(vec![rat(1, 1)]));
        assert_eq!(sols[0].theta, vec![1.0]);
    }

    #[test]
    fn irrational_root() {
        let s = direct_system(&mat(&[&[0, 1, 2]]), &[rat(1, 2)]).unwrap();
        for ord in [MonomialOrder::lex(1), MonomialOrder::grevlex(1)] {
            let sols = solve_algebraic(&s, &ord).unwrap();
            assert_eq!(sols.len(), 1);
            assert!((sols[0].theta[0] - (-1.0 + 13f64.sqrt()) / 6.0).abs() < 1e-12);
            assert!(sols[0].exact.is_none());
        }
    }

    #[test]
    fn linear_triangular_system() {
        let a = mat(&[&[1, 0, 0], &[0, 1, 0]]);
        let problem =
            MaxEntProblem::new(a, Targets::Moments(vec![rat(1, 4), rat(1, 2)]), None).unwrap();
        let fit = fit_algebraic(&problem, &MonomialOrder::lex(2)).unwrap();
        assert_eq!(fit.p_exact, Some(vec![rat(1, 4), rat(1, 2), rat(1, 4)]));
    }

    #[test]
    fn agrees_with_newton_on_two_constraints() {
        let a = mat(&[&[0, 1, 2, 1], &[1, 0, 1, 2]]);
        let problem =
            MaxEntProblem::new(a, Targets::Moments(vec![rat(6, 5), rat(1, 1)]), None).unwrap();
        let n = fit_numeric(&problem, SolverKind::Newton, &FitOptions::default()).unwrap();
        for ord in [MonomialOrder::lex(2), MonomialOrder::grevlex(2)] {
            let g = fit_algebraic(&problem, &ord).unwrap();
            for (x, y) in g.xi.iter().zip(&n.xi) {
                assert!(((-x).exp() - (-y).exp()).abs() < 1e-8);
            }
            assert!(g.residual < 1e-10);
        }
    }

    #[test]
    fn dice_through_the_algebraic_path() {
        let problem = MaxEntProblem::new(
            mat(&[&[1, 2, 3, 4, 5, 6]]),
            Targets::Moments(vec![rat(9, 2)]),
            None,
        )
        .unwrap();
        let g = fit_algebraic(&problem, &MonomialOrder::lex(1)).unwrap();
        assert!(((-g.xi[0]).exp() - 1.449_253_995_360_700_6).abs() < 1e-10);
    }

    #[test]
    fn size_guards() {
        let a = ConstraintMatrix::new(vec![
            vec![1, 0, 0, 0, 0],
            vec![0, 1, 0, 0, 0],
            vec![0, 0, 1, 0, 0],
            vec![0, 0, 0, 1, 0],
        ])
        .unwrap();
        let s = direct_system(&a, &vec![rat(1, 5); 4]).unwrap();
        assert!(matches!(
            solve_algebraic(&s, &MonomialOrder::lex(4)),
            Err(Error::SizeLimit(_))
        ));

        let b = mat(&[&[0, 9, 1]]);
        let s = direct_system(&b, &[rat(1, 1)]).unwrap();
        assert!(matches!(
            solve_algebraic(&s, &MonomialOrder::lex(1)),
            Err(Error::SizeLimit(_))
        ));
    }

    #[test]
    fn positive_dimensional_is_unsupported() {
        // both constraints identical: one equation repeated in two variables
        let a = mat(&[&[0, 1, 2], &[0, 1, 2]]);
        let s = direct_system(&a, &[rat(1, 1), rat(1, 1)]).unwrap();
        assert!(matches!(
            solve_algebraic(&s, &MonomialOrder::lex(2)),
            Err(Error::UnsupportedStructure(_))
        ));
    }

    #[test]
    fn no_positive_solution() {
        // -t1 - 2 has only a negative root
        let a = mat(&[&[0, 1]]);
        let problem = MaxEntProblem::new(a, Targets::Moments(vec![rat(2, 1)]), None).unwrap();
        assert!(matches!(
            fit_algebraic(&problem, &MonomialOrder::lex(1)),
            Err(Error::InfeasibleMoments { .. })
        ));
    }
}

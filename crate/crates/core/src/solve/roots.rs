use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{residual_check, Solution, SolutionSet, SolveError};
use crate::expr::{Expr, Symbol};
use crate::rational::Rational;
use crate::simplify::{coefficients, rational_coefficients, rational_roots, simplify, SimplifyError, UniPoly, MAX_FACTOR_DEGREE};

fn single(var: &Symbol, value: Expr, multiplicity: usize) -> Solution {
    let mut values = BTreeMap::new();
    values.insert(var.clone(), value);
    Solution { values, multiplicity }
}

/// Real roots of a polynomial equation `e = 0` in `var`.
///
/// With rational coefficients every rational root is found with its
/// multiplicity, a leftover quadratic is solved by the quadratic formula and
/// anything else is reported in `unsolved`. Symbolic coefficients are handled
/// up to degree 2.
pub fn roots_univariate(e: &Expr, var: &Symbol) -> Result<SolutionSet, SolveError> {
    let mut set = SolutionSet::new(vec![var.clone()]);
    match rational_coefficients(e, var) {
        Ok(c) => rational_case(UniPoly::new(c), var, &mut set)?,
        Err(SimplifyError::NotPolynomial { .. }) => symbolic_case(e, var, &mut set)?,
        Err(err) => return Err(err.into()),
    }
    residual_check(std::slice::from_ref(e), &set)?;
    Ok(set)
}

fn rational_case(p: UniPoly, var: &Symbol, set: &mut SolutionSet) -> Result<(), SolveError> {
    if p.degree() > MAX_FACTOR_DEGREE {
        return Err(SimplifyError::DegreeTooHigh { degree: p.degree(), cap: MAX_FACTOR_DEGREE }.into());
    }
    if p.is_zero() {
        return Err(SolveError::Indeterminate(var.clone()));
    }
    let (roots, rest) = rational_roots(&p);
    for (r, m) in roots {
        set.solutions.push(single(var, Expr::num(r), m));
    }
    let x = Expr::symbol(var.clone());
    match rest.degree() {
        0 => {}
        2 => {
            let c = rest.coeffs();
            let disc = &c[1] * &c[1] - Rational::from_integer(BigInt::from(4)) * &c[2] * &c[0];
            if disc.is_positive() {
                let sq = Expr::num(disc).sqrt();
                let b = Expr::num(c[1].clone());
                let two_a = Expr::num(&c[2] * Rational::from_integer(BigInt::from(2)));
                set.solutions.push(single(var, simplify(&((-&b + &sq) / &two_a)), 1));
                set.solutions.push(single(var, simplify(&((-&b - &sq) / &two_a)), 1));
            } else {
                set.unsolved.push(rest.to_expr(&x));
            }
        }
        _ => set.unsolved.push(rest.to_expr(&x)),
    }
    Ok(())
}

fn symbolic_case(e: &Expr, var: &Symbol, set: &mut SolutionSet) -> Result<(), SolveError> {
    let c = coefficients(e, var)?;
    match c.len() {
        0 => Err(SolveError::Indeterminate(var.clone())),
        1 => Ok(()),
        2 => {
            set.assume(c[1].clone());
            set.solutions.push(single(var, simplify(&(-&c[0] / &c[1])), 1));
            Ok(())
        }
        3 => {
            let (a, b, c0) = (&c[2], &c[1], &c[0]);
            set.assume(a.clone());
            let disc = simplify(&(b * b - Expr::int(4) * a * c0));
            if disc.is_zero() {
                set.solutions.push(single(var, simplify(&(-b / (Expr::int(2) * a))), 2));
                return Ok(());
            }
            if disc.as_num().is_some_and(|q| q.is_negative() || q.is_zero()) {
                set.unsolved.push(e.clone());
                return Ok(());
            }
            let sq = disc.sqrt();
            let two_a = Expr::int(2) * a;
            set.solutions.push(single(var, simplify(&((-b + &sq) / &two_a)), 1));
            set.solutions.push(single(var, simplify(&((-b - &sq) / &two_a)), 1));
            Ok(())
        }
        n => Err(SolveError::NotInvertible {
            unknown: var.clone(),
            reason: format!("degree {} with symbolic coefficients", n - 1),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn stationary_points() {
        let x = Symbol::new("x");
        let s = roots_univariate(&p("x^5 - 3*x^4 + x^3 + 3*x^2 - 2*x"), &x).unwrap();
        assert_eq!(s.values_of(&x), vec![p("-1"), p("0"), p("1"), p("2")]);
        let mult: usize = s.solutions.iter().map(|s| s.multiplicity).sum();
        assert_eq!(mult, 5);
        assert!(s.unsolved.is_empty());
        assert_eq!(s.to_string().lines().next(), Some("Solution 1:"));
    }

    #[test]
    fn quadratic_forms() {
        let x = Symbol::new("x");
        let s = roots_univariate(&p("x^2 - 2"), &x).unwrap();
        assert_eq!(s.values_of(&x), vec![p("sqrt(2)"), p("-sqrt(2)")]);
        let s = roots_univariate(&p("x^2 + 1"), &x).unwrap();
        assert!(s.is_empty());
        assert_eq!(s.unsolved, vec![p("x^2 + 1")]);
        let s = roots_univariate(&p("a*x^2 - b"), &x).unwrap();
        assert_eq!(s.len(), 2);
        let s = roots_univariate(&p("a*x - b"), &x).unwrap();
        assert_eq!(s.values_of(&x), vec![p("b/a")]);
        assert_eq!(s.assumptions, vec![p("a")]);
    }

    #[test]
    fn degenerate() {
        let x = Symbol::new("x");
        assert_eq!(roots_univariate(&p("x - x"), &x), Err(SolveError::Indeterminate(x.clone())));
        assert!(roots_univariate(&p("3"), &x).unwrap().is_empty());
        assert!(matches!(roots_univariate(&p("log(x)"), &x), Err(SolveError::Simplify(_))));
    }
}

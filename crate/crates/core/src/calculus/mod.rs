//! Differentiation, limits, polynomial integration and closed-form sums.

mod held;
mod integrate;
mod limit;
mod sum;

use crate::expr::{Expr, Func, Node, Symbol};
use crate::simplify::SimplifyError;
use crate::symmat::SymMatrix;

pub use held::{HeldForm, HeldKind};
pub use integrate::{antiderivative_poly, definite_integral_poly};
pub use limit::{limit, Direction, LimitPoint, LimitValue};
pub use sum::{faulhaber, sum_closed_form, MAX_SUM_DEGREE};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CalculusError {
    #[error(transparent)]
    Simplify(#[from] SimplifyError),
    #[error("unsupported limit form: {0}")]
    Unsupported(String),
    #[error("limit does not exist: {0}")]
    DoesNotExist(String),
    #[error("summand degree {degree} exceeds the cap of {cap}")]
    SumDegree { degree: usize, cap: usize },
    #[error("limit is infinite")]
    Infinite,
}

/// Exact derivative of `e` with respect to `var`.
pub fn derivative(e: &Expr, var: &Symbol) -> Expr {
    if !e.contains(var) {
        return Expr::zero();
    }
    match e.node() {
        Node::Num(_) => Expr::zero(),
        Node::Sym(s) => {
            if s == var {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Node::Add(ch) => Expr::add_all(ch.iter().map(|c| derivative(c, var))),
        Node::Mul(ch) => {
            let (dep, indep): (Vec<&Expr>, Vec<&Expr>) = ch.iter().partition(|c| c.contains(var));
            let constant = Expr::mul_all(indep.into_iter().cloned());
            let mut terms = Vec::with_capacity(dep.len());
            for i in 0..dep.len() {
                let mut f: Vec<Expr> = Vec::with_capacity(dep.len());
                for (j, c) in dep.iter().enumerate() {
                    f.push(if i == j { derivative(c, var) } else { (*c).clone() });
                }
                terms.push(Expr::mul_all(f));
            }
            constant * Expr::add_all(terms)
        }
        Node::Pow(b, x) => {
            if !x.contains(var) {
                x * b.pow(&(x - 1)) * derivative(b, var)
            } else if !b.contains(var) {
                e * b.log() * derivative(x, var)
            } else {
                e * (derivative(x, var) * b.log() + x * derivative(b, var) / b)
            }
        }
        Node::Func(f, a) => {
            let da = derivative(a, var);
            let outer = match f {
                Func::Exp => e.clone(),
                Func::Log => a.recip(),
                Func::Sqrt => (Expr::int(2) * e).recip(),
                Func::Sin => a.cos(),
                Func::Cos => -a.sin(),
                Func::Asin => (Expr::one() - a.powi(2)).sqrt().recip(),
            };
            outer * da
        }
    }
}

/// Repeated differentiation in the given order.
pub fn derivative_n(e: &Expr, vars: &[Symbol]) -> Expr {
    vars.iter().fold(e.clone(), |acc, v| derivative(&acc, v))
}

/// Column vector of partial derivatives in `vars` order.
pub fn score(e: &Expr, vars: &[Symbol]) -> SymMatrix {
    SymMatrix::column(vars.iter().map(|v| derivative(e, v)).collect())
}

/// Matrix of second partials; the upper triangle is computed and mirrored so
/// the result is exactly symmetric.
pub fn hessian(e: &Expr, vars: &[Symbol]) -> SymMatrix {
    let n = vars.len();
    let first: Vec<Expr> = vars.iter().map(|v| derivative(e, v)).collect();
    let mut m = SymMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let d = derivative(&first[i], &vars[j]);
            m.set(i, j, d.clone());
            m.set(j, i, d);
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn polynomial_gradient() {
        let x = Symbol::new("x");
        let g = derivative(&p("1 - x^2 + x^3 + x^4/4 - 3*x^5/5 + x^6/6"), &x);
        assert_eq!(g, p("x^5 - 3*x^4 + x^3 + 3*x^2 - 2*x"));
        assert_eq!(derivative(&p("a*x"), &x), p("a"));
    }

    #[test]
    fn mixed_partial() {
        let (x, y) = (Symbol::new("x"), Symbol::new("y"));
        let d = derivative_n(&p("sin(x*y)"), &[x, y]);
        assert_eq!(d, p("-x*y*sin(x*y) + cos(x*y)"));
    }

    #[test]
    fn function_table() {
        let x = Symbol::new("x");
        assert_eq!(derivative(&p("log(x)"), &x), p("1/x"));
        assert_eq!(derivative(&p("exp(2*x)"), &x), p("2*exp(2*x)"));
        assert_eq!(derivative(&p("sqrt(x)"), &x), p("1/(2*sqrt(x))"));
        assert_eq!(derivative(&p("asin(x)"), &x), p("1/sqrt(1 - x^2)"));
        assert_eq!(derivative(&p("2^x"), &x), p("2^x*log(2)"));
        assert_eq!(derivative(&p("x^x"), &x), p("x^x*(log(x) + 1)"));
    }

    #[test]
    fn hessian_is_symmetric_and_zero_for_linear() {
        let b = [Symbol::new("b_1"), Symbol::new("b_2")];
        let h = hessian(&p("b_1*x_1 + b_2*x_2"), &b);
        assert!(h.entries().iter().all(|e| e.is_zero()));
        let h = hessian(&p("exp(b_1*b_2^2)"), &b);
        assert_eq!(h.get(0, 1), h.get(1, 0));
        let s = score(&p("7"), &b);
        assert_eq!((s.rows(), s.cols()), (2, 1));
        assert!(s.entries().iter().all(|e| e.is_zero()));
    }
}

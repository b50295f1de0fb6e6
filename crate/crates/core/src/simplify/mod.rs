//! Explicit rewriting: expansion, rational normalization, univariate
//! and multivariate factoring and the combined `simplify` pipeline.

mod factor;
mod split;

use crate::expr::{Expr, Func, Node, Symbol};
use crate::ratfunc::{AtomTable, ConvertOptions, RatFunc};
use crate::rational::Rational;

pub use factor::{factor_univariate, rational_roots, UniPoly, MAX_FACTOR_DEGREE};
pub use split::{factor, factor_poly};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimplifyError {
    #[error("`{expr}` is not a polynomial in {var}")]
    NotPolynomial { expr: String, var: String },
    #[error("polynomial degree {degree} exceeds the cap of {cap}")]
    DegreeTooHigh { degree: usize, cap: usize },
}

fn addends(e: &Expr) -> Vec<Expr> {
    match e.node() {
        Node::Add(ch) => ch.clone(),
        _ => vec![e.clone()],
    }
}

fn distribute(a: &Expr, b: &Expr) -> Expr {
    let (ta, tb) = (addends(a), addends(b));
    if ta.len() == 1 && tb.len() == 1 {
        return a * b;
    }
    let mut out = Vec::with_capacity(ta.len() * tb.len());
    for x in &ta {
        for y in &tb {
            out.push(x * y);
        }
    }
    Expr::add_all(out)
}

/// Distributes products and positive integer powers over sums. Function
/// arguments are left alone; bases of negative powers are expanded in place.
pub fn expand(e: &Expr) -> Expr {
    match e.node() {
        Node::Num(_) | Node::Sym(_) | Node::Func(..) => e.clone(),
        Node::Add(ch) => Expr::add_all(ch.iter().map(expand)),
        Node::Mul(ch) => {
            let mut acc = Expr::one();
            for c in ch {
                acc = distribute(&acc, &expand(c));
            }
            acc
        }
        Node::Pow(b, x) => {
            let eb = expand(b);
            match x.as_i64() {
                Some(k) if k > 1 && matches!(eb.node(), Node::Add(_)) => {
                    let mut acc = eb.clone();
                    for _ in 1..k {
                        acc = distribute(&acc, &eb);
                    }
                    acc
                }
                _ => eb.pow(x),
            }
        }
    }
}

/// Rational normal form with common factors cancelled. Exponentials are kept
/// as opaque atoms.
pub fn cancel(e: &Expr) -> Expr {
    let mut t = AtomTable::new();
    let rf = t.normal_form(e, ConvertOptions::default());
    t.to_expr(&rf)
}

/// Numerator and denominator of the rational normal form.
pub fn together(e: &Expr) -> (Expr, Expr) {
    let mut t = AtomTable::new();
    let rf = t.normal_form(e, ConvertOptions::default());
    let num = t.to_expr(&RatFunc::from_poly(rf.num.clone()));
    let den = t.to_expr(&RatFunc::from_poly(rf.den.clone()));
    (num, den)
}

/// Combined pipeline: simplify function arguments, apply `log(exp x) = x`
/// and `exp(log x) = x`, bring everything over a common denominator with
/// cancellation (exponentials of sums split into products of atoms), then
/// merge exponential factors back together.
pub fn simplify(e: &Expr) -> Expr {
    let inner = simplify_args(e);
    let mut t = AtomTable::new();
    let rf = t.normal_form(&inner, ConvertOptions { split_exp: true });
    merge_exp(&t.to_expr(&rf))
}

fn simplify_args(e: &Expr) -> Expr {
    match e.node() {
        Node::Num(_) | Node::Sym(_) => e.clone(),
        Node::Add(_) | Node::Mul(_) => e.rebuild(e.children().into_iter().map(simplify_args).collect()),
        Node::Pow(b, x) => {
            if x.as_i64().is_some() {
                simplify_args(b).pow(x)
            } else {
                simplify(b).pow(&simplify(x))
            }
        }
        Node::Func(f, a) => {
            let a = simplify(a);
            match (f, a.node()) {
                (Func::Log, Node::Func(Func::Exp, inner)) => inner.clone(),
                (Func::Exp, Node::Func(Func::Log, inner)) => inner.clone(),
                _ => Expr::apply(*f, a),
            }
        }
    }
}

/// Rewrites products of exponentials `exp(a)^k * exp(b)` as a single
/// `exp(k*a + b)`.
pub fn merge_exp(e: &Expr) -> Expr {
    e.map_bottom_up(&mut |n: Expr| match n.node() {
        Node::Mul(ch) => {
            let mut args = Vec::new();
            let mut rest = Vec::new();
            for c in ch {
                match exp_power(c) {
                    Some(a) => args.push(a),
                    None => rest.push(c.clone()),
                }
            }
            if args.len() < 2 {
                return n;
            }
            let merged = expand(&Expr::add_all(args)).exp();
            rest.push(merged);
            Expr::mul_all(rest)
        }
        Node::Pow(..) => match exp_power(&n) {
            Some(a) => expand(&a).exp(),
            None => n,
        },
        _ => n,
    })
}

// exp(a)^k -> k*a
fn exp_power(e: &Expr) -> Option<Expr> {
    match e.node() {
        Node::Func(Func::Exp, a) => Some(a.clone()),
        Node::Pow(b, k) => match (b.node(), k.as_i64()) {
            (Node::Func(Func::Exp, a), Some(_)) => Some(a * k),
            _ => None,
        },
        _ => None,
    }
}

/// Coefficients `[c_0, c_1, ...]` of `e` as a polynomial in `var`. The
/// coefficients may involve other symbols and functions not containing `var`.
pub fn coefficients(e: &Expr, var: &Symbol) -> Result<Vec<Expr>, SimplifyError> {
    let not_poly = || SimplifyError::NotPolynomial { expr: e.to_string(), var: var.to_string() };
    let mut t = AtomTable::new();
    let v = Expr::symbol(var.clone());
    t.intern(&v);
    let rf = t.to_ratfunc(e, ConvertOptions::default());
    let rf = t.reduce_radicals(&rf).normalize();
    if rf.den.uses_var(0) {
        return Err(not_poly());
    }
    if t.atoms().iter().skip(1).any(|a| a.contains(var)) {
        return Err(not_poly());
    }
    let den = RatFunc::from_poly(rf.den.clone());
    Ok(rf
        .num
        .coeffs_in(0)
        .into_iter()
        .map(|c| {
            let q = RatFunc::from_poly(c).div(&den).expect("denominator is nonzero").normalize();
            t.to_expr(&q)
        })
        .collect())
}

/// Builds `Σ c_k var^k`.
pub fn from_coefficients(coeffs: &[Expr], var: &Symbol) -> Expr {
    let v = Expr::symbol(var.clone());
    Expr::add_all(coeffs.iter().enumerate().map(|(k, c)| c * v.powi(k as i64)))
}

/// Numeric coefficients of a univariate polynomial with rational coefficients.
pub fn rational_coefficients(e: &Expr, var: &Symbol) -> Result<Vec<Rational>, SimplifyError> {
    let coeffs = coefficients(e, var)?;
    coeffs
        .iter()
        .map(|c| c.as_num().cloned())
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| SimplifyError::NotPolynomial { expr: e.to_string(), var: var.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn expand_products() {
        assert_eq!(expand(&p("(x - 1)^2*(x + 1)*x*(x - 2)")), p("x^5 - 3*x^4 + x^3 + 3*x^2 - 2*x"));
        assert_eq!(expand(&p("x")), p("x"));
        assert_eq!(expand(&p("2*(a + b)")), p("2*a + 2*b"));
        assert_eq!(expand(&p("log((x + 1)^2)")), p("log((x + 1)^2)"));
    }

    #[test]
    fn cancel_examples() {
        assert_eq!(cancel(&p("(a^2 - b^2)*(a/(a^2 - b^2))")), p("a"));
        assert_eq!(cancel(&p("x/x")), Expr::one());
        assert_eq!(cancel(&p("(x^2 - 1)/(x - 1)")), p("x + 1"));
    }

    #[test]
    fn simplify_logistic_pieces() {
        assert_eq!(simplify(&p("exp(s)/(exp(s) + 1) + 1/(exp(s) + 1)")), Expr::one());
        assert_eq!(simplify(&p("log(exp(x))")), p("x"));
        assert_eq!(simplify(&p("exp(a)*exp(b)")), p("exp(a + b)"));
        let e = p("exp(b_1*x_1 + b_2*x_2)^2");
        assert_eq!(simplify(&e), p("exp(2*b_1*x_1 + 2*b_2*x_2)"));
    }

    #[test]
    fn simplify_is_idempotent_on_samples() {
        for s in [
            "x_1*(y - n*exp(s)/(exp(s) + 1))",
            "a/(a^2 - b^2) - b/(a - b)",
            "sqrt(1 - a^2)*sqrt(1 - a^2)/(1 - a)",
            "log(x)^2/(x*log(x))",
        ] {
            let once = simplify(&p(s));
            assert_eq!(simplify(&once), once, "{s}");
        }
    }

    #[test]
    fn coefficient_extraction() {
        let x = Symbol::new("x");
        let c = coefficients(&p("a*x^2 + x/b + 3"), &x).unwrap();
        assert_eq!(c, vec![p("3"), p("1/b"), p("a")]);
        assert!(coefficients(&p("log(x)"), &x).is_err());
        assert!(coefficients(&p("1/x"), &x).is_err());
        assert_eq!(from_coefficients(&c, &x), p("a*x^2 + x/b + 3"));
    }
}

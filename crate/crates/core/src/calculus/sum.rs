//! Closed-form finite sums of polynomial summands (Faulhaber formulas).

use num_traits::Signed;

use super::CalculusError;
use crate::expr::{Expr, Symbol};
use crate::simplify::{coefficients, simplify};

pub const MAX_SUM_DEGREE: usize = 4;

/// `Σ_{i=1}^{m} i^k` as an expression in `m`, for `k <= 4`.
pub fn faulhaber(k: usize, m: &Expr) -> Option<Expr> {
    let one = Expr::one();
    let m1 = m + &one;
    Some(match k {
        0 => m.clone(),
        1 => m * &m1 / 2,
        2 => m * &m1 * (Expr::int(2) * m + &one) / 6,
        3 => (m * &m1 / 2).powi(2),
        4 => m * &m1 * (Expr::int(2) * m + &one) * (Expr::int(3) * m.powi(2) + Expr::int(3) * m - &one) / 30,
        _ => return None,
    })
}

/// `Σ_{var=lo}^{hi} body` for a summand polynomial in `var` of degree at
/// most 4. The bounds may be symbolic; a numerically empty range (lo > hi)
/// sums to 0.
pub fn sum_closed_form(body: &Expr, var: &Symbol, lo: &Expr, hi: &Expr) -> Result<Expr, CalculusError> {
    if let (Some(l), Some(h)) = (lo.as_num(), hi.as_num()) {
        if (l - h).is_positive() {
            return Ok(Expr::zero());
        }
    }
    let coeffs = coefficients(body, var)?;
    let degree = coeffs.len().saturating_sub(1);
    if degree > MAX_SUM_DEGREE {
        return Err(CalculusError::SumDegree { degree, cap: MAX_SUM_DEGREE });
    }
    let below = lo - 1;
    let mut terms = Vec::with_capacity(coeffs.len());
    for (k, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let f_hi = faulhaber(k, hi).expect("degree checked");
        let f_lo = faulhaber(k, &below).expect("degree checked");
        terms.push(c * (f_hi - f_lo));
    }
    Ok(simplify(&Expr::add_all(terms)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn nested_variance_sum() {
        let (i, j) = (Symbol::new("i"), Symbol::new("j"));
        let inner = sum_closed_form(&p("r"), &j, &p("i + 1"), &p("n")).unwrap();
        let outer = sum_closed_form(&inner, &i, &p("1"), &p("n - 1")).unwrap();
        let total = simplify(&(p("v") * (p("n") + Expr::int(2) * outer)));
        assert_eq!(simplify(&(total - p("n*v*(r*(n - 1) + 1)"))), Expr::zero());
    }

    #[test]
    fn simple_sums() {
        let i = Symbol::new("i");
        assert_eq!(sum_closed_form(&p("1"), &i, &p("1"), &p("n")).unwrap(), p("n"));
        assert_eq!(sum_closed_form(&p("i"), &i, &p("5"), &p("2")).unwrap(), Expr::zero());
        let s = sum_closed_form(&p("i^2"), &i, &p("1"), &p("n")).unwrap();
        for n in 1..=20i64 {
            let brute: i64 = (1..=n).map(|k| k * k).sum();
            assert_eq!(simplify(&s.subs1(&Symbol::new("n"), &Expr::int(n))), Expr::int(brute));
        }
        assert!(matches!(sum_closed_form(&p("i^5"), &i, &p("1"), &p("n")), Err(CalculusError::SumDegree { .. })));
        assert!(sum_closed_form(&p("log(i)"), &i, &p("1"), &p("n")).is_err());
    }
}

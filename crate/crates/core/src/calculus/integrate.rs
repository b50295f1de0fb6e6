//! Power-rule integration of polynomials.

use super::CalculusError;
use crate::expr::{Expr, Symbol};
use crate::simplify::{coefficients, simplify};

/// Antiderivative with zero constant of integration.
pub fn antiderivative_poly(e: &Expr, var: &Symbol) -> Result<Expr, CalculusError> {
    let coeffs = coefficients(e, var)?;
    let x = Expr::symbol(var.clone());
    Ok(Expr::add_all(coeffs.iter().enumerate().map(|(k, c)| {
        let k1 = k as i64 + 1;
        c * x.powi(k1) / k1
    })))
}

pub fn definite_integral_poly(e: &Expr, var: &Symbol, lo: &Expr, hi: &Expr) -> Result<Expr, CalculusError> {
    let f = antiderivative_poly(e, var)?;
    Ok(simplify(&(f.subs1(var, hi) - f.subs1(var, lo))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn recovers_the_polynomial() {
        let x = Symbol::new("x");
        let g = parse("x^5 - 3*x^4 + x^3 + 3*x^2 - 2*x").unwrap();
        let f = antiderivative_poly(&g, &x).unwrap();
        assert_eq!(f, parse("x^6/6 - 3*x^5/5 + x^4/4 + x^3 - x^2").unwrap());
        assert_eq!(f.to_string(), "x^6/6 - 3*x^5/5 + x^4/4 + x^3 - x^2");
    }

    #[test]
    fn definite_values() {
        let x = Symbol::new("x");
        let one = Expr::one();
        assert_eq!(definite_integral_poly(&Expr::zero(), &x, &Expr::zero(), &one).unwrap(), Expr::zero());
        let v = definite_integral_poly(&parse("1 - x^2").unwrap(), &x, &-&one, &one).unwrap();
        assert_eq!(v, Expr::frac(4, 3));
        assert!(antiderivative_poly(&parse("sqrt(1 - x^2)").unwrap(), &x).is_err());
    }
}

//! Univariate factoring over the rationals: content, powers of the variable,
//! rational roots (by the rational-root test and synthetic division) and a
//! final quadratic through the quadratic formula.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{rational_coefficients, SimplifyError};
use crate::expr::{Expr, Symbol};
use crate::rational::{self, Rational};

pub const MAX_FACTOR_DEGREE: usize = 8;

/// Dense univariate polynomial, coefficients from the constant term up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lead(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Quotient by `(x - r)`; the remainder is discarded.
    pub fn deflate(&self, r: &Rational) -> UniPoly {
        let n = self.coeffs.len();
        if n <= 1 {
            return UniPoly::new(Vec::new());
        }
        let mut q = vec![Rational::zero(); n - 1];
        let mut carry = Rational::zero();
        for i in (1..n).rev() {
            carry = &self.coeffs[i] + carry * r;
            q[i - 1] = carry.clone();
        }
        UniPoly::new(q)
    }

    /// Positive-leading integer primitive part and the factor removed.
    pub fn primitive(&self) -> (Rational, UniPoly) {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in &self.coeffs {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return (Rational::zero(), self.clone());
        }
        let mut content = Rational::new(num, den);
        if self.lead().is_negative() {
            content = -content;
        }
        let inv = content.recip();
        (content, UniPoly::new(self.coeffs.iter().map(|c| c * &inv).collect()))
    }

    pub fn to_expr(&self, var: &Expr) -> Expr {
        Expr::add_all(self.coeffs.iter().enumerate().map(|(k, c)| Expr::num(c.clone()) * var.powi(k as i64)))
    }
}

/// Rational roots with multiplicities (ascending) and the remaining factor.
/// Zero is included when the constant term vanishes.
pub fn rational_roots(p: &UniPoly) -> (Vec<(Rational, usize)>, UniPoly) {
    let (_, mut p) = p.primitive();
    let mut roots: Vec<(Rational, usize)> = Vec::new();
    let mut zero_mult = 0;
    while p.degree() > 0 && p.coeffs[0].is_zero() {
        p = UniPoly::new(p.coeffs[1..].to_vec());
        zero_mult += 1;
    }
    if zero_mult > 0 {
        roots.push((Rational::zero(), zero_mult));
    }
    if p.degree() == 0 {
        return (roots, p);
    }
    let a0 = p.coeffs[0].numer().clone();
    let an = p.lead().numer().clone();
    let mut candidates = Vec::new();
    for num in rational::divisors(&a0) {
        for den in rational::divisors(&an) {
            let r = Rational::new(num.clone(), den);
            candidates.push(r.clone());
            candidates.push(-r);
        }
    }
    candidates.sort();
    candidates.dedup();
    for r in candidates {
        let mut mult = 0;
        while p.degree() > 0 && p.eval(&r).is_zero() {
            p = p.deflate(&r);
            mult += 1;
        }
        if mult > 0 {
            roots.push((r, mult));
        }
    }
    roots.sort();
    let (_, p) = p.primitive();
    (roots, p)
}

/// Factors a polynomial in `var` with rational coefficients into content,
/// linear factors for every rational root and whatever remains; a remaining
/// quadratic with positive discriminant is split with square roots.
pub fn factor_univariate(e: &Expr, var: &Symbol) -> Result<Expr, SimplifyError> {
    let coeffs = rational_coefficients(e, var)?;
    let p = UniPoly::new(coeffs);
    if p.degree() > MAX_FACTOR_DEGREE {
        return Err(SimplifyError::DegreeTooHigh { degree: p.degree(), cap: MAX_FACTOR_DEGREE });
    }
    if p.degree() == 0 {
        return Ok(p.to_expr(&Expr::symbol(var.clone())));
    }
    let x = Expr::symbol(var.clone());
    let (content, _) = p.primitive();
    let (roots, rest) = rational_roots(&p);
    let mut factors = vec![Expr::num(content)];
    for (r, mult) in &roots {
        // (q x - p) for r = p/q keeps integer coefficients
        let lin = Expr::num(Rational::from_integer(r.denom().clone())) * &x - Expr::num(Rational::from_integer(r.numer().clone()));
        factors.push(lin.powi(*mult as i64));
    }
    if rest.degree() == 2 {
        let c = &rest.coeffs;
        let disc = &c[1] * &c[1] - Rational::from_integer(BigInt::from(4)) * &c[2] * &c[0];
        if disc.is_positive() {
            let sq = Expr::num(disc).sqrt();
            let two_a = Expr::num(Rational::from_integer(BigInt::from(2)) * &c[2]);
            let b = Expr::num(c[1].clone());
            let r1 = (-&b + &sq) / &two_a;
            let r2 = (-&b - &sq) / &two_a;
            factors.push(Expr::num(c[2].clone()));
            factors.push(&x - r1);
            factors.push(&x - r2);
            return Ok(Expr::mul_all(factors));
        }
    }
    factors.push(rest.to_expr(&x));
    Ok(Expr::mul_all(factors))
}

//! Factoring of multivariate rational functions over the rationals.
//!
//! This is deliberately partial: it pulls out content, common monomials and
//! repeated factors, splits polynomials that are quadratic in some variable
//! when the discriminant is a perfect square, and finds rational roots of
//! univariate pieces. Anything else is returned whole.

use num_traits::{One, Signed, Zero};

use crate::expr::Expr;
use crate::poly::{gcd, Poly};
use crate::ratfunc::{AtomTable, ConvertOptions};
use crate::rational::{exact_sqrt, Rational};

use super::factor::{rational_roots, UniPoly};

/// Rewrites `e` as a product of powers of polynomial factors, with the
/// denominator factored the same way. Exponentials and other function calls
/// are treated as opaque atoms.
pub fn factor(e: &Expr) -> Expr {
    let mut t = AtomTable::new();
    let rf = t.normal_form(e, ConvertOptions::default());
    if rf.num.is_zero() {
        return Expr::zero();
    }
    let (cn, num) = factor_poly(&rf.num);
    let (cd, den) = factor_poly(&rf.den);
    let build = |fs: &[(Poly, u32)]| Expr::mul_all(fs.iter().map(|(p, k)| t.poly_to_expr(p).powi(*k as i64)));
    Expr::num(cn / cd) * build(&num) / build(&den)
}

/// Constant and grouped factors, each normalized to integer coefficients
/// with a positive leading coefficient.
pub fn factor_poly(p: &Poly) -> (Rational, Vec<(Poly, u32)>) {
    if p.is_zero() {
        return (Rational::zero(), Vec::new());
    }
    let mut parts = Vec::new();
    split(p, &mut parts);
    let mut grouped: Vec<(Poly, u32)> = Vec::new();
    for f in parts {
        match grouped.iter_mut().find(|(g, _)| *g == f) {
            Some((_, k)) => *k += 1,
            None => grouped.push((f, 1)),
        }
    }
    grouped.sort_by(|a, b| a.0.total_degree().cmp(&b.0.total_degree()).then_with(|| a.0.cmp(&b.0)));
    let prod = grouped.iter().fold(Poly::one(), |acc, (f, k)| acc.mul(&f.pow(*k)));
    let c = p.div_exact(&prod).and_then(|q| q.as_constant()).expect("factors multiply back to the input");
    (c, grouped)
}

fn split(p: &Poly, out: &mut Vec<Poly>) {
    let p = p.normalized();
    if p.is_constant() {
        return;
    }
    let m = p.monomial_gcd();
    if m.iter().any(|e| *e > 0) {
        for (i, e) in m.iter().enumerate() {
            out.extend(std::iter::repeat_n(Poly::var(i), *e as usize));
        }
        let rest = p.div_exact(&Poly::monomial(Rational::one(), m)).expect("monomial gcd divides");
        return split(&rest, out);
    }
    let vars = p.vars();
    for &i in &vars {
        let c = p.content_in(i);
        if !c.is_constant() {
            split(&c, out);
            return split(&p.div_exact(&c).expect("content divides"), out);
        }
    }
    for &i in &vars {
        let g = gcd(&p, &p.derivative(i));
        if !g.is_constant() && g != p {
            split(&g, out);
            return split(&p.div_exact(&g).expect("gcd divides"), out);
        }
    }
    for &i in &vars {
        if p.degree_in(i) == 2 {
            if let Some((f1, f2, k)) = split_quadratic(&p, i) {
                split(&k, out);
                split(&f1, out);
                return split(&f2, out);
            }
        }
    }
    if vars.len() == 1 && p.degree_in(vars[0]) > 1 {
        let v = vars[0];
        let coeffs: Vec<Rational> = p.coeffs_in(v).iter().map(|c| c.as_constant().unwrap_or_default()).collect();
        let (roots, _) = rational_roots(&UniPoly::new(coeffs));
        if let Some((r, _)) = roots.first() {
            let lin = Poly::var(v).scale(&Rational::from_integer(r.denom().clone())).sub(&Poly::constant(Rational::from_integer(r.numer().clone())));
            let rest = p.div_exact(&lin).expect("a root gives a linear factor");
            out.push(lin.normalized());
            return split(&rest, out);
        }
    }
    out.push(p);
}

/// Splits `a x^2 + b x + c` (in variable `i`) when `b^2 - 4ac` is the square
/// of a polynomial, using `4a p = (2ax + b - s)(2ax + b + s)`.
fn split_quadratic(p: &Poly, i: usize) -> Option<(Poly, Poly, Poly)> {
    let cs = p.coeffs_in(i);
    let (c, b, a) = (&cs[0], &cs[1], &cs[2]);
    let four = Poly::constant(Rational::from_integer(4.into()));
    let disc = b.mul(b).sub(&four.mul(a).mul(c));
    let s = poly_sqrt(&disc)?;
    let two_a = a.scale(&Rational::from_integer(2.into()));
    let x = Poly::var(i);
    let base = two_a.mul(&x).add(b);
    let prim = |f: Poly| {
        let k = f.content_in(i);
        f.div_exact(&k).expect("content divides").normalized()
    };
    let f1 = prim(base.sub(&s));
    let f2 = prim(base.add(&s));
    let k = p.div_exact(&f1.mul(&f2))?;
    Some((f1, f2, k))
}

/// Square root of a polynomial with rational coefficients, if it has one.
fn poly_sqrt(d: &Poly) -> Option<Poly> {
    if d.is_zero() {
        return Some(Poly::zero());
    }
    let (m, c) = d.lead()?;
    if m.iter().any(|e| e % 2 == 1) || c.is_negative() {
        return None;
    }
    let root_c = Rational::new(exact_sqrt(c.numer())?, exact_sqrt(c.denom())?);
    let half: Vec<u32> = m.iter().map(|e| e / 2).collect();
    let lead = Poly::monomial(root_c, half);
    let twice_lead = lead.scale(&Rational::from_integer(2.into()));
    let mut s = lead;
    // each step fixes one more term of the root, whose length is bounded
    // well below this for any square
    for _ in 0..=2 * d.len() + 2 {
        let r = d.sub(&s.mul(&s));
        let Some((rm, rc)) = r.lead() else {
            return Some(s);
        };
        let t = Poly::monomial(rc.clone(), rm.clone()).div_exact(&twice_lead)?;
        if t.lead().map(|(tm, _)| tm) >= s.lead().map(|(sm, _)| sm) {
            return None;
        }
        s = s.add(&t);
    }
    None
}

//! Rational-function normal form: an expression is viewed as a quotient of
//! polynomials over "atoms" (symbols and non-polynomial subterms such as
//! `log(x)`, `exp(s)` or `sqrt(1 - a^2)`).

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};

use crate::expr::{Expr, Func, Node};
use crate::poly::{gcd, Poly};
use crate::rational::Rational;

/// `num / den` with `den` nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc {
    pub num: Poly,
    pub den: Poly,
}

impl RatFunc {
    pub fn from_poly(p: Poly) -> RatFunc {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn constant(q: Rational) -> RatFunc {
        RatFunc::from_poly(Poly::constant(q))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        if self.den == o.den {
            return RatFunc { num: self.num.add(&o.num), den: self.den.clone() };
        }
        if self.den.is_constant() && o.den.is_constant() {
            let (a, b) = (self.den.lead_coeff(), o.den.lead_coeff());
            return RatFunc { num: self.num.scale(&b).add(&o.num.scale(&a)), den: Poly::constant(a * b) };
        }
        let g = gcd(&self.den, &o.den);
        let d1 = self.den.div_exact(&g).expect("gcd divides");
        let d2 = o.den.div_exact(&g).expect("gcd divides");
        RatFunc { num: self.num.mul(&d2).add(&o.num.mul(&d1)), den: d1.mul(&o.den) }
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &RatFunc) -> RatFunc {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        RatFunc { num: self.num.mul(&o.num), den: self.den.mul(&o.den) }
    }

    pub fn recip(&self) -> Option<RatFunc> {
        if self.num.is_zero() {
            None
        } else {
            Some(RatFunc { num: self.den.clone(), den: self.num.clone() })
        }
    }

    pub fn div(&self, o: &RatFunc) -> Option<RatFunc> {
        o.recip().map(|r| self.mul(&r))
    }

    pub fn powi(&self, k: i64) -> Option<RatFunc> {
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let k = k.unsigned_abs() as u32;
        Some(RatFunc { num: base.num.pow(k), den: base.den.pow(k) })
    }

    /// Cancels the gcd and scales so the denominator has coprime integer
    /// coefficients and a positive leading coefficient.
    pub fn normalize(&self) -> RatFunc {
        if self.num.is_zero() {
            return RatFunc::constant(Rational::zero());
        }
        let (num, den) = if self.den.is_constant() {
            (self.num.clone(), self.den.clone())
        } else {
            let g = gcd(&self.num, &self.den);
            if g.is_constant() {
                (self.num.clone(), self.den.clone())
            } else {
                (self.num.div_exact(&g).expect("gcd divides"), self.den.div_exact(&g).expect("gcd divides"))
            }
        };
        let mut c = den.content();
        if den.lead_coeff().is_negative() {
            c = -c;
        }
        let inv = c.recip();
        RatFunc { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn remap(&self, perm: &[usize]) -> RatFunc {
        RatFunc { num: self.num.remap(perm), den: self.den.remap(perm) }
    }
}

/// Conversion options.
#[derive(Clone, Copy, Debug, Default)]
pub struct ConvertOptions {
    /// Rewrite `exp(a + 2b)` as `exp(a) * exp(b)^2` so exponentials become
    /// polynomial atoms.
    pub split_exp: bool,
}

/// Atoms seen during conversion, indexed by polynomial variable.
#[derive(Clone, Debug, Default)]
pub struct AtomTable {
    atoms: Vec<Expr>,
    index: HashMap<Expr, usize>,
    radicands: HashMap<usize, RatFunc>,
}

impl AtomTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn atoms(&self) -> &[Expr] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn index_of(&self, e: &Expr) -> Option<usize> {
        self.index.get(e).copied()
    }

    /// Registers `e` as an atom, returning its variable index.
    pub fn intern(&mut self, e: &Expr) -> usize {
        if let Some(i) = self.index.get(e) {
            return *i;
        }
        let i = self.atoms.len();
        self.atoms.push(e.clone());
        self.index.insert(e.clone(), i);
        i
    }

    /// Converts an expression into a (not yet normalized) rational function.
    pub fn to_ratfunc(&mut self, e: &Expr, opts: ConvertOptions) -> RatFunc {
        match e.node() {
            Node::Num(q) => RatFunc::constant(q.clone()),
            Node::Sym(_) => RatFunc::from_poly(Poly::var(self.intern(e))),
            Node::Add(ch) => {
                let mut acc = RatFunc::constant(Rational::zero());
                for c in ch {
                    acc = acc.add(&self.to_ratfunc(c, opts));
                }
                acc
            }
            Node::Mul(ch) => {
                let mut acc = RatFunc::constant(Rational::one());
                for c in ch {
                    acc = acc.mul(&self.to_ratfunc(c, opts));
                }
                acc
            }
            Node::Pow(b, x) => {
                if let Some(k) = x.as_i64() {
                    let rb = self.to_ratfunc(b, opts);
                    if let Some(r) = rb.powi(k) {
                        return r;
                    }
                }
                RatFunc::from_poly(Poly::var(self.intern(e)))
            }
            Node::Func(Func::Exp, arg) if opts.split_exp => self.split_exp(arg),
            Node::Func(Func::Sqrt, arg) => {
                let i = self.intern(e);
                if !self.radicands.contains_key(&i) {
                    let r = self.to_ratfunc(arg, opts).normalize();
                    self.radicands.insert(i, r);
                }
                RatFunc::from_poly(Poly::var(i))
            }
            Node::Func(..) => RatFunc::from_poly(Poly::var(self.intern(e))),
        }
    }

    fn split_exp(&mut self, arg: &Expr) -> RatFunc {
        let terms: Vec<Expr> = match arg.node() {
            Node::Add(ch) => ch.clone(),
            _ => vec![arg.clone()],
        };
        let mut acc = RatFunc::constant(Rational::one());
        let mut residual = Vec::new();
        for t in terms {
            let (c, rest) = t.coeff_and_rest();
            if c.is_integer() && !rest.is_one() {
                let k = crate::rational::to_i64(&c).unwrap_or(1);
                let atom = RatFunc::from_poly(Poly::var(self.intern(&rest.exp())));
                acc = acc.mul(&atom.powi(k).expect("atom is nonzero"));
            } else {
                residual.push(t);
            }
        }
        if !residual.is_empty() {
            let atom = Expr::add_all(residual).exp();
            acc = acc.mul(&RatFunc::from_poly(Poly::var(self.intern(&atom))));
        }
        acc
    }

    /// Replaces squares of `sqrt` atoms by their radicands.
    pub fn reduce_radicals(&self, rf: &RatFunc) -> RatFunc {
        let mut rf = rf.clone();
        let mut idx: Vec<usize> = self.radicands.keys().copied().collect();
        idx.sort_unstable_by(|a, b| b.cmp(a));
        for i in idx {
            if rf.num.degree_in(i) < 2 && rf.den.degree_in(i) < 2 {
                continue;
            }
            let r = &self.radicands[&i];
            let n = reduce_in(&rf.num, i, r);
            let d = reduce_in(&rf.den, i, r);
            rf = match n.div(&d) {
                Some(q) => q,
                None => continue,
            };
        }
        rf
    }

    /// Full pipeline: convert, eliminate radical squares, sort atoms into
    /// canonical order and normalize.
    pub fn normal_form(&mut self, e: &Expr, opts: ConvertOptions) -> RatFunc {
        let rf = self.to_ratfunc(e, opts);
        let rf = self.reduce_radicals(&rf);
        self.canonical_order(&rf).normalize()
    }

    /// Sorts atoms by expression order so the normal form does not depend on
    /// traversal order; returns the input remapped to the new indices.
    pub fn canonical_order(&mut self, rf: &RatFunc) -> RatFunc {
        let mut order: Vec<usize> = (0..self.atoms.len()).collect();
        order.sort_by(|a, b| self.atoms[*a].cmp(&self.atoms[*b]));
        let mut perm = vec![0; self.atoms.len()];
        for (new, old) in order.iter().enumerate() {
            perm[*old] = new;
        }
        let atoms: Vec<Expr> = order.iter().map(|i| self.atoms[*i].clone()).collect();
        let radicands = self.radicands.iter().map(|(k, v)| (perm[*k], v.remap(&perm))).collect();
        self.index = atoms.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        self.atoms = atoms;
        self.radicands = radicands;
        rf.remap(&perm)
    }

    pub fn poly_to_expr(&self, p: &Poly) -> Expr {
        Expr::add_all(p.terms().map(|(m, c)| {
            let mut f = vec![Expr::num(c.clone())];
            for (i, e) in m.iter().enumerate() {
                if *e > 0 {
                    f.push(self.atoms[i].powi(*e as i64));
                }
            }
            Expr::mul_all(f)
        }))
    }

    /// Converts back, pulling the rational content and common monomials of
    /// numerator and denominator out as separate factors.
    pub fn to_expr(&self, rf: &RatFunc) -> Expr {
        if rf.num.is_zero() {
            return Expr::zero();
        }
        let (cn, mn, pn) = split_content(&rf.num);
        let (cd, md, pd) = split_content(&rf.den);
        let mono = |m: &[u32]| {
            Expr::mul_all(m.iter().enumerate().filter(|(_, e)| **e > 0).map(|(i, e)| self.atoms[i].powi(*e as i64)))
        };
        let scalar = Expr::num(cn / cd);
        scalar * mono(&mn) * self.poly_to_expr(&pn) / (mono(&md) * self.poly_to_expr(&pd))
    }
}

fn split_content(p: &Poly) -> (Rational, Vec<u32>, Poly) {
    let c = p.content();
    let m = p.monomial_gcd();
    let mut divisor = Poly::monomial(c.clone(), m.clone());
    if divisor.is_zero() {
        divisor = Poly::one();
    }
    let rest = p.div_exact(&divisor).expect("content and monomial gcd divide");
    (c, m, rest)
}

// p with s_i^2 replaced by r.
fn reduce_in(p: &Poly, i: usize, r: &RatFunc) -> RatFunc {
    let coeffs = p.coeffs_in(i);
    let s = RatFunc::from_poly(Poly::var(i));
    let mut acc = RatFunc::constant(Rational::zero());
    let mut r_pow = RatFunc::constant(Rational::one());
    for (k, c) in coeffs.iter().enumerate() {
        if k >= 2 && k % 2 == 0 {
            r_pow = r_pow.mul(r);
        }
        if c.is_zero() {
            continue;
        }
        let mut term = RatFunc::from_poly(c.clone()).mul(&r_pow);
        if k % 2 == 1 {
            term = term.mul(&s);
        }
        acc = acc.add(&term);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn nf(s: &str) -> Expr {
        let mut t = AtomTable::new();
        let opts = ConvertOptions { split_exp: true };
        let rf = t.normal_form(&parse(s).unwrap(), opts);
        t.to_expr(&rf)
    }

    #[test]
    fn cancels_common_factors() {
        assert_eq!(nf("(x^2 - 1)/(x - 1)"), parse("x + 1").unwrap());
        assert_eq!(nf("x/x"), Expr::one());
        assert_eq!(nf("(a^2 - b^2)*(a/(a^2 - b^2))"), parse("a").unwrap());
    }

    #[test]
    fn exponentials_become_polynomial() {
        assert_eq!(nf("exp(s)/(exp(s) + 1) + 1/(exp(s) + 1)"), Expr::one());
        assert_eq!(nf("exp(a + b)/exp(a)"), parse("exp(b)").unwrap());
    }

    #[test]
    fn radical_squares_reduce() {
        assert_eq!(nf("(sqrt(x) + 1)*(sqrt(x) - 1)"), parse("x - 1").unwrap());
    }

    #[test]
    fn common_denominator() {
        let e = nf("1/x + 1/y");
        assert_eq!(e, parse("(x + y)/(x*y)").unwrap());
    }
}

//! Sparse multivariate polynomials over the rationals.
//!
//! Variables are indices into an external atom table. Monomials are exponent
//! vectors with trailing zeros trimmed, so the derived `Vec` ordering is a
//! lexicographic order with variable 0 most significant.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

pub type Monomial = Vec<u32>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

fn trim(mut m: Monomial) -> Monomial {
    while m.last() == Some(&0) {
        m.pop();
    }
    m
}

fn mono_mul(a: &[u32], b: &[u32]) -> Monomial {
    let n = a.len().max(b.len());
    let m = (0..n).map(|i| a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)).collect();
    trim(m)
}

fn mono_div(a: &[u32], b: &[u32]) -> Option<Monomial> {
    if b.len() > a.len() {
        return None;
    }
    let mut m = a.to_vec();
    for (i, e) in b.iter().enumerate() {
        if m[i] < *e {
            return None;
        }
        m[i] -= e;
    }
    Some(trim(m))
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn one() -> Poly {
        Poly::constant(Rational::one())
    }

    pub fn constant(q: Rational) -> Poly {
        let mut p = Poly::zero();
        if !q.is_zero() {
            p.terms.insert(Vec::new(), q);
        }
        p
    }

    pub fn var(i: usize) -> Poly {
        Poly::monomial(Rational::one(), {
            let mut m = vec![0; i + 1];
            m[i] = 1;
            m
        })
    }

    pub fn monomial(c: Rational, m: Monomial) -> Poly {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(trim(m), c);
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_empty())
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_zero() {
            Some(Rational::zero())
        } else if self.is_constant() {
            self.terms.get(&Vec::new()).cloned()
        } else {
            None
        }
    }

    /// Leading term in lex order.
    pub fn lead(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn lead_coeff(&self) -> Rational {
        self.lead().map(|(_, c)| c.clone()).unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn scale(&self, q: &Rational) -> Poly {
        if q.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                *acc.entry(mono_mul(ma, mb)).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Poly { terms: acc }
    }

    pub fn mul_monomial(&self, c: &Rational, m: &[u32]) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(k, v)| (mono_mul(k, m), v * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Number of variable slots referenced.
    pub fn width(&self) -> usize {
        self.terms.keys().map(|m| m.len()).max().unwrap_or(0)
    }

    pub fn uses_var(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.get(i).copied().unwrap_or(0) > 0)
    }

    pub fn vars(&self) -> Vec<usize> {
        (0..self.width()).filter(|&i| self.uses_var(i)).collect()
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m.get(i).copied().unwrap_or(0)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().sum()).max().unwrap_or(0)
    }

    /// Coefficients with respect to variable `i`: `self = Σ c_k · x_i^k`.
    pub fn coeffs_in(&self, i: usize) -> Vec<Poly> {
        let d = self.degree_in(i) as usize;
        let mut out = vec![Poly::zero(); d + 1];
        for (m, c) in &self.terms {
            let k = m.get(i).copied().unwrap_or(0) as usize;
            let mut rest = m.clone();
            if i < rest.len() {
                rest[i] = 0;
            }
            out[k].add_term(trim(rest), c.clone());
        }
        out
    }

    pub fn from_coeffs_in(i: usize, coeffs: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (k, c) in coeffs.iter().enumerate() {
            let mut m = vec![0; i + 1];
            m[i] = k as u32;
            out = out.add(&c.mul_monomial(&Rational::one(), &m));
        }
        out
    }

    /// Leading coefficient with respect to variable `i`.
    pub fn lead_in(&self, i: usize) -> Poly {
        self.coeffs_in(i).pop().unwrap_or_default()
    }

    /// Replaces variable `i` by the polynomial `value`.
    pub fn subst(&self, i: usize, value: &Poly) -> Poly {
        let coeffs = self.coeffs_in(i);
        let mut acc = Poly::zero();
        for c in coeffs.iter().rev() {
            acc = acc.mul(value).add(c);
        }
        acc
    }

    pub fn eval_var(&self, i: usize, q: &Rational) -> Poly {
        self.subst(i, &Poly::constant(q.clone()))
    }

    /// Rational evaluation at a full assignment.
    pub fn eval(&self, values: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, e) in m.iter().enumerate() {
                if *e > 0 {
                    t *= num_traits::pow(values[i].clone(), *e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.get(i).copied().unwrap_or(0);
            if e == 0 {
                continue;
            }
            let mut mm = m.clone();
            mm[i] -= 1;
            out.add_term(trim(mm), c * Rational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Renames variables: variable `i` becomes `perm[i]`.
    pub fn remap(&self, perm: &[usize]) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let width = m.iter().enumerate().filter(|(_, e)| **e > 0).map(|(i, _)| perm[i] + 1).max().unwrap_or(0);
            let mut mm = vec![0; width];
            for (i, e) in m.iter().enumerate() {
                if *e > 0 {
                    mm[perm[i]] += e;
                }
            }
            out.add_term(trim(mm), c.clone());
        }
        out
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let (dm, dc) = d.lead().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut r = self.clone();
        let mut q = Poly::zero();
        while let Some((rm, rc)) = r.lead().map(|(m, c)| (m.clone(), c.clone())) {
            let m = mono_div(&rm, &dm)?;
            let c = rc / &dc;
            r = r.sub(&d.mul_monomial(&c, &m));
            q.add_term(m, c);
        }
        Some(q)
    }

    /// Positive rational `c` with `self / c` having coprime integer
    /// coefficients; zero for the zero polynomial.
    pub fn content(&self) -> Rational {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return Rational::zero();
        }
        Rational::new(num, den)
    }

    /// Integer-coefficient primitive form with a positive leading coefficient.
    pub fn normalized(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = self.content();
        if self.lead_coeff().is_negative() {
            c = -c;
        }
        self.scale(&c.recip())
    }

    /// Greatest common monomial dividing every term.
    pub fn monomial_gcd(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Vec::new();
        };
        let mut g = first.clone();
        for m in it {
            g.truncate(m.len());
            for (i, e) in g.iter_mut().enumerate() {
                *e = (*e).min(m[i]);
            }
        }
        trim(g)
    }

    /// Pseudo-remainder of `self` by `b` with respect to variable `i`.
    pub fn prem(&self, b: &Poly, i: usize) -> Poly {
        let db = b.degree_in(i);
        let lb = b.lead_in(i);
        let mut r = self.clone();
        while !r.is_zero() && r.uses_var(i) && r.degree_in(i) >= db {
            let dr = r.degree_in(i);
            let lr = r.lead_in(i);
            let mut shift = vec![0; i + 1];
            shift[i] = dr - db;
            let t = lr.mul_monomial(&Rational::one(), &shift);
            r = r.mul(&lb).sub(&t.mul(b));
        }
        r
    }

    /// Pseudo-remainder `lc(b)^(deg a - deg b + 1) a mod b` in variable `i`,
    /// with the full power of the leading coefficient.
    pub fn full_prem(&self, b: &Poly, i: usize) -> Poly {
        let db = b.degree_in(i);
        let lb = b.lead_in(i);
        let mut steps = (self.degree_in(i) + 1).saturating_sub(db);
        let mut r = self.clone();
        while !r.is_zero() && r.degree_in(i) >= db {
            let dr = r.degree_in(i);
            let lr = r.lead_in(i);
            let mut shift = vec![0; i + 1];
            shift[i] = dr - db;
            let t = lr.mul_monomial(&Rational::one(), &shift);
            r = r.mul(&lb).sub(&t.mul(b));
            steps -= 1;
        }
        r.mul(&lb.pow(steps))
    }

    /// Content with respect to variable `i`: gcd of the coefficients in `i`.
    pub fn content_in(&self, i: usize) -> Poly {
        let mut g = Poly::zero();
        for c in self.coeffs_in(i) {
            if c.is_zero() {
                continue;
            }
            g = gcd(&g, &c);
            if g.is_constant() {
                return Poly::one();
            }
        }
        g
    }
}

/// Greatest common divisor, normalized to integer coefficients with positive
/// leading coefficient (1 when the inputs are coprime).
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.normalized();
    }
    if b.is_zero() {
        return a.normalized();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    let width = a.width().max(b.width());
    let v = (0..width).find(|&i| a.uses_var(i) || b.uses_var(i)).expect("non-constant polynomial has a variable");
    let g = match (a.uses_var(v), b.uses_var(v)) {
        (true, false) => gcd(&a.content_in(v), b),
        (false, true) => gcd(a, &b.content_in(v)),
        _ => {
            let ca = a.content_in(v);
            let cb = b.content_in(v);
            let pa = a.div_exact(&ca).expect("content divides");
            let pb = b.div_exact(&cb).expect("content divides");
            let cg = gcd(&ca, &cb);
            let (p, q) = if pa.degree_in(v) >= pb.degree_in(v) { (pa, pb) } else { (pb, pa) };
            cg.mul(&subresultant_gcd(p, q, v))
        }
    };
    g.normalized()
}

/// Gcd of two polynomials primitive in `v`, with `deg_v a >= deg_v b >= 1`,
/// by the subresultant remainder sequence. Dividing each remainder by the
/// known subresultant factor keeps coefficients small without computing
/// multivariate contents at every step.
fn subresultant_gcd(mut a: Poly, mut b: Poly, v: usize) -> Poly {
    let mut g = Poly::one();
    let mut h = Poly::one();
    loop {
        let delta = a.degree_in(v) - b.degree_in(v);
        let r = a.full_prem(&b, v);
        if r.is_zero() {
            return primitive_in(&b, v);
        }
        if !r.uses_var(v) {
            return Poly::one();
        }
        let scale = g.mul(&h.pow(delta));
        a = b;
        b = r.div_exact(&scale).expect("subresultant factor divides the remainder");
        g = a.lead_in(v);
        h = if delta == 0 {
            h
        } else {
            g.pow(delta).div_exact(&h.pow(delta - 1)).expect("subresultant factor divides")
        };
    }
}

fn primitive_in(p: &Poly, v: usize) -> Poly {
    let c = p.content_in(v);
    p.div_exact(&c).expect("content divides").normalized()
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| {
                let vars: Vec<String> = m
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| **e > 0)
                    .map(|(i, e)| if *e == 1 { format!("x{i}") } else { format!("x{i}^{e}") })
                    .collect();
                if vars.is_empty() {
                    c.to_string()
                } else {
                    format!("{}*{}", c, vars.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

//! Plain-text rendering (the `Display` impl) and display ordering shared with
//! the LaTeX printer.

use std::fmt;

use num_traits::{One, Signed, ToPrimitive};

use super::{Expr, Func, Node};
use crate::rational::Rational;

const ADD: u8 = 1;
const MUL: u8 = 2;
const NEG: u8 = 3;
const POW: u8 = 4;
const ATOM: u8 = 5;

/// Terms of a sum in display order: higher total degree first, constants last.
pub(crate) fn display_terms(terms: &[Expr]) -> Vec<Expr> {
    let mut v: Vec<(f64, Expr)> = terms.iter().map(|t| (degree(t), t.clone())).collect();
    v.sort_by(|(da, a), (db, b)| {
        db.partial_cmp(da)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| lex_key(a).cmp(&lex_key(b)))
            .then_with(|| a.coeff_and_rest().1.cmp(&b.coeff_and_rest().1))
    });
    let mut out: Vec<Expr> = v.into_iter().map(|(_, e)| e).collect();
    // `1 - a^2` rather than `-a^2 + 1`
    if out.len() == 2 && is_negative(&out[0]) && out[1].as_num().is_some_and(|q| q.is_positive()) {
        out.swap(0, 1);
    }
    out
}

/// Lexicographic monomial key: factors by base name, and for equal bases the
/// higher power first, so `a*v_2` precedes `b*v_1` and `x^2` precedes `x*y`.
fn lex_key(e: &Expr) -> Vec<(String, std::cmp::Reverse<Rational>)> {
    let (_, rest) = e.coeff_and_rest();
    let factors: Vec<Expr> = match rest.node() {
        Node::Mul(ch) => ch.clone(),
        _ if rest.is_one() => Vec::new(),
        _ => vec![rest],
    };
    let mut key: Vec<_> = factors
        .iter()
        .map(|f| {
            let (b, x) = f.base_and_exp();
            (plain(&b).0, std::cmp::Reverse(x.as_num().cloned().unwrap_or_else(Rational::one)))
        })
        .collect();
    key.sort();
    key
}

fn degree(e: &Expr) -> f64 {
    match e.node() {
        Node::Num(_) => 0.0,
        Node::Sym(_) => 1.0,
        Node::Add(ch) => ch.iter().map(degree).fold(0.0, f64::max),
        Node::Mul(ch) => ch.iter().map(degree).sum(),
        Node::Pow(b, x) => match x.as_num() {
            Some(q) => degree(b) * q.to_f64().unwrap_or(0.0),
            None => degree(b),
        },
        Node::Func(..) => 1.0,
    }
}

/// A product split for display: `coeff * num / den`, where every `den`
/// factor is given with its exponent negated (so it is positive).
pub(crate) struct Fraction {
    pub coeff: Rational,
    pub num: Vec<Expr>,
    pub den: Vec<Expr>,
}

pub(crate) fn split_fraction(e: &Expr) -> Fraction {
    let (coeff, rest) = e.coeff_and_rest();
    let factors: Vec<Expr> = match rest.node() {
        Node::Mul(ch) => ch.clone(),
        _ if rest.is_one() => Vec::new(),
        _ => vec![rest.clone()],
    };
    let mut factors = factors;
    factors.sort_by(|a, b| {
        let (ba, ea) = a.base_and_exp();
        let (bb, eb) = b.base_and_exp();
        ba.cmp(&bb).then_with(|| ea.cmp(&eb))
    });
    let mut num = Vec::new();
    let mut den = Vec::new();
    for f in factors {
        match f.node() {
            Node::Pow(b, x) if x.as_num().is_some_and(|q| q.is_negative()) => {
                den.push(b.pow(&-x));
            }
            _ => num.push(f),
        }
    }
    Fraction { coeff, num, den }
}

/// True when the term prints with a leading minus sign.
pub(crate) fn is_negative(e: &Expr) -> bool {
    e.coeff_and_rest().0.is_negative()
}

fn wrap(s: (String, u8), min: u8) -> String {
    if s.1 < min {
        format!("({})", s.0)
    } else {
        s.0
    }
}

fn num_plain(q: &Rational) -> (String, u8) {
    if q.is_integer() {
        let s = q.numer().to_string();
        let p = if q.is_negative() { NEG } else { ATOM };
        (s, p)
    } else if q.is_negative() {
        (format!("-{}/{}", q.numer().abs(), q.denom()), NEG)
    } else {
        (format!("{}/{}", q.numer(), q.denom()), MUL)
    }
}

fn plain(e: &Expr) -> (String, u8) {
    match e.node() {
        Node::Num(q) => num_plain(q),
        Node::Sym(s) => (s.name().to_string(), ATOM),
        Node::Add(ch) => {
            let terms = display_terms(ch);
            let mut out = String::new();
            for (i, t) in terms.iter().enumerate() {
                if i == 0 {
                    out.push_str(&plain(t).0);
                } else if is_negative(t) {
                    out.push_str(" - ");
                    out.push_str(&wrap(plain(&-t), MUL));
                } else {
                    out.push_str(" + ");
                    out.push_str(&wrap(plain(t), MUL));
                }
            }
            (out, ADD)
        }
        Node::Func(f, a) => (format!("{}({})", f.name(), plain(a).0), ATOM),
        Node::Pow(b, x) if !x.as_num().is_some_and(|q| q.is_negative()) => {
            (format!("{}^{}", wrap(plain(b), ATOM), wrap(plain(x), POW)), POW)
        }
        Node::Mul(_) | Node::Pow(..) => plain_product(e),
    }
}

fn plain_product(e: &Expr) -> (String, u8) {
    let Fraction { coeff, num, den } = split_fraction(e);
    let negative = coeff.is_negative();
    let c = coeff.abs();
    let mut num_parts: Vec<String> = Vec::new();
    if !c.numer().is_one() || num.is_empty() {
        num_parts.push(c.numer().to_string());
    }
    num_parts.extend(num.iter().map(|f| wrap(plain(f), NEG + 1)));
    let mut den_parts: Vec<String> = Vec::new();
    if !c.denom().is_one() {
        den_parts.push(c.denom().to_string());
    }
    let lone = den_parts.is_empty() && den.len() == 1;
    den_parts.extend(den.iter().map(|f| wrap(plain(f), if lone { POW } else { NEG + 1 })));
    let mut s = num_parts.join("*");
    if !den_parts.is_empty() {
        s.push('/');
        if den_parts.len() == 1 {
            s.push_str(&den_parts[0]);
        } else {
            s.push_str(&format!("({})", den_parts.join("*")));
        }
    }
    if negative {
        (format!("-{s}"), NEG)
    } else {
        (s, MUL)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&plain(self).0)
    }
}

impl fmt::Display for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::parse;

    fn rt(s: &str) -> String {
        parse(s).unwrap().to_string()
    }

    #[test]
    fn basic_forms() {
        assert_eq!(rt("a*v_1 + b*v_2"), "a*v_1 + b*v_2");
        assert_eq!(rt("1/2"), "1/2");
        assert_eq!(rt("-x"), "-x");
        assert_eq!(rt("a/(a^2 - b^2)"), "a/(a^2 - b^2)");
        assert_eq!(rt("x^(-2)"), "1/x^2");
        assert_eq!(rt("x^6/6 - 3*x^5/5 + x^4/4 + x^3 - x^2"), "x^6/6 - 3*x^5/5 + x^4/4 + x^3 - x^2");
        assert_eq!(rt("2*(x + 1)"), "2*(x + 1)");
        assert_eq!(rt("(-2)^x"), "(-2)^x");
        assert_eq!(rt("x^(1/3)"), "x^(1/3)");
        assert_eq!(rt("1 - x^2"), "1 - x^2");
        assert_eq!(rt("1 - x^2 + y"), "-x^2 + y + 1");
        assert_eq!(rt("exp(b_1 + 2*b_2)"), "exp(b_1 + 2*b_2)");
    }

    #[test]
    fn reparse_is_identity() {
        for s in [
            "x/(y*z)",
            "-3*x/(5*y)",
            "(x^2)^y",
            "sqrt(1 - a^2)/a^3",
            "log(p/(1 - p))",
            "1/sqrt(x)",
            "x^y^z",
            "-(x + 1)^(-3)",
            "2^(1/3)",
            "(1/2)^x",
        ] {
            let e = parse(s).unwrap();
            let back = parse(&e.to_string()).unwrap();
            assert_eq!(back, e, "{s} -> {e}");
        }
    }
}

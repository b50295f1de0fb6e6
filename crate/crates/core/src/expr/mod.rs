//! Immutable canonical expression trees.
//!
//! Every constructor canonicalizes: nested sums and products are flattened,
//! numeric parts are folded, like terms (`2x + 3x`) and like factors
//! (`x^2 * x^3`) are merged, and children are kept in a deterministic order.
//! Two expressions built from equal inputs are therefore structurally equal.

mod latex;
mod parse;
mod render;
mod symbol;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::{self, Rational};

pub use latex::{latex, LatexOptions};
pub use parse::{parse, ParseError, ParseErrorKind};
pub use symbol::{Symbol, SymbolTable};

/// Functions from the fixed table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Log,
    Exp,
    Sqrt,
    Sin,
    Cos,
    Asin,
}

impl Func {
    pub const ALL: [Func; 6] = [Func::Log, Func::Exp, Func::Sqrt, Func::Sin, Func::Cos, Func::Asin];

    pub fn name(self) -> &'static str {
        match self {
            Func::Log => "log",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Asin => "asin",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.iter().copied().find(|f| f.name() == name)
    }
}

#[derive(Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Num(Rational),
    Sym(Symbol),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Expr, Expr),
    Func(Func, Expr),
}

impl Node {
    fn rank(&self) -> u8 {
        match self {
            Node::Num(_) => 0,
            Node::Sym(_) => 1,
            Node::Pow(..) => 2,
            Node::Func(..) => 3,
            Node::Mul(_) => 4,
            Node::Add(_) => 5,
        }
    }
}

#[derive(Clone)]
pub struct Expr(Arc<Node>);

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        let (a, b) = (self.node(), other.node());
        match a.rank().cmp(&b.rank()) {
            Ordering::Equal => {}
            o => return o,
        }
        match (a, b) {
            (Node::Num(x), Node::Num(y)) => x.cmp(y),
            (Node::Sym(x), Node::Sym(y)) => x.cmp(y),
            (Node::Pow(b1, e1), Node::Pow(b2, e2)) => b1.cmp(b2).then_with(|| e1.cmp(e2)),
            (Node::Func(f1, a1), Node::Func(f2, a2)) => f1.cmp(f2).then_with(|| a1.cmp(a2)),
            (Node::Mul(x), Node::Mul(y)) | (Node::Add(x), Node::Add(y)) => {
                // compare from the most significant (last) child down
                for (p, q) in x.iter().rev().zip(y.iter().rev()) {
                    match p.cmp(q) {
                        Ordering::Equal => {}
                        o => return o,
                    }
                }
                x.len().cmp(&y.len())
            }
            _ => unreachable!("equal ranks imply equal node kinds"),
        }
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Expr {
    fn from_node(n: Node) -> Expr {
        Expr(Arc::new(n))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn num(q: Rational) -> Expr {
        Expr::from_node(Node::Num(q))
    }

    pub fn int(n: i64) -> Expr {
        Expr::num(rational::int(n))
    }

    pub fn frac(n: i64, d: i64) -> Expr {
        Expr::num(rational::frac(n, d))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn sym(name: &str) -> Expr {
        Expr::symbol(Symbol::new(name))
    }

    pub fn symbol(s: Symbol) -> Expr {
        Expr::from_node(Node::Sym(s))
    }

    /// Parses `text`; see [`parse`].
    pub fn parse(text: &str) -> Result<Expr, ParseError> {
        parse(text)
    }

    pub fn as_num(&self) -> Option<&Rational> {
        match self.node() {
            Node::Num(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        self.as_num().and_then(rational::to_i64)
    }

    pub fn as_symbol(&self) -> Option<&Symbol> {
        match self.node() {
            Node::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_num().is_some_and(|q| q.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.as_num().is_some_and(|q| q.is_one())
    }

    pub fn is_number(&self) -> bool {
        self.as_num().is_some()
    }

    /// Children in order (empty for leaves).
    pub fn children(&self) -> Vec<&Expr> {
        match self.node() {
            Node::Num(_) | Node::Sym(_) => Vec::new(),
            Node::Add(c) | Node::Mul(c) => c.iter().collect(),
            Node::Pow(b, e) => vec![b, e],
            Node::Func(_, a) => vec![a],
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        match self.node() {
            Node::Num(_) => false,
            Node::Sym(t) => t == s,
            _ => self.children().iter().any(|c| c.contains(s)),
        }
    }

    pub fn contains_any(&self, syms: &[Symbol]) -> bool {
        syms.iter().any(|s| self.contains(s))
    }

    /// Free symbols in natural name order; use
    /// [`SymbolTable::free_symbols`] for declaration order.
    pub fn free_symbols(&self) -> Vec<Symbol> {
        let mut acc = BTreeSet::new();
        self.collect_symbols(&mut acc);
        acc.into_iter().collect()
    }

    fn collect_symbols(&self, acc: &mut BTreeSet<Symbol>) {
        match self.node() {
            Node::Sym(s) => {
                acc.insert(s.clone());
            }
            _ => {
                for c in self.children() {
                    c.collect_symbols(acc);
                }
            }
        }
    }

    /// Splits `c * rest` with `c` the numeric coefficient.
    pub fn coeff_and_rest(&self) -> (Rational, Expr) {
        match self.node() {
            Node::Num(q) => (q.clone(), Expr::one()),
            Node::Mul(ch) => match ch[0].as_num() {
                Some(q) => {
                    let rest = if ch.len() == 2 {
                        ch[1].clone()
                    } else {
                        Expr::from_node(Node::Mul(ch[1..].to_vec()))
                    };
                    (q.clone(), rest)
                }
                None => (Rational::one(), self.clone()),
            },
            _ => (Rational::one(), self.clone()),
        }
    }

    /// Splits `base ^ exponent` (exponent 1 for non-powers).
    pub fn base_and_exp(&self) -> (Expr, Expr) {
        match self.node() {
            Node::Pow(b, e) => (b.clone(), e.clone()),
            _ => (self.clone(), Expr::one()),
        }
    }

    /// True when the numeric coefficient is negative; used for `a - b` display.
    pub fn is_negative_term(&self) -> bool {
        self.coeff_and_rest().0.is_negative()
    }

    pub fn add_all<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        build_add(terms.into_iter().collect())
    }

    pub fn mul_all<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        build_mul(factors.into_iter().collect())
    }

    pub fn pow(&self, exponent: &Expr) -> Expr {
        build_pow(self.clone(), exponent.clone())
    }

    pub fn powi(&self, k: i64) -> Expr {
        self.pow(&Expr::int(k))
    }

    pub fn recip(&self) -> Expr {
        self.powi(-1)
    }

    pub fn apply(f: Func, arg: Expr) -> Expr {
        build_func(f, arg)
    }

    pub fn exp(&self) -> Expr {
        build_func(Func::Exp, self.clone())
    }

    pub fn log(&self) -> Expr {
        build_func(Func::Log, self.clone())
    }

    pub fn sqrt(&self) -> Expr {
        build_func(Func::Sqrt, self.clone())
    }

    pub fn sin(&self) -> Expr {
        build_func(Func::Sin, self.clone())
    }

    pub fn cos(&self) -> Expr {
        build_func(Func::Cos, self.clone())
    }

    pub fn asin(&self) -> Expr {
        build_func(Func::Asin, self.clone())
    }

    /// Rebuilds the node from new children through the canonical
    /// constructors.
    pub fn rebuild(&self, children: Vec<Expr>) -> Expr {
        match self.node() {
            Node::Num(_) | Node::Sym(_) => self.clone(),
            Node::Add(_) => build_add(children),
            Node::Mul(_) => build_mul(children),
            Node::Pow(..) => {
                let mut it = children.into_iter();
                let b = it.next().expect("pow base");
                let e = it.next().expect("pow exponent");
                build_pow(b, e)
            }
            Node::Func(f, _) => build_func(*f, children.into_iter().next().expect("function argument")),
        }
    }

    /// Bottom-up rewrite: children are mapped first, then `f` sees the
    /// rebuilt node.
    pub fn map_bottom_up(&self, f: &mut dyn FnMut(Expr) -> Expr) -> Expr {
        let rebuilt = match self.node() {
            Node::Num(_) | Node::Sym(_) => self.clone(),
            _ => {
                let ch: Vec<Expr> = self.children().into_iter().map(|c| c.map_bottom_up(f)).collect();
                self.rebuild(ch)
            }
        };
        f(rebuilt)
    }

    /// Simultaneous substitution of symbols.
    pub fn subs(&self, bindings: &BTreeMap<Symbol, Expr>) -> Expr {
        if bindings.is_empty() {
            return self.clone();
        }
        match self.node() {
            Node::Num(_) => self.clone(),
            Node::Sym(s) => bindings.get(s).cloned().unwrap_or_else(|| self.clone()),
            _ => {
                let ch: Vec<Expr> = self.children().into_iter().map(|c| c.subs(bindings)).collect();
                self.rebuild(ch)
            }
        }
    }

    /// Substitutes a single symbol.
    pub fn subs1(&self, s: &Symbol, value: &Expr) -> Expr {
        let mut m = BTreeMap::new();
        m.insert(s.clone(), value.clone());
        self.subs(&m)
    }

    /// Substitutes an arbitrary subexpression (matched structurally).
    pub fn replace(&self, target: &Expr, value: &Expr) -> Expr {
        if self == target {
            return value.clone();
        }
        match self.node() {
            Node::Num(_) | Node::Sym(_) => self.clone(),
            _ => {
                let ch: Vec<Expr> = self.children().into_iter().map(|c| c.replace(target, value)).collect();
                self.rebuild(ch)
            }
        }
    }

    /// Plain, re-parseable rendering (same as `Display`).
    pub fn to_plain(&self) -> String {
        self.to_string()
    }

    pub fn to_latex(&self) -> String {
        latex(self)
    }
}

/// Substitution with bindings given as an ordered list of `(key, value)`
/// pairs, where every key must be a symbol.
pub fn substitute(e: &Expr, bindings: &[(Expr, Expr)]) -> Result<Expr, SubstituteError> {
    let mut map = BTreeMap::new();
    for (k, v) in bindings {
        match k.as_symbol() {
            Some(s) => {
                map.insert(s.clone(), v.clone());
            }
            None => return Err(SubstituteError::NonSymbolKey(k.to_string())),
        }
    }
    Ok(e.subs(&map))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubstituteError {
    #[error("substitution key `{0}` is not a symbol")]
    NonSymbolKey(String),
}

fn build_add(terms: Vec<Expr>) -> Expr {
    let mut constant = Rational::zero();
    let mut collected: BTreeMap<Expr, Rational> = BTreeMap::new();
    let mut stack = terms;
    while let Some(t) = stack.pop() {
        match t.node() {
            Node::Num(q) => constant += q,
            Node::Add(ch) => stack.extend(ch.iter().cloned()),
            _ => {
                let (c, rest) = t.coeff_and_rest();
                *collected.entry(rest).or_insert_with(Rational::zero) += c;
            }
        }
    }
    let mut out = Vec::with_capacity(collected.len() + 1);
    if !constant.is_zero() {
        out.push(Expr::num(constant));
    }
    for (rest, c) in collected {
        if c.is_zero() {
            continue;
        }
        out.push(scale_term(c, rest));
    }
    match out.len() {
        0 => Expr::zero(),
        1 => out.pop().expect("one term"),
        _ => Expr::from_node(Node::Add(out)),
    }
}

// `rest` never carries its own numeric coefficient.
fn scale_term(c: Rational, rest: Expr) -> Expr {
    if c.is_one() {
        return rest;
    }
    match rest.node() {
        Node::Mul(ch) => {
            let mut v = Vec::with_capacity(ch.len() + 1);
            v.push(Expr::num(c));
            v.extend(ch.iter().cloned());
            Expr::from_node(Node::Mul(v))
        }
        _ => Expr::from_node(Node::Mul(vec![Expr::num(c), rest])),
    }
}

fn build_mul(factors: Vec<Expr>) -> Expr {
    let mut coeff = Rational::one();
    let mut groups: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
    let mut stack = factors;
    while let Some(f) = stack.pop() {
        match f.node() {
            Node::Num(q) => {
                if q.is_zero() {
                    return Expr::zero();
                }
                coeff *= q;
            }
            Node::Mul(ch) => stack.extend(ch.iter().cloned()),
            _ => {
                let (b, e) = f.base_and_exp();
                groups.entry(b).or_default().push(e);
            }
        }
    }
    let mut out = Vec::with_capacity(groups.len() + 1);
    let mut regroup = false;
    for (base, exps) in groups {
        let p = if exps.len() == 1 {
            if exps[0].is_one() {
                base.clone()
            } else {
                build_pow(base.clone(), exps.into_iter().next().expect("exponent"))
            }
        } else {
            build_pow(base.clone(), build_add(exps))
        };
        match p.node() {
            Node::Num(q) => {
                if q.is_zero() {
                    return Expr::zero();
                }
                coeff *= q;
            }
            Node::Mul(_) => {
                regroup = true;
                out.push(p);
            }
            _ => {
                // e.g. sqrt(x)^2 -> x may now share a base with another group
                if p.base_and_exp().0 != base {
                    regroup = true;
                }
                out.push(p);
            }
        }
    }
    if regroup {
        out.push(Expr::num(coeff));
        return build_mul(out);
    }
    out.sort();
    if out.is_empty() {
        return Expr::num(coeff);
    }
    if coeff.is_one() {
        if out.len() == 1 {
            return out.pop().expect("one factor");
        }
    } else {
        out.insert(0, Expr::num(coeff));
    }
    Expr::from_node(Node::Mul(out))
}

fn build_pow(base: Expr, exponent: Expr) -> Expr {
    let q = match exponent.as_num() {
        Some(q) => q.clone(),
        None => {
            if base.is_one() {
                return Expr::one();
            }
            return Expr::from_node(Node::Pow(base, exponent));
        }
    };
    if q.is_zero() {
        return Expr::one();
    }
    if q.is_one() {
        return base;
    }
    if base.is_one() {
        return Expr::one();
    }
    if q.is_integer() {
        let k = match q.numer().to_i64() {
            Some(k) => k,
            None => return Expr::from_node(Node::Pow(base, exponent)),
        };
        match base.node() {
            Node::Num(b) => match rational::pow(b, k) {
                Some(v) => Expr::num(v),
                None => Expr::from_node(Node::Pow(base, exponent)),
            },
            Node::Pow(b, e) => build_pow(b.clone(), build_mul(vec![e.clone(), exponent])),
            Node::Mul(ch) => build_mul(ch.iter().map(|c| build_pow(c.clone(), exponent.clone())).collect()),
            Node::Func(Func::Sqrt, x) => {
                // sqrt(x)^k = x^(k/2) * sqrt(x)^(±1), truncating toward zero
                let half = k / 2;
                let rem = k - 2 * half;
                if half == 0 {
                    return Expr::from_node(Node::Pow(base, exponent));
                }
                let whole = build_pow(x.clone(), Expr::int(half));
                if rem == 0 {
                    whole
                } else {
                    let part = if rem == 1 {
                        base.clone()
                    } else {
                        Expr::from_node(Node::Pow(base.clone(), Expr::int(-1)))
                    };
                    build_mul(vec![whole, part])
                }
            }
            _ => Expr::from_node(Node::Pow(base, exponent)),
        }
    } else if q.denom() == &BigInt::from(2) {
        // b^(p/2) = b^trunc(p/2) * sqrt(b)^(±1)
        let k = (q.numer() / BigInt::from(2)).to_i64();
        let Some(k) = k else {
            return Expr::from_node(Node::Pow(base, exponent));
        };
        let root = build_func(Func::Sqrt, base.clone());
        let part = if q.is_positive() { root } else { build_pow(root, Expr::int(-1)) };
        build_mul(vec![build_pow(base, Expr::int(k)), part])
    } else {
        if let Node::Num(b) = base.node() {
            if b.is_zero() && q.is_positive() {
                return Expr::zero();
            }
        }
        Expr::from_node(Node::Pow(base, exponent))
    }
}

fn build_func(f: Func, arg: Expr) -> Expr {
    if let Some(q) = arg.as_num() {
        match f {
            Func::Exp if q.is_zero() => return Expr::one(),
            Func::Log if q.is_one() => return Expr::zero(),
            Func::Sin | Func::Asin if q.is_zero() => return Expr::zero(),
            Func::Cos if q.is_zero() => return Expr::one(),
            Func::Sqrt if !q.is_negative() => return numeric_sqrt(q),
            _ => {}
        }
    }
    Expr::from_node(Node::Func(f, arg))
}

// sqrt(n/d) = sqrt(n*d)/d, then square factors are pulled out.
fn numeric_sqrt(q: &Rational) -> Expr {
    if q.is_zero() {
        return Expr::zero();
    }
    let nd = q.numer() * q.denom();
    let (s, t) = rational::split_square(&nd);
    let outside = Rational::new(s, q.denom().clone());
    if t.is_one() {
        return Expr::num(outside);
    }
    let inner = Expr::from_node(Node::Func(Func::Sqrt, Expr::num(Rational::from_integer(t))));
    build_mul(vec![Expr::num(outside), inner])
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs.clone())
            }
        }
        impl ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), rhs)
            }
        }
        impl ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), rhs.clone())
            }
        }
        impl ops::$tr<i64> for Expr {
            type Output = Expr;
            fn $m(self, rhs: i64) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, Expr::int(rhs))
            }
        }
        impl ops::$tr<i64> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: i64) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), Expr::int(rhs))
            }
        }
    };
}

binop!(Add, add, |a, b| build_add(vec![a, b]));
binop!(Sub, sub, |a, b| build_add(vec![a, build_mul(vec![Expr::int(-1), b])]));
binop!(Mul, mul, |a, b| build_mul(vec![a, b]));
binop!(Div, div, |a, b| build_mul(vec![a, build_pow(b, Expr::int(-1))]));

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        build_mul(vec![Expr::int(-1), self])
    }
}

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        build_mul(vec![Expr::int(-1), self.clone()])
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<Rational> for Expr {
    fn from(q: Rational) -> Expr {
        Expr::num(q)
    }
}

impl From<Symbol> for Expr {
    fn from(s: Symbol) -> Expr {
        Expr::symbol(s)
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::add_all(iter)
    }
}

impl std::iter::Product for Expr {
    fn product<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::mul_all(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Expr {
        Expr::sym("x")
    }
    fn y() -> Expr {
        Expr::sym("y")
    }

    #[test]
    #[allow(clippy::erasing_op)]
    fn flattening_and_folding() {
        let e = (x() + 1) + (y() + 2);
        match e.node() {
            Node::Add(ch) => {
                assert_eq!(ch.len(), 3);
                assert_eq!(ch[0], Expr::int(3));
            }
            _ => panic!("expected add"),
        }
        assert_eq!(x() * 0, Expr::zero());
        assert_eq!(x() * 1, x());
        assert_eq!(x() + 0, x());
        assert_eq!(x().powi(0), Expr::one());
        assert_eq!(x().powi(1), x());
    }

    #[test]
    fn like_terms_and_factors_merge() {
        assert_eq!(x() + x(), Expr::int(2) * x());
        assert_eq!(x() * x(), x().powi(2));
        assert_eq!(x() - x(), Expr::zero());
        assert_eq!(x() / x(), Expr::one());
        assert_eq!(x().powi(2) * x().powi(-2), Expr::one());
    }

    #[test]
    fn congruence_under_reordering() {
        let a = x() * y() + y() * 3 + x();
        let b = x() + Expr::int(3) * y() + y() * x();
        assert_eq!(a, b);
    }

    #[test]
    fn sqrt_powers_reduce() {
        let s = (Expr::one() - x().powi(2)).sqrt();
        assert_eq!(s.powi(2), Expr::one() - x().powi(2));
        assert_eq!(s.powi(3), (Expr::one() - x().powi(2)) * &s);
        assert!(matches!(s.powi(-1).node(), Node::Pow(..)));
        assert_eq!(Expr::int(8).sqrt(), Expr::int(2) * Expr::int(2).sqrt());
        assert_eq!(Expr::int(9).sqrt(), Expr::int(3));
        assert_eq!(x().pow(&Expr::frac(1, 2)), x().sqrt());
    }

    #[test]
    fn rationals_in_lowest_terms() {
        let q = Expr::frac(6, -4);
        assert_eq!(q.as_num().unwrap(), &rational::frac(-3, 2));
        assert!(q.as_num().unwrap().denom().is_positive());
    }

    #[test]
    fn simultaneous_substitution() {
        let mut m = BTreeMap::new();
        m.insert(Symbol::new("x"), y());
        m.insert(Symbol::new("y"), x());
        assert_eq!((x() + y()).subs(&m), x() + y());
        assert_eq!((x() * 2 + y()).subs(&m), y() * 2 + x());
    }

    #[test]
    fn substitute_rejects_non_symbol_keys() {
        let r = substitute(&x(), &[(x() + 1, y())]);
        assert!(matches!(r, Err(SubstituteError::NonSymbolKey(_))));
        assert_eq!(substitute(&x(), &[]).unwrap(), x());
    }

    #[test]
    fn free_symbols_sorted() {
        let e = Expr::sym("y") * Expr::sym("b_2") + Expr::sym("b_10").log();
        let names: Vec<String> = e.free_symbols().iter().map(|s| s.to_string()).collect();
        assert_eq!(names, ["b_2", "b_10", "y"]);
        assert!(Expr::int(5).free_symbols().is_empty());
    }
}

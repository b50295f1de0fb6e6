//! Pattern-scoped limits: rational functions of the limit variable, the
//! `(1 + f)^g` exponential pattern, and continuity (direct substitution).

use std::fmt;

use num_traits::{Signed, Zero};

use super::CalculusError;
use crate::expr::{Expr, Func, Node, Symbol};
use crate::poly::Poly;
use crate::ratfunc::{AtomTable, ConvertOptions, RatFunc};
use crate::simplify::simplify;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LimitPoint {
    Finite(Expr),
    PosInf,
    NegInf,
}

/// Side of approach for finite limit points.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Direction {
    #[default]
    Both,
    /// From below (`x -> a^-`).
    Left,
    /// From above (`x -> a^+`).
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LimitValue {
    Finite(Expr),
    PosInf,
    NegInf,
}

impl LimitValue {
    pub fn finite(&self) -> Option<&Expr> {
        match self {
            LimitValue::Finite(e) => Some(e),
            _ => None,
        }
    }

    pub fn into_expr(self) -> Result<Expr, CalculusError> {
        match self {
            LimitValue::Finite(e) => Ok(e),
            _ => Err(CalculusError::Infinite),
        }
    }

    pub fn to_latex(&self) -> String {
        match self {
            LimitValue::Finite(e) => e.to_latex(),
            LimitValue::PosInf => "\\infty".into(),
            LimitValue::NegInf => "-\\infty".into(),
        }
    }

    fn from_sign(positive: bool) -> LimitValue {
        if positive {
            LimitValue::PosInf
        } else {
            LimitValue::NegInf
        }
    }
}

impl fmt::Display for LimitValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitValue::Finite(e) => write!(f, "{e}"),
            LimitValue::PosInf => write!(f, "oo"),
            LimitValue::NegInf => write!(f, "-oo"),
        }
    }
}

impl LimitPoint {
    pub fn to_latex(&self) -> String {
        match self {
            LimitPoint::Finite(e) => e.to_latex(),
            LimitPoint::PosInf => "\\infty".into(),
            LimitPoint::NegInf => "-\\infty".into(),
        }
    }
}

/// Limit of `e` as `var` approaches `to`.
pub fn limit(e: &Expr, var: &Symbol, to: &LimitPoint, dir: Direction) -> Result<LimitValue, CalculusError> {
    if !e.contains(var) {
        return Ok(LimitValue::Finite(e.clone()));
    }
    if let Some(v) = rational_limit(e, var, to, dir)? {
        return Ok(v);
    }
    if let Some(v) = exp_pattern(e, var, to, dir)? {
        return Ok(v);
    }
    compositional(e, var, to, dir)
}

// Sign of a constant expression, when it is a number.
fn numeric_sign(e: &Expr) -> Option<bool> {
    let q = simplify(e);
    q.as_num().filter(|q| !q.is_zero()).map(|q| q.is_positive())
}

fn rational_limit(e: &Expr, var: &Symbol, to: &LimitPoint, dir: Direction) -> Result<Option<LimitValue>, CalculusError> {
    let mut t = AtomTable::new();
    let v = Expr::symbol(var.clone());
    t.intern(&v);
    let rf = t.to_ratfunc(e, ConvertOptions::default());
    if t.atoms().iter().skip(1).any(|a| a.contains(var)) {
        return Ok(None);
    }
    let rf = t.reduce_radicals(&rf).normalize();
    let num = rf.num.coeffs_in(0);
    let den = rf.den.coeffs_in(0);
    let expr_of = |p: &Poly| t.to_expr(&RatFunc::from_poly(p.clone()));
    match to {
        LimitPoint::PosInf | LimitPoint::NegInf => {
            let (dn, dd) = (num.len() - 1, den.len() - 1);
            let ratio = simplify(&(expr_of(&num[dn]) / expr_of(&den[dd])));
            if dn < dd {
                return Ok(Some(LimitValue::Finite(Expr::zero())));
            }
            if dn == dd {
                return Ok(Some(LimitValue::Finite(ratio)));
            }
            let Some(mut positive) = numeric_sign(&ratio) else {
                return Err(CalculusError::Unsupported(format!("sign of `{ratio}` is undetermined")));
            };
            if matches!(to, LimitPoint::NegInf) && (dn - dd) % 2 == 1 {
                positive = !positive;
            }
            Ok(Some(LimitValue::from_sign(positive)))
        }
        LimitPoint::Finite(a) => {
            let at = |cs: &[Poly]| -> Expr {
                let p: Vec<Expr> = cs.iter().map(&expr_of).collect();
                simplify(&crate::simplify::from_coefficients(&p, var).subs1(var, a))
            };
            let dv = at(&den);
            let nv = at(&num);
            if !dv.is_zero() {
                return Ok(Some(LimitValue::Finite(simplify(&(nv / dv)))));
            }
            // pole: find the order m of the zero of the denominator at a
            let mut m = 0usize;
            let mut q: Vec<Expr> = den.iter().map(&expr_of).collect();
            while simplify(&crate::simplify::from_coefficients(&q, var).subs1(var, a)).is_zero() {
                q = synthetic_division(&q, a);
                m += 1;
                if q.is_empty() {
                    return Err(CalculusError::Unsupported("denominator vanishes identically".into()));
                }
            }
            let qv = simplify(&crate::simplify::from_coefficients(&q, var).subs1(var, a));
            let Some(sign) = numeric_sign(&(nv / qv)) else {
                return Err(CalculusError::Unsupported("sign at the pole is undetermined".into()));
            };
            let odd = m % 2 == 1;
            match dir {
                Direction::Right => Ok(Some(LimitValue::from_sign(sign))),
                Direction::Left => Ok(Some(LimitValue::from_sign(if odd { !sign } else { sign }))),
                Direction::Both if odd => {
                    Err(CalculusError::DoesNotExist("one-sided limits at the pole differ".into()))
                }
                Direction::Both => Ok(Some(LimitValue::from_sign(sign))),
            }
        }
    }
}

// Quotient of Σ c_k x^k by (x - a), coefficients low to high.
fn synthetic_division(c: &[Expr], a: &Expr) -> Vec<Expr> {
    let n = c.len();
    if n <= 1 {
        return Vec::new();
    }
    let mut q = vec![Expr::zero(); n - 1];
    let mut carry = Expr::zero();
    for i in (1..n).rev() {
        carry = simplify(&(&c[i] + carry * a));
        q[i - 1] = carry.clone();
    }
    q
}

// (1 + f)^g with f -> 0 and g -> ±∞ gives exp(lim f*g).
fn exp_pattern(e: &Expr, var: &Symbol, to: &LimitPoint, dir: Direction) -> Result<Option<LimitValue>, CalculusError> {
    let Node::Pow(b, g) = e.node() else {
        return Ok(None);
    };
    if !g.contains(var) {
        return Ok(None);
    }
    let f = b - 1;
    match limit(&f, var, to, dir) {
        Ok(LimitValue::Finite(v)) if simplify(&v).is_zero() => {}
        _ => return Ok(None),
    }
    match limit(g, var, to, dir) {
        Ok(LimitValue::PosInf) | Ok(LimitValue::NegInf) => {}
        _ => return Ok(None),
    }
    let inner = limit(&simplify(&(&f * g)), var, to, dir)?;
    Ok(Some(match inner {
        LimitValue::Finite(v) => LimitValue::Finite(v.exp()),
        LimitValue::PosInf => LimitValue::PosInf,
        LimitValue::NegInf => LimitValue::Finite(Expr::zero()),
    }))
}

fn has_singularity(e: &Expr) -> bool {
    match e.node() {
        Node::Pow(b, x) if b.is_zero() && x.as_num().is_some_and(|q| q.is_negative()) => true,
        Node::Func(Func::Log, a) if a.is_zero() => true,
        _ => e.children().iter().any(|c| has_singularity(c)),
    }
}

fn compositional(e: &Expr, var: &Symbol, to: &LimitPoint, dir: Direction) -> Result<LimitValue, CalculusError> {
    if let LimitPoint::Finite(a) = to {
        let s = e.subs1(var, a);
        if !has_singularity(&s) {
            let s = simplify(&s);
            if !has_singularity(&s) {
                return Ok(LimitValue::Finite(s));
            }
        }
    }
    let unsupported = || CalculusError::Unsupported(format!("limit of `{e}`"));
    let sub = |c: &Expr| -> Result<Expr, CalculusError> {
        limit(c, var, to, dir)?.into_expr().map_err(|_| unsupported())
    };
    match e.node() {
        Node::Add(ch) => Ok(LimitValue::Finite(simplify(&Expr::add_all(ch.iter().map(sub).collect::<Result<Vec<_>, _>>()?)))),
        Node::Mul(ch) => Ok(LimitValue::Finite(simplify(&Expr::mul_all(ch.iter().map(sub).collect::<Result<Vec<_>, _>>()?)))),
        Node::Func(f, a) => match (f, limit(a, var, to, dir)?) {
            (_, LimitValue::Finite(v)) => {
                let r = Expr::apply(*f, v);
                if has_singularity(&r) {
                    Err(unsupported())
                } else {
                    Ok(LimitValue::Finite(r))
                }
            }
            (Func::Exp, LimitValue::PosInf) => Ok(LimitValue::PosInf),
            (Func::Exp, LimitValue::NegInf) => Ok(LimitValue::Finite(Expr::zero())),
            (Func::Log | Func::Sqrt, LimitValue::PosInf) => Ok(LimitValue::PosInf),
            _ => Err(unsupported()),
        },
        Node::Pow(b, x) => {
            let r = sub(b)?.pow(&sub(x)?);
            if has_singularity(&r) {
                Err(unsupported())
            } else {
                Ok(LimitValue::Finite(simplify(&r)))
            }
        }
        _ => Err(unsupported()),
    }
}

use std::collections::BTreeMap;

use num_traits::Signed;

use super::{residual_check, Equation, Solution, SolutionSet, SolveError};
use crate::expr::{Expr, Func, Node, Symbol};
use crate::simplify::{coefficients, simplify, together};

const MAX_DEPTH: usize = 32;

struct Isolator<'a> {
    unknown: &'a Symbol,
    assumptions: Vec<Expr>,
}

impl Isolator<'_> {
    fn fail(&self, reason: impl Into<String>) -> SolveError {
        SolveError::NotInvertible { unknown: self.unknown.clone(), reason: reason.into() }
    }

    /// `f - t = 0` as a linear-fractional equation in the unknown, solved
    /// exactly when the cleared numerator has degree 1 (or 2, via the
    /// quadratic formula).
    fn linear_fractional(&mut self, f: &Expr, t: &Expr) -> Option<Vec<Expr>> {
        let (num, den) = together(&(f - t));
        let c = coefficients(&num, self.unknown).ok()?;
        let sols = match c.len() {
            2 => {
                self.assumptions.push(c[1].clone());
                vec![simplify(&(-&c[0] / &c[1]))]
            }
            3 => {
                let (a, b, c0) = (&c[2], &c[1], &c[0]);
                let disc = simplify(&(b * b - Expr::int(4) * a * c0));
                if disc.as_num().is_some_and(|q| q.is_negative()) {
                    return Some(Vec::new());
                }
                self.assumptions.push(a.clone());
                let two_a = Expr::int(2) * a;
                if disc.is_zero() {
                    vec![simplify(&(-b / &two_a))]
                } else {
                    let sq = disc.sqrt();
                    vec![simplify(&((-b + &sq) / &two_a)), simplify(&((-b - &sq) / &two_a))]
                }
            }
            _ => return None,
        };
        if den.contains(self.unknown) {
            self.assumptions.push(den);
        }
        Some(sols)
    }

    fn solve(&mut self, f: Expr, t: Expr, depth: usize) -> Result<Vec<Expr>, SolveError> {
        if depth > MAX_DEPTH {
            return Err(self.fail("nesting too deep"));
        }
        let u = self.unknown;
        let (f, t) = match (f.contains(u), t.contains(u)) {
            (true, false) => (f, t),
            (false, true) => (t, f),
            (false, false) => return Err(self.fail("does not occur")),
            (true, true) => {
                return self.linear_fractional(&f, &t).ok_or_else(|| self.fail("occurs on both sides"));
            }
        };
        if let Node::Sym(_) = f.node() {
            return Ok(vec![t]);
        }
        if let Some(s) = self.linear_fractional(&f, &t) {
            return Ok(s);
        }
        let one_with_u = |items: &[Expr]| -> Result<(Expr, Vec<Expr>), SolveError> {
            let (with, without): (Vec<&Expr>, Vec<&Expr>) = items.iter().partition(|c| c.contains(u));
            if with.len() != 1 {
                return Err(self.fail("occurs in several independent positions"));
            }
            Ok((with[0].clone(), without.into_iter().cloned().collect()))
        };
        match f.node() {
            Node::Add(ch) => {
                let (inner, rest) = one_with_u(ch)?;
                self.solve(inner, simplify(&(t - Expr::add_all(rest))), depth + 1)
            }
            Node::Mul(ch) => {
                let (inner, rest) = one_with_u(ch)?;
                let c = Expr::mul_all(rest);
                self.assumptions.push(c.clone());
                self.solve(inner, simplify(&(t / c)), depth + 1)
            }
            Node::Pow(b, x) if !x.contains(u) => {
                let inv = x.recip();
                let root = simplify(&t.pow(&inv));
                let even = x.as_num().is_some_and(|q| q.is_integer() && q.numer() % 2u32 == 0.into());
                let mut out = self.solve(b.clone(), root.clone(), depth + 1)?;
                if even {
                    out.extend(self.solve(b.clone(), simplify(&-root), depth + 1)?);
                }
                Ok(out)
            }
            Node::Pow(b, x) => {
                if b.contains(u) {
                    return Err(self.fail("unknown in both base and exponent"));
                }
                self.solve(x.clone(), simplify(&(t.log() / b.log())), depth + 1)
            }
            Node::Func(func, a) => {
                let next = match func {
                    Func::Log => t.exp(),
                    Func::Exp => {
                        if t.as_num().is_some_and(|q| !q.is_positive()) {
                            return Ok(Vec::new());
                        }
                        t.log()
                    }
                    Func::Sqrt => {
                        if t.as_num().is_some_and(|q| q.is_negative()) {
                            return Ok(Vec::new());
                        }
                        t.powi(2)
                    }
                    Func::Asin => t.sin(),
                    Func::Sin | Func::Cos => return Err(self.fail(format!("{} is not invertible", func.name()))),
                };
                self.solve(a.clone(), simplify(&next), depth + 1)
            }
            Node::Num(_) | Node::Sym(_) => unreachable!("contains the unknown"),
        }
    }
}

/// Solves `eq` for `unknown` by peeling invertible operations off the side
/// that contains it, finishing with an exact linear-fractional step.
pub fn isolate(eq: &Equation, unknown: &Symbol) -> Result<SolutionSet, SolveError> {
    let mut iso = Isolator { unknown, assumptions: Vec::new() };
    let values = iso.solve(eq.lhs.clone(), eq.rhs.clone(), 0)?;
    let mut set = SolutionSet::new(vec![unknown.clone()]);
    for v in values {
        if set.values_of(unknown).contains(&v) {
            continue;
        }
        let mut m = BTreeMap::new();
        m.insert(unknown.clone(), v);
        set.solutions.push(Solution { values: m, multiplicity: 1 });
    }
    for a in &iso.assumptions {
        set.assume_at_solutions(a);
    }
    residual_check(&[eq.residual()], &set)?;
    Ok(set)
}

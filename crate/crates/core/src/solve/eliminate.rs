use std::collections::BTreeMap;

use super::linear::linear_parts;
use super::{isolate, residual_check, roots_univariate, solve_linear};
use super::{Completeness, Equation, EquationSystem, Solution, SolutionSet, SolveError};
use crate::expr::{Expr, Symbol};
use crate::simplify::{coefficients, simplify, together};

type Assignment = BTreeMap<Symbol, Expr>;

struct Eliminator {
    assumptions: Vec<Expr>,
    heuristic: bool,
}

struct Candidate {
    size: usize,
    unknown: usize,
    equation: usize,
    value: Expr,
    coeff: Expr,
}

impl Eliminator {
    fn assume(&mut self, e: Expr) {
        if !e.is_number() && !self.assumptions.contains(&e) {
            self.assumptions.push(e);
        }
    }

    /// Clears denominators and drops equations that vanish identically.
    /// Returns `None` when some equation reduces to a nonzero constant.
    fn clear(&mut self, eqs: &[Expr], unknowns: &[Symbol]) -> Option<Vec<Expr>> {
        let mut out = Vec::with_capacity(eqs.len());
        for e in eqs {
            let (num, den) = together(e);
            if num.is_zero() {
                continue;
            }
            if !num.contains_any(unknowns) {
                return None;
            }
            if den.contains_any(unknowns) {
                self.assume(den);
            }
            out.push(num);
        }
        Some(out)
    }

    fn solve(&mut self, eqs: Vec<Expr>, unknowns: Vec<Symbol>) -> Result<Vec<Assignment>, SolveError> {
        let Some(eqs) = self.clear(&eqs, &unknowns) else {
            return Ok(Vec::new());
        };
        if unknowns.is_empty() || eqs.is_empty() {
            if !unknowns.is_empty() {
                return Err(SolveError::NoPath(unknowns));
            }
            return Ok(vec![Assignment::new()]);
        }
        if let Some(c) = self.pick(&eqs, &unknowns) {
            if c.coeff.contains_any(&unknowns) {
                self.assume(c.coeff.clone());
            }
            let u = unknowns[c.unknown].clone();
            let rest_unknowns: Vec<Symbol> = unknowns.iter().filter(|v| **v != u).cloned().collect();
            let rest: Vec<Expr> = eqs
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != c.equation)
                .map(|(_, e)| e.subs1(&u, &c.value))
                .collect();
            let mut out = Vec::new();
            for mut sub in self.solve(rest, rest_unknowns)? {
                let v = simplify(&c.value.subs(&sub));
                sub.insert(u.clone(), v);
                out.push(sub);
            }
            return Ok(out);
        }
        // no linear occurrence left: try an equation in a single unknown
        for e in &eqs {
            let present: Vec<&Symbol> = unknowns.iter().filter(|u| e.contains(u)).collect();
            if present.len() != 1 {
                continue;
            }
            let u = present[0].clone();
            let branch = roots_univariate(e, &u).or_else(|_| isolate(&Equation::zero(e.clone()), &u))?;
            for a in &branch.assumptions {
                self.assume(a.clone());
            }
            self.heuristic |= !branch.unsolved.is_empty();
            let rest_unknowns: Vec<Symbol> = unknowns.iter().filter(|v| **v != u).cloned().collect();
            let mut out = Vec::new();
            for value in branch.values_of(&u) {
                let rest: Vec<Expr> = eqs.iter().filter(|x| *x != e).map(|x| x.subs1(&u, &value)).collect();
                for mut sub in self.solve(rest, rest_unknowns.clone())? {
                    sub.insert(u.clone(), simplify(&value.subs(&sub)));
                    out.push(sub);
                }
            }
            return Ok(out);
        }
        Err(SolveError::NoPath(unknowns))
    }

    /// The equation/unknown pair with the smallest linear coefficient, ties
    /// broken by unknown order and then equation order.
    fn pick(&mut self, eqs: &[Expr], unknowns: &[Symbol]) -> Option<Candidate> {
        let mut best: Option<Candidate> = None;
        let mut count = 0;
        for (ui, u) in unknowns.iter().enumerate() {
            for (ei, e) in eqs.iter().enumerate() {
                let Ok(c) = coefficients(e, u) else { continue };
                if c.len() != 2 || c[1].is_zero() {
                    continue;
                }
                count += 1;
                let coeff = simplify(&c[1]);
                let size = coeff.size();
                if best.as_ref().is_some_and(|b| b.size <= size) {
                    continue;
                }
                let value = simplify(&(-&c[0] / &coeff));
                best = Some(Candidate { size, unknown: ui, equation: ei, value, coeff });
            }
        }
        if count > 1 {
            self.heuristic = true;
        }
        best
    }
}

/// Solves a system by the first strategy that applies: a linear solve, a
/// univariate root search, or sequential elimination (clear denominators,
/// solve an equation that is linear in one unknown, substitute, recurse and
/// back-substitute). Every returned solution passes the residual check.
pub fn solve_system(system: &EquationSystem) -> Result<SolutionSet, SolveError> {
    let unknowns = system.unknowns().to_vec();
    let residuals = system.residuals();
    if residuals.iter().all(|r| linear_parts(r, &unknowns).is_some()) {
        match solve_linear(system) {
            Err(SolveError::Singular) => {}
            other => return other,
        }
    }
    if residuals.len() == 1 && unknowns.len() == 1 {
        let (r, u) = (&residuals[0], &unknowns[0]);
        return roots_univariate(r, u).or_else(|_| isolate(&system.equations()[0], u));
    }
    let mut el = Eliminator { assumptions: Vec::new(), heuristic: false };
    let found = el.solve(residuals.clone(), unknowns.clone())?;
    let mut set = SolutionSet::new(unknowns);
    for values in found {
        if set.solutions.iter().any(|s| s.values == values) {
            continue;
        }
        set.solutions.push(Solution { values, multiplicity: 1 });
    }
    if el.heuristic {
        set.completeness = Completeness::Heuristic;
    }
    for a in &el.assumptions {
        set.assume_at_solutions(a);
    }
    residual_check(&residuals, &set)?;
    Ok(set)
}

use std::collections::BTreeMap;

use super::{residual_check, EquationSystem, Solution, SolutionSet, SolveError};
use crate::calculus::derivative;
use crate::expr::{Expr, Symbol};
use crate::ratfunc::{AtomTable, ConvertOptions, RatFunc};
use crate::simplify::simplify;

/// Coefficients of each unknown and the constant term when `r` is affine in
/// the unknowns.
pub(crate) fn linear_parts(r: &Expr, unknowns: &[Symbol]) -> Option<(Vec<Expr>, Expr)> {
    let mut coeffs = Vec::with_capacity(unknowns.len());
    for u in unknowns {
        let c = simplify(&derivative(r, u));
        if c.contains_any(unknowns) {
            return None;
        }
        coeffs.push(c);
    }
    let zeros: BTreeMap<Symbol, Expr> = unknowns.iter().map(|u| (u.clone(), Expr::zero())).collect();
    Some((coeffs, r.subs(&zeros)))
}

struct Field {
    table: AtomTable,
}

impl Field {
    fn of(&mut self, e: &Expr) -> RatFunc {
        let rf = self.table.to_ratfunc(e, ConvertOptions { split_exp: true });
        self.tidy(&rf)
    }

    fn tidy(&self, rf: &RatFunc) -> RatFunc {
        self.table.reduce_radicals(rf).normalize()
    }

    fn to_expr(&self, rf: &RatFunc) -> Expr {
        simplify(&self.table.to_expr(rf))
    }
}

/// Solves a system whose equations are affine in the unknowns by exact
/// Gauss–Jordan elimination over rational functions of the remaining
/// symbols. The system must determine every unknown uniquely.
pub fn solve_linear(system: &EquationSystem) -> Result<SolutionSet, SolveError> {
    let unknowns = system.unknowns().to_vec();
    let n = unknowns.len();
    let residuals = system.residuals();
    let mut field = Field { table: AtomTable::new() };
    let mut rows: Vec<Vec<RatFunc>> = Vec::with_capacity(residuals.len());
    for (index, r) in residuals.iter().enumerate() {
        let (coeffs, c0) = linear_parts(r, &unknowns).ok_or(SolveError::NotLinear { index })?;
        let mut row: Vec<RatFunc> = coeffs.iter().map(|c| field.of(c)).collect();
        row.push(field.of(&-c0));
        rows.push(row);
    }
    let mut pivots = Vec::with_capacity(n);
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            return Err(SolveError::Singular);
        };
        rows.swap(rank, p);
        let inv = rows[rank][col].recip().expect("pivot is nonzero");
        let pivot_row: Vec<RatFunc> = rows[rank].iter().map(|x| field.tidy(&x.mul(&inv))).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == rank || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for j in col..=n {
                row[j] = field.tidy(&row[j].sub(&f.mul(&pivot_row[j])));
            }
        }
        rows[rank] = pivot_row;
        pivots.push(rank);
        rank += 1;
    }
    if rows[rank..].iter().any(|r| !r[n].is_zero()) {
        return Err(SolveError::Inconsistent);
    }
    let values: BTreeMap<Symbol, Expr> =
        unknowns.iter().zip(&pivots).map(|(u, &r)| (u.clone(), field.to_expr(&rows[r][n]))).collect();
    let mut set = SolutionSet::new(unknowns);
    set.solutions.push(Solution { values, multiplicity: 1 });
    residual_check(&residuals, &set)?;
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::solve::Equation;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    fn syms(names: &[&str]) -> Vec<Symbol> {
        names.iter().map(|n| Symbol::new(n)).collect()
    }

    #[test]
    fn two_by_two() {
        let sys = EquationSystem::new(
            vec![Equation::new(p("x + y"), p("2")), Equation::new(p("x - y"), p("0"))],
            syms(&["x", "y"]),
        )
        .unwrap();
        let s = solve_linear(&sys).unwrap();
        assert_eq!(s.values_of(&Symbol::new("x")), vec![p("1")]);
        assert_eq!(s.values_of(&Symbol::new("y")), vec![p("1")]);
    }

    #[test]
    fn symbolic_coefficients() {
        let sys = EquationSystem::from_zeros(vec![p("a*x + b*y - 1"), p("b*x + a*y")], syms(&["x", "y"])).unwrap();
        let s = solve_linear(&sys).unwrap();
        assert_eq!(s.values_of(&Symbol::new("x")), vec![p("a/(a^2 - b^2)")]);
        assert_eq!(s.values_of(&Symbol::new("y")), vec![p("-b/(a^2 - b^2)")]);
    }

    #[test]
    fn order_does_not_matter() {
        let e = vec![p("x + 2*y - z - c"), p("2*x - y + 3*z"), p("x + y + z - 1")];
        let u = syms(&["x", "y", "z"]);
        let a = solve_linear(&EquationSystem::from_zeros(e.clone(), u.clone()).unwrap()).unwrap();
        let rev: Vec<Expr> = e.into_iter().rev().collect();
        let b = solve_linear(&EquationSystem::from_zeros(rev, u).unwrap()).unwrap();
        assert_eq!(a.solutions, b.solutions);
    }

    #[test]
    fn failures() {
        let u = syms(&["x", "y"]);
        let s = EquationSystem::from_zeros(vec![p("x + y"), p("2*x + 2*y")], u.clone()).unwrap();
        assert_eq!(solve_linear(&s), Err(SolveError::Singular));
        let s = EquationSystem::from_zeros(vec![p("x*y"), p("x")], u.clone()).unwrap();
        assert_eq!(solve_linear(&s), Err(SolveError::NotLinear { index: 0 }));
        let s = EquationSystem::from_zeros(vec![p("x + y"), p("x - y"), p("x - 1")], u).unwrap();
        assert_eq!(solve_linear(&s), Err(SolveError::Inconsistent));
    }
}

//! Equation solving: linear systems, univariate roots, isolation through
//! invertible functions and sequential elimination.

mod check;
mod eliminate;
mod isolate;
mod linear;
mod roots;

use std::collections::BTreeMap;
use std::fmt;

use crate::expr::{Expr, Symbol};
use crate::simplify::{simplify, SimplifyError};

pub use check::{residual_check, RESIDUAL_POINTS, RESIDUAL_TOL};
pub use eliminate::solve_system;
pub use isolate::isolate;
pub use linear::solve_linear;
pub use roots::roots_univariate;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Simplify(#[from] SimplifyError),
    #[error("unknown {0} does not occur in any equation")]
    UnusedUnknown(Symbol),
    #[error("equation {index} is not linear in the unknowns")]
    NotLinear { index: usize },
    #[error("linear system is singular")]
    Singular,
    #[error("equations are inconsistent")]
    Inconsistent,
    #[error("equation holds for every value of {0}")]
    Indeterminate(Symbol),
    #[error("cannot isolate {unknown}: {reason}")]
    NotInvertible { unknown: Symbol, reason: String },
    #[error("no elimination path found for {0:?}")]
    NoPath(Vec<Symbol>),
    #[error("solution fails the residual check on equation {equation} (residual {residual:e})")]
    ResidualCheck { equation: usize, residual: f64 },
    #[error("residual of equation {0} could not be evaluated at any sample point")]
    Unverifiable(usize),
}

/// `lhs = rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub lhs: Expr,
    pub rhs: Expr,
}

impl Equation {
    pub fn new(lhs: Expr, rhs: Expr) -> Self {
        Equation { lhs, rhs }
    }

    /// `expr = 0`.
    pub fn zero(expr: Expr) -> Self {
        Equation { lhs: expr, rhs: Expr::zero() }
    }

    pub fn residual(&self) -> Expr {
        &self.lhs - &self.rhs
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationSystem {
    equations: Vec<Equation>,
    unknowns: Vec<Symbol>,
}

impl EquationSystem {
    pub fn new(equations: Vec<Equation>, unknowns: Vec<Symbol>) -> Result<Self, SolveError> {
        for u in &unknowns {
            if !equations.iter().any(|e| e.lhs.contains(u) || e.rhs.contains(u)) {
                return Err(SolveError::UnusedUnknown(u.clone()));
            }
        }
        Ok(EquationSystem { equations, unknowns })
    }

    /// System `e_i = 0` for each expression.
    pub fn from_zeros(exprs: Vec<Expr>, unknowns: Vec<Symbol>) -> Result<Self, SolveError> {
        EquationSystem::new(exprs.into_iter().map(Equation::zero).collect(), unknowns)
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    pub fn unknowns(&self) -> &[Symbol] {
        &self.unknowns
    }

    pub fn residuals(&self) -> Vec<Expr> {
        self.equations.iter().map(Equation::residual).collect()
    }
}

/// One assignment of every unknown.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub values: BTreeMap<Symbol, Expr>,
    /// Root multiplicity for univariate polynomials, 1 otherwise.
    pub multiplicity: usize,
}

impl Solution {
    pub fn get(&self, s: &Symbol) -> Option<&Expr> {
        self.values.get(s)
    }
}

/// Whether the solver explored every case or followed one elimination path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Completeness {
    Complete,
    Heuristic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSet {
    pub unknowns: Vec<Symbol>,
    pub solutions: Vec<Solution>,
    pub completeness: Completeness,
    /// Expressions assumed nonzero while clearing denominators or dividing.
    pub assumptions: Vec<Expr>,
    /// Factors left unsolved (irreducible over the rationals, or without
    /// real roots).
    pub unsolved: Vec<Expr>,
}

impl SolutionSet {
    fn new(unknowns: Vec<Symbol>) -> Self {
        SolutionSet {
            unknowns,
            solutions: Vec::new(),
            completeness: Completeness::Complete,
            assumptions: Vec::new(),
            unsolved: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    /// Values of a single unknown across all solutions.
    pub fn values_of(&self, s: &Symbol) -> Vec<Expr> {
        self.solutions.iter().filter_map(|sol| sol.get(s).cloned()).collect()
    }

    fn assume(&mut self, e: Expr) {
        let e = e.coeff_and_rest().1;
        if e.is_number() || self.assumptions.contains(&e) {
            return;
        }
        self.assumptions.push(e);
    }

    /// Records assumptions stated in terms of the unknowns as conditions on
    /// each solution.
    fn assume_at_solutions(&mut self, e: &Expr) {
        if !e.contains_any(&self.unknowns) {
            self.assume(simplify(e));
            return;
        }
        let at: Vec<Expr> = self.solutions.iter().map(|s| simplify(&e.subs(&s.values))).collect();
        for a in at {
            self.assume(a);
        }
    }
}

impl fmt::Display for SolutionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, sol) in self.solutions.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "Solution {}:", i + 1)?;
            for u in &self.unknowns {
                if let Some(v) = sol.get(u) {
                    write!(f, "\n  {u} = {v}")?;
                }
            }
        }
        Ok(())
    }
}

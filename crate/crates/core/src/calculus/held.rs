//! Unevaluated limits, sums and integrals, kept for display until `doit`.

use super::{definite_integral_poly, limit, sum_closed_form, CalculusError, Direction, LimitPoint, LimitValue};
use crate::expr::{Expr, Node, Symbol};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HeldKind {
    Limit { to: LimitPoint, dir: Direction },
    Sum { lo: Expr, hi: Expr },
    Integral { lo: Expr, hi: Expr },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeldForm {
    pub kind: HeldKind,
    pub body: Expr,
    pub var: Symbol,
}

impl HeldForm {
    pub fn limit(body: Expr, var: Symbol, to: LimitPoint, dir: Direction) -> Self {
        HeldForm { kind: HeldKind::Limit { to, dir }, body, var }
    }

    pub fn sum(body: Expr, var: Symbol, lo: Expr, hi: Expr) -> Self {
        HeldForm { kind: HeldKind::Sum { lo, hi }, body, var }
    }

    pub fn integral(body: Expr, var: Symbol, lo: Expr, hi: Expr) -> Self {
        HeldForm { kind: HeldKind::Integral { lo, hi }, body, var }
    }

    /// Evaluates the held operation.
    pub fn doit(&self) -> Result<LimitValue, CalculusError> {
        match &self.kind {
            HeldKind::Limit { to, dir } => limit(&self.body, &self.var, to, *dir),
            HeldKind::Sum { lo, hi } => sum_closed_form(&self.body, &self.var, lo, hi).map(LimitValue::Finite),
            HeldKind::Integral { lo, hi } => {
                definite_integral_poly(&self.body, &self.var, lo, hi).map(LimitValue::Finite)
            }
        }
    }

    pub fn to_latex(&self) -> String {
        let body = self.body.to_latex();
        let body = match self.body.node() {
            Node::Add(_) => format!("\\left({body}\\right)"),
            _ => body,
        };
        let v = self.var.latex();
        match &self.kind {
            HeldKind::Limit { to, dir } => {
                let side = match dir {
                    Direction::Both => "",
                    Direction::Left => "^-",
                    Direction::Right => "^+",
                };
                format!("\\lim_{{{v} \\to {}{side}}} {body}", to.to_latex())
            }
            HeldKind::Sum { lo, hi } => {
                format!("\\sum_{{{v}={}}}^{{{}}} {body}", lo.to_latex(), hi.to_latex())
            }
            HeldKind::Integral { lo, hi } => {
                format!("\\int\\limits_{{{}}}^{{{}}} {body}\\, d{v}", lo.to_latex(), hi.to_latex())
            }
        }
    }
}

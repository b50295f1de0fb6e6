use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{SolutionSet, SolveError};
use crate::expr::{Expr, Node, Symbol};
use crate::numbridge::{eval_tree, EvalError};

/// Number of random assignments each residual is checked at.
pub const RESIDUAL_POINTS: usize = 20;
/// Residual bound, relative to the magnitude of the residual's terms when
/// that exceeds 1.
pub const RESIDUAL_TOL: f64 = 1e-9;

const MAX_ATTEMPTS: usize = 200;

/// Value and scale of a residual: the terms of a top-level sum are evaluated
/// separately so cancellation is measured against their size.
fn eval_scaled(e: &Expr, env: &BTreeMap<Symbol, f64>) -> Result<(f64, f64), EvalError> {
    let lookup = |s: &Symbol| env.get(s).copied();
    match e.node() {
        Node::Add(ch) => {
            let (mut v, mut scale) = (0.0, 0.0);
            for c in ch {
                let t: f64 = eval_tree(c, &lookup)?;
                v += t;
                scale += t.abs();
            }
            Ok((v, scale))
        }
        _ => {
            let v: f64 = eval_tree(e, &lookup)?;
            Ok((v, v.abs()))
        }
    }
}

/// Substitutes every solution into every residual and evaluates at random
/// values in [0.5, 2] of the remaining symbols. Points where a residual is
/// undefined are skipped.
pub fn residual_check(residuals: &[Expr], set: &SolutionSet) -> Result<(), SolveError> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    for sol in &set.solutions {
        for (k, r) in residuals.iter().enumerate() {
            let s = r.subs(&sol.values);
            if s.is_zero() {
                continue;
            }
            let free = s.free_symbols();
            let mut good = 0;
            for _ in 0..MAX_ATTEMPTS {
                if good == RESIDUAL_POINTS {
                    break;
                }
                let env: BTreeMap<Symbol, f64> = free.iter().map(|x| (x.clone(), rng.gen_range(0.5..2.0))).collect();
                let Ok((v, scale)) = eval_scaled(&s, &env) else { continue };
                if !v.is_finite() || !scale.is_finite() {
                    continue;
                }
                if v.abs() > RESIDUAL_TOL * scale.max(1.0) {
                    return Err(SolveError::ResidualCheck { equation: k, residual: v });
                }
                good += 1;
            }
            if good == 0 {
                return Err(SolveError::Unverifiable(k));
            }
        }
    }
    Ok(())
}

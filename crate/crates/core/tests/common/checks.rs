//! Property checks shared by the proptest suites and the acceptance run.
//! Each returns a description of the first violation.

use std::collections::BTreeMap;

use num_traits::Zero;
use symstat_core::calculus::{derivative, sum_closed_form};
use symstat_core::expr::{parse, Expr, Node, Symbol};
use symstat_core::numbridge::{eval_exact, eval_tree_at, CompiledTape};
use symstat_core::rational::{frac, int, Rational};
use symstat_core::simplify::{expand, factor, together, factor_univariate, rational_coefficients};
use symstat_core::solve::{roots_univariate, solve_linear, Equation, EquationSystem, SolveError};
use symstat_core::symmat::{determinant, determinant_cofactor};
use symstat_core::{Scalar, SymMatrix};

pub type Check = Result<(), String>;

fn xy() -> Vec<Symbol> {
    vec![Symbol::new("x"), Symbol::new("y")]
}

/// Five-point central difference of a compiled tape along one coordinate.
fn five_point(t: &CompiledTape<f64>, at: &[f64], i: usize) -> f64 {
    let h = 1e-3;
    let f = |d: f64| {
        let mut p = at.to_vec();
        p[i] += d;
        t.eval_scalar(&p).unwrap()
    };
    (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h)
}

/// The compiled symbolic derivative agrees with finite differences.
pub fn derivative_vs_fd(text: &str, at: [f64; 2]) -> Check {
    let e = parse(text).map_err(|e| e.to_string())?;
    let vars = xy();
    let t = CompiledTape::<f64>::compile(&e, Some(&vars)).unwrap();
    for (i, v) in vars.iter().enumerate() {
        let d = CompiledTape::<f64>::compile(&derivative(&e, v), Some(&vars)).unwrap();
        let exact = d.eval_scalar(&at).map_err(|e| e.to_string())?;
        let fd = five_point(&t, &at, i);
        let err = (exact - fd).abs() / exact.abs().max(1.0);
        if !(err < 1e-6) {
            return Err(format!("d/d{v} of {e} at {at:?}: symbolic {exact}, differences {fd}"));
        }
    }
    Ok(())
}

/// Tape evaluation agrees with exact rational evaluation, and with the tape
/// compiled after substituting the point symbolically.
pub fn compile_vs_exact(text: &str, at: [i64; 2]) -> Check {
    let e = parse(text).map_err(|e| e.to_string())?;
    let vars = xy();
    // dyadic points are exact in binary floating point
    let q = [frac(at[0], 8), frac(at[1], 8)];
    let xf = [at[0] as f64 / 8.0, at[1] as f64 / 8.0];
    let exact = eval_exact(&e, &|s| vars.iter().position(|v| v == s).map(|i| q[i].clone()))
        .ok_or_else(|| format!("{e} has no exact value"))?;
    let want = f64::from_rational(&exact);
    let t = CompiledTape::<f64>::compile(&e, Some(&vars)).unwrap();
    let got = t.eval_scalar(&xf).map_err(|e| e.to_string())?;
    let tree = eval_tree_at(&e, &vars, &xf).map_err(|e| e.to_string())?;
    let bound: BTreeMap<Symbol, Expr> = vars.iter().cloned().zip(q.iter().map(|v| Expr::num(v.clone()))).collect();
    let substituted = CompiledTape::<f64>::compile(&e.subs(&bound), Some(&[])).unwrap().eval_scalar(&[]).unwrap();
    for (what, v) in [("tape", got), ("tree", tree), ("substituted", substituted)] {
        let err = (v - want).abs() / want.abs().max(1.0);
        if !(err < 1e-12) {
            return Err(format!("{what} value of {e} at {xf:?} is {v}, exact {want}"));
        }
    }
    Ok(())
}

/// Factoring then expanding gives back the expanded polynomial, and every
/// rational root is found with its multiplicity.
pub fn expand_factor_identity(text: &str) -> Check {
    let x = Symbol::new("x");
    let e = expand(&parse(text).map_err(|e| e.to_string())?);
    let f = factor_univariate(&e, &x).map_err(|e| e.to_string())?;
    if expand(&f) != e {
        return Err(format!("expand(factor({e})) = {}", expand(&f)));
    }
    let roots = roots_univariate(&e, &x).map_err(|e| e.to_string())?;
    let counted: usize = roots.solutions.iter().map(|s| s.multiplicity).sum();
    let deg = rational_coefficients(&e, &x).unwrap().len() - 1;
    let quad = if text.contains("x^2 + 1") { 2 } else { 0 };
    if counted + quad != deg {
        return Err(format!("{e}: {counted} roots counted for degree {deg}"));
    }
    for s in &roots.solutions {
        if !e.subs(&s.values).as_num().is_some_and(|q| q.is_zero()) {
            return Err(format!("{e} does not vanish at {:?}", s.values));
        }
    }
    Ok(())
}

/// Multivariate factoring multiplies back to the expanded input, and every
/// factor it finds divides that input.
pub fn multivariate_factor_identity(text: &str) -> Check {
    let e = expand(&parse(text).map_err(|e| e.to_string())?);
    let f = factor(&e);
    if expand(&f) != e {
        return Err(format!("expand(factor({e})) = {}", expand(&f)));
    }
    let parts = match f.node() {
        Node::Mul(ch) => ch.clone(),
        _ => vec![f.clone()],
    };
    for part in parts {
        let base = match part.node() {
            Node::Pow(b, _) => b.clone(),
            _ => part,
        };
        if base.as_num().is_none() && together(&(e.clone() / base.clone())).1.as_num().is_none() {
            return Err(format!("{base} does not divide {e}"));
        }
    }
    Ok(())
}

/// Fraction-free elimination agrees with cofactor expansion.
pub fn bareiss_vs_cofactor(m: &[Vec<i64>]) -> Check {
    let rows: Vec<Vec<Expr>> = m.iter().map(|r| r.iter().map(|v| Expr::int(*v)).collect()).collect();
    let m = SymMatrix::from_rows(rows).unwrap();
    let a = determinant(&m).map_err(|e| e.to_string())?;
    let b = determinant_cofactor(&m).map_err(|e| e.to_string())?;
    if a != b {
        return Err(format!("det {}: Bareiss {a}, cofactor {b}", m.to_plain()));
    }
    Ok(())
}

/// The closed form of a polynomial sum equals the term-by-term sum.
pub fn sum_vs_brute(coeffs: &[(i64, i64)], lo: i64, hi: i64) -> Check {
    let i = Symbol::new("i");
    let body = Expr::add_all(
        coeffs.iter().enumerate().map(|(k, (n, d))| Expr::frac(*n, *d) * Expr::symbol(i.clone()).powi(k as i64)),
    );
    let closed = sum_closed_form(&body, &i, &Expr::int(lo), &Expr::int(hi)).map_err(|e| e.to_string())?;
    let mut brute = Rational::zero();
    for v in lo..=hi {
        let mut pw = int(1);
        for (n, d) in coeffs {
            brute += frac(*n, *d) * &pw;
            pw *= int(v);
        }
    }
    if closed.as_num() != Some(&brute) {
        return Err(format!("sum of {body} for i = {lo}..{hi}: closed {closed}, brute {brute}"));
    }
    // and symbolically in the upper bound
    let m = Symbol::new("m");
    let general = sum_closed_form(&body, &i, &Expr::int(lo), &Expr::symbol(m.clone())).map_err(|e| e.to_string())?;
    let at = expand(&general.subs1(&m, &Expr::int(hi)));
    if at.as_num() != Some(&brute) {
        return Err(format!("symbolic sum of {body} from {lo} evaluated at {hi}: {at}, brute {brute}"));
    }
    Ok(())
}

/// Linear solutions satisfy every equation exactly and do not depend on
/// equation order; singular systems have zero determinant.
pub fn linear_residuals(a: &[Vec<i64>], b: &[i64]) -> Check {
    let n = b.len();
    let unknowns: Vec<Symbol> = (1..=n).map(|k| Symbol::new(&format!("z_{k}"))).collect();
    let eqs: Vec<Equation> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let lhs = Expr::add_all(row.iter().zip(&unknowns).map(|(c, u)| Expr::int(*c) * Expr::symbol(u.clone())));
            Equation::new(lhs, Expr::int(*rhs))
        })
        .collect();
    let det = determinant(&SymMatrix::from_rows(a.iter().map(|r| r.iter().map(|v| Expr::int(*v)).collect()).collect()).unwrap())
        .unwrap();
    let Ok(system) = EquationSystem::new(eqs.clone(), unknowns.clone()) else {
        // some unknown has only zero coefficients
        return if det.is_zero() { Ok(()) } else { Err("unused unknown with nonzero determinant".into()) };
    };
    match solve_linear(&system) {
        Ok(set) => {
            for s in &set.solutions {
                for eq in &eqs {
                    let r = expand(&eq.residual().subs(&s.values));
                    if !r.is_zero() {
                        return Err(format!("residual {r} for {:?}", s.values));
                    }
                }
            }
            let mut rev = eqs.clone();
            rev.reverse();
            let again = solve_linear(&EquationSystem::new(rev, unknowns).unwrap()).map_err(|e| e.to_string())?;
            if again.solutions != set.solutions {
                return Err("solution depends on equation order".into());
            }
            if det.is_zero() && set.solutions.iter().all(|s| s.values.values().all(|v| v.is_number())) {
                return Err("unique numeric solution for a singular system".into());
            }
            Ok(())
        }
        Err(SolveError::Singular | SolveError::Inconsistent | SolveError::Indeterminate(_)) if det.is_zero() => Ok(()),
        Err(e) => Err(format!("{e} with determinant {det}")),
    }
}

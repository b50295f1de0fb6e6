use super::{max_norm, observed_information, solve_dense, FitResult, Method, OptimizeError};
use crate::numbridge::{CompiledTape, EvalError};
use crate::scalar::Scalar;

/// Score and Hessian tapes over the same parameters, plus the objective when
/// available for step control.
#[derive(Clone, Copy, Debug)]
pub struct NewtonProblem<'a, S> {
    pub score: &'a CompiledTape<S>,
    pub hessian: &'a CompiledTape<S>,
    pub objective: Option<&'a CompiledTape<S>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonOptions<S> {
    /// Convergence when the score max-norm falls below this.
    pub tol: S,
    pub max_iter: usize,
    pub max_halvings: usize,
}

impl<S: Scalar> Default for NewtonOptions<S> {
    fn default() -> Self {
        NewtonOptions { tol: S::lit(1e-8), max_iter: 500, max_halvings: 20 }
    }
}

/// What a Newton iteration needs: score, Hessian and optionally the
/// objective for step control.
pub(crate) trait Model<S: Scalar> {
    fn score(&self, x: &[S]) -> Result<Vec<S>, EvalError>;
    fn hessian(&self, x: &[S]) -> Result<Vec<Vec<S>>, EvalError>;
    /// Objective value; an evaluation failure counts as minus infinity.
    fn value(&self, x: &[S]) -> Option<S>;
}

impl<S: Scalar> NewtonProblem<'_, S> {
    fn check(&self) -> Result<usize, OptimizeError> {
        let n = self.score.arity();
        if self.score.outputs() != n {
            return Err(OptimizeError::Mismatch(format!("score has {} outputs for {n} parameters", self.score.outputs())));
        }
        if self.hessian.params() != self.score.params() || self.hessian.shape() != (n, n) {
            return Err(OptimizeError::Mismatch("Hessian parameters or shape differ from the score".into()));
        }
        if let Some(o) = self.objective {
            if o.params() != self.score.params() {
                return Err(OptimizeError::Mismatch("objective parameters differ from the score".into()));
            }
        }
        Ok(n)
    }
}

impl<S: Scalar> Model<S> for NewtonProblem<'_, S> {
    fn score(&self, x: &[S]) -> Result<Vec<S>, EvalError> {
        self.score.eval(x)
    }

    fn hessian(&self, x: &[S]) -> Result<Vec<Vec<S>>, EvalError> {
        let n = x.len();
        let h = self.hessian.eval(x)?;
        Ok((0..n).map(|i| h[i * n..(i + 1) * n].to_vec()).collect())
    }

    fn value(&self, x: &[S]) -> Option<S> {
        let o = self.objective?;
        Some(match o.eval_scalar(x) {
            Ok(v) if v.is_finite() => v,
            _ => S::neg_infinity(),
        })
    }
}

fn acceptable<S: Scalar>(model: &dyn Model<S>, x: &[S], current: Option<S>) -> bool {
    let finite = |v: &[S]| v.iter().all(|x| x.is_finite());
    let ok = matches!(model.score(x), Ok(s) if finite(&s))
        && matches!(model.hessian(x), Ok(h) if h.iter().all(|r| finite(r)));
    match (current, model.value(x)) {
        (Some(c), Some(v)) => ok && v >= c,
        _ => ok,
    }
}

pub(crate) struct Iterate<S> {
    pub x: Vec<S>,
    pub score: Vec<S>,
    pub iterations: usize,
    pub converged: bool,
}

pub(crate) fn newton_core<S: Scalar>(
    model: &dyn Model<S>,
    start: &[S],
    opts: &NewtonOptions<S>,
) -> Result<Iterate<S>, OptimizeError> {
    let mut x = start.to_vec();
    let mut score = model.score(&x)?;
    if score.iter().any(|s| !s.is_finite()) || model.value(&x).is_some_and(|v| !v.is_finite()) {
        return Err(OptimizeError::NonFiniteStart);
    }
    let mut iterations = 0;
    let mut converged = max_norm(&score) < opts.tol;
    while !converged && iterations < opts.max_iter {
        iterations += 1;
        let h = model.hessian(&x)?;
        let step = solve_dense(h, score.clone()).ok_or(OptimizeError::SingularHessian(iterations))?;
        let current = model.value(&x);
        let mut gamma = S::one();
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let cand: Vec<S> = x.iter().zip(&step).map(|(xi, di)| *xi - gamma * *di).collect();
            if acceptable(model, &cand, current) {
                accepted = Some(cand);
                break;
            }
            gamma = gamma / S::lit(2.0);
        }
        let Some(next) = accepted else { break };
        x = next;
        score = model.score(&x)?;
        converged = max_norm(&score) < opts.tol;
    }
    Ok(Iterate { x, score, iterations, converged })
}

/// Newton–Raphson for a maximum: `x <- x - g H^{-1} S` where the step length
/// `g` is halved (up to `max_halvings` times) while the objective would
/// decrease or the tapes stop producing finite values.
pub fn newton_raphson<S: Scalar>(
    problem: &NewtonProblem<'_, S>,
    start: &[S],
    opts: &NewtonOptions<S>,
) -> Result<FitResult<S>, OptimizeError> {
    let n = problem.check()?;
    if start.len() != n {
        return Err(OptimizeError::Mismatch(format!("start has {} values for {n} parameters", start.len())));
    }
    let it = newton_core(problem, start, opts)?;
    let information = observed_information(problem.hessian, &it.x)?;
    let objective = match problem.objective {
        Some(o) => o.eval_scalar(&it.x)?,
        None => S::nan(),
    };
    Ok(FitResult {
        grad_norm: max_norm(&it.score),
        estimates: it.x,
        objective,
        information,
        iterations: it.iterations,
        converged: it.converged,
        method: Method::NewtonRaphson,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{hessian, score};
    use crate::expr::parse;

    #[test]
    fn quadratic_in_one_step() {
        let e = parse("-(x - 3)^2").unwrap();
        let v = e.free_symbols();
        let s = CompiledTape::<f64>::compile_matrix(&score(&e, &v), Some(&v)).unwrap();
        let h = CompiledTape::<f64>::compile_matrix(&hessian(&e, &v), Some(&v)).unwrap();
        let o = CompiledTape::<f64>::compile(&e, Some(&v)).unwrap();
        let p = NewtonProblem { score: &s, hessian: &h, objective: Some(&o) };
        let r = newton_raphson(&p, &[0.0], &NewtonOptions::default()).unwrap();
        assert_eq!(r.estimates, vec![3.0]);
        assert_eq!(r.iterations, 1);
        assert!(r.converged);
        assert_eq!(r.information, vec![vec![2.0]]);
    }

    #[test]
    fn singular_hessian() {
        let e = parse("x + y").unwrap();
        let v = e.free_symbols();
        let s = CompiledTape::<f64>::compile_matrix(&score(&e, &v), Some(&v)).unwrap();
        let h = CompiledTape::<f64>::compile_matrix(&hessian(&e, &v), Some(&v)).unwrap();
        let p = NewtonProblem { score: &s, hessian: &h, objective: None };
        assert_eq!(newton_raphson(&p, &[0.0, 0.0], &NewtonOptions::default()), Err(OptimizeError::SingularHessian(1)));
    }

    #[test]
    fn rejects_bad_start() {
        let e = parse("log(x) - x").unwrap();
        let v = e.free_symbols();
        let s = CompiledTape::<f64>::compile_matrix(&score(&e, &v), Some(&v)).unwrap();
        let h = CompiledTape::<f64>::compile_matrix(&hessian(&e, &v), Some(&v)).unwrap();
        let o = CompiledTape::<f64>::compile(&e, Some(&v)).unwrap();
        let p = NewtonProblem { score: &s, hessian: &h, objective: Some(&o) };
        assert!(newton_raphson(&p, &[-1.0], &NewtonOptions::default()).is_err());
        let r = newton_raphson(&p, &[0.2], &NewtonOptions::default()).unwrap();
        assert!((r.estimates[0] - 1.0).abs() < 1e-10);
    }
}

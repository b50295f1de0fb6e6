use super::{max_norm, numeric_information, FitResult, Method, OptimizeError};
use crate::numbridge::{finite_diff_gradient, CompiledTape};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NelderMeadOptions<S> {
    /// Convergence when the simplex diameter (max-norm) falls below this.
    pub tol: S,
    pub max_iter: usize,
    /// Initial edge length relative to `max(|x_i|, 1)`.
    pub initial_step: S,
}

impl<S: Scalar> Default for NelderMeadOptions<S> {
    fn default() -> Self {
        NelderMeadOptions { tol: S::lit(1e-10), max_iter: 500, initial_step: S::lit(0.1) }
    }
}

pub(crate) struct Minimum<S> {
    pub x: Vec<S>,
    pub value: S,
    pub iterations: usize,
    pub converged: bool,
}

fn diameter<S: Scalar>(simplex: &[Vec<S>]) -> S {
    let best = &simplex[0];
    simplex[1..].iter().fold(S::zero(), |m, v| {
        let d: Vec<S> = v.iter().zip(best).map(|(a, b)| *a - *b).collect();
        m.max(max_norm(&d))
    })
}

/// Minimizes `f` with reflection 1, expansion 2, contraction 0.5 and
/// shrink 0.5. Non-finite values are treated as `+inf`.
pub(crate) fn minimize<S: Scalar>(
    mut f: impl FnMut(&[S]) -> S,
    start: &[S],
    opts: &NelderMeadOptions<S>,
) -> Minimum<S> {
    let n = start.len();
    let mut eval = |x: &[S]| {
        let v = f(x);
        if v.is_nan() {
            S::infinity()
        } else {
            v
        }
    };
    let mut simplex: Vec<Vec<S>> = vec![start.to_vec()];
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] = v[i] + opts.initial_step * start[i].abs().max(S::one());
        simplex.push(v);
    }
    let mut values: Vec<S> = simplex.iter().map(|v| eval(v)).collect();
    let half = S::lit(0.5);
    let two = S::lit(2.0);
    let mut iterations = 0;
    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        if n == 0 || diameter(&simplex) < opts.tol {
            return Minimum { x: simplex.swap_remove(0), value: values[0], iterations, converged: true };
        }
        if iterations >= opts.max_iter {
            return Minimum { x: simplex.swap_remove(0), value: values[0], iterations, converged: false };
        }
        iterations += 1;
        let inv_n = S::one() / S::lit(n as f64);
        let centroid: Vec<S> =
            (0..n).map(|j| simplex[..n].iter().fold(S::zero(), |s, v| s + v[j]) * inv_n).collect();
        let along = |t: S| -> Vec<S> { centroid.iter().zip(&simplex[n]).map(|(c, w)| *c + t * (*c - *w)).collect() };
        let reflected = along(S::one());
        let fr = eval(&reflected);
        if fr < values[0] {
            let expanded = along(two);
            let fe = eval(&expanded);
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
            continue;
        }
        let (contracted, fc) = if fr < values[n] {
            let c = along(half);
            let fc = eval(&c);
            (c, fc)
        } else {
            let c = along(-half);
            let fc = eval(&c);
            (c, fc)
        };
        if fc < values[n].min(fr) {
            simplex[n] = contracted;
            values[n] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=n {
            simplex[i] = simplex[i].iter().zip(&best).map(|(v, b)| *b + half * (*v - *b)).collect();
            values[i] = eval(&simplex[i]);
        }
    }
}

/// Maximizes a scalar tape with Nelder–Mead. The reported information and
/// gradient norm come from central differences at the estimate.
pub fn nelder_mead_max<S: Scalar>(
    objective: &CompiledTape<S>,
    start: &[S],
    opts: &NelderMeadOptions<S>,
) -> Result<FitResult<S>, OptimizeError> {
    let f0 = objective.eval_scalar(start)?;
    if !f0.is_finite() {
        return Err(OptimizeError::NonFiniteStart);
    }
    let mut stack = Vec::new();
    let mut out = [S::zero()];
    let m = minimize(
        |x| match objective.eval_into(x, &mut stack, &mut out) {
            Ok(()) => -out[0],
            Err(_) => S::infinity(),
        },
        start,
        opts,
    );
    let grad = finite_diff_gradient(objective, &m.x, S::lit(1e-6))?;
    let information = numeric_information(objective, &m.x, S::lit(1e-4))?;
    Ok(FitResult {
        objective: -m.value,
        grad_norm: max_norm(&grad),
        information,
        iterations: m.iterations,
        converged: m.converged,
        method: Method::NelderMead,
        estimates: m.x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn paraboloid() {
        let t = CompiledTape::<f64>::compile(&parse("-(x^2 + y^2)").unwrap(), None).unwrap();
        let r = nelder_mead_max(&t, &[1.0, 1.0], &NelderMeadOptions::default()).unwrap();
        assert!(r.converged);
        assert!(r.estimates.iter().all(|v| v.abs() < 1e-5));
        assert!((r.information[0][0] - 2.0).abs() < 1e-4);
    }

    #[test]
    fn iteration_cap() {
        let t = CompiledTape::<f64>::compile(&parse("-(x - 100)^2 - (y + 50)^4").unwrap(), None).unwrap();
        let opts = NelderMeadOptions { max_iter: 5, ..NelderMeadOptions::default() };
        let r = nelder_mead_max(&t, &[0.0, 0.0], &opts).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 5);
    }

    #[test]
    fn invalid_region_is_avoided() {
        let t = CompiledTape::<f64>::compile(&parse("log(x) - x").unwrap(), None).unwrap();
        let r = nelder_mead_max(&t, &[0.05], &NelderMeadOptions::default()).unwrap();
        assert!((r.estimates[0] - 1.0).abs() < 1e-6);
        assert!(nelder_mead_max(&t, &[-1.0], &NelderMeadOptions::default()).is_err());
    }
}

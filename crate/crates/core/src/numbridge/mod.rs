//! Numeric evaluation of symbolic results: compiled tapes, finite
//! differences and adaptive quadrature.

mod quad;
mod tape;

pub use quad::{integrate_fn, quadrature, QuadError, QuadResult, MAX_INTERVALS};
pub use tape::{eval_exact, eval_tree, eval_tree_at, CompileError, CompiledTape, EvalError};

use crate::scalar::Scalar;

/// A real-valued function of a packed parameter vector. Compiled scalar
/// tapes are the usual implementation; wrappers can add instrumentation.
pub trait Objective<S> {
    fn arity(&self) -> usize;
    fn value(&self, x: &[S]) -> Result<S, EvalError>;
}

impl<S: Scalar> Objective<S> for CompiledTape<S> {
    fn arity(&self) -> usize {
        CompiledTape::arity(self)
    }

    fn value(&self, x: &[S]) -> Result<S, EvalError> {
        self.eval_scalar(x)
    }
}

/// Central-difference gradient of a scalar function.
pub fn finite_diff_gradient<S: Scalar, F: Objective<S> + ?Sized>(tape: &F, point: &[S], h: S) -> Result<Vec<S>, EvalError> {
    let mut x = point.to_vec();
    let two = S::one() + S::one();
    let mut g = Vec::with_capacity(point.len());
    for i in 0..point.len() {
        let xi = x[i];
        x[i] = xi + h;
        let up = tape.value(&x)?;
        x[i] = xi - h;
        let down = tape.value(&x)?;
        x[i] = xi;
        g.push((up - down) / (two * h));
    }
    Ok(g)
}

/// Central-difference Hessian of a scalar function, symmetrized.
pub fn finite_diff_hessian<S: Scalar, F: Objective<S> + ?Sized>(
    tape: &F,
    point: &[S],
    h: S,
) -> Result<Vec<Vec<S>>, EvalError> {
    let n = point.len();
    let mut x = point.to_vec();
    let four = S::lit(4.0);
    let f = |x: &[S]| tape.value(x);
    let mut out = vec![vec![S::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let mut corner = |si: S, sj: S| -> Result<S, EvalError> {
                let (xi, xj) = (x[i], x[j]);
                x[i] = x[i] + si * h;
                x[j] = x[j] + sj * h;
                let v = f(&x);
                x[i] = xi;
                x[j] = xj;
                v
            };
            let one = S::one();
            let v = (corner(one, one)? - corner(one, -one)? - corner(-one, one)? + corner(-one, -one)?) / (four * h * h);
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Symbol};

    #[test]
    fn compiled_matches_tree() {
        let e = parse("x^5 - 3*x^4 + x^3 + 3*x^2 - 2*x + exp(-x)/sqrt(x + 3) + log(x + 2)").unwrap();
        let t = CompiledTape::<f64>::compile(&e, None).unwrap();
        let x = Symbol::new("x");
        for v in [-1.0, -0.3, 0.0, 0.7, 1.9] {
            let a = t.eval_scalar(&[v]).unwrap();
            let b = eval_tree_at(&e, std::slice::from_ref(&x), &[v]).unwrap();
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn fused_and_shared_subexpressions() {
        let e = parse("3*log(exp(a + 2*b)/(1 + exp(a + 2*b))) + 5*log(1 - exp(a + 2*b)/(1 + exp(a + 2*b))) + a*b + 7 - b").unwrap();
        let t = CompiledTape::<f64>::compile(&e, None).unwrap();
        let params = t.params().to_vec();
        let mut stack = vec![f64::NAN; 64];
        let mut out = [0.0];
        for (a, b) in [(0.3, -0.2), (-1.5, 0.7), (2.0, -1.1)] {
            t.eval_into(&[a, b], &mut stack, &mut out).unwrap();
            let expected = eval_tree_at(&e, &params, &[a, b]).unwrap();
            assert!((out[0] - expected).abs() <= 1e-12 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn high_powers_and_negative_powers() {
        let e = parse("x^12 + x^-3 + y^-9 + x^(1/3)").unwrap();
        let t = CompiledTape::<f64>::compile(&e, None).unwrap();
        let v = t.eval_scalar(&[1.5, 0.5]).unwrap();
        let expected = 1.5f64.powi(12) + 1.5f64.powi(-3) + 0.5f64.powi(-9) + 1.5f64.powf(1.0 / 3.0);
        assert!((v - expected).abs() < 1e-12 * expected);
        assert_eq!(t.eval_scalar(&[-1.0, 0.5]), Err(EvalError::Domain("pow")));
    }

    #[test]
    fn constants_and_arity() {
        let t = CompiledTape::<f64>::compile(&parse("5").unwrap(), None).unwrap();
        assert_eq!(t.eval(&[]).unwrap(), vec![5.0]);
        assert!(matches!(t.eval(&[1.0]), Err(EvalError::Arity { expected: 0, got: 1 })));
        let t = CompiledTape::<f32>::compile(&parse("x/3").unwrap(), None).unwrap();
        assert!((t.eval_scalar(&[1.0]).unwrap() - 1.0 / 3.0).abs() < 1e-7);
    }

    #[test]
    fn domain_errors_are_tagged() {
        let t = CompiledTape::<f64>::compile(&parse("log(x) + sqrt(y)").unwrap(), None).unwrap();
        assert_eq!(t.eval(&[0.0, 1.0]), Err(EvalError::Domain("log")));
        assert_eq!(t.eval(&[1.0, -1.0]), Err(EvalError::Domain("sqrt")));
        let u = CompiledTape::<f64>::compile(&parse("1/x").unwrap(), None).unwrap();
        assert!(u.eval_scalar(&[0.0]).unwrap().is_infinite());
    }

    #[test]
    fn unbound_symbol() {
        let x = Symbol::new("x");
        let r = CompiledTape::<f64>::compile(&parse("x + y").unwrap(), Some(&[x]));
        assert_eq!(r.unwrap_err(), CompileError::UnboundSymbol(Symbol::new("y")));
    }

    #[test]
    fn packed_and_unpacked_agree() {
        let t = CompiledTape::<f64>::compile(&parse("a - 2*b").unwrap(), None).unwrap();
        assert_eq!(t.eval_with(&[1.0, 2.0], true).unwrap(), t.eval_with(&[1.0, 2.0], false).unwrap());
        assert_eq!(t.eval_unpacked(&[&[1.0], &[2.0]]).unwrap(), vec![-3.0]);
    }

    #[test]
    fn finite_differences() {
        let t = CompiledTape::<f64>::compile(&parse("-(x - 3)^2").unwrap(), None).unwrap();
        assert!(finite_diff_gradient(&t, &[3.0], 1e-5).unwrap()[0].abs() < 1e-7);
        let h = finite_diff_hessian(&t, &[1.0], 1e-4).unwrap();
        assert!((h[0][0] + 2.0).abs() < 1e-5);
        let c = CompiledTape::<f64>::compile(&parse("7").unwrap(), Some(&[Symbol::new("x"), Symbol::new("y")])).unwrap();
        assert_eq!(finite_diff_gradient(&c, &[0.3, 0.4], 1e-5).unwrap(), vec![0.0, 0.0]);
    }
}

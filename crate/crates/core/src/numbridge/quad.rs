//! Globally adaptive 7/15-point Gauss–Kronrod quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::tape::{CompiledTape, EvalError};
use crate::scalar::Scalar;

/// Subinterval budget before giving up.
pub const MAX_INTERVALS: usize = 4000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadError {
    #[error("integrand must have exactly one parameter, tape has {0}")]
    NotUnivariate(usize),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("integrand is not finite at {0}")]
    NonFinite(f64),
    #[error("no convergence after {intervals} subintervals (estimate {estimate}, error {error})")]
    NonConvergence { intervals: usize, estimate: f64, error: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<S> {
    pub value: S,
    pub error: S,
    pub intervals: usize,
}

struct Piece<S> {
    lo: S,
    hi: S,
    value: S,
    error: S,
}

impl<S: Scalar> PartialEq for Piece<S> {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl<S: Scalar> Eq for Piece<S> {}
impl<S: Scalar> PartialOrd for Piece<S> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<S: Scalar> Ord for Piece<S> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.partial_cmp(&o.error).unwrap_or(Ordering::Equal)
    }
}

fn kronrod<S: Scalar>(f: &mut dyn FnMut(S) -> Result<S, QuadError>, lo: S, hi: S) -> Result<Piece<S>, QuadError> {
    let two = S::lit(2.0);
    let c = (lo + hi) / two;
    let r = (hi - lo) / two;
    let fc = f(c)?;
    let mut k = fc * S::lit(WGK[7]);
    let mut g = fc * S::lit(WG[3]);
    for (i, &x) in XGK[..7].iter().enumerate() {
        let dx = r * S::lit(x);
        let pair = f(c - dx)? + f(c + dx)?;
        k = k + pair * S::lit(WGK[i]);
        if i % 2 == 1 {
            g = g + pair * S::lit(WG[i / 2]);
        }
    }
    Ok(Piece { lo, hi, value: k * r, error: ((k - g) * r).abs() })
}

/// Integrates `f` over `[lo, hi]` until the summed error estimate drops below
/// `tol`, always splitting the worst subinterval.
pub fn integrate_fn<S: Scalar>(
    mut f: impl FnMut(S) -> Result<S, EvalError>,
    lo: S,
    hi: S,
    tol: S,
) -> Result<QuadResult<S>, QuadError> {
    let mut g = |x: S| -> Result<S, QuadError> {
        let v = f(x)?;
        if !v.is_finite() {
            return Err(QuadError::NonFinite(x.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(v)
    };
    if lo == hi {
        return Ok(QuadResult { value: S::zero(), error: S::zero(), intervals: 0 });
    }
    let mut heap = BinaryHeap::new();
    let first = kronrod(&mut g, lo, hi)?;
    let (mut value, mut error) = (first.value, first.error);
    heap.push(first);
    while error > tol {
        if heap.len() >= MAX_INTERVALS {
            return Err(QuadError::NonConvergence {
                intervals: heap.len(),
                estimate: value.to_f64().unwrap_or(f64::NAN),
                error: error.to_f64().unwrap_or(f64::NAN),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = (worst.lo + worst.hi) / S::lit(2.0);
        let a = kronrod(&mut g, worst.lo, mid)?;
        let b = kronrod(&mut g, mid, worst.hi)?;
        value = value - worst.value + a.value + b.value;
        error = error - worst.error + a.error + b.error;
        heap.push(a);
        heap.push(b);
        // guard against drift in the running sums
        if heap.len() % 64 == 0 {
            value = heap.iter().fold(S::zero(), |s, p| s + p.value);
            error = heap.iter().fold(S::zero(), |s, p| s + p.error);
        }
    }
    let value = heap.iter().fold(S::zero(), |s, p| s + p.value);
    Ok(QuadResult { value, error, intervals: heap.len() })
}

/// Definite integral of a single-parameter tape.
pub fn quadrature<S: Scalar>(tape: &CompiledTape<S>, lo: S, hi: S, tol: S) -> Result<QuadResult<S>, QuadError> {
    if tape.arity() != 1 || tape.outputs() != 1 {
        return Err(QuadError::NotUnivariate(tape.arity()));
    }
    let mut stack = Vec::new();
    let mut out = [S::zero()];
    integrate_fn(
        |x| {
            tape.eval_into(&[x], &mut stack, &mut out)?;
            Ok(out[0])
        },
        lo,
        hi,
        tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Symbol};

    fn tape(s: &str) -> CompiledTape<f64> {
        CompiledTape::compile(&parse(s).unwrap(), Some(&[Symbol::new("x")])).unwrap()
    }

    #[test]
    fn half_disc() {
        let r = quadrature(&tape("sqrt(1 - x^2)"), -1.0, 1.0, 1e-10).unwrap();
        assert!((r.value - std::f64::consts::FRAC_PI_2).abs() < 1e-8);
    }

    #[test]
    fn polynomials_are_exact() {
        let r = quadrature(&tape("x^2"), 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-14);
        assert_eq!(r.intervals, 1);
        assert_eq!(quadrature(&tape("0"), 0.0, 1.0, 1e-12).unwrap().value, 0.0);
        let back = quadrature(&tape("x^2"), 1.0, 0.0, 1e-12).unwrap();
        assert!((back.value + 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn failures() {
        assert!(matches!(quadrature(&tape("log(x)"), -1.0, 1.0, 1e-8), Err(QuadError::Eval(_))));
        let two = CompiledTape::<f64>::compile(&parse("x*y").unwrap(), None).unwrap();
        assert_eq!(quadrature(&two, 0.0, 1.0, 1e-8).unwrap_err(), QuadError::NotUnivariate(2));
        let r = integrate_fn(|x: f64| Ok((1.0 / x).sin()), 1e-12, 1.0, 1e-15);
        assert!(matches!(r, Err(QuadError::NonConvergence { .. })));
    }
}

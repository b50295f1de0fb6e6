use super::nelder_mead::minimize;
use super::newton::{newton_core, Model};
use super::{
    max_norm, numeric_information, observed_information, FitResult, Method, NelderMeadOptions, NewtonOptions,
    OptimizeError,
};
use crate::numbridge::{finite_diff_gradient, CompiledTape, EvalError, Objective};
use crate::scalar::Scalar;

/// Bounds on a single parameter. Both ends are exclusive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds<S> {
    pub lower: Option<S>,
    pub upper: Option<S>,
}

impl<S: Scalar> Bounds<S> {
    pub fn free() -> Self {
        Bounds { lower: None, upper: None }
    }

    pub fn open(lower: S, upper: S) -> Self {
        Bounds { lower: Some(lower), upper: Some(upper) }
    }

    pub fn above(lower: S) -> Self {
        Bounds { lower: Some(lower), upper: None }
    }

    pub fn below(upper: S) -> Self {
        Bounds { lower: None, upper: Some(upper) }
    }

    pub fn contains(&self, x: S) -> bool {
        x.is_finite() && self.lower.is_none_or(|l| x > l) && self.upper.is_none_or(|u| x < u)
    }

    /// Distance from `x` to the nearest finite bound, or infinity.
    fn margin(&self, x: S) -> S {
        let lo = self.lower.map_or(S::infinity(), |l| x - l);
        let hi = self.upper.map_or(S::infinity(), |u| u - x);
        lo.min(hi)
    }
}

/// Smooth map from unconstrained `z` onto a box: a scaled logistic between
/// two bounds, `lo + e^z` or `hi - e^z` for a single bound, identity for a
/// free parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxTransform<S> {
    bounds: Vec<Bounds<S>>,
    zmax: S,
}

impl<S: Scalar> BoxTransform<S> {
    pub fn new(bounds: Vec<Bounds<S>>) -> Result<Self, OptimizeError> {
        for (i, b) in bounds.iter().enumerate() {
            let bad = |v: Option<S>| v.is_some_and(|v| !v.is_finite());
            if bad(b.lower) || bad(b.upper) || matches!((b.lower, b.upper), (Some(l), Some(u)) if l >= u) {
                return Err(OptimizeError::Mismatch(format!("parameter {i} has an empty or non-finite box")));
            }
        }
        // keeps the logistic away from rounding onto its asymptotes
        let zmax = -S::lit(0.5) * S::epsilon().ln();
        Ok(BoxTransform { bounds, zmax })
    }

    pub fn bounds(&self) -> &[Bounds<S>] {
        &self.bounds
    }

    pub fn len(&self) -> usize {
        self.bounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_empty()
    }

    pub fn contains(&self, x: &[S]) -> bool {
        x.len() == self.bounds.len() && self.bounds.iter().zip(x).all(|(b, v)| b.contains(*v))
    }

    fn sigmoid(&self, z: S) -> S {
        let z = z.max(-self.zmax).min(self.zmax);
        S::one() / (S::one() + (-z).exp())
    }

    fn exp_clamped(z: S) -> S {
        let lim = S::max_value().ln() - S::one();
        z.min(lim).exp()
    }

    /// The point in the box for `z`. Coordinates that round onto a bound
    /// are reported as `None`.
    pub fn to_box(&self, z: &[S]) -> Option<Vec<S>> {
        let x: Vec<S> = self
            .bounds
            .iter()
            .zip(z)
            .map(|(b, &z)| match (b.lower, b.upper) {
                (Some(l), Some(u)) => l + (u - l) * self.sigmoid(z),
                (Some(l), None) => l + Self::exp_clamped(z),
                (None, Some(u)) => u - Self::exp_clamped(z),
                (None, None) => z,
            })
            .collect();
        self.contains(&x).then_some(x)
    }

    /// Inverse of [`to_box`](Self::to_box); the point must be strictly inside.
    pub fn from_box(&self, x: &[S]) -> Result<Vec<S>, OptimizeError> {
        if x.len() != self.bounds.len() {
            return Err(OptimizeError::Mismatch(format!("{} values for {} bounds", x.len(), self.bounds.len())));
        }
        self.bounds
            .iter()
            .zip(x)
            .enumerate()
            .map(|(index, (b, &x))| {
                if !b.contains(x) {
                    return Err(OptimizeError::OutsideBox { index });
                }
                Ok(match (b.lower, b.upper) {
                    (Some(l), Some(u)) => {
                        let p = (x - l) / (u - l);
                        (p / (S::one() - p)).ln()
                    }
                    (Some(l), None) => (x - l).ln(),
                    (None, Some(u)) => (u - x).ln(),
                    (None, None) => x,
                })
            })
            .collect()
    }

    /// First and second derivatives of each coordinate map at `z`.
    fn derivatives(&self, z: &[S]) -> Vec<(S, S)> {
        let two = S::lit(2.0);
        self.bounds
            .iter()
            .zip(z)
            .map(|(b, &z)| match (b.lower, b.upper) {
                (Some(l), Some(u)) => {
                    let s = self.sigmoid(z);
                    let d = (u - l) * s * (S::one() - s);
                    (d, d * (S::one() - two * s))
                }
                (Some(_), None) => {
                    let e = Self::exp_clamped(z);
                    (e, e)
                }
                (None, Some(_)) => {
                    let e = Self::exp_clamped(z);
                    (-e, -e)
                }
                (None, None) => (S::one(), S::zero()),
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub enum BoundedMethod<'a, S> {
    NelderMead(NelderMeadOptions<S>),
    /// Newton–Raphson in the unconstrained coordinates, using the chain rule
    /// on score and Hessian tapes for the original parameters.
    Newton { score: &'a CompiledTape<S>, hessian: &'a CompiledTape<S>, opts: NewtonOptions<S> },
}

struct Transformed<'a, S, F: ?Sized> {
    objective: &'a F,
    score: &'a CompiledTape<S>,
    hessian: &'a CompiledTape<S>,
    transform: &'a BoxTransform<S>,
}

impl<S: Scalar, F: Objective<S> + ?Sized> Transformed<'_, S, F> {
    fn point(&self, z: &[S]) -> Result<Vec<S>, EvalError> {
        self.transform.to_box(z).ok_or(EvalError::Domain("outside the parameter box"))
    }
}

impl<S: Scalar, F: Objective<S> + ?Sized> Model<S> for Transformed<'_, S, F> {
    fn score(&self, z: &[S]) -> Result<Vec<S>, EvalError> {
        let g = self.score.eval(&self.point(z)?)?;
        Ok(self.transform.derivatives(z).iter().zip(&g).map(|((d, _), g)| *d * *g).collect())
    }

    fn hessian(&self, z: &[S]) -> Result<Vec<Vec<S>>, EvalError> {
        let x = self.point(z)?;
        let n = x.len();
        let g = self.score.eval(&x)?;
        let h = self.hessian.eval(&x)?;
        let d = self.transform.derivatives(z);
        Ok((0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let v = d[i].0 * h[i * n + j] * d[j].0;
                        if i == j {
                            v + g[i] * d[i].1
                        } else {
                            v
                        }
                    })
                    .collect()
            })
            .collect())
    }

    fn value(&self, z: &[S]) -> Option<S> {
        Some(match self.point(z).and_then(|x| self.objective.value(&x)) {
            Ok(v) if v.is_finite() => v,
            _ => S::neg_infinity(),
        })
    }
}

/// Maximizes `objective` over an open box by optimizing in unconstrained
/// coordinates. The objective is only ever evaluated strictly inside the box
/// and the result is reported in the original coordinates.
pub fn maximize_bounded<S: Scalar, F: Objective<S> + ?Sized>(
    objective: &F,
    transform: &BoxTransform<S>,
    start: &[S],
    method: BoundedMethod<'_, S>,
) -> Result<FitResult<S>, OptimizeError> {
    let n = objective.arity();
    if transform.len() != n {
        return Err(OptimizeError::Mismatch(format!("{} bounds for {n} parameters", transform.len())));
    }
    let z0 = transform.from_box(start)?;
    if !objective.value(start)?.is_finite() {
        return Err(OptimizeError::NonFiniteStart);
    }
    let (x, iterations, converged, method_tag, newton_tapes) = match method {
        BoundedMethod::NelderMead(opts) => {
            let m = minimize(
                |z| match transform.to_box(z).map(|x| objective.value(&x)) {
                    Some(Ok(v)) => -v,
                    _ => S::infinity(),
                },
                &z0,
                &opts,
            );
            let x = transform.to_box(&m.x).ok_or(OptimizeError::OutsideBox { index: 0 })?;
            (x, m.iterations, m.converged, Method::NelderMead, None)
        }
        BoundedMethod::Newton { score, hessian, opts } => {
            if score.arity() != n || score.outputs() != n || hessian.params() != score.params() || hessian.shape() != (n, n) {
                return Err(OptimizeError::Mismatch("score or Hessian tapes do not fit the objective".into()));
            }
            let model = Transformed { objective, score, hessian, transform };
            let it = newton_core(&model, &z0, &opts)?;
            let x = model.point(&it.x)?;
            (x, it.iterations, it.converged, Method::NewtonRaphson, Some((score, hessian)))
        }
    };
    let (grad_norm, information) = match newton_tapes {
        Some((score, hessian)) => (max_norm(&score.eval(&x)?), observed_information(hessian, &x)?),
        None => {
            // central differences must stay inside the box; the diagonal
            // terms step by 2h
            let margin = transform.bounds().iter().zip(&x).fold(S::infinity(), |m, (b, v)| m.min(b.margin(*v)));
            let h = S::lit(1e-4).min(margin / S::lit(4.0));
            let g = finite_diff_gradient(objective, &x, h.min(S::lit(1e-6)))?;
            (max_norm(&g), numeric_information(objective, &x, h)?)
        }
    };
    Ok(FitResult {
        objective: objective.value(&x)?,
        estimates: x,
        grad_norm,
        information,
        iterations,
        converged,
        method: method_tag,
    })
}

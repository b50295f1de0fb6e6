//! Maximization of compiled objectives: damped Newton–Raphson on symbolic
//! score and Hessian tapes, Nelder–Mead, and box constraints by smooth
//! reparameterization.

mod bounded;
mod nelder_mead;
mod newton;

use crate::numbridge::{finite_diff_hessian, CompiledTape, EvalError, Objective};
use crate::scalar::Scalar;

pub use bounded::{maximize_bounded, BoundedMethod, BoxTransform, Bounds};
pub use nelder_mead::{nelder_mead_max, NelderMeadOptions};
pub use newton::{newton_raphson, NewtonOptions, NewtonProblem};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OptimizeError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("objective is not finite at the starting point")]
    NonFiniteStart,
    #[error("Hessian is singular at iteration {0}")]
    SingularHessian(usize),
    #[error("parameter {index} starts on or outside its bounds")]
    OutsideBox { index: usize },
    #[error("tapes disagree on parameters: {0}")]
    Mismatch(String),
    #[error("Hessian is not symmetric (entry ({0}, {1}))")]
    Asymmetric(usize, usize),
    #[error("observed information has non-finite entries")]
    NonFiniteInformation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    NewtonRaphson,
    NelderMead,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult<S> {
    /// Estimates in the parameter order of the tapes.
    pub estimates: Vec<S>,
    pub objective: S,
    /// Max-norm of the gradient at the estimate (symbolic score for Newton,
    /// central differences otherwise).
    pub grad_norm: S,
    /// Observed information, the negated Hessian at the estimate.
    pub information: Vec<Vec<S>>,
    pub iterations: usize,
    pub converged: bool,
    pub method: Method,
}

impl<S: Scalar> FitResult<S> {
    /// Square roots of the diagonal of the inverse information; `None`
    /// unless the information is positive definite.
    pub fn standard_errors(&self) -> Option<Vec<S>> {
        if !is_positive_definite(&self.information) {
            return None;
        }
        let n = self.information.len();
        (0..n)
            .map(|i| {
                let mut e = vec![S::zero(); n];
                e[i] = S::one();
                solve_dense(self.information.clone(), e).map(|col| col[i].sqrt())
            })
            .collect()
    }
}

/// `-H` evaluated at a point, checked for symmetry and finiteness.
pub fn observed_information<S: Scalar>(hessian: &CompiledTape<S>, at: &[S]) -> Result<Vec<Vec<S>>, OptimizeError> {
    let (r, c) = hessian.shape();
    if r != c {
        return Err(OptimizeError::Mismatch(format!("Hessian tape has shape {r}x{c}")));
    }
    let h = hessian.eval(at)?;
    let info: Vec<Vec<S>> = (0..r).map(|i| (0..r).map(|j| -h[i * r + j]).collect()).collect();
    check_information(&info)?;
    Ok(info)
}

fn check_information<S: Scalar>(info: &[Vec<S>]) -> Result<(), OptimizeError> {
    let tol = S::lit(1e-10);
    for (i, row) in info.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(OptimizeError::NonFiniteInformation);
            }
            let w = info[j][i];
            if (*v - w).abs() > tol * v.abs().max(w.abs()).max(S::one()) {
                return Err(OptimizeError::Asymmetric(i, j));
            }
        }
    }
    Ok(())
}

/// Negated central-difference Hessian of the objective, symmetrized.
pub(crate) fn numeric_information<S: Scalar, F: Objective<S> + ?Sized>(
    objective: &F,
    at: &[S],
    h: S,
) -> Result<Vec<Vec<S>>, OptimizeError> {
    let hess = finite_diff_hessian(objective, at, h)?;
    let info: Vec<Vec<S>> = hess.into_iter().map(|row| row.into_iter().map(|v| -v).collect()).collect();
    if info.iter().flatten().any(|v| !v.is_finite()) {
        return Err(OptimizeError::NonFiniteInformation);
    }
    Ok(info)
}

pub(crate) fn max_norm<S: Scalar>(v: &[S]) -> S {
    v.iter().fold(S::zero(), |m, x| m.max(x.abs()))
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting; `None`
/// when a pivot vanishes.
pub(crate) fn solve_dense<S: Scalar>(mut a: Vec<Vec<S>>, mut b: Vec<S>) -> Option<Vec<S>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(S::zero(), |m, x| m.max(x.abs()));
    let tiny = scale * S::epsilon() * S::lit(n as f64);
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().partial_cmp(&a[j][k].abs()).unwrap_or(std::cmp::Ordering::Equal))?;
        if !(a[p][k].abs() > tiny) {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                let v = a[k][j];
                a[i][j] = a[i][j] - f * v;
            }
            b[i] = b[i] - f * b[k];
        }
    }
    let mut x = vec![S::zero(); n];
    for i in (0..n).rev() {
        let s = (i + 1..n).fold(b[i], |s, j| s - a[i][j] * x[j]);
        x[i] = s / a[i][i];
    }
    Some(x)
}

/// Leading principal minors of a symmetric matrix are all positive.
pub fn is_positive_definite<S: Scalar>(m: &[Vec<S>]) -> bool {
    let n = m.len();
    // Cholesky succeeds exactly when every leading minor is positive
    let mut l = vec![vec![S::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s = (0..j).fold(m[i][j], |s, k| s - l[i][k] * l[j][k]);
            if i == j {
                if !(s > S::zero()) {
                    return false;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    true
}

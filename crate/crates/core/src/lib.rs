//! Exact symbolic algebra for statistical derivations, with a compiled
//! numeric layer for fitting the resulting likelihoods.
//!
//! Expressions, matrices, simplification, calculus and equation solving are
//! exact over arbitrary-precision rationals. Compiled tapes, quadrature and
//! the optimizers are generic over `f32`/`f64`.

pub mod calculus;
pub mod expr;
pub mod numbridge;
pub mod optimize;
pub mod poly;
pub mod rational;
pub mod ratfunc;
pub mod scalar;
pub mod simplify;
pub mod solve;
pub mod symmat;

pub use expr::{parse, Expr, Symbol};
pub use scalar::Scalar;
pub use symmat::SymMatrix;

/// Tape over `f64`, the default numeric precision.
pub type Tape = numbridge::CompiledTape<f64>;
/// Tape over `f32`.
pub type Tape32 = numbridge::CompiledTape<f32>;
/// Fit result over `f64`.
pub type Fit = optimize::FitResult<f64>;
/// Fit result over `f32`.
pub type Fit32 = optimize::FitResult<f32>;

/// Any error raised by this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] expr::ParseError),
    #[error(transparent)]
    Substitute(#[from] expr::SubstituteError),
    #[error(transparent)]
    Simplify(#[from] simplify::SimplifyError),
    #[error(transparent)]
    Calculus(#[from] calculus::CalculusError),
    #[error(transparent)]
    Matrix(#[from] symmat::SymMatError),
    #[error(transparent)]
    Solve(#[from] solve::SolveError),
    #[error(transparent)]
    Compile(#[from] numbridge::CompileError),
    #[error(transparent)]
    Eval(#[from] numbridge::EvalError),
    #[error(transparent)]
    Quadrature(#[from] numbridge::QuadError),
    #[error(transparent)]
    Optimize(#[from] optimize::OptimizeError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

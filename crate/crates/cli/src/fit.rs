use symstat_core::calculus::{hessian, score};
use symstat_core::numbridge::CompiledTape;
use symstat_core::optimize::{
    maximize_bounded, nelder_mead_max, newton_raphson, BoundedMethod, Bounds, BoxTransform, NelderMeadOptions,
    NewtonOptions, NewtonProblem,
};
use symstat_core::simplify::simplify;
use symstat_core::solve::{isolate, Equation};
use symstat_core::{Expr, Fit, Symbol, SymMatrix};

use crate::dataset::{exact, DataError, Dataset};
use crate::report::FitSummary;

/// Name given to the column of ones when an intercept is added.
pub const INTERCEPT: &str = "(Intercept)";
/// Box for the AR(1) fit: `|a| < 1 - EPS`, `EPS < v < 10`.
pub const AR1_EPS: f64 = 0.01;
pub const AR1_V_MAX: f64 = 10.0;

#[derive(Debug, thiserror::Error)]
pub enum FitError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Core(#[from] symstat_core::Error),
    #[error("no rows to fit")]
    Empty,
    #[error("no predictors; name some columns or keep the intercept")]
    NoPredictors,
    #[error("row {row}: need trials >= events >= 0, got {events} events in {trials} trials")]
    BadCounts { row: usize, events: f64, trials: f64 },
    #[error("no maximum found after {iterations} iterations (estimates drift to {estimates:?}); the data may be separated")]
    Separation { iterations: usize, estimates: Vec<f64> },
    #[error("series needs at least 3 values, got {0}")]
    TooShort(usize),
    #[error("series is constant, so its likelihood is degenerate")]
    Constant,
}

fn core<E: Into<symstat_core::Error>>(e: E) -> FitError {
    FitError::Core(e.into())
}

/// Columns that make up a binomial logistic regression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogisticSpec {
    pub events: String,
    pub trials: String,
    pub predictors: Vec<String>,
    /// Prepend a column of ones named [`INTERCEPT`].
    pub intercept: bool,
}

#[derive(Clone, Debug)]
pub struct LogisticFit {
    /// Predictor names, in parameter order.
    pub names: Vec<String>,
    /// Regression coefficients `b_1, ..., b_q`.
    pub params: Vec<Symbol>,
    pub loglik: Expr,
    pub fit: Fit,
}

impl LogisticFit {
    pub fn summary(&self) -> FitSummary {
        summarize("logistic", &self.names, &self.fit)
    }
}

#[derive(Clone, Debug)]
pub struct Ar1Fit {
    pub params: Vec<Symbol>,
    pub loglik: Expr,
    pub fit: Fit,
}

impl Ar1Fit {
    pub fn summary(&self) -> FitSummary {
        summarize("ar1", &["a".to_string(), "v".to_string()], &self.fit)
    }
}

pub fn summarize(model: &str, names: &[String], fit: &Fit) -> FitSummary {
    FitSummary {
        model: model.to_string(),
        params: names.iter().cloned().zip(fit.estimates.iter().copied()).collect(),
        std_errors: fit.standard_errors(),
        loglik: fit.objective,
        grad_norm: fit.grad_norm,
        info: fit.information.clone(),
        method: fit.method,
        iterations: fit.iterations,
        converged: fit.converged,
    }
}

/// `p` in terms of the linear predictor `s`, by solving `log(p/(1-p)) = s`.
pub fn inverse_logit() -> Expr {
    let p = Symbol::new("p");
    let eq = Equation::new(Expr::parse("log(p/(1 - p))").expect("literal parses"), Expr::sym("s"));
    let set = isolate(&eq, &p).expect("the logit inverts in closed form");
    set.values_of(&p).swap_remove(0)
}

/// Per-observation log-likelihood `y log p + (n - y) log(1 - p)` with
/// `p = p(s)` and `s = x . b`, in terms of `x_j`, `b_j`, `y`, `n`.
pub fn logistic_term(q: usize) -> Expr {
    let b = SymMatrix::vector_sym(q, "b");
    let x = SymMatrix::vector_sym(q, "x");
    let s = x.hadamard(&b).expect("same shape").sum();
    let p = inverse_logit().subs1(&Symbol::new("s"), &s);
    Expr::parse("y*log(p) + (n - y)*log(1 - p)").expect("literal parses").subs1(&Symbol::new("p"), &p)
}

/// Total log-likelihood with each row's data substituted.
pub fn logistic_loglik(design: &[Vec<f64>], events: &[f64], trials: &[f64]) -> Expr {
    let q = design.first().map_or(0, Vec::len);
    let term = logistic_term(q);
    Expr::add_all(design.iter().zip(events).zip(trials).map(|((x, y), n)| {
        let mut bind: std::collections::BTreeMap<Symbol, Expr> =
            x.iter().enumerate().map(|(j, v)| (Symbol::new(&format!("x_{}", j + 1)), Expr::num(exact(*v)))).collect();
        bind.insert(Symbol::new("y"), Expr::num(exact(*y)));
        bind.insert(Symbol::new("n"), Expr::num(exact(*n)));
        term.subs(&bind)
    }))
}

pub fn fit_logistic(data: &Dataset, spec: &LogisticSpec) -> Result<LogisticFit, FitError> {
    if data.is_empty() {
        return Err(FitError::Empty);
    }
    let mut names: Vec<String> = Vec::new();
    let mut cols: Vec<Vec<f64>> = Vec::new();
    if spec.intercept {
        names.push(INTERCEPT.to_string());
        cols.push(vec![1.0; data.len()]);
    }
    for p in &spec.predictors {
        cols.push(data.column(p)?);
        names.push(p.clone());
    }
    if names.is_empty() {
        return Err(FitError::NoPredictors);
    }
    let events = data.column(&spec.events)?;
    let trials = data.column(&spec.trials)?;
    for (i, (y, n)) in events.iter().zip(&trials).enumerate() {
        if !(*y >= 0.0 && n >= y) {
            return Err(FitError::BadCounts { row: i + 1, events: *y, trials: *n });
        }
    }
    let design: Vec<Vec<f64>> = (0..data.len()).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    let loglik = logistic_loglik(&design, &events, &trials);
    let params: Vec<Symbol> = (1..=names.len()).map(|j| Symbol::new(&format!("b_{j}"))).collect();
    let fit = maximize(&loglik, &params, &vec![0.0; params.len()])?;
    if separated(&design, &trials, &fit.estimates) {
        return Err(FitError::Separation { iterations: fit.iterations, estimates: fit.estimates });
    }
    Ok(LogisticFit { names, params, loglik, fit })
}

/// Every fitted probability numerically 0 or 1: the score vanishes only
/// because the estimates ran off towards infinity.
fn separated(design: &[Vec<f64>], trials: &[f64], b: &[f64]) -> bool {
    let weight: f64 = design
        .iter()
        .zip(trials)
        .map(|(x, n)| {
            let s: f64 = x.iter().zip(b).map(|(x, b)| x * b).sum();
            let p = 1.0 / (1.0 + (-s).exp());
            n * p * (1.0 - p)
        })
        .sum();
    weight < 1e-6 * trials.iter().sum::<f64>()
}

/// Applies each transform and renames matching predictors, so that
/// `dose` with `log2:dose` refers to the transformed column.
pub fn apply_transforms(data: &mut Dataset, transforms: &[String], predictors: &mut [String]) -> Result<(), DataError> {
    for t in transforms {
        let (old, new) = data.transform(t)?;
        for p in predictors.iter_mut().filter(|p| **p == old) {
            *p = new.clone();
        }
    }
    Ok(())
}

/// Newton–Raphson on compiled score and Hessian, falling back to
/// Nelder–Mead when Newton fails or stalls.
pub fn maximize(loglik: &Expr, params: &[Symbol], start: &[f64]) -> Result<Fit, FitError> {
    let obj = CompiledTape::<f64>::compile(loglik, Some(params)).map_err(core)?;
    let sc = CompiledTape::<f64>::compile_matrix(&score(loglik, params), Some(params)).map_err(core)?;
    let he = CompiledTape::<f64>::compile_matrix(&hessian(loglik, params), Some(params)).map_err(core)?;
    let problem = NewtonProblem { score: &sc, hessian: &he, objective: Some(&obj) };
    let newton = newton_raphson(&problem, start, &NewtonOptions::default());
    let fit = match newton {
        Ok(f) if settled(&f) => f,
        _ => nelder_mead_max(&obj, start, &NelderMeadOptions::default()).map_err(core)?,
    };
    if !settled(&fit) {
        return Err(FitError::Separation { iterations: fit.iterations, estimates: fit.estimates });
    }
    Ok(fit)
}

fn settled(f: &Fit) -> bool {
    f.converged && f.estimates.iter().all(|v| v.is_finite()) && f.standard_errors().is_some()
}

/// `log det K - x'Kx` for a stationary AR(1) series, where `K = L'L / v`
/// and `L` is the differencing matrix with `sqrt(1 - a^2)` in the corner.
///
/// `L` is lower triangular, so `det K = (1 - a^2) / v^n` comes from its
/// diagonal and the quadratic form is `|L x|^2 / v`.
pub fn ar1_loglik(series: &[f64]) -> Result<Expr, FitError> {
    let n = series.len();
    if n < 3 {
        return Err(FitError::TooShort(n));
    }
    if series.iter().all(|v| *v == series[0]) {
        return Err(FitError::Constant);
    }
    let l = SymMatrix::diff_mat(n, &Expr::parse("-a").expect("literal parses"), Some(Expr::parse("sqrt(1 - a^2)").expect("literal parses")));
    let v = Expr::sym("v");
    let det_l = Expr::mul_all((0..n).map(|i| l.get(i, i).clone()));
    let log_det = simplify(&(det_l.powi(2) / v.powi(n as i64))).log();
    let x = SymMatrix::column(series.iter().map(|s| Expr::num(exact(*s))).collect());
    let lx = l.matmul(&x).map_err(core)?;
    let quad = simplify(&(lx.hadamard(&lx).map_err(core)?.sum() / v));
    Ok(log_det - quad)
}

pub fn fit_ar1(series: &[f64]) -> Result<Ar1Fit, FitError> {
    let loglik = ar1_loglik(series)?;
    let params = vec![Symbol::new("a"), Symbol::new("v")];
    let obj = CompiledTape::<f64>::compile(&loglik, Some(&params)).map_err(core)?;
    let sc = CompiledTape::<f64>::compile_matrix(&score(&loglik, &params), Some(&params)).map_err(core)?;
    let he = CompiledTape::<f64>::compile_matrix(&hessian(&loglik, &params), Some(&params)).map_err(core)?;
    let bx = BoxTransform::new(vec![Bounds::open(-1.0 + AR1_EPS, 1.0 - AR1_EPS), Bounds::open(AR1_EPS, AR1_V_MAX)])
        .map_err(core)?;
    let mean_sq = series.iter().map(|x| x * x).sum::<f64>() / series.len() as f64;
    let start = [0.0, mean_sq.clamp(2.0 * AR1_EPS, AR1_V_MAX - 0.5)];
    let newton = BoundedMethod::Newton { score: &sc, hessian: &he, opts: NewtonOptions::default() };
    let fit = match maximize_bounded(&obj, &bx, &start, newton) {
        Ok(f) if f.converged => f,
        _ => maximize_bounded(&obj, &bx, &start, BoundedMethod::NelderMead(NelderMeadOptions::default()))
            .map_err(core)?,
    };
    Ok(Ar1Fit { params, loglik, fit })
}

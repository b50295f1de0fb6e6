use symstat_core::calculus::{derivative, derivative_n, limit, sum_closed_form, Direction, HeldForm, LimitPoint, LimitValue};
use symstat_core::expr::LatexOptions;
use symstat_core::numbridge::{eval_tree, quadrature, CompiledTape};
use symstat_core::optimize::{nelder_mead_max, NelderMeadOptions};
use symstat_core::simplify::{factor, factor_univariate, simplify};
use symstat_core::solve::{isolate, solve_linear, solve_system, Equation, EquationSystem};
use symstat_core::symmat::factor_out_scalar;
use symstat_core::{Expr, Scalar, Symbol, SymMatrix};

use crate::dataset::{DataError, Dataset};
use crate::fit::{self, inverse_logit, logistic_term, FitError, LogisticSpec};
use crate::report::{Block, Report, Table};

pub const DEMOS: [&str; 6] = ["calculus", "anova", "logistic", "lagrange", "ar1", "variance-avg"];

#[derive(Debug, thiserror::Error)]
pub enum DemoError {
    #[error("unknown demo `{0}`; choose one of calculus, anova, logistic, lagrange, ar1, variance-avg")]
    Unknown(String),
    #[error(transparent)]
    Core(#[from] symstat_core::Error),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Data(#[from] DataError),
}

fn core<E: Into<symstat_core::Error>>(e: E) -> DemoError {
    DemoError::Core(e.into())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DemoOptions {
    /// Variance of an average: correlate neighbours only instead of all pairs.
    pub tridiagonal: bool,
}

pub fn demo(name: &str, opts: DemoOptions) -> Result<Report, DemoError> {
    match name {
        "calculus" => calculus(),
        "anova" => anova(),
        "logistic" => logistic(),
        "lagrange" => lagrange(),
        "ar1" => ar1(),
        "variance-avg" => variance_avg(opts.tridiagonal),
        _ => Err(DemoError::Unknown(name.to_string())),
    }
}

fn p(s: &str) -> Expr {
    Expr::parse(s).expect("demo literals parse")
}

fn formula(title: &str, e: &Expr) -> Block {
    Block::latex(title, e.to_latex(), e.to_plain())
}

fn matrix(title: &str, m: &SymMatrix) -> Block {
    Block::latex(title, m.to_latex(), m.to_plain())
}

fn number(e: &Expr) -> f64 {
    e.as_num().map(f64::from_rational).unwrap_or(f64::NAN)
}

pub const CALCULUS_POLY: &str = "1 - x^2 + x^3 + x^4/4 - 3*x^5/5 + x^6/6";

fn calculus() -> Result<Report, DemoError> {
    let mut r = Report::new("calculus");
    let x = Symbol::new("x");
    let f = p(CALCULUS_POLY);
    r.push(formula("f", &f));
    let g = derivative(&f, &x);
    r.push(formula("gradient", &g));
    r.push(formula("factored gradient", &factor_univariate(&g, &x).map_err(core)?));

    let set = solve_system(&EquationSystem::from_zeros(vec![g], vec![x.clone()]).map_err(core)?).map_err(core)?;
    let h = derivative_n(&f, &[x.clone(), x.clone()]);
    r.push(formula("hessian", &h));
    let tape = CompiledTape::<f64>::compile(&h, Some(std::slice::from_ref(&x))).map_err(core)?;
    let mut rows = Vec::new();
    let mut sols: Vec<_> = set.solutions.iter().collect();
    sols.sort_by(|a, b| a.values[&x].as_num().cmp(&b.values[&x].as_num()));
    for s in sols {
        let at = number(&s.values[&x]);
        rows.push(vec![at, s.multiplicity as f64, tape.eval_scalar(&[at]).map_err(core)?]);
    }
    r.push(Block::table("stationary points", Table::new(&["x", "multiplicity", "hessian"], rows)));

    let n = Symbol::new("n");
    let held = HeldForm::limit(p("(1 + x/n)^n"), n, LimitPoint::PosInf, Direction::Both);
    let value = held.doit().map_err(core)?;
    r.push(Block::latex("e-limit", format!("{} = {}", held.to_latex(), value.to_latex()), limit_plain(&value)));

    let body = p("sqrt(1 - x^2)");
    let area = HeldForm::integral(body.clone(), x.clone(), p("-1"), p("1"));
    r.push(Block::latex("half-disc area", area.to_latex(), "integral of sqrt(1 - x^2) over [-1, 1]".into()));
    let tape = CompiledTape::<f64>::compile(&body, Some(&[x])).map_err(core)?;
    let q = quadrature(&tape, -1.0, 1.0, 1e-10).map_err(core)?;
    let half_pi = std::f64::consts::FRAC_PI_2;
    r.push(Block::table("quadrature", Table::new(&["integral", "pi/2", "error"], vec![vec![q.value, half_pi, q.value - half_pi]])));
    Ok(r)
}

fn limit_plain(v: &LimitValue) -> String {
    match v {
        LimitValue::Finite(e) => e.to_plain(),
        LimitValue::PosInf => "oo".into(),
        LimitValue::NegInf => "-oo".into(),
    }
}

fn anova() -> Result<Report, DemoError> {
    let mut r = Report::new("anova");
    let x = SymMatrix::model_matrix_two_way(2, 2);
    r.push(Block::latex("X", x.to_latex_with(LatexOptions { zero_as_dot: true }), x.to_plain()));
    let y = SymMatrix::column(["y_11", "y_21", "y_12", "y_22"].iter().map(|s| Expr::sym(s)).collect());
    r.push(matrix("y", &y));
    let xty = x.transpose().matmul(&y).map_err(core)?.simplified();
    r.push(matrix("X'y", &xty));
    let xtx = x.crossprod();
    r.push(matrix("X'X", &xtx));
    let b = SymMatrix::vector_sym(3, "b");
    let eqs: Vec<Equation> = xtx
        .matmul(&b)
        .map_err(core)?
        .entries()
        .iter()
        .zip(xty.entries())
        .map(|(l, r)| Equation::new(l.clone(), r.clone()))
        .collect();
    let unknowns: Vec<Symbol> = (1..=3).map(|i| Symbol::new(&format!("b_{i}"))).collect();
    let set = solve_linear(&EquationSystem::new(eqs, unknowns.clone()).map_err(core)?).map_err(core)?;
    let bhat = SymMatrix::column(unknowns.iter().map(|u| set.solutions[0].values[u].clone()).collect());
    r.push(matrix("b hat", &bhat));
    Ok(r)
}

fn logistic() -> Result<Report, DemoError> {
    let mut r = Report::new("logistic");
    let p_s = inverse_logit();
    r.push(formula("p(s)", &p_s));
    let term = logistic_term(2);
    let b: Vec<Symbol> = vec![Symbol::new("b_1"), Symbol::new("b_2")];
    r.push(formula("log L_i(b)", &term));
    let sb = symstat_core::calculus::score(&term, &b).simplified();
    let hb = symstat_core::calculus::hessian(&term, &b).simplified();
    r.push(matrix("score", &sb));
    r.push(matrix("hessian", &hb));

    let mut data = Dataset::budworm();
    data.transform("log2:dose")?;
    let rows = data.rows().iter().map(|row| vec![1.0, row[0], row[1], row[2]]).collect();
    r.push(Block::table("data", Table::new(&["x_1", "log2(dose)", "ndead", "ntotal"], rows)));

    let spec = LogisticSpec {
        events: "ndead".into(),
        trials: "ntotal".into(),
        predictors: vec!["log2(dose)".into()],
        intercept: true,
    };
    let newton = fit::fit_logistic(&data, &spec)?;
    r.push_fit("fit by Newton-Raphson", newton.summary());
    let obj = CompiledTape::<f64>::compile(&newton.loglik, Some(&newton.params)).map_err(core)?;
    let nm = nelder_mead_max(&obj, &[0.0, 0.0], &NelderMeadOptions::default()).map_err(core)?;
    r.push_fit("fit by Nelder-Mead", fit::summarize("logistic", &newton.names, &nm));
    Ok(r)
}

pub const LAGRANGE_LOGL: &str = "y_11*log(u) + y_21*log(u*r_2) + y_12*log(u*s_2) + y_22*log(u*r_2*s_2)";

fn lagrange() -> Result<Report, DemoError> {
    let mut r = Report::new("lagrange");
    let log_l = p(LAGRANGE_LOGL);
    r.push(formula("log L", &log_l));
    let constraint = p("u + u*r_2 + u*s_2 + u*r_2*s_2 - 1");
    let lagr = -log_l.clone() + p("lambda") * constraint;
    r.push(formula("Lagrangian", &lagr));
    let unknowns: Vec<Symbol> = ["u", "r_2", "s_2", "lambda"].iter().map(|s| Symbol::new(s)).collect();
    let grad: Vec<Expr> = unknowns.iter().map(|v| derivative(&lagr, v)).collect();
    let set = solve_system(&EquationSystem::from_zeros(grad, unknowns.clone()).map_err(core)?).map_err(core)?;
    let sol = &set.solutions[0].values;
    for u in &unknowns {
        r.push(formula(&format!("{} hat", u.name()), &factor(&sol[u])));
    }
    let cells = SymMatrix::from_rows(vec![vec![p("u"), p("u*s_2")], vec![p("u*r_2"), p("u*r_2*s_2")]])
        .map_err(core)?
        .subs(sol)
        .simplified();
    let total = p("(y_11 + y_12 + y_21 + y_22)^(-2)");
    let mut factored = factor_out_scalar(&total, &cells).map_err(core)?;
    factored.matrix = factored.matrix.map(factor);
    factored.scalar = factor(&factored.scalar);
    r.push(Block::latex("p hat", factored.to_latex(), format!("{} * {}", factored.scalar.to_plain(), factored.matrix.to_plain())));
    let vars = &unknowns[..3];
    let h = symstat_core::calculus::hessian(&log_l, vars).subs(sol).simplified().map(factor);
    r.push(matrix("hessian at the solution", &h));
    Ok(r)
}

fn ar1() -> Result<Report, DemoError> {
    let mut r = Report::new("ar1");
    let series = Dataset::ar1().column("x")?;
    let n = series.len();
    let l = SymMatrix::diff_mat(n, &p("-a"), Some(p("sqrt(1 - a^2)")));
    r.push(matrix("L", &l));
    let k = l.crossprod().div_scalar(&p("v"));
    r.push(matrix("K", &k));
    r.push(formula("det K", &k.determinant().map_err(core)?));
    let rows = series.iter().enumerate().map(|(i, v)| vec![(i + 1) as f64, *v]).collect();
    r.push(Block::table("series", Table::new(&["i", "x_i"], rows)));
    let fit = fit::fit_ar1(&series)?;
    r.push(formula("log L", &fit.loglik));
    r.push_fit("bounded fit", fit.summary());
    Ok(r)
}

/// `v (n + 2 S)` over `n^2`, where `S` is the sum of the correlations
/// above the diagonal.
fn average_variance(offdiag: &Expr) -> Expr {
    simplify(&(p("v") * (p("n") + Expr::int(2) * offdiag.clone()) / p("n^2")))
}

fn effective_size(var_avg: &Expr) -> Result<Expr, DemoError> {
    let k = Symbol::new("k_n");
    let set = isolate(&Equation::zero(var_avg.clone() - p("v/k_n")), &k).map_err(core)?;
    Ok(set.values_of(&k).swap_remove(0))
}

const GRID: [(f64, f64); 6] = [(0.1, 10.0), (0.2, 10.0), (0.5, 10.0), (0.1, 50.0), (0.2, 50.0), (0.5, 50.0)];

fn at_rn(e: &Expr, r: f64, n: f64) -> Result<f64, DemoError> {
    eval_tree(e, &|s| match s.name() {
        "r" => Some(r),
        "n" => Some(n),
        _ => None,
    })
    .map_err(core)
}

fn variance_avg(tridiagonal: bool) -> Result<Report, DemoError> {
    let mut r = Report::new(if tridiagonal { "variance-avg-tridiagonal" } else { "variance-avg" });
    let (i, j) = (Symbol::new("i"), Symbol::new("j"));
    let offdiag = if tridiagonal {
        sum_closed_form(&p("r"), &i, &p("1"), &p("n - 1")).map_err(core)?
    } else {
        let inner = sum_closed_form(&p("r"), &j, &p("i + 1"), &p("n")).map_err(core)?;
        sum_closed_form(&inner, &i, &p("1"), &p("n - 1")).map_err(core)?
    };
    let total = simplify(&(p("v") * (p("n") + Expr::int(2) * offdiag.clone())));
    r.push(formula("sum of covariances", &total));
    let var_avg = average_variance(&offdiag);
    r.push(formula("variance of the average", &var_avg));
    let k = effective_size(&var_avg)?;
    r.push(formula("k_n", &k));

    let (n, rr) = (Symbol::new("n"), Symbol::new("r"));
    if !tridiagonal {
        let limits = [
            ("n to infinity", limit(&var_avg, &n, &LimitPoint::PosInf, Direction::Both)),
            ("r to 0 from above", limit(&var_avg, &rr, &LimitPoint::Finite(p("0")), Direction::Right)),
            ("r to 1 from below", limit(&var_avg, &rr, &LimitPoint::Finite(p("1")), Direction::Left)),
        ];
        for (title, v) in limits {
            let v = v.map_err(core)?;
            r.push(Block::latex(&format!("limit, {title}"), v.to_latex(), limit_plain(&v)));
        }
    }
    // with neighbours only k_n grows like n, so report the limiting ratio
    let (title, target) = if tridiagonal { ("limit of k_n / n", simplify(&(k.clone() / p("n")))) } else { ("l_k", k.clone()) };
    let lk = limit(&target, &n, &LimitPoint::PosInf, Direction::Both).map_err(core)?;
    r.push(Block::latex(title, lk.to_latex(), limit_plain(&lk)));

    let mut rows = Vec::new();
    for (rv, nv) in GRID {
        rows.push(vec![rv, nv, at_rn(&k, rv, nv)?]);
    }
    r.push(Block::table("effective sample size", Table::new(&["r", "n", "k_n"], rows)));
    if let Some(e) = lk.finite() {
        let rows = [0.1, 0.2, 0.5].iter().map(|rv| at_rn(e, *rv, 0.0).map(|v| vec![*rv, v])).collect::<Result<_, _>>()?;
        let column = if tridiagonal { "k_n / n" } else { "l_k" };
        r.push(Block::table(&format!("{title} by r"), Table::new(&["r", column], rows)));
    }
    Ok(r)
}

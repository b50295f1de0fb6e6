//! Derivation scripts: one statement per line, run top to bottom.
//!
//! ```text
//! # comments and blank lines are skipped
//! let f = 1 - x^2 + x^3             # an expression
//! let g = diff(f, x)                # an operation
//! show latex factor(g, x)           # render any value
//! data "moths.csv"                  # relative to the script
//! fit logistic events=ndead trials=ntotal predictors=dose transform=log2:dose
//! fit ar1 series=0.1,-0.9,0.4,0
//! ```
//!
//! Names bound by `let` are substituted into later expressions. Operations
//! nest as arguments (`det(inv(M))`) but not inside arithmetic.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use symstat_core::calculus::{
    antiderivative_poly, definite_integral_poly, derivative_n, hessian, limit, score, sum_closed_form, Direction,
    LimitPoint, LimitValue,
};
use symstat_core::expr::Func;
use symstat_core::numbridge::{eval_tree, quadrature, CompiledTape};
use symstat_core::simplify::{cancel, expand, factor, factor_univariate, simplify};
use symstat_core::solve::{isolate, roots_univariate, solve_linear, solve_system, Equation, EquationSystem, SolutionSet};
use symstat_core::symmat::{factor_out_scalar, FactoredMatrix};
use symstat_core::{Expr, Scalar, Symbol, SymMatrix};

use crate::dataset::{DataError, Dataset};
use crate::fit::{self, FitError, LogisticSpec};
use crate::report::{Block, Report, Table};

/// Title of the report produced by a script.
pub const SCRIPT_REPORT: &str = "script";

/// Where in the script an error happened: the 1-based source line and the
/// 1-based index among statements (blank and comment lines do not count).
#[derive(Debug, thiserror::Error)]
#[error("line {line} (statement {statement}): {kind}")]
pub struct ScriptError {
    pub line: usize,
    pub statement: usize,
    pub kind: ScriptErrorKind,
}

#[derive(Debug, thiserror::Error)]
pub enum ScriptErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("unknown operation `{0}`")]
    UnknownOp(String),
    #[error("`{op}` takes {expected}, got {found} argument(s)")]
    Arity { op: String, expected: &'static str, found: usize },
    #[error("`{op}` expects {expected}, got {found}")]
    Type { op: String, expected: &'static str, found: &'static str },
    #[error("`{name}` is a {kind}; pass it to an operation instead of using it in arithmetic")]
    NotScalar { name: String, kind: &'static str },
    #[error("{0}")]
    Invalid(String),
    #[error("no data loaded; add a `data` statement first")]
    NoData,
    #[error(transparent)]
    Core(#[from] symstat_core::Error),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Fit(#[from] FitError),
}

fn core<E: Into<symstat_core::Error>>(e: E) -> ScriptErrorKind {
    ScriptErrorKind::Core(e.into())
}

type Result<T, E = ScriptErrorKind> = std::result::Result<T, E>;

/// A right-hand side before evaluation.
#[derive(Clone, Debug, PartialEq)]
pub enum Term {
    Call(String, Vec<Term>),
    List(Vec<Term>),
    Str(String),
    /// A bound name or an expression; resolved when the statement runs.
    Text(String),
    /// An expression with operation calls lifted out into placeholder
    /// symbols, which are bound to the calls' values before substitution.
    Mixed(String, Vec<(String, Term)>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    Latex,
    Plain,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Statement {
    Let { name: String, value: Term },
    Show { style: Style, source: String, value: Term },
    Data(String),
    Fit { model: String, options: Vec<(String, String)> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Located {
    pub line: usize,
    pub statement: Statement,
}

/// Result of evaluating a term.
#[derive(Clone, Debug)]
pub enum Value {
    Expr(Expr),
    Matrix(SymMatrix),
    Factored(FactoredMatrix),
    Solutions(SolutionSet),
    Table(Table),
    List(Vec<Value>),
    Str(String),
    Infinite(LimitValue),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Expr(_) => "expression",
            Value::Matrix(_) => "matrix",
            Value::Factored(_) => "factored matrix",
            Value::Solutions(_) => "solution set",
            Value::Table(_) => "table",
            Value::List(_) => "list",
            Value::Str(_) => "string",
            Value::Infinite(_) => "infinite limit",
        }
    }

    pub fn to_latex(&self) -> String {
        match self {
            Value::Expr(e) => e.to_latex(),
            Value::Matrix(m) => m.to_latex(),
            Value::Factored(f) => f.to_latex(),
            Value::Solutions(s) => solutions_latex(s),
            Value::Table(t) => t.to_latex(),
            Value::List(vs) => vs.iter().map(Value::to_latex).collect::<Vec<_>>().join(", "),
            Value::Str(s) => format!("\\text{{{s}}}"),
            Value::Infinite(v) => v.to_latex(),
        }
    }

    pub fn to_plain(&self) -> String {
        match self {
            Value::Expr(e) => e.to_plain(),
            Value::Matrix(m) => m.to_plain(),
            Value::Factored(f) => format!("{} * {}", f.scalar.to_plain(), f.matrix.to_plain()),
            Value::Solutions(s) => solutions_plain(s),
            Value::Table(t) => t.to_text(),
            Value::List(vs) => format!("[{}]", vs.iter().map(Value::to_plain).collect::<Vec<_>>().join(", ")),
            Value::Str(s) => s.clone(),
            Value::Infinite(v) => v.to_string(),
        }
    }
}

fn assignment(s: &symstat_core::solve::Solution, unknowns: &[Symbol], latex: bool) -> String {
    let render = |e: &Expr| if latex { e.to_latex() } else { e.to_plain() };
    let name = |u: &Symbol| if latex { u.latex() } else { u.name().to_string() };
    let parts: Vec<String> = unknowns.iter().filter_map(|u| s.get(u).map(|v| format!("{} = {}", name(u), render(v)))).collect();
    let mut out = parts.join(if latex { ", \\; " } else { ", " });
    if s.multiplicity > 1 {
        out.push_str(&format!(" (multiplicity {})", s.multiplicity));
    }
    out
}

fn solutions_latex(s: &SolutionSet) -> String {
    let items: Vec<String> = s.solutions.iter().map(|x| assignment(x, &s.unknowns, true)).collect();
    format!("\\left\\{{ {} \\right\\}}", items.join(" ; \\; "))
}

fn solutions_plain(s: &SolutionSet) -> String {
    let items: Vec<String> = s.solutions.iter().map(|x| format!("{{{}}}", assignment(x, &s.unknowns, false))).collect();
    items.join("; ")
}

/// Names accepted as operations, with a one-line signature each.
pub const OPERATIONS: &[(&str, &str)] = &[
    ("diff", "diff(e, x, ...) repeated partial derivative"),
    ("score", "score(e, [x, y]) gradient as a column"),
    ("hessian", "hessian(e, [x, y]) matrix of second derivatives"),
    ("expand", "expand(v) distribute products and powers"),
    ("simplify", "simplify(v) rational normal form"),
    ("cancel", "cancel(v) common factors cancelled"),
    ("factor", "factor(v) or factor(e, x) factored form"),
    ("solve", "solve(e, x) roots of e = 0"),
    ("solve_system", "solve_system([e1, e2], [x, y]) polynomial system"),
    ("solve_linear", "solve_linear([e1, e2], [x, y]) linear system"),
    ("subs", "subs(v, x, value) or subs(v, solutions[, k])"),
    ("limit", "limit(e, x, point[, \"left\" | \"right\"]), point may be oo or -oo"),
    ("sum", "sum(e, i, lo, hi) closed-form sum"),
    ("integrate", "integrate(e, x[, lo, hi]) polynomial integral"),
    ("nintegrate", "nintegrate(e, x, lo, hi) adaptive quadrature"),
    ("at", "at(e, x, [points]) or at(e, solutions) table of values"),
    ("toeplitz", "toeplitz(a, b, ...) symmetric Toeplitz matrix"),
    ("matrix", "matrix([[a, b], [c, d]]) from rows"),
    ("column", "column([a, b]) column vector"),
    ("vector", "vector(k, \"v\") symbols v_1 .. v_k"),
    ("matrix_sym", "matrix_sym(r, c, \"p\") symbols p_11 .. p_rc"),
    ("diffmat", "diffmat(n, off[, corner]) lower bidiagonal matrix"),
    ("det", "det(M) determinant"),
    ("inv", "inv(M) inverse"),
    ("t", "t(M) transpose"),
    ("mul", "mul(A, B, ...) matrix or scalar product"),
    ("crossprod", "crossprod(M) M'M"),
    ("factor_out", "factor_out(s, M) s times M / s"),
    ("entry", "entry(M, i, j) 1-based entry"),
];

fn is_op(name: &str) -> bool {
    OPERATIONS.iter().any(|(n, _)| *n == name)
}

/// Splits at top-level occurrences of `sep`, outside brackets and quotes.
fn split_top(s: &str, sep: char) -> Result<Vec<&str>, String> {
    let mut depth = 0i32;
    let mut quoted = false;
    let mut start = 0;
    let mut out = Vec::new();
    for (i, c) in s.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '(' | '[' if !quoted => depth += 1,
            ')' | ']' if !quoted => {
                depth -= 1;
                if depth < 0 {
                    return Err(format!("unbalanced `{c}`"));
                }
            }
            c if c == sep && depth == 0 && !quoted => {
                out.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    if quoted {
        return Err("unterminated string".into());
    }
    if depth != 0 {
        return Err("unbalanced brackets".into());
    }
    out.push(&s[start..]);
    Ok(out)
}

/// Index of the bracket closing the one opened at `open`.
fn matching(s: &str, open: usize) -> Option<usize> {
    let mut depth = 0;
    for (i, c) in s[open..].char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => {
                depth -= 1;
                if depth == 0 {
                    return Some(open + i);
                }
            }
            _ => {}
        }
    }
    None
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn parse_term(s: &str) -> Result<Term> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ScriptErrorKind::Syntax("missing value".into()));
    }
    if let Some(inner) = s.strip_prefix('"') {
        return match inner.strip_suffix('"') {
            Some(text) if !text.contains('"') => Ok(Term::Str(text.to_string())),
            _ => Err(ScriptErrorKind::Syntax(format!("malformed string {s}"))),
        };
    }
    if s.starts_with('[') && matching(s, 0) == Some(s.len() - 1) {
        let inner = &s[1..s.len() - 1];
        if inner.trim().is_empty() {
            return Ok(Term::List(Vec::new()));
        }
        let items = split_top(inner, ',').map_err(ScriptErrorKind::Syntax)?;
        return Ok(Term::List(items.into_iter().map(parse_term).collect::<Result<_>>()?));
    }
    if let Some(open) = s.find('(') {
        let head = s[..open].trim();
        if is_ident(head) && matching(s, open) == Some(s.len() - 1) {
            if is_op(head) {
                let inner = &s[open + 1..s.len() - 1];
                let args = if inner.trim().is_empty() {
                    Vec::new()
                } else {
                    split_top(inner, ',').map_err(ScriptErrorKind::Syntax)?.into_iter().map(parse_term).collect::<Result<_>>()?
                };
                return Ok(Term::Call(head.to_string(), args));
            }
            if Func::from_name(head).is_none() {
                return Err(ScriptErrorKind::UnknownOp(head.to_string()));
            }
        }
    }
    split_top(s, ',').map_err(ScriptErrorKind::Syntax)?;
    lift_calls(s)
}

/// Replaces each operation call inside an expression by a placeholder.
fn lift_calls(s: &str) -> Result<Term> {
    let mut text = String::new();
    let mut calls = Vec::new();
    let mut rest = s;
    while let Some(start) = rest.find(|c: char| c.is_ascii_alphabetic()) {
        let before = &rest[..start];
        let after_prev = before.chars().last().or_else(|| text.chars().last());
        let len = rest[start..].find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(rest.len() - start);
        let ident = &rest[start..start + len];
        text.push_str(before);
        let glued = after_prev.is_some_and(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.');
        let tail = &rest[start + len..];
        let open = tail.len() - tail.trim_start().len();
        if !glued && is_op(ident) && tail[open..].starts_with('(') {
            let close = matching(tail, open).ok_or_else(|| ScriptErrorKind::Syntax("unbalanced brackets".into()))?;
            let placeholder = format!("opcall_{}_", calls.len());
            calls.push((placeholder.clone(), parse_term(&rest[start..start + len + close + 1])?));
            text.push_str(&placeholder);
            rest = &tail[close + 1..];
        } else {
            text.push_str(ident);
            rest = tail;
        }
    }
    text.push_str(rest);
    Ok(if calls.is_empty() { Term::Text(text) } else { Term::Mixed(text, calls) })
}

fn parse_statement(text: &str) -> Result<Statement> {
    let (word, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
    let rest = rest.trim();
    match word {
        "let" => {
            let (name, value) =
                rest.split_once('=').ok_or_else(|| ScriptErrorKind::Syntax("expected `let name = value`".into()))?;
            let name = name.trim();
            if !is_ident(name) {
                return Err(ScriptErrorKind::Syntax(format!("`{name}` is not a valid name")));
            }
            if is_op(name) {
                return Err(ScriptErrorKind::Syntax(format!("`{name}` is an operation and cannot be rebound")));
            }
            Ok(Statement::Let { name: name.to_string(), value: parse_term(value)? })
        }
        "show" => {
            let (style, source) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
            let style = match style {
                "latex" => Style::Latex,
                "plain" => Style::Plain,
                _ => return Err(ScriptErrorKind::Syntax("expected `show latex <value>` or `show plain <value>`".into())),
            };
            let source = source.trim().to_string();
            let value = parse_term(&source)?;
            Ok(Statement::Show { style, source, value })
        }
        "data" => match parse_term(rest)? {
            Term::Str(path) => Ok(Statement::Data(path)),
            Term::Text(name) if name == "budworm" || name == "ar1" => Ok(Statement::Data(name)),
            _ => Err(ScriptErrorKind::Syntax("expected `data \"path\"`, `data budworm` or `data ar1`".into())),
        },
        "fit" => {
            let mut words = rest.split_whitespace();
            let model = words.next().unwrap_or_default();
            if model != "logistic" && model != "ar1" {
                return Err(ScriptErrorKind::Syntax("expected `fit logistic ...` or `fit ar1 ...`".into()));
            }
            let options = words
                .map(|w| {
                    w.split_once('=')
                        .map(|(k, v)| (k.to_string(), v.to_string()))
                        .ok_or_else(|| ScriptErrorKind::Syntax(format!("expected key=value, got `{w}`")))
                })
                .collect::<Result<_>>()?;
            Ok(Statement::Fit { model: model.to_string(), options })
        }
        _ => Err(ScriptErrorKind::Syntax(format!("unknown statement `{word}`; expected let, show, data or fit"))),
    }
}

/// Strips a trailing `#` comment that is not inside a string.
fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

/// Parses the whole script before anything runs.
pub fn parse_script(src: &str) -> Result<Vec<Located>, ScriptError> {
    let mut out = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let text = strip_comment(raw).trim();
        if text.is_empty() {
            continue;
        }
        let statement = parse_statement(text).map_err(|kind| ScriptError { line: i + 1, statement: out.len() + 1, kind })?;
        out.push(Located { line: i + 1, statement });
    }
    Ok(out)
}

/// Bindings, loaded data and the report being built.
pub struct Session {
    bindings: BTreeMap<String, Value>,
    data: Option<Dataset>,
    base: PathBuf,
    report: Report,
}

impl Session {
    /// `base` is the directory that relative `data` paths resolve against.
    pub fn new(base: &Path) -> Self {
        Session { bindings: BTreeMap::new(), data: None, base: base.to_path_buf(), report: Report::new(SCRIPT_REPORT) }
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.bindings.get(name)
    }

    pub fn report(&self) -> &Report {
        &self.report
    }

    pub fn into_report(self) -> Report {
        self.report
    }

    pub fn run(&mut self, statements: &[Located]) -> Result<(), ScriptError> {
        for (k, s) in statements.iter().enumerate() {
            self.exec(&s.statement).map_err(|kind| ScriptError { line: s.line, statement: k + 1, kind })?;
        }
        Ok(())
    }

    fn exec(&mut self, s: &Statement) -> Result<()> {
        match s {
            Statement::Let { name, value } => {
                let v = self.eval(value)?;
                self.bindings.insert(name.clone(), v);
            }
            Statement::Show { style, source, value } => {
                let v = self.eval(value)?;
                let block = match (&v, style) {
                    (Value::Table(t), _) => Block::table(source, t.clone()),
                    (_, Style::Latex) => Block::latex(source, v.to_latex(), v.to_plain()),
                    (_, Style::Plain) => Block::plain(source, v.to_plain()),
                };
                self.report.push(block);
            }
            Statement::Data(path) => {
                self.data = Some(match path.as_str() {
                    "budworm" => Dataset::budworm(),
                    "ar1" => Dataset::ar1(),
                    _ => Dataset::from_path(&self.base.join(path))?,
                });
            }
            Statement::Fit { model, options } => self.fit(model, options)?,
        }
        Ok(())
    }

    fn fit(&mut self, model: &str, options: &[(String, String)]) -> Result<()> {
        let opt = |k: &str| options.iter().find(|(key, _)| key == k).map(|(_, v)| v.as_str());
        for (k, _) in options {
            let known: &[&str] =
                if model == "logistic" { &["events", "trials", "predictors", "transform", "intercept"] } else { &["column", "series"] };
            if !known.contains(&k.as_str()) {
                return Err(ScriptErrorKind::Invalid(format!("unknown option `{k}` for `fit {model}`; expected {}", known.join(", "))));
            }
        }
        if model == "logistic" {
            let mut data = self.data.clone().ok_or(ScriptErrorKind::NoData)?;
            let transforms: Vec<String> = opt("transform").map(|t| t.split(',').map(str::to_string).collect()).unwrap_or_default();
            let mut predictors: Vec<String> = opt("predictors").map(|p| p.split(',').map(str::to_string).collect()).unwrap_or_default();
            fit::apply_transforms(&mut data, &transforms, &mut predictors)?;
            let need = |k: &str| opt(k).ok_or_else(|| ScriptErrorKind::Invalid(format!("`fit logistic` needs {k}=<column>")));
            let spec = LogisticSpec {
                events: need("events")?.to_string(),
                trials: need("trials")?.to_string(),
                predictors,
                intercept: match opt("intercept").unwrap_or("yes") {
                    "yes" | "true" => true,
                    "no" | "false" => false,
                    other => return Err(ScriptErrorKind::Invalid(format!("intercept must be yes or no, got `{other}`"))),
                },
            };
            let f = fit::fit_logistic(&data, &spec)?;
            self.report.push_fit("logistic fit", f.summary());
        } else {
            let series = match (opt("series"), opt("column")) {
                (Some(s), None) => parse_series(s)?,
                (None, Some(c)) => self.data.as_ref().ok_or(ScriptErrorKind::NoData)?.column(c)?,
                _ => return Err(ScriptErrorKind::Invalid("`fit ar1` needs exactly one of series=... or column=...".into())),
            };
            let f = fit::fit_ar1(&series)?;
            self.report.push_fit("ar1 fit", f.summary());
        }
        Ok(())
    }

    pub fn eval(&self, t: &Term) -> Result<Value> {
        match t {
            Term::Str(s) => Ok(Value::Str(s.clone())),
            Term::List(items) => Ok(Value::List(items.iter().map(|i| self.eval(i)).collect::<Result<_>>()?)),
            Term::Text(text) => {
                if let Some(v) = self.bindings.get(text) {
                    return Ok(v.clone());
                }
                self.expression(text, &BTreeMap::new()).map(Value::Expr)
            }
            Term::Mixed(text, calls) => {
                let mut lifted = BTreeMap::new();
                for (name, call) in calls {
                    let v = as_expr(self.eval(call)?, "arithmetic")?;
                    lifted.insert(Symbol::new(name), v);
                }
                self.expression(text, &lifted).map(Value::Expr)
            }
            Term::Call(op, args) => self.call(op, args),
        }
    }

    /// Parses `text` and substitutes every bound expression.
    fn expression(&self, text: &str, lifted: &BTreeMap<Symbol, Expr>) -> Result<Expr> {
        let e = Expr::parse(text).map_err(core)?;
        let mut bind = lifted.clone();
        for s in e.free_symbols() {
            if lifted.contains_key(&s) {
                continue;
            }
            match self.bindings.get(s.name()) {
                Some(Value::Expr(v)) => {
                    bind.insert(s, v.clone());
                }
                Some(other) => return Err(ScriptErrorKind::NotScalar { name: s.name().to_string(), kind: other.kind() }),
                None => {}
            }
        }
        Ok(if bind.is_empty() { e } else { e.subs(&bind) })
    }

    fn call(&self, op: &str, args: &[Term]) -> Result<Value> {
        let a = Args { op, terms: args, session: self };
        let v = match op {
            "diff" => {
                a.at_least(2, "an expression and one or more variables")?;
                let vars = (1..args.len()).map(|i| a.symbol(i)).collect::<Result<Vec<_>>>()?;
                Value::Expr(derivative_n(&a.expr(0)?, &vars))
            }
            "score" | "hessian" => {
                a.exactly(2, "an expression and a list of variables")?;
                let (e, vars) = (a.expr(0)?, a.symbols(1)?);
                Value::Matrix(if op == "score" { score(&e, &vars) } else { hessian(&e, &vars) }.simplified())
            }
            "expand" | "simplify" | "cancel" => {
                a.exactly(1, "one value")?;
                let f: fn(&Expr) -> Expr = match op {
                    "expand" => expand,
                    "simplify" => simplify,
                    _ => cancel,
                };
                map_value(a.value(0)?, f, op)?
            }
            "factor" => {
                if args.len() == 2 {
                    Value::Expr(factor_univariate(&a.expr(0)?, &a.symbol(1)?).map_err(core)?)
                } else {
                    a.exactly(1, "a value, or an expression and a variable")?;
                    map_value(a.value(0)?, factor, op)?
                }
            }
            "solve" => {
                a.exactly(2, "an expression and a variable")?;
                let (e, x) = (a.expr(0)?, a.symbol(1)?);
                let set = match roots_univariate(&e, &x) {
                    Ok(s) => s,
                    Err(_) => isolate(&Equation::zero(e), &x).map_err(core)?,
                };
                Value::Solutions(set)
            }
            "solve_system" | "solve_linear" => {
                a.exactly(2, "a list of expressions and a list of unknowns")?;
                let eqs = a.exprs(0)?;
                let system = EquationSystem::from_zeros(eqs, a.symbols(1)?).map_err(core)?;
                let set = if op == "solve_system" { solve_system(&system) } else { solve_linear(&system) };
                Value::Solutions(set.map_err(core)?)
            }
            "subs" => {
                let target = a.value(0)?;
                let bind: BTreeMap<Symbol, Expr> = match a.value(1) {
                    Ok(Value::Solutions(s)) => {
                        let k = if args.len() == 3 { a.index(2)? } else { a.exactly(2, "a value and a solution set")?; 1 };
                        let sol = s.solutions.get(k - 1).ok_or_else(|| {
                            ScriptErrorKind::Invalid(format!("solution {k} requested but only {} found", s.solutions.len()))
                        })?;
                        sol.values.clone()
                    }
                    _ => {
                        a.exactly(3, "a value, a variable and a replacement")?;
                        BTreeMap::from([(a.symbol(1)?, a.expr(2)?)])
                    }
                };
                map_value(target, |e| simplify(&e.subs(&bind)), op)?
            }
            "limit" => {
                if !(3..=4).contains(&args.len()) {
                    return Err(a.arity("an expression, a variable, a point and an optional side"));
                }
                let to = match a.text(2)?.as_str() {
                    "oo" | "inf" | "+oo" => LimitPoint::PosInf,
                    "-oo" | "-inf" => LimitPoint::NegInf,
                    _ => LimitPoint::Finite(a.expr(2)?),
                };
                let dir = if args.len() == 4 {
                    match a.string(3)?.as_str() {
                        "left" | "-" => Direction::Left,
                        "right" | "+" => Direction::Right,
                        other => return Err(ScriptErrorKind::Invalid(format!("side must be \"left\" or \"right\", got `{other}`"))),
                    }
                } else {
                    Direction::Both
                };
                match limit(&a.expr(0)?, &a.symbol(1)?, &to, dir).map_err(core)? {
                    LimitValue::Finite(e) => Value::Expr(e),
                    inf => Value::Infinite(inf),
                }
            }
            "sum" => {
                a.exactly(4, "an expression, an index and two bounds")?;
                Value::Expr(sum_closed_form(&a.expr(0)?, &a.symbol(1)?, &a.expr(2)?, &a.expr(3)?).map_err(core)?)
            }
            "integrate" => match args.len() {
                2 => Value::Expr(antiderivative_poly(&a.expr(0)?, &a.symbol(1)?).map_err(core)?),
                4 => Value::Expr(definite_integral_poly(&a.expr(0)?, &a.symbol(1)?, &a.expr(2)?, &a.expr(3)?).map_err(core)?),
                _ => return Err(a.arity("an expression, a variable and optionally two bounds")),
            },
            "nintegrate" => {
                a.exactly(4, "an expression, a variable and two bounds")?;
                let x = a.symbol(1)?;
                let tape = CompiledTape::<f64>::compile(&a.expr(0)?, Some(std::slice::from_ref(&x))).map_err(core)?;
                let q = quadrature(&tape, a.number(2)?, a.number(3)?, 1e-10).map_err(core)?;
                Value::Table(Table::new(&["integral", "error estimate"], vec![vec![q.value, q.error]]))
            }
            "at" => self.at(&a)?,
            "toeplitz" => {
                a.at_least(1, "the entries of the first row")?;
                let first = (0..args.len()).map(|i| a.expr(i)).collect::<Result<Vec<_>>>()?;
                Value::Matrix(SymMatrix::toeplitz_sym(&first))
            }
            "matrix" => {
                a.exactly(1, "a list of rows")?;
                let rows = match a.value(0)? {
                    Value::List(rows) => rows
                        .into_iter()
                        .map(|r| match r {
                            Value::List(items) => items.into_iter().map(|v| as_expr(v, op)).collect::<Result<Vec<_>>>(),
                            other => Err(type_err(op, "a list of rows", &other)),
                        })
                        .collect::<Result<Vec<_>>>()?,
                    other => return Err(type_err(op, "a list of rows", &other)),
                };
                Value::Matrix(SymMatrix::from_rows(rows).map_err(core)?)
            }
            "column" => {
                a.exactly(1, "a list of entries")?;
                Value::Matrix(SymMatrix::column(a.exprs(0)?))
            }
            "vector" => {
                a.exactly(2, "a length and a prefix")?;
                Value::Matrix(SymMatrix::vector_sym(a.index(0)?, &a.string(1)?))
            }
            "matrix_sym" => {
                a.exactly(3, "two dimensions and a prefix")?;
                Value::Matrix(SymMatrix::matrix_sym(a.index(0)?, a.index(1)?, &a.string(2)?))
            }
            "diffmat" => {
                if !(2..=3).contains(&args.len()) {
                    return Err(a.arity("a size, the subdiagonal entry and an optional corner"));
                }
                let corner = if args.len() == 3 { Some(a.expr(2)?) } else { None };
                Value::Matrix(SymMatrix::diff_mat(a.index(0)?, &a.expr(1)?, corner))
            }
            "det" => {
                a.exactly(1, "a matrix")?;
                Value::Expr(a.matrix(0)?.determinant().map_err(core)?)
            }
            "inv" => {
                a.exactly(1, "a matrix")?;
                Value::Matrix(a.matrix(0)?.inverse().map_err(core)?)
            }
            "t" => {
                a.exactly(1, "a matrix")?;
                Value::Matrix(a.matrix(0)?.transpose())
            }
            "crossprod" => {
                a.exactly(1, "a matrix")?;
                Value::Matrix(a.matrix(0)?.crossprod())
            }
            "mul" => {
                a.at_least(2, "two or more factors")?;
                let mut acc = a.value(0)?;
                for i in 1..args.len() {
                    acc = multiply(acc, a.value(i)?)?;
                }
                acc
            }
            "factor_out" => {
                a.exactly(2, "a scalar and a matrix")?;
                Value::Factored(factor_out_scalar(&a.expr(0)?, &a.matrix(1)?).map_err(core)?)
            }
            "entry" => {
                a.exactly(3, "a matrix and two 1-based indices")?;
                let m = a.matrix(0)?;
                let (i, j) = (a.index(1)?, a.index(2)?);
                if i == 0 || j == 0 || i > m.rows() || j > m.cols() {
                    return Err(ScriptErrorKind::Invalid(format!("entry ({i}, {j}) is outside a {}x{} matrix", m.rows(), m.cols())));
                }
                Value::Expr(m.get(i - 1, j - 1).clone())
            }
            _ => return Err(ScriptErrorKind::UnknownOp(op.to_string())),
        };
        Ok(v)
    }

    fn at(&self, a: &Args) -> Result<Value> {
        let e = a.expr(0)?;
        let eval = |bind: &BTreeMap<Symbol, Expr>| numeric(&e.subs(bind));
        let mut rows = Vec::new();
        match a.terms.len() {
            2 => {
                let Value::Solutions(set) = a.value(1)? else {
                    return Err(type_err("at", "a solution set", &a.value(1)?));
                };
                let mut sols = set.solutions.clone();
                sols.sort_by_cached_key(|s| set.unknowns.iter().map(|u| s.get(u).and_then(Expr::as_num).cloned()).collect::<Vec<_>>());
                for s in &sols {
                    let mut row = Vec::new();
                    for u in &set.unknowns {
                        row.push(numeric(s.get(u).unwrap_or(&Expr::sym(u.name())))?);
                    }
                    row.push(s.multiplicity as f64);
                    row.push(eval(&s.values)?);
                    rows.push(row);
                }
                let mut columns: Vec<String> = set.unknowns.iter().map(|u| u.name().to_string()).collect();
                columns.push("multiplicity".into());
                columns.push("value".into());
                Ok(Value::Table(Table { columns, rows }))
            }
            3 => {
                let x = a.symbol(1)?;
                for p in a.exprs(2)? {
                    rows.push(vec![numeric(&p)?, eval(&BTreeMap::from([(x.clone(), p)]))?]);
                }
                Ok(Value::Table(Table { columns: vec![x.name().to_string(), "value".into()], rows }))
            }
            _ => Err(a.arity("an expression and a solution set, or an expression, a variable and a list of points")),
        }
    }
}

/// Exact value when rational, otherwise a floating-point evaluation.
fn numeric(e: &Expr) -> Result<f64> {
    let v = simplify(e);
    match v.as_num() {
        Some(q) => Ok(f64::from_rational(q)),
        None => eval_tree(&v, &|_| None::<f64>)
            .map_err(|_| ScriptErrorKind::Invalid(format!("`{}` is not a number", v.to_plain()))),
    }
}

fn parse_series(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|v| {
            v.trim().parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| ScriptErrorKind::Invalid(format!("`{v}` is not a number")))
        })
        .collect()
}

fn type_err(op: &str, expected: &'static str, found: &Value) -> ScriptErrorKind {
    ScriptErrorKind::Type { op: op.to_string(), expected, found: found.kind() }
}

fn as_expr(v: Value, op: &str) -> Result<Expr> {
    match v {
        Value::Expr(e) => Ok(e),
        other => Err(type_err(op, "an expression", &other)),
    }
}

fn map_value(v: Value, f: impl Fn(&Expr) -> Expr + Copy, op: &str) -> Result<Value> {
    Ok(match v {
        Value::Expr(e) => Value::Expr(f(&e)),
        Value::Matrix(m) => Value::Matrix(m.map(f)),
        Value::Factored(fm) => Value::Factored(FactoredMatrix { scalar: f(&fm.scalar), matrix: fm.matrix.map(f) }),
        Value::List(vs) => Value::List(vs.into_iter().map(|v| map_value(v, f, op)).collect::<Result<_>>()?),
        other => return Err(type_err(op, "an expression, matrix or list", &other)),
    })
}

fn multiply(a: Value, b: Value) -> Result<Value> {
    Ok(match (a, b) {
        (Value::Expr(x), Value::Expr(y)) => Value::Expr(x * y),
        (Value::Expr(s), Value::Matrix(m)) | (Value::Matrix(m), Value::Expr(s)) => Value::Matrix(m.scale(&s)),
        (Value::Matrix(x), Value::Matrix(y)) => Value::Matrix(x.matmul(&y).map_err(core)?.simplified()),
        (Value::Factored(f), other) | (other, Value::Factored(f)) => {
            multiply(Value::Expr(f.scalar), multiply(Value::Matrix(f.matrix), other)?)?
        }
        (x, y) => {
            let bad = if matches!(x, Value::Expr(_) | Value::Matrix(_)) { y } else { x };
            return Err(type_err("mul", "expressions or matrices", &bad));
        }
    })
}

/// Typed access to the arguments of one call.
struct Args<'a> {
    op: &'a str,
    terms: &'a [Term],
    session: &'a Session,
}

impl Args<'_> {
    fn arity(&self, expected: &'static str) -> ScriptErrorKind {
        ScriptErrorKind::Arity { op: self.op.to_string(), expected, found: self.terms.len() }
    }

    fn exactly(&self, n: usize, expected: &'static str) -> Result<()> {
        if self.terms.len() == n {
            Ok(())
        } else {
            Err(self.arity(expected))
        }
    }

    fn at_least(&self, n: usize, expected: &'static str) -> Result<()> {
        if self.terms.len() >= n {
            Ok(())
        } else {
            Err(self.arity(expected))
        }
    }

    fn value(&self, i: usize) -> Result<Value> {
        self.session.eval(&self.terms[i])
    }

    fn expr(&self, i: usize) -> Result<Expr> {
        as_expr(self.value(i)?, self.op)
    }

    fn matrix(&self, i: usize) -> Result<SymMatrix> {
        match self.value(i)? {
            Value::Matrix(m) => Ok(m),
            Value::Factored(f) => Ok(f.matrix.scale(&f.scalar).simplified()),
            other => Err(type_err(self.op, "a matrix", &other)),
        }
    }

    fn exprs(&self, i: usize) -> Result<Vec<Expr>> {
        match self.value(i)? {
            Value::List(vs) => vs.into_iter().map(|v| as_expr(v, self.op)).collect(),
            Value::Expr(e) => Ok(vec![e]),
            other => Err(type_err(self.op, "a list of expressions", &other)),
        }
    }

    /// Raw source text, without resolving bindings.
    fn text(&self, i: usize) -> Result<String> {
        match &self.terms[i] {
            Term::Text(t) => Ok(t.clone()),
            _ => Err(ScriptErrorKind::Type { op: self.op.to_string(), expected: "a name or expression", found: "operation or list" }),
        }
    }

    /// A variable name, taken literally even if it is also bound.
    fn symbol(&self, i: usize) -> Result<Symbol> {
        let t = self.text(i)?;
        if is_ident(&t) {
            Ok(Symbol::new(&t))
        } else {
            Err(ScriptErrorKind::Type { op: self.op.to_string(), expected: "a variable name", found: "expression" })
        }
    }

    fn symbols(&self, i: usize) -> Result<Vec<Symbol>> {
        match &self.terms[i] {
            Term::List(items) => items
                .iter()
                .map(|t| match t {
                    Term::Text(s) if is_ident(s) => Ok(Symbol::new(s)),
                    _ => Err(ScriptErrorKind::Type { op: self.op.to_string(), expected: "a list of variable names", found: "expression" }),
                })
                .collect(),
            _ => Ok(vec![self.symbol(i)?]),
        }
    }

    fn string(&self, i: usize) -> Result<String> {
        match &self.terms[i] {
            Term::Str(s) => Ok(s.clone()),
            Term::Text(t) if is_ident(t) => Ok(t.clone()),
            _ => Err(ScriptErrorKind::Type { op: self.op.to_string(), expected: "a string", found: "expression" }),
        }
    }

    fn number(&self, i: usize) -> Result<f64> {
        numeric(&self.expr(i)?)
    }

    fn index(&self, i: usize) -> Result<usize> {
        self.expr(i)?
            .as_i64()
            .and_then(|k| usize::try_from(k).ok())
            .ok_or_else(|| ScriptErrorKind::Type { op: self.op.to_string(), expected: "a non-negative integer", found: "expression" })
    }
}

/// Parses and runs a script held in memory; relative data paths resolve
/// against `base`.
pub fn run_source(src: &str, base: &Path) -> Result<Report, ScriptError> {
    let statements = parse_script(src)?;
    let mut session = Session::new(base);
    session.run(&statements)?;
    Ok(session.into_report())
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Script { path: PathBuf, source: ScriptError },
}

pub fn run_script(path: &Path) -> Result<Report, RunError> {
    let src = std::fs::read_to_string(path).map_err(|source| RunError::Io { path: path.to_path_buf(), source })?;
    let base = path.parent().unwrap_or(Path::new("."));
    run_source(&src, base).map_err(|source| RunError::Script { path: path.to_path_buf(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitting_respects_brackets_and_quotes() {
        assert_eq!(split_top("f(a, b), [c, d], \"e, f\"", ',').unwrap(), ["f(a, b)", " [c, d]", " \"e, f\""]);
        assert!(split_top("f(a", ',').is_err());
        assert!(split_top("a)", ',').is_err());
    }

    #[test]
    fn only_whole_operation_names_are_lifted() {
        assert_eq!(lift_calls("xdet(a) + 2").unwrap(), Term::Text("xdet(a) + 2".into()));
        assert_eq!(lift_calls("log(x) + t_1").unwrap(), Term::Text("log(x) + t_1".into()));
        let Term::Mixed(text, calls) = lift_calls("1/det(M) + t (x)").unwrap() else { panic!() };
        assert_eq!(text, "1/opcall_0_ + opcall_1_");
        assert_eq!(calls[0].1, Term::Call("det".into(), vec![Term::Text("M".into())]));
    }

    #[test]
    fn comments_outside_strings() {
        assert_eq!(strip_comment("let a = 1 # note"), "let a = 1 ");
        assert_eq!(strip_comment("data \"a#b.csv\""), "data \"a#b.csv\"");
    }
}

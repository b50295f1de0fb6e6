use std::fmt::Write as _;

use serde_json::{json, Map, Value};
use symstat_core::optimize::Method;

/// Significant digits in the JSON mirror.
pub const JSON_DIGITS: usize = 6;
/// Significant digits in human-readable tables.
pub const TABLE_DIGITS: usize = 3;

/// Rounds to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x)
}

/// `x` to `digits` significant digits, in scientific notation only when
/// the magnitude is very large or very small.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    let r = round_sig(x, digits);
    if r != 0.0 && r.is_finite() && (r.abs() < 1e-4 || r.abs() >= 1e6) {
        format!("{:.*e}", digits.saturating_sub(1), r)
    } else {
        r.to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockKind {
    Latex,
    Plain,
    Table,
    FitSummary,
}

impl BlockKind {
    pub fn name(self) -> &'static str {
        match self {
            BlockKind::Latex => "latex",
            BlockKind::Plain => "plain",
            BlockKind::Table => "table",
            BlockKind::FitSummary => "fit-summary",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str], rows: Vec<Vec<f64>>) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows }
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let obj: Map<String, Value> =
                        self.columns.iter().zip(r).map(|(c, v)| (c.clone(), num(*v))).collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    pub fn to_text(&self) -> String {
        let cells: Vec<Vec<String>> =
            self.rows.iter().map(|r| r.iter().map(|v| fmt_sig(*v, TABLE_DIGITS)).collect()).collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|j| cells.iter().map(|r| r[j].len()).chain([self.columns[j].len()]).max().unwrap_or(0))
            .collect();
        let line = |items: &[String]| {
            items.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect::<Vec<_>>().join("  ")
        };
        let mut out = line(&self.columns);
        for r in &cells {
            out.push('\n');
            out.push_str(&line(r));
        }
        out
    }

    pub fn to_latex(&self) -> String {
        let mut out = format!("\\begin{{tabular}}{{{}}}\n", "r".repeat(self.columns.len()));
        let head: Vec<String> = self.columns.iter().map(|c| latex_text(c)).collect();
        let _ = writeln!(out, "{} \\\\ \\hline", head.join(" & "));
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|v| fmt_sig(*v, TABLE_DIGITS)).collect();
            let _ = writeln!(out, "{} \\\\", cells.join(" & "));
        }
        out.push_str("\\end{tabular}");
        out
    }
}

/// Summary of one maximum-likelihood fit.
#[derive(Clone, Debug, PartialEq)]
pub struct FitSummary {
    pub model: String,
    pub params: Vec<(String, f64)>,
    pub std_errors: Option<Vec<f64>>,
    pub loglik: f64,
    pub grad_norm: f64,
    pub info: Vec<Vec<f64>>,
    pub method: Method,
    pub iterations: usize,
    pub converged: bool,
}

pub fn method_name(m: Method) -> &'static str {
    match m {
        Method::NewtonRaphson => "newton-raphson",
        Method::NelderMead => "nelder-mead",
    }
}

impl FitSummary {
    pub fn estimate(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    fn table(&self) -> Table {
        let rows = self
            .params
            .iter()
            .enumerate()
            .map(|(i, (_, v))| match &self.std_errors {
                Some(se) => vec![*v, se[i]],
                None => vec![*v, f64::NAN],
            })
            .collect();
        Table::new(&["estimate", "std.error"], rows)
    }

    fn to_json(&self) -> Value {
        let params: Map<String, Value> = self.params.iter().map(|(n, v)| (n.clone(), num(*v))).collect();
        let mut obj = Map::new();
        obj.insert("model".into(), json!(self.model));
        obj.insert("method".into(), json!(method_name(self.method)));
        obj.insert("params".into(), Value::Object(params));
        if let Some(se) = &self.std_errors {
            let se: Map<String, Value> = self.params.iter().zip(se).map(|((n, _), s)| (n.clone(), num(*s))).collect();
            obj.insert("std_errors".into(), Value::Object(se));
        }
        obj.insert("loglik".into(), num(self.loglik));
        obj.insert("grad_norm".into(), num(self.grad_norm));
        obj.insert("info".into(), Value::Array(self.info.iter().map(|r| Value::Array(r.iter().map(|v| num(*v)).collect())).collect()));
        obj.insert("iterations".into(), json!(self.iterations));
        obj.insert("converged".into(), json!(self.converged));
        Value::Object(obj)
    }

    fn values_json(&self) -> Value {
        Value::Array(
            self.params
                .iter()
                .enumerate()
                .map(|(i, (n, v))| {
                    let mut o = Map::new();
                    o.insert("parameter".into(), json!(n));
                    o.insert("estimate".into(), num(*v));
                    if let Some(se) = &self.std_errors {
                        o.insert("std_error".into(), num(se[i]));
                    }
                    Value::Object(o)
                })
                .collect(),
        )
    }

    pub fn to_text(&self) -> String {
        let names: Vec<&str> = self.params.iter().map(|(n, _)| n.as_str()).collect();
        let w = names.iter().map(|n| n.len()).max().unwrap_or(0).max("parameter".len());
        let t = self.table().to_text();
        let mut lines = t.lines();
        let mut out = format!("{:<w$}  {}", "parameter", lines.next().unwrap_or(""));
        for (n, l) in names.iter().zip(lines) {
            let _ = write!(out, "\n{n:<w$}  {l}");
        }
        let _ = write!(
            out,
            "\nlog-likelihood {}, max |score| {}, {} after {} iterations{}",
            fmt_sig(self.loglik, TABLE_DIGITS),
            fmt_sig(self.grad_norm, TABLE_DIGITS),
            method_name(self.method),
            self.iterations,
            if self.converged { "" } else { " (not converged)" }
        );
        out
    }

    pub fn to_latex(&self) -> String {
        let t = self.table();
        let mut out = String::from("\\begin{tabular}{lrr}\nparameter & estimate & std.error \\\\ \\hline\n");
        for ((n, _), r) in self.params.iter().zip(&t.rows) {
            let cells: Vec<String> = r.iter().map(|v| fmt_sig(*v, TABLE_DIGITS)).collect();
            let _ = writeln!(out, "{} & {} \\\\", latex_text(n), cells.join(" & "));
        }
        let _ = write!(out, "\\end{{tabular}}\n\nlog-likelihood {}", fmt_sig(self.loglik, TABLE_DIGITS));
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub kind: BlockKind,
    pub title: String,
    pub latex: Option<String>,
    pub text: Option<String>,
    pub table: Option<Table>,
    pub fit: Option<FitSummary>,
}

impl Block {
    fn empty(kind: BlockKind, title: &str) -> Self {
        Block { kind, title: title.to_string(), latex: None, text: None, table: None, fit: None }
    }

    /// A formula with its plain-text rendering for the terminal.
    pub fn latex(title: &str, latex: String, plain: String) -> Self {
        Block { latex: Some(latex), text: Some(plain), ..Block::empty(BlockKind::Latex, title) }
    }

    pub fn plain(title: &str, text: String) -> Self {
        Block { text: Some(text), ..Block::empty(BlockKind::Plain, title) }
    }

    pub fn table(title: &str, table: Table) -> Self {
        Block { table: Some(table), ..Block::empty(BlockKind::Table, title) }
    }

    pub fn fit(title: &str, fit: FitSummary) -> Self {
        Block { fit: Some(fit), ..Block::empty(BlockKind::FitSummary, title) }
    }

    fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("kind".into(), json!(self.kind.name()));
        obj.insert("title".into(), json!(self.title));
        if let Some(l) = &self.latex {
            obj.insert("latex".into(), json!(l));
        }
        if self.kind == BlockKind::Plain {
            if let Some(t) = &self.text {
                obj.insert("text".into(), json!(t));
            }
        }
        if let Some(t) = &self.table {
            obj.insert("values".into(), t.to_json());
        }
        if let Some(f) = &self.fit {
            obj.insert("values".into(), f.values_json());
        }
        Value::Object(obj)
    }
}

/// Ordered output of a demo, script or fit, with a JSON mirror.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub demo: String,
    pub blocks: Vec<Block>,
    pub fits: Vec<FitSummary>,
}

impl Report {
    pub fn new(demo: &str) -> Self {
        Report { demo: demo.to_string(), ..Report::default() }
    }

    pub fn push(&mut self, block: Block) {
        self.blocks.push(block);
    }

    /// Adds a fit both as a block and to the fit list.
    pub fn push_fit(&mut self, title: &str, fit: FitSummary) {
        self.fits.push(fit.clone());
        self.blocks.push(Block::fit(title, fit));
    }

    pub fn to_json(&self) -> Value {
        json!({
            "demo": self.demo,
            "blocks": self.blocks.iter().map(Block::to_json).collect::<Vec<_>>(),
            "fits": self.fits.iter().map(FitSummary::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report values serialize");
        s.push('\n');
        s
    }

    /// Terminal rendering: plain forms of formulas and tables at
    /// three significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for b in &self.blocks {
            let _ = writeln!(out, "== {}", b.title);
            let body = match (&b.text, &b.table, &b.fit) {
                (_, Some(t), _) => t.to_text(),
                (_, _, Some(f)) => f.to_text(),
                (Some(t), _, _) => t.clone(),
                _ => b.latex.clone().unwrap_or_default(),
            };
            let _ = writeln!(out, "{body}\n");
        }
        out
    }

    /// A standalone LaTeX document with one paragraph per block.
    pub fn to_latex_document(&self) -> String {
        let mut out = String::from("\\documentclass{article}\n\\usepackage{amsmath}\n\\begin{document}\n");
        let _ = writeln!(out, "\\section*{{{}}}\n", latex_text(&self.demo));
        for b in &self.blocks {
            let _ = writeln!(out, "\\paragraph{{{}}}", latex_text(&b.title));
            match (&b.latex, &b.table, &b.fit, &b.text) {
                (Some(l), ..) => {
                    let _ = writeln!(out, "\\[\n{l}\n\\]\n");
                }
                (_, Some(t), ..) => {
                    let _ = writeln!(out, "{}\n", t.to_latex());
                }
                (_, _, Some(f), _) => {
                    let _ = writeln!(out, "{}\n", f.to_latex());
                }
                (_, _, _, Some(t)) => {
                    let _ = writeln!(out, "\\begin{{verbatim}}\n{t}\n\\end{{verbatim}}\n");
                }
                _ => {}
            }
        }
        out.push_str("\\end{document}\n");
        out
    }
}

fn num(v: f64) -> Value {
    let r = round_sig(v, JSON_DIGITS);
    serde_json::Number::from_f64(r).map(Value::Number).unwrap_or(Value::Null)
}

fn latex_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '_' | '&' | '%' | '#' | '$' | '{' | '}' => {
                out.push('\\');
                out.push(c);
            }
            _ => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(5.263157894, 3), "5.26");
        assert_eq!(fmt_sig(10.0, 3), "10");
        assert_eq!(fmt_sig(-2.818550, 3), "-2.82");
        assert_eq!(fmt_sig(0.0, 3), "0");
        assert_eq!(fmt_sig(1.23456e-9, 3), "1.23e-9");
        assert_eq!(round_sig(-48.13224, 6), -48.1322);
        assert_eq!(round_sig(0.1950123456, 6), 0.195012);
    }

    #[test]
    fn json_mirror() {
        let mut r = Report::new("t");
        r.push(Block::latex("f", "x^{2}".into(), "x^2".into()));
        r.push(Block::table("k", Table::new(&["n", "k_n"], vec![vec![10.0, 5.263157894]])));
        let v = r.to_json();
        assert_eq!(v["blocks"][0], json!({"kind": "latex", "title": "f", "latex": "x^{2}"}));
        assert_eq!(v["blocks"][1]["values"], json!([{"n": 10.0, "k_n": 5.26316}]));
        assert_eq!(v["fits"], json!([]));
        assert!(r.to_text().contains("5.26"));
    }

    #[test]
    fn non_finite_becomes_null() {
        assert_eq!(num(f64::NAN), Value::Null);
    }
}

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::Expr;

/// A named scalar unknown. Cheap to clone; compares by name.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// LaTeX spelling: `y_11` becomes `y_{11}`, `x_1_12` becomes `x_{1,12}`,
    /// Greek names become their control sequences.
    pub fn latex(&self) -> String {
        let name = self.name();
        let (head, tail) = match name.find('_') {
            Some(i) => (&name[..i], Some(&name[i + 1..])),
            None => (name, None),
        };
        let head = greek(head).map(str::to_string).unwrap_or_else(|| head.to_string());
        match tail {
            None | Some("") => head,
            Some(t) => {
                let t = t.trim_start_matches('{').trim_end_matches('}');
                format!("{}_{{{}}}", head, t.replace('_', ","))
            }
        }
    }
}

fn greek(name: &str) -> Option<&'static str> {
    const NAMES: [(&str, &str); 24] = [
        ("alpha", "\\alpha"),
        ("beta", "\\beta"),
        ("gamma", "\\gamma"),
        ("delta", "\\delta"),
        ("epsilon", "\\epsilon"),
        ("zeta", "\\zeta"),
        ("eta", "\\eta"),
        ("theta", "\\theta"),
        ("iota", "\\iota"),
        ("kappa", "\\kappa"),
        ("lambda", "\\lambda"),
        ("mu", "\\mu"),
        ("nu", "\\nu"),
        ("xi", "\\xi"),
        ("pi", "\\pi"),
        ("rho", "\\rho"),
        ("sigma", "\\sigma"),
        ("tau", "\\tau"),
        ("upsilon", "\\upsilon"),
        ("phi", "\\phi"),
        ("chi", "\\chi"),
        ("psi", "\\psi"),
        ("omega", "\\omega"),
        ("Sigma", "\\Sigma"),
    ];
    NAMES.iter().find(|(n, _)| *n == name).map(|(_, l)| *l)
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

// Natural order: digit runs compare numerically, so x_2 < x_10.
impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        natural_cmp(self.name(), other.name())
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (mut ai, mut bi) = (a.as_bytes(), b.as_bytes());
    loop {
        match (ai.first(), bi.first()) {
            (None, None) => return a.cmp(b),
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(x), Some(y)) if x.is_ascii_digit() && y.is_ascii_digit() => {
                let na = ai.iter().take_while(|c| c.is_ascii_digit()).count();
                let nb = bi.iter().take_while(|c| c.is_ascii_digit()).count();
                let da = trim_zeros(&ai[..na]);
                let db = trim_zeros(&bi[..nb]);
                let ord = da.len().cmp(&db.len()).then_with(|| da.cmp(db));
                if ord != Ordering::Equal {
                    return ord;
                }
                ai = &ai[na..];
                bi = &bi[nb..];
            }
            (Some(x), Some(y)) => {
                if x != y {
                    return x.cmp(y);
                }
                ai = &ai[1..];
                bi = &bi[1..];
            }
        }
    }
}

fn trim_zeros(d: &[u8]) -> &[u8] {
    let k = d.iter().take_while(|c| **c == b'0').count();
    &d[k..]
}

/// Ordered set of declared symbols. Declaration order drives parameter
/// ordering of compiled tapes and the layout of symbol vectors.
#[derive(Clone, Debug, Default)]
pub struct SymbolTable {
    order: Vec<Symbol>,
    index: HashMap<Symbol, usize>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares `name` (idempotent) and returns it as an expression.
    pub fn declare(&mut self, name: &str) -> Expr {
        let sym = Symbol::new(name);
        if !self.index.contains_key(&sym) {
            self.index.insert(sym.clone(), self.order.len());
            self.order.push(sym.clone());
        }
        Expr::symbol(sym)
    }

    pub fn declare_all(&mut self, names: &[&str]) -> Vec<Expr> {
        names.iter().map(|n| self.declare(n)).collect()
    }

    pub fn position(&self, sym: &Symbol) -> Option<usize> {
        self.index.get(sym).copied()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Declared symbols first in declaration order, undeclared ones after in
    /// natural order.
    pub fn sort(&self, syms: &mut [Symbol]) {
        syms.sort_by(|a, b| match (self.position(a), self.position(b)) {
            (Some(i), Some(j)) => i.cmp(&j),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => a.cmp(b),
        });
    }

    pub fn free_symbols(&self, e: &Expr) -> Vec<Symbol> {
        let mut syms = e.free_symbols();
        self.sort(&mut syms);
        syms
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn natural_ordering() {
        let mut v: Vec<Symbol> = ["x_10", "x_2", "b", "a", "x_1"].iter().map(|s| Symbol::new(s)).collect();
        v.sort();
        let names: Vec<&str> = v.iter().map(|s| s.name()).collect();
        assert_eq!(names, ["a", "b", "x_1", "x_2", "x_10"]);
    }

    #[test]
    fn latex_subscripts() {
        assert_eq!(Symbol::new("y_11").latex(), "y_{11}");
        assert_eq!(Symbol::new("v_{1}").latex(), "v_{1}");
        assert_eq!(Symbol::new("a").latex(), "a");
        assert_eq!(Symbol::new("lambda_").latex(), "\\lambda");
        assert_eq!(Symbol::new("x_1_12").latex(), "x_{1,12}");
    }

    #[test]
    fn table_keeps_declaration_order() {
        let mut t = SymbolTable::new();
        t.declare_all(&["y", "n", "b_1"]);
        t.declare("y");
        let mut s = vec![Symbol::new("b_1"), Symbol::new("z"), Symbol::new("n"), Symbol::new("y")];
        t.sort(&mut s);
        let names: Vec<&str> = s.iter().map(|s| s.name()).collect();
        assert_eq!(names, ["y", "n", "b_1", "z"]);
    }
}

//! LaTeX rendering in the usual CAS style (`\frac`, `\left( \right)`,
//! `e^{x}`, `\log{\left(x \right)}`).

use num_traits::{One, Signed};

use super::render::{display_terms, is_negative, split_fraction, Fraction};
use super::{Expr, Func, Node};
use crate::rational::Rational;

/// Rendering switches. `zero_as_dot` only affects matrix entries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LatexOptions {
    pub zero_as_dot: bool,
}

const ADD: u8 = 1;
const MUL: u8 = 2;
const POW: u8 = 4;
const ATOM: u8 = 5;

pub fn latex(e: &Expr) -> String {
    tex(e).0
}

fn paren(s: &str) -> String {
    format!("\\left({s}\\right)")
}

fn wrap(s: (String, u8), min: u8) -> String {
    if s.1 < min {
        paren(&s.0)
    } else {
        s.0
    }
}

fn num_tex(q: &Rational) -> (String, u8) {
    if q.is_integer() {
        let p = if q.is_negative() { ADD } else { ATOM };
        (q.numer().to_string(), p)
    } else {
        let body = format!("\\frac{{{}}}{{{}}}", q.numer().abs(), q.denom());
        if q.is_negative() {
            (format!("- {body}"), ADD)
        } else {
            (body, MUL)
        }
    }
}

fn func_tex(f: Func, arg: &Expr) -> String {
    let a = tex(arg).0;
    match f {
        Func::Exp => format!("e^{{{a}}}"),
        Func::Sqrt => format!("\\sqrt{{{a}}}"),
        Func::Log => format!("\\log{{\\left({a} \\right)}}"),
        Func::Sin => format!("\\sin{{\\left({a} \\right)}}"),
        Func::Cos => format!("\\cos{{\\left({a} \\right)}}"),
        Func::Asin => format!("\\operatorname{{asin}}{{\\left({a} \\right)}}"),
    }
}

fn tex(e: &Expr) -> (String, u8) {
    match e.node() {
        Node::Num(q) => num_tex(q),
        Node::Sym(s) => (s.latex(), ATOM),
        Node::Add(ch) => {
            let terms = display_terms(ch);
            let mut out = String::new();
            for (i, t) in terms.iter().enumerate() {
                if i == 0 {
                    out.push_str(&tex(t).0);
                } else if is_negative(t) {
                    out.push_str(" - ");
                    out.push_str(&wrap(tex(&-t), MUL));
                } else {
                    out.push_str(" + ");
                    out.push_str(&wrap(tex(t), MUL));
                }
            }
            (out, ADD)
        }
        Node::Func(f, a) => {
            let p = if *f == Func::Exp { POW } else { ATOM };
            (func_tex(*f, a), p)
        }
        Node::Pow(b, x) if !x.as_num().is_some_and(|q| q.is_negative()) => (power(b, x), POW),
        Node::Mul(_) | Node::Pow(..) => product(e),
    }
}

fn power(b: &Expr, x: &Expr) -> String {
    match b.node() {
        // exp(a)^k prints as e^{k a}
        Node::Func(Func::Exp, a) => format!("e^{{{}}}", tex(&(a * x)).0),
        Node::Func(Func::Sqrt, a) if x.as_i64().is_some() => {
            format!("\\left(\\sqrt{{{}}}\\right)^{{{}}}", tex(a).0, tex(x).0)
        }
        Node::Func(..) => format!("{}^{{{}}}", tex(b).0, tex(x).0),
        _ => format!("{}^{{{}}}", wrap(tex(b), ATOM), tex(x).0),
    }
}

fn join_factors(parts: &[(String, u8)]) -> String {
    let mut out = String::new();
    for (i, (s, _)) in parts.iter().enumerate() {
        if i > 0 {
            // keep adjacent numbers apart
            let prev_digit = out.ends_with(|c: char| c.is_ascii_digit());
            let next_digit = s.starts_with(|c: char| c.is_ascii_digit());
            out.push_str(if prev_digit && next_digit { " \\cdot " } else { " " });
        }
        out.push_str(s);
    }
    out
}

fn product(e: &Expr) -> (String, u8) {
    let Fraction { coeff, num, den } = split_fraction(e);
    let negative = coeff.is_negative();
    let c = coeff.abs();
    let mut num_parts: Vec<(String, u8)> = Vec::new();
    if !c.numer().is_one() || num.is_empty() {
        num_parts.push((c.numer().to_string(), ATOM));
    }
    // a lone sum over a denominator needs no parentheses either
    let bare = num.len() == 1 && num_parts.is_empty() && (!den.is_empty() || !c.denom().is_one());
    for f in &num {
        let t = tex(f);
        num_parts.push((if bare { t.0 } else { wrap(t, MUL + 1) }, ATOM));
    }
    let mut den_parts: Vec<(String, u8)> = Vec::new();
    if !c.denom().is_one() {
        den_parts.push((c.denom().to_string(), ATOM));
    }
    for f in &den {
        let t = tex(f);
        // a lone sum needs no parentheses inside \frac
        let s = if den.len() == 1 && c.denom().is_one() { t.0 } else { wrap(t, MUL + 1) };
        den_parts.push((s, ATOM));
    }
    let body = if den_parts.is_empty() {
        join_factors(&num_parts)
    } else {
        format!("\\frac{{{}}}{{{}}}", join_factors(&num_parts), join_factors(&den_parts))
    };
    if negative {
        (format!("- {body}"), ADD)
    } else {
        (body, MUL)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn l(s: &str) -> String {
        latex(&parse(s).unwrap())
    }

    #[test]
    fn fractions_and_powers() {
        assert_eq!(l("a/(a^2 - b^2)"), "\\frac{a}{a^{2} - b^{2}}");
        assert_eq!(l("-b/(a^2 - b^2)"), "- \\frac{b}{a^{2} - b^{2}}");
        assert_eq!(l("a"), "a");
        assert_eq!(l("1/2"), "\\frac{1}{2}");
        assert_eq!(l("3*x^5/5"), "\\frac{3 x^{5}}{5}");
        assert_eq!(l("y_11 + y_12"), "y_{11} + y_{12}");
        assert_eq!(l("(1 - a^2)/v^4"), "\\frac{1 - a^{2}}{v^{4}}");
        assert_eq!(l("(x + 1)/2"), "\\frac{x + 1}{2}");
    }

    #[test]
    fn functions() {
        assert_eq!(l("exp(x)"), "e^{x}");
        assert_eq!(l("sqrt(1 - a^2)"), "\\sqrt{1 - a^{2}}");
        assert_eq!(l("log(x)"), "\\log{\\left(x \\right)}");
        assert_eq!(l("-x*y*sin(x*y) + cos(x*y)"), "- x y \\sin{\\left(x y \\right)} + \\cos{\\left(x y \\right)}");
        assert_eq!(l("exp(s)/(exp(s) + 1)"), "\\frac{e^{s}}{e^{s} + 1}");
    }

    #[test]
    fn product_of_factors() {
        let s = l("x*(x - 2)*(x - 1)^2*(x + 1)");
        assert_eq!(s, "x \\left(x - 2\\right) \\left(x - 1\\right)^{2} \\left(x + 1\\right)");
    }
}

#![allow(dead_code)]

pub mod checks;
pub mod gen;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symstat_core::expr::{parse, Expr, Symbol};
use symstat_core::numbridge::eval_tree;
use symstat_core::solve::{isolate, Equation};
use symstat_core::SymMatrix;

pub fn p(s: &str) -> Expr {
    parse(s).unwrap()
}

pub fn sym(s: &str) -> Symbol {
    Symbol::new(s)
}

pub fn syms(names: &[&str]) -> Vec<Symbol> {
    names.iter().map(|n| Symbol::new(n)).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// Evaluates both expressions at `points` random assignments of their free
/// symbols drawn from `[lo, hi)` and returns the worst relative error.
pub fn max_rel_diff(a: &Expr, b: &Expr, points: usize, lo: f64, hi: f64, seed: u64) -> f64 {
    let mut syms = a.free_symbols();
    syms.extend(b.free_symbols());
    syms.sort();
    syms.dedup();
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..points {
        let vals: BTreeMap<Symbol, f64> = syms.iter().map(|s| (s.clone(), r.gen_range(lo..hi))).collect();
        let look = |s: &Symbol| vals.get(s).copied();
        let x: f64 = eval_tree(a, &look).unwrap();
        let y: f64 = eval_tree(b, &look).unwrap();
        worst = worst.max(rel_err(x, y));
    }
    worst
}

/// Male budworm batches: log2(dose), deaths, batch size.
pub const BUDWORM: [(f64, f64, f64); 6] =
    [(0.0, 1.0, 20.0), (1.0, 4.0, 20.0), (2.0, 9.0, 20.0), (3.0, 13.0, 20.0), (4.0, 18.0, 20.0), (5.0, 20.0, 20.0)];

pub const AR1_SERIES: [&str; 4] = ["1/10", "-9/10", "2/5", "0"];

/// `p` as a function of the linear predictor, obtained by inverting the logit.
pub fn p_of_s() -> Expr {
    let set = isolate(&Equation::new(p("log(p/(1 - p))"), p("s")), &sym("p")).unwrap();
    assert_eq!(set.len(), 1);
    set.values_of(&sym("p"))[0].clone()
}

/// Per-observation log-likelihood in `b_1, b_2` with free `x_1, x_2, y, n`.
pub fn log_lb() -> Expr {
    let b = SymMatrix::vector_sym(2, "b");
    let x = SymMatrix::vector_sym(2, "x");
    let s_b = x.hadamard(&b).unwrap().sum();
    let p_b = p_of_s().subs1(&sym("s"), &s_b);
    p("y*log(p) + (n - y)*log(1 - p)").subs1(&sym("p"), &p_b)
}

pub fn log_lb_total() -> Expr {
    let one = log_lb();
    Expr::add_all(BUDWORM.iter().map(|&(x, y, n)| {
        let mut m = BTreeMap::new();
        m.insert(sym("x_1"), Expr::int(1));
        m.insert(sym("x_2"), Expr::int(x as i64));
        m.insert(sym("y"), Expr::int(y as i64));
        m.insert(sym("n"), Expr::int(n as i64));
        one.subs(&m)
    }))
}

/// Logistic regression by iteratively reweighted least squares on the raw
/// data, independent of the symbolic pipeline.
pub fn irls(rows: &[(f64, f64, f64)]) -> (f64, f64) {
    let (mut b0, mut b1) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let (mut a00, mut a01, mut a11, mut r0, mut r1) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(x, y, n) in rows {
            let eta = b0 + b1 * x;
            let mu = 1.0 / (1.0 + (-eta).exp());
            let w = n * mu * (1.0 - mu);
            let z = eta + (y - n * mu) / w;
            a00 += w;
            a01 += w * x;
            a11 += w * x * x;
            r0 += w * z;
            r1 += w * x * z;
        }
        let det = a00 * a11 - a01 * a01;
        let n0 = (a11 * r0 - a01 * r1) / det;
        let n1 = (a00 * r1 - a01 * r0) / det;
        let done = (n0 - b0).abs().max((n1 - b1).abs()) < 1e-14;
        b0 = n0;
        b1 = n1;
        if done {
            break;
        }
    }
    (b0, b1)
}

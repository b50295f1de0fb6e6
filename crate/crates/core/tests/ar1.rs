mod common;

use std::collections::BTreeMap;

use common::{max_rel_diff, p, sym, syms, AR1_SERIES};
use symstat_core::calculus::{hessian, score};
use symstat_core::expr::{Expr, Symbol};
use symstat_core::numbridge::CompiledTape;
use symstat_core::optimize::{maximize_bounded, BoundedMethod, Bounds, BoxTransform, NelderMeadOptions, NewtonOptions};
use symstat_core::rational::frac;
use symstat_core::simplify::{rational_coefficients, simplify};
use symstat_core::SymMatrix;

fn l_matrix() -> SymMatrix {
    SymMatrix::diff_mat(4, &p("-a"), Some(p("sqrt(1 - a^2)")))
}

fn concentration() -> SymMatrix {
    l_matrix().crossprod().div_scalar(&p("v"))
}

/// `(log det K, x'Kx)` with the series substituted for `x`.
fn log_l_parts() -> (Expr, Expr) {
    let k = concentration();
    let x = SymMatrix::vector_sym(4, "x");
    let w = x.tcrossprod_with(false);
    let quad = k.hadamard(&w).unwrap().sum();
    let bind: BTreeMap<Symbol, Expr> =
        AR1_SERIES.iter().enumerate().map(|(i, v)| (sym(&format!("x_{}", i + 1)), p(v))).collect();
    (k.determinant().unwrap().log(), simplify(&quad.subs(&bind)))
}

fn box_transform() -> BoxTransform<f64> {
    BoxTransform::new(vec![Bounds::open(-0.99, 0.99), Bounds::open(0.01, 10.0)]).unwrap()
}

#[test]
fn concentration_structure() {
    let k = concentration();
    assert!(k.is_symmetric());
    for (i, j) in [(0, 2), (0, 3), (1, 3)] {
        assert!(k.get(i, j).is_zero() && k.get(j, i).is_zero());
    }
    assert_eq!(k.get(1, 1), &p("(a^2 + 1)/v"));
    assert_eq!(k.determinant().unwrap(), p("(1 - a^2)/v^4"));
    let v = l_matrix().inverse().unwrap().tcrossprod().scale(&p("v"));
    let prod = k.matmul(&v).unwrap().simplified();
    assert!(prod.is_identity());
    assert!(max_rel_diff(v.get(2, 3), &p("v*(a^5/(1 - a^2) + a^3 + a)"), 30, -0.9, 0.9, 1) < 1e-10);
}

#[test]
fn substituted_quadratic_form() {
    let (_, quad) = log_l_parts();
    let poly = simplify(&(&quad * p("v")));
    let c = rational_coefficients(&poly, &sym("a")).unwrap();
    assert_eq!(c, vec![frac(98, 100), frac(9, 10), frac(97, 100)]);
    assert_eq!(quad, p("(97*a^2 + 90*a + 98)/(100*v)"));
}

#[test]
fn bounded_fit_and_grid() {
    let (logdet, quad) = log_l_parts();
    let log_l = logdet - quad;
    let vars = syms(&["a", "v"]);
    let obj = CompiledTape::<f64>::compile(&log_l, Some(&vars)).unwrap();
    let bx = box_transform();

    let nm = maximize_bounded(&obj, &bx, &[0.0, 1.0], BoundedMethod::NelderMead(NelderMeadOptions::default())).unwrap();
    let sc = CompiledTape::<f64>::compile_matrix(&score(&log_l, &vars), Some(&vars)).unwrap();
    let he = CompiledTape::<f64>::compile_matrix(&hessian(&log_l, &vars), Some(&vars)).unwrap();
    let method = BoundedMethod::Newton { score: &sc, hessian: &he, opts: NewtonOptions::default() };
    let newton = maximize_bounded(&obj, &bx, &[0.0, 1.0], method).unwrap();
    assert!(newton.converged);
    for fit in [&nm, &newton] {
        assert!((fit.estimates[0] + 0.376).abs() < 0.01, "{:?}", fit.estimates);
        assert!((fit.estimates[1] - 0.195).abs() < 0.01, "{:?}", fit.estimates);
    }
    assert!((nm.estimates[0] - newton.estimates[0]).abs() < 1e-5);

    let cells = 400;
    let (da, dv) = (1.98 / cells as f64, 9.99 / cells as f64);
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..cells {
        let a = -0.99 + (i as f64 + 0.5) * da;
        for j in 0..cells {
            let v = 0.01 + (j as f64 + 0.5) * dv;
            let f = obj.eval_scalar(&[a, v]).unwrap();
            if f > best.0 {
                best = (f, a, v);
            }
        }
    }
    assert!((best.1 - nm.estimates[0]).abs() <= da);
    assert!((best.2 - nm.estimates[1]).abs() <= dv);
    assert!(obj.eval_scalar(&nm.estimates).unwrap() >= best.0);
    assert!(nm.objective > obj.eval_scalar(&[0.0, 1.0]).unwrap());
}

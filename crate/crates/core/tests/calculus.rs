mod common;

use common::{p, sym};
use symstat_core::calculus::{derivative, derivative_n, limit, Direction, HeldForm, LimitPoint, LimitValue};
use symstat_core::numbridge::{quadrature, CompiledTape};
use symstat_core::rational::int;
use symstat_core::simplify::{expand, factor_univariate};
use symstat_core::solve::solve_system;
use symstat_core::solve::EquationSystem;

const POLY: &str = "1 - x^2 + x^3 + x^4/4 - 3*x^5/5 + x^6/6";

#[test]
fn stationary_points_and_hessian() {
    let x = sym("x");
    let f = p(POLY);
    let g = derivative(&f, &x);
    assert_eq!(g, p("x^5 - 3*x^4 + x^3 + 3*x^2 - 2*x"));
    let set = solve_system(&EquationSystem::from_zeros(vec![g.clone()], vec![x.clone()]).unwrap()).unwrap();
    let mut roots: Vec<_> = set.values_of(&x).iter().map(|e| e.as_num().unwrap().clone()).collect();
    roots.sort();
    assert_eq!(roots, vec![int(-1), int(0), int(1), int(2)]);
    assert_eq!(set.solutions.iter().find(|s| s.values[&x].is_one()).unwrap().multiplicity, 2);

    let h = derivative_n(&f, &[x.clone(), x.clone()]);
    let tape = CompiledTape::<f64>::compile(&h, None).unwrap();
    let at: Vec<f64> = [-1.0, 0.0, 1.0, 2.0].iter().map(|v| tape.eval_scalar(&[*v]).unwrap()).collect();
    assert_eq!(at, vec![12.0, -2.0, 0.0, 6.0]);
}

#[test]
fn gradient_factors() {
    let x = sym("x");
    let g = derivative(&p(POLY), &x);
    let g2 = factor_univariate(&g, &x).unwrap();
    assert_eq!(expand(&g2), g);
    assert_eq!(g2.to_latex(), r"x \left(x - 2\right) \left(x - 1\right)^{2} \left(x + 1\right)");
}

#[test]
fn e_limit() {
    let n = sym("n");
    let held = HeldForm::limit(p("(1 + x/n)^n"), n.clone(), LimitPoint::PosInf, Direction::Both);
    assert_eq!(held.to_latex(), r"\lim_{n \to \infty} \left(1 + \frac{x}{n}\right)^{n}");
    assert_eq!(held.doit().unwrap(), LimitValue::Finite(p("exp(x)")));
    assert_eq!(limit(&p("(1 + x/n)^n"), &n, &LimitPoint::PosInf, Direction::Both).unwrap().to_latex(), "e^{x}");
}

#[test]
fn half_disc_area() {
    let tape = CompiledTape::<f64>::compile(&p("sqrt(1 - x^2)"), None).unwrap();
    let r = quadrature(&tape, -1.0, 1.0, 1e-10).unwrap();
    assert!((r.value - std::f64::consts::FRAC_PI_2).abs() < 1e-8);
    let zero = CompiledTape::<f64>::compile(&p("0"), Some(&[sym("x")])).unwrap();
    assert_eq!(quadrature(&zero, 0.0, 1.0, 1e-10).unwrap().value, 0.0);
}

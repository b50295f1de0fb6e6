use std::path::Path;

use symstat_cli::report::BlockKind;
use symstat_cli::script::{parse_script, run_source, ScriptErrorKind, Session, Statement, Term, Value};

fn run(src: &str) -> symstat_cli::report::Report {
    run_source(src, Path::new(".")).unwrap_or_else(|e| panic!("{e}"))
}

fn latex_of(src: &str) -> String {
    let r = run(src);
    r.blocks.last().and_then(|b| b.latex.clone()).expect("last block has LaTeX")
}

#[test]
fn empty_script_gives_empty_report() {
    let r = run("");
    assert!(r.blocks.is_empty() && r.fits.is_empty());
    let r = run("# only a comment\n\n   \n");
    assert!(r.blocks.is_empty());
}

#[test]
fn calculus_pipeline() {
    let src = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("scripts/calculus.sym")).unwrap();
    let r = run(&src);
    let table = r.blocks.iter().find_map(|b| b.table.as_ref().filter(|t| t.columns.contains(&"multiplicity".to_string()))).unwrap();
    let xs: Vec<f64> = table.rows.iter().map(|row| row[0]).collect();
    let hs: Vec<f64> = table.rows.iter().map(|row| row[2]).collect();
    assert_eq!(xs, [-1.0, 0.0, 1.0, 2.0]);
    assert_eq!(hs, [12.0, -2.0, 0.0, 6.0]);
    let quad = r.blocks.iter().find_map(|b| b.table.as_ref().filter(|t| t.columns[0] == "integral")).unwrap();
    assert!((quad.rows[0][0] - std::f64::consts::FRAC_PI_2).abs() < 1e-6);
}

#[test]
fn toeplitz_inverse_display() {
    let got = latex_of("let M = toeplitz(a, b)\nshow latex inv(M)");
    let want = "\\left[\\begin{matrix}\\frac{a}{a^{2} - b^{2}} & - \\frac{b}{a^{2} - b^{2}}\\\\- \\frac{b}{a^{2} - b^{2}} & \\frac{a}{a^{2} - b^{2}}\\end{matrix}\\right]";
    assert_eq!(got, want);
    let got = latex_of("let M = toeplitz(a, b)\nshow latex factor_out(1/det(M), inv(M))");
    assert_eq!(got, "\\frac{1}{a^{2} - b^{2}} \\left[\\begin{matrix}a & - b\\\\- b & a\\end{matrix}\\right]");
}

#[test]
fn bindings_substitute_into_expressions() {
    let r = run("let s = b_1 + b_2*x\nlet f = s^2\nshow plain diff(f, b_2)");
    assert_eq!(r.blocks[0].text.as_deref(), Some("2*x*(b_2*x + b_1)"));
    // a bound name passed as a variable stays a variable
    let r = run("let x = 3\nshow plain diff(x^2 + y*x, y)");
    assert_eq!(r.blocks[0].text.as_deref(), Some("3"));
}

#[test]
fn solutions_feed_substitution() {
    let src = "let g = score(log(p)*y + log(1 - p)*(n - y), [p])\nlet s = solve(entry(g, 1, 1), p)\nshow plain subs(p*(1 - p), s)";
    let r = run(src);
    assert_eq!(r.blocks[0].text.as_deref(), Some("y*(n - y)/n^2"));
}

#[test]
fn systems_and_sums() {
    let r = run("let s = solve_linear([x + y - 3, x - y - 1], [x, y])\nshow plain s\nshow plain sum(i^2, i, 1, n)");
    assert_eq!(r.blocks[0].text.as_deref(), Some("{x = 2, y = 1}"));
    assert_eq!(r.blocks[1].text.as_deref(), Some("n*(2*n^2 + 3*n + 1)/6"));
}

#[test]
fn limits_including_infinite() {
    let r = run("show plain limit((1 + x/n)^n, n, oo)\nshow plain limit(1/x, x, 0, \"right\")");
    assert_eq!(r.blocks[0].text.as_deref(), Some("exp(x)"));
    assert_eq!(r.blocks[1].text.as_deref(), Some("oo"));
}

#[test]
fn tables_render_as_table_blocks() {
    let r = run("show plain at(x^2, x, [1, 2, 1/2])");
    assert_eq!(r.blocks[0].kind, BlockKind::Table);
    assert_eq!(r.blocks[0].table.as_ref().unwrap().rows, vec![vec![1.0, 1.0], vec![2.0, 4.0], vec![0.5, 0.25]]);
}

#[test]
fn fits_from_data_statements() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("d.csv"), "x\n0.1\n-0.9\n0.4\n0\n").unwrap();
    let r = run_source("data \"d.csv\"\nfit ar1 column=x", dir.path()).unwrap();
    assert!((r.fits[0].params[0].1 + 0.376).abs() < 0.01);
    let r = run("data budworm\nfit logistic events=ndead trials=ntotal predictors=dose transform=log2:dose");
    assert_eq!(r.fits[0].params[1].0, "log2(dose)");
    assert!((r.fits[0].params[1].1 - 1.26).abs() < 0.01);
}

#[test]
fn parse_errors_carry_line_numbers() {
    let e = parse_script("let a = 1\n\n# note\nbogus statement\n").unwrap_err();
    assert_eq!((e.line, e.statement), (4, 2));
    assert!(matches!(e.kind, ScriptErrorKind::Syntax(_)));
    let e = parse_script("show latex frobnicate(x)").unwrap_err();
    assert!(matches!(e.kind, ScriptErrorKind::UnknownOp(ref op) if op == "frobnicate"));
    let e = parse_script("let diff = 2").unwrap_err();
    assert!(e.to_string().starts_with("line 1 (statement 1)"));
    assert!(parse_script("show latex inv(M").is_err());
}

#[test]
fn evaluation_errors_carry_statement_index() {
    let e = run_source("let M = toeplitz(a, b)\n# comment\nshow plain det(M)\nshow plain inv(x)\n", Path::new(".")).unwrap_err();
    assert_eq!((e.line, e.statement), (4, 3));
    assert!(matches!(e.kind, ScriptErrorKind::Type { .. }));
    let e = run_source("let M = toeplitz(a, b)\nshow plain M + 1", Path::new(".")).unwrap_err();
    assert!(matches!(e.kind, ScriptErrorKind::NotScalar { .. }));
    let e = run_source("fit ar1 column=x", Path::new(".")).unwrap_err();
    assert!(matches!(e.kind, ScriptErrorKind::NoData));
    let e = run_source("show plain diff(x)", Path::new(".")).unwrap_err();
    assert!(matches!(e.kind, ScriptErrorKind::Arity { .. }));
}

#[test]
fn nested_calls_are_lifted_out_of_arithmetic() {
    let s = parse_script("let d = 2*det(toeplitz(a, b)) + 1").unwrap();
    let Statement::Let { value: Term::Mixed(text, calls), .. } = &s[0].statement else { panic!("{s:?}") };
    assert_eq!(calls.len(), 1);
    assert!(text.contains(&calls[0].0));
    let mut session = Session::new(Path::new("."));
    session.run(&s).unwrap();
    let Some(Value::Expr(d)) = session.get("d") else { panic!() };
    assert_eq!(d.to_plain(), "2*(a^2 - b^2) + 1");
}

use va_core::examples::build_poly_mobius_lb;
use va_core::expr::{parse_expr, parse_expr_with, Alphabet, Env, Expr, Value};
use va_core::modules::Module;
use va_core::{Error, Exponent, Monomial, Scalar, Window};

const CORPUS: &[&str] = &[
    "Res_x2(x2^-1 * delta((x1-x0)/x2))",
    "(x+y)^(1/2)",
    "delta3(x0; x1, x2)",
    "d/dx(x^3 + 2*x)",
    "Taylor[y, x](x^2)",
    "<{t*}, Y({t}, x1) Y({t}, x2) {t}>",
    "Yo({t}, x) {1}",
    "-x^-2 + i*y",
    "(x1 - x2)^(-1)",
];

fn window() -> Window {
    Window::uniform(&["x", "y", "x0", "x1", "x2"], -6, 6)
}

fn scalar(v: Value) -> va_core::Series {
    match v {
        Value::Scalar(s) => s,
        Value::Vector(_) => panic!("expected a scalar series"),
    }
}

#[test]
fn printer_round_trips_corpus() {
    for text in CORPUS {
        let e = parse_expr(text).unwrap();
        let printed = e.to_string();
        assert_eq!(parse_expr(&printed).unwrap(), e, "{text} printed as {printed}");
    }
}

#[test]
fn residue_example_evaluates_to_one() {
    let e = parse_expr("Res_x2 ( x2^-1 * delta((x1-x0)/x2) )").unwrap();
    assert!(matches!(e, Expr::Res(ref v, _) if v == "x2"));
    let s = scalar(Env::new(window()).eval(&e).unwrap());
    assert_eq!(s.coeff(&Monomial::one()).unwrap(), Scalar::one());
    assert_eq!(s.coeff(&Monomial::ints(&[("x1", 1), ("x0", -1)])).unwrap(), Scalar::zero());
}

#[test]
fn unclosed_delta_reports_position() {
    match parse_expr("delta((x1-x2)/x0") {
        Err(Error::Syntax { line, column, expected }) => {
            assert_eq!((line, column), (1, 17));
            assert_eq!(expected, "')'");
        }
        other => panic!("expected a syntax error, got {other:?}"),
    }
}

#[test]
fn fractional_power_node() {
    let e = parse_expr("(x+y)^(1/2)").unwrap();
    assert!(matches!(e, Expr::Pow(_, p) if p == Exponent::frac(1, 2)));
    let s = scalar(Env::new(window()).eval(&e).unwrap());
    let m = Monomial::from_pairs(vec![("x".into(), Exponent::frac(-3, 2)), ("y".into(), Exponent::int(2))]);
    assert_eq!(s.coeff(&m).unwrap(), Scalar::from_frac(-1, 8));
}

#[test]
fn undeclared_variable_is_a_syntax_error() {
    assert!(matches!(parse_expr("z + 1"), Err(Error::Syntax { .. })));
    let alpha = Alphabet::new(["z"]);
    assert!(parse_expr_with("z + 1", &alpha).is_ok());
}

#[test]
fn delta_squared_is_rejected() {
    let e = parse_expr("delta(x) * delta(x)").unwrap();
    assert!(matches!(Env::new(window()).eval(&e), Err(Error::UndefinedProduct(_))));
}

#[test]
fn derivative_and_taylor() {
    let env = Env::new(window());
    let d = scalar(env.eval(&parse_expr("d/dx(x^3)").unwrap()).unwrap());
    assert_eq!(d.coeff(&Monomial::ints(&[("x", 2)])).unwrap(), Scalar::from_int(3));
    let t = scalar(env.eval(&parse_expr("Taylor[y, x](x^-1)").unwrap()).unwrap());
    assert_eq!(t.coeff(&Monomial::ints(&[("x", -3), ("y", 2)])).unwrap(), Scalar::one());
}

#[test]
fn pairing_with_loaded_module() {
    let m = Module::adjoint(&build_poly_mobius_lb());
    let env = Env::new(window()).with_module(m);
    let e = parse_expr("<{t^5*}, Y({t}, x1) Y({t}, x2) {t}>").unwrap();
    let s = scalar(env.eval(&e).unwrap());
    let expected = [(2, 0), (1, 1), (0, 2)];
    for (a, b) in expected {
        assert_eq!(s.coeff(&Monomial::ints(&[("x1", a), ("x2", b)])).unwrap(), Scalar::one());
    }
    assert_eq!(s.coeff(&Monomial::ints(&[("x1", 3)])).unwrap(), Scalar::zero());
}

#[test]
fn vectors_need_a_structure() {
    let e = parse_expr("Y({t}, x) {t}").unwrap();
    assert!(matches!(Env::new(window()).eval(&e), Err(Error::Eval(_))));
}

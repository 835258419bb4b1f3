use va_core::kernel::{
    binom_expand, delta, delta3, derivative, formal_taylor, multiply, residue, BinomArg, DeltaSigns,
};
use va_core::scalar::{binomial_int, Exponent, Scalar};
use va_core::{Error, Monomial, Series, Window};

fn x(k: i64) -> Monomial {
    Monomial::ints(&[("x", k)])
}

fn poly(terms: &[(i64, i64)]) -> Series {
    Series::from_terms(terms.iter().map(|&(k, c)| (x(k), Scalar::from_int(c))))
}

#[test]
fn delta_has_every_integer_power() {
    let d = delta("x");
    for k in -20..=20 {
        assert_eq!(d.coeff(&x(k)).unwrap(), Scalar::one());
    }
    assert!(d.terms().is_none());
    let half = Monomial::single("x", Exponent::frac(1, 2));
    assert_eq!(d.coeff(&half).unwrap(), Scalar::zero());
}

#[test]
fn residue_of_delta_is_one() {
    let r = residue(&delta("x"), "x");
    assert_eq!(r.coeff(&Monomial::one()).unwrap(), Scalar::one());
}

#[test]
fn delta_squared_is_undefined() {
    let err = multiply(&delta("x"), &delta("x")).unwrap_err();
    assert!(matches!(err, Error::UndefinedProduct(_)));
}

#[test]
fn laurent_polynomial_times_delta_evaluates_at_one() {
    let f = poly(&[(-3, 2), (0, -1), (4, 5)]);
    let prod = multiply(&f, &delta("x")).unwrap();
    for k in -10..=10 {
        assert_eq!(prod.coeff(&x(k)).unwrap(), Scalar::from_int(6));
    }
}

#[test]
fn binomial_coefficients_match_pascal() {
    for n in -6i64..=6 {
        for k in 1..8u64 {
            let lhs = binomial_int(n, k);
            let rhs = &binomial_int(n - 1, k - 1) + &binomial_int(n - 1, k);
            assert_eq!(lhs, rhs, "C({n},{k})");
        }
    }
    assert_eq!(binomial_int(-1, 5), Scalar::from_int(-1));
    assert_eq!(binomial_int(4, 5), Scalar::zero());
}

#[test]
fn negative_binomial_expands_geometrically() {
    // (x − y)^{-1} = Σ y^k x^{-k-1}
    let s = binom_expand(BinomArg::var("x"), BinomArg::neg("y"), Exponent::int(-1)).unwrap();
    for k in 0..10 {
        let m = Monomial::ints(&[("x", -k - 1), ("y", k)]);
        assert_eq!(s.coeff(&m).unwrap(), Scalar::one());
    }
    let wrong_side = Monomial::ints(&[("x", 1), ("y", -2)]);
    assert_eq!(s.coeff(&wrong_side).unwrap(), Scalar::zero());
}

#[test]
fn binomial_rejects_degenerate_arguments() {
    let two = BinomArg::Num(Scalar::from_int(2));
    let three = BinomArg::Num(Scalar::from_int(3));
    assert!(matches!(binom_expand(two, three, Exponent::int(2)), Err(Error::BothArgumentsNumeric)));
    assert!(matches!(
        binom_expand(BinomArg::var("x"), BinomArg::var("x"), Exponent::int(2)),
        Err(Error::DuplicateVariable(_))
    ));
}

#[test]
fn delta3_requires_distinct_variables() {
    assert!(matches!(delta3("x0", "x1", "x0", DeltaSigns::STANDARD), Err(Error::DuplicateVariable(_))));
}

#[test]
fn derivative_lowers_exponents() {
    let f = poly(&[(-2, 1), (3, 4)]);
    let d = derivative(&f, "x");
    assert_eq!(d.coeff(&x(-3)).unwrap(), Scalar::from_int(-2));
    assert_eq!(d.coeff(&x(2)).unwrap(), Scalar::from_int(12));
    assert_eq!(d.coeff(&x(-2)).unwrap(), Scalar::zero());
}

#[test]
fn taylor_shift_of_polynomial() {
    // e^{y d/dx} x^2 = x^2 + 2xy + y^2
    let f = poly(&[(2, 1)]);
    let t = formal_taylor(&f, "x", "y").unwrap();
    let w = Window::uniform(&["x", "y"], -4, 4);
    let expected = Series::from_terms(vec![
        (Monomial::ints(&[("x", 2)]), Scalar::one()),
        (Monomial::ints(&[("x", 1), ("y", 1)]), Scalar::from_int(2)),
        (Monomial::ints(&[("y", 2)]), Scalar::one()),
    ]);
    assert!(t.first_difference(&expected, &w).unwrap().is_none());
}

#[test]
fn taylor_with_colliding_variable_fails() {
    let f = Series::from_terms(vec![(Monomial::ints(&[("x", 1), ("y", 1)]), Scalar::one())]);
    assert!(matches!(formal_taylor(&f, "x", "y"), Err(Error::VariableCollision(_))));
}

#[test]
fn first_difference_finds_witness() {
    let a = poly(&[(1, 1), (2, 2)]);
    let b = poly(&[(1, 1), (2, 3)]);
    let w = Window::uniform(&["x"], -5, 5);
    let (m, l, r) = a.first_difference(&b, &w).unwrap().unwrap();
    assert_eq!(m, x(2));
    assert_eq!((l, r), (Scalar::from_int(2), Scalar::from_int(3)));
}

#[test]
fn window_membership() {
    let w = Window::uniform(&["x", "y"], -2, 2);
    assert!(w.contains(&Monomial::ints(&[("x", -2), ("y", 2)])));
    assert!(!w.contains(&Monomial::ints(&[("x", 3)])));
}

#[test]
fn shifted_series_multiplies_by_monomial() {
    let s = delta("x").shift(&Monomial::ints(&[("y", 1)]));
    assert_eq!(s.coeff(&Monomial::ints(&[("x", 4), ("y", 1)])).unwrap(), Scalar::one());
    assert_eq!(s.coeff(&x(4)).unwrap(), Scalar::zero());
}

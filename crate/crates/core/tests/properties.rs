use proptest::prelude::*;

use va_core::duality::{iota_expand, reconstruct_rational, FitBounds, Poly2, RationalFn, Region};
use va_core::kernel::identities::verify_delta_evaluation;
use va_core::kernel::{binom_expand, formal_taylor, BinomArg};
use va_core::scalar::{binomial, binomial_int};
use va_core::{Exponent, Monomial, Scalar, Series, Window};

fn scalar() -> impl Strategy<Value = Scalar> {
    (-20i64..20, 1i64..6, -20i64..20, 1i64..6).prop_map(|(a, b, c, d)| Scalar::gaussian(a, b, c, d))
}

fn poly2() -> impl Strategy<Value = Poly2> {
    prop::collection::vec(((0u32..3, 0u32..3), -4i64..5), 1..5)
        .prop_map(|ts| Poly2::from_terms(ts.into_iter().map(|(ij, c)| (ij, Scalar::from_int(c)))))
        .prop_filter("nonzero", |p| p.degree().is_some())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scalar_field_laws(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        if let Some(inv) = a.inv() {
            prop_assert!((&a * &inv).is_one());
        }
        prop_assert_eq!(a.to_string().parse::<Scalar>().unwrap(), a.clone());
        prop_assert_eq!(Scalar::from_json(&a.to_json()).unwrap(), a);
    }

    #[test]
    fn binomial_int_agrees_with_general_binomial(n in -12i64..12, k in 0u64..10) {
        prop_assert_eq!(binomial_int(n, k), binomial(&Scalar::from_int(n), k));
    }

    #[test]
    fn binomial_exponent_law(p in -6i64..6, q in 1i64..4, k in 0i64..8) {
        // (x + y)^λ (x + y) = (x + y)^{λ+1}, coefficient of x^{λ+1−k} y^k
        let lambda = Exponent::frac(p, q);
        let next = Exponent::frac(p + q, q);
        let a = binom_expand(BinomArg::var("x"), BinomArg::var("y"), lambda).unwrap();
        let b = binom_expand(BinomArg::var("x"), BinomArg::var("y"), next).unwrap();
        // x^{num/q} y^yk
        let m = |num: i64, yk: i64| Monomial::from_pairs(vec![
            ("x".into(), Exponent::frac(num, q)),
            ("y".into(), Exponent::int(yk)),
        ]);
        let mut lhs = a.coeff(&m(p - k * q, k)).unwrap();
        if k > 0 {
            lhs = &lhs + &a.coeff(&m(p + q - k * q, k - 1)).unwrap();
        }
        prop_assert_eq!(lhs, b.coeff(&m(p + q - k * q, k)).unwrap());
    }

    #[test]
    fn taylor_matches_binomial(p in -8i64..8, q in 1i64..4) {
        let lambda = Exponent::frac(p, q);
        let f = Series::term(Monomial::single("x", lambda), Scalar::one());
        let t = formal_taylor(&f, "x", "y").unwrap();
        let b = binom_expand(BinomArg::var("x"), BinomArg::var("y"), lambda).unwrap();
        let w = Window::new().bound("x", -30, 30).bound("y", 0, 10);
        prop_assert!(t.first_difference(&b, &w).unwrap().is_none());
    }

    #[test]
    fn delta_evaluates_laurent_polynomials(coeffs in prop::collection::vec(-9i64..10, 13)) {
        let f = Series::from_terms(coeffs.iter().enumerate().map(|(i, c)| {
            (Monomial::ints(&[("x", i as i64 - 6)]), Scalar::from_int(*c))
        }));
        let r = verify_delta_evaluation(&f, "x", &Window::uniform(&["x"], -8, 8));
        prop_assert!(r.all_passed());
    }

    #[test]
    fn rational_round_trip(g in poly2(), r in 0i64..3, s in 0i64..3, t in 0i64..3) {
        let f = RationalFn::new(g, r, s, t);
        let w = Window::uniform(&["x1", "x2"], -14, 14);
        for region in [Region::I12, Region::I21] {
            let series = iota_expand(&f, region, &w).unwrap();
            let back = reconstruct_rational(&series, region, FitBounds { r: 3, s: 3, t: 3, deg: 4 }, &w).unwrap();
            prop_assert_eq!(&back, &f);
        }
    }

    #[test]
    fn division_by_linear_factor_inverts_multiplication(g in poly2(), sigma in prop::sample::select(vec![-1i64, 1])) {
        let prod = g.mul(&Poly2::linear(sigma));
        prop_assert_eq!(prod.div_linear(sigma).unwrap(), g);
    }
}

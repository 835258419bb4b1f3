use va_core::duality::*;
use va_core::examples::build_poly_mobius_lb;
use va_core::grading::Vector;
use va_core::modules::Module;
use va_core::scalar::binomial_int;
use va_core::{Error, Monomial, Scalar, Window};

fn lb() -> std::sync::Arc<Module> {
    Module::adjoint(&build_poly_mobius_lb())
}

fn basis(m: &Module, name: &str) -> Vector {
    Vector::basis(m.space.id_of(name).unwrap())
}

/// ⟨(t^n)*, Y(t,x1)Y(t,x2)t⟩ = Σ_{a+b=n−3} x1^a x2^b, since e^{xD}t = t/(1 − xt) for D = t²d/dt.
fn product_oracle(n: u32) -> Poly2 {
    Poly2::from_terms((0..=n - 3).map(|a| ((a, n - 3 - a), Scalar::one())))
}

/// ⟨(t^n)*, Y(Y(t,x0)t,x2)t⟩ = Σ_k C(n−2, k+1) x0^k x2^{n−3−k}.
fn iterate_oracle(n: u32) -> Poly2 {
    Poly2::from_terms((0..=n - 3).map(|k| ((k, n - 3 - k), binomial_int(n as i64 - 2, k as u64 + 1))))
}

#[test]
fn product_and_iterate_coefficients_match_closed_forms() {
    let m = lb();
    let t = basis(&m, "t");
    let w12 = Window::uniform(&["x1", "x2"], -12, 12);
    let w02 = Window::uniform(&["x0", "x2"], -12, 12);
    let bounds = FitBounds { r: 2, s: 2, t: 2, deg: 5 };
    for n in 3..=8u32 {
        let wp = basis(&m, &format!("t^{n}"));
        let prod = matrix_coeff(&m, CoeffKind::Product, &wp, &t, &t, &t, &w12).unwrap();
        let f = reconstruct_rational(&prod, Region::I12, bounds, &w12).unwrap();
        assert_eq!(f, RationalFn::new(product_oracle(n), 0, 0, 0), "n = {n}");
        let iter = matrix_coeff(&m, CoeffKind::Iterate, &wp, &t, &t, &t, &w02).unwrap();
        let h = reconstruct_rational(&iter, Region::I20, bounds, &w02).unwrap();
        assert_eq!(h, RationalFn::iterate(iterate_oracle(n), 0, 0, 0), "n = {n}");
        assert!(associativity_difference(&f, &h).unwrap().is_none());
    }
}

#[test]
fn duality_suite_passes_on_several_triples() {
    let m = lb();
    for (wp, v1, v2, w) in [("t", "t", "t", "t"), ("t^5", "t", "t", "t"), ("t^4", "1", "t", "t^2"), ("t^6", "t^2", "t", "t")] {
        let r = check_duality(&m, &basis(&m, wp), &basis(&m, v1), &basis(&m, v2), &basis(&m, w), 8, FitBounds::DEFAULT);
        assert!(r.all_passed(), "{r}");
    }
}

#[test]
fn iota_expansions_of_inverse_difference() {
    let f = RationalFn::new(Poly2::constant(Scalar::one()), 0, 0, 1);
    let w = Window::uniform(&["x1", "x2"], -5, 5);
    let s12 = iota_expand(&f, Region::I12, &w).unwrap();
    let s21 = iota_expand(&f, Region::I21, &w).unwrap();
    for k in 0..5 {
        let m12 = Monomial::ints(&[("x1", -k - 1), ("x2", k)]);
        let m21 = Monomial::ints(&[("x1", k), ("x2", -k - 1)]);
        assert_eq!(s12.coeff(&m12).unwrap(), Scalar::one());
        assert_eq!(s21.coeff(&m21).unwrap(), Scalar::from_int(-1));
        assert_eq!(s12.coeff(&m21).unwrap(), Scalar::zero());
    }
}

#[test]
fn reconstruction_reports_small_windows_and_tight_bounds() {
    let g = Poly2::from_terms([((2, 1), Scalar::from_int(3)), ((0, 0), Scalar::one())]);
    let f = RationalFn::new(g, 2, 1, 3);
    let wide = Window::uniform(&["x1", "x2"], -30, 30);
    let s = iota_expand(&f, Region::I12, &wide).unwrap();
    let tight = FitBounds { r: 1, s: 1, t: 1, deg: 4 };
    assert!(matches!(reconstruct_rational(&s, Region::I12, tight, &wide), Err(Error::NoFit)));
    let (back, used) = reconstruct_escalating(&s, Region::I12, tight, &wide, 40).unwrap();
    assert_eq!(back, f);
    assert!(used.t >= 3);
    let narrow = Window::uniform(&["x1", "x2"], -2, 2);
    let s = iota_expand(&f, Region::I12, &narrow).unwrap();
    assert!(matches!(
        reconstruct_rational(&s, Region::I12, FitBounds { r: 3, s: 3, t: 3, deg: 4 }, &narrow),
        Err(Error::AmbiguousFit)
    ));
}

#[test]
fn evaluation_at_a_pole() {
    let f = RationalFn::new(Poly2::constant(Scalar::one()), 0, 0, 1);
    assert!(matches!(f.eval(&Scalar::one(), &Scalar::one()), Err(Error::PoleHit)));
    assert_eq!(f.eval(&Scalar::from_int(3), &Scalar::one()).unwrap(), Scalar::from_frac(1, 2));
}

#[test]
fn rational_function_json_round_trip() {
    let g = Poly2::from_terms([((1, 2), Scalar::from_frac(-1, 3)), ((0, 1), Scalar::from_int(4))]);
    let f = RationalFn::new(g, 1, 2, 2);
    assert_eq!(RationalFn::from_json(&f.to_json()).unwrap(), f);
}

#[test]
fn normalization_cancels_common_factors() {
    // (x1 − x2) x1 / (x1^2 (x1 − x2)^2) = 1 / (x1 (x1 − x2))
    let g = Poly2::linear(-1).mul(&Poly2::term(1, 0, Scalar::one()));
    let f = RationalFn::new(g, 2, 0, 2);
    assert_eq!(f, RationalFn::new(Poly2::constant(Scalar::one()), 1, 0, 1));
}

#[test]
fn convergence_of_partial_sums() {
    let f = RationalFn::new(Poly2::constant(Scalar::one()), 0, 0, 1);
    let (two, one) = (Scalar::from_int(2), Scalar::one());
    let r = convergence_report(&f, Region::I12, (&two, &one), &[5, 10], |n| Scalar::from_int(2).powi(1 - n).unwrap());
    assert!(r.all_passed(), "{r}");
    // A bound that is too strict fails with a witness.
    let r = convergence_report(&f, Region::I12, (&two, &one), &[5], |n| Scalar::from_int(2).powi(-n - 2).unwrap());
    assert!(r.failed("order_5"));
}

#[test]
fn pz_identity_holds_for_degenerate_points() {
    let m = lb();
    for z in [Scalar::one(), Scalar::from_frac(1, 2), Scalar::from_int(3)] {
        let r = check_pz_from_module(&m, &z, &basis(&m, "t"), &basis(&m, "1"), &basis(&m, "t"), 4);
        assert!(r.all_passed(), "{r}");
    }
}

#[test]
fn pz_rejects_non_positive_z() {
    let m = lb();
    let r = check_pz_from_module(&m, &Scalar::from_int(-1), &basis(&m, "t"), &basis(&m, "t"), &basis(&m, "t"), 4);
    assert!(!r.all_passed());
}

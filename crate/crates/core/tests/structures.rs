use std::path::PathBuf;

use va_core::algebra::{check_axioms, check_strong_grading, CheckConfig};
use va_core::examples::*;
use va_core::grading::{audit_space, Space, Vector};
use va_core::modules::{
    check_module_axioms, check_opposite_identities, compare_structures, contragredient, ordinary_weight_check,
    weight_formula_check, Module,
};
use va_core::{Error, Scalar};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn small() -> CheckConfig {
    CheckConfig::new(-4, 4, 4)
}

#[test]
fn lower_bounded_polynomial_algebra_passes_everything() {
    let lb = build_poly_mobius_lb();
    let mut r = check_axioms(&lb, &small());
    r.merge(check_strong_grading(&lb, &small()));
    assert!(r.all_passed(), "{r}");
}

#[test]
fn polynomial_algebra_is_not_strongly_graded() {
    let poly = build_poly();
    assert!(check_axioms(&poly, &small()).all_passed());
    let r = check_strong_grading(&poly, &small());
    assert!(r.failed("weight_lower_bound"), "{r}");
}

#[test]
fn vertex_operator_of_t_on_t() {
    // Y(t, x) t = Σ (D^m t / m!) t x^m with D = t^2 d/dt, so t_{-1} t = t^2 and t_{-2} t = t^3.
    let lb = build_poly_mobius_lb();
    let t = lb.space.id_of("t").unwrap();
    let act = lb.bound();
    let id = |n: &str| Vector::basis(lb.space.id_of(n).unwrap());
    assert_eq!(act.apply(t, -1, &Vector::basis(t)).unwrap(), id("t^2"));
    assert_eq!(act.apply(t, -2, &Vector::basis(t)).unwrap(), id("t^3"));
    assert_eq!(act.apply(t, 0, &Vector::basis(t)).unwrap(), Vector::zero());
}

#[test]
fn two_dimensional_example_has_no_sl2() {
    let two = build_two_dim();
    assert!(check_axioms(&two, &small()).all_passed());
    let (feas, report) = prove_no_sl2(&two, 4).unwrap();
    assert!(matches!(feas, Sl2Feasibility::Infeasible { .. }), "{report}");
}

#[test]
fn infinite_algebra_needs_windowed_search() {
    assert!(matches!(prove_no_sl2(&build_poly(), 4), Err(Error::NotFiniteDimensional)));
    let (feas, _) = prove_no_sl2_windowed(&build_poly(), 6, 4).unwrap();
    assert!(matches!(feas, Sl2Feasibility::WindowFeasible { max_degree: 6 }));
}

#[test]
fn fixtures_round_trip_through_json() {
    for name in ["poly_mobius_lb.json", "poly.json", "two_dim.json", "trivial.json", "truncated_poly.json"] {
        let Structure::Algebra(a) = ingest_file(&fixture(name)).unwrap() else { panic!("{name} is not an algebra") };
        let again = algebra_from_json(&algebra_to_json(&a)).unwrap();
        let r = compare_structures(&Module::adjoint(&a), &Module::adjoint(&again), &small());
        assert!(r.all_passed(), "{name}: {r}");
    }
}

#[test]
fn broken_table_fails_jacobi_with_witness() {
    let Structure::Algebra(a) = ingest_file(&fixture("broken_jacobi.json")).unwrap() else { panic!() };
    let r = check_axioms(&a, &CheckConfig::default());
    assert!(r.failed("jacobi"));
    let json = r.to_json();
    let w = json["witnesses"].as_array().unwrap();
    assert!(w.iter().any(|w| w["check"] == "jacobi" && w["lhs"] != w["rhs"]));
}

#[test]
fn misplaced_vacuum_is_rejected_at_load() {
    let err = ingest_file(&fixture("bad_vacuum.json")).err().unwrap();
    assert!(matches!(err, Error::InvariantViolation { ref name, .. } if name == "vacuum_placement"), "{err}");
}

#[test]
fn jordan_block_is_generalized_only() {
    let m = build_jordan_toy(1);
    let r = check_module_axioms(&m, &small());
    assert!(r.passed("generalized_weight"), "{r}");
    assert!(ordinary_weight_check(&m, &small()).failed("ordinary_weight"));
    assert!(weight_formula_check(&m, &small()).all_passed());
}

#[test]
fn dropped_sign_breaks_opposite_identities() {
    let Structure::Module(m) = ingest_file(&fixture("dropped_sign.json")).unwrap() else { panic!() };
    let r = check_opposite_identities(&m, &small());
    assert!(r.failed("opposite_jacobi"), "{r}");
    let Structure::Module(good) = ingest_file(&fixture("lb_adjoint.json")).unwrap() else { panic!() };
    assert!(check_opposite_identities(&good, &small()).all_passed());
}

#[test]
fn double_contragredient_is_the_module() {
    for m in [Module::adjoint(&build_poly_mobius_lb()), build_jordan_toy(1)] {
        let dual = contragredient(&m).unwrap();
        assert!(check_module_axioms(&dual, &small()).all_passed());
        let back = contragredient(&dual).unwrap();
        let r = compare_structures(&back, &m, &small());
        assert!(r.all_passed(), "{r}");
    }
}

#[test]
fn contragredient_needs_lower_bounded_weights() {
    let m = Module::adjoint(&build_poly());
    assert!(contragredient(&m).is_err());
}

#[test]
fn space_audit_and_pairing() {
    let s = Space::simple(&[("a", 0), ("b", 1), ("c", 1)]);
    assert!(audit_space(&s, -2, 2).all_passed());
    let v = Vector::from_pairs([(1, Scalar::from_int(2)), (2, Scalar::from_int(3))]);
    let w = Vector::from_pairs([(1, Scalar::one()), (2, Scalar::from_int(-1))]);
    assert_eq!(va_core::grading::pair(&v, &w), Scalar::from_int(-1));
    assert_eq!(v.render(&s), "(2)*b + (3)*c");
}

#[test]
fn degenerate_conformal_passes_omega_sanity() {
    let m = Module::adjoint(&build_degenerate_conformal());
    assert!(check_opposite_identities(&m, &small()).passed("opposite_omega"));
}

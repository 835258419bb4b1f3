use num_rational::BigRational;
use serde_json::json;

use va_core::lie::*;
use va_core::linalg::Matrix;
use va_core::{Error, Scalar};

fn spins(w: &LieRep) -> Vec<(BigRational, usize)> {
    let mut s = sl2_spins(w).unwrap();
    s.sort();
    s
}

fn half(n: i64) -> BigRational {
    BigRational::new(n.into(), 2.into())
}

fn row(v: &[i64]) -> Matrix {
    Matrix::from_rows(vec![v.iter().map(|x| Scalar::from_int(*x)).collect()]).unwrap()
}

#[test]
fn sl2_brackets_and_killing_form() {
    let g = LieAlgebra::sl2();
    g.validate().unwrap();
    // basis e, f, h: [e, f] = h, [h, e] = 2e
    let e = [Scalar::one(), Scalar::zero(), Scalar::zero()];
    let f = [Scalar::zero(), Scalar::one(), Scalar::zero()];
    assert_eq!(g.bracket(&e, &f), vec![Scalar::zero(), Scalar::zero(), Scalar::one()]);
    let k = g.killing();
    assert_eq!(k.row(2)[2], Scalar::from_int(8));
    assert_eq!(k.row(0)[1], Scalar::from_int(4));
}

#[test]
fn clebsch_gordan_decompositions() {
    let d2 = LieRep::sl2_irrep(1);
    let d3 = LieRep::sl2_irrep(2);
    assert_eq!(spins(&tensor_rep(&d2, &d2).unwrap()), vec![(half(0), 1), (half(2), 1)]);
    assert_eq!(spins(&tensor_rep(&d2, &d3).unwrap()), vec![(half(1), 1), (half(3), 1)]);
    assert_eq!(spins(&tensor_rep(&d3, &d3).unwrap()), vec![(half(0), 1), (half(2), 1), (half(4), 1)]);
}

#[test]
fn determinant_pairing_intertwines_and_symmetric_does_not() {
    let d = LieRep::sl2_irrep(1);
    let one = LieRep::sl2_irrep(0);
    let det = IntertwiningMap { matrix: row(&[0, 1, -1, 0]) };
    assert!(check_intertwining(&det, &d, &d, &one).all_passed());
    let sym = IntertwiningMap { matrix: row(&[0, 1, 1, 0]) };
    let r = check_intertwining(&sym, &d, &d, &one);
    assert!(r.failed("intertwining"));
}

#[test]
fn wrong_map_shape_is_a_dimension_error() {
    let d = LieRep::sl2_irrep(1);
    let bad = IntertwiningMap { matrix: row(&[1, 0]) };
    let r = check_intertwining(&bad, &d, &d, &d);
    assert!(r.failed("intertwining"));
}

#[test]
fn contragredient_of_contragredient() {
    for n in 0..4 {
        let w = LieRep::sl2_irrep(n);
        let dual = contragredient_rep(&w);
        assert!(LieRep::new(LieAlgebra::sl2(), dual.matrices.clone()).is_ok());
        assert_eq!(contragredient_rep(&dual), w);
        assert_eq!(spins(&dual), spins(&w));
    }
}

#[test]
fn associativity_for_mixed_dimensions() {
    let (a, b, c) = (LieRep::sl2_irrep(1), LieRep::sl2_irrep(2), LieRep::sl2_irrep(0));
    let (_, r) = associativity_iso(&a, &b, &c).unwrap();
    assert!(r.all_passed(), "{r}");
    let (i1, r1) = embed_inj(Bracketing::Inj1, &a, &b, &c).unwrap();
    let (i2, r2) = embed_inj(Bracketing::Inj2, &a, &b, &c).unwrap();
    assert!(r1.all_passed() && r2.all_passed());
    assert!(same_image(&i1, &i2).unwrap());
}

#[test]
fn pentagon_with_distinct_factors() {
    let w = [LieRep::sl2_irrep(1), LieRep::sl2_irrep(0), LieRep::sl2_irrep(1), LieRep::sl2_irrep(1)];
    let r = pentagon([&w[0], &w[1], &w[2], &w[3]]).unwrap();
    assert!(r.all_passed(), "{r}");
}

#[test]
fn triple_maps_factor_through_the_tensor_product() {
    let d = LieRep::sl2_irrep(1);
    let t = tensor_rep(&tensor_rep(&d, &d).unwrap(), &d).unwrap();
    let f = Matrix::identity(t.dim);
    let r = factorization(&f, [&d, &d, &d, &t]).unwrap();
    assert!(r.all_passed(), "{r}");
}

#[test]
fn mu_maps_transpose_the_functional() {
    let lambda: Vec<Scalar> = (0..8).map(Scalar::from_int).collect();
    let (mu1, mu2) = mu_maps(&lambda, [2, 2, 2]).unwrap();
    // λ(e1 ⊗ e0 ⊗ e1) = λ[5]
    assert_eq!(mu1.row(1)[1], Scalar::from_int(5));
    assert_eq!(mu2.row(2)[1], Scalar::from_int(5));
    assert!(matches!(mu_maps(&lambda, [2, 2, 3]), Err(Error::Dimension(_))));
}

#[test]
fn lie_file_round_trip_and_validation() {
    let v = json!({
        "bracket_constants": "sl2",
        "modules": [{"sl2_irrep": 1}, {"sl2_irrep": 0}],
        "maps": [{"name": "det", "type": [0, 0, 1], "matrix": [[0, 1, -1, 0]]}]
    });
    let lf = LieFile::from_json(&v).unwrap();
    let again = LieFile::from_json(&lf.to_json()).unwrap();
    assert_eq!(again.modules, lf.modules);
    assert_eq!(again.maps[0].matrix, lf.maps[0].matrix);

    // [x, y] = x violates antisymmetry.
    let broken = json!({
        "basis": ["x", "y"],
        "bracket_constants": [[0, 1, 0, 1]],
        "modules": []
    });
    assert!(LieFile::from_json(&broken).is_err());

    let wrong_dim = json!({"bracket_constants": "sl2", "modules": [{"dim": 3, "action_matrices": [[[0]], [[0]], [[0]]]}]});
    assert!(matches!(LieFile::from_json(&wrong_dim), Err(Error::Dimension(_))));
}

#[test]
fn abelian_algebra_from_constants() {
    let v = json!({"basis": ["a"], "bracket_constants": [], "modules": [{"dim": 2}]});
    let lf = LieFile::from_json(&v).unwrap();
    assert_eq!(lf.modules[0].dim, 2);
    assert!(matches!(LieRep::from_json(&lf.algebra, &json!({"sl2_irrep": 1})), Err(Error::AlgebraMismatch)));
}

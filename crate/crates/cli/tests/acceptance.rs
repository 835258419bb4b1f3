//! Acceptance suite: one line per criterion, exit status 1 if any criterion fails.

use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use va_core::action::apply_op;
use va_core::algebra::{check_axioms, check_strong_grading, weight_shift_check, CheckConfig, VertexAlgebra};
use va_core::duality::{
    check_duality, check_pz_from_module, convergence_report, iota_expand, partial_sum, reconstruct_rational, FitBounds,
    Poly2, RationalFn, Region,
};
use va_core::examples::*;
use va_core::grading::Vector;
use va_core::kernel::identities::{
    three_term_sides, two_term_sides, verify_delta_evaluation, verify_delta_identity, DeltaIdentity,
};
use va_core::kernel::{binom_expand, formal_taylor, BinomArg};
use va_core::lie::{
    associativity_iso, embed_inj, pentagon, same_image, sl2_spins, tensor_rep, Bracketing, LieRep,
};
use va_core::modules::{check_opposite_identities, compare_structures, contragredient, Module};
use va_core::{CheckReport, Exponent, Monomial, Scalar, Series, Window};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn require(report: &CheckReport, names: &[&str]) -> Result<(), String> {
    for n in names {
        if !report.passed(n) {
            return Err(format!("{n} did not pass:\n{report}"));
        }
    }
    Ok(())
}

fn require_all(report: &CheckReport) -> Result<(), String> {
    ensure(report.all_passed(), format!("{report}"))
}

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Generalized binomial coefficient C(λ, k), computed directly.
fn oracle_binomial(lambda: &BigRational, k: i64) -> BigRational {
    let mut acc = big(1);
    for i in 0..k {
        acc = acc * (lambda - big(i)) / big(i + 1);
    }
    acc
}

fn sign(k: i64) -> BigRational {
    if k.rem_euclid(2) == 0 {
        big(1)
    } else {
        big(-1)
    }
}

/// Coefficient of out^a · first^b · second^c in out⁻¹δ((first ± second)/(±out)).
fn oracle_delta3(a: i64, b: i64, c: i64, plus_second: bool, minus_out: bool) -> BigRational {
    let n = -a - 1;
    if c < 0 || b + c != n {
        return big(0);
    }
    let mut coeff = oracle_binomial(&big(n), c);
    if !plus_second {
        coeff *= sign(c);
    }
    if minus_out {
        coeff *= sign(n);
    }
    coeff
}

fn real(s: &Scalar) -> Result<BigRational, String> {
    ensure(s.is_real(), format!("{s} is not real"))?;
    Ok(s.re.clone())
}

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn delta_calculus() -> Outcome {
    let window = Window::uniform(&["x0", "x1", "x2"], -8, 8);
    for kind in [DeltaIdentity::TwoTerm, DeltaIdentity::ThreeTerm, DeltaIdentity::ThreeTermLhsInequality] {
        require_all(&verify_delta_identity(kind, &window))?;
    }
    // Independent oracle: every coefficient of every side on the cube.
    let (two_l, two_r) = two_term_sides().map_err(|e| e.to_string())?;
    let (three_a, three_b, three_r) = three_term_sides().map_err(|e| e.to_string())?;
    let mut witness = None;
    for e0 in -8..=8 {
        for e1 in -8..=8 {
            for e2 in -8..=8 {
                let m = Monomial::ints(&[("x0", e0), ("x1", e1), ("x2", e2)]);
                let get = |s: &Series| s.coeff(&m).map_err(|e| e.to_string()).and_then(|c| real(&c));
                // x2⁻¹δ((x1−x0)/x2) and x1⁻¹δ((x2+x0)/x1)
                let l2 = oracle_delta3(e2, e1, e0, false, false);
                let r2 = oracle_delta3(e1, e2, e0, true, false);
                ensure(l2 == r2, format!("two-term identity fails in the oracle at {m}"))?;
                ensure(get(&two_l)? == l2 && get(&two_r)? == r2, format!("two-term coefficient at {m}"))?;
                // x0⁻¹δ((x1−x2)/x0) − x0⁻¹δ((x2−x1)/(−x0)) = x2⁻¹δ((x1−x0)/x2)
                let a = oracle_delta3(e0, e1, e2, false, false);
                let b = oracle_delta3(e0, e2, e1, false, true);
                let r = oracle_delta3(e2, e1, e0, false, false);
                ensure(&a - &b == r, format!("three-term identity fails in the oracle at {m}"))?;
                ensure(
                    get(&three_a)? == a && get(&three_b)? == b && get(&three_r)? == r,
                    format!("three-term coefficient at {m}"),
                )?;
                if witness.is_none() && a != b {
                    witness = Some(format!("{m}: {a} vs {b}"));
                }
            }
        }
    }
    let witness = witness.ok_or("left-hand terms agree everywhere")?;
    for k in -6..=6 {
        let f = Series::term(Monomial::ints(&[("x", k)]), Scalar::one());
        require_all(&verify_delta_evaluation(&f, "x", &Window::uniform(&["x"], -8, 8)))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed());
    for _ in 0..20 {
        let f = Series::from_terms(
            (-6..=6).map(|k| (Monomial::ints(&[("x", k)]), Scalar::from_int(rng.gen_range(-9..=9)))),
        );
        require_all(&verify_delta_evaluation(&f, "x", &Window::uniform(&["x"], -8, 8)))?;
    }
    Ok(format!("4913 coefficients per identity; lhs terms differ at {witness}"))
}

fn formal_taylor_check() -> Outcome {
    let lambdas = [(-3, 1), (-1, 1), (-1, 2), (0, 1), (1, 2), (2, 1), (7, 3)];
    for (p, q) in lambdas {
        let lambda = Exponent::frac(p, q);
        let xl = Series::term(Monomial::single("x", lambda), Scalar::one());
        let taylor = formal_taylor(&xl, "x", "y").map_err(|e| e.to_string())?;
        let binom = binom_expand(BinomArg::var("x"), BinomArg::var("y"), lambda).map_err(|e| e.to_string())?;
        let lam = BigRational::new(BigInt::from(p), BigInt::from(q));
        for k in 0..12 {
            let m = Monomial::from_pairs(vec![
                ("x".to_string(), Exponent::frac(p - k * q, q)),
                ("y".to_string(), Exponent::int(k)),
            ]);
            let expected = Scalar::real(oracle_binomial(&lam, k));
            let t = taylor.coeff(&m).map_err(|e| e.to_string())?;
            let b = binom.coeff(&m).map_err(|e| e.to_string())?;
            ensure(t == expected && b == expected, format!("lambda = {p}/{q}, y^{k}: {t}, {b}, expected {expected}"))?;
        }
        let window = Window::new().bound("x", -20, 20).bound("y", -12, 11);
        let diff = taylor.first_difference(&binom, &window).map_err(|e| e.to_string())?;
        ensure(diff.is_none(), format!("lambda = {p}/{q}: {diff:?}"))?;
    }
    Ok("7 exponents, 12 coefficients each".into())
}

fn axiom_suites() -> Outcome {
    let cfg = CheckConfig::new(-8, 8, 8);
    let poly = build_poly();
    let r = check_axioms(&poly, &cfg);
    require(&r, &["vacuum", "creation", "jacobi", "sl2_brackets", "sl2_commutators", "derivative", "vacuum_sl2"])?;
    let sg = check_strong_grading(&poly, &cfg);
    ensure(!sg.all_passed(), "C[t] with D = -d/dt passed strong grading")?;
    let lb = build_poly_mobius_lb();
    let mut r = check_axioms(&lb, &cfg);
    r.merge(check_strong_grading(&lb, &cfg));
    require_all(&r)?;
    let two = build_two_dim();
    require_all(&check_axioms(&two, &cfg))?;
    let (feas, _) = prove_no_sl2(&two, 8).map_err(|e| e.to_string())?;
    let Sl2Feasibility::Infeasible { certificate } = feas else {
        return Err("two-dimensional example admits sl(2)".into());
    };
    ensure(!certificate.is_empty(), "empty certificate")?;
    Ok(format!("{} checks on C[t] with t^2 d/dt; certificate: {certificate}", r.checks.len()))
}

/// Every nonzero table entry v_n w and L(j)w has the predicted weight.
fn weight_oracle(m: &Module, cfg: &CheckConfig) -> Result<usize, String> {
    let act = m.bound();
    let vs = m.algebra.space.basis_in_weights(cfg.min_wt, cfg.max_wt);
    let ws = m.space.basis_in_weights(cfg.min_wt, cfg.max_wt);
    let wt = |space: &va_core::grading::Space, id| space.weight(id).map(|e| e.to_scalar()).map_err(|e| e.to_string());
    let mut entries = 0;
    for v in &vs {
        for w in &ws {
            for n in -cfg.window - 1..=cfg.window {
                let x = act.apply(v.id, n, &Vector::basis(w.id)).map_err(|e| e.to_string())?;
                let expected = &(&v.weight.to_scalar() + &w.weight.to_scalar()) - &Scalar::from_int(n + 1);
                for (id, _) in x.iter() {
                    entries += 1;
                    ensure(wt(&m.space, *id)? == expected, format!("{}_{n} {} in {}", v.name, w.name, m.name))?;
                }
            }
        }
    }
    for j in -1..=1 {
        let Some(op) = m.l(j) else { continue };
        for w in &ws {
            let x = apply_op(op.as_ref(), &Vector::basis(w.id)).map_err(|e| e.to_string())?;
            let expected = &w.weight.to_scalar() - &Scalar::from_int(j);
            for (id, _) in x.iter() {
                entries += 1;
                ensure(wt(&m.space, *id)? == expected, format!("L({j}) {} in {}", w.name, m.name))?;
            }
        }
    }
    Ok(entries)
}

fn weight_formula() -> Outcome {
    let cfg = CheckConfig::new(-8, 8, 8);
    let algebras: Vec<Arc<VertexAlgebra>> =
        vec![build_poly(), build_poly_mobius_lb(), build_trivial(), build_degenerate_conformal()];
    let mut modules: Vec<Arc<Module>> = algebras.iter().map(Module::adjoint).collect();
    modules.push(build_jordan_toy(1));
    let mut entries = 0;
    for a in &algebras {
        require_all(&weight_shift_check(a, &cfg))?;
    }
    for m in &modules {
        require_all(&va_core::modules::weight_formula_check(m, &cfg))?;
        entries += weight_oracle(m, &cfg)?;
    }
    Ok(format!("{} graded examples, {entries} nonzero entries", modules.len()))
}

fn opposite_contragredient() -> Outcome {
    let cfg = CheckConfig::new(-8, 8, 8);
    let m = Module::adjoint(&build_poly_mobius_lb());
    let r = check_opposite_identities(&m, &cfg);
    require(&r, &["opposite_jacobi", "opposite_derivative", "opposite_sl2"])?;
    let dual = contragredient(&m).map_err(|e| e.to_string())?;
    let double = contragredient(&dual).map_err(|e| e.to_string())?;
    require_all(&compare_structures(&double, &m, &cfg))?;
    let conf = Module::adjoint(&build_degenerate_conformal());
    require(&check_opposite_identities(&conf, &cfg), &["opposite_omega"])?;
    Ok("opposite identities on weights <= 8, W'' = W, omega sanity".into())
}

fn seed() -> u64 {
    std::env::var("VA_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(7)
}

fn random_numerator(rng: &mut ChaCha8Rng) -> Poly2 {
    loop {
        let mut g = Poly2::zero();
        for _ in 0..rng.gen_range(1..=4) {
            let d = rng.gen_range(0..=4u32);
            let i = rng.gen_range(0..=d);
            g.add_term(i, d - i, &Scalar::from_int(rng.gen_range(-5..=5)));
        }
        if g.degree().is_none() {
            continue;
        }
        return g;
    }
}

/// g(a, b) / (a^r b^s (a − b)^t) evaluated directly.
fn direct_eval(g: &Poly2, r: i64, s: i64, t: i64, a: &Scalar, b: &Scalar) -> Option<Scalar> {
    let num = g.eval(a, b);
    let den = &(&a.powi(r)? * &b.powi(s)?) * &(a - b).powi(t)?;
    num.checked_div(&den)
}

fn duality_check() -> Outcome {
    let m = Module::adjoint(&build_poly_mobius_lb());
    let id = |n: &str| m.space.id_of(n).map(Vector::basis).ok_or(format!("no {n}"));
    let t = id("t")?;
    let r = check_duality(&m, &t, &t, &t, &t, 10, FitBounds::DEFAULT);
    require(
        &r,
        &["rationality_of_products", "rationality_of_iterates", "commutativity", "associativity", "iterate_shifted"],
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed());
    let bounds = FitBounds { r: 3, s: 3, t: 3, deg: 4 };
    let window = Window::uniform(&["x1", "x2"], -16, 16);
    for k in 0..200 {
        let g = random_numerator(&mut rng);
        let (r0, s0, t0) = (rng.gen_range(0..=3), rng.gen_range(0..=3), rng.gen_range(0..=3));
        let f = RationalFn::new(g.clone(), r0, s0, t0);
        let series = iota_expand(&f, Region::I12, &window).map_err(|e| e.to_string())?;
        let back = reconstruct_rational(&series, Region::I12, bounds, &window).map_err(|e| format!("sample {k} ({f}): {e}"))?;
        ensure(back == f, format!("sample {k}: {f} came back as {back}"))?;
        for (a, b) in [(3, 1), (-2, 5), (7, 4)] {
            let (a, b) = (Scalar::from_int(a), Scalar::from_int(b));
            let direct = direct_eval(&g, r0, s0, t0, &a, &b).ok_or("pole")?;
            let got = back.eval(&a, &b).map_err(|e| e.to_string())?;
            ensure(direct == got, format!("sample {k}: value {got} vs {direct}"))?;
        }
    }
    Ok(format!("(t*, t, t, t) window 10; 200 round trips, seed {}", seed()))
}

fn convergence() -> Outcome {
    let f = RationalFn::new(Poly2::constant(Scalar::one()), 0, 0, 1);
    let orders = [10, 20, 30];
    let bound = |n: i64| Scalar::from_int(2).powi(1 - n).expect("nonzero");
    let (two, one) = (Scalar::from_int(2), Scalar::one());
    require_all(&convergence_report(&f, Region::I12, (&two, &one), &orders, bound))?;
    require_all(&convergence_report(&f, Region::I21, (&one, &two), &orders, bound))?;
    for n in orders {
        // Σ_{k=0}^{N} 2^{−k−1} = 1 − 2^{−N−1}
        let tail = Scalar::from_int(2).powi(-n - 1).expect("nonzero");
        let expected = &Scalar::one() - &tail;
        let p12 = partial_sum(&f, Region::I12, (&two, &one), n).map_err(|e| e.to_string())?;
        let p21 = partial_sum(&f, Region::I21, (&one, &two), n).map_err(|e| e.to_string())?;
        ensure(p12 == expected, format!("order {n}: {p12} vs {expected}"))?;
        ensure(p21 == -expected, format!("order {n}: {p21}"))?;
    }
    Ok("orders 10, 20, 30 at (2,1) and (1,2)".into())
}

/// Spins of an sl(2)-module from the h-eigenvalue multiset, peeling off highest weights.
fn oracle_spins(w: &LieRep) -> Vec<(i64, usize)> {
    let h = &w.matrices[2];
    let mut weights: Vec<i64> = (0..w.dim)
        .map(|i| {
            let d = h.row(i)[i].re.clone();
            d.to_integer().try_into().expect("small")
        })
        .collect();
    let mut out: Vec<(i64, usize)> = Vec::new();
    while let Some(&top) = weights.iter().max() {
        let mut k = top;
        while k >= -top {
            let pos = weights.iter().position(|x| *x == k).expect("weight string");
            weights.remove(pos);
            k -= 2;
        }
        match out.iter_mut().find(|(s, _)| *s == top) {
            Some(e) => e.1 += 1,
            None => out.push((top, 1)),
        }
    }
    out.sort();
    out
}

fn lie_analogy() -> Outcome {
    let d = LieRep::sl2_irrep(1);
    let (inj1, r1) = embed_inj(Bracketing::Inj1, &d, &d, &d).map_err(|e| e.to_string())?;
    let (inj2, r2) = embed_inj(Bracketing::Inj2, &d, &d, &d).map_err(|e| e.to_string())?;
    require_all(&r1)?;
    require_all(&r2)?;
    ensure(inj1.rank() == 8 && inj2.rank() == 8, "embeddings are not rank 8")?;
    ensure(same_image(&inj1, &inj2).map_err(|e| e.to_string())?, "images differ")?;
    let (_, ra) = associativity_iso(&d, &d, &d).map_err(|e| e.to_string())?;
    require_all(&ra)?;
    require_all(&pentagon([&d, &d, &d, &d]).map_err(|e| e.to_string())?)?;
    let t = tensor_rep(&d, &d).map_err(|e| e.to_string())?;
    let spins = sl2_spins(&t).map_err(|e| e.to_string())?;
    let mut got: Vec<(i64, usize)> = spins
        .iter()
        .map(|(j, m)| ((j * big(2)).to_integer().try_into().expect("small"), *m))
        .collect();
    got.sort();
    let expected = oracle_spins(&t);
    ensure(got == expected && expected == vec![(0, 1), (2, 1)], format!("spins {got:?} vs {expected:?}"))?;
    Ok("rank 8, equal images, 8 basis triples, pentagon, 2x2 = spin 1 + spin 0".into())
}

fn pz_check() -> Outcome {
    let m = Module::adjoint(&build_poly_mobius_lb());
    let id = |n: &str| m.space.id_of(n).map(Vector::basis).ok_or(format!("no {n}"));
    let mut total = 0;
    for z in [Scalar::one(), Scalar::from_frac(1, 2)] {
        for (v, w1, w2) in [("t", "t", "t"), ("1", "t", "t^2"), ("t^2", "1", "t")] {
            let r = check_pz_from_module(&m, &z, &id(v)?, &id(w1)?, &id(w2)?, 6);
            require_all(&r)?;
            total += 1;
        }
    }
    Ok(format!("{total} vector triples at z = 1 and z = 1/2, window 6"))
}

fn negative_controls() -> Outcome {
    let cases = [
        (vec!["check", "broken_jacobi.json"], "jacobi"),
        (vec!["check", "dropped_sign.json"], "opposite_jacobi"),
        (vec!["check", "bad_lie_map.json"], "intertwining"),
    ];
    for (args, check) in cases {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_va"));
        cmd.current_dir(fixtures()).args(&args).args(["--report", "json"]);
        let out = cmd.output().map_err(|e| e.to_string())?;
        ensure(out.status.code() == Some(1), format!("{args:?} exited with {:?}", out.status.code()))?;
        let report: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
        let witnesses = report["witnesses"].as_array().ok_or("no witnesses")?;
        ensure(
            witnesses.iter().any(|w| w["check"].as_str().is_some_and(|c| c.ends_with(check))),
            format!("{args:?}: no witness for {check}"),
        )?;
    }
    Ok("3 corrupted fixtures exit 1 with witnesses".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 10] = [
        ("delta calculus", delta_calculus, Some(Duration::from_secs(10))),
        ("formal Taylor", formal_taylor_check, None),
        ("axiom suites", axiom_suites, None),
        ("weight formula", weight_formula, None),
        ("opposite and contragredient", opposite_contragredient, None),
        ("duality", duality_check, Some(Duration::from_secs(60))),
        ("convergence", convergence, None),
        ("Lie analogy", lie_analogy, None),
        ("P(z) Jacobi", pz_check, None),
        ("negative controls", negative_controls, None),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(limit)) = (&outcome, limit) {
            if elapsed > *limit {
                outcome = Err(format!("took {elapsed:.1?}, limit {limit:?}"));
            }
        }
        match outcome {
            Ok(detail) => println!("criterion {:2} PASS {name} ({elapsed:.1?}): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:2} FAIL {name} ({elapsed:.1?}): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
